"""Two-mode Hamiltonian in the fixed-N collective spin basis.

Basis index ``k`` labels the Fock state ``|n1 = N - k, n2 = k>``, i.e. the
S_z eigenstate with ``m = k - N/2``.  With S_z = (n2 - n1)/2 and
S_x = (a1^+ a2 + a2^+ a1)/2 the Hamiltonian

    H = U S_z^2 - J S_x

is real symmetric tridiagonal in this basis.  Terms depending only on the
total atom number are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

NORM_TOL = 1e-10


@dataclass(frozen=True)
class SectorBasis:
    """Fock/spin basis of the sector with ``n_total`` atoms."""

    n_total: int

    def __post_init__(self):
        if int(self.n_total) != self.n_total or self.n_total < 0:
            raise ValueError(f"n_total must be a nonnegative integer, got {self.n_total!r}")
        object.__setattr__(self, "n_total", int(self.n_total))

    @property
    def dim(self) -> int:
        return self.n_total + 1

    @property
    def spin(self) -> float:
        return 0.5 * self.n_total

    @cached_property
    def m(self) -> np.ndarray:
        """S_z eigenvalues, ascending from -N/2 to +N/2 (half-integers for odd N)."""
        return np.arange(self.dim) - self.spin

    @cached_property
    def ladder(self) -> np.ndarray:
        """<m+1|S_+|m> = sqrt(S(S+1) - m(m+1)) for the N lower basis states."""
        s = self.spin
        m = self.m[:-1]
        return np.sqrt(s * (s + 1.0) - m * (m + 1.0))

    def fock(self, k: int) -> np.ndarray:
        """Unit vector on basis index ``k`` (``n2 = k`` atoms in mode 2)."""
        if not 0 <= k < self.dim:
            raise IndexError(f"basis index {k} outside [0, {self.n_total}]")
        psi = np.zeros(self.dim, dtype=complex)
        psi[k] = 1.0
        return psi


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def build_hamiltonian(basis: SectorBasis, u: float, j: float) -> TridiagonalHamiltonian:
    """H = u S_z^2 - j S_x as (diag, offdiag) arrays."""
    if not (np.isfinite(u) and np.isfinite(j)):
        raise ValueError(f"non-finite coefficients u={u!r}, j={j!r}")
    diag = u * basis.m**2
    offdiag = -0.5 * j * basis.ladder
    diag.setflags(write=False)
    offdiag.setflags(write=False)
    return TridiagonalHamiltonian(diag, offdiag)


def _as_state(psi, dim: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({dim},)")
    return psi


def apply(h: TridiagonalHamiltonian, psi) -> np.ndarray:
    """Exact tridiagonal product H @ psi."""
    psi = _as_state(psi, h.dim)
    out = h.diag * psi
    out[:-1] += h.offdiag * psi[1:]
    out[1:] += h.offdiag * psi[:-1]
    return out


def raising_expectation(basis: SectorBasis, psi) -> complex:
    """<S_+> = <a2^+ a1>."""
    psi = _as_state(psi, basis.dim)
    return complex(np.sum(basis.ladder * np.conj(psi[1:]) * psi[:-1]))


def spin_expectations(basis: SectorBasis, psi) -> tuple[float, float, float]:
    """Return (<S_x>, <S_y>, <S_z>) for a normalized state."""
    psi = _as_state(psi, basis.dim)
    prob = np.abs(psi) ** 2
    norm = prob.sum()
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state norm^2 {norm!r} deviates from 1 beyond {NORM_TOL}")
    s_plus = raising_expectation(basis, psi)
    sz = float(np.dot(basis.m, prob))
    return s_plus.real, s_plus.imag, sz

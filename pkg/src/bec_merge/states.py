"""Initial states: Fock x Fock products and Fock x coherent mixtures.

A coherent state in mode 2 is not a fixed-N state, but H and every
reported observable conserve the total atom number.  The coherent input is
therefore represented as a Poisson-weighted ensemble of number sectors that
are evolved independently; dropping the inter-sector coherences is exact
for all quantities computed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, pdtr, pdtrc

from .spin_core import SectorBasis

MAX_SECTORS = 2000


@dataclass(frozen=True)
class SectorState:
    basis: SectorBasis
    amplitudes: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"amplitudes have shape {amps.shape}, expected ({self.basis.dim},)")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"sector state is not normalized (norm^2 = {norm!r})")
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"weight must lie in (0, 1], got {self.weight!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_total(self) -> int:
        return self.basis.n_total


@dataclass(frozen=True)
class MixtureState:
    """Incoherent, weighted collection of fixed-N sector states."""

    sectors: tuple[SectorState, ...]
    n_mean: float

    def __post_init__(self):
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if not self.sectors:
            raise ValueError("mixture needs at least one sector")
        total = sum(s.weight for s in self.sectors)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"sector weights sum to {total!r}, expected 1")

    @property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.sectors])

    @property
    def totals(self) -> list[int]:
        return [s.n_total for s in self.sectors]


def single(state: SectorState) -> MixtureState:
    return MixtureState((state,), float(state.n_total))


def fock_fock(n1: int, n2: int) -> MixtureState:
    """|n1, n2> as a single sector with amplitude 1 on basis index k = n2."""
    if n1 < 0 or n2 < 0:
        raise ValueError(f"atom numbers must be nonnegative, got ({n1}, {n2})")
    if n1 + n2 < 2:
        raise ValueError("need at least two atoms in total")
    basis = SectorBasis(n1 + n2)
    return single(SectorState(basis, basis.fock(n2)))


def poisson_pmf(n, lam: float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return np.exp(n * np.log(lam) - lam - gammaln(n + 1.0))


def poisson_window(alpha_sq: float, tail_mass: float) -> tuple[int, int]:
    """[n_lo, n_hi] whose Poisson(alpha_sq) complement has mass <= tail_mass.

    The allowed mass is split evenly between the two tails; each bound is the
    tightest one satisfying its half.
    """
    half = 0.5 * tail_mass
    width = int(10.0 * math.sqrt(alpha_sq)) + 10
    n_lo = max(int(alpha_sq) - width, 0)
    while n_lo > 0 and pdtr(n_lo - 1, alpha_sq) > half:
        n_lo -= 1
    while pdtr(n_lo, alpha_sq) <= half:
        n_lo += 1
    n_hi = int(alpha_sq) + width
    while pdtrc(n_hi, alpha_sq) > half:
        n_hi += 1
    while n_hi > n_lo and pdtrc(n_hi - 1, alpha_sq) <= half:
        n_hi -= 1
    return n_lo, n_hi


def fock_coherent(n1: int, alpha_sq: float, tail_mass: float = 1e-8,
                  max_sectors: int = MAX_SECTORS) -> MixtureState:
    """Fock state with ``n1`` atoms in mode 1, coherent |alpha> in mode 2.

    Sector N = n1 + n carries the renormalized Poisson weight of n; sectors
    with too few atoms for a meaningful two-mode problem are still kept
    (N = 0 and N = 1 are valid bases).
    """
    if n1 < 0:
        raise ValueError(f"n1 must be nonnegative, got {n1}")
    if not (np.isfinite(alpha_sq) and alpha_sq > 0):
        raise ValueError(f"alpha_sq must be positive, got {alpha_sq!r}")
    if not 0 < tail_mass <= 1e-4:
        raise ValueError(f"tail_mass must lie in (0, 1e-4], got {tail_mass!r}")
    n_lo, n_hi = poisson_window(alpha_sq, tail_mass)
    if n_hi - n_lo + 1 > max_sectors:
        raise ValueError(
            f"alpha_sq={alpha_sq} needs {n_hi - n_lo + 1} sectors, cap is {max_sectors}"
        )
    ns = np.arange(n_lo, n_hi + 1)
    weights = poisson_pmf(ns, alpha_sq)
    weights /= weights.sum()
    sectors = []
    for n, w in zip(ns, weights):
        if w == 0.0:
            continue
        basis = SectorBasis(n1 + int(n))
        sectors.append(SectorState(basis, basis.fock(int(n)), float(w)))
    # renormalize again in case underflowed sectors were skipped
    total = sum(s.weight for s in sectors)
    sectors = [SectorState(s.basis, s.amplitudes, s.weight / total) for s in sectors]
    return MixtureState(tuple(sectors), float(n1 + alpha_sq))

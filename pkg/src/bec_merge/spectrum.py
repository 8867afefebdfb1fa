"""Eigenvalue spectrum of H(U, J) and the Fock / Josephson / Rabi regimes."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .spin_core import SectorBasis, build_hamiltonian

SIZE_GUARD = 5000


class Regime(str, enum.Enum):
    FOCK = "Fock"
    JOSEPHSON = "Josephson"
    RABI = "Rabi"


@dataclass(frozen=True)
class SpectrumTable:
    """Ground-shifted levels; ``levels[i]`` holds the N+1 energies at ``ratios[i]``."""

    n_total: int
    ratios: np.ndarray
    levels: np.ndarray


def eigenvalues(n: int, u: float, j: float) -> np.ndarray:
    """All N+1 eigenvalues of u S_z^2 - j S_x, ascending."""
    if n < 2:
        raise ValueError(f"need at least two atoms, got N={n}")
    if n > SIZE_GUARD:
        raise ValueError(f"N={n} exceeds size guard {SIZE_GUARD}")
    if u == 0 and j == 0:
        raise ValueError("u and j cannot both vanish")
    h = build_hamiltonian(SectorBasis(n), u, j)
    return eigh_tridiagonal(h.diag, h.offdiag, eigvals_only=True)


def default_grid(n: int, count: int = 200) -> np.ndarray:
    return np.logspace(-2, np.log10(100.0 * n), count)


def spectrum_sweep(n: int, ratio_grid) -> SpectrumTable:
    """Levels at u = 1, j = ratio for every grid point, each shifted to a zero ground level."""
    ratios = np.asarray(ratio_grid, dtype=float).ravel()
    if ratios.size == 0:
        raise ValueError("ratio grid is empty")
    if np.any(ratios < 0) or not np.all(np.isfinite(ratios)):
        raise ValueError("ratio grid must be finite and nonnegative")
    levels = np.empty((ratios.size, n + 1))
    for i, r in enumerate(ratios):
        e = eigenvalues(n, 1.0, r)
        levels[i] = e - e[0]
    return SpectrumTable(n, ratios, levels)


def regime_classify(n: int, u: float, j: float, fock_edge: float = 1.0,
                    rabi_edge: float | None = None) -> Regime:
    """Fock if J < fock_edge*U, Rabi if J > rabi_edge*U (default N^2), Josephson otherwise."""
    if u < 0 or j < 0 or (u == 0 and j == 0):
        raise ValueError("need u, j >= 0, not both zero")
    rabi_edge = float(n) ** 2 if rabi_edge is None else rabi_edge
    if j < fock_edge * u:
        return Regime.FOCK
    if j > rabi_edge * u:
        return Regime.RABI
    return Regime.JOSEPHSON

"""One-body density matrix, condensate fraction and mode angles, level populations."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .spin_core import SectorBasis, apply, build_hamiltonian, raising_expectation
from .states import MixtureState, SectorState

DENSE_GUARD = 2000
DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class OneBodyDensityMatrix:
    """rho = [[<a1+ a1>, <a1+ a2>], [<a2+ a1>, <a2+ a2>]]."""

    n11: float
    n22: float
    c12: complex

    @property
    def trace(self) -> float:
        return self.n11 + self.n22

    def matrix(self) -> np.ndarray:
        return np.array([[self.n11, self.c12], [np.conj(self.c12), self.n22]])

    def eigenvalues(self) -> tuple[float, float]:
        """(lambda_max, lambda_min) in closed form."""
        mean = 0.5 * (self.n11 + self.n22)
        half_gap = math.hypot(0.5 * (self.n11 - self.n22), abs(self.c12))
        return mean + half_gap, mean - half_gap


@dataclass(frozen=True)
class CondensateReading:
    eta: float
    theta: float
    phi: float


@dataclass(frozen=True)
class LevelPopulations:
    populations: np.ndarray
    spread90: int


def _sector_rho(basis: SectorBasis, psi: np.ndarray) -> OneBodyDensityMatrix:
    prob = np.abs(psi) ** 2
    sz = float(np.dot(basis.m, prob))
    n = float(prob.sum()) * basis.n_total
    # <a1+ a2> = <S_->, the conjugate of <S_+>
    c12 = np.conj(raising_expectation(basis, psi))
    return OneBodyDensityMatrix(0.5 * n - sz, 0.5 * n + sz, complex(c12))


def density_matrix(state: SectorState | MixtureState) -> OneBodyDensityMatrix:
    """rho of a sector state, or the weight-convex sum over the sectors of a mixture."""
    if isinstance(state, SectorState):
        return _sector_rho(state.basis, np.asarray(state.amplitudes))
    n11 = n22 = 0.0
    c12 = 0j
    for sector in state.sectors:
        rho = _sector_rho(sector.basis, np.asarray(sector.amplitudes))
        n11 += sector.weight * rho.n11
        n22 += sector.weight * rho.n22
        c12 += sector.weight * rho.c12
    return OneBodyDensityMatrix(n11, n22, c12)


def condensate_reading(rho: OneBodyDensityMatrix, total: float) -> CondensateReading:
    """Largest fraction eta and the dominant mode a_c = cos(theta) a1 + sin(theta) e^{i phi} a2.

    The eigenvector is gauge-fixed with a real nonnegative first component.
    A degenerate rho (no preferred mode) reports theta = phi = 0.
    """
    if not total > 0:
        raise ValueError(f"total atom number must be positive, got {total!r}")
    lam_max, lam_min = rho.eigenvalues()
    eta = lam_max / total
    split = lam_max - lam_min
    delta = rho.n11 - rho.n22
    if split <= 1e-12 * total or (abs(rho.c12) < 1e-12 * total and abs(delta) <= 1e-12 * total):
        return CondensateReading(eta, 0.0, 0.0)
    cos_sq = min(max(0.5 * (1.0 + delta / split), 0.0), 1.0)
    cos_theta = math.sqrt(cos_sq)
    if cos_theta < 1e-14:
        return CondensateReading(eta, 0.5 * math.pi, 0.0)
    theta = math.acos(min(cos_theta, 1.0))
    # second component ~ conj(c12); an exactly vanishing coherence gives phase 0
    phi = 0.0 if rho.c12 == 0 else math.atan2(-rho.c12.imag, rho.c12.real)
    if phi == -math.pi:
        phi = math.pi
    return CondensateReading(eta, theta, phi)


def _dense_eigh(basis: SectorBasis, u: float, j: float, vectors: bool = True):
    if basis.n_total > DENSE_GUARD:
        raise ValueError(f"N={basis.n_total} exceeds dense eigensolver guard {DENSE_GUARD}")
    h = build_hamiltonian(basis, u, j)
    if basis.dim == 1:
        return (h.diag.copy(), np.ones((1, 1))) if vectors else h.diag.copy()
    return eigh_tridiagonal(h.diag, h.offdiag, eigvals_only=not vectors)


def degenerate_clusters(energies: np.ndarray, rtol: float = DEGENERACY_RTOL) -> list[np.ndarray]:
    """Group ascending eigenvalues whose neighbour gaps are below rtol * spectral width."""
    width = float(energies[-1] - energies[0]) if len(energies) > 1 else 0.0
    tol = rtol * width if width > 0 else 0.0
    breaks = np.flatnonzero(np.diff(energies) > tol) + 1
    return np.split(np.arange(len(energies)), breaks)


def attribute_clusters(populations: np.ndarray, clusters: list[np.ndarray]) -> np.ndarray:
    """Move each degenerate cluster's total population onto its highest index.

    The split of population inside a degenerate cluster depends on the
    arbitrary choice of eigenvectors, so only the cluster total is meaningful.
    """
    out = np.zeros_like(populations)
    for cluster in clusters:
        out[cluster[-1]] = populations[cluster].sum()
    return out


def spread_index(attributed: np.ndarray, level: float = 0.9) -> int:
    """Smallest level index whose cumulative population reaches ``level``."""
    hits = np.flatnonzero(np.cumsum(attributed) >= level - 1e-12)
    return int(hits[0]) if len(hits) else int(len(attributed) - 1)


def _sector_populations(state: SectorState, u: float, j: float) -> tuple[np.ndarray, np.ndarray]:
    energies, vecs = _dense_eigh(state.basis, u, j)
    pops = np.abs(vecs.T @ np.asarray(state.amplitudes)) ** 2
    return pops, attribute_clusters(pops, degenerate_clusters(energies))


def level_populations(state: SectorState, u: float, j: float) -> LevelPopulations:
    """Populations of the instantaneous eigenlevels of H(u, j), ascending in energy."""
    pops, attributed = _sector_populations(state, u, j)
    return LevelPopulations(pops, spread_index(attributed))


def mixture_level_populations(mixture: MixtureState, u: float, j: float) -> LevelPopulations:
    """Weight-averaged populations, aligned by level index across sectors."""
    size = max(s.basis.dim for s in mixture.sectors)
    pops = np.zeros(size)
    attributed = np.zeros(size)
    for sector in mixture.sectors:
        p, a = _sector_populations(sector, u, j)
        pops[: len(p)] += sector.weight * p
        attributed[: len(a)] += sector.weight * a
    return LevelPopulations(pops, spread_index(attributed))


def energy(state: SectorState, u: float, j: float) -> float:
    """<psi|H(u, j)|psi>."""
    psi = np.asarray(state.amplitudes)
    h = build_hamiltonian(state.basis, u, j)
    return float(np.vdot(psi, apply(h, psi)).real)

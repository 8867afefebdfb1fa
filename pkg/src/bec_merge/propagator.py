"""Time evolution of sector states under H(t) = U(t) S_z^2 - J(t) S_x.

The integrator is the Cayley (Crank-Nicolson) map
(1 + i dt/2 H)^-1 (1 - i dt/2 H) with H evaluated at each step midpoint,
which is exactly unitary for any step and second-order accurate.  Each step
costs one tridiagonal solve.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ._kernels import cayley_evolve
from .observables import (
    CondensateReading,
    OneBodyDensityMatrix,
    _sector_populations,
    condensate_reading,
    spread_index,
)
from .spin_core import SectorBasis, build_hamiltonian
from .states import MixtureState, SectorState

DENSE_REFERENCE_GUARD = 200


class PropagationError(RuntimeError):
    """Numerical failure during propagation (norm drift or non-finite amplitudes)."""

    def __init__(self, message: str, sector: int | None = None, step: int | None = None):
        super().__init__(message)
        self.sector = sector
        self.step = step


@dataclass(frozen=True)
class EvolutionConfig:
    """Resolution and bookkeeping for a propagation run.

    ``steps_per_unit_time`` is a floor; the step count is raised until
    dt * max(max|diag H|, N J0 / 2) <= ``stability`` and then rounded up to a
    multiple of ``sample_count - 1``.  Level populations (spread90) are
    evaluated every ``level_stride`` samples and always at the final one.
    """

    steps_per_unit_time: int = 2000
    sample_count: int = 201
    norm_tolerance: float = 1e-9
    stability: float = 0.1
    level_stride: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.steps_per_unit_time < 1:
            raise ValueError("steps_per_unit_time must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if self.level_stride < 1:
            raise ValueError("level_stride must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


def step_count(n_total: int, schedule, config: EvolutionConfig) -> int:
    t_m = schedule.t_merge
    u_grid, j_grid = schedule.sample_many(np.linspace(0.0, t_m, 1001))
    if not (np.all(np.isfinite(u_grid)) and np.all(np.isfinite(j_grid))):
        raise PropagationError("schedule produced non-finite coefficients")
    scale = max(np.max(np.abs(u_grid)) * (0.25 * n_total**2), 0.5 * n_total * np.max(np.abs(j_grid)))
    steps = max(math.ceil(config.steps_per_unit_time * t_m), math.ceil(t_m * scale / config.stability), 1)
    chunk = config.sample_count - 1
    return chunk * math.ceil(steps / chunk)


@dataclass(frozen=True)
class SectorEvolution:
    final: SectorState
    times: np.ndarray
    amplitudes: np.ndarray
    n_steps: int


def evolve_sector(state: SectorState, schedule, config: EvolutionConfig = EvolutionConfig(),
                  sector_id: int | None = None) -> SectorEvolution:
    """Propagate one sector from t = 0 to t_merge, keeping ``sample_count`` snapshots."""
    basis = state.basis
    label = f"sector N={basis.n_total}" if sector_id is None else f"sector {sector_id} (N={basis.n_total})"
    n_steps = step_count(basis.n_total, schedule, config)
    stride = n_steps // (config.sample_count - 1)
    dt = schedule.t_merge / n_steps
    u_mid, j_mid = schedule.sample_many((np.arange(n_steps) + 0.5) * dt)
    out = np.empty((config.sample_count, basis.dim), dtype=np.complex128)
    cayley_evolve(basis.m**2, basis.ladder, np.asarray(state.amplitudes, dtype=np.complex128),
                  np.ascontiguousarray(u_mid, dtype=float), np.ascontiguousarray(j_mid, dtype=float),
                  dt, stride, out)

    bad = np.flatnonzero(~np.all(np.isfinite(out), axis=1))
    if len(bad):
        raise PropagationError(f"{label}: non-finite amplitudes at step {bad[0] * stride}",
                               sector_id, int(bad[0] * stride))
    drift = np.abs(np.linalg.norm(out, axis=1) - 1.0)
    over = np.flatnonzero(drift > config.norm_tolerance)
    if len(over):
        step = int(over[0] * stride)
        raise PropagationError(
            f"{label}: norm drift {drift[over[0]]:.3e} exceeds {config.norm_tolerance:g} at step {step}",
            sector_id, step)
    final = out[-1] / np.linalg.norm(out[-1])
    times = np.linspace(0.0, schedule.t_merge, config.sample_count)
    return SectorEvolution(SectorState(basis, final, state.weight), times, out, n_steps)


@dataclass(frozen=True)
class Trajectory:
    """Sampled observables of a (mixture) evolution.

    ``spread90`` is -1 at samples where level populations were not evaluated.
    """

    times: np.ndarray
    u: np.ndarray
    j: np.ndarray
    n11: np.ndarray
    n22: np.ndarray
    c12: np.ndarray
    eta: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    energy: np.ndarray
    norm_drift: np.ndarray
    spread90: np.ndarray
    total: float
    n_steps: int
    finals: tuple[SectorState, ...] = field(repr=False, default=())

    def __len__(self):
        return len(self.times)

    def reading(self, index: int = -1) -> CondensateReading:
        return CondensateReading(float(self.eta[index]), float(self.theta[index]), float(self.phi[index]))

    def density_matrix(self, index: int = -1) -> OneBodyDensityMatrix:
        return OneBodyDensityMatrix(float(self.n11[index]), float(self.n22[index]), complex(self.c12[index]))


def _sector_records(evo: SectorEvolution, u_s, j_s, level_idx) -> dict:
    basis = evo.final.basis
    amps = evo.amplitudes
    prob = np.abs(amps) ** 2
    norm_sq = prob.sum(axis=1)
    sz = prob @ basis.m
    half_n = 0.5 * basis.n_total * norm_sq
    c12 = np.conj(np.sum(basis.ladder * np.conj(amps[:, 1:]) * amps[:, :-1], axis=1))
    # <H> = u <S_z^2> - j <S_x>
    energy = u_s * (prob @ basis.m**2) - j_s * c12.real
    attributed = np.zeros((len(level_idx), basis.dim))
    for row, i in enumerate(level_idx):
        snap = SectorState(basis, amps[i] / math.sqrt(norm_sq[i]), evo.final.weight)
        attributed[row] = _sector_populations(snap, float(u_s[i]), float(j_s[i]))[1]
    return dict(n11=half_n - sz, n22=half_n + sz, c12=c12, energy=energy,
                drift=np.abs(np.sqrt(norm_sq) - 1.0), attributed=attributed)


def evolve_mixture(mixture: MixtureState, schedule, config: EvolutionConfig = EvolutionConfig()) -> Trajectory:
    """Evolve every sector independently and record the weighted observables.

    Sectors may run on worker threads; results are reduced in sector order so
    the output does not depend on the worker count.
    """
    times = np.linspace(0.0, schedule.t_merge, config.sample_count)
    u_s, j_s = schedule.sample_many(times)
    level_idx = sorted(set(range(0, config.sample_count, config.level_stride)) | {config.sample_count - 1})

    def run(item):
        sector_id, sector = item
        evo = evolve_sector(sector, schedule, config, sector_id)
        return evo.final, evo.n_steps, _sector_records(evo, u_s, j_s, level_idx)

    items = list(enumerate(mixture.sectors))
    if config.workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(item) for item in items]

    size = max(s.basis.dim for s in mixture.sectors)
    n11 = np.zeros(len(times))
    n22 = np.zeros(len(times))
    c12 = np.zeros(len(times), dtype=complex)
    energy = np.zeros(len(times))
    drift = np.zeros(len(times))
    attributed = np.zeros((len(level_idx), size))
    for sector, (_, _, rec) in zip(mixture.sectors, results):
        w = sector.weight
        n11 += w * rec["n11"]
        n22 += w * rec["n22"]
        c12 += w * rec["c12"]
        energy += w * rec["energy"]
        drift = np.maximum(drift, rec["drift"])
        attributed[:, : rec["attributed"].shape[1]] += w * rec["attributed"]

    spread = np.full(len(times), -1, dtype=int)
    for row, i in enumerate(level_idx):
        spread[i] = spread_index(attributed[row])
    readings = [condensate_reading(OneBodyDensityMatrix(a, b, c), mixture.n_mean)
                for a, b, c in zip(n11, n22, c12)]
    return Trajectory(
        times=times, u=np.asarray(u_s, dtype=float), j=np.asarray(j_s, dtype=float),
        n11=n11, n22=n22, c12=c12,
        eta=np.array([r.eta for r in readings]),
        theta=np.array([r.theta for r in readings]),
        phi=np.array([r.phi for r in readings]),
        energy=energy, norm_drift=drift, spread90=spread,
        total=mixture.n_mean,
        n_steps=max(r[1] for r in results),
        finals=tuple(r[0] for r in results),
    )


def dense_reference_evolve(state: SectorState, u: float, j: float, t: float) -> SectorState:
    """exp(-i H t) psi by full eigendecomposition of the constant tridiagonal H."""
    basis = state.basis
    if basis.n_total > DENSE_REFERENCE_GUARD:
        raise ValueError(f"N={basis.n_total} exceeds dense reference guard {DENSE_REFERENCE_GUARD}")
    h = build_hamiltonian(basis, u, j)
    psi = np.asarray(state.amplitudes)
    if basis.dim == 1:
        return SectorState(basis, np.exp(-1j * h.diag[0] * t) * psi, state.weight)
    energies, vecs = eigh_tridiagonal(h.diag, h.offdiag)
    out = vecs @ (np.exp(-1j * energies * t) * (vecs.T @ psi))
    return SectorState(basis, out, state.weight)


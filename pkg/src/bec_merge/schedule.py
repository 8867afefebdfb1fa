"""Time-dependent coefficients U(t), J(t) from moving Gaussian wavepackets.

Two cigar-shaped Gaussian modes (radial width ``sigma_r``, axial width
``sigma_z``) approach each other at uniform speed along the radial or the
axial direction.  U(t) follows the closed-form collision integral of the two
packets and J(t) their normalized overlap.  Both are then rescaled so that
U(0) = 1 (time measured in units of 1/U0) and N U0 = ratio * J0.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np


class Direction(str, enum.Enum):
    RADIAL = "radial"
    AXIAL = "axial"


@dataclass(frozen=True)
class TrapGeometry:
    """Gaussian trap geometry; ``separation0`` in the same length units as the widths."""

    sigma_r: float = 1.0
    sigma_z: float = 10.0
    separation0: float = 6.0
    direction: Direction = Direction.RADIAL
    t_merge: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        for name in ("sigma_r", "sigma_z", "separation0", "t_merge"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if raw_j_shape(self, self.separation0) > 1e-3:
            warnings.warn(
                f"initial separation {self.separation0} is only "
                f"{self.separation0 / self.sigma_merge:.3g} widths; tunneling is not "
                "negligible at t=0",
                stacklevel=3,
            )

    @classmethod
    def in_merge_widths(cls, sep0: float = 6.0, sigma_ratio: float = 10.0,
                        direction: Direction | str = Direction.RADIAL,
                        t_merge: float = 4.0, sigma_r: float = 1.0) -> "TrapGeometry":
        """Geometry with the initial separation given in units of the merge-direction width."""
        direction = Direction(direction)
        sigma_z = sigma_ratio * sigma_r
        sigma_m = sigma_r if direction is Direction.RADIAL else sigma_z
        return cls(sigma_r, sigma_z, sep0 * sigma_m, direction, t_merge)

    @property
    def sigma_merge(self) -> float:
        """Wavepacket width along the merging direction."""
        return self.sigma_r if self.direction is Direction.RADIAL else self.sigma_z


def separation(geometry: TrapGeometry, t):
    """Center-to-center distance x0 (1 - t/t_m)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > geometry.t_merge):
        raise ValueError(f"time outside [0, {geometry.t_merge}]")
    d = geometry.separation0 * (1.0 - t_arr / geometry.t_merge)
    return float(d) if d.ndim == 0 else d


def u_prefactor(geometry: TrapGeometry) -> float:
    """Collision integral of two fully separated packets (coupling constant set to 1)."""
    return 1.0 / (2.0 * math.sqrt(2.0) * math.pi**1.5 * geometry.sigma_r**2 * geometry.sigma_z)


def raw_u_shape(geometry: TrapGeometry, d):
    """(1/2) int |phi1|^4 + |phi2|^4 - 2|phi1|^2|phi2|^2 dr at separation ``d``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("separation must be nonnegative")
    val = u_prefactor(geometry) * -np.expm1(-(d**2) / (2.0 * geometry.sigma_merge**2))
    return float(val) if val.ndim == 0 else val


def raw_j_shape(geometry: TrapGeometry, d):
    """Overlap <phi1|phi2> = exp(-d^2 / (4 sigma_m^2))."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("separation must be nonnegative")
    val = np.exp(-(d**2) / (4.0 * geometry.sigma_merge**2))
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class MergeSchedule:
    """Calibrated U(t), J(t) with U(0) = u0 = 1 and n_cal * u0 = ratio * J(t_m)."""

    geometry: TrapGeometry
    n_cal: int
    ratio: float = 4.0
    u0: float = 1.0
    j0: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "j0", self.n_cal * self.u0 / self.ratio)

    @property
    def t_merge(self) -> float:
        return self.geometry.t_merge

    def u_at(self, t):
        g = self.geometry
        return self.u0 * raw_u_shape(g, separation(g, t)) / raw_u_shape(g, g.separation0)

    def j_at(self, t):
        g = self.geometry
        return self.j0 * raw_j_shape(g, separation(g, t)) / raw_j_shape(g, 0.0)

    def sample_many(self, times) -> tuple[np.ndarray, np.ndarray]:
        times = np.asarray(times, dtype=float)
        return np.asarray(self.u_at(times)), np.asarray(self.j_at(times))


def calibrate(geometry: TrapGeometry, n: int, ratio: float = 4.0) -> MergeSchedule:
    """Fix U0 = 1 and J0 = n / ratio for the given geometry."""
    if int(n) != n or n < 2:
        raise ValueError(f"calibration atom number must be an integer >= 2, got {n!r}")
    if not (np.isfinite(ratio) and ratio > 0):
        raise ValueError(f"ratio must be positive, got {ratio!r}")
    if not raw_u_shape(geometry, geometry.separation0) > 0:
        raise ValueError("degenerate geometry: zero collision integral at the initial separation")
    return MergeSchedule(geometry, int(n), float(ratio))


def sample(schedule: MergeSchedule, t: float) -> tuple[float, float]:
    """(U(t), J(t)) for a single time."""
    return float(schedule.u_at(t)), float(schedule.j_at(t))


@dataclass(frozen=True)
class FrozenSchedule:
    """Constant coefficients over [0, t_merge]; used for oracle and invariance checks."""

    u: float
    j: float
    t_merge: float

    @property
    def j0(self) -> float:
        return self.j

    def sample_many(self, times) -> tuple[np.ndarray, np.ndarray]:
        times = np.asarray(times, dtype=float)
        return np.full(times.shape, float(self.u)), np.full(times.shape, float(self.j))

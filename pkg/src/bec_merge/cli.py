"""Command-line front end: ``bec-merge {merge,spectrum,sweep,compare}``.

Settings come from an optional JSON config file (``--config``), overridden
by explicit flags.  A merge summary JSON carries the full config under the
``"config"`` key and can be fed back through ``--config`` to repeat a run.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .propagator import EvolutionConfig, PropagationError, Trajectory, evolve_mixture
from .schedule import Direction, TrapGeometry, calibrate
from .spectrum import default_grid, spectrum_sweep
from .states import fock_coherent, fock_fock

log = logging.getLogger("bec_merge")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SCENARIOS = ("merge", "spectrum", "sweep", "compare")
TRAJECTORY_COLUMNS = ("t", "U0t", "U", "J", "eta", "theta", "phi", "energy", "norm_drift", "spread90")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str = "merge"
    n1: int = 51
    n2: int | None = 49
    alpha_sq: float | None = None
    t_merge: float = 4.0
    t_merge_list: list[float] = field(default_factory=lambda: [0.04, 0.4, 4.0, 40.0])
    ratio: float = 4.0
    n_cal: int | None = None
    direction: str = "radial"
    sigma_r: float = 1.0
    sigma_ratio: float = 10.0
    sep0: float = 6.0
    steps: int = 2000
    samples: int = 201
    level_stride: int = 1
    tail_mass: float = 1e-8
    workers: int = 1
    n_spectrum: int = 20
    grid: list[float] | None = None
    grid_count: int = 200
    out: str | None = None
    summary: str | None = None
    plot: str | None = None

    def validate(self) -> "RunConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if (self.n2 is None) == (self.alpha_sq is None):
            raise ConfigError("exactly one of n2 and alpha_sq must be given")
        if self.n1 < 0 or (self.n2 is not None and self.n2 < 0):
            raise ConfigError("atom numbers must be nonnegative")
        if self.alpha_sq is not None and not self.alpha_sq > 0:
            raise ConfigError("alpha_sq must be positive")
        if not self.t_merge > 0:
            raise ConfigError("t_merge must be positive")
        if self.scenario == "sweep" and (not self.t_merge_list or any(not t > 0 for t in self.t_merge_list)):
            raise ConfigError("t_merge_list must be a nonempty list of positive times")
        if self.direction not in {d.value for d in Direction}:
            raise ConfigError(f"direction must be radial or axial, got {self.direction!r}")
        for name in ("ratio", "sigma_r", "sigma_ratio", "sep0"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.steps < 1 or self.samples < 2 or self.level_stride < 1 or self.workers < 1:
            raise ConfigError("steps, level_stride, workers must be >= 1 and samples >= 2")
        if self.scenario == "spectrum":
            if self.n_spectrum < 2:
                raise ConfigError("spectrum needs N >= 2")
            if self.grid is not None and len(self.grid) == 0 or self.grid_count < 1:
                raise ConfigError("ratio grid is empty")
        for name in ("out", "summary", "plot"):
            path = getattr(self, name)
            if path is not None and not Path(path).parent.is_dir():
                raise ConfigError(f"{name} directory does not exist: {path}")
        return self

    @property
    def n_calibration(self) -> int:
        if self.n_cal is not None:
            return int(self.n_cal)
        if self.alpha_sq is not None:
            return int(round(self.n1 + self.alpha_sq))
        return self.n1 + self.n2

    def evolution(self) -> EvolutionConfig:
        return EvolutionConfig(steps_per_unit_time=self.steps, sample_count=self.samples,
                               level_stride=self.level_stride, workers=self.workers)

    def geometry(self, t_merge: float | None = None, direction: str | None = None) -> TrapGeometry:
        return TrapGeometry.in_merge_widths(
            sep0=self.sep0, sigma_ratio=self.sigma_ratio, direction=direction or self.direction,
            t_merge=self.t_merge if t_merge is None else t_merge, sigma_r=self.sigma_r)

    def initial_state(self):
        if self.alpha_sq is not None:
            return fock_coherent(self.n1, self.alpha_sq, self.tail_mass)
        return fock_fock(self.n1, self.n2)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("config"), dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def fmt(value) -> str:
    """Shortest round-trip representation for floats."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path: str | None, header, rows) -> None:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())


def write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def trajectory_rows(traj: Trajectory, u0: float = 1.0):
    for i in range(len(traj)):
        yield (traj.times[i], u0 * traj.times[i], traj.u[i], traj.j[i], traj.eta[i], traj.theta[i],
               traj.phi[i], traj.energy[i], traj.norm_drift[i], int(traj.spread90[i]))


def run_trajectory(cfg: RunConfig, t_merge: float | None = None, direction: str | None = None):
    geometry = cfg.geometry(t_merge, direction)
    schedule = calibrate(geometry, cfg.n_calibration, cfg.ratio)
    state = cfg.initial_state()
    return schedule, evolve_mixture(state, schedule, cfg.evolution())


def summary_payload(cfg: RunConfig, schedule, traj: Trajectory) -> dict:
    return {
        "eta_final": float(traj.eta[-1]),
        "theta_final": float(traj.theta[-1]),
        "phi_final": float(traj.phi[-1]),
        "spread90_final": int(traj.spread90[-1]),
        "norm_drift_max": float(np.max(traj.norm_drift)),
        "eta_normalization": float(traj.total),
        "eta_normalized_by": "n_mean" if cfg.alpha_sq is not None else "N",
        "sectors": len(traj.finals),
        "steps": int(traj.n_steps),
        "calibration": {"u0": schedule.u0, "j0": schedule.j0, "n_cal": schedule.n_cal, "ratio": schedule.ratio},
        "config": cfg.to_dict(),
    }


def summary_path(cfg: RunConfig) -> str | None:
    if cfg.summary:
        return cfg.summary
    if cfg.out:
        return str(Path(cfg.out).with_suffix(".json"))
    return None


def run_merge(cfg: RunConfig) -> int:
    schedule, traj = run_trajectory(cfg)
    write_csv(cfg.out, TRAJECTORY_COLUMNS, trajectory_rows(traj, schedule.u0))
    path = summary_path(cfg)
    if path:
        write_json(path, summary_payload(cfg, schedule, traj))
    if cfg.plot:
        from .plotting import plot_merge
        plot_merge(traj, cfg.plot, title=rf"$U_0 t_m = {cfg.t_merge:g}$")
    log.info("eta_final=%.6f theta_final=%.6f phi_final=%.6f", traj.eta[-1], traj.theta[-1], traj.phi[-1])
    return EXIT_OK


def run_spectrum(cfg: RunConfig) -> int:
    grid = np.asarray(cfg.grid, dtype=float) if cfg.grid is not None else default_grid(cfg.n_spectrum, cfg.grid_count)
    table = spectrum_sweep(cfg.n_spectrum, grid)
    rows = ((r, level, e) for r, levels in zip(table.ratios, table.levels) for level, e in enumerate(levels))
    write_csv(cfg.out, ("ratio", "level_index", "energy_shifted"), rows)
    if cfg.plot:
        from .plotting import plot_spectrum
        plot_spectrum(table, cfg.plot)
    return EXIT_OK


SWEEP_COLUMNS = ("t_merge", "eta_final", "theta_final", "phi_final", "spread90", "status")


def run_sweep(cfg: RunConfig) -> int:
    def row(t_merge):
        try:
            _, traj = run_trajectory(dataclasses.replace(cfg, t_merge=t_merge, workers=1))
        except PropagationError as exc:
            return {"t_merge": t_merge, "eta_final": math.nan, "theta_final": math.nan,
                    "phi_final": math.nan, "spread90": -1, "status": f"error: {exc}"}
        return {"t_merge": t_merge, "eta_final": traj.eta[-1], "theta_final": traj.theta[-1],
                "phi_final": traj.phi[-1], "spread90": int(traj.spread90[-1]), "status": "ok"}

    times = [float(t) for t in cfg.t_merge_list]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(row, times))
    else:
        rows = [row(t) for t in times]
    write_csv(cfg.out, SWEEP_COLUMNS, ([r[c] for c in SWEEP_COLUMNS] for r in rows))
    if cfg.plot:
        from .plotting import plot_sweep
        plot_sweep(rows, cfg.plot)
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        log.error("t_merge=%g: %s", r["t_merge"], r["status"])
    return EXIT_NUMERIC if len(failed) == len(rows) else EXIT_OK


def run_compare(cfg: RunConfig) -> int:
    sched_r, radial = run_trajectory(cfg, direction="radial")
    sched_a, axial = run_trajectory(cfg, direction="axial")
    header = ["t", "U0t"] + [f"{c}_{d}" for d in ("radial", "axial") for c in TRAJECTORY_COLUMNS[2:]]
    rows = (r[:2] + r[2:] + a[2:] for r, a in zip(trajectory_rows(radial), trajectory_rows(axial)))
    write_csv(cfg.out, header, rows)
    path = summary_path(cfg)
    if path:
        write_json(path, {
            "radial": summary_payload(cfg, sched_r, radial),
            "axial": summary_payload(cfg, sched_a, axial),
            "eta_final_difference": float(radial.eta[-1] - axial.eta[-1]),
        })
    if cfg.plot:
        from .plotting import plot_compare
        plot_compare(radial, axial, cfg.plot)
    return EXIT_OK


RUNNERS = {"merge": run_merge, "spectrum": run_spectrum, "sweep": run_sweep, "compare": run_compare}


def _float_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bec-merge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="scenario", required=True)
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON config file (flags override its values)")
    common.add_argument("--n1", type=int, help="atoms in mode 1 (Fock)")
    common.add_argument("--n2", type=int, help="atoms in mode 2 (Fock)")
    common.add_argument("--alpha-sq", dest="alpha_sq", type=float, help="|alpha|^2 of a coherent state in mode 2")
    common.add_argument("--tm", dest="t_merge", type=float, help="merge duration in units of 1/U0")
    common.add_argument("--tm-list", dest="t_merge_list", type=_float_list, help="comma-separated merge durations")
    common.add_argument("--ratio", type=float, help="N U0 / J0 (default 4)")
    common.add_argument("--n-cal", dest="n_cal", type=int, help="atom number used for calibration")
    common.add_argument("--direction", choices=[d.value for d in Direction])
    common.add_argument("--sigma-ratio", dest="sigma_ratio", type=float, help="sigma_z / sigma_r (default 10)")
    common.add_argument("--sep0", type=float, help="initial separation in merge-direction widths (default 6)")
    common.add_argument("--steps", type=int, help="minimum steps per unit time")
    common.add_argument("--samples", type=int, help="number of trajectory samples")
    common.add_argument("--level-stride", dest="level_stride", type=int,
                        help="evaluate spread90 every k samples (always at the end)")
    common.add_argument("--tail-mass", dest="tail_mass", type=float, help="dropped Poisson mass")
    common.add_argument("--workers", type=int, help="worker threads for sectors / sweep rows")
    common.add_argument("--out", help="CSV output path (stdout if omitted)")
    common.add_argument("--summary", help="summary JSON path (default: --out with .json suffix)")
    common.add_argument("--plot", help="figure output path (.svg, .png, ...)")
    common.add_argument("--n", dest="n_spectrum", type=int, help="atom number for the spectrum")
    common.add_argument("--grid", type=_float_list, help="comma-separated J/U values")
    common.add_argument("--grid-count", dest="grid_count", type=int, help="points of the default log grid")
    helps = {
        "merge": "evolve one merge and write its trajectory",
        "spectrum": "eigenvalue spectrum against J/U",
        "sweep": "final readings for a list of merge durations",
        "compare": "radial against axial merging",
    }
    for name in SCENARIOS:
        sub.add_parser(name, parents=[common], help=helps[name], argument_default=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    flags = vars(args).copy()
    flags.pop("verbose", None)
    path = flags.pop("config", None)
    if path:
        values.update(load_config(path))
    if "alpha_sq" in flags and "n2" not in flags:
        values["n2"] = None
    if "n2" in flags and "alpha_sq" not in flags:
        values["alpha_sq"] = None
    values.update(flags)
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return RUNNERS[cfg.scenario](cfg)
    except PropagationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

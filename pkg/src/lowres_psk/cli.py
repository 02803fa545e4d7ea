"""Command-line front end: ``lowres-psk <command> [options]``.

Every command writes its result to a file under ``--out`` (default
``$LOWRES_PSK_OUT_DIR`` or ``./results``) and prints the path.  File names
carry a UTC timestamp so runs never clobber each other; ``--overwrite``
switches to stable names that are replaced in place.
"""

import argparse
import itertools
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from ._accel import backend
from .analytic import (
    QuadratureSettings,
    SepQuery,
    analytic_curve_values,
    asymptotic_sep_qpsk,
    db_to_linear,
    dvo_fit,
    dvo_theoretical,
    error_floor,
    phi_penalty_at_sep,
    psi_penalty,
    sep_bounds,
    sep_qpsk_rayleigh_2bit_closed,
)
from .channel import RNG_ALGORITHM
from .detector import decision_table
from .errors import ConfigError, LowResError
from .geometry import _is_power_of_two
from .montecarlo import SimPlan, simulate_sep, sweep_sep
from .results import SepCurve, write_curve, write_table

COMMANDS = ("simulate", "analytic", "bounds", "floor", "dvo", "penalty", "detector-table", "compare")
OUT_DIR_ENV = "LOWRES_PSK_OUT_DIR"
Z_FLAG = 4.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one CLI run."""

    command: str
    M: Tuple[int, ...] = (4,)
    n: Tuple[float, ...] = (2,)
    m: Tuple[float, ...] = (1.0,)
    snr_db: Tuple[float, float, float] = (0.0, 40.0, 5.0)
    seed: int = 0
    max_trials: int = 10 ** 6
    target_rel_ci: float = 0.02
    tol: float = 1e-9
    out: Optional[str] = None
    fmt: str = "csv"
    overwrite: bool = False
    method: str = "theorem3"
    analytic_m: Optional[float] = None
    sep_levels: Tuple[float, ...] = (0.015,)
    phases_deg: Tuple[float, ...] = field(default_factory=lambda: tuple(range(0, 360, 10)))

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("M", "n", "m", "snr_db", "sep_levels", "phases_deg"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not (self.M and self.n and self.m):
            raise ConfigError("M, n and m lists must be nonempty")
        for M in self.M:
            if not isinstance(M, int) or M < 2 or not _is_power_of_two(M):
                raise ConfigError(f"M must be a power of 2 with M >= 2, got {M!r}")
        for n in self.n:
            if n == math.inf:
                if self.command not in ("analytic", "penalty") or (self.command == "analytic" and self.method != "asymptotic"):
                    raise ConfigError("n = inf is only meaningful for asymptotic curves and penalties")
            elif not isinstance(n, int) or n < 1:
                raise ConfigError(f"n must be an integer >= 1, got {n!r}")
        for m in list(self.m) + ([self.analytic_m] if self.analytic_m is not None else []):
            if not isinstance(m, (int, float)) or not math.isfinite(m) or m < 0.5:
                raise ConfigError(f"Nakagami shape m must be >= 0.5, got {m!r}")
        start, stop, step = self.snr_db
        if not all(math.isfinite(v) for v in self.snr_db):
            raise ConfigError("SNR grid values must be finite")
        if not step > 0:
            raise ConfigError(f"SNR grid step must be > 0, got {step}")
        if stop < start:
            raise ConfigError(f"SNR grid is empty: stop {stop} < start {start}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an integer in [0, 2**64)")
        if not isinstance(self.max_trials, int) or self.max_trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not self.target_rel_ci > 0:
            raise ConfigError("ci target must be positive")
        if not 0 < self.tol < 1e-2:
            raise ConfigError("quadrature tolerance must lie in (0, 1e-2)")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        if self.method not in ("theorem3", "closed", "asymptotic"):
            raise ConfigError(f"unknown analytic method {self.method!r}")
        if any(not 0 < p < 1 for p in self.sep_levels):
            raise ConfigError("SEP levels must lie in (0, 1)")

    def grid(self) -> np.ndarray:
        start, stop, step = self.snr_db
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)

    def combos(self):
        return list(itertools.product(self.M, self.n, self.m))

    def settings(self) -> QuadratureSettings:
        return QuadratureSettings(rel_tol=self.tol, rel_tol_3d=max(self.tol, 1e-7))

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_DIR_ENV) or "results")


def parse_grid(text: str) -> Tuple[float, float, float]:
    """``start:stop:step`` (inclusive stop) or a single value, all in dB."""
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad SNR grid {text!r}; expected start:stop:step in dB") from None
    if len(values) == 1:
        return values[0], values[0], 1.0
    if len(values) == 2:
        return values[0], values[1], 1.0
    if len(values) == 3:
        return tuple(values)
    raise ConfigError(f"bad SNR grid {text!r}; expected start:stop:step in dB")


def _parse_n(text: str):
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--M", type=int, nargs="+", help="modulation orders")
    common.add_argument("--n", type=_parse_n, nargs="+", help="quantizer bits ('inf' for unquantized)")
    common.add_argument("--m", type=float, nargs="+", help="Nakagami shapes")
    common.add_argument("--snr-db", type=parse_grid, help="start:stop:step in dB, stop inclusive")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", dest="max_trials", type=int, help="maximum Monte Carlo trials per point")
    common.add_argument("--ci", dest="target_rel_ci", type=float, help="target stderr / p_hat")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./results)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"))
    common.add_argument("--overwrite", action="store_true", default=None, help="replace files with stable names")
    common.add_argument("--config", help="JSON file with defaults for any of these options")

    parser = argparse.ArgumentParser(prog="lowres-psk", description="M-PSK SEP under n-bit phase quantization and Nakagami-m fading")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="Monte Carlo SEP curves")
    p = sub.add_parser("analytic", parents=[common], help="quadrature SEP curves")
    p.add_argument("--method", choices=("theorem3", "closed", "asymptotic"))
    sub.add_parser("bounds", parents=[common], help="lower bound, exact SEP and upper bound curves")
    sub.add_parser("floor", parents=[common], help="error-floor lower bounds, with Monte Carlo at the top SNR")
    p = sub.add_parser("dvo", parents=[common], help="fitted vs predicted diversity order")
    p.add_argument("--method", choices=("theorem3", "closed"), help="analytic source for in-regime curves")
    p = sub.add_parser("penalty", parents=[common], help="QPSK quantization penalty tables")
    p.add_argument("--sep", dest="sep_levels", type=float, nargs="+", help="target SEP levels for the power penalty")
    p = sub.add_parser("detector-table", parents=[common], help="ML decision map over channel phases")
    p.add_argument("--phase-deg", dest="phases_deg", type=float, nargs="+", help="channel phases in degrees")
    p = sub.add_parser("compare", parents=[common], help="Monte Carlo vs quadrature with z-scores")
    p.add_argument("--analytic-m", type=float, help="Nakagami shape for the analytic side (default: same as --m)")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if "snr_db" in values and isinstance(values["snr_db"], str):
            values["snr_db"] = parse_grid(values["snr_db"])
        if "n" in values:
            values["n"] = [math.inf if str(v).lower() in ("inf", "infinity") else v for v in values["n"]]
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        values[key] = val
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values["command"] = args.command
    if args.command == "dvo" and "snr_db" not in values:
        values["snr_db"] = (30.0, 50.0, 5.0)
    if args.command == "floor" and "snr_db" not in values:
        values["snr_db"] = (40.0, 40.0, 1.0)
    return ExperimentConfig(**values)


# ---------------------------------------------------------------------------
# output helpers


def _stamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def _fmt_m(m: float) -> str:
    return f"{m:g}".replace(".", "p")


def _out_path(cfg: ExperimentConfig, stem: str) -> Path:
    suffix = "." + cfg.fmt
    name = stem if cfg.overwrite else f"{stem}_{_stamp()}"
    return cfg.out_dir() / (name + suffix)


def _metadata(cfg: ExperimentConfig, **extra) -> dict:
    meta = {
        "command": cfg.command,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "rng": RNG_ALGORITHM,
        "backend": backend(),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    meta["config"]["n"] = [str(n) if n == math.inf else n for n in cfg.n]
    meta.update(extra)
    return meta


def _emit(path: Path, out):
    print(path, file=out or sys.stdout)


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(cfg: ExperimentConfig, out=None) -> List[Path]:
    paths = []
    grid = cfg.grid()
    for M, n, m in cfg.combos():
        plans = [SimPlan(SepQuery(M, n, m, float(db_to_linear(s))), cfg.max_trials, cfg.target_rel_ci,
                         min(1 << 18, cfg.max_trials), cfg.seed) for s in grid]
        curve = sweep_sep(plans)
        curve = SepCurve(curve.M, curve.n, curve.m, [float(s) for s in grid], curve.values,
                         curve.uncertainties, curve.method, curve.seed, curve.trials)
        path = write_curve(curve, _out_path(cfg, f"simulate_M{M}_n{n}_m{_fmt_m(m)}"), cfg.fmt,
                           _metadata(cfg), cfg.overwrite)
        _emit(path, out)
        paths.append(path)
    return paths


def _analytic_curve(cfg: ExperimentConfig, M, n, m) -> SepCurve:
    grid = cfg.grid()
    if cfg.method == "closed":
        if (M, n, m) != (4, 2, 1.0):
            raise ConfigError("the closed form covers only M=4, n=2, m=1")
        values = [sep_qpsk_rayleigh_2bit_closed(float(db_to_linear(s))) for s in grid]
        return SepCurve(M, n, m, grid.tolist(), values, [0.0] * len(grid), "closed")
    if cfg.method == "asymptotic":
        if M != 4 or m != 1.0:
            raise ConfigError("asymptotic curves are defined for QPSK with m=1")
        values = [asymptotic_sep_qpsk(float(db_to_linear(s)), n) for s in grid]
        return SepCurve(M, n, m, grid.tolist(), values, [0.0] * len(grid), "asymptotic")
    if n < int(M).bit_length() - 1:
        raise ConfigError(f"analytic SEP needs n >= log2(M) (got M={M}, n={n}); "
                          "below that the SEP floors out, use 'simulate' or 'floor'")
    values, errors = analytic_curve_values(M, n, m, grid, cfg.settings())
    return SepCurve(M, n, m, grid.tolist(), values.tolist(), errors.tolist(), "theorem3")


def cmd_analytic(cfg: ExperimentConfig, out=None) -> List[Path]:
    curves = [_analytic_curve(cfg, M, n, m) for M, n, m in cfg.combos()]
    paths = []
    for c in curves:
        n_tag = "inf" if c.n == math.inf else c.n
        path = write_curve(c, _out_path(cfg, f"analytic_{c.method}_M{c.M}_n{n_tag}_m{_fmt_m(c.m)}"),
                           cfg.fmt, _metadata(cfg), cfg.overwrite)
        _emit(path, out)
        paths.append(path)
    return paths


def cmd_bounds(cfg: ExperimentConfig, out=None) -> List[Path]:
    paths = []
    grid = cfg.grid()
    settings = cfg.settings()
    for M, n, m in cfg.combos():
        exact = _analytic_curve(cfg, M, n, m)
        lower, upper = [], []
        for s in grid:
            lo, hi = sep_bounds(SepQuery(M, n, m, float(db_to_linear(s))), settings)
            lower.append(lo)
            upper.append(hi)
        zeros = [0.0] * len(grid)
        for curve in (SepCurve(M, n, m, grid.tolist(), lower, zeros, "lower"), exact,
                      SepCurve(M, n, m, grid.tolist(), upper, zeros, "upper")):
            path = write_curve(curve, _out_path(cfg, f"bounds_{curve.method}_M{M}_n{n}_m{_fmt_m(m)}"),
                               cfg.fmt, _metadata(cfg), cfg.overwrite)
            _emit(path, out)
            paths.append(path)
    return paths


def cmd_floor(cfg: ExperimentConfig, out=None) -> List[Path]:
    top = float(cfg.grid()[-1])
    rows = []
    for M, n, m in cfg.combos():
        bound = error_floor(M, n)
        est = simulate_sep(SimPlan.fixed(SepQuery(M, n, m, float(db_to_linear(top))), cfg.max_trials, cfg.seed))
        rows.append((M, n, float(m), bound, top, est.p_hat, est.stderr, est.trials))
    header = ("M", "n", "m", "floor_bound", "snr_db", "mc_value", "mc_stderr", "trials")
    path = write_table(header, rows, _out_path(cfg, "floor"), cfg.fmt, _metadata(cfg), cfg.overwrite)
    _emit(path, out)
    return [path]


def cmd_dvo(cfg: ExperimentConfig, out=None) -> List[Path]:
    grid = cfg.grid()
    window = (float(grid[0]), float(grid[-1]))
    rows = []
    for M, n, m in cfg.combos():
        predicted = dvo_theoretical(M, n, m)
        if cfg.method == "closed" or n >= int(M).bit_length() - 1:
            curve = _analytic_curve(cfg, M, n, m)
        else:
            plans = [SimPlan(SepQuery(M, n, m, float(db_to_linear(s))), cfg.max_trials, cfg.target_rel_ci,
                             min(1 << 18, cfg.max_trials), cfg.seed) for s in grid]
            curve = sweep_sep(plans)
        fit = dvo_fit(curve, window)
        rows.append((M, n, float(m), fit.slope, predicted, curve.method, window[0], window[1], fit.points))
    header = ("M", "n", "m", "fitted_slope", "theoretical", "source", "window_lo_db", "window_hi_db", "points")
    path = write_table(header, rows, _out_path(cfg, "dvo"), cfg.fmt, _metadata(cfg), cfg.overwrite)
    _emit(path, out)
    return [path]


def cmd_penalty(cfg: ExperimentConfig, out=None) -> List[Path]:
    rows = []
    for n in cfg.n:
        if n == math.inf or n >= 2:
            for s in cfg.grid():
                rows.append(("psi", str(n), "snr_db", float(s), psi_penalty(float(db_to_linear(s)), n)))
        if n == math.inf or n >= 3:
            for p in cfg.sep_levels:
                rows.append(("phi", str(n), "sep", float(p), phi_penalty_at_sep(p, n)))
    if not rows:
        raise ConfigError("penalties need n >= 2 (psi) or n >= 3 (phi)")
    header = ("penalty", "n", "axis", "x", "value_db")
    path = write_table(header, rows, _out_path(cfg, "penalty"), cfg.fmt, _metadata(cfg), cfg.overwrite)
    _emit(path, out)
    return [path]


def cmd_detector_table(cfg: ExperimentConfig, out=None) -> List[Path]:
    rows = []
    phases = np.deg2rad(np.asarray(cfg.phases_deg, dtype=float))
    for M in cfg.M:
        for n in cfg.n:
            for deg, (lam, cell, decisions) in zip(cfg.phases_deg, decision_table(M, n, phases)):
                for k, dec in enumerate(decisions):
                    rows.append((M, n, float(deg), lam, cell, k, dec))
    header = ("M", "n", "phase_deg", "phase_rad", "channel_cell", "k", "decision")
    path = write_table(header, rows, _out_path(cfg, "detector_table"), cfg.fmt, _metadata(cfg), cfg.overwrite)
    _emit(path, out)
    return [path]


def compare_rows(cfg: ExperimentConfig):
    """Monte Carlo vs quadrature rows ``(M, n, m, snr_db, mc, stderr, analytic, z, flagged)``."""
    rows = []
    settings = cfg.settings()
    for M, n, m in cfg.combos():
        m_an = m if cfg.analytic_m is None else cfg.analytic_m
        if n < int(M).bit_length() - 1:
            raise ConfigError(f"compare needs n >= log2(M) (got M={M}, n={n})")
        an_values, an_errors = analytic_curve_values(M, n, m_an, cfg.grid(), settings)
        for s, p_an, e_an in zip(cfg.grid(), an_values, an_errors):
            est = simulate_sep(SimPlan(SepQuery(M, n, m, float(db_to_linear(s))), cfg.max_trials,
                                       cfg.target_rel_ci, min(1 << 18, cfg.max_trials), cfg.seed))
            # with no observed errors, fall back to the binomial spread implied by the analytic value
            sd = est.stderr if est.errors > 0 else math.sqrt(p_an * (1 - p_an) / est.trials)
            scale = math.hypot(sd, e_an)
            z = (est.p_hat - p_an) / scale if scale > 0 else 0.0
            rows.append((M, n, float(m), float(s), est.p_hat, est.stderr, float(p_an), float(z), bool(abs(z) > Z_FLAG)))
    return rows


def cmd_compare(cfg: ExperimentConfig, out=None) -> List[Path]:
    rows = compare_rows(cfg)
    header = ("M", "n", "m", "snr_db", "mc_value", "mc_stderr", "analytic_value", "z", "flagged")
    path = write_table(header, rows, _out_path(cfg, "compare"), cfg.fmt, _metadata(cfg), cfg.overwrite)
    flagged = sum(1 for r in rows if r[-1])
    print(f"{len(rows)} points compared, {flagged} with |z| > {Z_FLAG:g}", file=out or sys.stdout)
    _emit(path, out)
    return [path]


DISPATCH = {
    "simulate": cmd_simulate,
    "analytic": cmd_analytic,
    "bounds": cmd_bounds,
    "floor": cmd_floor,
    "dvo": cmd_dvo,
    "penalty": cmd_penalty,
    "detector-table": cmd_detector_table,
    "compare": cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        DISPATCH[cfg.command](cfg)
    except (LowResError, FileExistsError) as exc:
        print(f"lowres-psk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end: steady state, spectra sweeps, figure presets, F = 2/3 surface.

Exit codes: 0 success, 2 invalid parameters, 3 below threshold, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize

from .criteria import fidelity_from_spectra, report
from .errors import BelowThreshold, NoConvergence, OPOError, ParameterOutOfRange, SingularSystem
from .fluctuations import build_system, covariance_spectrum
from .model import classical_residual, min_threshold_point, steady_state
from .spectra import P_PLUS, X_MINUS, joint_spectrum, min_sx_minus, sp_plus_closed, sx_minus_closed

log = logging.getLogger("lockedopo")

SPECTRA_HEADER = [
    "omega", "sx_minus", "sx_plus", "sp_minus", "sp_plus", "cx", "cp",
    "vx", "vp", "epr_product", "duan", "fidelity", "theta_opt", "duan_opt",
]
ISOSURFACE_HEADER = ["rho", "sigma", "omega_crossing", "direction"]
CROSSCHECK_TOL = 1e-5
CHUNK = 2048


class ConfigError(OPOError, ValueError):
    pass


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(value)
    return format(float(value), ".12g")


@dataclass(frozen=True)
class RunConfig:
    kappa: float = 0.05
    mu: float = 0.0
    rho: float = 0.0
    sigma: float = 1.0
    branch: int = 1
    omega_min: float = 1e-3
    omega_max: float = 5.0
    points: int = 500
    output: str = "-"
    format: str = "csv"
    grid: str = "log"

    def validate(self) -> RunConfig:
        if self.omega_min < 1e-6:
            raise ConfigError(f"omega_min must be >= 1e-6, got {self.omega_min}")
        if not self.omega_min < self.omega_max:
            raise ConfigError("omega_min must be smaller than omega_max")
        if not 2 <= self.points <= 10**7:
            raise ConfigError(f"points must lie in [2, 1e7], got {self.points}")
        if self.format != "csv":
            raise ConfigError(f"unsupported format {self.format!r}")
        if self.branch not in (1, -1):
            raise ConfigError(f"branch must be 1 or -1, got {self.branch}")
        if self.grid not in ("log", "linear"):
            raise ConfigError(f"unknown grid {self.grid!r}")
        return self

    def omegas(self) -> np.ndarray:
        if self.grid == "linear":
            return np.linspace(self.omega_min, self.omega_max, self.points)
        return np.geomspace(self.omega_min, self.omega_max, self.points)


CONFIG_KEYS = ("kappa", "mu", "rho", "sigma", "branch", "omega_min", "omega_max", "points", "output", "format")
_FIELD_TYPES = {"kappa": float, "mu": float, "rho": float, "sigma": float, "branch": int,
                "omega_min": float, "omega_max": float, "points": int, "output": str, "format": str}


def _coerce(key, raw, where):
    try:
        if _FIELD_TYPES[key] is int:
            return int(float(raw)) if float(raw).is_integer() else int(raw)
        return _FIELD_TYPES[key](raw)
    except ValueError:
        raise ConfigError(f"{where}: invalid value {raw!r} for {key}") from None


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Read ``key = value`` lines (``#`` comments) and apply flag overrides."""
    values = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = (part.strip() for part in line.partition("="))
            where = f"{path}:{lineno}"
            if not sep:
                raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{where}: unknown key {key!r}")
            values[key] = _coerce(key, raw, where)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _coerce(key, str(value), f"--{key}")
    return RunConfig(**values).validate()


def _rows_for(system, state, point, omegas):
    covs = covariance_spectrum(system, omegas, state.phi1, state.phi2)
    rows, mismatches = [], 0
    for cov in covs:
        r = report(cov)
        if point.is_min_threshold:
            for numeric, closed in ((r.sx_minus, sx_minus_closed(point, r.omega)),
                                    (r.sp_plus, sp_plus_closed(point, r.omega))):
                if abs(numeric - closed) > CROSSCHECK_TOL * max(1.0, abs(closed)):
                    mismatches += 1
        rows.append([r.omega, r.sx_minus, r.sx_plus, r.sp_minus, r.sp_plus, r.cx, r.cp,
                     r.vx, r.vp, r.epr_product, r.duan, r.fidelity, r.theta_opt, r.duan_opt])
    return rows, mismatches


def spectra_rows(config: RunConfig, workers: int = 1) -> tuple[list[list[float]], int]:
    """All report rows for ``config`` in ascending frequency order, plus cross-check mismatch count."""
    point = min_threshold_point(config.kappa, config.mu, config.rho, config.sigma, config.branch)
    state = steady_state(point)
    system = build_system(point, state)
    omegas = config.omegas()
    chunks = [omegas[i : i + CHUNK] for i in range(0, len(omegas), CHUNK)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        # map preserves submission order
        results = list(pool.map(lambda om: _rows_for(system, state, point, om), chunks))
    rows = [row for chunk_rows, _ in results for row in chunk_rows]
    return rows, sum(n for _, n in results)


def _open_output(path):
    if path == "-":
        return _Stdout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()


def write_csv(path, header, rows):
    with _open_output(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def run_spectra(config: RunConfig, workers: int = 1) -> int:
    rows, mismatches = spectra_rows(config, workers)
    if mismatches:
        log.warning("%d numerical/closed-form mismatches above %g", mismatches, CROSSCHECK_TOL)
    write_csv(config.output, SPECTRA_HEADER, rows)
    return mismatches


FIGURE_GRID = dict(omega_min=1e-3, omega_max=3.0, points=600, grid="linear", kappa=0.05, mu=0.0)

FIGURES = {
    "fig2": ("rho", [0.0, 0.01, 0.05], dict(sigma=1.0)),
    "fig3": ("sigma", [1.0, 1.1, 2.0], dict(rho=0.01)),
    "fig5": ("rho", [0.0, 0.01, 0.05], dict(sigma=1.0)),
    "fig6": ("rho", [0.0, 0.01, 0.1], dict(sigma=1.0)),
    "fig7": ("rho", [0.0, 0.01, 0.05], dict(sigma=1.0)),
    "fig9": ("rho", [0.0, 0.01, 0.05], dict(sigma=1.0)),
}
FIGURE_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig9")


def run_figure(name: str, outdir: str | Path = ".") -> list[Path]:
    """Write one CSV per curve of the named figure preset; returns the paths."""
    outdir = Path(outdir)
    if name == "fig4":
        path = outdir / "fig4.csv"
        rows = []
        for rho in np.linspace(0.0, 0.1, 200):
            point = min_threshold_point(0.05, 0.0, rho, 1.0)
            om, value = min_sx_minus(point)
            rows.append([rho, om, value])
        write_csv(path, ["rho", "omega_min", "sx_minus_min"], rows)
        return [path]
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; choose from {', '.join(FIGURE_NAMES)}")
    param, values, fixed = FIGURES[name]
    paths = []
    for value in values:
        path = outdir / f"{name}_{param}{fmt(value)}.csv"
        config = RunConfig(**FIGURE_GRID, **fixed, **{param: value}, output=str(path)).validate()
        run_spectra(config)
        paths.append(path)
    return paths


@dataclass(frozen=True)
class IsoSurfaceGrid:
    rho_axis: tuple[float, float, int] = (0.0, 0.1, 20)
    sigma_axis: tuple[float, float, int] = (1.0, 2.0, 20)
    omega_axis: tuple[float, float, int] = (1e-3, 3.0, 40)
    target_fidelity: float = 2.0 / 3.0
    kappa: float = 0.1
    mu: float = 0.0

    def validate(self) -> IsoSurfaceGrid:
        for name in ("rho_axis", "sigma_axis", "omega_axis"):
            lo, hi, count = getattr(self, name)
            if int(count) != count or count < 2:
                raise ConfigError(f"{name} needs an integer count >= 2")
            if not lo < hi:
                raise ConfigError(f"{name} needs min < max")
        if self.sigma_axis[0] < 1:
            raise ConfigError("sigma_axis must start at or above threshold (1)")
        if self.rho_axis[0] < 0 or self.omega_axis[0] < 0:
            raise ConfigError("rho and omega axes must be non-negative")
        if not 0 < self.target_fidelity < 1:
            raise ConfigError("target fidelity must lie in (0, 1)")
        return self


def _axis(bounds):
    lo, hi, count = bounds
    return np.linspace(lo, hi, int(count))


def isosurface_rows(grid: IsoSurfaceGrid) -> list[list]:
    grid.validate()
    omegas = _axis(grid.omega_axis)
    target = grid.target_fidelity
    rows = []
    for rho in _axis(grid.rho_axis):
        for sigma in _axis(grid.sigma_axis):
            point = min_threshold_point(grid.kappa, grid.mu, rho, sigma)
            state = steady_state(point)
            system = build_system(point, state)

            def excess(om):
                cov = covariance_spectrum(system, [om], state.phi1, state.phi2)[0]
                f = fidelity_from_spectra(joint_spectrum(cov, X_MINUS), joint_spectrum(cov, P_PLUS))
                return float(f) - target

            covs = covariance_spectrum(system, omegas, state.phi1, state.phi2)
            values = np.array([
                fidelity_from_spectra(joint_spectrum(c, X_MINUS), joint_spectrum(c, P_PLUS)) for c in covs
            ]) - target
            for i in range(len(omegas) - 1):
                lo, hi = values[i], values[i + 1]
                if lo == 0.0:
                    crossing = omegas[i]
                elif lo * hi < 0:
                    crossing = optimize.brentq(excess, omegas[i], omegas[i + 1], xtol=1e-9)
                else:
                    continue
                if hi == lo:
                    continue
                rows.append([rho, sigma, crossing, "rising" if hi > lo else "falling"])
    return rows


def run_isosurface(grid: IsoSurfaceGrid, output: str = "-") -> int:
    rows = isosurface_rows(grid)
    write_csv(output, ISOSURFACE_HEADER, rows)
    return len(rows)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lockedopo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def point_flags(p):
        p.add_argument("--config", help="key = value configuration file")
        for key in CONFIG_KEYS:
            flag = "--" + key
            alias = "--" + key.replace("_", "-")
            names = [flag] if alias == flag else [flag, alias]
            p.add_argument(*names, dest=key, default=None, help=f"override '{key}'")

    steady = sub.add_parser("steady", help="print the classical steady state")
    point_flags(steady)
    steady.add_argument("--coupling", type=float, default=1.0, help="normalized nonlinear coupling g")

    spectra = sub.add_parser("spectra", help="sweep the analysis frequency and write a CSV")
    point_flags(spectra)
    spectra.add_argument("--workers", type=int, default=1)

    figure = sub.add_parser("figure", help="reproduce a figure preset as CSV")
    figure.add_argument("name")
    figure.add_argument("--outdir", default=".")

    iso = sub.add_parser("isosurface", help="locate the fidelity = target surface")
    defaults = IsoSurfaceGrid()
    for axis in ("rho", "sigma", "omega"):
        iso.add_argument(f"--{axis}-axis", nargs=3, type=float, metavar=("MIN", "MAX", "COUNT"),
                         default=getattr(defaults, f"{axis}_axis"))
    iso.add_argument("--target", type=float, default=defaults.target_fidelity)
    iso.add_argument("--kappa", type=float, default=defaults.kappa)
    iso.add_argument("--mu", type=float, default=defaults.mu)
    iso.add_argument("--output", default="-")
    return parser


def _config_from(args) -> RunConfig:
    overrides = {key: getattr(args, key) for key in CONFIG_KEYS}
    return parse_config(args.config, overrides)


def _steady(args) -> None:
    config = _config_from(args)
    point = min_threshold_point(config.kappa, config.mu, config.rho, config.sigma, config.branch)
    state = steady_state(point, args.coupling)
    values = {
        "kappa": point.kappa, "mu": point.mu, "mu_prime": point.mu_prime, "rho": point.rho,
        "sigma": point.sigma, "branch": point.branch, "delta1": point.delta1, "delta2": point.delta2,
        "beta": point.beta, "g": state.g, "r": state.r, "phi1": state.phi1, "phi2": state.phi2,
        "a0_real": state.a0.real, "a0_imag": state.a0.imag,
        "residual": classical_residual(point, state),
    }
    for key, value in values.items():
        sys.stdout.write(f"{key} = {fmt(value)}\n")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "steady":
            _steady(args)
        elif args.command == "spectra":
            run_spectra(_config_from(args), workers=args.workers)
        elif args.command == "figure":
            for path in run_figure(args.name, args.outdir):
                print(path)
        elif args.command == "isosurface":
            axes = {axis: (lo, hi, int(count)) if float(count).is_integer() else (lo, hi, count)
                    for axis, (lo, hi, count) in
                    (("rho", args.rho_axis), ("sigma", args.sigma_axis), ("omega", args.omega_axis))}
            grid = IsoSurfaceGrid(
                rho_axis=axes["rho"], sigma_axis=axes["sigma"], omega_axis=axes["omega"],
                target_fidelity=args.target, kappa=args.kappa, mu=args.mu,
            )
            run_isosurface(grid, args.output)
    except (ConfigError, ParameterOutOfRange) as exc:
        print(f"lockedopo: error: {exc}", file=sys.stderr)
        return 2
    except BelowThreshold as exc:
        print(f"lockedopo: below threshold: {exc}", file=sys.stderr)
        return 3
    except (SingularSystem, NoConvergence) as exc:
        print(f"lockedopo: numerical failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"lockedopo: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

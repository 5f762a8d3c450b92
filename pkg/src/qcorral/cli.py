"""Command-line front end.

    qcorral run CONFIG          run the configured solver(s), write snapshots
    qcorral scenario fig2       run a preset corral
    qcorral params --velocity 5e-3c
    qcorral compare CONFIG      finite differences against the modal solution
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, fdtd, spectral
from .config import (
    ConfigError,
    SimulationConfig,
    default_output_dir,
    format_config,
    load_config,
    parse_quantity,
)
from .fdtd import DivergenceError, plan_steps, stable_dt
from .physics import (
    ATTOSECOND,
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    NANOMETRE,
    HeatCarrier,
    derive_parameters,
    distortionless_potential,
    published_comparison,
)
from .scenarios import SCENARIO_RADII_NM, scenario_config

MANIFEST = "manifest.conf"
REPORT = "compare_report.txt"


def write_snapshot(path: Path, field) -> None:
    rr, tt = field.grid.mesh()
    table = np.column_stack([rr.ravel(), tt.ravel(), field.values.ravel()])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        np.savetxt(fh, table, fmt="%.17g", delimiter=",", header="r,theta,value", comments="")


def read_snapshot(path) -> np.ndarray:
    """Rows of (r, theta, value) from a snapshot file."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def _derived(cfg: SimulationConfig) -> dict:
    params = cfg.parameters()
    n_steps, dt = plan_steps(cfg.total_time, stable_dt(cfg.grid, cfg.carrier.velocity, cfg.safety))
    return {
        "code_version": __version__,
        "quantity": fdtd.quantity_of(cfg.equation),
        "relaxation_time": f"{params.relaxation_time!r} s",
        "diffusivity": f"{params.diffusivity!r} m^2/s",
        "potential": f"{params.potential!r} J",
        "distortionless_potential": f"{distortionless_potential(cfg.carrier)!r} J",
        "q": f"{params.q!r} 1/m^2",
        "mean_free_path": f"{params.mean_free_path!r} m",
        "crossing_time": f"{cfg.crossing_time()!r} s",
        "dt": f"{dt!r} s",
        "steps": str(n_steps),
        "cfl": repr(dt / stable_dt(cfg.grid, cfg.carrier.velocity, 1.0)),
    }


def _write_outputs(cfg: SimulationConfig, results: dict, extra: dict | None = None) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    comments = _derived(cfg)
    for solver, snaps in results.items():
        for i, (t, fld) in enumerate(snaps):
            name = f"{solver}_{i:03d}.csv"
            write_snapshot(out / name, fld)
            comments[f"snapshot {name}"] = f"{t!r} s"
    if extra:
        comments.update(extra)
    (out / MANIFEST).write_text(format_config(cfg, comments), encoding="utf-8")
    return out


def execute(cfg: SimulationConfig) -> dict:
    """Run the solver(s) named in ``cfg``; returns {solver: snapshots}."""
    results = {}
    if cfg.solver in ("fdtd", "both"):
        results["fdtd"] = fdtd.run(cfg)
    if cfg.solver in ("spectral", "both"):
        times = [t for t, _ in results["fdtd"]] if "fdtd" in results else None
        results["spectral"] = spectral.run(cfg, times=times)
    return results


def error_norms(a, b) -> tuple[float, float]:
    """(max-norm, area-weighted L2) of the difference of two fields."""
    diff = a.values - b.values
    return float(np.max(np.abs(diff))), float(math.sqrt(np.sum(diff**2 * a.grid.cell_area)))


def compare(cfg: SimulationConfig) -> dict:
    """Finite-difference error against the modal solution on three grids.

    The configured grid is the finest; the two coarser grids halve and
    quarter both cell counts.
    """
    grids = []
    for k in (4, 2, 1):
        if cfg.grid.n_r % k or cfg.grid.n_theta % (2 * k):
            raise ConfigError("grid: n_r must divide by 4 and n_theta by 8 for compare")
        grids.append(dataclasses.replace(cfg.grid, n_r=cfg.grid.n_r // k,
                                         n_theta=cfg.grid.n_theta // k))
    levels = []
    for grid in grids:
        level_cfg = dataclasses.replace(cfg, grid=grid)
        fd = fdtd.run(level_cfg)
        ref = spectral.run(level_cfg, times=[t for t, _ in fd], grid=grid)
        errs = [(t, *error_norms(f, r)) for (t, f), (_, r) in zip(fd, ref)]
        levels.append((grid, errs))
    report = {}
    for grid, errs in levels:
        tag = f"{grid.n_r}x{grid.n_theta}"
        for i, (t, linf, l2) in enumerate(errs):
            report[f"{tag}.t{i:03d}"] = f"t = {t!r} s, linf = {linf!r}, l2 = {l2!r}"
    finals = [errs[-1] for _, errs in levels]
    for name, col in (("linf", 1), ("l2", 2)):
        for (g0, _), (g1, _), e0, e1 in zip(levels, levels[1:], finals, finals[1:]):
            ratio = e0[col] / e1[col] if e1[col] else math.inf
            order = math.log2(ratio) if ratio > 0 else float("nan")
            report[f"order.{name}.{g0.n_r}->{g1.n_r}"] = f"{order!r} (ratio {ratio!r})"
    report["final_time"] = repr(finals[-1][0])
    report["final_linf"] = repr(finals[-1][1])
    report["final_l2"] = repr(finals[-1][2])
    return report


def _speed(text: str) -> float:
    return parse_quantity(text, "speed")


def _params(args) -> int:
    mass = ELECTRON_MASS if args.electron or args.mass is None else parse_quantity(args.mass, "mass")
    carrier = HeatCarrier(mass, _speed(args.velocity))
    if args.potential in (None, "distortionless"):
        potential = distortionless_potential(carrier)
    elif args.potential == "zero":
        potential = 0.0
    else:
        potential = parse_quantity(args.potential, "energy")
    p = derive_parameters(carrier, potential)
    pub = published_comparison(carrier)
    v_star = distortionless_potential(carrier)
    lines = [
        f"mass                     = {carrier.mass:.6g} kg ({carrier.mass / ELECTRON_MASS:.6g} m_e)",
        f"velocity                 = {carrier.velocity:.6g} m/s ({carrier.beta:.6g} c)",
        f"relaxation time tau      = {p.relaxation_time / ATTOSECOND:.4g} as"
        f"  [published value 160 as; computed/published = {pub['tau_ratio']:.3f}"
        f"{', DISCREPANCY' if pub['tau_discrepancy'] else ''}]",
        f"diffusivity D = hbar/m   = {p.diffusivity:.6g} m^2/s",
        f"mean free path v tau     = {p.mean_free_path / NANOMETRE:.4g} nm"
        f"  [published value ~0.1 nm; within factor 2: {'yes' if pub['mfp_within_factor_2'] else 'no'}]",
        f"distortionless V* = mv^2/8 = {v_star / ELEMENTARY_CHARGE:.6g} eV"
        f"  (V* tau = hbar/8)",
        f"potential V              = {potential / ELEMENTARY_CHARGE:.6g} eV",
        f"q                        = {p.q:.6g} 1/m^2",
    ]
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcorral", description=__doc__.splitlines()[0] if __doc__ else None)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configuration file")
    p.add_argument("config")
    p.add_argument("--output-dir")

    p = sub.add_parser("scenario", help="run a preset corral scenario")
    p.add_argument("name", choices=sorted(SCENARIO_RADII_NM))
    p.add_argument("--output-dir")
    p.add_argument("--solver", choices=("fdtd", "spectral", "both"))
    p.add_argument("--n-r", type=int)
    p.add_argument("--n-theta", type=int)

    p = sub.add_parser("params", help="print derived transport parameters")
    p.add_argument("--electron", action="store_true", help="electron mass (default)")
    p.add_argument("--mass", help="carrier mass, e.g. '1 me' or '9.1e-31 kg'")
    p.add_argument("--velocity", default="5e-3c", help="carrier speed, e.g. '5e-3c'")
    p.add_argument("--potential", help="zero, distortionless (default) or an energy")

    p = sub.add_parser("compare", help="compare finite differences with the modal solution")
    p.add_argument("config")
    p.add_argument("--output-dir")
    return ap


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "params":
            return _params(args)
        if args.command == "scenario":
            overrides = {}
            if args.solver:
                overrides["solver"] = args.solver
            if args.n_r:
                overrides["n_r"] = args.n_r
            if args.n_theta:
                overrides["n_theta"] = args.n_theta
            out = args.output_dir or str(default_output_dir() / args.name)
            cfg = scenario_config(args.name, output_dir=out, **overrides)
        else:
            cfg = load_config(args.config)
            if args.output_dir:
                cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
        if args.command == "compare":
            report = compare(cfg)
            out = Path(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            text = "".join(f"{k} = {v}\n" for k, v in report.items())
            (out / REPORT).write_text(text, encoding="utf-8")
            print(text, end="")
            return 0
        out = _write_outputs(cfg, execute(cfg))
        print(f"wrote {out / MANIFEST}")
        return 0
    except DivergenceError as exc:
        print(f"qcorral: solver diverged: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"qcorral: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())

"""Experiment runner: subcommands for bands, rates, dynamics, the exact-lattice
check, figure reproduction and parameter sweeps, emitting CSV/JSON/SVG.

All physical inputs are dimensionless ratios (delta, g/xi, Delta/xi, xi*t);
internally xi = 1.  Outputs use fixed 12-significant-digit formatting so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .band import SSHParams, dispersion, phase
from .coupling import Geometry, enumerate_all, parse_config
from .dynamics import evolve, initial_density, transition_rates, validity_check
from .entanglement import onset_time
from .oracle import compare, default_horizon, evolve_exact, initial_state
from .selfenergy import rates_and_shifts
from .svg import line_chart

__all__ = ["ExperimentSpec", "run_rates_table", "run_figure", "run_sweep", "main"]

_DEFAULTS = {
    "delta": 0.3,
    "coupling": "AABB",
    "d": 1,
    "g_over_xi": 0.05,
    "detuning_over_xi": 1.0,
    "init": "eg",
    "tmax": 150.0,
    "dt": 1e-3,
    "L": 400,
}


def _fmt(x) -> str:
    return f"{x:.12g}"


def _write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    return path


def _write_json(path: Path, obj: dict) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    flat = {}
    for section in ("waveguide", "atoms", "run"):
        flat.update(raw.get(section, {}))
    return flat


def _resolve(args, cfg: dict, key: str, cast=None):
    """CLI flag beats config file beats builtin default."""
    val = getattr(args, key.replace("_over_xi", ""), None)
    if val is None:
        val = cfg.get(key, _DEFAULTS.get(key))
    return cast(val) if cast is not None and val is not None else val


def _parse_list(text, cast):
    return [cast(tok) for tok in str(text).split(",") if tok != ""]


def master_trajectory(label: str, d: int, delta: float, g: float, detuning: float,
                      init: str, tmax: float, dt: float = 1e-3, stride: int = 100):
    """One master-equation run; the single path every emitter goes through."""
    params = SSHParams(xi=1.0, delta=delta)
    config = parse_config(label, Geometry(d=d), g=g)
    se = rates_and_shifts(config, detuning, params)
    return evolve(initial_density(init), se, detuning, tmax, dt=dt, stride=stride)


def _trajectory_rows(traj):
    for t, rho, c in zip(traj.times, traj.rhos, traj.concurrence):
        yield (
            t, rho[0, 0].real, rho[1, 1].real, rho[2, 2].real,
            rho[1, 2].real, rho[1, 2].imag, rho[3, 3].real, c,
        )


_TRAJ_HEADER = ["xi_t", "rho_ee", "rho_egeg", "rho_gege",
                "re_rho_egge", "im_rho_egge", "rho_gg", "concurrence"]


@dataclass
class ExperimentSpec:
    """Validated description of a sweep: every value is checked before any
    trajectory is computed."""

    couplings: list[str]
    d_values: list[int]
    deltas: list[float]
    inits: list[str]
    g: float = 0.05
    detuning: float = 1.0
    tmax: float = 150.0
    dt: float = 1e-3
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.deltas:
            raise ValueError("sweep needs at least one dimerization value")
        if not self.couplings or not self.d_values or not self.inits:
            raise ValueError("sweep needs couplings, distances and initial states")
        for delta in self.deltas:
            SSHParams(xi=1.0, delta=delta)
        for label in self.couplings:
            for d in self.d_values:
                parse_config(label, Geometry(d=d), g=self.g)
        for init in self.inits:
            initial_density(init)
        if not 0.0 < self.dt <= 1e-2:
            raise ValueError(f"dt must lie in (0, 1e-2], got {self.dt}")
        for delta in self.deltas:
            ok, why = validity_check(self.detuning, SSHParams(xi=1.0, delta=delta), self.g)
            if not ok:
                self.warnings.append(f"delta={delta}: {why}")

    def points(self):
        for label in self.couplings:
            for d in self.d_values:
                for delta in self.deltas:
                    for init in self.inits:
                        yield (label, d, delta, init)


def run_rates_table(d: int, deltas, Delta: float, g: float = 0.05):
    """Scaled transition rates for all sixteen configurations at spacing d."""
    header = ["coupling", "delta", "Gep", "Gem", "Gpg", "Gmg"]
    rows = []
    for label in enumerate_all():
        for delta in deltas:
            params = SSHParams(xi=1.0, delta=delta)
            se = rates_and_shifts(parse_config(label, Geometry(d=d), g=g), Delta, params)
            rs = transition_rates(se)
            scale = 1.0 / (g * g)
            rows.append((label, delta, rs.Gep * scale, rs.Gem * scale,
                         rs.Gpg * scale, rs.Gmg * scale))
    return header, rows


def run_sweep(spec: ExperimentSpec, threads: int = 1):
    """Feature rows (max C, its time, onset, final C) for every sweep point.

    Invalid points are skipped with a logged reason; if every point fails the
    caller should treat the sweep as failed.
    """
    points = list(spec.points())

    def work(point):
        label, d, delta, init = point
        try:
            traj = master_trajectory(label, d, delta, spec.g, spec.detuning,
                                     init, spec.tmax, dt=spec.dt)
        except Exception as exc:  # invalid points must not kill the sweep
            return point, None, f"{type(exc).__name__}: {exc}"
        trace = traj.concurrence_trace()
        imax = int(np.argmax(trace.values))
        onset = onset_time(trace)
        return point, (
            float(trace.values[imax]), float(trace.times[imax]),
            "" if onset is None else onset, float(trace.values[-1]),
        ), None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, points))
    else:
        results = [work(pt) for pt in points]

    header = ["coupling", "d", "delta", "init", "max_C", "t_max_C", "onset_time", "C_end"]
    rows, failures = [], []
    for point, features, err in results:
        if err is not None:
            failures.append((point, err))
            continue
        label, d, delta, init = point
        rows.append((label, d, delta, init) + features)
    return header, rows, failures


_FIGURE_INITS = {"fig4": ("eg", "ge"), "fig5": ("ee",)}
_FIGURE_TMAX = {"fig4": 150.0, "fig5": 600.0}


def run_figure(name: str, out_dir, tmax: float | None = None, dt: float = 1e-3,
               g: float = 0.05, detuning: float = 1.0, threads: int = 1) -> list[Path]:
    """Concurrence panels for all sixteen configurations.

    One CSV and one SVG per configuration; curves cover d in {1, 2} and
    delta = +/-0.3 for the panel's initial states.  Partial outputs are
    removed if any panel fails.
    """
    if name not in _FIGURE_INITS:
        raise ValueError(f"unknown figure job {name!r}; choose fig4 or fig5")
    inits = _FIGURE_INITS[name]
    if tmax is None:
        tmax = _FIGURE_TMAX[name]
    out = Path(out_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def panel(label: str) -> list[Path]:
        curves = []
        for init in inits:
            for d in (1, 2):
                for delta in (0.3, -0.3):
                    traj = master_trajectory(label, d, delta, g, detuning, init, tmax, dt=dt)
                    curves.append((f"{init} d={d} delta={delta:+g}",
                                   traj.times, traj.concurrence))
        header = ["xi_t"] + [c[0].replace(" ", "_").replace("=", "") for c in curves]
        rows = zip(curves[0][1], *(c[2] for c in curves))
        csv_path = _write_csv(out / f"{label}.csv", header, rows)
        svg_path = out / f"{label}.svg"
        step = max(1, len(curves[0][1]) // 1200)
        line_chart(
            [(lab, xs[::step], ys[::step]) for lab, xs, ys in curves],
            title=f"{label} coupling", xlabel="xi t", ylabel="concurrence",
            path=str(svg_path),
        )
        return [csv_path, svg_path]

    try:
        labels = enumerate_all()
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for paths in pool.map(panel, labels):
                    written.extend(paths)
        else:
            for label in labels:
                written.extend(panel(label))
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def _add_common(sub):
    sub.add_argument("--coupling", help="four-letter configuration, e.g. AABB")
    sub.add_argument("--d", type=int, help="coupling-point spacing (unit cells)")
    sub.add_argument("--delta", type=float, help="dimerization parameter")
    sub.add_argument("--g", type=float, help="coupling strength g/xi")
    sub.add_argument("--detuning", type=float, help="atomic detuning Delta/xi")


def _add_global(parser):
    # SUPPRESS keeps a flag given before the subcommand from being clobbered
    # by the subparser's default, so both positions work
    parser.add_argument("--config", default=argparse.SUPPRESS,
                        help="TOML file with [waveguide]/[atoms]/[run] defaults")
    parser.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory (default: current)")
    parser.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads for sweeps/figures")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="reserved; the dynamics is deterministic")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sshqed",
        description="Entanglement dynamics of two giant atoms on an SSH-type waveguide",
    )
    _add_global(ap)
    sp = ap.add_subparsers(dest="command", required=True)

    band = sp.add_parser("band", help="dispersion and phase over the Brillouin zone")
    band.add_argument("--delta", type=float)
    band.add_argument("--num-k", type=int, default=512)

    se = sp.add_parser("selfenergy", help="Lamb shifts and decay rates at a detuning")
    _add_common(se)
    se.add_argument("--eps", type=float, default=None, help="imaginary offset (default 1e-8)")

    rates = sp.add_parser("rates", help="scaled transition-rate table for all 16 configurations")
    rates.add_argument("--d", type=str, help="comma list of spacings, e.g. 1,2")
    rates.add_argument("--deltas", type=str, help="comma list, e.g. 0.3,-0.3")
    rates.add_argument("--detuning", type=float)

    dyn = sp.add_parser("dynamics", help="master-equation trajectory CSV")
    _add_common(dyn)
    dyn.add_argument("--init", choices=("eg", "ge", "ee"))
    dyn.add_argument("--tmax", type=float)
    dyn.add_argument("--dt", type=float)

    orc = sp.add_parser("oracle", help="exact-lattice trajectory and master-equation comparison")
    _add_common(orc)
    orc.add_argument("--init", choices=("eg", "ge"))
    orc.add_argument("--L", type=int)
    orc.add_argument("--tmax", type=float)
    orc.add_argument("--dt", type=float, help="exact-propagator step (default 5e-4)")

    fig = sp.add_parser("figure", help="reproduce a 16-panel concurrence figure")
    fig.add_argument("--name", choices=("fig4", "fig5"), required=True)
    fig.add_argument("--tmax", type=float)
    fig.add_argument("--dt", type=float)

    sw = sp.add_parser("sweep", help="feature table over configurations and parameters")
    sw.add_argument("--couplings", default="all", help="'all' or comma list of labels")
    sw.add_argument("--d", type=str, help="comma list of spacings")
    sw.add_argument("--deltas", type=str, help="comma list of dimerizations")
    sw.add_argument("--inits", default="eg", help="comma list from eg,ge,ee")
    sw.add_argument("--g", type=float)
    sw.add_argument("--detuning", type=float)
    sw.add_argument("--tmax", type=float)
    sw.add_argument("--dt", type=float)
    for sub in sp.choices.values():
        _add_global(sub)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    args.threads = getattr(args, "threads", 1)
    cfg = _load_config(getattr(args, "config", None))
    out = Path(getattr(args, "out", "."))
    out.mkdir(parents=True, exist_ok=True)

    if args.command == "band":
        delta = _resolve(args, cfg, "delta", float)
        params = SSHParams(xi=1.0, delta=delta)
        k = np.linspace(-np.pi, np.pi, args.num_k, endpoint=False)
        w = dispersion(k, params)
        ph = phase(k, params)
        path = _write_csv(out / "band.csv", ["k", "omega_upper", "omega_lower", "phi"],
                          zip(k, w, -w, ph))
        print(path)
        return 0

    if args.command == "selfenergy":
        delta = _resolve(args, cfg, "delta", float)
        g = _resolve(args, cfg, "g_over_xi", float)
        detuning = _resolve(args, cfg, "detuning_over_xi", float)
        label = _resolve(args, cfg, "coupling", str)
        d = _resolve(args, cfg, "d", int)
        params = SSHParams(xi=1.0, delta=delta)
        config = parse_config(label, Geometry(d=d), g=g)
        se = rates_and_shifts(config, detuning, params, eps=args.eps)
        scaled = se.scaled(1.0, g)
        report = {
            "coupling": label, "d": d, "delta": delta, "g": g, "detuning": detuning,
            "J11": se.J11, "J22": se.J22, "J12": se.J12,
            "G11": se.G11, "G22": se.G22, "G12": se.G12,
            "scaled": {
                "J11": scaled.J11, "J22": scaled.J22, "J12": scaled.J12,
                "G11": scaled.G11, "G22": scaled.G22, "G12": scaled.G12,
            },
        }
        print(json.dumps(report, indent=2, sort_keys=True))
        _write_json(out / f"selfenergy_{label}_d{d}.json", report)
        return 0

    if args.command == "rates":
        deltas = _parse_list(args.deltas if args.deltas else cfg.get("delta", "0.3,-0.3"), float)
        detuning = _resolve(args, cfg, "detuning_over_xi", float)
        d_list = _parse_list(args.d, int) if args.d else [_resolve(args, cfg, "d", int)]
        for d in d_list:
            header, rows = run_rates_table(d, deltas, detuning)
            print(_write_csv(out / f"rates_d{d}.csv", header, rows))
        return 0

    if args.command == "dynamics":
        label = _resolve(args, cfg, "coupling", str)
        d = _resolve(args, cfg, "d", int)
        delta = _resolve(args, cfg, "delta", float)
        g = _resolve(args, cfg, "g_over_xi", float)
        detuning = _resolve(args, cfg, "detuning_over_xi", float)
        init = _resolve(args, cfg, "init", str)
        tmax = _resolve(args, cfg, "tmax", float)
        dt = _resolve(args, cfg, "dt", float)
        ok, why = validity_check(detuning, SSHParams(xi=1.0, delta=delta), g)
        if not ok:
            print(f"warning: {why}", file=sys.stderr)
        traj = master_trajectory(label, d, delta, g, detuning, init, tmax, dt=dt)
        path = _write_csv(out / f"dynamics_{label}_d{d}_{init}.csv",
                          _TRAJ_HEADER, _trajectory_rows(traj))
        print(path)
        return 0

    if args.command == "oracle":
        label = _resolve(args, cfg, "coupling", str)
        d = _resolve(args, cfg, "d", int)
        delta = _resolve(args, cfg, "delta", float)
        g = _resolve(args, cfg, "g_over_xi", float)
        detuning = _resolve(args, cfg, "detuning_over_xi", float)
        init = args.init if args.init else "eg"
        L = _resolve(args, cfg, "L", int)
        tmax = _resolve(args, cfg, "tmax", float)
        dt = args.dt if args.dt is not None else 5e-4
        params = SSHParams(xi=1.0, delta=delta)
        config = parse_config(label, Geometry(d=d), g=g)
        horizon = default_horizon(L, tmax)
        exact = evolve_exact(config, detuning, params, L, initial_state(L, init), tmax, dt=dt)
        master = master_trajectory(label, d, delta, g, detuning, init, tmax)
        sup = compare(master.concurrence_trace(), exact.concurrence_trace(), horizon)
        stem = f"oracle_{label}_d{d}_{init}"
        path = _write_csv(out / f"{stem}.csv", _TRAJ_HEADER, _trajectory_rows(exact))
        report = _write_json(out / f"{stem}_report.json",
                             {"sup_norm": sup, "horizon": horizon, "L": L,
                              "max_norm_drift": exact.meta["max_norm_drift"],
                              "max_energy_drift": exact.meta["max_energy_drift"]})
        print(path)
        print(report)
        return 0

    if args.command == "figure":
        tmax = args.tmax if args.tmax is not None else cfg.get("tmax")
        dt = args.dt if args.dt is not None else float(cfg.get("dt", 1e-3))
        paths = run_figure(args.name, out, tmax=tmax, dt=dt, threads=args.threads)
        for p in paths:
            print(p)
        return 0

    if args.command == "sweep":
        couplings = enumerate_all() if args.couplings == "all" else _parse_list(args.couplings, str)
        if args.deltas is not None:
            deltas = _parse_list(args.deltas, float)
        elif "delta" in cfg:
            deltas = [float(cfg["delta"])]
        else:
            deltas = [0.3, -0.3]
        d_list = _parse_list(args.d, int) if args.d is not None else [1, 2]
        spec = ExperimentSpec(
            couplings=couplings,
            d_values=d_list,
            deltas=deltas,
            inits=_parse_list(args.inits, str),
            g=_resolve(args, cfg, "g_over_xi", float),
            detuning=_resolve(args, cfg, "detuning_over_xi", float),
            tmax=_resolve(args, cfg, "tmax", float),
            dt=_resolve(args, cfg, "dt", float),
        )
        for w in spec.warnings:
            print(f"warning: {w}", file=sys.stderr)
        header, rows, failures = run_sweep(spec, threads=args.threads)
        for point, err in failures:
            print(f"skipped {point}: {err}", file=sys.stderr)
        if not rows:
            print("error: every sweep point failed", file=sys.stderr)
            return 1
        print(_write_csv(out / "sweep.csv", header, rows))
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands
-----------
run        march a configured simulation, write ``diagnostics.csv`` (and
           solution snapshots when ``snapshot_times`` is set)
benchmark  mesh-refinement study against the stationary phase transition,
           write ``eoc.csv`` and ``eoc.txt``
audit      check the interface-flux mass/energy conditions on random traces
snapshot   like run, but write only the solution snapshots

Configuration is flat ``key = value`` text in ``[run]``, ``[scheme]`` and
``[newton]`` sections whose keys mirror the RunConfig/SchemeConfig/
NewtonConfig fields.  Precedence: built-in defaults < ``--preset`` <
``--config`` file < ``--set section.key=value`` overrides.  Unknown keys are
a hard error.  Every run directory receives ``resolved_config.txt`` echoing
the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import configparser
import copy
import sys
from pathlib import Path

import numpy as np

from .driver import (EocTable, RunConfig, RunResult, StepIC, TanhSteady,
                     eoc_sweep, n_time_steps, run)
from .physics import DoubleWell, PhysParams
from .scheme import FluxFamily, SchemeConfig, audit_flux_conditions
from .solver import NewtonConfig, NonConvergence
from .space import lagrange_basis

DIAG_HEADER = ("t,mass,momentum,energy,energy_delta,viscous_dissipation,"
               "max_abs_velocity,min_density,newton_iters")
SNAP_HEADER = "x,rho,v,q,tau"

DEFAULTS = {
    "run": {
        "domain": "0, 1",
        "n_elems": "512",
        "T": "0.5",
        "ic": "step",
        "record_every": "1",
        "n_list": "",
        "snapshot_times": "",
        "snapshot_points_per_elem": "10",
    },
    "scheme": {
        "degree": "1",
        "dt": "1e-3",
        "gamma": "1e-4",
        "mu": "0",
        "sigma": "auto",
        "flux": "conservative",
        "alpha": "0",
        "beta": "0",
        "q0_init": "lift",
    },
    "newton": {
        "tol": "1e-10",
        "max_iters": "50",
        "damping": "1",
        "polish": "1",
    },
}

_BENCH_COMMON = {
    "run": {"domain": "-1, 1", "ic": "tanh", "T": "1.0",
            "n_list": "32, 64, 128, 256, 512, 1024"},
    "newton": {"tol": "1e-12"},
}

PRESETS = {
    "ek-step": {},
    "nsk-step-mu1e-7": {"scheme": {"mu": "1e-7"}},
    "nsk-step-mu1e-6": {"scheme": {"mu": "1e-6"}},
    "nsk-step-mu1e-5": {"scheme": {"mu": "1e-5"}},
    "bench-gamma1e-4": {**_BENCH_COMMON, "scheme": {"gamma": "1e-4"}},
    "bench-gamma1e-5": {**_BENCH_COMMON, "scheme": {"gamma": "1e-5"}},
    "bench-gamma1e-6": {**_BENCH_COMMON, "scheme": {"gamma": "1e-6"}},
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config resolution


def _apply(cfg: dict, section: str, key: str, value: str, origin: str):
    if section not in cfg:
        raise ConfigError(f"unknown config section '{section}' ({origin})")
    if key not in cfg[section]:
        raise ConfigError(f"unknown config key '{section}.{key}' ({origin})")
    cfg[section][key] = value


def resolve_config(preset: str | None, config_path: str | None,
                   overrides: list[str]) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}' (choose from "
                              f"{', '.join(sorted(PRESETS))})")
        for section, entries in PRESETS[preset].items():
            for key, value in entries.items():
                _apply(cfg, section, key, value, f"preset {preset}")

    if config_path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keys are case-sensitive (T vs t)
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        try:
            parser.read_string(path.read_text(), source=config_path)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file: {exc}") from exc
        for section in parser.sections():
            for key, value in parser.items(section):
                _apply(cfg, section, key, value, config_path)

    for entry in overrides:
        if "=" not in entry:
            raise ConfigError(f"--set expects key=value, got '{entry}'")
        key, value = entry.split("=", 1)
        key = key.strip()
        if "." in key:
            section, key = key.split(".", 1)
            _apply(cfg, section.strip(), key.strip(), value.strip(), "--set")
        else:
            hits = [s for s in cfg if key in cfg[s]]
            if not hits:
                raise ConfigError(f"unknown config key '{key}' (--set)")
            if len(hits) > 1:
                raise ConfigError(f"ambiguous config key '{key}' (in sections "
                                  f"{', '.join(hits)}); qualify as section.key")
            _apply(cfg, hits[0], key, value.strip(), "--set")
    return cfg


def _parse(cfg, section, key, convert, describe):
    raw = cfg[section][key]
    try:
        return convert(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"bad value for '{section}.{key}': {raw!r} ({describe})") from exc


def _float_list(raw: str) -> list[float]:
    parts = [p for chunk in raw.split(",") for p in chunk.split()]
    return [float(p) for p in parts]


def _int_list(raw: str) -> list[int]:
    out = []
    for x in _float_list(raw):
        if x != int(x):
            raise ValueError(f"not an integer: {x}")
        out.append(int(x))
    return out


def build_run_config(cfg: dict) -> tuple[RunConfig, dict]:
    """Typed RunConfig plus the CLI-only extras (n_list, snapshots)."""
    domain = _parse(cfg, "run", "domain", _float_list, "two floats")
    if len(domain) != 2:
        raise ConfigError(f"bad value for 'run.domain': need two floats, "
                          f"got {cfg['run']['domain']!r}")
    ic_name = cfg["run"]["ic"].strip()
    if ic_name == "step":
        ic = StepIC()
    elif ic_name == "tanh":
        ic = TanhSteady()
    else:
        raise ConfigError(f"bad value for 'run.ic': {ic_name!r} "
                          "(choose step or tanh)")

    flux_name = cfg["scheme"]["flux"].strip()
    alpha = _parse(cfg, "scheme", "alpha", float, "float")
    beta = _parse(cfg, "scheme", "beta", float, "float")
    if flux_name == "conservative":
        if alpha != 0.0 or beta != 0.0:
            raise ConfigError("conservative flux requires alpha = beta = 0; "
                              "set scheme.flux = dissipative to use them")
        flux = FluxFamily.conservative()
    elif flux_name == "dissipative":
        flux = FluxFamily.dissipative(alpha, beta)
    else:
        raise ConfigError(f"bad value for 'scheme.flux': {flux_name!r} "
                          "(choose conservative or dissipative)")

    sigma_raw = cfg["scheme"]["sigma"].strip()
    sigma = None if sigma_raw == "auto" else _parse(
        cfg, "scheme", "sigma", float, "float or auto")

    try:
        phys = PhysParams(
            gamma=_parse(cfg, "scheme", "gamma", float, "float"),
            mu=_parse(cfg, "scheme", "mu", float, "float"),
            well=DoubleWell())
        scheme = SchemeConfig(
            phys=phys,
            degree=_parse(cfg, "scheme", "degree", int, "int"),
            dt=_parse(cfg, "scheme", "dt", float, "float"),
            flux=flux, sigma=sigma,
            q0_init=cfg["scheme"]["q0_init"].strip())
        newton = NewtonConfig(
            tol=_parse(cfg, "newton", "tol", float, "float"),
            max_iters=_parse(cfg, "newton", "max_iters", int, "int"),
            damping=_parse(cfg, "newton", "damping", float, "float"),
            polish=_parse(cfg, "newton", "polish", int, "int"))
        run_cfg = RunConfig(
            domain=(domain[0], domain[1]),
            n_elems=_parse(cfg, "run", "n_elems", int, "int"),
            scheme=scheme,
            T=_parse(cfg, "run", "T", float, "float"),
            ic=ic,
            newton=newton,
            record_every=_parse(cfg, "run", "record_every", int, "int"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    extras = {
        "n_list": _parse(cfg, "run", "n_list", _int_list, "ints"),
        "snapshot_times": _parse(cfg, "run", "snapshot_times", _float_list,
                                 "floats"),
        "points_per_elem": _parse(cfg, "run", "snapshot_points_per_elem",
                                  int, "int"),
    }
    if extras["points_per_elem"] < 2:
        raise ConfigError("bad value for 'run.snapshot_points_per_elem': "
                          "need >= 2")
    return run_cfg, extras


# ---------------------------------------------------------------------------
# output helpers


def _write_lines(path: Path, lines) -> None:
    path.write_text("\n".join(lines) + "\n")


def write_resolved_config(cfg: dict, out_dir: Path) -> None:
    lines = []
    for section, entries in cfg.items():
        lines.append(f"[{section}]")
        for key, value in entries.items():
            lines.append(f"{key} = {value}")
        lines.append("")
    _write_lines(out_dir / "resolved_config.txt", lines[:-1])


def diagnostics_lines(rows) -> list[str]:
    lines = [DIAG_HEADER]
    for r in rows:
        lines.append(f"{r.t:.15e},{r.mass:.15e},{r.momentum:.15e},"
                     f"{r.energy:.15e},{r.energy_delta:.15e},"
                     f"{r.viscous_dissipation:.15e},"
                     f"{r.max_abs_velocity:.15e},{r.min_density:.15e},"
                     f"{r.newton_iters}")
    return lines


class SnapshotWriter:
    """on_step observer that writes snapshot_<t>.csv at requested times."""

    def __init__(self, times, dt, n_steps, points_per_elem, out_dir: Path):
        self.targets = {}
        for t in times:
            step = int(round(t / dt))
            if step < 0 or step > n_steps or abs(step * dt - t) > 1e-9 + 1e-9 * abs(t):
                raise ConfigError(f"bad value for 'run.snapshot_times': {t} "
                                  "is not a multiple of dt within [0, T]")
            self.targets[step] = t
        self.dt = dt
        self.ref_pts = np.linspace(-1.0, 1.0, points_per_elem)
        self.out_dir = out_dir
        self.written = []
        self._basis = None

    def __call__(self, t, state, tau):
        step = int(round(t / self.dt))
        if step not in self.targets:
            return
        space = state.space
        if self._basis is None:
            self._basis = lagrange_basis(space.nodes_ref, self.ref_pts)
        x = space.elem_coords(np.arange(space.n_elems)[:, None],
                              self.ref_pts[None, :]).ravel()
        cols = [x]
        for f in (state.rho, state.v, state.q, tau):
            cols.append((f.elems @ self._basis.T).ravel())
        lines = [SNAP_HEADER]
        for row in zip(*cols):
            lines.append(",".join(f"{val:.15e}" for val in row))
        name = f"snapshot_{self.targets[step]:.6f}.csv"
        _write_lines(self.out_dir / name, lines)
        self.written.append(name)


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(args, write_diagnostics=True) -> int:
    cfg = resolve_config(args.preset, args.config, args.set or [])
    run_cfg, extras = build_run_config(cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_resolved_config(cfg, out_dir)

    times = extras["snapshot_times"]
    if not write_diagnostics and not times:
        times = [run_cfg.scheme.dt * n_time_steps(run_cfg.T,
                                                  run_cfg.scheme.dt)]
    observer = None
    if times:
        observer = SnapshotWriter(times, run_cfg.scheme.dt,
                                  n_time_steps(run_cfg.T, run_cfg.scheme.dt),
                                  extras["points_per_elem"], out_dir)
    try:
        result = run(run_cfg, on_step=observer)
    except NonConvergence as exc:
        if write_diagnostics and exc.partial is not None:
            lines = diagnostics_lines(exc.partial.rows)
            lines.append(f"# aborted at step {exc.aborted_step}")
            _write_lines(out_dir / "diagnostics.csv", lines)
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if write_diagnostics:
        _write_lines(out_dir / "diagnostics.csv",
                     diagnostics_lines(result.rows))
        print(f"wrote {out_dir / 'diagnostics.csv'} "
              f"({len(result.rows)} rows)")
    if observer is not None:
        for name in observer.written:
            print(f"wrote {out_dir / name}")
    return 0


def cmd_snapshot(args) -> int:
    return cmd_run(args, write_diagnostics=False)


def cmd_benchmark(args) -> int:
    cfg = resolve_config(args.preset, args.config, args.set or [])
    run_cfg, extras = build_run_config(cfg)
    if not extras["n_list"]:
        raise ConfigError("benchmark needs 'run.n_list'")
    if not isinstance(run_cfg.ic, TanhSteady):
        raise ConfigError("benchmark needs 'run.ic = tanh'")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_resolved_config(cfg, out_dir)
    try:
        table = eoc_sweep(run_cfg, extras["n_list"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_lines(out_dir / "eoc.csv", table.to_csv_lines())
    (out_dir / "eoc.txt").write_text(table.to_text() + "\n")
    print(table.to_text())
    return 0


def cmd_audit(args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    if args.flux == "conservative":
        if args.alpha or args.beta:
            raise ConfigError("alpha/beta only apply to --flux dissipative")
        family = FluxFamily.conservative()
    else:
        alpha = 1.0 if args.alpha is None else args.alpha
        beta = 1.0 if args.beta is None else args.beta
        try:
            family = FluxFamily.dissipative(alpha, beta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    report = audit_flux_conditions(family, n_trials=args.trials,
                                   seed=args.seed, gamma=args.gamma,
                                   corrupt_for_testing=args.corrupt)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nskdg",
        description="Energy-consistent DG solver for 1D isothermal "
                    "Euler-Korteweg / Navier-Stokes-Korteweg flow")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_config_flags(p):
        p.add_argument("--preset", choices=sorted(PRESETS), default=None,
                       help="named experiment preset")
        p.add_argument("--config", default=None,
                       help="INI-style config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one config entry (section.key=value); "
                            "repeatable")
        p.add_argument("--out", default=".",
                       help="output directory (default: current)")

    p_run = sub.add_parser("run", help="time-march one configuration")
    add_config_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_snap = sub.add_parser("snapshot",
                            help="run and write only solution snapshots")
    add_config_flags(p_snap)
    p_snap.set_defaults(func=cmd_snapshot)

    p_bench = sub.add_parser("benchmark", help="mesh-refinement study")
    add_config_flags(p_bench)
    p_bench.set_defaults(func=cmd_benchmark)

    p_audit = sub.add_parser("audit", help="interface-flux condition audit")
    p_audit.add_argument("--flux", choices=["conservative", "dissipative"],
                         default="conservative")
    p_audit.add_argument("--alpha", type=float, default=None)
    p_audit.add_argument("--beta", type=float, default=None)
    p_audit.add_argument("--trials", type=int, default=100_000)
    p_audit.add_argument("--seed", type=int, default=0)
    p_audit.add_argument("--gamma", type=float, default=1.0)
    p_audit.add_argument("--corrupt", action="store_true",
                         help=argparse.SUPPRESS)
    p_audit.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

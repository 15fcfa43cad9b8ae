"""Command-line front end: ``multidirac verify | run | convergence``.

Exit codes: 0 success, 1 computational failure, 2 usage or configuration error.
"""
from __future__ import annotations

import csv
import json
import math
import sys
import time
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import __version__
from .errors import MultiDiracError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

KG_RUN_PRESETS = {
    "plane_wave_m1": {"potential": "linear", "params": {"m2": 1.0}, "initial": {"type": "plane_wave", "k": 1}},
    "transport_free": {"potential": "free", "params": {}, "initial": {"type": "transport"}},
}
MECHANICS_PRESETS = ("affine_vy1", "contact_zyx")
MAXWELL_PRESETS = ("plane_wave", "longitudinal", "constant", "witness")


class ConfigError(Exception):
    """Invalid run configuration; the message carries ``path:line``."""


# ------------------------------------------------------------------ helpers

def _fmt(x) -> str:
    return "%.17g" % float(x)


def write_csv(path: Path, header: list, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out: Path, command: str, config: Optional[str], seed: int, started: float) -> None:
    write_json(out / "manifest.json", {
        "command": command, "config": config, "seed": seed, "output_dir": str(out),
        "version": __version__, "started_unix": started, "wall_clock_s": time.time() - started,
    })


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return 1


def load_config(path: str) -> tuple[dict, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{path}: config file not found")
    text = p.read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1: top level must be a JSON object")
    for key, kind in (("grid", dict), ("lagrangian", dict), ("initial", dict)):
        if key in cfg and not isinstance(cfg[key], kind):
            raise ConfigError(f"{path}:{_line_of(text, key)}: '{key}' must be an object")
    ex = cfg.get("example")
    if ex not in ("kg", "maxwell", "mechanics"):
        raise ConfigError(f"{path}:{_line_of(text, 'example')}: 'example' must be one of kg, maxwell, mechanics"
                          f" (got {ex!r})")
    return cfg, text


def _err(path, text, key, msg) -> ConfigError:
    return ConfigError(f"{path}:{_line_of(text, key)}: {msg}")


def _echo(quiet: bool, msg: str) -> None:
    if not quiet:
        click.echo(msg)


def _threads_ok() -> None:
    from .verify import thread_count
    try:
        thread_count()
    except ValueError as exc:
        raise click.UsageError(str(exc))


# ------------------------------------------------------------------ runners

def _kg_config(cfg: dict, text: str, path: str):
    from .chart import potential_preset
    from .errors import ChartError
    from .field.klein_gordon import KGConfig

    lag = dict(cfg.get("lagrangian", {}))
    grid = dict(cfg.get("grid", {}))
    initial = dict(cfg.get("initial", {}))
    preset = lag.get("preset", "plane_wave_m1")
    if preset in KG_RUN_PRESETS:
        base = KG_RUN_PRESETS[preset]
        potential, params = base["potential"], dict(base["params"])
        init = {**base["initial"], **initial}
    else:
        potential, params = preset, {}
        init = {"type": "plane_wave", "k": 1, **initial}
    params.update(lag.get("params", {}))
    try:
        potential_preset(potential, params)
    except ChartError as exc:
        raise _err(path, text, "preset", str(exc)) from None
    known = {"nx", "length", "cfl", "steps", "t_final", "save_every"}
    bad = sorted(set(grid) - known)
    if bad:
        raise _err(path, text, bad[0], f"unknown grid field {bad[0]!r}")
    if "steps" not in grid and "t_final" not in grid:
        grid["steps"] = 1000
    # residuals are taken on every step; save_every only thins the CSV rows
    stride = max(1, int(grid.pop("save_every", 100)))
    try:
        kc = KGConfig(potential=potential, potential_params=params, initial=init.get("type", "plane_wave"),
                      k=int(init.get("k", 1)), amplitude=float(init.get("amplitude", 1.0)), **grid)
    except TypeError as exc:
        raise _err(path, text, "grid", str(exc)) from None
    return kc, float(init.get("noise", 0.0)), stride


def run_kg(cfg: dict, text: str, path: str, seed: int, out: Path, levels: int) -> dict:
    from .chart import kg_chart, kg_model
    from .field.klein_gordon import KGConfig, convergence_study, initial_data, solve_klein_gordon

    kc, noise, stride = _kg_config(cfg, text, path)
    if noise:
        rng = np.random.default_rng(seed)
        x = kc.dx * np.arange(kc.nx)
        phi0, pi0 = initial_data(kc, x)
        dphi = noise * rng.standard_normal(kc.nx)
        kc.phi0, kc.phit0 = (lambda _x, a=phi0 + dphi: a), (lambda _x, b=pi0: b)
        kc.initial = "custom"
    res = solve_klein_gordon(kc)
    st = res.state
    chart = kg_chart()
    model = kg_model(chart, kc.potential, kc.potential_params)
    X = st.base_points()
    E = st.p + np.sum(st.pm * st.v, axis=(-2, -1)) - model.L(X, st.y, st.v)
    d = res.diagnostics
    groups = list(d.fields)
    header = ["t", "x", "phi", "v0", "v1", "p0", "p1", "p", "E"] + [f"residual_{g}" for g in groups]
    resid = [np.max(np.abs(d.fields[g].reshape(st.shape + (-1,))), axis=-1) for g in groups]

    def rows():
        for i in range(0, st.shape[0], stride):
            for j in range(st.shape[1]):
                yield ([X[i, j, 0], X[i, j, 1], st.y[i, j, 0], st.v[i, j, 0, 0], st.v[i, j, 0, 1],
                        st.pm[i, j, 0, 0], st.pm[i, j, 0, 1], st.p[i, j], E[i, j]]
                       + [r[i, j] for r in resid])

    write_csv(out / "kg.csv", header, rows())
    write_csv(out / "kg_energy.csv", ["step", "t", "energy", "drift"],
              ([n, n * kc.dt, e, e - res.energy[0]] for n, e in enumerate(res.energy)))
    summary = d.summary()
    summary.pop("energy_drift_max", None)
    summary["discrete_energy_drift_max"] = float(np.max(np.abs(res.energy - res.energy[0])))
    report = {"example": "kg", "potential": kc.potential, "params": kc.potential_params, "nx": kc.nx,
              "dt": kc.dt, "dx": kc.dx, "steps": kc.n_steps(), "save_every": stride,
              "diagnostics": summary}
    if kc.initial in ("plane_wave", "transport") and kc.potential in ("linear", "free"):
        base = KGConfig(nx=32, length=kc.length, cfl=kc.cfl, potential=kc.potential,
                        potential_params=kc.potential_params, initial=kc.initial, k=kc.k, amplitude=kc.amplitude)
        table = convergence_study(base, levels=levels)
        report["convergence"] = {"levels": table.rows(), "finest_order": table.orders[-1]}
    return report


def run_mechanics(cfg: dict, text: str, path: str, seed: int, out: Path) -> dict:
    from .field.mechanics import EXAMPLES, solve_nonholonomic_mechanics

    lag = cfg.get("lagrangian", {})
    preset = lag.get("preset", "affine_vy1")
    if preset not in EXAMPLES:
        raise _err(path, text, "preset", f"unknown mechanics preset {preset!r}; choose from {', '.join(EXAMPLES)}")
    grid = cfg.get("grid", {})
    ex = EXAMPLES[preset]()
    t_final = float(grid.get("t_final", 10.0))
    steps = int(grid.get("steps", 10_000))
    save_every = max(1, int(grid.get("save_every", 10)))
    init = cfg.get("initial", {})
    q0 = np.asarray(init.get("q", ex.q0), float)
    v0 = np.asarray(init.get("v", ex.v0), float)
    res = solve_nonholonomic_mechanics(ex.model, ex.constraints, q0, v0, t_final, steps)
    d = res.diagnostics
    st = res.state
    dof = ex.model.dof
    k = ex.constraints.k
    header = (["t"] + [f"q{i + 1}" for i in range(dof)] + [f"v{i + 1}" for i in range(dof)]
              + [f"p{i + 1}" for i in range(dof)] + ["p_t", "E"] + [f"lambda{a + 1}" for a in range(k)]
              + ["constraint_residual"] + [f"residual_{g}" for g in ("holonomy", "balance", "legendre")])
    E = d.fields["E"]

    def rows():
        for n in range(0, st.shape[0], save_every):
            yield ([res.times[n], *st.y[n], *st.v[n, :, 0], *st.pm[n, :, 0], st.p[n], E[n],
                    *res.multipliers.values[n], d.constraint_violation[n]]
                   + [float(np.max(np.abs(d.fields[g][n]))) for g in ("holonomy", "balance", "legendre")])

    write_csv(out / "mechanics.csv", header, rows())
    traj_err = float(np.max(np.abs(st.y - ex.exact_q(res.times)))) if init == {} else None
    return {"example": "mechanics", "preset": preset, "steps": steps, "t_final": t_final,
            "diagnostics": d.summary(), "trajectory_error": traj_err}


def run_maxwell(cfg: dict, text: str, path: str, seed: int, out: Path) -> dict:
    from .field.maxwell import PRESETS, maxwell_residual, sample_analytic

    lag = cfg.get("lagrangian", {})
    preset = lag.get("preset", "plane_wave")
    if preset not in PRESETS:
        raise _err(path, text, "preset", f"unknown maxwell preset {preset!r}; choose from {', '.join(PRESETS)}")
    grid = cfg.get("grid", {})
    n = int(grid.get("n", 5))
    extent = float(grid.get("extent", 1.0))
    axes = [np.linspace(0.0, extent, n)] * 4
    fns = PRESETS[preset](**lag.get("params", {}))
    sample = sample_analytic(*fns, axes, momentum_sign=float(lag.get("momentum_sign", -1.0)))
    rep = maxwell_residual(sample, momentum_sign=float(lag.get("momentum_sign", -1.0)))
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    A = sample.A.reshape(-1, 4)
    names = ("legendre", "holonomy", "continuity")
    res = [np.max(np.abs(rep.fields[g].reshape(x.shape[0], -1)), axis=-1) for g in names]
    header = ["x0", "x1", "x2", "x3", "A0", "A1", "A2", "A3"] + [f"residual_{g}" for g in names]
    write_csv(out / "maxwell.csv", header, ([*x[i], *A[i]] + [r[i] for r in res] for i in range(x.shape[0])))
    return {"example": "maxwell", "preset": preset, "diagnostics": rep.summary()}


# ---------------------------------------------------------------------- CLI

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="multidirac")
def main():
    """Multi-Dirac structures: verification suites and example field equations."""


@main.command()
@click.option("--scope", type=click.Choice(["algebra", "dirac", "integrability", "all"]), default="all",
              show_default=True, help="Which invariant suites to run.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for random sampling.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Directory for report.json and manifest.json.")
@click.option("--quiet", is_flag=True, help="Only set the exit code.")
def verify(scope, seed, out, quiet):
    """Run invariant suites and report each identity with its anchor."""
    from .verify import report, run_scope

    _threads_ok()
    started = time.time()
    try:
        entries = run_scope(scope, seed)
    except MultiDiracError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    rep = report(entries, scope, seed)
    for e in entries:
        mark = "ok  " if e.passed else "FAIL"
        note = "" if e.expected == "pass" else f" (expected {e.expected})"
        _echo(quiet, f"{mark} [{e.anchor}] {e.name}: {e.observed}{note}")
    if out:
        od = Path(out)
        od.mkdir(parents=True, exist_ok=True)
        write_json(od / "report.json", rep)
        write_manifest(od, f"verify --scope {scope}", None, seed, started)
    _echo(quiet, f"{sum(e.passed for e in entries)}/{len(entries)} checks as expected")
    sys.exit(EXIT_OK if rep["passed"] else EXIT_FAIL)


@main.command()
@click.option("--config", "config_path", type=str, required=True, help="JSON run configuration.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for seeded perturbations.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory (overrides config).")
@click.option("--levels", type=int, default=4, show_default=True, help="Refinement levels for the convergence block.")
@click.option("--quiet", is_flag=True)
def run(config_path, seed, out, levels, quiet):
    """Run a configured example and write CSV, diagnostics and manifest."""
    _threads_ok()
    started = time.time()
    try:
        cfg, text = load_config(config_path)
        if levels < 2:
            raise click.UsageError("--levels must be at least 2")
        od = Path(out or cfg.get("output") or "multidirac_out")
        ex = cfg["example"]
        if ex == "kg":
            report = run_kg(cfg, text, config_path, seed, od, levels)
        elif ex == "mechanics":
            report = run_mechanics(cfg, text, config_path, seed, od)
        else:
            report = run_maxwell(cfg, text, config_path, seed, od)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except MultiDiracError as exc:
        click.echo(f"solver error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    write_json(od / "diagnostics.json", report)
    write_manifest(od, "run", config_path, seed, started)
    _echo(quiet, json.dumps(_jsonable(report.get("diagnostics", {})), indent=2, sort_keys=True))
    _echo(quiet, f"outputs written to {od}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--example", type=click.Choice(["kg_plane_wave", "kg_transport"]),
              default="kg_plane_wave", show_default=True)
@click.option("--levels", type=int, default=4, show_default=True, help="Number of refinement levels (>= 2).")
@click.option("--nx", type=int, default=32, show_default=True, help="Coarsest spatial resolution.")
@click.option("--t-final", type=float, default=2.0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--quiet", is_flag=True)
def convergence(example, levels, nx, t_final, out, seed, quiet):
    """Errors against an analytic reference under refinement, with log2 ratio orders."""
    from .field.klein_gordon import KGConfig, convergence_study

    _threads_ok()
    started = time.time()
    if levels < 2:
        raise click.UsageError("--levels must be at least 2")
    presets = {
        "kg_plane_wave": KGConfig(nx=nx, potential="linear", potential_params={"m2": 1.0}, initial="plane_wave"),
        "kg_transport": KGConfig(nx=nx, potential="free", initial="transport"),
    }
    try:
        table = convergence_study(presets[example], levels=levels, t_final=t_final)
    except MultiDiracError as exc:
        click.echo(f"solver error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    _echo(quiet, f"{'nx':>6} {'l2_error':>24} {'order':>8}")
    for row in table.rows():
        order = "" if row["order"] is None else f"{row['order']:.4f}"
        _echo(quiet, f"{row['nx']:>6} {row['l2_error']:>24.17g} {order:>8}")
    if out:
        od = Path(out)
        od.mkdir(parents=True, exist_ok=True)
        write_csv(od / "convergence.csv", ["nx", "l2_error", "order"],
                  ([r["nx"], r["l2_error"], r["order"] if r["order"] is not None else float("nan")]
                   for r in table.rows()))
        write_manifest(od, f"convergence --example {example} --levels {levels}", None, seed, started)
    sys.exit(EXIT_OK)


if __name__ == "__main__":  # pragma: no cover
    main()

"""Acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``PASS``/``FAIL`` line for its criterion before asserting.
"""
import json
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from multidirac.chart import canonical_omega, kg_chart, kg_model
from multidirac.field.klein_gordon import KGConfig, convergence_study, solve_klein_gordon
from multidirac.field.maxwell import PRESETS, default_axes, maxwell_residual, sample_analytic
from multidirac.field.mechanics import run_example
from multidirac.field.residuals import implicit_el_residual, lagrange_dirac_on_state
from multidirac.identities import identity_suite
from multidirac.symbolic import SymMultivectorField, SymVectorField, courant_defect, theorem_defect
from multidirac.verify import (graph_isotropy_suite, kg_witness_form, nonholonomic_isotropy, poisson_suite,
                               random_decomposable, random_symform)
from multidirac.poly import Coordinates

from conftest import quadratic_kg_state


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, msg):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {msg}")
        assert ok, msg
    return emit


def test_criterion_01_interior_identities(verdict):
    t0 = time.perf_counter()
    checks = identity_suite(seed=0, random_cases=1000)
    dt = time.perf_counter() - t0
    failed = [c for c in checks if not c.passed]
    detail = "; ".join(f"{c.name} {c.failures}/{c.cases} failures, e.g. {c.counterexample}" for c in failed)
    ok = not failed and dt < 10.0
    verdict(1, ok, f"{len(checks) - len(failed)}/{len(checks)} identities exact in {dt:.1f}s (limit 10s)"
                   + (f"; {detail}" if detail else ""))


def test_criterion_02_graph_isotropy(verdict):
    t0 = time.perf_counter()
    entries = graph_isotropy_suite(seed=0, count=20, max_dim=8)
    dt = time.perf_counter() - t0
    n_ok = sum(e.passed for e in entries)
    verdict(2, n_ok == 20 and dt < 60.0, f"{n_ok}/20 random (n+2)-forms maximally isotropic in {dt:.1f}s")


def test_criterion_03_integrability(verdict):
    t0 = time.perf_counter()
    c = kg_chart()
    om, wit = canonical_omega(c), kg_witness_form(c)
    coord = lambda nm: SymMultivectorField.decomposable([SymVectorField.coordinate(c.coords, nm)])
    names = c.coords.names
    canon_zero = all(theorem_defect(om, coord(a), coord(b)).is_zero() for a in names for b in names)
    wd = theorem_defect(wit, coord(c.pm(0, 0)), coord(c.y(0)))
    rng = random.Random(0)
    small = Coordinates(("a", "b", "c", "e"))
    agreed = 0
    for i in range(50):
        if i % 5 == 0:
            coords, n, omega = c.coords, 1, wit
        else:
            coords, n = small, i % 3
            omega = random_symform(small, n + 2, rng)
        degs = [(r, s) for r in range(1, n + 2) for s in range(1, n + 2) if r + s <= n + 1] or [(1, 1)]
        r, s = degs[i % len(degs)]
        X, Xb = random_decomposable(coords, r, rng), random_decomposable(coords, s, rng)
        agreed += courant_defect(omega, X, Xb) == theorem_defect(omega, X, Xb)
    dt = time.perf_counter() - t0
    ok = canon_zero and not wd.is_zero() and agreed == 50 and dt < 60.0
    verdict(3, ok, f"canonical defect zero={canon_zero}, witness defect={' '.join(wd.to_text().split())}, "
                   f"bracket identity {agreed}/50 in {dt:.1f}s")


def test_criterion_04_nonholonomic_isotropy(verdict):
    rng = random.Random(0)
    ok, reports = nonholonomic_isotropy(kg_chart(), 1, 5, 10, rng)
    failing = sorted({(e["r"], e["s"]) for rep in reports for e in rep if not e["verdict"]})
    bad_pts = sum(any(not e["verdict"] for e in rep) for rep in reports)
    verdict(4, ok, f"KG chart, k=1: {len(reports) - bad_pts}/{len(reports)} points isotropic"
                   + (f"; failing degrees {failing}" if failing else ""))


def test_criterion_05_klein_gordon(verdict):
    t0 = time.perf_counter()
    table = convergence_study(KGConfig(nx=32, potential="linear", potential_params={"m2": 1.0}), levels=4)
    cfg = KGConfig(nx=128, cfl=0.5, steps=10_000, potential="linear", potential_params={"m2": 1.0},
                   save_every=10_000)
    assert abs(cfg.dx - 2 * np.pi / 128) < 1e-15 and abs(cfg.dt - cfg.dx / 2) < 1e-15
    res = solve_klein_gordon(cfg, residuals=False)
    drift = float(np.max(np.abs(res.energy - res.energy[0])))
    rel = drift / abs(res.energy[0])
    dt = time.perf_counter() - t0
    order = table.orders[-1]
    ok = 1.7 <= order <= 2.3 and all(1.7 <= o <= 2.3 for o in table.orders) and drift <= 1e-3 and dt < 30.0
    verdict(5, ok, f"orders {[round(o, 3) for o in table.orders]}, energy drift {drift:.2e} "
                   f"(relative {rel:.2e}) over 1e4 steps, {dt:.1f}s")


def test_criterion_06_maxwell(verdict):
    rep = maxwell_residual(sample_analytic(*PRESETS["plane_wave"](), default_axes()))
    wit = maxwell_residual(sample_analytic(*PRESETS["witness"](), default_axes()))
    ok = all(rep.residual_max[g] <= 1e-12 for g in ("legendre", "holonomy", "continuity")) \
        and wit.residual_max["continuity"] >= 1e-2
    verdict(6, ok, f"plane wave residuals {rep.residual_max}, witness continuity "
                   f"{wit.residual_max['continuity']:.3g}")


def test_criterion_07_mechanics(verdict):
    parts, ok = [], True
    for name in ("affine_vy1", "contact_zyx"):
        ex, res = run_example(name, t_final=10.0, steps=10_000)
        err = float(np.max(np.abs(res.q - ex.exact_q(res.times))))
        viol = float(np.max(res.diagnostics.constraint_violation))
        lam = res.multipliers.max_abs()
        ok = ok and err <= 1e-6 and viol <= 1e-8 and lam <= 1e-8
        parts.append(f"{name}: error {err:.1e}, constraint {viol:.1e}, |lambda| {lam:.1e}")
    verdict(7, ok, "; ".join(parts))


def _perturbed_states(rng, count):
    """Half exact reparametrizations, half node-level noise of amplitude 1e-6..1e-1."""
    out = []
    for i in range(count):
        if i % 2 == 0:
            pars = dict(zip(("beta", "gam", "a", "b", "d"), rng.uniform(-1, 1, size=5)))
            out.append(quadratic_kg_state(**pars))
        else:
            st = quadratic_kg_state()
            field = ["y", "v", "pm", "p"][(i // 2) % 4]
            arr = getattr(st, field)
            amp = 10.0 ** rng.uniform(-6, -1)
            arr += amp * rng.standard_normal(arr.shape)
            out.append(st)
    return out


def test_criterion_08_equivalence(verdict):
    c = kg_chart()
    L = kg_model(c, "affine", {"c": 0.7})
    rng = np.random.default_rng(0)
    states = [quadratic_kg_state()] + _perturbed_states(rng, 50)
    agree, passes = 0, 0
    for st in states:
        el_ok = implicit_el_residual(c, L, st).vanishes(1e-10)
        ld_ok = lagrange_dirac_on_state(c, L, st, tol=1e-10)["passed"]
        agree += el_ok == ld_ok
        passes += el_ok
    verdict(8, agree == len(states), f"verdicts coincide on {agree}/{len(states)} states "
                                     f"({passes} satisfy the equations)")


def test_criterion_09_poisson(verdict):
    entries = poisson_suite(seed=0, pairs=20)
    ok = all(e.passed for e in entries)
    verdict(9, ok, ", ".join(f"{e.name}: {e.observed}" for e in entries))


def test_criterion_10_determinism(verdict, tmp_path):
    cfg = tmp_path / "kg.json"
    cfg.write_text(json.dumps({"example": "kg", "grid": {"nx": 64, "steps": 200, "save_every": 20},
                               "lagrangian": {"preset": "plane_wave_m1"}, "initial": {"noise": 1e-3}}))
    blobs = []
    for name in ("a", "b"):
        out = tmp_path / name
        r = subprocess.run([sys.executable, "-m", "multidirac.cli", "run", "--config", str(cfg), "--seed", "42",
                            "--out", str(out), "--quiet"], capture_output=True)
        assert r.returncode == 0, r.stderr.decode()
        blobs.append((out / "kg.csv").read_bytes() + (out / "kg_energy.csv").read_bytes())
    verdict(10, blobs[0] == blobs[1], f"two runs with seed 42 produced {'identical' if blobs[0] == blobs[1] else 'different'} "
                                      f"CSV bytes ({len(blobs[0])} bytes)")

"""Acceptance criteria, each run at its stated tolerance and time limit.

A one-line verdict per criterion is printed in the "acceptance criteria"
section of the pytest summary. The sampling grids (criteria 3 and 4) take
several minutes on one core; deselect them with ``-m "not slow"``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import random_normalized
from schlicht import kernels
from schlicht.bounds import (
    bound_BR,
    bound_BR_koebe_piecewise,
    bound_BV,
    bound_examples_fixture,
    bound_for_spec,
    convex_bounds,
    starlike_bounds,
)
from schlicht.classes import ClassSpec, random_pm_beta
from schlicht.cli import main
from schlicht.harness import run_identity_regression, sample_accepted, summarize, tightness_search
from schlicht.series import TruncatedSeries, compose, revert

MS = (2, 3, 4)
BETAS = (0.0, 0.25, 0.5)
KERNELS = ("koebe", "halfplane", "log")
ALPHAS = (0, 1, 0.5 + 0.5j)
MARGIN = -1e-9
CELL_SECONDS = 60.0
N_ACCEPTED = 1000


# 1 -------------------------------------------------------------------------------------

def test_criterion_1_inverse_expansion(record_criterion):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    closed_dev = compose_dev = 0.0
    for _ in range(200):
        f = random_normalized(rng, 4)
        g = revert(f)
        a2, a3, a4 = f[2], f[3], f[4]
        closed = (-a2, 2 * a2**2 - a3, -(5 * a2**3 - 5 * a2 * a3 + a4))
        closed_dev = max(closed_dev, max(abs(g[n] - c) for n, c in zip((2, 3, 4), closed)))
        z = TruncatedSeries.identity(4)
        compose_dev = max(compose_dev, np.abs((compose(f, g) - z).coeffs).max())
    elapsed = time.perf_counter() - t0
    ok = closed_dev <= 1e-12 and compose_dev <= 1e-10 and elapsed < 1.0
    record_criterion(
        1, ok, f"closed-form dev {closed_dev:.2e}, compose dev {compose_dev:.2e}, {elapsed:.3f} s"
    )
    assert ok


# 2 -------------------------------------------------------------------------------------

def test_criterion_2_coefficient_bound(record_criterion):
    t0 = time.perf_counter()
    worst = -math.inf
    count = 0
    cells = list(itertools.product(MS, BETAS))
    for i in range(1000):
        m, beta = cells[i % len(cells)]
        spec = ClassSpec(m, beta, kernels.koebe(24))
        _, h = random_pm_beta(spec, i, 1 + i % 6, 24)
        worst = max(worst, np.abs(h.coeffs[1:]).max() - m * (1 - beta))
        count += 1
    elapsed = time.perf_counter() - t0
    ok = count == 1000 and worst <= 1e-9 and elapsed < 5.0
    record_criterion(2, ok, f"{count} functions, max |h_n| - m(1-beta) = {worst:.2e}, {elapsed:.2f} s")
    assert ok


# 3 -------------------------------------------------------------------------------------

def _run_cell(spec: ClassSpec, seed: int):
    t0 = time.perf_counter()
    records = sample_accepted(spec, N_ACCEPTED, seed)
    elapsed = time.perf_counter() - t0
    s = summarize(records)
    margins = [s[f"min_margin_{t}"] for t in ("a2", "a3", "combo") if s[f"min_margin_{t}"] is not None]
    return s, min(margins), elapsed


@pytest.mark.slow
@pytest.mark.parametrize("m,beta,kernel", list(itertools.product(MS, BETAS, KERNELS)))
def test_criterion_3_br_grid(record_criterion, m, beta, kernel):
    spec = ClassSpec(m, beta, kernels.by_name(kernel))
    s, worst, elapsed = _run_cell(spec, seed=3)
    ok = s["accepted"] >= N_ACCEPTED and s["violations"] == 0 and worst >= MARGIN and elapsed < CELL_SECONDS
    detail = (
        f"BR m={m} beta={beta} {kernel}: {s['accepted']}/{s['trials']} accepted, "
        f"{s['violations']} violations, min margin {worst:.3g}, {elapsed:.1f} s"
    )
    print(detail)
    record_criterion(3, ok, detail)
    assert ok


def test_criterion_3_printed_bounds(record_criterion, capsys):
    main(["bounds", "--m", "2", "--beta", "0", "--kernel", "koebe"])
    out = capsys.readouterr().out
    printed_ok = "|a2| <= 0.816497" in out
    knee_ok = all(
        abs(bound_BR(2, b, 2, 3).a2_bound - (1 - b)) <= 1e-15 for b in np.linspace(0.34, 0.99, 66)
    )
    ok = printed_ok and knee_ok and bound_BR(2, 0, 2, 3).a2_bound == math.sqrt(2 / 3)
    record_criterion(3, ok, "printed a2 bound 0.816497 at m=2, beta=0; 1-beta for beta>1/3")
    assert ok


# 4 -------------------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.parametrize(
    "alpha,m,beta,kernel", list(itertools.product(ALPHAS, MS, BETAS, KERNELS))
)
def test_criterion_4_bv_grid(record_criterion, alpha, m, beta, kernel):
    spec = ClassSpec(m, beta, kernels.by_name(kernel), alpha)
    s, worst, elapsed = _run_cell(spec, seed=4)
    ok = s["accepted"] >= N_ACCEPTED and s["violations"] == 0 and worst >= MARGIN and elapsed < CELL_SECONDS
    detail = (
        f"BV alpha={alpha} m={m} beta={beta} {kernel}: {s['accepted']}/{s['trials']} accepted, "
        f"{s['violations']} violations, min margin {worst:.3g}, {elapsed:.1f} s"
    )
    print(detail)
    record_criterion(4, ok, detail)
    assert ok


def test_criterion_4_special_cases(record_criterion):
    rng = np.random.default_rng(44)
    worst = 0.0
    for _ in range(100):
        m, beta = rng.uniform(2, 8), rng.uniform(0, 0.99)
        k2, k3 = rng.normal(size=2) + 1j * rng.normal(size=2)
        for alpha, special in ((0, starlike_bounds), (1, convex_bounds)):
            r = bound_BV(m, beta, alpha, k2, k3)
            a2, a3 = special(m, beta, k2, k3)
            worst = max(worst, abs(r.a2_bound - a2), abs(r.a3_bound - a3))
    ok = worst <= 1e-12
    record_criterion(4, ok, f"alpha=0/1 evaluators vs special cases over 100 draws: max dev {worst:.2e}")
    assert ok


# 5 -------------------------------------------------------------------------------------

def test_criterion_5_identity_closure(record_criterion):
    t0 = time.perf_counter()
    rep = run_identity_regression(seed=5, n=1000)
    elapsed = time.perf_counter() - t0
    ok = rep["max_deviation"] <= 1e-10 and elapsed < 2.0
    record_criterion(5, ok, f"1000 instances, max deviation {rep['max_deviation']:.2e}, {elapsed:.2f} s")
    assert ok


# 6 -------------------------------------------------------------------------------------

def test_criterion_6_piecewise(record_criterion):
    grid = np.unique(np.r_[np.linspace(0, 0.999, 999), 1 / 3])
    worst = 0.0
    for beta in grid:
        general = bound_BR(2, beta, 2, 3).a2_bound
        worst = max(worst, abs(general - bound_BR_koebe_piecewise(2, beta).a2_bound))
    knee = 1 / 3
    branches = (math.sqrt(2 * (1 - knee) / 3), 1 - knee)
    knee_dev = max(abs(b - 2 / 3) for b in branches)
    ok = len(grid) >= 1000 and worst <= 1e-12 and knee_dev <= 1e-12
    record_criterion(6, ok, f"{len(grid)} beta values, max dev {worst:.2e}, knee branches {branches}")
    assert ok


# 7 -------------------------------------------------------------------------------------

def test_criterion_7_example_fixtures(record_criterion):
    ok = True
    for m in MS:
        table = bound_examples_fixture(m)
        expected = {"koebe": (math.sqrt(m / 3), m / 3, m / 3), "halfplane": (math.sqrt(m), m, m)}
        ok &= table == expected
        for name in ("koebe", "halfplane"):
            r = bound_for_spec(ClassSpec(m, 0.0, kernels.by_name(name)))
            ok &= (r.a2_bound, r.a3_bound, r.combo_bound) == expected[name]
    record_criterion(7, ok, "exact for m in {2, 3, 4}, both kernels")
    assert ok


# 8 -------------------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.parametrize("target", ["a2", "a3", "combo"])
def test_criterion_8_tightness_probe(record_criterion, target):
    spec = ClassSpec(2, 0.0, kernels.koebe())
    t0 = time.perf_counter()
    res = tightness_search(spec, target, budget=100_000, seed=8)
    elapsed = time.perf_counter() - t0
    ok = res.ratio <= 1 + 1e-9 and res.evaluations == 100_000
    detail = (
        f"{target}: best {res.best_value:.6g} of bound {res.bound:.6g}, ratio {res.ratio:.4f} "
        f"({res.full_evaluations} full evaluations, {elapsed:.1f} s)"
    )
    print(detail)
    record_criterion(8, ok, detail)
    assert ok


# 9 -------------------------------------------------------------------------------------

def test_criterion_9_determinism(record_criterion, tmp_path, capsys):
    blobs = []
    for jobs in (1, 2, 4, 1):
        out = tmp_path / f"jobs{jobs}_{len(blobs)}.jsonl"
        code = main([
            "sample", "--m", "3", "--beta", "0.25", "--alpha", "0.5+0.5j", "--kernel", "log",
            "--n", "120", "--seed", "9", "--jobs", str(jobs), "--out", str(out),
        ])
        assert code == 0
        blobs.append(out.read_bytes())
    capsys.readouterr()
    ok = all(b == blobs[0] for b in blobs)
    record_criterion(9, ok, f"jobs 1, 2, 4 and a rerun: {len(blobs[0])} bytes, identical={ok}")
    assert ok

import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schlicht.bounds import (
    CSV_COLUMNS,
    bound_BR,
    bound_BR_koebe_piecewise,
    bound_BV,
    bound_examples_fixture,
    convex_bounds,
    starlike_bounds,
    to_csv,
)
from schlicht.errors import (
    DegenerateDenominator,
    ExcludedAlpha,
    ParamOutOfRange,
    ZeroKernelCoefficient,
)

ms = st.floats(2, 10)
betas = st.floats(0, 0.99)
kcoef = st.builds(complex, st.floats(-4, 4), st.floats(-4, 4)).filter(lambda z: abs(z) > 0.05)


def piecewise(beta):
    return math.sqrt(2 * (1 - beta) / 3) if beta <= 1 / 3 else 1 - beta


# --- bound_BR -------------------------------------------------------------------------

def test_bound_br_examples():
    r = bound_BR(2, 0, 2, 3)
    assert r.a2_bound == pytest.approx(0.816496580927726, abs=1e-15)
    assert r.a3_bound == r.combo_bound == pytest.approx(2 / 3, abs=1e-15)
    for m in (2, 3, 7.5):
        r = bound_BR(m, 0, 1, 1)
        assert (r.a2_bound, r.a3_bound) == (math.sqrt(m), m)
    r = bound_BR(2, 0.5, 2, 3)
    assert r.a2_bound == 0.5 and r.active_branch_a2 == "linear_k2"


def test_bound_br_errors():
    with pytest.raises(ParamOutOfRange):
        bound_BR(1.9, 0, 2, 3)
    with pytest.raises(ParamOutOfRange):
        bound_BR(2, 1, 2, 3)
    with pytest.raises(ParamOutOfRange):
        bound_BR(2, -0.1, 2, 3)
    with pytest.raises(ZeroKernelCoefficient):
        bound_BR(2, 0, 0, 3)
    with pytest.raises(ZeroKernelCoefficient):
        bound_BR(2, 0, 2, 0)


# --- piecewise --------------------------------------------------------------------------

def test_piecewise_examples():
    assert bound_BR_koebe_piecewise(2, 1 / 3).a2_bound == pytest.approx(2 / 3, abs=1e-15)
    assert bound_BR_koebe_piecewise(2, 0).a2_bound == math.sqrt(2 / 3)
    assert bound_BR_koebe_piecewise(2, 0.9).a2_bound == pytest.approx(0.1, abs=1e-15)
    with pytest.raises(ParamOutOfRange):
        bound_BR_koebe_piecewise(3, 0)


def test_piecewise_knee_is_continuous():
    knee = 1 / 3
    left = math.sqrt(2 * (1 - knee) / 3)
    right = 1 - knee
    assert left == pytest.approx(2 / 3, abs=1e-15) and right == pytest.approx(2 / 3, abs=1e-15)


def test_piecewise_matches_general_bound_on_grid():
    grid = np.r_[np.linspace(0, 0.999, 999), 1 / 3]
    for beta in grid:
        general = bound_BR(2, beta, 2, 3)
        special = bound_BR_koebe_piecewise(2, beta)
        assert abs(general.a2_bound - special.a2_bound) <= 1e-12
        assert abs(general.a2_bound - piecewise(beta)) <= 1e-12
        assert abs(general.a3_bound - special.a3_bound) <= 1e-12


# --- bound_BV ----------------------------------------------------------------------------

def test_bound_bv_alpha_one_example():
    r = bound_BV(2, 0, 1, 2, 3)
    assert r.a2_bound == 0.5
    assert r.a3_candidates == pytest.approx((1 + 1 / 9, 1 / 3, (1 / 9) * (1 + 2 * 5 / 4)), abs=1e-15)
    assert r.a3_bound == pytest.approx(1 / 3, abs=1e-15)
    assert r.active_branch_a3 == "p1_p2"
    assert r.combo_bound is None


def test_bound_bv_half_alpha_has_no_a3_bound():
    r = bound_BV(2, 0, -0.5, 2, 3)
    assert r.a3_bound is None and r.active_branch_a3 is None
    assert r.a2_bound > 0
    assert r.bound_for("a3") is None


def test_bound_bv_errors():
    with pytest.raises(ExcludedAlpha):
        bound_BV(2, 0, -1, 2, 3)
    with pytest.raises(DegenerateDenominator):
        bound_BV(2, 0, 0, 2, 2)          # 2 k3 - k2^2 = 0


@given(ms, betas, kcoef, kcoef)
def test_special_case_coherence(m, beta, k2, k3):
    if abs(2 * k3 - k2**2) < 1e-3 or abs(6 * k3 - 4 * k2**2) < 1e-3:
        return
    for alpha, special in ((0, starlike_bounds), (1, convex_bounds)):
        r = bound_BV(m, beta, alpha, k2, k3)
        a2, a3 = special(m, beta, k2, k3)
        assert abs(r.a2_bound - a2) <= 1e-12 * max(1, a2)
        assert abs(r.a3_bound - a3) <= 1e-12 * max(1, a3)


def test_special_case_coherence_100_draws(rng):
    draws = 0
    while draws < 100:
        m, beta = rng.uniform(2, 8), rng.uniform(0, 0.99)
        k2, k3 = rng.normal(size=2) + 1j * rng.normal(size=2)
        draws += 1
        for alpha, special in ((0, starlike_bounds), (1, convex_bounds)):
            r = bound_BV(m, beta, alpha, k2, k3)
            a2, a3 = special(m, beta, k2, k3)
            assert abs(r.a2_bound - a2) <= 1e-12 and abs(r.a3_bound - a3) <= 1e-12


# --- properties ---------------------------------------------------------------------------

@given(ms, betas, betas, kcoef, kcoef, st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)))
def test_monotone_in_beta_and_m(m, b1, b2, k2, k3, alpha):
    lo, hi = sorted((b1, b2))
    assert bound_BR(m, hi, k2, k3).a2_bound <= bound_BR(m, lo, k2, k3).a2_bound
    assert bound_BR(m, hi, k2, k3).a3_bound <= bound_BR(m, lo, k2, k3).a3_bound
    assert bound_BR(m + 1, lo, k2, k3).a2_bound >= bound_BR(m, lo, k2, k3).a2_bound
    if abs(1 + alpha) < 1e-3 or abs(1 + 2 * alpha) < 1e-3:
        return
    D = 2 * (1 + 2 * alpha) * k3 - (1 + 3 * alpha) * k2**2
    if abs(D) < 1e-6:
        return
    a, b = bound_BV(m, hi, alpha, k2, k3), bound_BV(m, lo, alpha, k2, k3)
    assert a.a2_bound <= b.a2_bound and a.a3_bound <= b.a3_bound
    c = bound_BV(m + 1, lo, alpha, k2, k3)
    assert c.a2_bound >= b.a2_bound and c.a3_bound >= b.a3_bound


@given(ms, betas, kcoef, kcoef)
def test_branch_provenance(m, beta, k2, k3):
    r = bound_BR(m, beta, k2, k3)
    assert r.a2_bound == min(r.a2_candidates)
    i = r.a2_branch_names.index(r.active_branch_a2)
    assert r.a2_candidates[i] == r.a2_bound
    assert all(c > r.a2_bound for c in r.a2_candidates[:i])
    assert all(np.isfinite(r.a2_candidates)) and r.a2_bound >= 0


def test_ties_go_to_first_branch():
    exact = bound_BR(2, 0, 2, 2)     # sqrt(2/2) and 2/2 are both exactly 1
    assert exact.a2_candidates == (1.0, 1.0) and exact.active_branch_a2 == "sqrt_k3"


# --- fixtures ------------------------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3, 4])
def test_example_fixtures_exact(m):
    table = bound_examples_fixture(m)
    assert table["koebe"] == (math.sqrt(m / 3), m / 3, m / 3)
    assert table["halfplane"] == (math.sqrt(m), m, m)
    k = bound_BR(m, 0, 2, 3)
    assert (k.a2_bound, k.a3_bound, k.combo_bound) == table["koebe"]
    h = bound_BR(m, 0, 1, 1)
    assert (h.a2_bound, h.a3_bound, h.combo_bound) == table["halfplane"]


def test_example_fixture_m3_koebe():
    assert bound_examples_fixture(3)["koebe"] == (1.0, 1.0, 1.0)


# --- serialization --------------------------------------------------------------------------

def test_json_and_csv():
    reports = [bound_BR(2, 0, 2, 3), bound_BV(3, 0.25, 0.5 + 0.5j, 2, 3), bound_BV(2, 0, -0.5, 2, 3)]
    d = json.loads(json.dumps(reports[1].to_dict()))
    assert d["alpha"] == [0.5, 0.5] and d["a3_bound"] == reports[1].a3_bound
    rows = list(csv.DictReader(io.StringIO(to_csv(reports))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert float(rows[0]["a2_bound"]) == reports[0].a2_bound
    assert rows[0]["branches"] == "sqrt_k3;k3"
    assert rows[2]["a3_bound"] == "" and rows[2]["combo_bound"] == ""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from trace_moments import geometry as G
from trace_moments.algebra import traces_from_spectrum
from trace_moments.core import TraceVector
from trace_moments.errors import SingularSystem


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=10))
def test_spectra_satisfy_all_bounds(vals):
    t = traces_from_spectrum(vals, 2 * len(vals) + 2)
    rep = G.cauchy_schwarz_check(t)
    if t.values[1] > 0:
        rep = rep + G.t2_cut_check(t)
    assert rep.all_satisfied, rep.violations
    assert G.cauchy_schwarz_ok_batch(np.array([t.values]), len(vals))[0]


def test_degenerate_spectrum_flags_equality():
    t = traces_from_spectrum([1.5] * 4, 8)
    rep = G.cauchy_schwarz_check(t)
    assert rep.all_satisfied
    first = rep.checks[0]
    assert first.name.startswith("t1^2") and first.equality
    assert all(c.equality for c in rep.checks if "N*" in c.name)


def test_negative_t2_violates():
    rep = G.cauchy_schwarz_check(TraceVector(2, (0.0, -1.0)))
    assert not rep.all_satisfied
    assert rep.violations[0].name == "t1^2 <= N*t2"
    assert not G.t2_cut_check(TraceVector(2, (0.0, -1.0, 0.0))).all_satisfied
    assert not G.cauchy_schwarz_ok_batch(np.array([[0.0, -1.0]]), 2)[0]


def test_t2_cut_bounds_examples():
    assert G.t2_cut_bounds(4.0, 3, 3) == (-8.0, 8.0)
    assert G.t2_cut_bounds(2.0, 2, 4) == (2.0, 4.0)
    assert traces_from_spectrum([-1.0, 1.0], 4).values[3] == 2.0
    with pytest.raises(ValueError):
        G.t2_cut_bounds(1.0, 3, 2)
    with pytest.raises(ValueError):
        G.t2_cut_bounds(0.0, 3, 4)


@pytest.mark.parametrize("n", [2, 3, 7])
def test_t2_cut_attainment(n):
    t2 = 2.5
    deg = traces_from_spectrum([math.sqrt(t2 / n)] * n, 6)
    lo, _ = G.t2_cut_bounds(t2, n, 4)
    assert math.isclose(deg.values[3], lo, rel_tol=1e-12)
    single = traces_from_spectrum([math.sqrt(t2)] + [0.0] * (n - 1), 6)
    _, hi = G.t2_cut_bounds(t2, n, 4)
    assert math.isclose(single.values[3], hi, rel_tol=1e-12)
    _, hi3 = G.t2_cut_bounds(t2, n, 3)
    assert math.isclose(single.values[2], hi3, rel_tol=1e-12)
    rep = G.t2_cut_check(single)
    assert rep.all_satisfied and any(c.equality for c in rep.checks)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 50), st.integers(1, 30), st.integers(2, 20))
def test_sandwich_ordered(t2, n, m):
    lo, hi = G.t2_cut_bounds(max(t2, 1e-9), n, 2 * m)
    assert lo <= hi * (1 + 1e-12)


def test_min_t2_examples():
    assert G.min_t2_given_t1(0.0, 5) == 0.0
    assert G.min_t2_given_t1(3.0, 2) == 4.5
    assert G.min_t2_given_t1(-2.0, 4) == 1.0
    # grid over lambda_1 with lambda_2 = 3 - lambda_1
    grid = np.arange(-5, 8, 1e-3)
    assert abs(np.min(grid**2 + (3 - grid) ** 2) - 4.5) <= 1e-6


@pytest.mark.parametrize("t1,n", [(3.0, 2), (-2.0, 4), (1.3, 7)])
def test_min_t2_numerical_oracle(t1, n):
    res = minimize(lambda x: np.sum(x**2), np.linspace(-1, 2, n), method="SLSQP",
                   constraints=[{"type": "eq", "fun": lambda x: np.sum(x) - t1}],
                   options={"ftol": 1e-14})
    assert abs(res.fun - G.min_t2_given_t1(t1, n)) <= 1e-6
    deg = traces_from_spectrum([t1 / n] * n, 2)
    assert math.isclose(deg.values[1], G.min_t2_given_t1(t1, n), rel_tol=1e-14, abs_tol=1e-15)


def test_pattern_traces():
    pat = G.ExtremalPattern((1.25,), (4,))
    assert G.traces_from_pattern(pat, 3).values == (5.0, 4 * 1.25**2, 4 * 1.25**3)
    assert G.traces_from_pattern(G.ExtremalPattern((-1.0, 1.0), (1, 1)), 4).values == (0, 2, 0, 2)
    pat = G.ExtremalPattern((0.0, 2.0), (2, 1))
    assert G.traces_from_pattern(pat, 3).values == (2.0, 4.0, 8.0)
    assert G.traces_from_pattern(pat, 5) == traces_from_spectrum(pat.spectrum(), 5)
    assert pat.n_dim == 3


@pytest.mark.parametrize("roots,mult", [((1.0, 0.0), (1, 1)), ((0.0, 1.0), (0, 2)),
                                        ((0.0, 1.0), (1,)), ((), ())])
def test_pattern_validation(roots, mult):
    with pytest.raises(ValueError):
        G.ExtremalPattern(roots, mult)


def test_lagrange_examples():
    t1, n = 2.2, 5
    pat = G.ExtremalPattern((t1 / n,), (n,))
    assert G.lagrange_residual(pat, [2 * t1 / n], 1) == 0.0
    a = 0.8
    assert G.lagrange_residual((-a, a), [3 * a * a, 0.0], 2) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(20):
        roots = np.sort(rng.uniform(-2, 2, 3))
        assert G.lagrange_residual(tuple(roots), list(rng.normal(size=3)), 3) > 0
    with pytest.raises(ValueError):
        G.lagrange_residual((1.0,), [1.0, 2.0], 1)


def test_solve_multipliers_examples():
    assert G.solve_multipliers((1.7,), 1) == [3.4]
    b = 1.5
    mu = G.solve_multipliers(G.ExtremalPattern((0.0, b), (2, 1)), 2)
    assert mu[0] == 0.0 and math.isclose(mu[1], 3 * b)
    with pytest.raises(SingularSystem):
        G.solve_multipliers((1.0, 1.0), 2)
    with pytest.raises(SingularSystem):
        G.solve_multipliers((1.0, 2.0), 3)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=1, max_size=5, unique=True))
def test_solve_multipliers_residual(roots):
    k = len(roots)
    mu = G.solve_multipliers(roots, k)
    scale = max(1.0, max(abs(r) for r in roots) ** k)
    assert G.lagrange_residual(roots, mu, k) <= 1e-9 * scale


def test_batch_matches_scalar():
    rng = np.random.default_rng(3)
    for n in (2, 5):
        rows = [traces_from_spectrum(rng.uniform(-3, 3, n), 2 * n).values for _ in range(50)]
        arr = np.array(rows)
        arr[::2, 3] = arr[::2, 1] ** 2 / n * 0.5  # breaks t2^2 <= N t4
        for row, ok in zip(arr, G.cauchy_schwarz_ok_batch(arr, n)):
            assert ok == G.cauchy_schwarz_check(TraceVector(n, tuple(row))).all_satisfied

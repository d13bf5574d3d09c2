import math

import numpy as np
import pytest

from msdstat.errors import ConvergenceError, DomainError
from msdstat.numerics import MonotoneSpline, find_root, integrate, integrate_batch


class TestIntegrate:
    def test_polynomial_exact(self):
        val = integrate(lambda x: x ** 2, 0.0, 1.0)
        assert abs(val - 1.0 / 3.0) < 1e-14

    def test_gaussian_mass(self):
        f = lambda x: np.exp(-0.5 * x ** 2) / math.sqrt(2 * math.pi)
        val = 2.0 * integrate(f, 0.0, 8.5)
        assert abs(val - 1.0) < 1e-12

    def test_oscillatory(self):
        assert abs(integrate(np.sin, 0.0, math.pi) - 2.0) < 1e-12

    def test_integrable_singularity_converges(self):
        # endpoint singularity: nodes are interior, adaptive refinement digs in
        val = integrate(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, tol=1e-7)
        assert abs(val - 2.0) < 1e-6

    def test_singularity_budget_exhaustion(self):
        # without series acceleration the panel budget runs out at tight tol
        with pytest.raises(ConvergenceError):
            integrate(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, tol=1e-12)

    def test_empty_and_invalid_ranges(self):
        assert integrate(np.sin, 2.0, 2.0) == 0.0
        with pytest.raises(DomainError):
            integrate(np.sin, 1.0, 0.0)
        with pytest.raises(DomainError):
            integrate(np.sin, 0.0, math.inf)

    def test_nonfinite_integrand_rejected(self):
        with pytest.raises(DomainError):
            integrate(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)

    def test_interval_budget_exhaustion(self):
        with pytest.raises(ConvergenceError):
            integrate(lambda x: np.sin(1.0 / x), 1e-6, 1.0, tol=1e-13)


class TestIntegrateBatch:
    def test_vector_components(self):
        def f(t):
            return np.stack([t, t ** 2, np.sin(t)], axis=-1)

        val = integrate_batch(f, 0.0, 1.0)
        want = np.array([0.5, 1.0 / 3.0, 1.0 - math.cos(1.0)])
        assert np.max(np.abs(val - want)) < 1e-12

    def test_matches_scalar_rule(self):
        f = lambda t: np.exp(-t)[:, None]
        val = integrate_batch(f, 0.0, 3.0)
        assert abs(float(val[0]) - (1.0 - math.exp(-3.0))) < 1e-12

    def test_node_budget_exhaustion(self):
        with pytest.raises(ConvergenceError):
            integrate_batch(lambda t: np.sin(1e5 / (t + 1e-4)), 0.0, 1.0, tol=1e-12)


class TestFindRoot:
    def test_simple_root(self):
        r = find_root(lambda x: x ** 2 - 2.0, 0.0, 2.0)
        assert abs(r - math.sqrt(2.0)) < 1e-9

    def test_no_sign_change(self):
        with pytest.raises(ConvergenceError):
            find_root(lambda x: x ** 2 + 1.0, -1.0, 1.0)


class TestMonotoneSpline:
    def test_knot_exactness(self):
        t = np.array([0.0, 0.3, 0.5, 0.9, 1.4])
        y = np.array([0.0, 0.2, 0.2, 0.8, 1.0])
        s = MonotoneSpline(t, y)
        for ti, yi in zip(t, y):
            assert s(ti) == yi

    def test_monotone_between_knots(self):
        rng = np.random.default_rng(3)
        t = np.sort(rng.uniform(0, 5, size=12))
        y = np.cumsum(rng.uniform(0, 1, size=12))
        y[4] = y[3]  # flat stretch must stay flat, not overshoot
        y = np.sort(y)
        s = MonotoneSpline(t, y)
        xs = np.linspace(t[0], t[-1], 2000)
        vals = np.array([s(x) for x in xs])
        assert np.all(np.diff(vals) >= -1e-13)
        assert vals.min() >= y[0] - 1e-13 and vals.max() <= y[-1] + 1e-13

    def test_no_local_overshoot(self):
        t = np.array([0.0, 1.0, 2.0, 3.0])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        s = MonotoneSpline(t, y)
        xs = np.linspace(0.0, 3.0, 500)
        vals = np.array([s(x) for x in xs])
        assert vals.min() >= -1e-14 and vals.max() <= 1.0 + 1e-14
        # within each panel the value stays inside the bracketing knot values
        for a, b, ya, yb in zip(t[:-1], t[1:], y[:-1], y[1:]):
            inside = (xs >= a) & (xs <= b)
            assert np.all(vals[inside] >= ya - 1e-14)
            assert np.all(vals[inside] <= yb + 1e-14)

    def test_domain_enforced(self):
        s = MonotoneSpline(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
        with pytest.raises(DomainError):
            s(-0.001)
        with pytest.raises(DomainError):
            s(1.001)

    def test_validation(self):
        good_t = np.array([0.0, 1.0, 2.0])
        good_y = np.array([0.0, 0.5, 1.0])
        with pytest.raises(DomainError):
            MonotoneSpline(np.array([0.0, 0.0, 1.0]), good_y)  # ties in t
        with pytest.raises(DomainError):
            MonotoneSpline(good_t, np.array([0.0, 0.5, 0.4]))  # decreasing y
        with pytest.raises(DomainError):
            MonotoneSpline(good_t, np.array([0.0, 0.5]))  # length mismatch
        with pytest.raises(DomainError):
            MonotoneSpline(np.array([0.0]), np.array([1.0]))  # too few knots
        with pytest.raises(DomainError):
            MonotoneSpline(good_t, np.array([0.0, np.nan, 1.0]))

    def test_scalar_in_scalar_out(self):
        s = MonotoneSpline(np.array([0.0, 2.0]), np.array([1.0, 3.0]))
        out = s(1.0)
        assert isinstance(out, float)
        assert abs(out - 2.0) < 1e-14

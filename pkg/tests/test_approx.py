import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensorhull.approx import (
    ApproximationLadder,
    TruncatedPowerFamily,
    approximation_number,
    greedy_cover_family,
    m_epsilon,
    projection_residual,
    projection_residual2,
    residual_profile,
    truncated_power,
)
from tensorhull.covering import FarthestPointTraversal, fit_slope, function_gram
from tensorhull.errors import CapacityError, DomainError
from tensorhull.exactpoly import DyadicPiecewisePoly, norm2

F = Fraction
dyadic_v = st.integers(0, 1 << 12).map(lambda j: F(j, 1 << 12))


@pytest.fixture(scope="module")
def ladders():
    return {q: ApproximationLadder(q, 6) for q in (1, 2, 3)}


class TestTruncatedPower:
    def test_heaviside_at_zero_is_constant(self):
        assert truncated_power(1, 0).equals(DyadicPiecewisePoly.constant())

    def test_hinge(self):
        h = truncated_power(2, F(1, 2))
        assert h(F(1, 4)) == 0 and h(F(3, 4)) == F(1, 4) and h(1) == F(1, 2)

    def test_norm_below_one_for_q2(self):
        assert norm2(truncated_power(2, 0)) == F(1, 3)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 4), dyadic_v)
    def test_family_norm_formula(self, q, v):
        assert norm2(truncated_power(q, v)) == TruncatedPowerFamily(q).norm2(v)

    @pytest.mark.parametrize("q, v", [(0, 0), (2, F(-1, 2)), (2, F(3, 2)), (2, F(1, 3))])
    def test_domain_errors(self, q, v):
        with pytest.raises(DomainError):
            truncated_power(q, v)

    def test_step_at_one_is_zero_element(self):
        assert truncated_power(1, 1).is_zero()


class TestProjectionResidual:
    def test_element_of_space(self, ladders):
        f = DyadicPiecewisePoly((0, F(1, 4), 1), ((1, 2), (3,)))
        assert projection_residual2(f, ladders[2], 2) == 0

    def test_mid_cell_heaviside(self, ladders):
        v = F(3, 16) + F(1, 32)
        assert projection_residual(truncated_power(1, v), ladders[1], 4) == 0.125

    @pytest.mark.parametrize("t", [F(1, 8), F(1, 4), F(3, 8), F(5, 8)])
    def test_heaviside_closed_form(self, ladders, t):
        # residual**2 = h t (1 - t) for a step at relative position t in a cell of width h
        k = 3
        v = F(2, 8) + t / 8
        assert projection_residual2(truncated_power(1, v), ladders[1], k) == F(1, 8) * t * (1 - t)

    @settings(max_examples=60, deadline=None)
    @given(dyadic_v)
    def test_hinge_certificate(self, v):
        lad = ApproximationLadder(2, 6)
        for k, r2 in enumerate(residual_profile(truncated_power(2, v), lad)):
            assert r2 <= F(1, 3) / 8**k

    def test_against_numeric_projection(self, ladders):
        # float oracle: least squares onto piecewise polynomials on a fine grid
        q, k, v = 2, 2, F(11, 32)
        n = 1 << 14
        x = (np.arange(n) + 0.5) / n
        f = np.maximum(x - float(v), 0.0)
        cells = np.floor(x * (1 << k)).astype(int)
        A = np.zeros((n, q << k))
        for c in range(1 << k):
            for j in range(q):
                A[cells == c, c * q + j] = x[cells == c] ** j
        res = f - A @ np.linalg.lstsq(A, f, rcond=None)[0]
        assert np.mean(res**2) == pytest.approx(float(projection_residual2(truncated_power(q, v), ladders[2], k)), rel=1e-5)

    def test_level_guard(self, ladders):
        with pytest.raises(CapacityError) as err:
            projection_residual2(truncated_power(1, 0), ladders[1], 7)
        assert err.value.parameter == "k"


class TestApproximationNumber:
    def test_level5_midpoints(self, ladders):
        grid = [F(2 * j + 1, 64) for j in range(32)]
        r = approximation_number(ladders[1], 3, grid)
        assert r.delta2 == F(15, 512)
        assert r.bound == pytest.approx(2**-1.5)

    def test_level5_grid_points(self, ladders):
        grid = [F(j, 32) for j in range(33)]
        r = approximation_number(ladders[1], 3, grid)
        assert r.delta == pytest.approx(2**-2.5, abs=1e-15)
        assert r.delta2 == F(1, 32)
        assert r.delta < r.bound

    def test_grid_on_level_points_is_exact(self, ladders):
        r = approximation_number(ladders[2], 3, [F(j, 8) for j in range(9)])
        assert r.delta == 0

    def test_hinge_decay_rate(self, ladders):
        grid = [F(j, 1 << 10) for j in range(0, 1 << 10, 3)]
        deltas = [approximation_number(ladders[2], k, grid).delta for k in range(1, 7)]
        slope = np.polyfit(np.arange(1, 7), np.log2(deltas), 1)[0]
        assert slope == pytest.approx(-1.5, abs=0.1)

    def test_empty_grid(self, ladders):
        with pytest.raises(DomainError):
            approximation_number(ladders[1], 1, [])


class TestMEpsilon:
    def test_heaviside(self, ladders):
        assert m_epsilon(ApproximationLadder(1, 8), F(1, 8)) == (6, 64)

    def test_hinge(self, ladders):
        assert m_epsilon(ladders[2], 0.1) == (2, 8)

    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_large_epsilon(self, ladders, q):
        assert m_epsilon(ladders[q], 1 / math.sqrt(2 * q - 1) + 1e-9) == (0, q)
        assert m_epsilon(ladders[q], 2.0) == (0, q)

    def test_monotone(self, ladders):
        ks = [m_epsilon(ladders[2], 2.0**-t, max_level=30)[0] for t in range(0, 40)]
        assert ks == sorted(ks)

    def test_capacity(self, ladders):
        with pytest.raises(CapacityError) as err:
            m_epsilon(ladders[1], 1e-3)
        assert err.value.required == 20

    def test_nonpositive(self, ladders):
        with pytest.raises(DomainError):
            m_epsilon(ladders[1], 0)


class TestFamilyCovering:
    def test_heaviside_distances_closed_form(self):
        vs = [F(j, 32) for j in range(33)]
        G = function_gram([truncated_power(1, v) for v in vs])
        d2 = np.diag(G)[:, None] + np.diag(G)[None, :] - 2 * G
        gap = np.abs(np.subtract.outer([float(v) for v in vs], [float(v) for v in vs]))
        assert np.allclose(d2, gap)

    def test_heaviside_count_rate(self):
        # ||psi_v - psi_w|| = sqrt|v - w| gives N ~ eps**-2
        vs = np.arange(4097) / 4096
        fpt = FarthestPointTraversal(gram=1 - np.maximum.outer(vs, vs))
        eps = [2.0 ** (-t / 2) for t in range(2, 11)]
        slope = fit_slope(eps, [fpt.count(e) for e in eps])[0]
        assert slope == pytest.approx(2.0, abs=0.25)

    def test_hinge_count_rate(self):
        vs = [F(j, 256) for j in range(256)]
        G = function_gram([truncated_power(2, v) for v in vs])
        fpt = FarthestPointTraversal(gram=G)
        eps = [2.0**-t for t in range(3, 11)]
        slope = fit_slope(eps, [fpt.count(e) for e in eps])[0]
        assert 0.8 <= slope <= 1.2

    def test_greedy_cover_family_report(self):
        rep = greedy_cover_family(2, [F(j, 16) for j in range(17)], 0.05)
        assert rep.radius <= 0.05
        assert len(rep.center_params) == rep.n_centers
        assert all(p in [F(j, 16) for j in range(17)] for p in rep.center_params)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensorhull.errors import CapacityError, DomainError
from tensorhull.hull import (
    DiscreteLadder,
    HullPoint,
    ScalingConfig,
    beta_from_f,
    choose_u,
    covering_estimate,
    discrete_design,
    discrete_tv,
    f_from_beta,
    cell_split_error,
    local_to_global_bound,
    maurey_mse,
    maurey_sparsify,
    qm_norm2,
    sample_hull_betas,
    sample_local_betas,
    scaling_experiment,
    simulate_local_recursion,
    tensor_design,
    two_scale_cover,
    yang_barron_table,
)
from tensorhull.sparsegrid import SparseGridSpace

F = Fraction


class TestDesign:
    def test_hinge_column_shifted(self):
        X = discrete_design(8, 2, exact=True)
        assert X.params[0] == 3
        assert list(X.values[:, 0]) == [F(i - 4, 8) if i >= 3 else 0 for i in range(1, 9)]

    def test_hinge_column_aligned(self):
        X = discrete_design(8, 2, variant="aligned", exact=True)
        assert list(X.values[:, 0]) == [F(i - 2, 8) if i >= 3 else 0 for i in range(1, 9)]

    @pytest.mark.parametrize("q, m", [(1, 16), (1, 256), (2, 16), (2, 256)])
    def test_column_norms(self, q, m):
        X = discrete_design(m, q)
        assert X.norms.max() <= 1 + 1e-12
        # Euclidean norm of stored columns is the Q_m norm of the raw values (up to the rescale)
        raw = np.asarray(X.values, dtype=float)
        assert np.allclose(X.norms**2 * X.scale**2, (raw**2).sum(axis=0) / m)

    def test_heaviside_design_unit_first_column(self):
        X = discrete_design(32, 1)
        assert X.norms[0] == pytest.approx(1.0)

    @pytest.mark.parametrize("m, q, variant", [(3, 1, "shifted"), (16, 3, "shifted"), (16, 2, "other")])
    def test_domain(self, m, q, variant):
        with pytest.raises(DomainError):
            discrete_design(m, q, variant)

    def test_tensor_design(self):
        X = discrete_design(8, 1)
        T = tensor_design(X, 2)
        assert T.columns.shape == (64, 64)
        assert T.norms.max() == pytest.approx(1.0)
        assert T.params[9] == (2, 2) and T.params[10] == (2, 3)

    def test_tensor_design_memory_guard(self, monkeypatch):
        monkeypatch.setenv("TENSORHULL_MAX_ENTRIES", "1000")
        with pytest.raises(CapacityError) as err:
            tensor_design(discrete_design(16, 1), 2)
        assert err.value.parameter == "m"


class TestCellSplitError:
    @pytest.mark.parametrize("variant", ["shifted", "aligned"])
    def test_bound_and_identity(self, variant):
        m = 32
        X = discrete_design(m, 2, variant, exact=True)
        col = {j: X.values[:, n] for n, j in enumerate(X.params)}
        idx = np.arange(1, m + 1)
        for k in range(1, 5):
            for j in range(3, m + 1):
                e, bound, jk = cell_split_error(m, j, k, variant)
                assert qm_norm2(e) <= bound
                if jk <= m and jk >= 3:
                    step = np.where(idx >= jk, F(jk - j, m), F(0))
                    assert all(col[j] - col[jk] - step == e)

    def test_bound_value(self):
        _, bound, _ = cell_split_error(64, 5, 3)
        n = 8
        assert bound == F(n * (n + 1) * (2 * n + 1), 6 * 64**3)

    def test_non_dividing_level(self):
        with pytest.raises(DomainError):
            cell_split_error(24, 5, 4)


class TestTotalVariation:
    def test_linear_sequence(self):
        assert discrete_tv(np.arange(10) * 3.0 + 1) == 0

    def test_aligned_column_is_one_hot(self):
        m = 16
        X = discrete_design(m, 2, "aligned", exact=True)
        for n, j in enumerate(X.params):
            beta = beta_from_f(X.values[:, n])
            assert list(beta) == [1 if l == j else 0 for l in range(3, m + 1)]
            assert discrete_tv(X.values[:, n]) == 1

    def test_shifted_column_total_variation(self):
        X = discrete_design(16, 2, exact=True)
        assert discrete_tv(X.values[:, 4]) == 3

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(0, 20), min_size=14, max_size=14).filter(any))
    def test_unit_nonnegative_combination(self, w):
        m = 16
        X = discrete_design(m, 2, "aligned", exact=True)
        beta = [F(x, sum(w)) for x in w]
        f = X.values @ np.array(beta, dtype=object)
        assert discrete_tv(f) == 1

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.fractions(-5, 5, max_denominator=9), min_size=10, max_size=10))
    def test_round_trip(self, tail):
        f = np.array([F(0), F(0)] + tail, dtype=object)
        assert list(f_from_beta(beta_from_f(f), len(f))) == list(f)

    def test_short_input(self):
        with pytest.raises(DomainError):
            discrete_tv([1.0, 2.0])


@pytest.fixture(scope="module")
def unit_columns():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((16, 32))
    return X / np.linalg.norm(X, axis=0)


class TestMaurey:
    def test_one_hot_is_exact(self, unit_columns):
        beta = np.zeros(32)
        beta[5] = -1.0
        for s in (1, 3, 17):
            hp = maurey_sparsify(unit_columns, beta, s, seed=s)
            assert np.allclose(hp.f, unit_columns @ beta)

    def test_deterministic(self, unit_columns):
        beta = np.full(32, 1 / 40)
        a = maurey_sparsify(unit_columns, beta, 8, seed=3, task=2)
        b = maurey_sparsify(unit_columns, beta, 8, seed=3, task=2)
        c = maurey_sparsify(unit_columns, beta, 8, seed=3, task=3)
        assert np.array_equal(a.beta, b.beta)
        assert not np.array_equal(a.beta, c.beta)

    def test_hull_point_input_and_sparsity(self, unit_columns):
        hp = HullPoint.from_beta(unit_columns, np.full(32, 1 / 32))
        out = maurey_sparsify(unit_columns, hp, 5, seed=0)
        assert np.count_nonzero(out.beta) <= 5
        assert np.abs(out.beta).sum() <= 1 + 1e-12

    def test_domain(self, unit_columns):
        with pytest.raises(DomainError):
            maurey_sparsify(unit_columns, np.full(32, 1 / 32), 0)
        with pytest.raises(DomainError):
            maurey_sparsify(unit_columns, np.full(32, 1 / 16), 2)

    def test_mse_bound_s4(self, unit_columns):
        beta = np.full(32, 1 / 32)
        mean, se = maurey_mse(unit_columns, beta, 4, 10_000, seed=0)
        assert mean <= 1 / 4 + 3 * se

    @pytest.mark.parametrize("normalized", [False, True])
    def test_unbiased(self, unit_columns, normalized):
        beta = np.linspace(-1, 1, 32)
        beta /= 2 * np.abs(beta).sum()
        draws = np.array([maurey_sparsify(unit_columns, beta, 3, seed=1, task=t, normalized=normalized).f
                          for t in range(4000)])
        target = unit_columns @ beta
        se = draws.std(axis=0, ddof=1) / math.sqrt(len(draws))
        assert np.all(np.abs(draws.mean(axis=0) - target) <= 4 * se + 1e-12)

    def test_normalized_error_bound(self, unit_columns):
        beta = np.full(32, 1 / 64)
        errs = [np.sum((maurey_sparsify(unit_columns, beta, 4, seed=2, task=t, normalized=True).f
                        - unit_columns @ beta) ** 2) for t in range(3000)]
        assert np.mean(errs) <= 1 / 4


class TestDiscreteLadder:
    @pytest.mark.parametrize("q", [1, 2])
    def test_orthonormal_nested(self, q):
        L = DiscreteLadder(64, q)
        for K in range(L.max_level + 1):
            B = L.basis(K)
            assert B.shape[1] == q << K
            assert np.allclose(B.T @ B, np.eye(B.shape[1]), atol=1e-10)

    def test_spans_piecewise_polynomials(self):
        L = DiscreteLadder(32, 2)
        B = L.basis(2)
        f = np.concatenate([np.arange(8) * 1.0 + c for c in (0, 5, -1, 2)])
        assert np.allclose(B @ (B.T @ f), f)

    def test_tensor_dimension(self):
        L = DiscreteLadder(16, 1, d=2)
        for K in range(5):
            assert L.basis(K).shape[1] == SparseGridSpace(2, 1, K).dimension

    def test_delta_decreasing(self):
        X = discrete_design(64, 2)
        L = DiscreteLadder(64, 2)
        ds = [L.delta(X.columns, K) for K in range(L.max_level + 1)]
        assert all(a >= b - 1e-12 for a, b in zip(ds, ds[1:]))
        assert ds[-1] < 1e-10


def _local_points(X, beta0, eps, n, seed):
    def step(b):
        gap = np.linalg.norm(X.columns @ (b - beta0))
        return 16 * eps / gap if gap > 0 else 1.0

    return sample_local_betas(beta0, X.p, n, step, seed)


class TestTwoScaleCover:
    def test_eps_equals_u(self):
        X = discrete_design(32, 1)
        L = DiscreteLadder(32, 1)
        K, V, dl = L.smallest_level(X.columns, 0.5)
        cover = two_scale_cover(X, V, dl, dl)
        assert cover.s == 1

    def test_domain(self):
        X = discrete_design(32, 1)
        V = DiscreteLadder(32, 1).basis(2)
        with pytest.raises(DomainError):
            two_scale_cover(X, V, 0.5, 0.4)
        with pytest.raises(DomainError):
            two_scale_cover(X, V, 0.01, 0.02)  # delta(V_2) = 0.35 > u

    @pytest.mark.parametrize("t", [2, 3, 4, 5])
    def test_heaviside_budget_and_coverage(self, t):
        m, eps = 64, 2.0**-t
        X = discrete_design(m, 1)
        u = max(choose_u(eps, 2.0), eps)
        K, V, _ = DiscreteLadder(m, 1).smallest_level(X.columns, u)
        b0 = sample_hull_betas(X.p, 1, seed=t, include_vertices=False)[0]
        cover = two_scale_cover(X, V, eps, u, X.columns @ b0, seed=t)
        assert cover.log_count <= cover.budget
        assert cover.r <= V.shape[1] + 1
        B = _local_points(X, b0, eps, 1000, seed=t)
        worst = 0.0
        for i, b in enumerate(B):
            c, d = cover.center(b, task=i)
            assert d == pytest.approx(np.linalg.norm(c - X.columns @ b), abs=1e-12)
            worst = max(worst, d)
        assert worst <= 4 * eps

    def test_grid_part_error(self):
        X = discrete_design(32, 2)
        V = DiscreteLadder(32, 2).basis(1)
        cover = two_scale_cover(X, V, 0.01, 0.03, np.zeros(32))
        assert cover.r == V.shape[1]
        assert cover.grid_spacing * math.sqrt(cover.r) / 2 <= 0.01


class TestCoveringEstimate:
    def test_single_point(self):
        P = np.ones((1, 4))
        assert covering_estimate(P, 0.1).n_centers == 1
        assert covering_estimate(P, 0.1, "local", 0).n_centers == 1

    def test_local_mode(self):
        P = np.random.default_rng(0).uniform(size=(400, 2))
        rep = covering_estimate(P, 0.2, "local", f0=3)
        near = np.flatnonzero(np.linalg.norm(P - P[3], axis=1) <= 0.2)
        assert set(rep.centers) <= set(near)
        d = np.linalg.norm(P[near][:, None] - P[rep.centers][None], axis=2).min(axis=1)
        assert d.max() <= 0.05 + 1e-12
        assert rep.local_table[0]["n_ball"] == len(near)

    def test_bad_mode(self):
        with pytest.raises(DomainError):
            covering_estimate(np.ones((2, 2)), 0.1, "other")
        with pytest.raises(DomainError):
            covering_estimate(np.ones((2, 2)), 0.1, "local")

    def test_yang_barron_soft_check(self):
        X = discrete_design(256, 1)
        held = total = 0
        for seed in range(3):
            P = sample_hull_betas(X.p, 600, seed) @ X.columns.T
            rows = yang_barron_table(P, [2.0**-t for t in range(1, 6)], n_anchors=16, seed=seed)
            held += sum(r["holds"] for r in rows)
            total += len(rows)
        assert held >= 0.9 * total


class TestLocalToGlobal:
    def test_printed_value(self):
        assert local_to_global_bound(1, 0.5, 0, 1) == 3

    def test_geometric_growth(self):
        for A in (0.5, 1.0):
            ratios = [local_to_global_bound(1, A, 0, K + 1) / local_to_global_bound(1, A, 0, K) for K in range(1, 30)]
            excess = [r - 2 ** (2 * A) for r in ratios]
            assert all(a >= b >= 0 for a, b in zip(excess, excess[1:]))
            assert excess[-1] < 1e-6

    @pytest.mark.parametrize("A", [0.5, 1.0])
    @pytest.mark.parametrize("alpha", [0, 1, 2])
    def test_recursion_from_zero_start(self, A, alpha):
        hs = simulate_local_recursion(1.0, A, alpha, 10, h1=0.0)
        for K, h in enumerate(hs, start=1):
            assert h <= local_to_global_bound(1.0, A, alpha, K) * (1 + 1e-12)

    @pytest.mark.parametrize("A", [0.5, 1.0])
    @pytest.mark.parametrize("alpha", [1, 2])
    def test_recursion_unit_start_with_log_factor(self, A, alpha):
        hs = simulate_local_recursion(1.0, A, alpha, 10, h1=1.0)
        for K, h in enumerate(hs, start=1):
            assert h <= local_to_global_bound(1.0, A, alpha, K)

    def test_recursion_unit_start_without_log_factor_exceeds_by_start_value(self):
        # at alpha = 0 the equality recursion lands exactly h(1) above the bound
        hs = simulate_local_recursion(1.0, 0.5, 0, 10, h1=1.0)
        for K, h in enumerate(hs, start=1):
            assert h == pytest.approx(local_to_global_bound(1.0, 0.5, 0, K) + 1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            local_to_global_bound(1, 0, 0, 1)
        with pytest.raises(DomainError):
            local_to_global_bound(1, 0.5, 0, 0)


class TestScalingExperiment:
    def test_small_run(self):
        r = scaling_experiment(ScalingConfig(q=1, d=1, m=64, samples=200, seed=1))
        assert len(r.rows) >= 4
        Hs = [row["H_bound"] for row in r.rows]
        assert Hs == sorted(Hs)
        assert all(row["H_cover"] <= row["H_bound"] for row in r.rows)
        counts = [row["n_sample"] for row in r.rows]
        assert counts == sorted(counts)
        js = r.to_json()
        assert js["target_exponent"] == pytest.approx(1.0)

    def test_reproducible(self):
        cfg = ScalingConfig(q=2, d=1, m=32, samples=100, seed=4)
        assert scaling_experiment(cfg).to_json() == scaling_experiment(cfg).to_json()

    def test_memory_guard(self, monkeypatch):
        monkeypatch.setenv("TENSORHULL_MAX_ENTRIES", "4096")
        with pytest.raises(CapacityError):
            scaling_experiment(ScalingConfig(q=1, d=2, m=16, samples=10))

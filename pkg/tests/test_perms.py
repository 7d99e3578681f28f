import itertools
import json
import math

import numpy as np
import pytest
from scipy.stats import chisquare

from musielak.convex import luxemburg_norm
from musielak.perms import (
    AverageResult,
    PermutationSampler,
    WeightMatrix,
    ave_l2,
    ave_max_two,
    ave_max_vector,
    build_b_vector,
    dra,
    dra_sum_bound,
    lemma_matrixnorm_check,
    matrix_from_json,
    matrix_norm_a,
    matrix_to_json,
    prefix_sum_system,
)

rng = np.random.default_rng(99)


def random_matrix(n, N=None):
    N = N or n
    return WeightMatrix(np.sort(rng.uniform(0.05, 1, (n, N)), axis=1)[:, ::-1])


def brute_matrix_norm(a: WeightMatrix, x):
    """Max over all budget vectors sum l_i <= N of the prefix-weighted sum."""
    x = np.abs(np.asarray(x, dtype=float))
    n, N = a.n, a.ncols
    prefix = np.concatenate([np.zeros((n, 1)), np.cumsum(a.entries, axis=1)], axis=1)
    best = 0.0
    for ls in itertools.product(range(N + 1), repeat=n):
        if sum(ls) <= N:
            best = max(best, sum(prefix[i, l] * x[i] for i, l in enumerate(ls)))
    return best


class TestDra:
    def test_sorting(self):
        np.testing.assert_array_equal(dra([3, 1, 2]), [3, 2, 1])

    def test_absolute_values(self):
        np.testing.assert_array_equal(dra([-5, 2]), [5, 2])

    def test_permutation_invariance(self):
        v = rng.normal(size=30)
        np.testing.assert_array_equal(dra(v), dra(rng.permutation(v)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dra([])


class TestSampler:
    def test_reproducible(self):
        a = PermutationSampler(123).permutations(6, 50)
        b = PermutationSampler(123).permutations(6, 50)
        np.testing.assert_array_equal(a, b)
        assert np.any(PermutationSampler(124).permutations(6, 50) != a)

    def test_valid_permutations(self):
        perms = PermutationSampler(5).permutations(7, 200)
        np.testing.assert_array_equal(np.sort(perms, axis=1), np.tile(np.arange(7), (200, 1)))

    def test_uniformity_chi_square(self):
        # all 24 permutations of n=4 should be hit uniformly
        draws = PermutationSampler(2718).permutations(4, 24_000)
        codes = draws @ np.array([64, 16, 4, 1])
        _, counts = np.unique(codes, return_counts=True)
        assert len(counts) == 24
        _, pvalue = chisquare(counts)
        assert pvalue > 1e-4

    def test_spawn_independent(self):
        root = PermutationSampler(7)
        a = root.spawn(1).permutations(5, 10)
        b = root.spawn(2).permutations(5, 10)
        assert np.any(a != b)
        np.testing.assert_array_equal(a, PermutationSampler(7).spawn(1).permutations(5, 10))


class TestAveL2:
    def test_constant_matrix(self):
        a = WeightMatrix(np.ones((2, 2)))
        res = ave_l2(a, [1, 1])
        assert res.value == pytest.approx(math.sqrt(2))
        assert res.mode == "exact" and res.stderr == 0.0

    def test_n_equals_one(self):
        a = WeightMatrix(np.array([[0.7]]))
        assert ave_l2(a, [-3.0]).value == pytest.approx(2.1)

    def test_against_exhaustive_oracle(self):
        rows = np.array([[3.0, 2.0, 1.0]] * 3)
        a = WeightMatrix(rows)
        x = np.ones(3)
        expected = np.mean(
            [
                math.sqrt(sum(rows[i, p[i]] ** 2 for i in range(3)))
                for p in itertools.permutations(range(3))
            ]
        )
        assert ave_l2(a, x).value == pytest.approx(expected, rel=1e-14)

    def test_permutation_invariance(self):
        a = random_matrix(5)
        x = rng.normal(size=5)
        sigma = rng.permutation(5)
        b = WeightMatrix(a.entries[sigma])
        assert ave_l2(a, x).value == pytest.approx(ave_l2(b, x[sigma]).value, rel=1e-13)

    def test_exact_limit(self):
        with pytest.raises(ValueError):
            ave_l2(random_matrix(9), np.ones(9), mode="exact")

    def test_monte_carlo_close_to_exact(self):
        a = random_matrix(5)
        x = rng.normal(size=5)
        exact = ave_l2(a, x).value
        res = ave_l2(a, x, mode="monte-carlo", sampler=PermutationSampler(11), samples=20_000)
        assert res.mode == "monte-carlo" and res.stderr > 0
        assert abs(res.value - exact) < 5 * res.stderr


class TestAveMaxTwo:
    def test_single_entry(self):
        assert ave_max_two(np.full((1, 1, 1), -2.5)).value == pytest.approx(2.5)

    def test_constant_cube(self):
        assert ave_max_two(np.full((3, 3, 3), 0.4)).value == pytest.approx(0.4)

    def test_against_pair_enumeration(self):
        n = 3
        a3 = rng.normal(size=(n, n, n))
        vals = []
        for p in itertools.permutations(range(n)):
            for s in itertools.permutations(range(n)):
                vals.append(max(abs(a3[i, p[i], s[i]]) for i in range(n)))
        assert ave_max_two(a3).value == pytest.approx(np.mean(vals), rel=1e-14)

    def test_exact_limit(self):
        with pytest.raises(ValueError):
            ave_max_two(np.ones((6, 6, 6)))

    def test_monte_carlo(self):
        a3 = rng.normal(size=(4, 4, 4))
        exact = ave_max_two(a3).value
        res = ave_max_two(a3, mode="monte-carlo", sampler=PermutationSampler(3), samples=20_000)
        assert abs(res.value - exact) < 5 * res.stderr


class TestDraSumBound:
    def test_constant(self):
        assert dra_sum_bound(np.full((3, 3, 3), 1.7)) == pytest.approx(1.7)

    def test_single(self):
        assert dra_sum_bound(np.full((1, 1, 1), -3.0)) == pytest.approx(3.0)

    def test_top_four(self):
        a3 = np.array([8.0, 7, 6, 5, 4, 3, 2, 1]).reshape(2, 2, 2)
        assert dra_sum_bound(a3) == pytest.approx(6.5)


class TestMatrixNorm:
    def test_single_row(self):
        a = WeightMatrix(np.array([[3.0, 1.0]]))
        assert matrix_norm_a(a, [2.0]) == pytest.approx(8.0)

    def test_zero_vector(self):
        assert matrix_norm_a(random_matrix(3), np.zeros(3)) == 0.0

    def test_budget_split(self):
        a = WeightMatrix(np.array([[2.0, 1.0], [3.0, 1.0]]))
        assert matrix_norm_a(a, [1.0, 1.0]) == pytest.approx(5.0)
        assert matrix_norm_a(a, [1.0, 1.0]) == pytest.approx(brute_matrix_norm(a, [1, 1]))

    def test_greedy_equals_brute_force(self):
        for _ in range(100):
            n = rng.integers(1, 5)
            N = rng.integers(n, 5)
            a = random_matrix(n, N)
            x = rng.normal(size=n)
            assert matrix_norm_a(a, x) == pytest.approx(brute_matrix_norm(a, x), rel=1e-13)

    def test_norm_axioms(self):
        a = random_matrix(4)
        for _ in range(50):
            x, y = rng.normal(size=4), rng.normal(size=4)
            lam = rng.uniform(0.1, 5)
            assert matrix_norm_a(a, lam * x) == pytest.approx(lam * matrix_norm_a(a, x), rel=1e-13)
            assert matrix_norm_a(a, x + y) <= matrix_norm_a(a, x) + matrix_norm_a(a, y) + 1e-12


class TestSandwich:
    def test_zero_vector(self):
        rep = lemma_matrixnorm_check(random_matrix(3), np.zeros(3))
        assert rep.passed and rep.value == 0.0

    def test_one_by_one_against_scan(self):
        # n = N = 1: both norms equal a11 |x1|; confirm the Luxemburg side
        # with a fine rho scan
        a = WeightMatrix(np.array([[0.8]]))
        system = prefix_sum_system(a)
        x = [1.3]
        rhos = np.arange(1e-3, 3.0, 1e-6)
        with np.errstate(over="ignore"):
            sums = system[0](1.3 / rhos)
        scan = rhos[sums <= 1][0]
        assert luxemburg_norm(system, x) == pytest.approx(scan, abs=2e-6)
        assert luxemburg_norm(system, x) == pytest.approx(0.8 * 1.3, rel=1e-9)
        assert lemma_matrixnorm_check(a, x).passed

    def test_random_instances(self):
        for _ in range(100):
            n = rng.integers(1, 5)
            a = random_matrix(n, rng.integers(n, 6))
            rep = lemma_matrixnorm_check(a, rng.normal(size=n))
            assert rep.passed


class TestBVector:
    def test_n4(self):
        np.testing.assert_allclose(build_b_vector(4), [2, math.sqrt(2), 2 / math.sqrt(3), 1])

    def test_n1(self):
        np.testing.assert_allclose(build_b_vector(1), [1.0])

    def test_shape_properties(self):
        for n in range(1, 10):
            b = build_b_vector(n)
            assert np.all(b >= 1) and b[0] == pytest.approx(math.sqrt(n))
            assert np.all(np.diff(b) <= 0)


class TestAveMaxVector:
    def test_n1(self):
        assert ave_max_vector([2.0], [-1.5]).value == pytest.approx(3.0)

    def test_two_permutations(self):
        res = ave_max_vector(build_b_vector(2), [1.0, 0.0])
        assert res.value == pytest.approx((math.sqrt(2) + 1) / 2)

    def test_against_exhaustive_oracle(self):
        n = 5
        b = build_b_vector(n)
        y = rng.normal(size=n)
        expected = np.mean(
            [max(abs(y[k] * b[p[k]]) for k in range(n)) for p in itertools.permutations(range(n))]
        )
        assert ave_max_vector(b, y).value == pytest.approx(expected, rel=1e-14)

    def test_l2_equivalence_band(self):
        # Ave_sigma max |y_k b_sigma(k)| stays within fixed factors of ||y||_2
        ratios = []
        for n in range(2, 8):
            b = build_b_vector(n)
            for _ in range(50):
                y = rng.normal(size=n)
                ratios.append(ave_max_vector(b, y).value / np.linalg.norm(y))
        assert 0.3 < min(ratios) and max(ratios) < 3.0


class TestSerialization:
    def test_matrix_roundtrip(self):
        a = random_matrix(3, 5)
        b = matrix_from_json(matrix_to_json(a))
        np.testing.assert_array_equal(a.entries, b.entries)

    def test_average_result_json(self):
        doc = json.loads(AverageResult(1.5, "exact", 24).to_json())
        assert doc == {"value": 1.5, "mode": "exact", "samples": 24, "stderr": 0.0}

    def test_invalid_matrix_rejected(self):
        with pytest.raises(ValueError, match="row 1"):
            WeightMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
        with pytest.raises(ValueError, match="row 0"):
            WeightMatrix(np.array([[1.0, -1.0]]))

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from mode_quest import constrained_mle, log_multinomial_beta_ratio, z_ab, z_stat, z_tilde_ab
from mode_quest.identityless import top_two, z_path, z_tilde_path
from mode_quest.oracle import (brute_max_min, grid_constrained_mle, loglik,
                               numeric_dirichlet_avg, z_ab_reference)

counts_strategy = st.lists(st.integers(0, 30), min_size=2, max_size=6).filter(lambda c: sum(c) > 0)


class TestBetaRatio:
    @pytest.mark.parametrize("counts, expect", [
        ([0, 0], 0.0),
        ([2, 0], math.log(1 / 3)),
        ([3, 1], math.log(6 / 120)),
    ])
    def test_hand_values(self, counts, expect):
        assert math.isclose(log_multinomial_beta_ratio(counts), expect, abs_tol=1e-12)

    @pytest.mark.parametrize("counts", [[2, 0], [1, 1, 1], [3, 0, 2], [4, 1]])
    def test_matches_quadrature(self, counts):
        ref = math.log(numeric_dirichlet_avg(counts))
        assert math.isclose(log_multinomial_beta_ratio(counts), ref, abs_tol=1e-9)

    def test_row_wise(self):
        rows = np.array([[2, 0], [3, 1]])
        np.testing.assert_allclose(log_multinomial_beta_ratio(rows),
                                   [math.log(1 / 3), math.log(0.05)])


class TestPairStatistic:
    def test_hand_values(self):
        assert math.isclose(z_ab([2, 0], 0, 1), math.log(1 / 3) + 2 * math.log(2), abs_tol=1e-12)
        assert math.isclose(z_ab([2, 0], 1, 0), math.log(1 / 3), abs_tol=1e-12)

    def test_symmetric_state(self):
        assert math.isclose(z_ab([1, 1], 0, 1), z_ab([1, 1], 1, 0))

    def test_same_pair_rejected(self):
        with pytest.raises(ValueError):
            z_ab([1, 2], 1, 1)

    def test_against_quadrature_and_grid(self, rng):
        for _ in range(15):
            K = int(rng.integers(2, 4))
            counts = rng.integers(0, 8, size=K)
            counts[0] += 1
            a, b = rng.choice(K, size=2, replace=False)
            ref = z_ab_reference(counts, a, b)
            # grid points can only undershoot the constrained maximum
            assert z_ab(counts, a, b) <= ref + 1e-9
            assert z_ab(counts, a, b) == pytest.approx(ref, abs=1e-6)

    @settings(max_examples=200, deadline=None)
    @given(counts_strategy, st.data())
    def test_swap_never_helps(self, counts, data):
        K = len(counts)
        a = data.draw(st.integers(0, K - 1))
        b = data.draw(st.integers(0, K - 1).filter(lambda x: x != a))
        if counts[a] >= counts[b]:
            assert z_ab(counts, b, a) <= z_ab(counts, a, b) + 1e-12


class TestConstrainedMle:
    def test_kkt_examples(self):
        np.testing.assert_allclose(constrained_mle([2, 0], 0, 1), [0.5, 0.5])
        np.testing.assert_allclose(constrained_mle([1, 3], 0, 1), [0.25, 0.75])
        np.testing.assert_allclose(constrained_mle([3, 1, 4], 2, 0), [7 / 16, 1 / 8, 7 / 16])

    def test_grid_cannot_beat_it(self, rng):
        for _ in range(20):
            K = int(rng.integers(2, 4))
            counts = rng.integers(0, 10, size=K)
            counts[-1] += 1
            a, b = rng.choice(K, size=2, replace=False)
            p = constrained_mle(counts, a, b)
            assert p[a] <= p[b] + 1e-15 and math.isclose(p.sum(), 1.0)
            _, best = grid_constrained_mle(counts, a, b, step=1e-2)
            assert best <= loglik(counts, p) + 1e-9


class TestStatistic:
    def test_two_community_example(self):
        rep = z_stat(np.array([2, 0]))
        assert (rep.a_hat, rep.b_hat) == (0, 1)
        assert rep.z == pytest.approx(0.287682, abs=1e-6)

    def test_ties_pick_lowest_indices(self):
        rep = z_stat(np.array([4, 4, 4, 4]))
        assert (rep.a_hat, rep.b_hat) == (0, 1)
        assert rep.z == pytest.approx(z_ab([4, 4, 4, 4], 0, 1))

    def test_top_two_row_wise(self):
        a, b = top_two(np.array([[1, 5, 5], [7, 0, 3]]))
        assert a.tolist() == [1, 0] and b.tolist() == [2, 2]

    def test_matches_pair_enumeration(self, rng):
        for _ in range(50):
            K = int(rng.integers(2, 6))
            counts = rng.integers(0, 25, size=K)
            counts[rng.integers(K)] += 1
            ref = brute_max_min(lambda a, b: z_ab(counts, a, b), K)
            assert z_stat(counts).z == pytest.approx(ref, abs=1e-10)

    def test_per_pair_report(self):
        rep = z_stat(np.array([3, 1, 2]), per_pair=True)
        assert len(rep.per_pair) == 6
        assert rep.per_pair[(0, 2)] == pytest.approx(z_ab([3, 1, 2], 0, 2))

    def test_path_agrees_with_scalar(self, rng):
        counts = np.cumsum(np.eye(4, dtype=int)[rng.integers(0, 4, size=60)], axis=0)
        z, a, _ = z_path(counts)
        for row, zi, ai in zip(counts, z, a):
            rep = z_stat(row)
            assert zi == pytest.approx(rep.z, abs=1e-12) and ai == rep.a_hat


class TestOneVsOne:
    def test_hand_values(self):
        assert z_tilde_ab(0, 0) == 0.0
        assert z_tilde_ab(3, 1) == pytest.approx(math.log(1 / 20) + 4 * math.log(2), abs=1e-12)
        assert z_tilde_ab(np.array([3, 0, 1]), 0, 2) == pytest.approx(z_tilde_ab(3, 1))

    def test_symmetric(self):
        assert z_tilde_ab(6, 6) == z_tilde_ab(np.array([6, 6]), 1, 0)

    @settings(max_examples=300, deadline=None)
    @given(counts_strategy)
    def test_dominates_full_statistic(self, counts):
        counts = np.array(counts)
        zt, _, _ = z_tilde_path(counts)
        z, _, _ = z_path(counts)
        assert zt[0] >= z[0] - 1e-10

    def test_closed_form(self):
        na, nb = 11, 4
        expect = gammaln(na + 1) + gammaln(nb + 1) - gammaln(na + nb + 2) + (na + nb) * math.log(2)
        assert z_tilde_ab(na, nb) == pytest.approx(expect)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit

from esbacktest.measures import Empirical, Normal, es_of, var_of
from esbacktest.scoring import (
    GChoice,
    ScoringSpec,
    expected_score,
    expected_score_grid,
    grid_axis,
    mean_score,
    score_series,
    score_var,
    score_var_es,
    verify_elicitability,
)

import oracles

LOGISTIC = ScoringSpec(0.025, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)

G_FUNCS = {
    GChoice.IDENTITY: (lambda x: x, lambda x: 0.5 * x * x),
    GChoice.EXPONENTIAL: (math.exp, math.exp),
    GChoice.BOUNDED_LOGISTIC: (
        lambda x: 1.0 / (1.0 + math.exp(-x)),
        lambda x: math.log1p(math.exp(x)),
    ),
}


class TestGChoice:
    grid = np.linspace(-30, 30, 2001)

    @pytest.mark.parametrize("g", [GChoice.IDENTITY, GChoice.EXPONENTIAL, GChoice.BOUNDED_LOGISTIC])
    def test_strictly_increasing(self, g):
        values = g.g(np.linspace(-10, 10, 2001))
        assert np.all(np.diff(values) > 0)

    @pytest.mark.parametrize("g", [GChoice.EXPONENTIAL, GChoice.BOUNDED_LOGISTIC])
    def test_vanishes_at_minus_infinity(self, g):
        assert g.g(-40.0) < 1e-15

    @pytest.mark.parametrize("g", list(GChoice))
    def test_antiderivative(self, g):
        xs = np.linspace(-8, 8, 161)
        h = 1e-5
        fd = (g.antiderivative(xs + h) - g.antiderivative(xs - h)) / (2 * h)
        np.testing.assert_allclose(fd, g.g(xs), atol=1e-6, rtol=1e-6)

    def test_logistic_antiderivative_does_not_overflow(self):
        assert GChoice.BOUNDED_LOGISTIC.antiderivative(800.0) == pytest.approx(800.0)


class TestScoringSpec:
    def test_rejects_zero_g1(self):
        with pytest.raises(ValueError):
            ScoringSpec(0.1, g1=GChoice.ZERO)

    def test_rejects_identity_g2(self):
        with pytest.raises(ValueError):
            ScoringSpec(0.1, g2=GChoice.IDENTITY)

    def test_accepts_string_choices(self):
        spec = ScoringSpec(0.1, "identity", "logistic")
        assert spec.g2 is GChoice.BOUNDED_LOGISTIC

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            ScoringSpec(1.0)


class TestScoreVar:
    def test_zero_at_realization(self):
        assert score_var(GChoice.IDENTITY, 0.05, 1.0, 1.0) == 0.0

    def test_hit(self):
        assert score_var(GChoice.IDENTITY, 0.25, 2.0, 1.0) == 0.75

    def test_miss(self):
        assert score_var(GChoice.IDENTITY, 0.25, 0.0, 1.0) == 0.25

    @pytest.mark.parametrize("v,x", [(2.0, 1.0), (0.0, 1.0), (-3.0, -3.5), (0.7, 0.7)])
    def test_identity_is_pinball_loss(self, v, x):
        alpha = 0.25
        pinball = max(alpha * (x - v), (alpha - 1.0) * (x - v))
        assert score_var(GChoice.IDENTITY, alpha, v, x) == pytest.approx(pinball)


class TestScoreVarEs:
    def test_zero_g2_at_realization(self):
        spec = ScoringSpec(0.3, GChoice.IDENTITY, GChoice.ZERO)
        assert score_var_es(spec, 1.0, -5.0, 1.0) == 0.0

    def test_exponential_origin(self):
        spec = ScoringSpec(0.5, GChoice.IDENTITY, GChoice.EXPONENTIAL)
        assert score_var_es(spec, 0.0, 0.0, 0.0) == -1.0

    def test_no_hit_reduces_to_e_terms(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            v, e = rng.normal(size=2)
            x = v + rng.exponential() + 1e-9
            # the quantile part keeps -alpha * (v - x) even without a hit
            expected = -0.025 * (v - x) + expit(e) * (e - v) - math.log1p(math.exp(e))
            assert score_var_es(LOGISTIC, v, e, x) == pytest.approx(expected, rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("g1", [GChoice.IDENTITY, GChoice.EXPONENTIAL, GChoice.BOUNDED_LOGISTIC])
    @pytest.mark.parametrize("g2", [GChoice.EXPONENTIAL, GChoice.BOUNDED_LOGISTIC])
    def test_matches_hand_evaluation(self, g1, g2):
        rng = np.random.default_rng(11)
        f1, _ = G_FUNCS[g1]
        f2, big_f2 = G_FUNCS[g2]
        for _ in range(300):
            alpha = rng.uniform(0.01, 0.99)
            v, e, x = rng.normal(scale=2.0, size=3)
            spec = ScoringSpec(alpha, g1, g2)
            assert score_var_es(spec, v, e, x) == pytest.approx(
                oracles.joint_score_by_hand(alpha, f1, f2, big_f2, v, e, x), rel=1e-11, abs=1e-12
            )

    def test_broadcasts(self):
        x = np.linspace(-3, 3, 7)
        out = score_var_es(LOGISTIC, -1.9, -2.3, x)
        assert out.shape == (7,)
        assert out[3] == score_var_es(LOGISTIC, -1.9, -2.3, 0.0)

    def test_first_summand_only_depends_on_v(self):
        # without a hit, changing v shifts the difference by -G2(e) * dv
        rng = np.random.default_rng(5)
        for _ in range(100):
            e = rng.normal()
            v1, v2 = rng.uniform(-3, -1, size=2)
            x = rng.uniform(0, 2)
            diff = [
                score_var_es(LOGISTIC, v, e, x) - score_var(GChoice.IDENTITY, 0.025, v, x)
                for v in (v1, v2)
            ]
            assert diff[0] - diff[1] == pytest.approx(-expit(e) * (v1 - v2), abs=1e-12)


@settings(max_examples=500, deadline=None)
@given(
    v=st.floats(-1e3, 1e3),
    e=st.floats(-1e3, 1e3),
    x=st.floats(-1e3, 1e3),
    alpha=st.floats(1e-4, 1 - 1e-4),
    g1=st.sampled_from([GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC]),
)
def test_zero_g2_reduction_is_exact(v, e, x, alpha, g1):
    spec = ScoringSpec(alpha, g1, GChoice.ZERO)
    a = score_var_es(spec, v, e, x)
    b = score_var(g1, alpha, v, x)
    assert np.float64(a).tobytes() == np.float64(b).tobytes()


class TestMeanScore:
    def test_single_period(self):
        assert mean_score(LOGISTIC, [(-2.0, -2.5)], [-2.2]) == score_var_es(LOGISTIC, -2.0, -2.5, -2.2)

    def test_constant_periods(self):
        s = mean_score(LOGISTIC, [(-2.0, -2.5)] * 250, [-2.2] * 250)
        assert s == pytest.approx(score_var_es(LOGISTIC, -2.0, -2.5, -2.2), rel=1e-14)

    def test_matches_naive_sum(self):
        rng = np.random.default_rng(2)
        f = rng.normal(size=(10, 2))
        x = rng.normal(size=10)
        total = 0.0
        for (v, e), xi in zip(f, x):
            total += score_var_es(LOGISTIC, v, e, xi)
        assert mean_score(LOGISTIC, f, x) == pytest.approx(total / 10, rel=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            mean_score(LOGISTIC, [(0.0, -1.0)] * 3, [0.0] * 4)

    def test_series_exposed(self):
        s = score_series(LOGISTIC, [(0.0, -1.0), (0.5, -0.5)], [1.0, -1.0])
        assert s.shape == (2,)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(9)
        f = rng.normal(size=(50, 2))
        x = rng.normal(size=50)
        perm = rng.permutation(50)
        assert mean_score(LOGISTIC, f[perm], x[perm]) == pytest.approx(mean_score(LOGISTIC, f, x), rel=1e-13)


class TestExpectedScore:
    def test_two_point_exact(self):
        spec = ScoringSpec(0.5, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)
        # atom -1 is a hit with v - x = 0; atom 1 contributes -0.5 * (-2)
        expected = 0.5 * 1.0 - math.log1p(math.exp(-1.0))
        assert expected_score(spec, Empirical([-1.0, 1.0]), -1.0, -1.0) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("g2", [GChoice.BOUNDED_LOGISTIC, GChoice.EXPONENTIAL])
    @pytest.mark.parametrize(
        "mu,sigma,v,e",
        [(0.0, 1.0, -1.96, -2.34), (0.0, 1.0, 0.5, -3.0), (1.0, 2.0, -0.3, -1.1), (-2.0, 0.5, -4.5, -5.0)],
    )
    def test_normal_quadrature_matches_closed_form(self, g2, mu, sigma, v, e):
        spec = ScoringSpec(0.025, GChoice.IDENTITY, g2)
        f2, big_f2 = G_FUNCS[g2]
        expected = oracles.normal_expected_score_identity(0.025, f2, big_f2, mu, sigma, v, e)
        assert expected_score(spec, Normal(mu, sigma), v, e) == pytest.approx(expected, abs=1e-8)

    def test_empirical_matches_average_of_scores(self):
        sample = [-1.3, 0.2, 0.2, 2.5, -0.4]
        spec = ScoringSpec(0.3, GChoice.EXPONENTIAL, GChoice.EXPONENTIAL)
        got = expected_score(spec, Empirical(sample), -0.4, -1.0)
        want = np.mean([score_var_es(spec, -0.4, -1.0, x) for x in sample])
        assert got == pytest.approx(want, abs=1e-14)

    def test_zero_g2_independent_of_e(self):
        spec = ScoringSpec(0.1, GChoice.IDENTITY, GChoice.ZERO)
        for dist in (Normal(0.2, 1.5), Empirical([0, 1, 2])):
            values = {expected_score(spec, dist, -0.5, e) for e in (-3.0, 0.0, 7.0)}
            assert len(values) == 1

    def test_grid_agrees_with_pointwise(self):
        dist = Normal(0.0, 1.0)
        vs, es = np.array([-2.0, -1.5]), np.array([-2.5, -2.0, -1.0])
        grid = expected_score_grid(LOGISTIC, dist, vs, es)
        for i, v in enumerate(vs):
            for j, e in enumerate(es):
                assert grid[i, j] == pytest.approx(expected_score(LOGISTIC, dist, v, e), abs=1e-12)


class TestElicitability:
    def test_normal_logistic_argmin(self):
        axis = grid_axis(-4.0, 0.0, 0.01)
        check = verify_elicitability(LOGISTIC, Normal(0.0, 1.0), axis)
        assert check.true_pair[0] == pytest.approx(-1.95996398454005, abs=1e-12)
        assert check.true_pair[1] == pytest.approx(-2.33780279220141, abs=1e-12)
        assert check.gap <= 0.01

    def test_shift_moves_var_argmin(self):
        axis = grid_axis(-4.0, 0.0, 0.01)
        base = verify_elicitability(LOGISTIC, Normal(0.0, 1.0), axis)
        shifted = verify_elicitability(LOGISTIC, Normal(1.0, 1.0), axis + 1.0)
        assert shifted.argmin[0] == pytest.approx(base.argmin[0] + 1.0, abs=1e-9)

    def test_four_point_sample(self):
        # alpha * n = 3 / 2 keeps the quantile unique
        spec = ScoringSpec(0.375, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)
        dist = Empirical([-2.0, -0.5, 1.0, 3.0])
        axis = grid_axis(-3.0, 3.0, 0.05)
        check = verify_elicitability(spec, dist, axis, include_truth=True)
        assert check.argmin == check.true_pair
        assert check.true_pair == (var_of(dist, 0.375), es_of(dist, 0.375))

    def test_strictness_away_from_truth(self):
        dist = Normal(0.0, 1.0)
        axis = grid_axis(-4.0, 0.0, 0.05)
        scores = expected_score_grid(LOGISTIC, dist, axis, axis)
        tv, te = var_of(dist, 0.025), es_of(dist, 0.025)
        true_score = expected_score(LOGISTIC, dist, tv, te)
        far = np.maximum(np.abs(axis[:, None] - tv), np.abs(axis[None, :] - te)) > 0.1
        assert np.min(scores[far]) - true_score > 1e-10


def _vectorized_brute_force(alpha, sample, vs, es):
    """Grid of mean joint scores (identity/logistic), written out from the formula."""
    xs = np.asarray(sample)[None, None, :]
    v = vs[:, None, None]
    e = es[None, :, None]
    hit = (xs <= v).astype(float)
    g2 = 1.0 / (1.0 + np.exp(-e))
    s = (hit - alpha) * (v - xs) + g2 * hit * (v - xs) / alpha + g2 * (e - v) - np.log1p(np.exp(e))
    return s.mean(axis=2)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.025])
def test_consistency_on_small_empirical_distributions(alpha):
    rng = np.random.default_rng(int(alpha * 1000))
    spec = ScoringSpec(alpha, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)
    pool = np.round(rng.uniform(-3, 3, size=40), 2)
    for _ in range(8):
        atoms = rng.choice(pool, size=int(rng.integers(1, 9)), replace=False)
        if alpha == 0.025:
            counts = rng.multinomial(40 - atoms.size, np.ones(atoms.size) / atoms.size) + 1
            sample = np.repeat(atoms, counts)
        else:
            sample = atoms
        dist = Empirical(sample)
        axis_v = np.union1d(grid_axis(-3.5, 3.5, 0.07), [var_of(dist, alpha)])
        axis_e = np.union1d(grid_axis(-3.5, 3.5, 0.07), [es_of(dist, alpha)])
        assert axis_v.size * axis_e.size >= 10_000
        check = verify_elicitability(spec, dist, axis_v, axis_e)
        assert check.truth_attains_minimum
        brute = _vectorized_brute_force(alpha, dist.sample, axis_v, axis_e)
        np.testing.assert_allclose(check.scores, brute, atol=1e-12)
        i = np.searchsorted(axis_v, check.true_pair[0])
        j = np.searchsorted(axis_e, check.true_pair[1])
        assert brute[i, j] <= brute.min() + 1e-12

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from edgerecon.estimators import (
    BayesDegreeEstimator,
    BayesTriangleEstimator,
    MMEDegreeEstimator,
    MMETriangleEstimator,
    bayes_degree,
    bayes_edge_triangles,
    bayes_total_triangles,
    bianconi_triangle_estimate,
    mme_degree,
    mme_edge_triangles,
    mme_total_triangles,
)
from edgerecon.exceptions import EstimationError, ParameterError
from edgerecon.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    degree_histogram,
    generate_er,
    path_graph,
    star_graph,
)
from edgerecon.priors import DiscretePrior, poisson_triangle_prior, true_prior_triangles
from edgerecon.sampling import edge_sample, restrict_to_edges
from edgerecon.theory import variance_mme_total


def whole(g, p):
    """Treat all of ``g`` as if it were an edge sample at rate ``p``."""
    return restrict_to_edges(g, np.arange(g.n_edges), p)


def rational_posterior(x_obs, prior, q):
    num = den = Fraction(0)
    for x, w in prior.items():
        if x < x_obs:
            continue
        term = math.comb(x, x_obs) * (1 - q) ** x * Fraction(w)
        num += x * term
        den += term
    return num / den


class TestMME:
    def test_degree_examples(self):
        s = whole(star_graph(3), 0.5)
        est = mme_degree(s)
        assert est.estimates[0] == 6.0
        assert est.kind == "degree" and est.method == "mme"

    def test_degree_p_one(self, er_small):
        s = edge_sample(er_small, 1.0, seed=0)
        np.testing.assert_array_equal(mme_degree(s).estimates, er_small.degrees)

    def test_degree_unbiased_k10(self):
        g, p, R = complete_graph(10), 0.4, 2000
        vals = []
        for r in range(R):
            s = edge_sample(g, p, seed=r)
            hit = np.flatnonzero(s.parent_node_of == 0)
            vals.append(mme_degree(s).estimates[hit[0]] if hit.size else 0.0)
        se = math.sqrt(9 * (1 - p) / p / R)
        assert abs(np.mean(vals) - 9) < 3 * se

    def test_edge_triangle_examples(self):
        s = whole(complete_graph(3), 0.1)
        np.testing.assert_allclose(mme_edge_triangles(s).estimates, [100.0] * 3)
        s = whole(path_graph(3), 0.1)
        np.testing.assert_array_equal(mme_edge_triangles(s).estimates, [0.0, 0.0])

    def test_edge_triangles_conditionally_unbiased_k4(self):
        g, p = complete_graph(4), 0.5
        vals = []
        for r in range(6000):
            s = edge_sample(g, p, seed=r)
            hit = np.flatnonzero(s.parent_edge_of == 0)
            if hit.size:
                vals.append(mme_edge_triangles(s).estimates[hit[0]])
        vals = np.array(vals)
        # T'_l | retained ~ Bin(2, p^2), so Var(T'_l / p^2) = 2 (1 - p^2) / p^2
        se = math.sqrt(2 * (1 - p * p) / p**2 / len(vals))
        assert abs(vals.mean() - 2) < 3 * se

    def test_total_p_one_and_empty(self, er_small):
        s = edge_sample(er_small, 1.0, seed=0)
        assert mme_total_triangles(s).value == er_small.triangles.total
        empty = restrict_to_edges(er_small, [], 0.3)
        assert mme_total_triangles(empty).value == 0.0

    def test_total_unbiased_k4(self):
        g, p, R = complete_graph(4), 0.5, 10_000
        vals = np.array([mme_total_triangles(edge_sample(g, p, seed=r)).value for r in range(R)])
        se = math.sqrt(variance_mme_total(g, p) / R)
        assert abs(vals.mean() - 4) < 3 * se


class TestBayesDegree:
    def test_point_mass(self):
        s = whole(star_graph(3), 0.3)
        est = bayes_degree(s, DiscretePrior.point_mass(7))
        np.testing.assert_allclose(est.estimates, 7.0)

    def test_uniform_prior_p_one(self, er_small):
        s = edge_sample(er_small, 1.0, seed=0)
        K = int(er_small.degrees.max()) + 5
        prior = DiscretePrior.from_weights(np.arange(K + 1), np.ones(K + 1))
        np.testing.assert_allclose(bayes_degree(s, prior).estimates, s.degrees)

    def test_two_point_prior_rational(self):
        s = whole(path_graph(3), 0.5)  # middle node has k' = 2
        prior = DiscretePrior.from_weights([3, 8], [1, 1])
        got = bayes_degree(s, prior).estimates[1]
        exact = rational_posterior(2, {3: Fraction(1, 2), 8: Fraction(1, 2)}, Fraction(1, 2))
        assert got == pytest.approx(float(exact), rel=1e-12)
        # C(3,2)/8 = 3/8 vs C(8,2)/256 = 28/256, so (3*96 + 8*28) / (96 + 28)
        assert float(exact) == pytest.approx((3 * 96 + 8 * 28) / (96 + 28))

    def test_zero_mass_names_node(self):
        g = Graph.from_edges(3, [(0, 1), (0, 2)], labels=["hub", "x", "y"])
        with pytest.raises(EstimationError, match="hub"):
            bayes_degree(whole(g, 0.5), DiscretePrior.point_mass(1))


class TestBayesTriangles:
    def test_point_mass(self):
        s = whole(complete_graph(4), 0.4)
        np.testing.assert_allclose(bayes_edge_triangles(s, DiscretePrior.point_mass(5)).estimates, 5.0)

    def test_poisson_shrinkage_for_zero(self):
        g = path_graph(6)
        lam = 0.3
        support = np.arange(30)
        prior = DiscretePrior.from_weights(support, [lam**t / math.factorial(t) for t in support])
        est = bayes_edge_triangles(whole(g, 0.5), prior).estimates
        assert np.all((est > 0) & (est < lam))
        # Poisson thinning: posterior mean given 0 is lam (1 - p^2)
        assert est[0] == pytest.approx(lam * 0.75, rel=1e-12)

    def test_two_point_prior_rational(self):
        s = whole(complete_graph(3), 0.5)  # each edge has t' = 1
        prior = DiscretePrior.from_weights([1, 4], [1, 1])
        got = bayes_edge_triangles(s, prior).estimates[0]
        exact = rational_posterior(1, {1: Fraction(1, 2), 4: Fraction(1, 2)}, Fraction(1, 4))
        assert got == pytest.approx(float(exact), rel=1e-12)

    def test_zero_mass_names_edge(self):
        g = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)], labels=["a", "b", "c"])
        with pytest.raises(EstimationError, match="edge"):
            bayes_edge_triangles(whole(g, 0.5), DiscretePrior.point_mass(0))

    def test_total_p_one_true_prior(self, er_small):
        s = edge_sample(er_small, 1.0, seed=0)
        got = bayes_total_triangles(s, true_prior_triangles(er_small)).value
        assert got == pytest.approx(er_small.triangles.total, rel=1e-12)

    def test_total_empty(self, er_small):
        empty = restrict_to_edges(er_small, [], 0.3)
        assert bayes_total_triangles(empty, DiscretePrior.point_mass(1)).value == 0.0

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.6])
    def test_poisson_total_overlays_mme(self, p):
        g = generate_er(1000, 10000, seed=2)
        s = edge_sample(g, p, seed=1)
        bayes = bayes_total_triangles(s, poisson_triangle_prior(s)).value
        mme = mme_total_triangles(s).value
        assert bayes == pytest.approx(mme, rel=1e-6)


class TestPosteriorProperties:
    @settings(max_examples=60, deadline=None)
    @given(
        weights=st.lists(st.integers(0, 20), min_size=2, max_size=25).filter(lambda w: sum(w) > 0),
        p=st.floats(0.05, 1.0),
    )
    def test_monotone_and_bounded(self, weights, p):
        support = np.arange(len(weights))
        prior = DiscretePrior.from_weights(support, weights)
        model = BayesDegreeEstimator(p=p, prior=prior).fit([0])
        obs = np.array([x for x in support if prior.pmf(np.arange(x, len(weights))).sum() > 0])
        means = model.predict(obs)
        assert np.all(np.diff(means) >= -1e-9)
        for x, m in zip(obs, means):
            allowed = prior.values[(prior.values >= x) & (prior.probs > 0)]
            assert allowed.min() - 1e-9 <= m <= allowed.max() + 1e-9


class TestBianconi:
    def test_ring(self):
        g = cycle_graph(12)
        # <k(k-1)>/<k> = 2*1/2 = 1
        assert bianconi_triangle_estimate(degree_histogram(g)) == pytest.approx(1 / 6)

    def test_star(self):
        n = 9
        g = star_graph(n)
        expected = ((n - 1) / 2) ** 3 / 6
        assert bianconi_triangle_estimate(degree_histogram(g)) == pytest.approx(expected)
        assert bianconi_triangle_estimate({1: n, n: 1}) == pytest.approx(expected)

    def test_low_degree_zero(self):
        assert bianconi_triangle_estimate({0: 3, 1: 4}) == 0.0

    def test_er_is_reasonable(self):
        g = generate_er(1000, 10000, seed=3)
        est = bianconi_triangle_estimate(degree_histogram(g))
        assert est == pytest.approx(g.triangles.total, rel=0.15)

    def test_empty(self):
        with pytest.raises(ParameterError):
            bianconi_triangle_estimate({})


class TestSklearnAPI:
    def test_get_params_and_clone(self):
        m = BayesDegreeEstimator(p=0.2, prior="cascade", n_original=50, iterations=10, random_state=3)
        params = m.get_params()
        assert params == {"p": 0.2, "prior": "cascade", "n_original": 50, "iterations": 10, "random_state": 3}
        c = clone(m)
        assert c.get_params() == params and c is not m

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            BayesTriangleEstimator(p=0.5).predict([1])
        with pytest.raises(NotFittedError):
            MMEDegreeEstimator(p=0.5).predict([1])

    def test_mme_matches_functional(self, er_small):
        s = edge_sample(er_small, 0.3, seed=1)
        got = MMEDegreeEstimator(p=0.3).fit(s.degrees).predict(s.degrees)
        np.testing.assert_allclose(got, mme_degree(s).estimates)
        t = MMETriangleEstimator(p=0.3).fit(s.edge_triangles)
        np.testing.assert_allclose(t.predict(s.edge_triangles), mme_edge_triangles(s).estimates)
        assert t.total(s.edge_triangles) == pytest.approx(mme_total_triangles(s).value)

    def test_bayes_min_reproducible(self, er_small):
        s = edge_sample(er_small, 0.3, seed=1)
        a = BayesDegreeEstimator(p=0.3, iterations=500, random_state=7).fit(s.degrees)
        b = BayesDegreeEstimator(p=0.3, iterations=500, random_state=7).fit(s.degrees)
        np.testing.assert_array_equal(a.sequence_.kappa, b.sequence_.kappa)
        np.testing.assert_allclose(a.predict(s.degrees), b.predict(s.degrees))

    def test_column_input_and_pipeline(self, er_small):
        s = edge_sample(er_small, 0.5, seed=2)
        X = s.degrees.reshape(-1, 1)
        model = BayesDegreeEstimator(p=0.5, prior="cascade", n_original=er_small.n_nodes, random_state=0)
        pred = model.fit(X).predict(X)
        assert pred.shape == (s.n_nodes,)
        pipe = make_pipeline(FunctionTransformer(lambda x: x), MMEDegreeEstimator(p=0.5))
        np.testing.assert_allclose(pipe.fit(X).predict(X), s.degrees / 0.5)

    def test_score_is_negative_rmse(self, er_small):
        s = edge_sample(er_small, 1.0, seed=0)
        m = MMEDegreeEstimator(p=1.0).fit(s.degrees)
        assert m.score(s.degrees, er_small.degrees) == 0.0

    def test_triangle_estimator_total_overlays_mme(self):
        g = generate_er(500, 4000, seed=1)
        s = edge_sample(g, 0.2, seed=3)
        X = s.edge_triangles
        bayes = BayesTriangleEstimator(p=0.2).fit(X)
        assert bayes.total(X) == pytest.approx(MMETriangleEstimator(p=0.2).total(X), rel=1e-6)

    def test_bad_params(self):
        with pytest.raises(ParameterError):
            BayesDegreeEstimator(p=0.5, prior="nope").fit([1, 2])
        with pytest.raises(ParameterError):
            BayesDegreeEstimator(p=0.5, prior="cascade").fit([1, 2])
        with pytest.raises(ParameterError):
            MMEDegreeEstimator(p=0.0).fit([1])
        with pytest.raises(ParameterError):
            MMEDegreeEstimator(p=0.5).fit([1.5])

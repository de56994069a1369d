import json
import math

import numpy as np
import pytest
from scipy.special import gammaln

from graphmix.errors import (
    ConstraintViolationError,
    DataMismatchError,
    InvalidDispersionError,
    UnsupportedSpaceError,
    ZeroStatisticError,
)
from graphmix.fitting import (
    FitConfig,
    GraphSet,
    fit_mle,
    grad_pooled_loglik,
    identifiability_check,
    model_comparison,
    offset_approx_loglik,
    pooled_loglik,
    pooled_loglik_offset_approx,
)
from graphmix.graphs import Graph, GraphSpace
from graphmix.models import (
    BernoulliParams,
    BetaBernoulliParams,
    DirichletCategoricalParams,
    MeanDegreeParams,
    NonNullDegreeParams,
    log_pmf,
)
from graphmix.oracle import edge_vectors
from graphmix.samplers import make_rng, sample_beta_bernoulli, sample_dirichlet_categorical


def with_edges(space, k):
    x = np.zeros(space.edge_capacity, dtype=bool)
    x[:k] = True
    return Graph.from_edge_vector(space, x)


def bb_set(rng, k=40, n=12, a=2.0, b=5.0):
    space = GraphSpace(n)
    return GraphSet([sample_beta_bernoulli(space, BetaBernoulliParams(a, b), rng)[0] for _ in range(k)])


def dc_set(rng, k=40, n=10, v=(2.0, 3.0, 4.0)):
    space = GraphSpace(n)
    return GraphSet([sample_dirichlet_categorical(space, DirichletCategoricalParams(*v), rng)[0] for _ in range(k)])


def mixed_set(rng):
    """Graphs of several orders, each with strictly positive dyad counts."""
    graphs = []
    for n in (6, 9, 14, 20):
        for _ in range(3):
            g, _ = sample_dirichlet_categorical(GraphSpace(n), DirichletCategoricalParams(4, 4, 4), rng)
            graphs.append(g)
    return GraphSet(graphs)


def central_diff(f, theta, h=1e-5):
    out = np.empty(len(theta))
    for i in range(len(theta)):
        up, down = np.array(theta, float), np.array(theta, float)
        up[i] += h
        down[i] -= h
        out[i] = (f(up) - f(down)) / (2 * h)
    return out


class TestGraphSet:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            GraphSet([])

    def test_mixed_directedness_rejected(self):
        with pytest.raises(ValueError):
            GraphSet([Graph.empty(GraphSpace(3)), Graph.empty(GraphSpace(3, directed=False))])

    def test_varying_orders_allowed(self):
        gs = GraphSet([Graph.empty(GraphSpace(3)), Graph.empty(GraphSpace(5))])
        assert list(gs.edge_capacity) == [6, 20]


class TestPooledLoglik:
    def test_single_graph(self):
        g = with_edges(GraphSpace(5), 7)
        for p in (BetaBernoulliParams(2, 5), DirichletCategoricalParams(1, 2, 3), BernoulliParams(0.3)):
            assert pooled_loglik(GraphSet([g]), p) == log_pmf(g, p)

    def test_identical_pair_doubles(self):
        g = with_edges(GraphSpace(5), 7)
        p = BetaBernoulliParams(2, 5)
        assert pooled_loglik(GraphSet([g, g]), p) == 2 * log_pmf(g, p)

    def test_two_graph_closed_form(self):
        space = GraphSpace(4)
        gs = GraphSet([with_edges(space, 3), with_edges(space, 7)])

        def term(e):
            n = 12 - e
            return gammaln(7) - gammaln(2) - gammaln(5) + gammaln(e + 2) + gammaln(n + 5) - gammaln(19)

        assert pooled_loglik(gs, BetaBernoulliParams(2, 5)) == pytest.approx(term(3) + term(7), rel=1e-13)

    @pytest.mark.parametrize("params", [
        BernoulliParams(0.3),
        BetaBernoulliParams(0.7, 2.5),
        DirichletCategoricalParams(1.5, 0.5, 3.0),
        MeanDegreeParams(2.0, 1.0),
        NonNullDegreeParams(2.5, 0.4, 1.2),
    ])
    def test_machine_equality_with_per_graph_pmfs(self, params):
        gs = mixed_set(make_rng(1))
        total = 0.0
        for g in gs:
            total += log_pmf(g, params)
        assert pooled_loglik(gs, params) == total

    def test_invalid_dispersion_names_graph(self):
        gs = GraphSet([with_edges(GraphSpace(11), 5), with_edges(GraphSpace(4), 2)])
        with pytest.raises(InvalidDispersionError) as info:
            pooled_loglik(gs, MeanDegreeParams(5.0, 1.0))
        assert info.value.index == 1

    def test_dyadic_family_rejects_undirected(self):
        gs = GraphSet([with_edges(GraphSpace(4, directed=False), 2)])
        with pytest.raises(UnsupportedSpaceError):
            pooled_loglik(gs, DirichletCategoricalParams(1, 1, 1))


class TestGradient:
    @pytest.mark.parametrize("family", ["bb", "dc", "meandeg", "nnd", "bernoulli"])
    def test_finite_differences(self, family):
        rng = make_rng(2)
        gs = mixed_set(rng)
        make = {
            "bb": (BetaBernoulliParams, [1.3, 2.2]),
            "dc": (DirichletCategoricalParams, [0.8, 1.7, 2.9]),
            "meandeg": (MeanDegreeParams, [2.0, 1.1]),
            "nnd": (NonNullDegreeParams, [2.2, 0.35, 1.0]),
            "bernoulli": (BernoulliParams, [0.37]),
        }[family]
        cls, theta = make
        analytic = grad_pooled_loglik(gs, cls(*theta))
        numeric = central_diff(lambda t: pooled_loglik(gs, cls(*t)), theta)
        assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-6)

    def test_symmetry_at_half_density(self):
        space = GraphSpace(5)
        gs = GraphSet([with_edges(space, 10), with_edges(space, 10)])
        g = grad_pooled_loglik(gs, BetaBernoulliParams(1.7, 1.7))
        assert g[0] == pytest.approx(g[1], rel=1e-14)

    def test_zero_at_mle(self):
        gs = bb_set(make_rng(3))
        fit = fit_mle(gs, "beta-bernoulli")
        assert fit.converged
        g = grad_pooled_loglik(gs, BetaBernoulliParams(**fit.estimates))
        assert np.linalg.norm(g) < 1e-5


class TestOffsetApproximation:
    def test_lgamma_offset_quality(self):
        e, a = 500, 2.0
        assert abs(gammaln(e + a) - gammaln(e) - a * math.log(e)) < 0.005

    def test_differences_depend_on_log_statistics(self):
        gs = bb_set(make_rng(4), k=10)
        p1, p2 = BetaBernoulliParams(1.5, 2.0), BetaBernoulliParams(3.0, 4.5)
        diff = pooled_loglik_offset_approx(gs, p2) - pooled_loglik_offset_approx(gs, p1)
        stats = np.column_stack([gs.edges, gs.edge_capacity - gs.edges])
        expected = np.log(stats).sum(axis=0) @ np.array([1.5, 2.5])
        assert diff == pytest.approx(expected, rel=1e-10)

    def test_zero_statistic(self):
        space = GraphSpace(4)
        gs = GraphSet([with_edges(space, 0), with_edges(space, 5)])
        with pytest.raises(ZeroStatisticError):
            pooled_loglik_offset_approx(gs, BetaBernoulliParams(2, 2))

    def test_constraints(self):
        gs = bb_set(make_rng(5), k=5)
        with pytest.raises(ConstraintViolationError):
            pooled_loglik_offset_approx(gs, BetaBernoulliParams(0.5, 2))
        dgs = dc_set(make_rng(5), k=5, v=(5, 5, 5))
        with pytest.raises(ConstraintViolationError):
            pooled_loglik_offset_approx(dgs, DirichletCategoricalParams(1.0, 2, 2))

    def test_normalized_approximation_sums_to_one(self):
        # the normalized approximate model is a proper distribution over the space
        space = GraphSpace(3)
        x = edge_vectors(space)
        graphs = [Graph.from_edge_vector(space, v) for v, e in zip(x, x.sum(axis=1)) if 0 < e < 6]
        p = BetaBernoulliParams(1.5, 2.5)
        total = sum(math.exp(offset_approx_loglik(GraphSet([g]), p)) for g in graphs)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_fit_close_to_exact(self):
        # the offset form is a large-count approximation, so use sizeable graphs
        gs = dc_set(make_rng(6), k=100, n=40, v=(6.0, 5.0, 8.0))
        exact = fit_mle(gs, "dirichlet-categorical")
        approx = fit_mle(gs, "dirichlet-categorical", FitConfig(approx=True))
        assert approx.converged and "offset-approx" in approx.flags
        assert approx.scale == "log-minus-one"
        for k in exact.estimates:
            assert approx.estimates[k] == pytest.approx(exact.estimates[k], rel=0.1)


class TestIdentifiability:
    def test_single_graph(self):
        d = identifiability_check(GraphSet([with_edges(GraphSpace(5), 4)]), "beta-bernoulli")
        assert d.reason == "insufficient-observations"
        assert d.recession["mean_density"] == pytest.approx(4 / 20)

    def test_two_distinct_densities(self):
        space = GraphSpace(5)
        assert identifiability_check(GraphSet([with_edges(space, 4), with_edges(space, 9)]), "beta-bernoulli") is None

    def test_identical_censuses(self):
        g = Graph.from_edges(GraphSpace(4), [(0, 1), (1, 0), (2, 3)])
        h = Graph.from_edges(GraphSpace(4), [(2, 3), (3, 2), (0, 1)])
        d = identifiability_check(GraphSet([g, h, g]), "dirichlet-categorical")
        assert d.reason == "zero-dispersion"

    def test_two_graphs_too_few_for_dyadic(self):
        gs = dc_set(make_rng(7), k=2)
        assert identifiability_check(gs, "dirichlet-categorical").reason == "insufficient-observations"


class TestFitMle:
    def test_single_graph_is_degenerate(self):
        g = with_edges(GraphSpace(6), 9)
        fit = fit_mle(GraphSet([g]), "beta-bernoulli")
        assert not fit.converged
        assert fit.degenerate.reason == "insufficient-observations"
        assert fit.degenerate.recession["mean_density"] == pytest.approx(9 / 30)
        assert "degenerate" in fit.flags

    def test_identical_densities_hit_boundary(self):
        space = GraphSpace(6)
        gs = GraphSet([with_edges(space, 9)] * 5)
        fit = fit_mle(gs, "beta-bernoulli")
        assert "boundary" in fit.flags
        a, b = fit.estimates["alpha"], fit.estimates["beta"]
        assert a / (a + b) == pytest.approx(9 / 30, rel=1e-6)
        assert a + b > 1e6

    def test_recovers_parameters(self):
        gs = bb_set(make_rng(8), k=200, n=30)
        fit = fit_mle(gs, "beta-bernoulli")
        assert fit.converged and fit.flags == []
        for name, truth in (("alpha", 2.0), ("beta", 5.0)):
            assert abs(fit.estimates[name] - truth) < 4 * fit.std_errors[name]

    def test_dirichlet_recovery(self):
        gs = dc_set(make_rng(9), k=150, n=12, v=(1.0, 2.0, 3.0))
        fit = fit_mle(gs, "dirichlet-categorical")
        assert fit.converged
        for name, truth in zip(("alpha", "beta", "gamma"), (1.0, 2.0, 3.0)):
            assert abs(fit.estimates[name] - truth) < 4 * fit.std_errors[name]

    def test_mean_degree_invariance(self):
        gs = bb_set(make_rng(10), k=80, n=15)
        direct = fit_mle(gs, "beta-bernoulli")
        repar = fit_mle(gs, "beta-bernoulli-meandeg")
        assert repar.converged
        assert repar.log_likelihood == pytest.approx(direct.log_likelihood, abs=1e-6)

    def test_nnd_invariance(self):
        gs = dc_set(make_rng(11), k=80, n=12)
        direct = fit_mle(gs, "dirichlet-categorical")
        repar = fit_mle(gs, "dc-nnd")
        assert repar.converged
        assert repar.log_likelihood == pytest.approx(direct.log_likelihood, abs=1e-6)

    def test_bernoulli_closed_form(self):
        gs = bb_set(make_rng(12), k=10)
        fit = fit_mle(gs, "bernoulli")
        assert fit.estimates["delta"] == pytest.approx(gs.edges.sum() / gs.edge_capacity.sum())

    def test_result_json(self):
        fit = fit_mle(bb_set(make_rng(13)), "beta-bernoulli")
        doc = json.loads(fit.to_json())
        assert set(doc) == {"family", "estimates", "std_errors", "scale", "logLik", "deviance", "nullDeviance", "aic", "converged", "flags"}
        assert doc["aic"] == pytest.approx(doc["deviance"] + 4)
        assert doc["deviance"] == pytest.approx(-2 * doc["logLik"])

    def test_null_deviance_is_half_density_reference(self):
        gs = bb_set(make_rng(14), k=5)
        fit = fit_mle(gs, "beta-bernoulli")
        assert fit.null_deviance == pytest.approx(2 * math.log(2) * gs.edge_capacity.sum())


class TestModelComparison:
    def test_sorted_by_aic(self):
        gs = dc_set(make_rng(15), k=60, n=10, v=(1, 3, 2))
        fits = [fit_mle(gs, f) for f in ("bernoulli", "beta-bernoulli", "dirichlet-categorical")]
        rows = model_comparison(fits)
        assert [r.aic for r in rows] == sorted(r.aic for r in rows)
        by_family = {f.family: f for f in fits}
        for r in rows:
            f = by_family[r.family]
            assert r.aic == pytest.approx(r.deviance + 2 * f.n_params)

    def test_identical_fits_identical_rows(self):
        gs = bb_set(make_rng(16))
        rows = model_comparison([fit_mle(gs, "beta-bernoulli"), fit_mle(gs, "beta-bernoulli")])
        assert rows[0] == rows[1]

    def test_mismatched_data(self):
        a = fit_mle(bb_set(make_rng(17)), "beta-bernoulli")
        b = fit_mle(bb_set(make_rng(18)), "beta-bernoulli")
        with pytest.raises(DataMismatchError):
            model_comparison([a, b])

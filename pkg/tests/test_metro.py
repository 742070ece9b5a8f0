"""Tests for network centrality, vitality, and flow-based population."""

import numpy as np
import pytest
from scipy.sparse.csgraph import shortest_path

from graphtopo.core import Graph, NumericalError, laplacian
from graphtopo.metro import FlowVector, betweenness, closeness_vitality, fick_population

from conftest import random_connected_graph


def path_graph(n):
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = 1.0
    return Graph.from_weights(w)


def complete_graph(n):
    w = np.ones((n, n)) - np.eye(n)
    return Graph.from_weights(w)


def pair_dependency_betweenness(g):
    """Independent oracle: B_n = sum over pairs (k, m) of
    sigma(k, n) sigma(n, m) / sigma(k, m) whenever n lies on a shortest
    k-m path, with path counts from per-source BFS layering."""
    n = g.n
    adj = [np.flatnonzero(g.w[v] > 0) for v in range(n)]
    dist = np.full((n, n), np.inf)
    sigma = np.zeros((n, n))
    for s in range(n):
        dist[s, s] = 0
        sigma[s, s] = 1
        frontier = [s]
        d = 0
        while frontier:
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if np.isinf(dist[s, u]):
                        dist[s, u] = d + 1
                        nxt.append(int(u))
                    if dist[s, u] == d + 1:
                        sigma[s, u] += sigma[s, v]
            frontier = nxt
            d += 1
    scores = np.zeros(n)
    for k in range(n):
        for m in range(k + 1, n):
            if not np.isfinite(dist[k, m]):
                continue
            for v in range(n):
                if v in (k, m):
                    continue
                if dist[k, v] + dist[v, m] == dist[k, m]:
                    scores[v] += sigma[k, v] * sigma[v, m] / sigma[k, m]
    return scores


class TestBetweenness:
    def test_star_center_carries_all_pairs(self):
        w = np.zeros((5, 5))
        w[0, 1:] = w[1:, 0] = 1.0
        b = betweenness(Graph.from_weights(w))
        np.testing.assert_allclose(b, [6.0, 0, 0, 0, 0], atol=1e-12)

    def test_path_of_four(self):
        b = betweenness(path_graph(4))
        np.testing.assert_allclose(b, [0.0, 2.0, 2.0, 0.0], atol=1e-12)

    def test_complete_graph_has_no_intermediaries(self):
        np.testing.assert_allclose(betweenness(complete_graph(5)),
                                   np.zeros(5), atol=1e-12)

    def test_matches_pair_dependency_identity(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            g = random_connected_graph(rng, 8, p_edge=0.35)
            np.testing.assert_allclose(betweenness(g),
                                       pair_dependency_betweenness(g),
                                       atol=1e-10)

    def test_only_hop_structure_matters(self):
        rng = np.random.default_rng(3)
        g = random_connected_graph(rng, 7)
        boosted = Graph.from_weights(np.where(g.w > 0, g.w * 7.5, 0.0))
        np.testing.assert_allclose(betweenness(g), betweenness(boosted),
                                   atol=1e-12)

    def test_disconnected_counts_within_components(self):
        w = np.zeros((4, 4))
        w[0, 1] = w[1, 0] = 1.0
        w[1, 2] = w[2, 1] = 1.0
        b = betweenness(Graph.from_weights(w))
        np.testing.assert_allclose(b, [0.0, 1.0, 0.0, 0.0], atol=1e-12)


class TestClosenessVitality:
    def test_path_of_three(self):
        v = closeness_vitality(path_graph(3))
        assert v[0] == pytest.approx(3.0)
        assert v[2] == pytest.approx(3.0)
        assert np.isinf(v[1])

    def test_complete_graph_is_uniform(self):
        np.testing.assert_allclose(closeness_vitality(complete_graph(4)),
                                   np.full(4, 3.0), atol=1e-12)

    def test_matches_recomputation_oracle(self):
        rng = np.random.default_rng(40)
        for _ in range(5):
            g = random_connected_graph(rng, 8, p_edge=0.4)
            hops = (g.w > 0).astype(float)
            base = shortest_path(hops, unweighted=True)
            base_total = base[np.isfinite(base)].sum() / 2
            expected = np.zeros(8)
            for v in range(8):
                keep = [u for u in range(8) if u != v]
                sub = shortest_path(hops[np.ix_(keep, keep)], unweighted=True)
                if np.isinf(sub).any():
                    expected[v] = np.inf
                else:
                    expected[v] = base_total - sub.sum() / 2
            np.testing.assert_allclose(closeness_vitality(g), expected)

    def test_disconnected_base_graph(self):
        w = np.zeros((6, 6))
        for a, b in [(0, 1), (1, 2), (3, 4), (4, 5)]:
            w[a, b] = w[b, a] = 1.0
        v = closeness_vitality(Graph.from_weights(w))
        assert v[0] == pytest.approx(3.0)
        assert np.isinf(v[1])
        assert v[3] == pytest.approx(3.0)
        assert np.isinf(v[4])


class TestFickPopulation:
    def test_zero_flow_means_flat_population(self, bench8):
        out = fick_population(laplacian(bench8), np.zeros(8), k=2.0)
        np.testing.assert_allclose(out, np.zeros(8), atol=1e-12)

    def test_two_vertex_exchange(self):
        g = path_graph(2)
        out = fick_population(laplacian(g), [1.0, -1.0], k=1.0)
        np.testing.assert_allclose(out, [0.0, 1.0], atol=1e-12)

    def test_round_trip_recovers_planted_profile(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(4, 12))
            g = random_connected_graph(rng, n)
            lap = laplacian(g)
            phi = rng.normal(size=n)
            q = -2.5 * (lap.l @ phi)
            out = fick_population(lap, q, k=2.5)
            np.testing.assert_allclose(out, phi - phi.min(), atol=1e-8)

    def test_residual_of_estimate(self, bench8):
        rng = np.random.default_rng(9)
        lap = laplacian(bench8)
        q = rng.normal(size=8)
        q -= q.mean()
        out = fick_population(lap, FlowVector(q), k=0.7)
        np.testing.assert_allclose(lap.l @ out, -q / 0.7, atol=1e-10)

    def test_minimum_is_zero(self, bench8):
        rng = np.random.default_rng(2)
        q = rng.normal(size=8)
        q -= q.mean()
        out = fick_population(laplacian(bench8), q, k=1.0)
        assert out.min() == 0.0

    def test_argument_validation(self, bench8):
        lap = laplacian(bench8)
        with pytest.raises(ValueError):
            fick_population(lap, np.zeros(8), k=0.0)
        with pytest.raises(ValueError):
            fick_population(lap, np.zeros(8), k=-1.0)
        with pytest.raises(ValueError):
            fick_population(lap, np.zeros(5), k=1.0)
        with pytest.raises(ValueError):
            FlowVector(np.array([1.0, np.nan]))

    def test_disconnected_graph_is_rejected(self):
        w = np.zeros((4, 4))
        w[0, 1] = w[1, 0] = 1.0
        w[2, 3] = w[3, 2] = 1.0
        lap = laplacian(Graph.from_weights(w), allow_isolated=True)
        with pytest.raises(NumericalError):
            fick_population(lap, np.zeros(4), k=1.0)

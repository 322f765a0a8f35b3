import random

import pytest

from conftest import random_tree
from qtreekit.corpus import t4_tree
from qtreekit.metric import FiniteMetricSpace, min_connectivity_scale
from qtreekit.rips import build_rips_graph, verify_rips_qi


def int_space(values):
    return FiniteMetricSpace.from_points(list(values))


def test_small_example_edges():
    space = int_space([0, 1, 2, 5])
    rips = build_rips_graph(space, 1)
    assert rips.graph.edges == [(0, 1), (1, 2)]


def test_rejects_nonpositive_r():
    with pytest.raises(ValueError):
        build_rips_graph(int_space([0, 1]), 0)


def test_graph_vertex_set_gives_graph_back(rng):
    # Rips graph of a graph's vertex set at r=1 is the graph itself
    for _ in range(10):
        tree = random_tree(rng, 40)
        space = FiniteMetricSpace.from_graph(tree)
        rips = build_rips_graph(space, 1)
        assert rips.graph.edges == tree.edges


def test_four_regular_tree_ball():
    ball = t4_tree().ball(4)
    space = FiniteMetricSpace.from_graph(ball.graph)
    rips = build_rips_graph(space, 2)
    # every pair at distance <= 2 joined; lower bound exact on all pairs
    edge_set = set(rips.graph.edges)
    for i in range(space.n):
        row = space.dist_row(i)
        for j in range(i + 1, space.n):
            assert ((i, j) in edge_set) == (0 < row[j] <= 2)
    report = verify_rips_qi(space, 2)
    assert report.connected and report.lower_exact


def test_monotone_edges(rng):
    tree = random_tree(rng, 60)
    subset = sorted(rng.sample(range(60), 20))
    space = FiniteMetricSpace.from_graph(tree).subspace(subset)
    for r in (1, 2, 3):
        small = set(build_rips_graph(space, r).graph.edges)
        big = set(build_rips_graph(space, r + 1).graph.edges)
        assert small <= big


def test_square_gaps_disconnect():
    space = int_space([n * n for n in range(1, 11)])
    report = verify_rips_qi(space, 1)
    assert not report.connected
    assert report.n_components == space.n
    assert report.fitted is None


def test_interval_fit_bounds():
    # integer interval: fitted K <= r, eps <= r for any r >= 1
    space = int_space(range(30))
    for r in (1, 2, 3, 5):
        report = verify_rips_qi(space, r)
        assert report.connected and report.lower_exact
        assert report.fitted.K <= r + 1e-9
        assert report.fitted.eps <= r + 1e-9


def test_coarse_connected_subsets_connected_at_their_scale(rng):
    for _ in range(25):
        tree = random_tree(rng, 150)
        subset = sorted(rng.sample(range(150), rng.randint(8, 40)))
        space = FiniteMetricSpace.from_graph(tree).subspace(subset)
        c = min_connectivity_scale(space)
        report = verify_rips_qi(space, c)
        assert report.connected
        assert report.lower_exact


def test_eps_stabilises_with_scale():
    # geodesic-space vertex sets: fitted eps at r and 2r within a factor 4
    samples = [int_space(range(25)),
               FiniteMetricSpace.from_graph(t4_tree().ball(4).graph)]
    for space in samples:
        for r in (1, 2):
            e1 = verify_rips_qi(space, r).fitted.eps
            e2 = verify_rips_qi(space, 2 * r).fitted.eps
            assert max(e1, e2) <= 4 * min(e1, e2) + 1e-9

import math
import random

import pytest

from conftest import random_tree
from qtreekit.corpus import t4_tree
from qtreekit.errors import CertificateError, PreconditionError
from qtreekit.metric import FiniteMetricSpace, Graph, min_connectivity_scale
from qtreekit.trees import (LazyTree, SimplicialTree, approximating_tree,
                            bottleneck_check, convex_closure, end_profile,
                            induced_subtree, subtree_from_qi, tree_geodesic,
                            verify_closure_density)


def ladder_graph(n):
    edges = []
    for i in range(n - 1):
        edges.append((2 * i, 2 * (i + 1)))
        edges.append((2 * i + 1, 2 * (i + 1) + 1))
    for i in range(n):
        edges.append((2 * i, 2 * i + 1))
    return Graph(2 * n, edges)


def grid_graph(n):
    def v(i, j):
        return i * n + j
    edges = []
    for i in range(n):
        for j in range(n):
            if i + 1 < n:
                edges.append((v(i, j), v(i + 1, j)))
            if j + 1 < n:
                edges.append((v(i, j), v(i, j + 1)))
    return Graph(n * n, edges)


def path_tree(n):
    return SimplicialTree(Graph(n, [(i, i + 1) for i in range(n - 1)]))


def all_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def prune_closure_oracle(graph: Graph, S):
    """Smallest connected subgraph containing S by iterative leaf pruning."""
    keep = set(range(graph.n))
    S = set(S)
    changed = True
    while changed:
        changed = False
        for v in sorted(keep):
            if v in S:
                continue
            deg = sum(1 for w in graph.adj[v] if w in keep)
            if deg <= 1:
                keep.discard(v)
                changed = True
    return sorted(keep)


class TestGeodesic:
    def test_single_vertex(self):
        tree = path_tree(5)
        assert tree_geodesic(tree, 2, 2) == [2]

    def test_path_endpoints(self):
        tree = path_tree(5)
        assert tree_geodesic(tree, 0, 4) == [0, 1, 2, 3, 4]

    def test_against_bfs_oracle(self, rng):
        for _ in range(10):
            g = random_tree(rng, 80)
            tree = SimplicialTree(g)
            for _ in range(50):
                u, v = rng.randrange(80), rng.randrange(80)
                path = tree_geodesic(tree, u, v)
                assert path[0] == u and path[-1] == v
                assert len(path) - 1 == g.distance(u, v)
                assert len(set(path)) == len(path)

    def test_rejects_non_tree(self):
        with pytest.raises(ValueError):
            SimplicialTree(Graph(3, [(0, 1)]))
        with pytest.raises(ValueError):
            SimplicialTree(Graph(3, [(0, 1), (1, 2), (0, 2)]))


class TestConvexClosure:
    def test_two_vertices(self):
        tree = path_tree(6)
        closure = convex_closure(tree, [1, 4])
        assert closure.vertices == [1, 2, 3, 4]

    def test_tripod_leaves(self):
        tripod = SimplicialTree(Graph(4, [(0, 1), (0, 2), (0, 3)]))
        closure = convex_closure(tripod, [1, 2, 3])
        assert closure.vertices == [0, 1, 2, 3]

    def test_empty_rejected(self):
        with pytest.raises(PreconditionError):
            convex_closure(path_tree(3), [])

    def test_against_leaf_pruning_oracle(self, rng):
        for _ in range(200):
            g = random_tree(rng, rng.randint(10, 120))
            tree = SimplicialTree(g)
            S = rng.sample(range(g.n), rng.randint(1, min(10, g.n)))
            assert convex_closure(tree, S).vertices == prune_closure_oracle(g, S)

    def test_idempotent_and_monotone(self, rng):
        for _ in range(40):
            g = random_tree(rng, 60)
            tree = SimplicialTree(g)
            S = set(rng.sample(range(60), 6))
            T = S | set(rng.sample(range(60), 4))
            cs = convex_closure(tree, S)
            assert convex_closure(tree, cs.vertices).vertices == cs.vertices
            assert set(cs.vertices) <= set(convex_closure(tree, T).vertices)


class TestClosureDensity:
    def test_connected_subtree_vertices(self):
        tree = path_tree(8)
        report = verify_closure_density(tree, range(8), 1)
        assert report.precondition_ok and report.ok
        assert report.worst_distance == 0

    def test_even_vertices_of_path(self):
        tree = path_tree(9)
        report = verify_closure_density(tree, [0, 2, 4, 6, 8], 2)
        assert report.ok
        assert report.bound == 1
        assert report.worst_distance == 1

    def test_precondition_diagnostic(self):
        tree = path_tree(9)
        report = verify_closure_density(tree, [0, 8], 2)  # gaps of 8 > 2
        assert not report.precondition_ok

    def test_random_density_bound(self, rng):
        # Thm-6.1-style bound: c-coarse connected S is ceil(c/2)-dense in its closure
        for _ in range(200):
            g = random_tree(rng, rng.randint(20, 150))
            tree = SimplicialTree(g)
            S = rng.sample(range(g.n), rng.randint(2, 12))
            space = FiniteMetricSpace.from_graph(g)
            c = min_connectivity_scale(space, S)
            report = verify_closure_density(tree, S, c)
            assert report.precondition_ok
            assert report.ok, f"density {report.worst_distance} > bound {report.bound}"

    def test_equivalence_sweep_reverse_direction(self, rng):
        # density C in the closure forces (2C+1)-coarse connectivity of S
        for _ in range(100):
            g = random_tree(rng, 100)
            tree = SimplicialTree(g)
            S = rng.sample(range(100), rng.randint(2, 10))
            closure = convex_closure(tree, S)
            worst = max(min(tree.dist(v, s) for s in S) for v in closure.vertices)
            space = FiniteMetricSpace.from_graph(g)
            assert min_connectivity_scale(space, S) <= 2 * worst + 1 + 1e-9


class TestBottleneck:
    def test_tree_passes_at_zero(self, rng):
        g = random_tree(rng, 40)
        pairs = [(rng.randrange(40), rng.randrange(40)) for _ in range(15)]
        pairs = [(u, v) for u, v in pairs if u != v]
        assert bottleneck_check(g, 0, pairs) is None

    def test_ladder(self):
        g = ladder_graph(8)
        pairs = [(0, 15), (1, 14), (0, 14)]
        assert bottleneck_check(g, 1, pairs) is None
        witness = bottleneck_check(g, 0, pairs)
        assert witness is not None
        # the surviving path avoids the removed vertex
        assert witness.center not in witness.path

    def test_grid_fails(self):
        g = grid_graph(8)
        witness = bottleneck_check(g, 1, [(0, 63)])
        assert witness is not None
        assert witness.path[0] == 0 and witness.path[-1] == 63

    def test_disconnected_rejected(self):
        with pytest.raises(PreconditionError):
            bottleneck_check(Graph(4, [(0, 1), (2, 3)]), 0, [(0, 2)])


class TestEndProfile:
    def test_three_regular_tree_ball(self):
        def nbrs(w):
            out = []
            for s in (1, -1, 2):
                if w and w[-1] == -s if s != 2 else False:
                    pass
            return out
        # build T3 as a LazyTree: root has 3 children, everyone else 2
        def neighbors(label):
            children = [label + (i,) for i in range(2 if label else 3)]
            return children + ([label[:-1]] if label else [])
        def dist(u, v):
            p = 0
            for a, b in zip(u, v):
                if a != b:
                    break
                p += 1
            return len(u) + len(v) - 2 * p
        t3 = LazyTree((), neighbors, dist)
        ball = t3.ball(12)
        profile = end_profile(ball.graph, 0, 12, [0, 1, 2, 3, 4])
        assert profile.counts == [3 * 2 ** b for b in range(5)]
        assert profile.verdict == "ge3"

    def test_line_ball(self):
        g = Graph(25, [(i, i + 1) for i in range(24)])
        profile = end_profile(g, 12, 12, [0, 1, 2, 3])
        assert profile.counts == [2, 2, 2, 2]
        assert profile.verdict == "2"

    def test_bounded_star(self):
        star = Graph(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
        profile = end_profile(star, 0, 8, [0, 1, 2])
        assert profile.counts == [0, 0, 0]
        assert profile.verdict == "0"

    def test_ladder_validation(self):
        g = Graph(9, [(i, i + 1) for i in range(8)])
        with pytest.raises(ValueError):
            end_profile(g, 4, 4, [3])

    def test_leafless_tree_count_at_zero_is_valence(self):
        # removing the root of a bounded-valence leafless tree leaves valence-many ends
        ball = t4_tree().ball(8)
        profile = end_profile(ball.graph, 0, 8, [0])
        assert profile.counts[0] == 4


class TestSubtreeFromQi:
    def test_identity_map(self, rng):
        g = random_tree(rng, 30)
        tree = SimplicialTree(g)
        result = subtree_from_qi(g, tree, list(range(30)), 1, 0)
        assert result.closure.vertices == list(range(30))
        for cert in result.certificates:
            assert cert.map_dist <= 1
            assert cert.ball_size >= cert.valence
            assert cert.ball_radius == 2

    def test_subdivided_tree_collapse(self, rng):
        # subdivide every edge; map midpoints to the parent endpoint: a (2,1) QI
        for _ in range(5):
            g = random_tree(rng, 25)
            tree = SimplicialTree(g)
            n = g.n
            edges = []
            F = list(range(n))
            for k, (u, v) in enumerate(g.edges):
                mid = n + k
                edges.extend([(u, mid), (mid, v)])
                F.append(u)
            sub = Graph(n + len(g.edges), edges)
            result = subtree_from_qi(sub, tree, F, 2, 1)
            assert set(result.closure.vertices) == set(range(n))
            radius = 2 * 4 + 3 * 2 * 1
            for cert in result.certificates:
                assert cert.ball_radius == radius
                assert cert.ball_size >= cert.valence
                assert cert.map_dist <= 3

    def test_bounded_valence_uniform_bound(self):
        # graph QI to a tree: subtree valences bounded by a ball count, uniformly
        ball = t4_tree().ball(5)
        tree = ball.tree()
        result = subtree_from_qi(ball.graph, tree, list(range(ball.graph.n)), 1, 0)
        cap = max(cert.ball_size for cert in result.certificates)
        assert all(cert.valence <= cap for cert in result.certificates)
        assert max(cert.valence for cert in result.certificates) == 4

    def test_invalid_map_aborts(self, rng):
        g = random_tree(rng, 20)
        tree = SimplicialTree(g)
        collapse = [0] * 20
        with pytest.raises(CertificateError):
            subtree_from_qi(g, tree, collapse, 1, 0)


class TestApproximatingTree:
    def test_tree_ball_exact_at_zero(self, rng):
        for _ in range(5):
            g = random_tree(rng, 40)
            pairs = [(rng.randrange(40), rng.randrange(40)) for _ in range(10)]
            pairs = [(u, v) for u, v in pairs if u != v]
            result = approximating_tree(g, 0, 0, pairs)
            assert result.tree.n == g.n
            assert result.fitted.K == 1 and result.fitted.eps == 0
            assert not result.warnings

    def test_output_is_a_tree(self, rng):
        ball = t4_tree().ball(5)
        pairs = [(0, i) for i in (50, 100, 150)]
        result = approximating_tree(ball.graph, 0, 1, pairs)
        new_pairs = [(0, result.tree.n - 1)]
        assert bottleneck_check(result.tree.graph, 0, new_pairs) is None

    def test_ladder_gives_path(self):
        g = ladder_graph(10)
        result = approximating_tree(g, 0, 1, [(0, 19), (1, 18)])
        degrees = sorted(result.tree.graph.degree(v) for v in range(result.tree.n))
        assert degrees[-1] <= 2  # a path
        assert result.fitted.K < math.inf

    def test_grid_refused(self):
        g = grid_graph(8)
        with pytest.raises(PreconditionError):
            approximating_tree(g, 0, 1, [(0, 63)])

    def test_bushy_bottleneck(self):
        # passing bottleneck + >=3 escaping ends => the approximating tree is bushy too
        ball = t4_tree().ball(6)
        pairs = [(0, ball.graph.n - 1), (1, ball.graph.n - 10)]
        assert bottleneck_check(ball.graph, 1, pairs) is None
        profile = end_profile(ball.graph, 0, 6, [0, 1, 2, 3])
        assert profile.verdict == "ge3"
        result = approximating_tree(ball.graph, 0, 1, pairs)
        dist = result.tree.graph.bfs_distances(result.node_of[0])
        R = max(dist)
        approx_profile = end_profile(result.tree.graph, result.node_of[0], R, [0, 1])
        assert approx_profile.verdict == "ge3"

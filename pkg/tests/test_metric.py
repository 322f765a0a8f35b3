import itertools
import math
import random

import numpy as np
import pytest

from conftest import random_tree
from qtreekit.errors import MetricError, PreconditionError
from qtreekit.metric import (FiniteMetricSpace, Graph, QieConstants, Witness,
                             coarse_components, covering_number, hausdorff_distance,
                             is_coarse_dense, min_connectivity_scale, verify_qi,
                             verify_qie)


def int_space(values):
    return FiniteMetricSpace.from_points(list(values))


def blocks_by_label(space, blocks):
    return [[space.labels[i] for i in block] for block in blocks]


class TestGraph:
    def test_rejects_bad_edges(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 0)])
        with pytest.raises(ValueError):
            Graph(3, [(0, 1), (1, 0)])
        with pytest.raises(ValueError):
            Graph(2, [(0, 5)])

    def test_path_metric_is_bfs(self):
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        assert g.distance(0, 4) == 4
        assert g.distance(0, 0) == 0

    def test_shortest_path_lex_smallest(self):
        # diamond: two geodesics 0-1-3 and 0-2-3; lex smallest goes through 1
        g = Graph(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        assert g.shortest_path(0, 3) == [0, 1, 3]

    def test_components(self):
        g = Graph(5, [(0, 1), (3, 4)])
        assert g.components() == [[0, 1], [2], [3, 4]]
        assert g.components(removed={1}) == [[0], [2], [3, 4]]


class TestFiniteMetricSpace:
    def test_validation_catches_triangle_violation(self):
        bad = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
        with pytest.raises(MetricError):
            FiniteMetricSpace.from_matrix(bad, validate=True)

    def test_graph_backing_agrees_with_bfs(self, rng):
        tree = random_tree(rng, 40)
        space = FiniteMetricSpace.from_graph(tree)
        for _ in range(30):
            u, v = rng.randrange(40), rng.randrange(40)
            assert space.dist(u, v) == tree.distance(u, v)

    def test_subspace(self):
        space = int_space([0, 1, 5])
        sub = space.subspace([0, 2])
        assert sub.dist(0, 1) == 5
        assert sub.labels == [0, 5]


class TestCoarseComponents:
    def test_integer_gaps(self):
        space = int_space([0, 1, 2, 5, 9, 10])
        blocks = blocks_by_label(space, coarse_components(space, 1))
        assert blocks == [[0, 1, 2], [5], [9, 10]]

    def test_connected_graph_single_block(self, rng):
        g = random_tree(rng, 25)
        space = FiniteMetricSpace.from_graph(g)
        assert len(coarse_components(space, 1)) == 1

    def test_rejects_nonpositive_c(self):
        with pytest.raises(ValueError):
            coarse_components(int_space([0, 1]), 0)

    def test_against_union_find_oracle(self, rng):
        # oracle: union-find over all pairs at distance <= c
        for trial in range(50):
            tree = random_tree(rng, 200)
            subset = sorted(rng.sample(range(200), rng.randint(5, 40)))
            space = FiniteMetricSpace.from_graph(tree).subspace(subset)
            c = rng.choice([1, 2, 3, 5])
            parent = list(range(space.n))
            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x
            for i, j in itertools.combinations(range(space.n), 2):
                if space.dist(i, j) <= c:
                    parent[find(i)] = find(j)
            oracle = {}
            for i in range(space.n):
                oracle.setdefault(find(i), []).append(i)
            expected = sorted(sorted(b) for b in oracle.values())
            got = sorted(coarse_components(space, c))
            assert got == expected

    def test_monotone_refinement(self, rng):
        # the c-partition refines the c'-partition for c <= c'
        for _ in range(20):
            tree = random_tree(rng, 120)
            subset = sorted(rng.sample(range(120), 25))
            space = FiniteMetricSpace.from_graph(tree).subspace(subset)
            fine = coarse_components(space, 2)
            coarse = coarse_components(space, 4)
            lookup = {}
            for bi, block in enumerate(coarse):
                for v in block:
                    lookup[v] = bi
            for block in fine:
                assert len({lookup[v] for v in block}) == 1


class TestCoarseDense:
    def test_subset_equals_ambient(self):
        space = int_space(range(7))
        ok, witness = is_coarse_dense(range(7), space, 0)
        assert ok and witness is None

    def test_even_integers(self):
        space = int_space(range(11))
        evens = [i for i in range(11) if space.labels[i] % 2 == 0]
        ok, _ = is_coarse_dense(evens, space, 1)
        assert ok
        ok, witness = is_coarse_dense(evens, space, 0.5)
        assert not ok
        assert space.labels[witness.points[0]] % 2 == 1
        assert witness.violation > 0

    def test_barycentric_subdivision(self, rng):
        # vertices of a graph are 0.5-coarse dense in its subdivision (edge length 1/2)
        tree = random_tree(rng, 30)
        n = tree.n
        edges = []
        for k, (u, v) in enumerate(tree.edges):
            mid = n + k
            edges.extend([(u, mid), (mid, v)])
        sub = Graph(n + len(tree.edges), edges)
        mat = 0.5 * np.array([[float(d) for d in sub.bfs_distances(i)] for i in range(sub.n)])
        space = FiniteMetricSpace.from_matrix(mat)
        ok, _ = is_coarse_dense(range(n), space, 0.5)
        assert ok

    def test_dense_subset_inherits_coarse_connectivity(self, rng):
        # a C-coarse dense subset of a c-coarse connected space is (2C+c)-coarse connected
        for _ in range(100):
            tree = random_tree(rng, 150)
            space = FiniteMetricSpace.from_graph(tree)
            keep = sorted(rng.sample(range(150), rng.randint(30, 120)))
            sub = space.subspace(keep)
            rows = np.array([space.dist_row(i) for i in keep])
            C = float(rows.min(axis=0).max())  # the subset is C-coarse dense by construction
            c = 1.0  # a tree is 1-coarse connected
            assert min_connectivity_scale(sub) <= 2 * C + c + 1e-9

    def test_empty_subset_rejected(self):
        with pytest.raises(PreconditionError):
            is_coarse_dense([], int_space([0, 1]), 1)


class TestHausdorff:
    def test_equal_sets(self):
        space = int_space(range(5))
        assert hausdorff_distance([0, 2], [0, 2], space) == 0

    def test_singletons(self):
        space = int_space([0, 3])
        assert hausdorff_distance([0], [1], space) == 3

    def test_zero_iff_equal(self, rng):
        space = FiniteMetricSpace.from_graph(random_tree(rng, 60))
        for _ in range(30):
            A = set(rng.sample(range(60), rng.randint(1, 10)))
            B = set(rng.sample(range(60), rng.randint(1, 10)))
            d = hausdorff_distance(A, B, space)
            assert (d == 0) == (A == B)

    def test_against_double_loop_oracle(self, rng):
        for _ in range(30):
            g = random_tree(rng, 50)
            space = FiniteMetricSpace.from_graph(g)
            A = rng.sample(range(50), 7)
            B = rng.sample(range(50), 5)
            directed_ab = max(min(space.dist(a, b) for b in B) for a in A)
            directed_ba = max(min(space.dist(a, b) for a in A) for b in B)
            assert hausdorff_distance(A, B, space) == max(directed_ab, directed_ba)


class TestVerifyQie:
    def test_identity(self):
        space = int_space(range(8))
        fit = verify_qie(list(range(8)), space, space)
        assert fit.K == 1 and fit.eps == 0

    def test_doubling_map(self):
        X = int_space(range(11))
        Y = int_space(range(21))
        f = [2 * i for i in range(11)]
        checked = verify_qie(f, X, Y, QieConstants(2, 0))
        assert isinstance(checked, QieConstants)
        full = verify_qi(f, X, Y)
        assert full.C == 1  # image is the evens, 1-coarse dense in 0..20

    def test_collapse_yields_lower_witness(self):
        X = int_space([0, 10])
        Y = int_space([0, 0])
        witness = verify_qie([0, 1], X, Y, QieConstants(1, 1))
        assert isinstance(witness, Witness)
        assert witness.kind == "qie-lower"
        assert witness.violation > 0

    def test_partial_map_rejected(self):
        X = int_space(range(3))
        with pytest.raises(PreconditionError):
            verify_qie({0: 0, 1: 1}, X, X)

    def test_check_and_fit_mutually_exclusive(self, rng):
        # fitted constants always verify; constants below the fit always witness
        for _ in range(20):
            tree = random_tree(rng, 40)
            X = FiniteMetricSpace.from_graph(tree)
            f = [rng.randrange(40) for _ in range(40)]
            Y = X
            fit = verify_qie(f, X, Y)
            assert isinstance(verify_qie(f, X, Y, fit), QieConstants)
            if fit.eps > 0.5:
                squeezed = QieConstants(fit.K, fit.eps / 4)
                assert isinstance(verify_qie(f, X, Y, squeezed), Witness)


class TestCoveringNumber:
    def test_single_ball(self):
        space = int_space(range(-4, 5))
        center = space.labels.index(0)
        assert covering_number(space, center, 4, 4) == 1

    def test_integer_ball_greedy_between_bounds(self):
        # exhaustive minimal cover of B(0,4) in Z by radius-1 balls is 3
        space = int_space(range(-4, 5))
        center = space.labels.index(0)
        ball = [i for i in space.points if space.dist(center, i) <= 4]
        minimum = None
        for size in range(1, 6):
            for centers in itertools.combinations(ball, size):
                if all(any(space.dist(c, p) <= 1 for c in centers) for p in ball):
                    minimum = size
                    break
            if minimum:
                break
        assert minimum == 3
        greedy = covering_number(space, center, 4, 1)
        assert 3 <= greedy <= 5

    def test_rejects_bad_radii(self):
        space = int_space(range(5))
        with pytest.raises(ValueError):
            covering_number(space, 0, 1, 2)

    def test_monotone_in_R_antitone_in_R0(self):
        # counts grow with R for fixed R0 on the 3-regular tree ball
        from qtreekit.corpus import t4_tree
        ball = t4_tree().ball(6)
        space = FiniteMetricSpace.from_graph(ball.graph)
        counts = [covering_number(space, 0, R, 1) for R in (2, 3, 4, 5)]
        assert all(a <= b for a, b in zip(counts, counts[1:]))
        assert counts[0] < counts[-1]
        anti = [covering_number(space, 0, 5, R0) for R0 in (0, 1, 2, 5)]
        assert all(a >= b for a, b in zip(anti, anti[1:]))

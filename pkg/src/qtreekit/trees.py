"""Simplicial trees, convex closures, bottleneck and end-count criteria.

The end profile counts the components of a ball complement that escape to the
boundary sphere; at desk scale that is the only finite proxy for an unbounded
component, and the ladder of removal radii guards against false verdicts.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificateError, PreconditionError
from .metric import (TOL, DisjointSets, FiniteMetricSpace, Graph, QieConstants,
                     Witness, coarse_components, min_connectivity_scale, verify_qie)


class SimplicialTree:
    """A connected acyclic graph, rooted for cheap unique geodesics."""

    def __init__(self, graph: Graph, root: int = 0):
        if not graph.is_tree():
            raise ValueError("graph is not a tree (connected and acyclic)")
        self.graph = graph
        self.root = root
        parent = [-1] * graph.n
        depth = [0] * graph.n
        order = [root]
        seen = [False] * graph.n
        seen[root] = True
        q = deque([root])
        while q:
            u = q.popleft()
            for w in graph.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    order.append(w)
                    q.append(w)
        self.parent = parent
        self.depth = depth

    @property
    def n(self) -> int:
        return self.graph.n

    def geodesic(self, u: int, v: int):
        """Unique simple path from u to v, via the root parent tables."""
        up, vp = [], []
        a, b = u, v
        while self.depth[a] > self.depth[b]:
            up.append(a)
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            vp.append(b)
            b = self.parent[b]
        while a != b:
            up.append(a)
            vp.append(b)
            a = self.parent[a]
            b = self.parent[b]
        return up + [a] + vp[::-1]

    def dist(self, u: int, v: int) -> int:
        return len(self.geodesic(u, v)) - 1

    def valence(self, v: int) -> int:
        return self.graph.degree(v)


def tree_geodesic(tree: SimplicialTree, u: int, v: int):
    return tree.geodesic(u, v)


@dataclass
class Subtree:
    """A subtree of an ambient tree, carrying the restricted (= path) metric."""

    vertices: list            # ambient vertex ids, sorted
    tree: SimplicialTree      # induced tree on positions of `vertices`
    index_of: dict            # ambient id -> induced index


def induced_subtree(tree: SimplicialTree, vertices) -> Subtree:
    vertices = sorted(set(vertices))
    index_of = {v: i for i, v in enumerate(vertices)}
    edges = []
    for v in vertices:
        for w in tree.graph.adj[v]:
            if w > v and w in index_of:
                edges.append((index_of[v], index_of[w]))
    sub = SimplicialTree(Graph(len(vertices), edges))
    return Subtree(vertices, sub, index_of)


def convex_closure(tree: SimplicialTree, S) -> Subtree:
    """Union of the geodesics between points of S: the convex closure in a tree."""
    S = sorted(set(S))
    if not S:
        raise PreconditionError("convex closure of an empty set")
    base = S[0]
    verts = set(S)
    for s in S[1:]:
        verts.update(tree.geodesic(base, s))
    return induced_subtree(tree, verts)


@dataclass
class DensityReport:
    precondition_ok: bool   # S was c-coarse connected
    ok: bool
    bound: float            # the ceil(c/2) density bound being asserted
    worst_distance: float
    witness: Witness = None


def verify_closure_density(tree: SimplicialTree, S, c: float) -> DensityReport:
    """Assert S is ceil(c/2)-coarse dense in its convex closure.

    The precondition (S c-coarse connected in the tree metric) is checked and a
    diagnostic report returned when it fails.
    """
    S = sorted(set(S))
    if not S:
        raise PreconditionError("empty S")
    space = FiniteMetricSpace.from_graph(tree.graph)
    c_min = min_connectivity_scale(space, S)
    if c_min > c + TOL:
        return DensityReport(False, False, math.ceil(c / 2), math.inf)
    closure = convex_closure(tree, S)
    bound = math.ceil(c / 2)
    worst_v, worst_d = None, -1.0
    s_set = set(S)
    for v in closure.vertices:
        if v in s_set:
            continue
        d = min(tree.dist(v, s) for s in S)
        if d > worst_d:
            worst_v, worst_d = v, d
    worst_d = max(worst_d, 0.0)
    if worst_d <= bound + TOL:
        return DensityReport(True, True, bound, worst_d)
    return DensityReport(True, False, bound, worst_d,
                         Witness("not-coarse-dense", (worst_v,), worst_d - bound))


@dataclass
class BottleneckWitness:
    """An alternative path missing B(center, C) between geodesic endpoints."""

    pair: tuple
    center: int
    path: list


def bottleneck_check(graph: Graph, C: float, pair_sample):
    """Manning's criterion on sampled pairs; None means pass.

    For each pair one geodesic is tested (the lexicographically smallest BFS
    geodesic); every path between the endpoints must meet B(z, C) for each z
    on it, unless an endpoint already lies in that ball.
    """
    if not graph.is_connected():
        raise PreconditionError("bottleneck criterion needs a connected graph")
    if C < 0:
        raise ValueError("C must be >= 0")
    for x, y in pair_sample:
        geo = graph.shortest_path(x, y)
        for z in geo:
            ball = {v for v, d in enumerate(graph.bfs_distances(z, cutoff=C)) if d <= C + TOL}
            if x in ball or y in ball:
                continue
            alt = graph.shortest_path(x, y, forbidden=ball)
            if alt is not None:
                return BottleneckWitness((x, y), z, alt)
    return None


@dataclass
class EndProfile:
    """Escaping-component counts per removal radius b, and the stabilised verdict."""

    ladder: list
    counts: list
    verdict: str  # "0" | "1" | "2" | "ge3" | "unstable"
    R: float


def _count_class(c: int) -> str:
    return str(c) if c < 3 else "ge3"


def _profile_verdict(counts) -> str:
    classes = [_count_class(c) for c in counts]
    n = len(classes)
    stab = n
    for i in range(n - 1, -1, -1):
        if classes[i] == classes[-1]:
            stab = i
        else:
            break
    if n - stab >= (n + 1) // 2:
        return classes[-1]
    return "unstable"


def end_profile(space, x0: int, R: float, ladder, scale: float = 1.0) -> EndProfile:
    """Counts of escaping components of the complement of B(x0, b), for b in the ladder.

    A component escapes when it meets distance >= R from x0.  Every b must be
    <= R/2 so that boundary effects stay away from the removed ball.  Accepts
    a Graph (path metric, components by adjacency) or a FiniteMetricSpace
    (components at the given coarse scale).
    """
    ladder = sorted(ladder)
    if not ladder:
        raise ValueError("empty ladder")
    if R <= 0:
        raise ValueError("R must be positive")
    if ladder[-1] > R / 2 + TOL:
        raise ValueError("ladder radii must satisfy b <= R/2")
    if isinstance(space, Graph):
        dist = np.array(space.bfs_distances(x0), dtype=float)
        counts = []
        for b in ladder:
            removed = {int(v) for v in np.flatnonzero(dist <= b + TOL)}
            comps = space.components(removed=removed)
            counts.append(sum(1 for comp in comps if max(dist[v] for v in comp) >= R - TOL))
    else:
        dist = space.dist_row(x0)
        counts = []
        for b in ladder:
            kept = [int(v) for v in np.flatnonzero(dist > b + TOL)]
            if not kept:
                counts.append(0)
                continue
            sub = space.subspace(kept)
            comps = coarse_components(sub, scale)
            counts.append(sum(1 for comp in comps
                              if max(dist[kept[v]] for v in comp) >= R - TOL))
    return EndProfile(ladder, counts, _profile_verdict(counts), R)


@dataclass
class ValenceCertificate:
    s: int              # subtree vertex (ambient tree id)
    valence: int
    p: int              # graph vertex certifying the valence
    map_dist: float     # d_T(F(p), s), must be <= K + eps
    ball_radius: float  # 2K^2 + 3K eps
    ball_size: int      # |B_graph(p, ball_radius)| >= valence


@dataclass
class SubtreeFromQiResult:
    closure: Subtree
    certificates: list


def subtree_from_qi(graph: Graph, tree: SimplicialTree, F, K: float, eps: float) -> SubtreeFromQiResult:
    """Convex closure of the image of a (K, eps) quasi-isometric embedding, with valence certificates.

    Every closure vertex s of valence d_s gets a graph vertex p_s with
    d_T(F(p_s), s) <= K + eps whose ball of radius 2K^2 + 3K*eps holds at
    least d_s vertices.  A failed certificate aborts: the map was not a valid
    quasi-isometry at the declared constants.
    """
    F = list(F)
    gx = FiniteMetricSpace.from_graph(graph)
    tx = FiniteMetricSpace.from_graph(tree.graph)
    check = verify_qie(F, gx, tx, QieConstants(K, eps))
    if isinstance(check, Witness):
        raise CertificateError(f"map is not a ({K},{eps}) quasi-isometric embedding: {check}")
    closure = convex_closure(tree, set(F))
    radius = 2 * K * K + 3 * K * eps
    reach = K + eps
    preimages = {}
    for v, image in enumerate(F):
        preimages.setdefault(image, []).append(v)
    certificates = []
    for pos, s in enumerate(closure.vertices):
        valence = closure.tree.valence(pos)
        comp_of = {}
        for ci, comp in enumerate(closure.tree.graph.components(removed={pos})):
            for w in comp:
                comp_of[closure.vertices[w]] = ci
        near_s = tx.dist_row(s)
        chosen = []
        for ci in range(valence):
            candidates = []
            for t_vertex, ambient_ci in comp_of.items():
                if ambient_ci != ci or near_s[t_vertex] > reach + TOL:
                    continue
                candidates.extend(preimages.get(t_vertex, ()))
            if not candidates:
                raise CertificateError(
                    f"no graph vertex maps within K+eps of subtree vertex {s} on its component {ci}")
            chosen.append(min(candidates))
        p = min(chosen) if chosen else min(preimages.get(s, [0]))
        ball_size = sum(1 for d in graph.bfs_distances(p, cutoff=radius) if d <= radius + TOL)
        if ball_size < valence:
            raise CertificateError(
                f"ball of radius {radius} at vertex {p} holds {ball_size} < valence {valence}")
        certificates.append(ValenceCertificate(s, valence, p, float(near_s[F[p]]),
                                               radius, ball_size))
    return SubtreeFromQiResult(closure, certificates)


@dataclass
class ApproxTreeResult:
    tree: SimplicialTree
    node_of: list          # graph vertex -> tree node
    fitted: QieConstants
    levels: list           # tree node -> shell level
    warnings: list = field(default_factory=list)


def approximating_tree(graph: Graph, x0: int, C: float, pair_sample,
                       fit_sample_cap: int = 400) -> ApproxTreeResult:
    """Quotient a bottleneck graph onto a tree of shell components.

    Nodes are (shell of width 2C+1, coarse component of the shell at scale 3C);
    edges follow adjacency between consecutive shells.  Components separated by
    more than 2C cannot be bridged without meeting a deleted ball once the
    bottleneck criterion holds, which is what makes the quotient tree-like.
    The QI constants are fitted on all pairs up to ``fit_sample_cap`` vertices
    (a deterministic stride sample beyond that).
    """
    witness = bottleneck_check(graph, C, pair_sample)
    if witness is not None:
        raise PreconditionError(f"bottleneck criterion fails at C={C}: {witness}")
    width = 2 * C + 1
    scale = 3 * C
    dist = graph.bfs_distances(x0)
    if any(d == math.inf for d in dist):
        raise PreconditionError("graph is not connected")
    levels_of_vertex = [int(d // width) for d in dist]
    n_levels = max(levels_of_vertex) + 1
    shells = [[] for _ in range(n_levels)]
    for v, k in enumerate(levels_of_vertex):
        shells[k].append(v)
    node_of = [-1] * graph.n
    node_level = []
    node_members = []
    warnings = []
    for k, shell in enumerate(shells):
        pos = {v: i for i, v in enumerate(shell)}
        dsu = DisjointSets(len(shell))
        if scale > TOL:
            for v in shell:
                for w, d in enumerate(graph.bfs_distances(v, cutoff=scale)):
                    if d <= scale + TOL and w in pos and w != v:
                        dsu.union(pos[v], pos[w])
        groups = {}
        for v in shell:
            groups.setdefault(dsu.find(pos[v]), []).append(v)
        for members in sorted(groups.values(), key=min):
            node = len(node_level)
            node_level.append(k)
            node_members.append(sorted(members))
            for v in members:
                node_of[v] = node
    edges = []
    seen_edges = set()
    for u, v in graph.edges:
        nu, nv = node_of[u], node_of[v]
        if nu == nv:
            continue
        ku, kv = node_level[nu], node_level[nv]
        if ku == kv:
            warnings.append(f"same-shell adjacency between nodes {nu} and {nv}")
            continue
        seen_edges.add((min(nu, nv), max(nu, nv)))
    parent = {}
    for nu, nv in sorted(seen_edges):
        child = nu if node_level[nu] > node_level[nv] else nv
        par = nv if child == nu else nu
        if child in parent and parent[child] != par:
            warnings.append(f"node {child} adjoins several previous-shell components; merged toward lowest id")
            parent[child] = min(parent[child], par)
        else:
            parent[child] = par
    tree_edges = sorted((p, c) for c, p in parent.items())
    tree = SimplicialTree(Graph(len(node_level), tree_edges), root=node_of[x0])
    if graph.n <= fit_sample_cap:
        sample = list(range(graph.n))
    else:
        stride = math.ceil(graph.n / fit_sample_cap)
        sample = list(range(0, graph.n, stride))
    x_space = FiniteMetricSpace.from_graph(graph).subspace(sample)
    y_space = FiniteMetricSpace.from_graph(tree.graph)
    fitted = verify_qie([node_of[v] for v in sample], x_space, y_space)
    return ApproxTreeResult(tree, node_of, fitted, node_level, warnings)


class LazyTree:
    """An infinite simplicial tree given by label oracles, materialisable to finite balls."""

    def __init__(self, basepoint, neighbors_fn, dist_fn, contains_fn=None, name=""):
        self.basepoint = basepoint
        self._neighbors = neighbors_fn
        self._dist = dist_fn
        self._contains = contains_fn
        self.name = name

    def neighbors(self, label):
        return self._neighbors(label)

    def dist(self, u, v):
        return self._dist(u, v)

    def contains(self, label) -> bool:
        return True if self._contains is None else self._contains(label)

    def dedup_key(self, label):
        return label

    def ball(self, radius: int, center=None) -> "TreeBall":
        """BFS-materialise the closed ball; the result is a finite tree."""
        center = self.basepoint if center is None else center
        labels = [center]
        index = {center: 0}
        edges = []
        q = deque([(center, 0)])
        while q:
            u, d = q.popleft()
            if d >= radius:
                continue
            for w in self.neighbors(u):
                if w not in index:
                    index[w] = len(labels)
                    labels.append(w)
                    edges.append((index[u], index[w]))
                    q.append((w, d + 1))
        return TreeBall(Graph(len(labels), edges), labels, index, 0, self)


@dataclass
class TreeBall:
    graph: Graph
    labels: list
    index: dict
    center: int
    source: LazyTree = None

    def tree(self, root=None) -> SimplicialTree:
        return SimplicialTree(self.graph, self.center if root is None else root)

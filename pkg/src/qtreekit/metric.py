"""Finite metric spaces, graphs with the unit path metric, and coarse-geometry checks.

Distances are compared with the absolute tolerance ``TOL``; graph metrics are
exact integers, the tolerance only guards float-backed tables.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
import math

import numpy as np

from .errors import MetricError, PreconditionError

TOL = 1e-9


class DisjointSets:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


class Graph:
    """Simple undirected graph; unit edge lengths induce the path metric."""

    def __init__(self, n: int, edges):
        if n < 0:
            raise ValueError("vertex count must be >= 0")
        self.n = n
        adj = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) references a missing vertex")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        self.adj = adj
        self._edges = sorted(seen)

    @property
    def edges(self):
        return list(self._edges)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def bfs_distances(self, source: int, forbidden=None, cutoff=None):
        """Distances from source; unreachable vertices get math.inf."""
        dist = [math.inf] * self.n
        if forbidden and source in forbidden:
            return dist
        dist[source] = 0
        q = deque([source])
        while q:
            u = q.popleft()
            if cutoff is not None and dist[u] >= cutoff:
                continue
            for w in self.adj[u]:
                if dist[w] == math.inf:
                    if forbidden and w in forbidden:
                        continue
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    def distance(self, u: int, v: int):
        return self.bfs_distances(u)[v]

    def shortest_path(self, u: int, v: int, forbidden=None):
        """The geodesic from u to v with lexicographically smallest vertex sequence."""
        back = self.bfs_distances(v, forbidden=forbidden)
        if back[u] == math.inf:
            return None
        path = [u]
        cur = u
        while cur != v:
            # adjacency lists are sorted, so the first descent step is lex-smallest
            for w in self.adj[cur]:
                if forbidden and w in forbidden:
                    continue
                if back[w] == back[cur] - 1:
                    cur = w
                    break
            path.append(cur)
        return path

    def components(self, removed=None):
        """Connected components as sorted vertex lists, ordered by minimum vertex."""
        removed = removed or frozenset()
        seen = set(removed)
        comps = []
        for s in range(self.n):
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            q = deque([s])
            while q:
                u = q.popleft()
                for w in self.adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        q.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def is_tree(self) -> bool:
        return self.is_connected() and self.edge_count == self.n - 1


class FiniteMetricSpace:
    """Finite point set with a symmetric distance table, or a graph whose path metric backs it.

    Points are the integers 0..n-1; ``labels`` optionally attaches external
    identities (numbers, tree labels) to them.
    """

    def __init__(self, matrix=None, graph=None, labels=None):
        if (matrix is None) == (graph is None):
            raise ValueError("exactly one of matrix or graph must be given")
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        self.graph = graph
        self._rows = {}
        self.labels = labels
        if self._matrix is not None and self._matrix.shape[0] != self._matrix.shape[1]:
            raise ValueError("distance table must be square")

    @classmethod
    def from_matrix(cls, matrix, labels=None, validate=False):
        space = cls(matrix=matrix, labels=labels)
        if validate:
            space.check_metric_axioms()
        return space

    @classmethod
    def from_graph(cls, graph: Graph, labels=None):
        return cls(graph=graph, labels=labels)

    @classmethod
    def from_points(cls, values, metric=None):
        """Space on explicit labels; default metric is |x - y| for numeric labels."""
        values = list(values)
        if metric is None:
            metric = lambda x, y: abs(x - y)
        n = len(values)
        mat = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                mat[i, j] = mat[j, i] = metric(values[i], values[j])
        return cls(matrix=mat, labels=values)

    @property
    def n(self) -> int:
        return self._matrix.shape[0] if self._matrix is not None else self.graph.n

    @property
    def points(self):
        return range(self.n)

    def dist_row(self, i: int) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix[i]
        row = self._rows.get(i)
        if row is None:
            row = np.array(self.graph.bfs_distances(i), dtype=float)
            self._rows[i] = row
        return row

    def dist(self, i: int, j: int) -> float:
        return float(self.dist_row(i)[j])

    def diameter(self) -> float:
        return max(float(self.dist_row(i).max()) for i in self.points) if self.n else 0.0

    def subspace(self, indices) -> "FiniteMetricSpace":
        indices = list(indices)
        mat = np.array([self.dist_row(i)[indices] for i in indices])
        labels = None
        if self.labels is not None:
            labels = [self.labels[i] for i in indices]
        elif self.graph is not None:
            labels = indices
        return FiniteMetricSpace(matrix=mat, labels=labels)

    def check_metric_axioms(self):
        """O(n^3) validation: zero diagonal, symmetry, triangle inequality."""
        m = self._matrix
        if m is None:
            m = np.array([self.dist_row(i) for i in self.points])
        if np.any(np.abs(np.diag(m)) > TOL):
            raise MetricError("dist(x, x) != 0")
        if np.any(np.abs(m - m.T) > TOL):
            raise MetricError("distance table is not symmetric")
        if np.any(m < -TOL):
            raise MetricError("negative distance")
        n = m.shape[0]
        for k in range(n):
            if np.any(m > m[:, k][:, None] + m[k, :][None, :] + TOL):
                raise MetricError("triangle inequality fails")


@dataclass
class QieConstants:
    """Quasi-isometry constants: (1/K) d - eps <= d' <= K d + eps, image C-coarse dense."""

    K: float
    eps: float
    C: float = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.eps < 0 or (self.C is not None and self.C < 0):
            raise ValueError("eps and C must be >= 0")


@dataclass
class Witness:
    """A certified violation: the offending points and the positive amount of failure."""

    kind: str  # qie-lower | qie-upper | not-coarse-onto | not-coarse-dense
    points: tuple
    violation: float


def coarse_components(space: FiniteMetricSpace, c: float):
    """Partition into c-coarse connectivity classes (chains with gaps <= c).

    Blocks are sorted by minimum point and returned in that order.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if space.n == 0:
        raise PreconditionError("empty space")
    seen = [False] * space.n
    blocks = []
    for s in space.points:
        if seen[s]:
            continue
        comp = []
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            near = np.flatnonzero(space.dist_row(u) <= c + TOL)
            for w in near:
                w = int(w)
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        blocks.append(sorted(comp))
    return blocks


def min_connectivity_scale(space: FiniteMetricSpace, indices=None) -> float:
    """Smallest c for which the (sub)space is c-coarse connected.

    This is the largest edge of a bottleneck spanning tree; infinite tables
    yield math.inf.
    """
    idx = list(indices) if indices is not None else list(space.points)
    n = len(idx)
    if n == 0:
        raise PreconditionError("empty point set")
    if n == 1:
        return 0.0
    sub = np.array([space.dist_row(i)[idx] for i in idx])
    iu, ju = np.triu_indices(n, 1)
    vals = sub[iu, ju]
    order = np.argsort(vals, kind="stable")
    dsu = DisjointSets(n)
    comps = n
    for e in order:
        if dsu.union(int(iu[e]), int(ju[e])):
            comps -= 1
            if comps == 1:
                return float(vals[e])
    return math.inf


def is_coarse_dense(subset, ambient: FiniteMetricSpace, C: float):
    """Is every ambient point within C of the subset?  Returns (ok, worst Witness or None)."""
    subset = sorted(set(subset))
    if not subset:
        raise PreconditionError("empty subset")
    if subset[0] < 0 or subset[-1] >= ambient.n:
        raise PreconditionError("subset not contained in ambient space")
    if C < 0:
        raise ValueError("C must be >= 0")
    rows = np.array([ambient.dist_row(i) for i in subset])
    mins = rows.min(axis=0)
    worst = int(np.argmax(mins))
    worst_d = float(mins[worst])
    if worst_d <= C + TOL:
        return True, None
    return False, Witness("not-coarse-dense", (worst,), worst_d - C)


def hausdorff_distance(A, B, ambient: FiniteMetricSpace) -> float:
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise PreconditionError("Hausdorff distance needs two non-empty sets")
    rows_a = np.array([ambient.dist_row(i)[B] for i in A])
    d_ab = float(rows_a.min(axis=1).max())
    d_ba = float(rows_a.min(axis=0).max())
    return max(d_ab, d_ba)


def _as_point_map(f, n):
    if callable(f):
        f = [f(i) for i in range(n)]
    elif isinstance(f, dict):
        missing = [i for i in range(n) if i not in f]
        if missing:
            raise PreconditionError(f"map is partial: point {missing[0]} has no image")
        f = [f[i] for i in range(n)]
    else:
        f = list(f)
        if len(f) != n:
            raise PreconditionError("map is partial: wrong number of images")
    return f


def verify_qie(f, X: FiniteMetricSpace, Y: FiniteMetricSpace, constants: QieConstants = None):
    """Check or fit the quasi-isometric embedding inequality for f: X -> Y.

    With declared constants, scans all pairs and returns the first Witness on
    violation (or echoes the constants).  Without, fits K as the worst
    distance ratio over pairs with d_X >= 1, then the minimal eps.
    """
    m = _as_point_map(f, X.n)
    if constants is not None:
        K, eps = constants.K, constants.eps
        for i in range(X.n):
            dx = X.dist_row(i)[i + 1:]
            dy = Y.dist_row(m[i])[[m[j] for j in range(i + 1, X.n)]] if i + 1 < X.n else np.array([])
            over = dy - (K * dx + eps)
            j_rel = np.flatnonzero(over > TOL)
            if j_rel.size:
                j = i + 1 + int(j_rel[0])
                return Witness("qie-upper", (i, j), float(over[j_rel[0]]))
            under = (dx / K - eps) - dy
            j_rel = np.flatnonzero(under > TOL)
            if j_rel.size:
                j = i + 1 + int(j_rel[0])
                return Witness("qie-lower", (i, j), float(under[j_rel[0]]))
        return constants
    K = 1.0
    for i in range(X.n):
        dx = X.dist_row(i)[i + 1:]
        idx = [m[j] for j in range(i + 1, X.n)]
        dy = Y.dist_row(m[i])[idx] if idx else np.array([])
        mask = dx >= 1 - TOL
        if mask.any():
            dxm, dym = dx[mask], dy[mask]
            with np.errstate(divide="ignore", invalid="ignore"):
                r1 = np.where(dxm > 0, dym / dxm, 0.0)
                r2 = np.where(dym > 0, dxm / dym, 0.0)
            K = max(K, float(r1.max(initial=0.0)), float(r2.max(initial=0.0)))
    eps = 0.0
    for i in range(X.n):
        dx = X.dist_row(i)[i + 1:]
        idx = [m[j] for j in range(i + 1, X.n)]
        dy = Y.dist_row(m[i])[idx] if idx else np.array([])
        if len(dx):
            eps = max(eps, float((dy - K * dx).max(initial=0.0)),
                      float((dx / K - dy).max(initial=0.0)))
    return QieConstants(K, max(eps, 0.0))


def verify_qi(f, X: FiniteMetricSpace, Y: FiniteMetricSpace, constants: QieConstants = None):
    """verify_qie plus the C-coarse density of the image in Y."""
    m = _as_point_map(f, X.n)
    base = verify_qie(m, X, Y, constants)
    if isinstance(base, Witness):
        return base
    image = sorted(set(m))
    if constants is not None and constants.C is not None:
        ok, witness = is_coarse_dense(image, Y, constants.C)
        if not ok:
            witness = Witness("not-coarse-onto", witness.points, witness.violation)
            return witness
        return constants
    rows = np.array([Y.dist_row(i) for i in image])
    C = float(rows.min(axis=0).max())
    return QieConstants(base.K, base.eps, C)


def covering_number(space: FiniteMetricSpace, center: int, R: float, R0: float) -> int:
    """Size of a greedy cover of B(center, R) by balls of radius R0 centred in the ball.

    Greedy picks the centre covering the most uncovered points, ties broken by
    lowest point id; the result upper-bounds the optimal cover.
    """
    if R < R0 or R0 < 0:
        raise ValueError("need R >= R0 >= 0")
    ball = [int(i) for i in np.flatnonzero(space.dist_row(center) <= R + TOL)]
    uncovered = set(ball)
    count = 0
    rows = {c: space.dist_row(c) for c in ball}
    while uncovered:
        best, best_cov = None, -1
        for c in ball:
            cov = sum(1 for u in uncovered if rows[c][u] <= R0 + TOL)
            if cov > best_cov:
                best, best_cov = c, cov
        uncovered -= {u for u in uncovered if rows[best][u] <= R0 + TOL}
        count += 1
    return count

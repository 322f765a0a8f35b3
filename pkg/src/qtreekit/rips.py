"""Rips graphs and verification that the vertex inclusion is a quasi-isometry at scale r."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import TOL, FiniteMetricSpace, Graph, QieConstants, verify_qie


@dataclass
class RipsGraph:
    """Graph on the points of ``base`` with an edge iff 0 < d(x, y) <= r."""

    base: FiniteMetricSpace
    r: float
    graph: Graph


@dataclass
class RipsReport:
    connected: bool
    n_components: int
    lower_exact: bool  # d_X(a,b) <= r * d_Gamma(a,b) on all pairs in a common component
    fitted: QieConstants  # None when disconnected


def build_rips_graph(space: FiniteMetricSpace, r: float) -> RipsGraph:
    if r <= 0:
        raise ValueError("Rips scale r must be positive")
    edges = []
    for i in space.points:
        row = space.dist_row(i)[i + 1:]
        for j_rel in np.flatnonzero((row > TOL) & (row <= r + TOL)):
            edges.append((i, i + 1 + int(j_rel)))
    return RipsGraph(space, r, Graph(space.n, edges))


def verify_rips_qi(space: FiniteMetricSpace, r: float) -> RipsReport:
    """Exact lower bound and empirically fitted constants for the inclusion into the Rips graph.

    A disconnected Rips graph is reported, not raised.
    """
    rips = build_rips_graph(space, r)
    comps = rips.graph.components()
    connected = len(comps) == 1
    gamma = FiniteMetricSpace.from_graph(rips.graph)
    lower_exact = True
    for i in space.points:
        dx = space.dist_row(i)[i + 1:]
        dg = gamma.dist_row(i)[i + 1:]
        finite = np.isfinite(dg)
        if np.any(dx[finite] > r * dg[finite] + TOL):
            lower_exact = False
            break
    fitted = None
    if connected and space.n > 0:
        fitted = verify_qie(list(space.points), space, gamma)
    return RipsReport(connected, len(comps), lower_exact, fitted)

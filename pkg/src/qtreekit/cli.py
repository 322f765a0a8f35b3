"""Command-line front door: file ingestion, named corpus actions, pipeline reports.

Reports are deterministic given the run configuration; ``--kv`` emits one
dot-namespaced ``key=value`` pair per line.  Exit status: 0 clean, 1 malformed
input or module error, 2 inconclusive verdict.
"""
from __future__ import annotations

import argparse
import math
import os
import random
import sys

from . import busemann as bz
from . import corpus
from .actions import (LINE, QuasiActionSpec, classify_hyperbolic_type_tree,
                      classify_trichotomy, element_type, orbit_diagnosis,
                      quasi_orbit, verify_quasi_action)
from .errors import GraphFormatError, QtreekitError
from .metric import FiniteMetricSpace, Graph, QieConstants, Witness, coarse_components, is_coarse_dense
from .quasimorphisms import brooks, classify_line_reduction, fit_bavard, fit_defect, homogenise, homogenised
from .rips import build_rips_graph, verify_rips_qi
from .trees import (LazyTree, SimplicialTree, approximating_tree, bottleneck_check,
                    convex_closure, end_profile, verify_closure_density)
from .words import Word, enumerate_ball

INCONCLUSIVE_VERDICTS = {"inconclusive", "indeterminate", "undecided", "unstable"}


# ---------------------------------------------------------------------------
# Graph and generator-map file formats

def ingest_graph(path: str) -> Graph:
    """Parse the line-oriented graph format: header ``g <n>``, edges ``e <u> <v>``."""
    n = None
    edges = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "g":
                if n is not None:
                    raise GraphFormatError("duplicate header", line_no)
                if len(parts) != 2 or not parts[1].isdigit():
                    raise GraphFormatError("header must be 'g <n>'", line_no)
                n = int(parts[1])
            elif parts[0] == "e":
                if n is None:
                    raise GraphFormatError("edge before header", line_no)
                if len(parts) != 3:
                    raise GraphFormatError("edge must be 'e <u> <v>'", line_no)
                try:
                    u, v = int(parts[1]), int(parts[2])
                except ValueError:
                    raise GraphFormatError("edge endpoints must be integers", line_no)
                if not (0 <= u < n and 0 <= v < n):
                    raise GraphFormatError(f"vertex out of range 0..{n - 1}", line_no)
                if u == v:
                    raise GraphFormatError(f"self-loop at vertex {u}", line_no)
                key = (min(u, v), max(u, v))
                if key in seen:
                    raise GraphFormatError(f"duplicate edge ({u},{v})", line_no)
                seen.add(key)
                edges.append((u, v))
            else:
                raise GraphFormatError(f"unknown record {parts[0]!r}", line_no)
    if n is None:
        raise GraphFormatError("missing 'g <n>' header")
    return Graph(n, edges)


def emit_graph(graph: Graph) -> str:
    lines = [f"g {graph.n}"]
    lines.extend(f"e {u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def ingest_generator_maps(path: str, graph: Graph):
    """Parse ``gens <k>`` plus ``m <gen> <u> <v>`` lines into vertex permutations."""
    k = None
    maps = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "gens":
                if k is not None:
                    raise GraphFormatError("duplicate gens header", line_no)
                if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                    raise GraphFormatError("header must be 'gens <k>'", line_no)
                k = int(parts[1])
                maps = [dict() for _ in range(k)]
            elif parts[0] == "m":
                if k is None:
                    raise GraphFormatError("map line before gens header", line_no)
                if len(parts) != 4:
                    raise GraphFormatError("map must be 'm <gen> <u> <v>'", line_no)
                try:
                    gen, u, v = int(parts[1]), int(parts[2]), int(parts[3])
                except ValueError:
                    raise GraphFormatError("map fields must be integers", line_no)
                if not (1 <= gen <= k):
                    raise GraphFormatError(f"generator out of range 1..{k}", line_no)
                if not (0 <= u < graph.n and 0 <= v < graph.n):
                    raise GraphFormatError("map vertex out of range", line_no)
                if u in maps[gen - 1]:
                    raise GraphFormatError(f"vertex {u} mapped twice by generator {gen}", line_no)
                maps[gen - 1][u] = v
            else:
                raise GraphFormatError(f"unknown record {parts[0]!r}", line_no)
    if k is None:
        raise GraphFormatError("missing 'gens <k>' header")
    perms = []
    for gen, table in enumerate(maps, start=1):
        if len(table) != graph.n:
            raise GraphFormatError(f"generator {gen} must map every vertex exactly once")
        perm = [table[u] for u in range(graph.n)]
        if sorted(perm) != list(range(graph.n)):
            raise GraphFormatError(f"generator {gen} is not a bijection on the vertices")
        perms.append(perm)
    return perms


# ---------------------------------------------------------------------------
# Reports

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if abs(value - round(value)) < 1e-12 and abs(value) < 1e15:
            return str(int(round(value)))
        return f"{value:.9g}"
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


class Report:
    def __init__(self):
        self.items = []
        self.inconclusive = False

    def add(self, key, value):
        self.items.append((key, _fmt(value)))
        if isinstance(value, str) and value in INCONCLUSIVE_VERDICTS:
            self.inconclusive = True

    def add_constant(self, key, value, provenance):
        """Constants always echo whether they were fitted or declared."""
        self.add(key, value)
        self.items.append((f"{key}.provenance", provenance))

    def render(self, kv: bool) -> str:
        if kv:
            return "\n".join(f"{k}={v}" for k, v in self.items) + "\n"
        return "\n".join(f"{k} = {v}" for k, v in self.items) + "\n"


def _add_qie(report: Report, prefix: str, fit: QieConstants, provenance="fitted"):
    report.add_constant(f"{prefix}.K", fit.K, provenance)
    report.add_constant(f"{prefix}.eps", fit.eps, provenance)
    if fit.C is not None:
        report.add_constant(f"{prefix}.C", fit.C, provenance)


def _add_witness(report: Report, prefix: str, witness: Witness):
    report.add(f"{prefix}.kind", witness.kind)
    report.add(f"{prefix}.points", list(witness.points))
    report.add(f"{prefix}.violation", witness.violation)


# ---------------------------------------------------------------------------
# Input spaces and named actions

def _parse_floats(text: str):
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def _parse_ints(text: str):
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _load_space(args) -> FiniteMetricSpace:
    if getattr(args, "graph", None):
        return FiniteMetricSpace.from_graph(ingest_graph(args.graph))
    if getattr(args, "points", None):
        return FiniteMetricSpace.from_points(_parse_floats(args.points))
    raise QtreekitError("need --graph FILE or --points LIST")


def build_action(args) -> corpus.CorpusAction:
    name = args.action
    if name == "f2-on-t4":
        return corpus.f2_on_t4()
    if name == "zn-line":
        return corpus.zn_line(int(getattr(args, "k", 1) or 1))
    if name == "z2-line":
        return corpus.z2_line()
    if name == "dihedral-line":
        return corpus.dihedral_line()
    if name == "coset-tree":
        primes = _parse_ints(getattr(args, "primes", None) or "2,3,5")
        return corpus.coset_tree_action(primes)
    if name == "brooks-line":
        return corpus.brooks_line(getattr(args, "word", None) or "ab")
    if name == "dihedral-qm":
        word = getattr(args, "word", None) or "ab"
        t = getattr(args, "t", None) or "b"
        t_gen = Word.from_str(t).letters[0]
        return corpus.dihedral_qm_line(word, t_gen=t_gen)
    if name == "cyclic-star":
        return corpus.cyclic_star(int(getattr(args, "k", 3) or 3),
                                  int(getattr(args, "depth", 4) or 4))
    if name == "z-hairy-line":
        return corpus.z_hairy_line(int(getattr(args, "k", 1) or 1))
    if name == "dihedral-hairy-line":
        return corpus.dihedral_hairy_line()
    if name == "broken-dihedral-line":
        return corpus.broken_dihedral_line()
    if name == "graph-action":
        if not getattr(args, "graph", None) or not getattr(args, "maps", None):
            raise QtreekitError("graph-action needs --graph FILE and --maps FILE")
        graph = ingest_graph(args.graph)
        perms = ingest_generator_maps(args.maps, graph)
        return corpus.graph_action(graph, perms)
    if name == "conjugated":
        base = getattr(args, "base", None)
        qi = getattr(args, "qi", None)
        if not base or not qi:
            raise QtreekitError("conjugated needs --base NAME and --qi NAME")
        inner = argparse.Namespace(**{**vars(args), "action": base})
        return corpus.conjugated(build_action(inner), qi)
    raise QtreekitError(f"unknown action {name!r}")


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_rips(args, report: Report, rng):
    space = _load_space(args)
    report.add("rips.n", space.n)
    report.add("rips.r", args.r)
    result = verify_rips_qi(space, args.r)
    report.add("rips.connected", result.connected)
    report.add("rips.components", result.n_components)
    report.add("rips.lower_exact", result.lower_exact)
    if result.fitted is not None:
        _add_qie(report, "rips.fit", result.fitted)
    if args.sweep:
        for s in _parse_floats(args.sweep):
            sub = verify_rips_qi(space, s)
            report.add(f"rips.sweep.{_fmt(s)}.connected", sub.connected)
            if sub.fitted is not None:
                report.add(f"rips.sweep.{_fmt(s)}.K", sub.fitted.K)
                report.add(f"rips.sweep.{_fmt(s)}.eps", sub.fitted.eps)


def _cmd_coarse(args, report: Report, rng):
    space = _load_space(args)
    blocks = coarse_components(space, args.c)
    report.add("coarse.c", args.c)
    report.add("coarse.blocks", len(blocks))
    for i, block in enumerate(blocks):
        shown = [space.labels[v] for v in block] if space.labels is not None else block
        report.add(f"coarse.block.{i}", shown)
    if args.subset:
        subset = _parse_ints(args.subset)
        ok, witness = is_coarse_dense(subset, space, args.C)
        report.add("coarse.dense", ok)
        if witness is not None:
            _add_witness(report, "coarse.witness", witness)


def _cmd_cclosure(args, report: Report, rng):
    graph = ingest_graph(args.graph)
    tree = SimplicialTree(graph)
    subset = _parse_ints(args.subset)
    closure = convex_closure(tree, subset)
    report.add("cclosure.subset_size", len(set(subset)))
    report.add("cclosure.closure_size", len(closure.vertices))
    report.add("cclosure.vertices", closure.vertices)
    if args.c is not None:
        density = verify_closure_density(tree, subset, args.c)
        report.add("cclosure.precondition_ok", density.precondition_ok)
        report.add("cclosure.dense", density.ok)
        report.add("cclosure.bound", density.bound)
        report.add("cclosure.worst_distance", density.worst_distance)


def _cmd_bottleneck(args, report: Report, rng):
    graph = ingest_graph(args.graph)
    pairs = _sample_pairs(graph.n, args.pairs, rng)
    witness = bottleneck_check(graph, args.C, pairs)
    report.add("bottleneck.C", args.C)
    report.add("bottleneck.pairs", len(pairs))
    report.add("bottleneck.pass", witness is None)
    if witness is not None:
        report.add("bottleneck.witness.pair", list(witness.pair))
        report.add("bottleneck.witness.center", witness.center)
        report.add("bottleneck.witness.path", witness.path)


def _cmd_ends(args, report: Report, rng):
    graph = ingest_graph(args.graph)
    ladder = _parse_ints(args.ladder) if args.ladder else [0, 1, 2, 3, 4]
    ladder = [b for b in ladder if b <= args.R / 2]
    profile = end_profile(graph, args.x0, args.R, ladder)
    report.add("ends.R", args.R)
    report.add("ends.ladder", profile.ladder)
    report.add("ends.counts", profile.counts)
    report.add("ends.verdict", profile.verdict)


def _cmd_tree_approx(args, report: Report, rng):
    graph = ingest_graph(args.graph)
    pairs = _sample_pairs(graph.n, args.pairs, rng)
    result = approximating_tree(graph, args.x0, args.C, pairs)
    report.add("tree_approx.C", args.C)
    report.add("tree_approx.nodes", result.tree.n)
    report.add("tree_approx.warnings", len(result.warnings))
    _add_qie(report, "tree_approx.fit", result.fitted)


def _cmd_orbit(args, report: Report, rng):
    action = build_action(args)
    radii = _parse_ints(args.radii) if args.radii else list(range(1, (args.word_radius or 4) + 1))
    diag = orbit_diagnosis(action.spec, action.x0, radii, max_points=args.max_points)
    report.add("orbit.action", action.name)
    for r in diag.radii:
        report.add(f"orbit.size.{r}", diag.sizes[r])
        report.add(f"orbit.c.{r}", diag.c_of[r])
    for R in sorted(diag.proper_counts):
        report.add(f"orbit.proper.{R}", diag.proper_counts[R])
    report.add("orbit.stabilised", diag.stabilised)
    report.add("orbit.verdict", diag.verdict)


def _cmd_verify_qa(args, report: Report, rng):
    action = build_action(args)
    orbit = quasi_orbit(action.spec, action.x0, args.word_radius, max_points=args.max_points)
    points = orbit.points[: args.points]
    fit = verify_quasi_action(action.spec, args.word_radius, points,
                              pair_radius=min(args.word_radius, args.pair_radius))
    report.add("qa.action", action.name)
    report.add("qa.word_radius", args.word_radius)
    report.add("qa.points", len(points))
    report.add_constant("qa.fit.K", fit.K, "fitted")
    report.add_constant("qa.fit.eps", fit.eps, "fitted")
    report.add_constant("qa.fit.C", fit.C, "fitted")
    report.add("qa.axiom2_max", fit.axiom2_max)
    report.add("qa.axiom3_max", fit.axiom3_max)
    if action.spec.declared is not None:
        report.add_constant("qa.declared.K", action.spec.declared.K, "declared")
        report.add_constant("qa.declared.eps", action.spec.declared.eps, "declared")


def _cmd_element_type(args, report: Report, rng):
    action = build_action(args)
    g = Word.from_str(args.word)
    result = element_type(action.spec, g, action.x0, N=args.N)
    report.add("element.action", action.name)
    report.add("element.word", str(g))
    report.add("element.N", args.N)
    report.add("element.verdict", result.verdict)
    report.add("element.slope", result.slope)


def _cmd_classify(args, report: Report, rng):
    action = build_action(args)
    ladder = _parse_ints(args.ladder) if args.ladder else None
    result = classify_trichotomy(action.spec, action.x0, args.word_radius, args.R,
                                 ladder=ladder, max_points=args.max_points)
    report.add("trichotomy.action", action.name)
    report.add("trichotomy.word_radius", args.word_radius)
    report.add("trichotomy.R", args.R)
    report.add("trichotomy.verdict", result.verdict)
    report.add("trichotomy.orbit_verdict", result.diagnosis.verdict)
    report.add("trichotomy.stabilised", result.diagnosis.stabilised)
    if result.profile is not None:
        report.add("trichotomy.rips_scale", result.rips_scale)
        report.add("trichotomy.R_used", result.R_used)
        report.add("trichotomy.ends.ladder", result.profile.ladder)
        report.add("trichotomy.ends.counts", result.profile.counts)
        report.add("trichotomy.ends.verdict", result.profile.verdict)
    spec = action.spec
    if spec.kind == "genuine-action" and (isinstance(spec.target, (LazyTree, type(LINE)))):
        sample = enumerate_ball(spec.alphabet_size, min(args.type_radius, 3))
        typed = classify_hyperbolic_type_tree(spec, sample[1:], action.x0, N=args.N)
        report.add("hyperbolic.type", typed.verdict)
        report.add("hyperbolic.loxodromics", len(typed.loxodromics))


def _cmd_qm(args, report: Report, rng):
    f = brooks(args.word)
    report.add("qm.word", args.word)
    report.add("qm.radius", args.radius)
    defect = fit_defect(f, args.radius)
    report.add_constant("qm.defect", defect, "fitted")
    g = Word.from_str(args.word)
    report.add("qm.homogenise", homogenise(f, g, N=args.N))
    B = homogenised(f, N=args.N)
    report.add_constant("qm.bavard", fit_bavard(B, min(args.radius, 4)), "fitted")


def _cmd_busemann(args, report: Report, rng):
    action = build_action(args)
    l = Word.from_str(args.l) if args.l else action.loxodromic
    if l is None:
        raise QtreekitError("no loxodromic element; pass --l WORD")
    report.add("busemann.action", action.name)
    report.add("busemann.l", str(l))
    report.add("busemann.N", args.N)
    report.add("busemann.M", args.M)
    ray = bz.RaySequence(action.spec, l, action.x0, N=args.N)
    if args.words:
        words = [Word.from_str(w) for w in args.words.split(",")]
    else:
        words = [l]
        for g in action.spec.generators():
            if bz._preserves_ends(action.spec, g, ray) and g not in words:
                words.append(g)
    values = bz.busemann_values(action.spec, l, action.x0, words, N=args.N, M=args.M,
                                check=False, ray=ray)
    for g in words:
        report.add(f"busemann.value.{g}", values[g])
    sym = bz.verify_busemann_symmetry(action.spec, l, words, action.x0,
                                      N=args.N, M=args.M, check=False)
    report.add("busemann.symmetry.max", sym.max_homogenised_sum)
    report.add_constant("busemann.L", sym.L, "fitted")
    report.add("busemann.raw_bound_ok", sym.raw_bound_ok)
    if args.reduction == "line":
        red = bz.line_reduction_map(action.spec, l, action.x0, args.word_radius,
                                    N=args.N, check=False)
        report.add("busemann.reduction.upper_max_slack", red.upper_max_slack)
        report.add("busemann.reduction.lower_min_slack", red.lower_min_slack)
        report.add_constant("busemann.reduction.M", red.equivariance_M, "fitted")
        report.add("busemann.reduction.onto_gap", red.onto_gap)
    elif args.reduction == "dihedral":
        t = Word.from_str(args.t) if args.t else action.reversing
        if t is None:
            raise QtreekitError("dihedral reduction needs --t WORD")
        red = bz.dihedral_reduction(action.spec, t, l, action.x0,
                                    word_radius=args.word_radius, N=args.N, M=args.M,
                                    check=False)
        report.add("busemann.dihedral.antisymmetry", red.antisymmetry_residual)
        report.add("busemann.dihedral.square", red.square_residual)
        report.add_constant("busemann.dihedral.M", red.equivariance_M, "fitted")
        report.add("busemann.dihedral.coset_elliptic", red.coset_all_elliptic)


def _cmd_reduce_line(args, report: Report, rng):
    action = build_action(args)
    tri = classify_trichotomy(action.spec, action.x0, args.radius, 2 * args.radius,
                              max_points=args.max_points)
    if tri.verdict != "line":
        raise QtreekitError(f"reduce-line needs line-like quasi-orbits, classify said {tri.verdict}")
    result = classify_line_reduction(action.spec, args.radius, N=args.N)
    report.add("reduce.action", action.name)
    report.add("reduce.radius", args.radius)
    report.add("reduce.verdict", result.verdict)
    report.add("reduce.theta", list(result.theta))
    report.add("reduce.residual", result.residual)
    report.add("reduce.kernel_match", result.kernel_match)
    report.add("reduce.simplicial", result.simplicial)
    if result.bavard_witness is not None:
        report.add("reduce.witness.word", str(result.bavard_witness[0]))
        report.add("reduce.witness.value", result.bavard_witness[1])


def _sample_pairs(n, count, rng):
    if n < 2:
        return []
    pairs = []
    for _ in range(count):
        u = rng.randrange(n)
        v = rng.randrange(n - 1)
        if v >= u:
            v += 1
        pairs.append((u, v))
    return pairs


# ---------------------------------------------------------------------------
# Parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtreekit",
                                     description="coarse geometry of quasi-actions on trees and lines")
    parser.add_argument("--kv", action="store_true", help="key=value report format")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def action_args(p):
        p.add_argument("--action", required=True)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--primes", default=None)
        p.add_argument("--word", default=None)
        p.add_argument("--t", default=None)
        p.add_argument("--base", default=None)
        p.add_argument("--qi", default=None)
        p.add_argument("--graph", default=None)
        p.add_argument("--maps", default=None)
        p.add_argument("--max-points", dest="max_points", type=int, default=200000)

    p = sub.add_parser("rips", help="build a Rips graph and verify the inclusion")
    p.add_argument("--graph")
    p.add_argument("--points")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--sweep", default=None)
    p.set_defaults(func=_cmd_rips)

    p = sub.add_parser("coarse", help="coarse components and coarse density")
    p.add_argument("--graph")
    p.add_argument("--points")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--subset", default=None)
    p.add_argument("--C", type=float, default=0.0)
    p.set_defaults(func=_cmd_coarse)

    p = sub.add_parser("cclosure", help="convex closure of a vertex set in a tree")
    p.add_argument("--graph", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--c", type=float, default=None)
    p.set_defaults(func=_cmd_cclosure)

    p = sub.add_parser("bottleneck", help="Manning bottleneck criterion on sampled pairs")
    p.add_argument("--graph", required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--pairs", type=int, default=20)
    p.set_defaults(func=_cmd_bottleneck)

    p = sub.add_parser("ends", help="escaping-component profile of a graph ball")
    p.add_argument("--graph", required=True)
    p.add_argument("--x0", type=int, default=0)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--ladder", default=None)
    p.set_defaults(func=_cmd_ends)

    p = sub.add_parser("tree-approx", help="approximating tree of a bottleneck graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--x0", type=int, default=0)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--pairs", type=int, default=20)
    p.set_defaults(func=_cmd_tree_approx)

    p = sub.add_parser("orbit", help="quasi-orbit diagnosis (connectivity scale, properness)")
    action_args(p)
    p.add_argument("--radii", default=None)
    p.add_argument("--word-radius", dest="word_radius", type=int, default=4)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("verify-qa", help="fit quasi-action constants on samples")
    action_args(p)
    p.add_argument("--word-radius", dest="word_radius", type=int, default=2)
    p.add_argument("--pair-radius", dest="pair_radius", type=int, default=2)
    p.add_argument("--points", type=int, default=24)
    p.set_defaults(func=_cmd_verify_qa)

    p = sub.add_parser("element-type", help="elliptic/loxodromic classification of one element")
    action_args(p)
    p.add_argument("--N", type=int, default=32)
    p.set_defaults(func=_cmd_element_type)

    p = sub.add_parser("classify", help="trichotomy (point/line/bushy) plus hyperbolic type")
    action_args(p)
    p.add_argument("--word-radius", dest="word_radius", type=int, default=5)
    p.add_argument("--R", type=float, default=12)
    p.add_argument("--ladder", default=None)
    p.add_argument("--type-radius", dest="type_radius", type=int, default=2)
    p.add_argument("--N", type=int, default=32)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("qm", help="subword quasi-morphism: defect, homogenisation, commutator sup")
    p.add_argument("--word", required=True)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--N", type=int, default=64)
    p.set_defaults(func=_cmd_qm)

    p = sub.add_parser("busemann", help="Busemann values, symmetry, and reduction maps")
    action_args(p)
    p.add_argument("--l", default=None)
    p.add_argument("--words", default=None)
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--M", type=int, default=32)
    p.add_argument("--word-radius", dest="word_radius", type=int, default=4)
    p.add_argument("--reduction", choices=["none", "line", "dihedral"], default="none")
    p.set_defaults(func=_cmd_busemann)

    p = sub.add_parser("reduce-line", help="can the line quasi-action be made isometric?")
    action_args(p)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--N", type=int, default=64)
    p.set_defaults(func=_cmd_reduce_line)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reserves 2 for usage errors; here status 2 means "inconclusive"
        return 0 if exc.code == 0 else 1
    seed = os.environ.get("QTREEKIT_SEED")
    if seed is not None:
        try:
            args.seed = int(seed)
        except ValueError:
            print("error: QTREEKIT_SEED must be an integer", file=sys.stderr)
            return 1
    rng = random.Random(args.seed)
    report = Report()
    report.add("config.command", args.command)
    report.add("config.seed", args.seed)
    try:
        args.func(args, report, rng)
    except (QtreekitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report.render(args.kv))
    return 2 if report.inconclusive else 0


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()

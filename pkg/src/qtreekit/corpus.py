"""Named corpus actions: the worked examples, runnable without writing code.

Each constructor returns a CorpusAction bundling the spec, its basepoint and
any suggested loxodromic/reversing elements, so the CLI can wire budgets
straight onto them.
"""
from __future__ import annotations

from dataclasses import dataclass

from .actions import LINE, Line, MetricTarget, QuasiActionSpec, conjugate_quasi_action, coset_tree
from .errors import PreconditionError
from .metric import FiniteMetricSpace, Graph
from .quasimorphisms import (DihedralSpec, antisymmetrised, brooks, dihedral_action,
                             homogenised, homomorphism_qm, translation_action)
from .trees import LazyTree
from .words import Word, reduce_letters

SQRT2 = 2 ** 0.5


@dataclass
class CorpusAction:
    name: str
    spec: QuasiActionSpec
    x0: object
    loxodromic: Word = None      # a suggested loxodromic element, when one exists
    reversing: Word = None       # a suggested end-swapping element (dihedral corpora)
    notes: str = ""


# ---------------------------------------------------------------------------
# Cayley tree of the free group on two generators

def _t4_neighbors(label):
    out = []
    for s in (1, -1, 2, -2):
        if label and label[-1] == -s:
            out.append(label[:-1])
        else:
            out.append(label + (s,))
    return out


def _t4_dist(u, v):
    p = 0
    for a, b in zip(u, v):
        if a != b:
            break
        p += 1
    return (len(u) - p) + (len(v) - p)


def t4_tree() -> LazyTree:
    return LazyTree((), _t4_neighbors, _t4_dist,
                    contains_fn=lambda w: isinstance(w, tuple), name="T4")


def f2_on_t4() -> CorpusAction:
    """F2 acting on its own Cayley tree by left multiplication."""
    tree = t4_tree()
    def evaluate(word, label):
        return reduce_letters(word.letters + label)
    spec = QuasiActionSpec(2, evaluate, tree, kind="genuine-action", name="f2-on-t4")
    return CorpusAction("f2-on-t4", spec, (), loxodromic=Word((1,)))


# ---------------------------------------------------------------------------
# Line actions

def zn_line(k: int = 1) -> CorpusAction:
    """Z translating the line by k (a genuine simplicial action for integer k)."""
    f = homomorphism_qm([float(k)], alphabet_size=1)
    spec = translation_action(f)
    spec.name = f"zn-line({k})"
    return CorpusAction(spec.name, spec, 0.0, loxodromic=Word((1,)) if k else None)


def z2_line() -> CorpusAction:
    """Z^2 on the line by the homomorphism a -> 1, b -> sqrt(2) (zero kernel)."""
    f = homomorphism_qm([1.0, SQRT2])
    spec = translation_action(f)
    spec.name = "z2-line"
    return CorpusAction(spec.name, spec, 0.0, loxodromic=Word((1,)))


def dihedral_line() -> CorpusAction:
    """Infinite dihedral group: a translates by 1, t reflects through 0."""
    def evaluate(word, x):
        sign, shift = 1, 0.0
        for s in word.letters:
            if abs(s) == 1:
                m_sign, m_shift = 1, float(1 if s > 0 else -1)
            else:
                m_sign, m_shift = -1, 0.0
            sign, shift = sign * m_sign, sign * m_shift + shift
        return sign * x + shift
    spec = QuasiActionSpec(2, evaluate, LINE, kind="genuine-action", name="dihedral-line")
    return CorpusAction(spec.name, spec, 0.0, loxodromic=Word((1,)), reversing=Word((2,)))


def brooks_line(pattern: str = "ab") -> CorpusAction:
    """Translation quasi-action by the subword-counting quasi-morphism of the pattern."""
    f = brooks(pattern)
    spec = translation_action(f)
    spec.name = f"brooks-line({pattern})"
    lox = Word.from_str(pattern)
    return CorpusAction(spec.name, spec, 0.0, loxodromic=lox)


def dihedral_qm_line(pattern: str = "ab", t_gen: int = 2, N: int = 32) -> CorpusAction:
    """Dihedral quasi-action from an antisymmetrised homogenised subword count.

    The index-2 subgroup is the even-letter-count parity of the designated
    generator; q is antisymmetric in t by construction.
    """
    p = homogenised(brooks(pattern), N=N)
    t = Word((t_gen,))
    q = antisymmetrised(p, t)
    spec = DihedralSpec(q=q, t=t, parity_gens=(t_gen,))
    action = dihedral_action(spec)
    action.name = f"dihedral-qm({pattern},t={t})"
    return CorpusAction(action.name, action, 0.0, reversing=t, notes="quasi-dihedral")


def broken_dihedral_line() -> CorpusAction:
    """A deliberately inconsistent dihedral evaluator (reflection keyed on the first letter).

    The membership is not multiplicative, so composite and direct evaluations
    disagree in reflection parity and the axiom-3 deviation grows linearly in
    |x|.  Kept as the corpus counterexample; nothing downstream consumes it.
    """
    def evaluate(word, x):
        letters = word.letters
        exp_a = sum(1 if s == 1 else -1 if s == -1 else 0 for s in letters)
        if letters and abs(letters[0]) == 2:
            return -x - float(exp_a)
        return x + float(exp_a)
    spec = QuasiActionSpec(2, evaluate, LINE, kind="quasi-action", name="broken-dihedral-line")
    return CorpusAction(spec.name, spec, 0.0, notes="axiom-3 deviation grows with |x|")


# ---------------------------------------------------------------------------
# Lines thickened by hairs (off-axis basepoints for Morse-constant fitting)

def _hairy_dist(u, v):
    (ku, nu), (kv, nv) = u, v
    d = abs(nu - nv)
    if ku == "h":
        d += 1
    if kv == "h":
        d += 1
    if u == v:
        return 0
    if ku == "h" and kv == "h" and nu == nv:
        return 2
    return d


def _hairy_neighbors(label):
    kind, n = label
    if kind == "h":
        return [("v", n)]
    return [("v", n - 1), ("v", n + 1), ("h", n)]


def hairy_line_tree() -> LazyTree:
    return LazyTree(("h", 0), _hairy_neighbors, _hairy_dist,
                    contains_fn=lambda p: isinstance(p, tuple) and p[0] in ("v", "h"),
                    name="hairy-line")


def z_hairy_line(k: int = 1) -> CorpusAction:
    """Z translating a line with unit hairs; the basepoint is an off-axis hair tip."""
    tree = hairy_line_tree()
    def evaluate(word, label):
        kind, n = label
        return (kind, n + k * word.exponent_sum(1))
    spec = QuasiActionSpec(1, evaluate, tree, kind="genuine-action", name=f"z-hairy-line({k})")
    return CorpusAction(spec.name, spec, ("h", 0), loxodromic=Word((1,)))


def dihedral_hairy_line() -> CorpusAction:
    """Infinite dihedral on the hairy line: a shifts by 1, t reflects through 0."""
    tree = hairy_line_tree()
    def evaluate(word, label):
        kind, n = label
        sign, shift = 1, 0
        for s in word.letters:
            if abs(s) == 1:
                m_sign, m_shift = 1, (1 if s > 0 else -1)
            else:
                m_sign, m_shift = -1, 0
            sign, shift = sign * m_sign, sign * m_shift + shift
        return (kind, sign * n + shift)
    spec = QuasiActionSpec(2, evaluate, tree, kind="genuine-action", name="dihedral-hairy-line")
    return CorpusAction(spec.name, spec, ("h", 0), loxodromic=Word((1,)), reversing=Word((2,)))


# ---------------------------------------------------------------------------
# Finite actions

def cyclic_star(k: int = 3, depth: int = 4) -> CorpusAction:
    """C_k rotating a k-armed star of the given depth; basepoint an arm tip."""
    if k < 2 or depth < 1:
        raise ValueError("need k >= 2 arms and depth >= 1")
    n = 1 + k * depth
    vertex = lambda arm, j: 1 + arm * depth + j
    edges = []
    for arm in range(k):
        edges.append((0, vertex(arm, 0)))
        for j in range(depth - 1):
            edges.append((vertex(arm, j), vertex(arm, j + 1)))
    graph = Graph(n, edges)
    perm = [0] * n
    for arm in range(k):
        for j in range(depth):
            perm[vertex(arm, j)] = vertex((arm + 1) % k, j)
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    target = MetricTarget(FiniteMetricSpace.from_graph(graph), name="star")
    def evaluate(word, v):
        for s in reversed(word.letters):
            v = perm[v] if s > 0 else inv[v]
        return v
    spec = QuasiActionSpec(1, evaluate, target, kind="genuine-action", name=f"cyclic-star({k},{depth})")
    return CorpusAction(spec.name, spec, vertex(0, depth - 1))


def coset_tree_action(primes=(2, 3, 5)) -> CorpusAction:
    """The coset-construction action of a truncated restricted product of cyclic groups."""
    tree, spec = coset_tree(primes)
    spec.name = "coset-tree(" + ",".join(str(p) for p in primes) + ")"
    return CorpusAction(spec.name, spec, tree.basepoint,
                        notes="every element elliptic; orbits are bad across truncations")


def graph_action(graph: Graph, gen_perms) -> CorpusAction:
    """A genuine action on a finite graph from generator permutations of its vertices."""
    target = MetricTarget(FiniteMetricSpace.from_graph(graph), name="graph")
    perms = [list(p) for p in gen_perms]
    invs = []
    for p in perms:
        if sorted(p) != list(range(graph.n)):
            raise PreconditionError("generator map is not a bijection on the vertices")
        inv = [0] * graph.n
        for i, v in enumerate(p):
            inv[v] = i
        invs.append(inv)
    def evaluate(word, v):
        for s in reversed(word.letters):
            v = perms[s - 1][v] if s > 0 else invs[-s - 1][v]
        return v
    spec = QuasiActionSpec(len(perms), evaluate, target, kind="genuine-action", name="graph-action")
    return CorpusAction(spec.name, spec, 0)


# ---------------------------------------------------------------------------
# Conjugated quasi-actions (transport through a named quasi-isometry pair)

def _fold_pair():
    q = lambda x: 2 * x if x >= 0 else x
    r = lambda y: y / 2 if y >= 0 else y
    return q, r, 0.0


def _double_pair():
    return (lambda x: 2 * x), (lambda y: y / 2), 0.0


def hairy_t4_tree() -> LazyTree:
    """T4 with two extra leaf edges at every vertex (coarse dense copy of T4)."""
    def neighbors(label):
        kind = label[0]
        if kind == "h":
            return [("v", label[1])]
        w = label[1]
        return [("v", u) for u in _t4_neighbors(w)] + [("h", w, 0), ("h", w, 1)]
    def dist(u, v):
        du = 1 if u[0] == "h" else 0
        dv = 1 if v[0] == "h" else 0
        if u == v:
            return 0
        if u[0] == "h" and v[0] == "h" and u[1] == v[1]:
            return 2
        return du + dv + _t4_dist(u[1], v[1])
    return LazyTree(("v", ()), neighbors, dist, name="hairy-T4")


def conjugated(base: CorpusAction, qi_name: str) -> CorpusAction:
    """Transport a corpus action through a named quasi-isometry pair."""
    if qi_name in ("fold", "double"):
        if not isinstance(base.spec.target, Line):
            raise PreconditionError(f"{qi_name} conjugation needs a line action")
        q, r, bound = _fold_pair() if qi_name == "fold" else _double_pair()
        sample = [float(v) for v in range(-8, 9)]
        spec = conjugate_quasi_action(base.spec, q, r, LINE, sample, sample, bound,
                                      name=f"{base.name}|{qi_name}")
        return CorpusAction(spec.name, spec, q(base.x0), loxodromic=base.loxodromic)
    if qi_name == "t4-hairy":
        if base.spec.target.name != "T4":
            raise PreconditionError("t4-hairy conjugation needs an action on T4")
        hairy = hairy_t4_tree()
        q = lambda w: ("v", w)
        r = lambda label: label[1]
        sample_x = [(), (1,), (1, 2), (-2,), (2, -1)]
        sample_y = [("v", ()), ("h", (), 0), ("v", (1,)), ("h", (1, 2), 1)]
        spec = conjugate_quasi_action(base.spec, q, r, hairy, sample_x, sample_y, 1.0,
                                      name=f"{base.name}|t4-hairy")
        return CorpusAction(spec.name, spec, ("v", base.x0), loxodromic=base.loxodromic)
    raise PreconditionError(f"unknown quasi-isometry name {qi_name!r}")

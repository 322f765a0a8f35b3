"""Quasi-morphisms on free groups, homogenisation, commutator defect, and line quasi-actions.

Counting convention for subword quasi-morphisms: all starting positions in the
reduced word are scanned, so overlapping occurrences count.
"""
from __future__ import annotations

from dataclasses import dataclass

from .actions import LINE, Line, QuasiActionSpec
from .errors import PreconditionError
from .metric import TOL
from .words import Word, commutator, enumerate_ball


class QuasiMorphism:
    """Word -> real with an (optional) declared defect; evaluations are memoised."""

    def __init__(self, fn, alphabet_size=2, kind="custom", defect=None, name="",
                 source=None, power_budget=None):
        if kind not in ("homomorphism", "brooks", "homogenised", "custom"):
            raise ValueError(f"unknown kind {kind!r}")
        self._fn = fn
        self.alphabet_size = alphabet_size
        self.kind = kind
        self.defect = defect
        self.name = name
        self.source = source          # for homogenised estimators: the raw quasi-morphism
        self.power_budget = power_budget
        self._memo = {}

    def __call__(self, w: Word) -> float:
        v = self._memo.get(w.letters)
        if v is None:
            v = float(self._fn(w))
            self._memo[w.letters] = v
        return v


def _count_subword(haystack, needle) -> int:
    h, k = len(haystack), len(needle)
    return sum(1 for i in range(h - k + 1) if haystack[i:i + k] == needle)


def brooks(w, alphabet_size=None) -> QuasiMorphism:
    """Signed count of occurrences of w minus occurrences of w^-1 in reduced words."""
    if isinstance(w, str):
        w = Word.from_str(w)
    if len(w) == 0:
        raise ValueError("the pattern word must be non-empty")
    size = alphabet_size or max(2, max(abs(s) for s in w.letters))
    pattern = w.letters
    anti = w.inverse().letters
    def evaluate(g):
        return _count_subword(g.letters, pattern) - _count_subword(g.letters, anti)
    return QuasiMorphism(evaluate, size, kind="brooks", name=f"brooks({w})")


def homomorphism_qm(values, alphabet_size=None) -> QuasiMorphism:
    """The homomorphism sending generator i to values[i-1]."""
    values = list(values)
    size = alphabet_size or len(values)
    def evaluate(g):
        return sum(values[s - 1] if s > 0 else -values[-s - 1] for s in g.letters)
    return QuasiMorphism(evaluate, size, kind="homomorphism", defect=0.0,
                         name=f"hom{tuple(values)}")


def fit_defect(f: QuasiMorphism, radius: int) -> float:
    """max |f(gh) - f(g) - f(h)| over all reduced words of length <= radius."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    ball = enumerate_ball(f.alphabet_size, radius)
    worst = 0.0
    for g in ball:
        fg = f(g)
        for h in ball:
            worst = max(worst, abs(f(g * h) - fg - f(h)))
    return worst


def homogenise(f: QuasiMorphism, g: Word, N: int = 64) -> float:
    """f(g^N)/N: within D/N of the true homogenisation by defect telescoping."""
    if N < 4:
        raise ValueError("N must be >= 4")
    return f(g.power(N)) / N


def homogenised(f: QuasiMorphism, N: int = 64) -> QuasiMorphism:
    """The cached evaluator g -> f(g^N)/N."""
    qm = QuasiMorphism(lambda g: f(g.power(N)) / N, f.alphabet_size,
                       kind="homogenised", name=f"homog({f.name},N={N})",
                       source=f, power_budget=N)
    return qm


def fit_bavard(B: QuasiMorphism, radius: int, tol: float = 1e-6) -> float:
    """max |B([g, h])| over words of length <= radius.

    Requires a homogenised input: |B(g^2) - 2 B(g)| is spot-checked on short
    words and non-homogenised inputs are rejected.  A power-budget estimator
    f(g^N)/N carries telescoping error up to 2 D/N, so its spot-check
    tolerance is widened accordingly.
    """
    allowed = tol
    if B.kind == "homomorphism":
        allowed = None
    elif B.kind == "homogenised" and B.power_budget and B.source is not None:
        d_src = B.source.defect if B.source.defect is not None else fit_defect(B.source, 2)
        allowed = 2 * d_src / B.power_budget + tol
    if allowed is not None:
        probes = enumerate_ball(B.alphabet_size, min(radius, 2))
        for g in probes:
            if abs(B(g * g) - 2 * B(g)) > allowed * (1 + abs(B(g))) + 10 * TOL:
                raise PreconditionError(
                    f"input is not homogenised: |B(g^2) - 2B(g)| = {abs(B(g * g) - 2 * B(g))} at g = {g}")
    ball = enumerate_ball(B.alphabet_size, radius)
    worst = 0.0
    for g in ball:
        for h in ball:
            worst = max(worst, abs(B(commutator(g, h))))
    return worst


def translation_action(f: QuasiMorphism) -> QuasiActionSpec:
    """The line quasi-action alpha(g, x) = x + f(g); genuine iff f is a homomorphism."""
    kind = "genuine-action" if f.kind == "homomorphism" else "quasi-action"
    def evaluate(word, x):
        return x + f(word)
    return QuasiActionSpec(f.alphabet_size, evaluate, LINE, kind=kind,
                           name=f"translation({f.name})")


@dataclass
class DihedralSpec:
    """An index-2 subgroup predicate, a quasi-morphism q on it, and a fixed t outside it.

    Default membership is even total letter count of the designated
    generators, the parity arising for the corpus dihedral examples.
    """

    q: QuasiMorphism
    t: Word
    parity_gens: tuple = None
    membership: object = None  # callable Word -> bool, overrides parity_gens
    alphabet_size: int = None

    def __post_init__(self):
        if self.membership is None and not self.parity_gens:
            raise ValueError("need parity generators or an explicit membership predicate")
        if self.alphabet_size is None:
            self.alphabet_size = self.q.alphabet_size
        if self.in_subgroup(self.t):
            raise ValueError("t must lie outside the index-2 subgroup")

    def in_subgroup(self, w: Word) -> bool:
        if self.membership is not None:
            return bool(self.membership(w))
        count = sum(1 for s in w.letters if abs(s) in self.parity_gens)
        return count % 2 == 0


def dihedral_action(spec: DihedralSpec) -> QuasiActionSpec:
    """beta(h, x) = x + q(h) on the subgroup, beta(t h, x) = -x - q(h) on the other coset."""
    t_inv = spec.t.inverse()
    def evaluate(word, x):
        if spec.in_subgroup(word):
            return x + spec.q(word)
        h = t_inv * word
        if not spec.in_subgroup(h):
            raise ValueError(f"membership predicate is inconsistent: t^-1*{word} is not in the subgroup")
        return -x - spec.q(h)
    return QuasiActionSpec(spec.alphabet_size, evaluate, LINE,
                           kind="quasi-action", name=f"dihedral({spec.q.name})")


@dataclass
class AntisymmetryReport:
    max_conjugation: float   # max |q(t h t^-1) + q(h)| over the sampled subgroup ball
    max_square: float        # max |q(s^2)| over sampled s outside the subgroup
    worst_h: Word = None


def check_antisymmetry(spec: DihedralSpec, radius: int) -> AntisymmetryReport:
    ball = enumerate_ball(spec.alphabet_size, radius)
    t, t_inv = spec.t, spec.t.inverse()
    worst, worst_h = 0.0, None
    sq = 0.0
    for w in ball:
        if spec.in_subgroup(w):
            dev = abs(spec.q(t * w * t_inv) + spec.q(w))
            if dev > worst:
                worst, worst_h = dev, w
        else:
            sq = max(sq, abs(spec.q(w * w)))
    return AntisymmetryReport(worst, sq, worst_h)


def antisymmetrised(p: QuasiMorphism, t: Word) -> QuasiMorphism:
    """q(h) = (p(h) - p(t h t^-1)) / 2, antisymmetric in t by construction."""
    t_inv = t.inverse()
    return QuasiMorphism(lambda h: (p(h) - p(t * h * t_inv)) / 2, p.alphabet_size,
                         kind=p.kind if p.kind == "homogenised" else "custom",
                         name=f"antisym({p.name})")


@dataclass
class LineReductionVerdict:
    verdict: str             # reducible-to-isometric-line | obstructed | undecided
    theta: tuple             # fitted homomorphism values on the generators
    residual: float          # max |displacement(w) - theta(w)| over the ball
    kernel_match: bool
    simplicial: bool         # theta integral on the generators
    bavard_witness: tuple = None  # (commutator word, homogenised displacement)


def classify_line_reduction(action: QuasiActionSpec, radius: int, N: int = 64,
                            tol: float = 1e-6) -> LineReductionVerdict:
    """Can a line quasi-action be reduced to an isometric translation action?

    The elliptic sample must be the kernel of a fitted homomorphism; a nonzero
    homogenised displacement on a commutator is a certificate that no such
    reduction exists (to proper or CAT(0)-like targets).  Anything else is an
    honest "undecided".
    """
    if not isinstance(action.target, Line):
        raise PreconditionError("line reduction classification needs a line target")
    x0 = 0.0
    def displacement(w):
        return (action.evaluator(w.power(N), x0) - x0) / N
    k = action.alphabet_size
    theta = tuple(displacement(Word((i,))) for i in range(1, k + 1))
    eta = tol * (1 + max((abs(v) for v in theta), default=0.0))
    ball = enumerate_ball(k, radius)
    residual = 0.0
    elliptic, kernel = set(), set()
    for w in ball:
        d = displacement(w)
        th = sum(theta[abs(s) - 1] * (1 if s > 0 else -1) for s in w.letters)
        residual = max(residual, abs(d - th))
        if abs(d) <= eta:
            elliptic.add(w)
        if abs(th) <= eta:
            kernel.add(w)
    kernel_match = elliptic == kernel
    witness = None
    probe = enumerate_ball(k, min(radius, 2))
    for g in probe:
        for h in probe:
            c = commutator(g, h)
            d = displacement(c)
            if abs(d) > eta:
                witness = (c, d)
                break
        if witness:
            break
    simplicial = all(abs(v - round(v)) <= eta for v in theta)
    if residual <= eta and kernel_match:
        return LineReductionVerdict("reducible-to-isometric-line", theta, residual,
                                    True, simplicial, witness)
    if witness is not None:
        return LineReductionVerdict("obstructed", theta, residual, kernel_match,
                                    False, witness)
    return LineReductionVerdict("undecided", theta, residual, kernel_match, False, None)

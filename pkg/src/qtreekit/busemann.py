"""Quasi-horofunctions, Busemann quasi-morphisms of lineal actions, and line reductions.

The liminf along a ray is estimated as the minimum over the window [N/2, N];
on trees this equals the true value once the ray passes the projection of the
query point, and the stabilised flag gates every downstream claim.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .actions import (LINE, Line, QuasiActionSpec, classify_hyperbolic_type_tree,
                      element_type, quasi_orbit, verify_coarse_equivariance)
from .errors import LineReductionError, PreconditionError
from .metric import TOL
from .quasimorphisms import DihedralSpec, QuasiMorphism, dihedral_action, translation_action
from .words import Word, enumerate_ball


class RaySequence:
    """Cached points x_n = alpha(l^n, x0) along a verified loxodromic ray."""

    def __init__(self, spec: QuasiActionSpec, l: Word, x0, N: int = 64, check: bool = True):
        if check:
            report = element_type(spec, l, x0, N=max(16, min(N, 32)))
            if report.verdict != "loxodromic":
                raise PreconditionError(f"ray element is {report.verdict}, not loxodromic")
        self.spec = spec
        self.l = l
        self.x0 = x0
        self.N = N
        self.points = [x0]
        self.base_dist = [0.0]
        self._power = Word()
        self.ensure(N)

    def ensure(self, N: int):
        """Extend the cached ray to at least N steps."""
        dist = self.spec.target.dist
        while len(self.points) <= N:
            self._power = self._power * self.l
            p = self.spec.evaluator(self._power, self.x0)
            self.points.append(p)
            self.base_dist.append(dist(p, self.x0))
        self.N = max(self.N, N)


@dataclass
class Horofunction:
    value: float
    stabilised: bool


def quasi_horofunction(seq: RaySequence, z, N: int = None) -> Horofunction:
    """liminf estimate of d(x_n, x0) - d(x_n, z) over the window [N/2, N].

    On trees the estimate is exact once the ray has passed the projection of
    z, which is what the stabilised flag certifies.
    """
    N = seq.N if N is None else N
    seq.ensure(N)
    if not seq.spec.target.contains(z):
        raise ValueError(f"point {z!r} is outside the target")
    dist = seq.spec.target.dist
    lo = N // 2
    window = [seq.base_dist[n] - dist(seq.points[n], z) for n in range(lo, N + 1)]
    value = min(window)
    return Horofunction(float(value), max(window) - value <= TOL)


def stable_horofunction(seq: RaySequence, z, max_doublings: int = 6) -> Horofunction:
    """quasi_horofunction with the ray auto-extended until the window stabilises.

    Stabilisation always happens on trees and lines once the window passes the
    projection of z; the cap keeps pathological inputs from running away, and
    the returned flag still reports the truth.
    """
    N = seq.N
    horo = quasi_horofunction(seq, z, N)
    for _ in range(max_doublings):
        if horo.stabilised:
            break
        N *= 2
        horo = quasi_horofunction(seq, z, N)
    return horo


def _check_lineal(action, l, x0, extra=(), N=32):
    sample = [l] + list(action.generators()) + list(extra)
    report = classify_hyperbolic_type_tree(action, sample, x0, N=N)
    if report.verdict not in ("lineal+", "lineal-"):
        raise PreconditionError(f"action is {report.verdict}, not lineal")
    return report


def _preserves_ends(action, g, seq, depth=3):
    from .actions import _direction
    far = seq.points[-1]
    image = _direction(action, seq.x0, action.evaluator(g, far), depth)
    plus = _direction(action, seq.x0, far, depth)
    return image == plus


def busemann_values(action: QuasiActionSpec, l: Word, x0, words, N: int = 64,
                    M: int = 32, check: bool = True, ray: RaySequence = None) -> dict:
    """Homogenised Busemann values B(g) = eta(g^M x0)/M for the sampled words.

    The action must be lineal; for orientation-reversing (lineal-) actions the
    queried elements must preserve the two ends.
    """
    ray = ray or RaySequence(action, l, x0, N=N, check=check)
    if check:
        report = _check_lineal(action, l, x0, extra=words[: min(4, len(words))], N=min(N, 32))
        if report.verdict == "lineal-":
            for g in words:
                if not _preserves_ends(action, g, ray):
                    raise PreconditionError(
                        f"element {g} reverses orientation; Busemann values live on the preserving part")
    out = {}
    for g in words:
        z = action.evaluator(g.power(M), x0)
        out[g] = stable_horofunction(ray, z).value / M
    return out


def busemann_value(action, l, g: Word, x0, N: int = 64, M: int = 32,
                   check: bool = True, ray: RaySequence = None) -> float:
    return busemann_values(action, l, x0, [g], N=N, M=M, check=check, ray=ray)[g]


def verify_morse_inequality(action: QuasiActionSpec, l: Word, x0, triples=None,
                            N: int = 64, check: bool = True) -> float:
    """Smallest L with d(x_N, x_M) - d(x_N, x_i) >= d(x_i, x_M) - 2L over sampled M < i < N."""
    ray = RaySequence(action, l, x0, N=N, check=check)
    dist = action.target.dist
    if triples is None:
        step = max(1, N // 16)
        idx = list(range(0, N + 1, step))
        triples = [(a, b, c) for a, b, c in itertools.combinations(idx, 3)]
    cache = {}
    def d(i, j):
        key = (min(i, j), max(i, j))
        v = cache.get(key)
        if v is None:
            v = dist(ray.points[i], ray.points[j])
            cache[key] = v
        return v
    L = 0.0
    for (m, i, n) in triples:
        if not (m < i < n):
            raise ValueError("triples must satisfy M < i < N")
        slack = d(i, m) - (d(n, m) - d(n, i))
        L = max(L, slack / 2)
    return L


@dataclass
class SymmetryReport:
    max_homogenised_sum: float   # max |B+(g) + B-(g)| after homogenisation
    max_raw_sum: float           # max |eta_l(g x0) + eta_m(g x0)| before homogenisation
    L: float                     # fitted Morse constant; raw sums must stay within 6L
    raw_bound_ok: bool


def verify_busemann_symmetry(action: QuasiActionSpec, l: Word, sample, x0,
                             N: int = 64, M: int = 32, check: bool = True) -> SymmetryReport:
    """The Busemann quasi-morphisms at the two ends are minus each other."""
    ray_plus = RaySequence(action, l, x0, N=N, check=check)
    ray_minus = RaySequence(action, l.inverse(), x0, N=N, check=False)
    if check:
        _check_lineal(action, l, x0, N=min(N, 32))
    b_plus = busemann_values(action, l, x0, list(sample), N=N, M=M, check=False, ray=ray_plus)
    b_minus = busemann_values(action, l.inverse(), x0, list(sample), N=N, M=M,
                              check=False, ray=ray_minus)
    worst = max(abs(b_plus[g] + b_minus[g]) for g in sample)
    raw = 0.0
    for g in sample:
        z = action.evaluator(g, x0)
        raw = max(raw, abs(quasi_horofunction(ray_plus, z).value
                           + quasi_horofunction(ray_minus, z).value))
    L = verify_morse_inequality(action, l, x0, N=N, check=False)
    return SymmetryReport(worst, raw, L, raw <= 6 * L + TOL)


@dataclass
class LineReductionReport:
    values: list                 # F(g x0) per orbit point
    L: float
    upper_max_slack: float       # max |dF| - d, exact bound: must be <= 0 up to TOL
    lower_min_slack: float       # min |dF| - (d - 6L), must be >= 0 up to TOL
    equivariance_M: float
    onto_gap: float              # largest gap in the image along the spanned interval
    unstabilised: int            # horofunction windows that had not stabilised
    budgets: dict = field(default_factory=dict)


def line_reduction_map(action: QuasiActionSpec, l: Word, x0, word_radius: int,
                       N: int = 64, check: bool = True) -> LineReductionReport:
    """The quasi-horofunction map F from the orbit ball to the line, fully verified.

    Checks the two-sided inequality d - 6L <= |F(g x0) - F(h x0)| <= d on all
    orbit pairs (a violation aborts with the offending pair: the ray budget N
    was too small), plus coarse equivariance against translation by the
    induced quasi-morphism, plus coarse density of the image in its interval.
    """
    if check:
        report = _check_lineal(action, l, x0, N=min(N, 32))
        if report.verdict != "lineal+":
            raise PreconditionError(f"line reduction needs a lineal+ action, got {report.verdict}")
    ray = RaySequence(action, l, x0, N=N, check=check)
    orbit = quasi_orbit(action, x0, word_radius)
    horos = [stable_horofunction(ray, p) for p in orbit.points]
    values = [h.value for h in horos]
    unstabilised = sum(1 for h in horos if not h.stabilised)
    L = verify_morse_inequality(action, l, x0, N=N, check=False)
    F = np.array(values)
    D = np.array([orbit.space.dist_row(i) for i in orbit.space.points])
    dF = np.abs(F[:, None] - F[None, :])
    upper = dF - D
    np.fill_diagonal(upper, -np.inf)
    upper_max = float(upper.max()) if orbit.size > 1 else 0.0
    if upper_max > TOL:
        i, j = np.unravel_index(int(upper.argmax()), upper.shape)
        raise LineReductionError(
            f"upper bound |F(g x0)-F(h x0)| <= d(g x0, h x0) failed by {upper_max}",
            pair=(orbit.word_of[i], orbit.word_of[j]))
    lower = dF - (D - 6 * L)
    np.fill_diagonal(lower, np.inf)
    lower_min = float(lower.min()) if orbit.size > 1 else 0.0
    if lower_min < -TOL:
        i, j = np.unravel_index(int(lower.argmin()), lower.shape)
        raise LineReductionError(
            f"lower bound d - 6L <= |F(g x0)-F(h x0)| failed by {-lower_min}; raise the ray budget N",
            pair=(orbit.word_of[i], orbit.word_of[j]))
    fqm = QuasiMorphism(lambda w: stable_horofunction(ray, action.evaluator(w, x0)).value,
                        action.alphabet_size, name="busemann-values")
    beta = translation_action(fqm)
    word_sample = enumerate_ball(action.alphabet_size, min(2, word_radius))
    point_sample = orbit.points[: min(orbit.size, 60)]
    M_fit = verify_coarse_equivariance(
        lambda z: stable_horofunction(ray, z).value, action, beta, word_sample, point_sample)
    ordered = np.sort(F)
    onto_gap = float(np.diff(ordered).max()) if orbit.size > 1 else 0.0
    return LineReductionReport(values, L, upper_max, lower_min, M_fit, onto_gap,
                               unstabilised, {"N": N, "word_radius": word_radius})


@dataclass
class DihedralReductionReport:
    spec: DihedralSpec
    antisymmetry_residual: float
    square_residual: float
    equivariance_M: float
    coset_all_elliptic: bool
    coset_types: list
    budgets: dict = field(default_factory=dict)


def dihedral_reduction(action: QuasiActionSpec, t: Word, l: Word, x0,
                       word_radius: int = 3, N: int = 64, M: int = 32,
                       check: bool = True) -> DihedralReductionReport:
    """Recover the dihedral quasi-action on the line from a lineal- action.

    q is the Busemann quasi-morphism on the orientation-preserving part; the
    antisymmetry q(t h t^-1) = -q(h) is verified, the emitted dihedral action
    is checked for coarse equivariance over the full orbit (both cosets), and
    the reversing coset is confirmed elliptic.
    """
    if check:
        report = _check_lineal(action, l, x0, extra=[t], N=min(N, 32))
        if report.verdict != "lineal-":
            raise PreconditionError(f"dihedral reduction needs a lineal- action, got {report.verdict}")
    ray = RaySequence(action, l, x0, N=N, check=check)
    if _preserves_ends(action, t, ray):
        raise PreconditionError("t does not swap the two ends")
    preserving_cache = {}
    def preserves(w: Word) -> bool:
        v = preserving_cache.get(w.letters)
        if v is None:
            v = _preserves_ends(action, w, ray)
            preserving_cache[w.letters] = v
        return v
    def b_value(w: Word) -> float:
        z = action.evaluator(w.power(M), x0)
        return stable_horofunction(ray, z).value / M
    q = QuasiMorphism(b_value, action.alphabet_size, kind="homogenised", name="busemann")
    spec = DihedralSpec(q=q, t=t, membership=preserves, alphabet_size=action.alphabet_size)
    ball = enumerate_ball(action.alphabet_size, word_radius)
    t_inv = t.inverse()
    anti, square = 0.0, 0.0
    for w in ball:
        if preserves(w):
            anti = max(anti, abs(q(t * w * t_inv) + q(w)))
        else:
            square = max(square, abs(q(w * w)))
    beta = dihedral_action(spec)
    orbit = quasi_orbit(action, x0, word_radius)
    M_fit = verify_coarse_equivariance(
        lambda z: stable_horofunction(ray, z).value, action, beta,
        ball, orbit.points[: min(orbit.size, 40)])
    coset = [w for w in ball if not preserves(w)]
    types = [element_type(action, w, x0, N=max(16, min(N, 32))) for w in coset]
    all_elliptic = all(r.verdict == "elliptic" for r in types)
    return DihedralReductionReport(spec, anti, square, M_fit, all_elliptic, types,
                                   {"N": N, "M": M, "word_radius": word_radius})


@dataclass
class ScalingReport:
    lam: float
    residual: float


def scaling_comparison(b1, b2) -> ScalingReport:
    """Least-squares lambda with B2 ~ lambda * B1, plus the worst residual."""
    a = np.asarray(list(b1), dtype=float)
    b = np.asarray(list(b2), dtype=float)
    if a.shape != b.shape:
        raise ValueError("samples must be aligned on the same word set")
    denom = float((a * a).sum())
    if denom <= TOL:
        raise PreconditionError("B1 is identically zero; scaling is undefined")
    lam = float((a * b).sum() / denom)
    return ScalingReport(lam, float(np.abs(b - lam * a).max()))

"""Finite-scale checkers for uniform Taylor-remainder bounds and the
analyticity certificates built on them.

A function f is k-times weakly locally uniformly differentiable at x0 when,
for every eps > 0, some ball (x0-delta, x0+delta) satisfies

    |f(y) - sum(f^(j)(x)/j! (y-x)^j, j <= k)| <= eps*|y-x|^k

for ALL x, y in the ball.  The universal quantifier cannot be discharged by
computation, so the checkers sample the ball with a deterministic grid plus
seeded pseudo-random offsets and report verdicts "at scale": evidence, not
proof.  A fail verdict always carries a concrete witness pair that can be
replayed with the field operations.

The analyticity certificates chain these checks: a delta ladder for eps = 1
at each order, a growth estimate lambda0 for the jet coefficients, a
computed convergence radius, and a sampled verification of the Taylor
identity inside that radius (recentred at sampled x != x0 as well).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    INF,
    LCNumber,
    ONE,
    Ordering,
    Valuation,
    ZERO,
    format_lc,
    monomial,
)
from .expr import Expr, eval_lc
from .calculus import (
    PartialJet,
    partial_jet,
    partial_taylor_eval,
    taylor_jet,
    taylor_polynomial_eval,
)
from .series import _taylor_sum, lambda0_estimate, recenter

_NEG_INF = -math.inf

#: Relative scale below which residual coefficients count as binary64 noise
#: rather than a visible violation (exact corpora still produce exact zeros).
RESIDUAL_REL_TOL = 1e-12


@dataclass(frozen=True)
class SamplingPlan:
    """How the quantifier over a ball is discharged by sampling.

    Deterministic grid: offsets c * d^m for c in grid_coefficients, both
    signs, with m spanning [lambda(delta)+depth_start, lambda(delta)+depth_stop]
    in depth_step steps; plus seeded pseudo-random multi-term offsets.
    """

    grid_coefficients: tuple[float, ...] = (1.0, 0.5, 2.0)
    depth_start: Fraction = Fraction(1)
    depth_stop: Fraction = Fraction(4)
    depth_step: Fraction = Fraction(1, 2)
    random_offsets: int = 4
    seed: int = 0xC0FFEE
    max_pairs: int = 400

    def offsets(self, delta: LCNumber) -> list[LCNumber]:
        lam = delta.valuation()
        if lam == INF:
            raise ValueError("delta must be a positive nonzero radius")
        depths = []
        m = lam + self.depth_start
        while m <= lam + self.depth_stop:
            depths.append(m)
            m = m + self.depth_step
        out = []
        for m in depths:
            for c in self.grid_coefficients:
                out.append(monomial(m, c))
                out.append(monomial(m, -c))
        rng = random.Random(self.seed)
        for _ in range(self.random_offsets):
            nterms = rng.randint(2, 3)
            exps = rng.sample(depths, min(nterms, len(depths)))
            terms = []
            for e in exps:
                # Dyadic coefficients keep exact corpora (polynomials with
                # dyadic data) exactly zero-remainder under binary64.
                c = (rng.randint(16, 128) / 64.0) * rng.choice((1.0, -1.0))
                terms.append((e, c))
            out.append(LCNumber(terms))
        seen = set()
        unique = []
        for o in out:
            if o not in seen:
                seen.add(o)
                unique.append(o)
        return unique

    def points(self, x0: LCNumber, delta: LCNumber) -> list[LCNumber]:
        return [x0 + o for o in self.offsets(delta)]

    def points_nd(
        self, x0: Sequence[LCNumber], delta: LCNumber
    ) -> list[tuple[LCNumber, ...]]:
        n = len(x0)
        offs = self.offsets(delta)
        if n == 1:
            return [(x0[0] + o,) for o in offs]
        vectors = []
        span = len(offs)
        stride = max(1, span // n + 1)
        for idx in range(span):
            vectors.append(
                tuple(offs[(idx + i * stride) % span] for i in range(n))
            )
        for axis in range(n):  # axis-aligned samples
            for o in offs[: min(4, span)]:
                vectors.append(
                    tuple(o if i == axis else ZERO for i in range(n))
                )
        seen = set()
        points = []
        for vec in vectors:
            pt = tuple(x0[i] + vec[i] for i in range(n))
            if pt not in seen:
                seen.add(pt)
                points.append(pt)
        return points

    def pair_indices(self, count: int) -> list[tuple[int, int]]:
        pairs = [(i, j) for i in range(count) for j in range(count) if i != j]
        if len(pairs) <= self.max_pairs:
            return pairs
        step = len(pairs) / self.max_pairs
        return [pairs[int(i * step)] for i in range(self.max_pairs)]


@dataclass(frozen=True)
class WludReport:
    """Outcome of one sampled uniform-remainder check."""

    x0: object  # LCNumber, or tuple of them for the n-variable check
    k: int
    epsilon: LCNumber
    delta: LCNumber
    samples: int
    result: str  # "pass" | "fail"
    worst_pair: Optional[tuple]  # (x, y, lhs, rhs)
    margin: Optional[Valuation]  # lambda(rhs) - lambda(lhs); > 0 means violation
    inconclusive: int = 0  # pairs whose deciding comparison was ambiguous


@dataclass(frozen=True)
class AnalyticityCertificate:
    x0: object
    jmax: int
    kmax: int
    window: int
    lambda0: Valuation
    lambda0_head: Valuation
    delta_ladder: tuple  # ((k, delta_k, lambda(delta_k)), ...)
    t: Optional[int]
    required_radius_lambda: Optional[Fraction]
    delta: Optional[LCNumber]
    identity_checks: tuple  # ((x, y, residual lambda-level), ...)
    verdict: str  # "certified_at_scale" | "refuted" | "inconclusive"


def default_delta_ladder() -> list[LCNumber]:
    """The descending candidate radii d^(m/2), m = 0..8."""
    return [monomial(Fraction(m, 2)) for m in range(9)]


def _require_positive(value: LCNumber, name: str) -> LCNumber:
    if value.compare(ZERO) is not Ordering.GREATER:
        raise ValueError(f"{name} must be visibly positive")
    return value


def _margin(lhs: LCNumber, rhs: LCNumber) -> Valuation:
    lr = rhs.valuation()
    ll = lhs.valuation()
    if ll == INF:
        return _NEG_INF
    if lr == INF:
        return INF
    return lr - ll


def _filtered_residual(resid: LCNumber, *refs: LCNumber) -> LCNumber:
    """Drop residual coefficients that are binary64 noise at the refs' scale.

    Exact computations (dyadic data) are unaffected: their residuals are
    exactly zero or carry genuinely sized coefficients.
    """
    if not resid.terms:
        return resid
    scale = max((r.max_abs_coefficient() for r in refs), default=0.0)
    kept = tuple(
        (e, c) for e, c in resid.terms if abs(c) > RESIDUAL_REL_TOL * scale
    )
    return LCNumber._make(kept, resid.horizon)


def wlud_check_1d(
    f: Expr,
    var: str,
    x0,
    k: int,
    eps,
    delta,
    plan: Optional[SamplingPlan] = None,
) -> WludReport:
    """Sample the order-k uniform remainder bound on (x0-delta, x0+delta).

    Each sampled pair (x, y) tests |f(y) - T_k[f, x](y)| <= eps*|y-x|^k with
    the jet of f taken at x.  Fails fast on the first violating pair; pairs
    whose comparison is indistinguishable at horizon are counted as
    inconclusive rather than decided.
    """
    plan = plan or SamplingPlan()
    x0 = _lc(x0)
    eps = _require_positive(_lc(eps), "eps")
    delta = _require_positive(_lc(delta), "delta")
    pts = plan.points(x0, delta)
    return _run_check_1d(f, var, x0, k, eps, delta, plan, pts, {}, {}, k)


def _run_check_1d(f, var, x0, k, eps, delta, plan, pts, jets, fvals, jet_order):
    # jets/fvals may be shared by callers running several orders over the
    # same sample set; jets are taken at jet_order >= k and sliced.
    pairs = plan.pair_indices(len(pts))
    worst_margin: Optional[Valuation] = None
    worst_pair = None
    inconclusive = 0
    samples = 0
    result = "pass"
    for i, j in pairs:
        x, y = pts[i], pts[j]
        if i not in jets:
            jets[i] = taylor_jet(f, var, x, jet_order)
        if j not in fvals:
            fvals[j] = eval_lc(f, {var: y})
        approx = taylor_polynomial_eval(jets[i], y, k)
        fy = fvals[j]
        lhs = abs(_filtered_residual(fy - approx, fy, approx))
        rhs = eps * abs(y - x) ** k
        samples += 1
        order = lhs.compare(rhs)
        margin = _margin(lhs, rhs)
        if worst_margin is None or margin > worst_margin:
            worst_margin = margin
            worst_pair = (x, y, lhs, rhs)
        if order is Ordering.EQUAL_AT_HORIZON:
            inconclusive += 1
            continue
        if order is Ordering.GREATER:
            result = "fail"
            worst_margin = margin
            worst_pair = (x, y, lhs, rhs)
            break
    return WludReport(
        x0, k, eps, delta, samples, result, worst_pair, worst_margin, inconclusive
    )


def _sup_norm(components: Sequence[LCNumber]) -> LCNumber:
    best = abs(components[0])
    for comp in components[1:]:
        a = abs(comp)
        if a.compare(best) is Ordering.GREATER:
            best = a
    return best


def wlud_check_nd(
    f: Expr,
    vars: Sequence[str],
    x0: Sequence,
    k: int,
    eps,
    delta,
    plan: Optional[SamplingPlan] = None,
) -> WludReport:
    """n-variable analogue over the sup-norm ball B_delta(x0).

    Tests |f(eta) - f(xi) - sum((1/j!) ((eta-xi).grad)^j f(xi), j=1..k)|
    <= eps*|eta-xi|^k at sampled xi, eta, with all partials taken from one
    multivariate jet per xi.
    """
    plan = plan or SamplingPlan()
    names = list(vars)
    center = tuple(_lc(c) for c in x0)
    eps = _require_positive(_lc(eps), "eps")
    delta = _require_positive(_lc(delta), "delta")
    pts = plan.points_nd(center, delta)
    return _run_check_nd(
        f, names, center, k, eps, delta, plan, pts, {}, {}, k
    )


def _run_check_nd(f, names, center, k, eps, delta, plan, pts, jets, fvals, jet_order):
    pairs = plan.pair_indices(len(pts))
    worst_margin: Optional[Valuation] = None
    worst_pair = None
    inconclusive = 0
    samples = 0
    result = "pass"
    for i, j in pairs:
        xi, eta = pts[i], pts[j]
        if i not in jets:
            jets[i] = partial_jet(f, names, xi, jet_order)
        if j not in fvals:
            fvals[j] = eval_lc(f, dict(zip(names, eta)))
        v = tuple(eta[m] - xi[m] for m in range(len(center)))
        approx = partial_taylor_eval(jets[i], v, k)
        feta = fvals[j]
        lhs = abs(_filtered_residual(feta - approx, feta, approx))
        rhs = eps * _sup_norm(v) ** k
        samples += 1
        order = lhs.compare(rhs)
        margin = _margin(lhs, rhs)
        if worst_margin is None or margin > worst_margin:
            worst_margin = margin
            worst_pair = (xi, eta, lhs, rhs)
        if order is Ordering.EQUAL_AT_HORIZON:
            inconclusive += 1
            continue
        if order is Ordering.GREATER:
            result = "fail"
            worst_margin = margin
            worst_pair = (xi, eta, lhs, rhs)
            break
    return WludReport(
        center, k, eps, delta, samples, result, worst_pair, worst_margin, inconclusive
    )


def delta_ladder_search(
    f: Expr,
    var: str,
    x0,
    kmax: int,
    ladder: Optional[Sequence[LCNumber]] = None,
    plan: Optional[SamplingPlan] = None,
) -> list[tuple[int, LCNumber, Valuation]]:
    """For each k <= kmax, the first ladder radius passing the eps=1 check.

    The ladder must be sorted descending; orders with no passing candidate
    are simply absent from the result (absence is data, not an error).
    """
    ladder = list(ladder) if ladder is not None else default_delta_ladder()
    plan = plan or SamplingPlan()
    x0 = _lc(x0)
    caches: dict[int, tuple] = {}  # per candidate: (pts, jets, fvals)
    out = []
    for k in range(1, kmax + 1):
        for ci, candidate in enumerate(ladder):
            _require_positive(candidate, "ladder candidate")
            if ci not in caches:
                caches[ci] = (plan.points(x0, candidate), {}, {})
            pts, jets, fvals = caches[ci]
            report = _run_check_1d(
                f, var, x0, k, ONE, candidate, plan, pts, jets, fvals, kmax
            )
            if report.result == "pass":
                out.append((k, candidate, candidate.valuation()))
                break
    return out


def _delta_ladder_search_nd(f, names, x0, kmax, ladder, plan):
    ladder = list(ladder) if ladder is not None else default_delta_ladder()
    plan = plan or SamplingPlan()
    caches: dict[int, tuple] = {}
    out = []
    for k in range(1, kmax + 1):
        for ci, candidate in enumerate(ladder):
            _require_positive(candidate, "ladder candidate")
            if ci not in caches:
                caches[ci] = (plan.points_nd(x0, candidate), {}, {})
            pts, jets, fvals = caches[ci]
            report = _run_check_nd(
                f, names, x0, k, ONE, candidate, plan, pts, jets, fvals, kmax
            )
            if report.result == "pass":
                out.append((k, candidate, candidate.valuation()))
                break
    return out


def _ladder_summary(entries, kmax):
    complete = {k for k, _, _ in entries} >= set(range(1, kmax + 1))
    if not entries:
        return complete, None, None
    max_lam = max(lam for _, _, lam in entries)
    t = math.floor(max_lam) + 1  # smallest integer strictly above
    return complete, max_lam, t


def _required_radius(lambda0: Valuation, t: int) -> Fraction:
    required = Fraction(max(t, 0))
    if lambda0 != _NEG_INF and Fraction(lambda0) > required:
        required = Fraction(lambda0)
    return required


def analyticity_certificate_1d(
    f: Expr,
    var: str,
    x0,
    jmax: int,
    kmax: int,
    ladder: Optional[Sequence[LCNumber]] = None,
    plan: Optional[SamplingPlan] = None,
    window: Optional[int] = None,
) -> AnalyticityCertificate:
    """Assemble the evidence that f is analytic on a ball around x0.

    Steps: jet to order jmax; coefficient growth rate lambda0 (trailing
    window); the eps=1 delta ladder up to kmax; t = smallest integer above
    the observed lambda(delta_k); radius requirement max{lambda0, t, 0};
    the Taylor identity f(y) = sum(f^(j)(x)/j! (y-x)^j) sampled for x, y in
    the chosen ball, with x != x0 handled by recentering the jet.
    """
    plan = plan or SamplingPlan()
    if jmax < 1 or kmax < 1:
        raise ValueError("jmax and kmax must be >= 1")
    x0 = _lc(x0)
    jet = taylor_jet(f, var, x0, jmax)
    ps = jet.to_power_series()
    if window is None:
        window = max(1, jmax // 2)
    lam0 = lambda0_estimate(ps, window)
    lam0_head = lambda0_estimate(ps, jmax)
    entries = delta_ladder_search(f, var, x0, kmax, ladder, plan)
    complete, _max_lam, t = _ladder_summary(entries, kmax)
    if not complete:
        return AnalyticityCertificate(
            x0, jmax, kmax, window, lam0, lam0_head, tuple(entries),
            None, None, None, (), "inconclusive",
        )
    required = _required_radius(lam0, t)
    delta = monomial(required + 1)
    pts = plan.points(x0, delta)
    stride = max(1, len(pts) // 4)
    xs = [x0] + pts[::stride][:4]
    checks = []
    verdict = "certified_at_scale"
    growth = _growth_floor(lam0_head)
    fvals: dict[int, LCNumber] = {}
    from .core import default_horizon

    for x in xs:
        series_x = ps if x == x0 else recenter(ps, x, window)
        for idx, y in enumerate(pts):
            if y == x:
                continue
            if idx not in fvals:
                fvals[idx] = eval_lc(f, {var: y})
            fy = fvals[idx]
            # Nothing beyond f(y)'s own horizon is checkable; capping the
            # increment lets the invisible-term stop end the sum early.
            cap = fy.horizon if fy.horizon != INF else default_horizon()
            approx = _taylor_sum(series_x.coeffs, (y - x).truncate(cap))
            resid = _filtered_residual(fy - approx, fy, approx)
            checks.append((x, y, resid.valuation()))
            if resid.terms:
                verdict = _classify_residual(
                    resid, (y - x).valuation(), jmax, growth
                )
                if verdict == "refuted":
                    break
        if verdict == "refuted":
            break
    return AnalyticityCertificate(
        x0, jmax, kmax, window, lam0, lam0_head, tuple(entries),
        t, required, delta, tuple(checks), verdict,
    )


def _growth_floor(lam0_head) -> Fraction:
    if lam0_head == _NEG_INF:
        return Fraction(0)
    return max(Fraction(lam0_head), Fraction(0))


def _classify_residual(resid, lam_inc, jmax: int, growth: Fraction) -> str:
    """A visible residual refutes only below the jet's truncation order.

    Terms of order > jmax contribute from exponent about
    (jmax+1)*(lambda(increment) - growth) upward; a residual confined to
    that range just means the jet is too short for the working horizon
    (inconclusive, not refuted).
    """
    threshold = (jmax + 1) * (lam_inc - growth)
    if resid.valuation() >= threshold:
        return "inconclusive"
    return "refuted"


def analyticity_certificate_nd(
    f: Expr,
    vars: Sequence[str],
    x0: Sequence,
    jmax: int,
    kmax: int,
    ladder: Optional[Sequence[LCNumber]] = None,
    plan: Optional[SamplingPlan] = None,
    window: Optional[int] = None,
) -> AnalyticityCertificate:
    """n-variable analogue: growth over all partials, sup-norm ball,
    identity via the directional Taylor operators at the center."""
    plan = plan or SamplingPlan()
    if jmax < 1 or kmax < 1:
        raise ValueError("jmax and kmax must be >= 1")
    names = list(vars)
    center = tuple(_lc(c) for c in x0)
    n = len(center)
    pj = partial_jet(f, names, center, jmax)
    if window is None:
        window = max(1, jmax // 2)
    per_order = _per_order_growth(pj, jmax)
    lam0 = _window_max(per_order, jmax - window + 1, jmax)
    lam0_head = _window_max(per_order, 1, jmax)
    entries = _delta_ladder_search_nd(f, names, center, kmax, ladder, plan)
    complete, _max_lam, t = _ladder_summary(entries, kmax)
    if not complete:
        return AnalyticityCertificate(
            center, jmax, kmax, window, lam0, lam0_head, tuple(entries),
            None, None, None, (), "inconclusive",
        )
    required = _required_radius(lam0, t)
    delta = monomial(required + 1)
    pts = plan.points_nd(center, delta)
    checks = []
    verdict = "certified_at_scale"
    growth = _growth_floor(lam0_head)
    from .core import default_horizon

    for eta in pts:
        feta = eval_lc(f, dict(zip(names, eta)))
        cap = feta.horizon if feta.horizon != INF else default_horizon()
        v = tuple((eta[i] - center[i]).truncate(cap) for i in range(n))
        approx = partial_taylor_eval(pj, v, jmax)
        resid = _filtered_residual(feta - approx, feta, approx)
        checks.append((center, eta, resid.valuation()))
        if resid.terms:
            lam_inc = min(c.valuation() for c in v)
            verdict = _classify_residual(resid, lam_inc, jmax, growth)
            if verdict == "refuted":
                break
    return AnalyticityCertificate(
        center, jmax, kmax, window, lam0, lam0_head, tuple(entries),
        t, required, delta, tuple(checks), verdict,
    )


def _per_order_growth(pj: PartialJet, jmax: int) -> dict[int, Valuation]:
    """max over |alpha| = j of -lambda(d^alpha f(x0))/j, per order j."""
    out: dict[int, Valuation] = {j: _NEG_INF for j in range(1, jmax + 1)}
    for alpha, coeff in pj.table.items():
        j = sum(alpha)
        if j == 0 or not coeff.terms:
            continue
        v = Fraction(-coeff.valuation(), j)
        if out[j] == _NEG_INF or v > out[j]:
            out[j] = v
    return out


def _window_max(per_order: dict[int, Valuation], lo: int, hi: int) -> Valuation:
    best: Valuation = _NEG_INF
    for j in range(max(1, lo), hi + 1):
        v = per_order.get(j, _NEG_INF)
        if v != _NEG_INF and (best == _NEG_INF or v > best):
            best = v
    return best


# -- serialization ---------------------------------------------------------------


def valuation_to_json(v: Optional[Valuation]):
    if v is None:
        return None
    if v == INF:
        return "inf"
    if v == _NEG_INF:
        return "-inf"
    fr = Fraction(v)
    return {"num": fr.numerator, "den": fr.denominator}


def _lc_json(x) -> object:
    if isinstance(x, tuple):
        return [format_lc(c) for c in x]
    return format_lc(x)


def report_to_json(r: WludReport) -> dict:
    worst = None
    if r.worst_pair is not None:
        x, y, lhs, rhs = r.worst_pair
        worst = {
            "x": _lc_json(x),
            "y": _lc_json(y),
            "lhs": format_lc(lhs),
            "rhs": format_lc(rhs),
        }
    return {
        "x0": _lc_json(r.x0),
        "k": r.k,
        "epsilon": format_lc(r.epsilon),
        "delta": format_lc(r.delta),
        "samples": r.samples,
        "result": r.result,
        "worst_pair": worst,
        "margin": valuation_to_json(r.margin),
    }


def certificate_to_json(c: AnalyticityCertificate) -> dict:
    return {
        "x0": _lc_json(c.x0),
        "jmax": c.jmax,
        "kmax": c.kmax,
        "window": c.window,
        "lambda0": valuation_to_json(c.lambda0),
        "lambda0_head": valuation_to_json(c.lambda0_head),
        "delta_ladder": [
            {"k": k, "delta": format_lc(d), "lambda": valuation_to_json(lam)}
            for k, d, lam in c.delta_ladder
        ],
        "t": c.t,
        "required_radius_lambda": valuation_to_json(c.required_radius_lambda),
        "delta": None if c.delta is None else format_lc(c.delta),
        "identity_checks": [
            {"x": _lc_json(x), "y": _lc_json(y), "residual_lambda": valuation_to_json(lam)}
            for x, y, lam in c.identity_checks
        ],
        "verdict": c.verdict,
    }


def _lc(x) -> LCNumber:
    coerced = LCNumber._coerce(x)
    if coerced is None:
        raise TypeError(f"expected an LC number, got {type(x).__name__}")
    return coerced

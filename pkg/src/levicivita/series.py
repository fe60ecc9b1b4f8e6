"""Power series over LCNumbers and elementary functions of LC arguments.

A :class:`PowerSeries` is a finite jet sum(a_j * (x - center)^j, j <= jmax)
whose coefficients are themselves LC numbers.  Convergence of the underlying
infinite series is governed by the growth rate of the coefficient
valuations: with lambda0 = limsup(-lambda(a_j)/j), the series converges in
the order topology exactly where lambda(x - center) > lambda0.  Only
finitely many coefficients are ever available, so lambda0 is estimated by a
max over a trailing window and every verdict carries that finite-sample
context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    INF,
    LCNumber,
    ONE,
    Ordering,
    Valuation,
    ZERO,
    default_horizon,
    format_lc,
)
from .errors import (
    DomainError,
    EmptySeriesError,
    NotConvergentError,
    NotInRadiusError,
    NotPositiveError,
    OrderTooHighError,
)

#: Summation stops after this many consecutive increments invisible at the
#: running horizon; with exact valuation arithmetic one would suffice.
INVISIBLE_RUN = 10

_NEG_INF = -math.inf


@dataclass(frozen=True)
class PowerSeries:
    """Finite power series: center plus coefficients a_0 .. a_jmax."""

    center: LCNumber
    coeffs: tuple[LCNumber, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise EmptySeriesError("a power series needs at least a_0")

    @property
    def jmax(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        c = format_lc(self.center)
        parts = [f"({format_lc(a)})" for a in self.coeffs]
        out = [parts[0]]
        for j, p in enumerate(parts[1:], start=1):
            out.append(f"{p}*(x-({c}))^{j}" if j > 1 else f"{p}*(x-({c}))")
        return " + ".join(out)


class Verdict(Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class ConvergenceVerdict:
    verdict: Verdict
    lambda0_estimate: Valuation  # Fraction or -inf
    gap: Valuation  # lambda(x - center) - lambda0_estimate


def lambda0_estimate(s: PowerSeries, window: Optional[int] = None) -> Valuation:
    """Trailing-window surrogate for limsup(-lambda(a_j)/j).

    Takes the max of -lambda(a_j)/j over the last ``window`` indices
    (default: the last half).  Zero coefficients contribute -inf, carrying
    the lambda(0) = inf convention through.
    """
    jmax = s.jmax
    if jmax < 1:
        raise EmptySeriesError("need at least one coefficient beyond a_0")
    if window is None:
        window = max(1, jmax // 2)
    if not 1 <= window <= jmax:
        raise ValueError(f"window must be in 1..{jmax}, got {window}")
    best: Valuation = _NEG_INF
    for j in range(jmax - window + 1, jmax + 1):
        a = s.coeffs[j]
        if a.terms:
            v = Fraction(-a.valuation(), j)
            if best == _NEG_INF or v > best:
                best = v
    return best


def converges_at(
    s: PowerSeries, x: LCNumber, window: Optional[int] = None
) -> ConvergenceVerdict:
    """Classify x by the sign of lambda(x - center) - lambda0.

    The criterion is strict, so a zero gap is reported as the boundary
    verdict (not convergent).
    """
    lam0 = lambda0_estimate(s, window)
    lam = (x - s.center).valuation()
    gap = lam - lam0  # inf and -inf mix to the right values
    if gap > 0:
        v = Verdict.CONVERGES
    elif gap == 0:
        v = Verdict.BOUNDARY
    else:
        v = Verdict.DIVERGES
    return ConvergenceVerdict(v, lam0, gap)


def sum_at(s: PowerSeries, x: LCNumber, window: Optional[int] = None) -> LCNumber:
    """Sum the series at x, stopping once increments drop below the horizon."""
    verdict = converges_at(s, x, window)
    if verdict.verdict is not Verdict.CONVERGES:
        raise NotConvergentError(
            f"series does not converge at this point (gap {verdict.gap})"
        )
    return _taylor_sum(s.coeffs, x - s.center)


def _taylor_sum(coeffs: Sequence[LCNumber], delta: LCNumber) -> LCNumber:
    acc = ZERO
    power = ONE
    invisible = 0
    for j, a in enumerate(coeffs):
        if j:
            power = power * delta
        term = a * power
        if not term.terms or term.valuation() >= acc.horizon:
            invisible += 1
            if invisible >= INVISIBLE_RUN:
                break
            continue
        invisible = 0
        acc = acc + term
    return acc


def differentiate_termwise(s: PowerSeries, j: int) -> PowerSeries:
    """j-fold term-by-term derivative: b_{l-j} = l(l-1)...(l-j+1) * a_l."""
    if j > s.jmax:
        raise OrderTooHighError(f"order {j} exceeds jmax {s.jmax}")
    if j < 0:
        raise ValueError("derivative order must be >= 0")
    if j == 0:
        return s
    coeffs = tuple(
        s.coeffs[l] * float(math.perm(l, j)) for l in range(j, s.jmax + 1)
    )
    return PowerSeries(s.center, coeffs)


def recenter(
    s: PowerSeries, new_center: LCNumber, window: Optional[int] = None
) -> PowerSeries:
    """Re-expand around new_center via c_j = sum(C(l, j) a_l delta^(l-j)).

    Valid only inside the estimated radius: lambda(new_center - center) must
    exceed the lambda0 estimate, else the double sum cannot be reordered.
    """
    delta = new_center - s.center
    if delta.terms:
        lam0 = lambda0_estimate(s, window)
        if not delta.valuation() > lam0:
            raise NotInRadiusError(
                f"lambda(shift) = {delta.valuation()} not above lambda0 = {lam0}"
            )
    jmax = s.jmax
    powers = [ONE]
    for _ in range(jmax):
        powers.append(powers[-1] * delta)
    coeffs = []
    for j in range(jmax + 1):
        c = ZERO
        for l in range(j, jmax + 1):
            c = c + s.coeffs[l] * float(math.comb(l, j)) * powers[l - j]
        coeffs.append(c)
    return PowerSeries(new_center, tuple(coeffs))


# -- elementary functions ----------------------------------------------------
#
# Each function splits off the infinitesimal part and sums a classical
# series in it, which converges in the order topology because term
# valuations grow linearly.  An exactly-known (infinite-horizon) input with
# a nonzero infinitesimal part would need endless work, so those series are
# truncated at the default horizon.


def _working_horizon(x: LCNumber) -> Valuation:
    return x.horizon if x.horizon != INF else default_horizon()


def _run_series(first: LCNumber, steps, limit: Valuation) -> LCNumber:
    """Accumulate first + sum(steps) until INVISIBLE_RUN invisible terms."""
    acc = first
    invisible = 0
    for term in steps:
        if not term.terms or term.valuation() >= limit:
            invisible += 1
            if invisible >= INVISIBLE_RUN:
                break
            continue
        invisible = 0
        acc = acc + term
    return acc


def exp(x) -> LCNumber:
    """exp of a finite argument: exp(r) * sum(i^j / j!) for x = r + i."""
    x = _require_lc(x)
    if x.terms and x.valuation() < 0:
        raise DomainError("exp of an infinitely large argument")
    r = x.real_part()
    i = x.infinitesimal_part()
    if not i.terms:
        return LCNumber.from_real(math.exp(r), x.horizon)
    limit = _working_horizon(x)
    i = i.truncate(limit)

    def steps():
        term = ONE
        j = 1
        while True:
            term = term * i * (1.0 / j)
            yield term
            j += 1

    acc = _run_series(ONE.truncate(limit), steps(), limit)
    return acc * math.exp(r) if r != 0.0 else acc


def ln(x) -> LCNumber:
    """ln of a finite positive argument: ln(a0) + sum((-1)^(j+1) u^j / j)."""
    x = _require_lc(x)
    if not x.terms or x.valuation() != 0 or x.terms[0][1] <= 0:
        raise DomainError("ln requires a finite argument with positive real part")
    a0 = x.terms[0][1]
    if len(x.terms) == 1:
        return LCNumber.from_real(math.log(a0), x.horizon)
    limit = _working_horizon(x)
    u = LCNumber._make(
        tuple((e, c / a0) for e, c in x.terms[1:] if e < limit), limit
    )

    def steps():
        power = ONE
        j = 1
        while True:
            power = power * u
            yield power * ((1.0 if j % 2 else -1.0) / j)
            j += 1

    return _run_series(LCNumber.from_real(math.log(a0), limit), steps(), limit)


def _sin_cos(x: LCNumber) -> tuple[LCNumber, LCNumber]:
    if x.terms and x.valuation() < 0:
        raise DomainError("sin/cos of an infinitely large argument")
    r = x.real_part()
    i = x.infinitesimal_part()
    sr, cr = math.sin(r), math.cos(r)
    if not i.terms:
        return (
            LCNumber.from_real(sr, x.horizon),
            LCNumber.from_real(cr, x.horizon),
        )
    limit = _working_horizon(x)
    i = i.truncate(limit)
    cos_i = ONE.truncate(limit)
    sin_i = ZERO
    term = ONE
    k = 1
    invisible = 0
    while True:
        term = term * i * (1.0 / k)
        if not term.terms or term.valuation() >= limit:
            invisible += 1
            if invisible >= INVISIBLE_RUN:
                break
            k += 1
            continue
        invisible = 0
        signed = term if (k // 2) % 2 == 0 else -term
        if k % 2:
            sin_i = sin_i + signed
        else:
            cos_i = cos_i + signed
        k += 1
    return (cos_i * sr + sin_i * cr, cos_i * cr - sin_i * sr)


def sin(x) -> LCNumber:
    return _sin_cos(_require_lc(x))[0]


def cos(x) -> LCNumber:
    return _sin_cos(_require_lc(x))[1]


_ELEMENTARY = {"exp": exp, "ln": ln, "sin": sin, "cos": cos}


def apply_elementary(name: str, x: LCNumber) -> LCNumber:
    """Dispatch by name over {exp, ln, sin, cos}."""
    try:
        fn = _ELEMENTARY[name]
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None
    return fn(x)


def nth_root(x, n: int) -> LCNumber:
    """The positive n-th root via a binomial series on the leading factor.

    Writes x = a*d^q*(1 + u) and returns a^(1/n) * d^(q/n) * (1+u)^(1/n);
    the result r satisfies r^n == x up to horizon.  Requires x > 0.
    """
    x = _require_lc(x)
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"root index must be a positive integer, got {n!r}")
    if x.compare(ZERO) is not Ordering.GREATER:
        raise NotPositiveError("nth_root of a value not visibly positive")
    q, a = x.terms[0]
    lead = math.sqrt(a) if n == 2 else a ** (1.0 / n)
    shift = q / n
    if len(x.terms) == 1:
        horizon = x.horizon if x.horizon == INF else x.horizon - q + shift
        return LCNumber._make(((shift, lead),), horizon)
    limit = _working_horizon(x) - q  # horizon in the d^q-factored frame
    u = LCNumber._make(
        tuple((e - q, c / a) for e, c in x.terms[1:] if e - q < limit), limit
    )
    alpha = 1.0 / n

    def steps():
        term = ONE
        j = 1
        while True:
            term = term * u * ((alpha - (j - 1)) / j)
            yield term
            j += 1

    acc = _run_series(ONE.truncate(limit), steps(), limit)
    return acc._monomial_mul(lead, shift, limit + shift)


def _require_lc(x) -> LCNumber:
    coerced = LCNumber._coerce(x)
    if coerced is None:
        raise TypeError(f"expected an LC number, got {type(x).__name__}")
    return coerced

import math
import random
from fractions import Fraction
from itertools import product

import pytest

from levicivita import (
    D,
    LCNumber,
    ONE,
    ZERO,
    approx_equal,
    derivative_at,
    diff_symbolic,
    directional_power,
    eval_lc,
    lhopital_limit,
    monomial,
    multi_indices,
    parse_expr,
    partial_jet,
    taylor_jet,
    taylor_polynomial_eval,
)
from levicivita.calculus import partial_taylor_eval
from levicivita.errors import (
    DomainError,
    InfiniteLimitError,
    NonJetResultError,
    NotIndeterminateError,
    OrderTooHighError,
    ZeroDenominatorError,
)

F = Fraction


def real(v):
    return LCNumber.from_real(v)


# -- 1-variable jets ------------------------------------------------------------


def test_jet_of_square():
    jet = taylor_jet(parse_expr("x^2"), "x", 3, 2)
    assert [c.real_part() for c in jet.coeffs] == [9.0, 6.0, 1.0]
    assert jet.derivative(1).real_part() == 6.0
    assert jet.derivative(2).real_part() == 2.0


def test_jet_of_sin():
    jet = taylor_jet(parse_expr("sin(x)"), "x", 0, 5)
    expected = [0.0, 1.0, 0.0, -1 / 6, 0.0, 1 / 120]
    for c, ref in zip(jet.coeffs, expected):
        assert c.real_part() == pytest.approx(ref, abs=1e-15)


def test_jet_at_lc_center():
    # center with infinitesimal content: f(x) = x at 1 + d has jet (1+d, 1)
    jet = taylor_jet(parse_expr("x"), "x", 1 + D, 1)
    assert jet.coeffs[0] == 1 + D
    assert jet.coeffs[1] == ONE
    # f(x) = x^2 at d: coefficients (d^2, 2d, 1)
    jet = taylor_jet(parse_expr("x^2"), "x", D, 2)
    assert jet.coeffs[0] == monomial(2)
    assert jet.coeffs[1] == 2 * D
    assert jet.coeffs[2] == ONE


def test_jet_center_horizon_precondition():
    x0 = LCNumber(((F(0), 1.0),), horizon=F(3))
    with pytest.raises(OrderTooHighError):
        taylor_jet(parse_expr("x^2"), "x", x0, 5)


def test_jet_abs_at_zero_has_no_jet():
    with pytest.raises(NonJetResultError):
        taylor_jet(parse_expr("abs(x)"), "x", 0, 1)


def test_jet_abs_away_from_zero():
    jet = taylor_jet(parse_expr("abs(x)"), "x", monomial(2), 1)
    assert jet.coeffs[0] == monomial(2)
    assert jet.coeffs[1] == ONE
    jet = taylor_jet(parse_expr("abs(x)"), "x", -D, 1)
    assert jet.coeffs[1] == -ONE


def test_jet_sqrt_at_zero_has_no_jet():
    # sqrt(x^3) = x^(3/2) is not smooth at 0 in the representable sense
    with pytest.raises(NonJetResultError):
        taylor_jet(parse_expr("sqrt(x^3)"), "x", 0, 2)


def test_jet_domain_error_propagates():
    with pytest.raises(DomainError):
        taylor_jet(parse_expr("ln(x)"), "x", 0, 2)


def test_derivative_examples():
    assert derivative_at(parse_expr("x^3"), "x", 1, 2).real_part() == 6.0
    assert derivative_at(parse_expr("exp(x)"), "x", 0, 7).real_part() == pytest.approx(
        1.0, rel=1e-12
    )
    assert derivative_at(parse_expr("x*exp(x)"), "x", 0, 4).real_part() == pytest.approx(
        4.0, rel=1e-12
    )


def test_jet_matches_symbolic_oracle():
    corpus = ["x^5 - x^2", "exp(2*x)", "sin(x)*cos(x)", "ln(1+x)", "exp(x)/(2-x)"]
    for text in corpus:
        f = parse_expr(text)
        for x0 in (0.0, 0.5, -0.25):
            jet = taylor_jet(f, "x", real(x0), 6)
            g = f
            for j in range(7):
                ref = eval_lc(g, {"x": real(x0)}).real_part()
                mine = jet.coeffs[j].real_part() * math.factorial(j)
                assert mine == pytest.approx(ref, rel=1e-9, abs=1e-10)
                if j < 6:
                    g = diff_symbolic(g, "x")


# -- taylor polynomial evaluation --------------------------------------------------


def test_taylor_polynomial_eval():
    jet = taylor_jet(parse_expr("x^2"), "x", 0, 2)
    y = 1 + D
    assert taylor_polynomial_eval(jet, y, 2) == y * y
    assert taylor_polynomial_eval(jet, y, 0) == jet.coeffs[0]
    with pytest.raises(OrderTooHighError):
        taylor_polynomial_eval(jet, y, 3)


def test_taylor_polynomial_matches_sum():
    jet = taylor_jet(parse_expr("exp(x)"), "x", 0, 3)
    v = taylor_polynomial_eval(jet, D, 3)
    ref = ONE + D + monomial(2, 0.5) + monomial(3, 1 / 6)
    assert approx_equal(v, ref)


# -- multivariate jets ----------------------------------------------------------------


def test_partial_jet_xy():
    pj = partial_jet(parse_expr("x*y"), ["x", "y"], [0, 0], 2)
    assert pj.table[(1, 1)] == ONE
    assert pj.derivative((1, 1)) == ONE
    assert pj.table[(2, 0)].is_zero


def test_partial_jet_x2y():
    pj = partial_jet(parse_expr("x^2*y"), ["x", "y"], [1, 1], 3)
    assert pj.table[(2, 1)] == ONE  # d^3f/dx^2dy / (2! 1!) = 2/2 = 1
    assert pj.derivative((2, 1)).real_part() == 2.0


def test_partial_jet_symmetry_no_duplicates():
    pj = partial_jet(parse_expr("exp(x+y)"), ["x", "y"], [0, 0], 4)
    keys = list(pj.table.keys())
    assert len(keys) == len(set(keys))
    assert set(keys) == set(multi_indices(2, 4))


def test_partial_jet_matches_symbolic_oracle_on_polynomials():
    rng = random.Random(11)
    names = ["x", "y"]
    for _ in range(20):
        k = rng.randint(1, 4)
        terms = []
        for a, b in product(range(k + 1), repeat=2):
            if a + b <= k and rng.random() < 0.6:
                c = rng.randint(-4, 4)
                if c:
                    terms.append((a, b, c))
        if not terms:
            terms = [(1, 0, 1)]
        text = " + ".join(f"{c}*x^{a}*y^{b}" for a, b, c in terms)
        f = parse_expr(text)
        x0 = [real(rng.randint(-2, 2)), real(rng.randint(-2, 2))]
        pj = partial_jet(f, names, x0, k)
        for alpha in multi_indices(2, k):
            g = f
            for _ in range(alpha[0]):
                g = diff_symbolic(g, "x")
            for _ in range(alpha[1]):
                g = diff_symbolic(g, "y")
            ref = eval_lc(g, {"x": x0[0], "y": x0[1]}).real_part()
            scale = math.factorial(alpha[0]) * math.factorial(alpha[1])
            assert pj.table[alpha].real_part() * scale == ref  # exact: integers


def test_partial_jet_exp_is_clean():
    # every scaled partial of exp(x+y) at 0 is exactly 1/(a! b!)
    pj = partial_jet(parse_expr("exp(x+y)"), ["x", "y"], [0, 0], 5)
    for alpha, coeff in pj.table.items():
        ref = 1.0 / (math.factorial(alpha[0]) * math.factorial(alpha[1]))
        assert coeff.real_part() == pytest.approx(ref, rel=1e-13)


# -- directional powers ----------------------------------------------------------------


def test_directional_power_linear():
    pj = partial_jet(parse_expr("x+y"), ["x", "y"], [0, 0], 1)
    v = (real(2), real(3))
    assert directional_power(pj, v, 1) == real(5)


def test_directional_power_bilinear():
    pj = partial_jet(parse_expr("x*y"), ["x", "y"], [0, 0], 2)
    assert directional_power(pj, (ONE, ONE), 2) == real(2)


def test_directional_power_homogeneity():
    pj = partial_jet(parse_expr("x^2*y + y^2"), ["x", "y"], [1, -1], 3)
    v = (real(0.5), real(2))
    for j in range(1, 4):
        lhs = directional_power(pj, tuple(3 * c for c in v), j)
        rhs = directional_power(pj, v, j) * float(3**j)
        assert approx_equal(lhs, rhs)


def test_directional_power_order_too_high():
    pj = partial_jet(parse_expr("x+y"), ["x", "y"], [0, 0], 1)
    with pytest.raises(OrderTooHighError):
        directional_power(pj, (ONE, ONE), 2)


def test_taylor_identity_trivariate_polynomial():
    rng = random.Random(13)
    f = parse_expr("x^3*y - 2*z^2 + x*y*z + y^2*z^2 - 5*x + 1")
    names = ["x", "y", "z"]
    center = [real(1), real(-1), real(2)]
    pj = partial_jet(f, names, center, 5)
    for _ in range(10):
        eta = tuple(monomial(rng.randint(1, 3), rng.randint(-8, 8) / 4.0) for _ in names)
        target = eval_lc(f, dict(zip(names, (c + e for c, e in zip(center, eta)))))
        total = partial_taylor_eval(pj, eta, 5)
        assert (target - total).is_zero  # exact for integer polynomials
        # the factorial-cancelled sum equals the directional-operator sum
        via_ops = pj.table[(0, 0, 0)]
        for j in range(1, 6):
            via_ops = via_ops + directional_power(pj, eta, j) * (1.0 / math.factorial(j))
        assert approx_equal(total, via_ops, rel_tol=1e-12)


# -- L'Hopital -----------------------------------------------------------------------


def test_lhopital_trivial():
    assert lhopital_limit(parse_expr("x"), parse_expr("x"), "x", 0) == ONE


def test_lhopital_classics():
    assert lhopital_limit(
        parse_expr("sin(x)"), parse_expr("x"), "x", 0
    ).real_part() == pytest.approx(1.0, abs=1e-12)
    assert lhopital_limit(
        parse_expr("1-cos(x)"), parse_expr("x^2"), "x", 0
    ).real_part() == pytest.approx(0.5, abs=1e-12)
    assert lhopital_limit(
        parse_expr("exp(x)-1"), parse_expr("x"), "x", 0
    ).real_part() == pytest.approx(1.0, abs=1e-12)


def test_lhopital_zero_limit():
    v = lhopital_limit(parse_expr("x^2"), parse_expr("x"), "x", 0)
    assert v == ZERO


def test_lhopital_not_indeterminate():
    with pytest.raises(NotIndeterminateError):
        lhopital_limit(parse_expr("x+1"), parse_expr("x"), "x", 0)


def test_lhopital_zero_denominator():
    with pytest.raises(ZeroDenominatorError):
        lhopital_limit(parse_expr("x"), parse_expr("x-x"), "x", 0)


def test_lhopital_infinite_limit():
    with pytest.raises(InfiniteLimitError):
        lhopital_limit(parse_expr("x"), parse_expr("x^2"), "x", 0)

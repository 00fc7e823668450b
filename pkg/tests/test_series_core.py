from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from asdcong.qconstructors import EtaQuotient, eta_series
from asdcong.series_core import (
    INFINITY,
    CompositionOrderError,
    DivisionByZeroSeries,
    NotPrime,
    QSeries,
    ReversionOrderError,
    compose,
    padic_val,
    revert,
)

F = Fraction


def S(coeffs, lead=0, prec=None):
    return QSeries([F(c) for c in coeffs], lead, prec)


def q(prec=10):
    return QSeries.monomial(1, prec)


# independent oracles ------------------------------------------------------------------


def cauchy_div(a, b, n):
    """Coefficient lists a/b by back substitution (b[0] != 0)."""
    out = []
    for k in range(n):
        s = F(a[k]) - sum(out[j] * b[k - j] for j in range(k) if k - j < len(b))
        out.append(s / b[0])
    return out


def lagrange_inverse(a, n):
    """Coefficients of the compositional inverse of t = sum a[k] q^k (a[1] = 1),
    by [q^m] s = (1/m) [x^(m-1)] (x/t(x))^m."""
    v = [F(x) for x in a[1 : n + 1]]  # t/x
    inv = cauchy_div([1] + [0] * n, v, n)
    out = [F(0)] * (n + 1)
    power = [F(1)] + [F(0)] * n
    for m in range(1, n + 1):
        power = [sum(power[i] * inv[j - i] for i in range(j + 1)) for j in range(n)]
        out[m] = power[m - 1] / m
    return out


# examples ------------------------------------------------------------------------------


def test_add_examples():
    a = S([1, -5, 5], 0, 3)
    assert a + QSeries.zero(3) == a
    b = S([1, 6], 1, 3)
    z = b + (-b)
    assert z.is_zero and z.prec == 3 and z.lead == 3 and z.coeffs == ()
    c = S([1, 1], 0, 4) + S([1, -1], 0, 4)
    assert c.coefficient_list(0, 4) == [2, 0, 0, 0] and c.prec == 4


def test_mul_examples():
    assert (S([1, 1], 0, 5) * S([1, -1], 0, 5)).coefficient_list(0, 5) == [1, 0, -1, 0, 0]
    lhs = EtaQuotient.parse("eta(1)^5/eta(5)").series(30) * EtaQuotient.parse("eta(5)^6/eta(1)^6").series(30)
    rhs = EtaQuotient.parse("eta(5)^5/eta(1)").series(30)
    assert lhs.agrees_with(rhs)
    one = QSeries.monomial(-1, 5) * QSeries.monomial(1, 5)
    assert one.lead == 0 and one[0] == 1


def test_mul_precision_rule():
    a = S([1, 2, 3], 1, 6)
    b = S([1, 1], -1, 4)
    assert (a * b).prec == min(a.prec + b.lead, b.prec + a.lead)
    assert (a * b).lead == 0


def test_div_examples():
    t = S([1, 6, 27], 1, 4)
    assert (t / q(4)).coefficient_list(0, 3) == [1, 6, 27]
    geo = QSeries.one(8) / S([1, -1], 0, 8)
    assert geo.coefficient_list(0, 8) == [1] * 8
    with pytest.raises(DivisionByZeroSeries):
        QSeries.one(5) / QSeries.zero(5)


def test_theta_examples():
    assert QSeries.monomial(3, 6).theta() == QSeries.monomial(3, 6, 3)
    assert QSeries.one(5).theta().is_zero


def test_theta_over_t_against_division_oracle():
    # plain back-substitution is the reference here
    t = S([1, 6, 27, 98], 1, 5)
    got = (t.theta() / t).coefficient_list(0, 4)
    want = cauchy_div([1, 12, 81, 392], [1, 6, 27, 98], 4)
    assert got == want == [1, 6, 18, 24]


def test_compose_examples():
    f = S([1, -5, 5, 10, -15], 0, 5)
    assert compose(f, q(5)) == f
    assert compose(S([1, 1], 0, 5), S([1, 1], 1, 5)).coefficient_list(0, 4) == [1, 1, 1, 0]
    with pytest.raises(CompositionOrderError):
        compose(f, QSeries.one(5))


def test_compose_recovers_example_form():
    t = EtaQuotient.parse("eta(5)^6/eta(1)^6").series(12)
    f = EtaQuotient.parse("eta(1)^5/eta(5)").series(12)
    b = compose(f, revert(t))
    assert b.coefficient_list(0, 3) == [1, -5, 35]
    back = compose(b, t)
    assert back.coefficient_list(0, 5) == [1, -5, 5, 10, -15]


def test_revert_examples():
    assert revert(q(8)) == q(8)
    t = QSeries([F(1)] * 12, 1, 13)  # q/(1-q)
    s = revert(t)
    assert s.coefficient_list(1, 13) == [(-1) ** k for k in range(12)]
    assert compose(t, s).agrees_with(q(13))
    with pytest.raises(ReversionOrderError):
        revert(S([1, 1], 2, 6))


def test_revert_against_lagrange_oracle():
    t = EtaQuotient.parse("eta(5)^6/eta(1)^6").series(16)
    got = revert(t).coefficient_list(0, 15)
    want = lagrange_inverse(t.coefficient_list(0, 16), 14)
    assert got == want


def test_padic_val_examples():
    assert padic_val(-270, 3) == 3
    assert padic_val(0, 7) is INFINITY
    assert padic_val(F(65520, 691), 691) == -1
    with pytest.raises(NotPrime):
        padic_val(10, 4)


def test_pow_examples():
    assert (S([1, 1], 0, 5) ** 2).coefficient_list(0, 5) == [1, 2, 1, 0, 0]
    inv = q(5) ** -1
    assert inv.lead == -1 and inv[-1] == 1
    # eta_series omits q^(1/24); shifting the 24th power by one gives Delta
    delta = (eta_series(12) ** 24).shift(1)
    assert delta.coefficient_list(1, 5) == [1, -24, 252, -1472]
    prod = [1] + [0] * 11
    for n in range(1, 12):  # naive product of (1 - q^n)
        prod = [prod[k] - (prod[k - n] if k >= n else 0) for k in range(12)]
    assert delta.coefficient_list(1, 13) == (S(prod, 0, 12) ** 24).coefficient_list(0, 12)
    with pytest.raises(DivisionByZeroSeries):
        QSeries.zero(4) ** -1


def test_record_round_trip():
    a = S([F(1, 2), 0, F(-3, 691)], -1, 4)
    rec = a.to_record()
    assert rec["coeffs"][0] == "1/2"
    assert QSeries.from_record(rec) == a


def test_coefficients_reduced():
    a = S([F(2, 4), F(6, 9)], 0, 2) * 3
    for c in a.coeffs:
        assert c == F(c.numerator, c.denominator)
    assert a.coeffs == (F(3, 2), F(2))


# properties ----------------------------------------------------------------------------

rat = st.fractions(min_value=-50, max_value=50, max_denominator=12)


@st.composite
def series(draw, prec=20, unit=False):
    lead = draw(st.integers(-2, 3))
    cs = draw(st.lists(rat, min_size=prec - lead, max_size=prec - lead))
    if unit and cs[0] == 0:
        cs[0] = F(1)
    return QSeries(cs, lead, prec)


@settings(max_examples=100, deadline=None)
@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    lhs, rhs = a * (b + c), a * b + a * c
    assert lhs.agrees_with(rhs)


@settings(max_examples=100, deadline=None)
@given(series(), series(unit=True))
def test_div_inverts_mul(a, b):
    assert ((a * b) / b).agrees_with(a)


@settings(max_examples=100, deadline=None)
@given(series(), series())
def test_theta_derivation(a, b):
    assert (a * b).theta().agrees_with(a.theta() * b + a * b.theta())


@settings(max_examples=60, deadline=None)
@given(st.lists(rat, min_size=14, max_size=14))
def test_revert_round_trip(tail):
    t = QSeries([F(1)] + tail, 1, 16)
    s = revert(t)
    assert compose(t, s).agrees_with(q(16))
    assert compose(s, t).agrees_with(q(16))
    assert s.coefficient_list(0, 15) == lagrange_inverse(t.coefficient_list(0, 16), 14)


@settings(max_examples=200, deadline=None)
@given(rat.filter(bool), rat.filter(bool), st.sampled_from([2, 3, 5, 7, 691]))
def test_padic_val_additive(x, y, p):
    assert padic_val(x * y, p) == padic_val(x, p) + padic_val(y, p)

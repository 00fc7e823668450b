import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from asdcong.char_eis import DirichletChar, classical_eisenstein
from asdcong.engine import (
    CoeffForm,
    InfeasibleSpec,
    NonIntegralAtP,
    dlog,
    excluded_primes,
    expand_in_t,
    expand_in_t_mod,
    find_corollary,
    find_theorem1,
    find_theorem1_all,
    find_theorem2,
    omega_shift_integrality,
    phi,
    suite_modulus,
    transfer_check,
    verify_asd,
    verify_threeterm,
    verify_twisted,
)
from asdcong.qconstructors import EtaQuotient, eta_series, jacobi_theta_sq
from asdcong.series_core import INFINITY, PrecisionExhausted, QSeries, compose, revert
from asdcong.spaces import SpaceSpec, sturm_bound

F = Fraction
T5 = "eta(5)^6/eta(1)^6"


def eta_q(text, level, prec):
    return EtaQuotient.parse(text, level).series(prec)


def sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def division_oracle(num, den, n):
    out = []
    for k in range(n):
        out.append((F(num[k]) - sum(out[j] * den[k - j] for j in range(k))) / den[0])
    return out


def delta_coeffs(n):
    return (eta_series(n) ** 24).shift(1).coefficient_list(0, n)


# logarithmic derivative and Phi ---------------------------------------------------------


def test_dlog_examples():
    assert dlog(QSeries.monomial(1, 8)).coefficient_list(0, 7) == [1, 0, 0, 0, 0, 0, 0]
    t = QSeries([F(1), F(6)], 1, 10)
    want = division_oracle([1, 12] + [0] * 6, [1, 6] + [0] * 6, 8)
    assert dlog(t).coefficient_list(0, 8) == want
    assert want[:3] == [1, 6, -36]


def test_dlog_of_level_two_hauptmodul():
    # theta(t)/t for t = eta(2)^24/eta(1)^24 equals -E2(z) + 2 E2(2z), i.e. 1 + 24 sum sigma_1 (q^n - 2 q^(2n))
    t = eta_q("eta(2)^24/eta(1)^24", 2, 31)
    got = dlog(t).coefficient_list(0, 30)
    want = [1] + [24 * sigma1(n) - (48 * sigma1(n // 2) if n % 2 == 0 else 0) for n in range(1, 30)]
    assert got == want
    assert got[:4] == [1, 24, 24, 96]


def test_phi_basic_properties():
    g = eta_q("eta(2)^16/eta(1)^8", 2, 20)
    f = eta_q("eta(1)^16/eta(2)^8", 2, 20)
    h = QSeries([F(1), F(3), F(-2)], 0, 20)
    assert phi(g, g).is_zero
    assert phi(g, f + h.scale(3)).agrees_with(phi(g, f) + phi(g, h).scale(3))
    # Phi_g(f) = -f * dlog(g/f): the sign used by every Theorem-2 certificate
    assert phi(g, f).agrees_with(-(f * dlog(g / f)))
    # f = 1 + ...: the constant term of Phi_g(f) is -1
    assert phi(g, f)[0] == -1
    # Phi_g(c g) vanishes for every constant c
    assert phi(g, g.scale(F(7, 3))).is_zero


def test_phi_delta_e12_is_minus_e14():
    delta = eta_q("eta(1)^24", 1, 15)
    got = phi(delta, classical_eisenstein(12, 1, 15))
    assert got.agrees_with(classical_eisenstein(14, 1, 14).scale(-1), 14)


# expansion in t -------------------------------------------------------------------------


def test_expand_examples():
    t = eta_q(T5, 5, 12)
    f = eta_q("eta(1)^5/eta(5)", 5, 12)
    assert list(expand_in_t(f, t, 8).b) == [1, -5, 35, -275, 2275, -19255, 163925, -1385725, 11483875]
    t6 = eta_q("eta(2)^6*eta(6)^6/(eta(1)^6*eta(3)^6)", 6, 10)
    f6 = eta_q("eta(1)^4*eta(3)^4/(eta(2)^2*eta(6)^2)", 6, 10)
    assert list(expand_in_t(f6, t6, 8).b) == [1, -4, 28, -256, 2716, -31504, 387136, -4951552, 65218204]
    assert list(expand_in_t(t, t, 6).b) == [0, 1, 0, 0, 0, 0, 0]


def test_expand_routes_agree_with_lagrange_composition():
    t = eta_q(T5, 5, 90)
    f = eta_q("eta(1)^5/eta(5)", 5, 90)
    a = expand_in_t(f, t, 80, "compose")
    b = expand_in_t(f, t, 80, "projection")
    assert a.b == b.b
    assert compose(f, revert(t)).coefficient_list(0, 81) == list(a.b)
    assert a.reconstruction_ok() and b.reconstruction_ok()


def test_expand_precision_error():
    t = eta_q(T5, 5, 6)
    with pytest.raises(PrecisionExhausted):
        expand_in_t(t, t, 10)


def test_expand_mod_matches_exact():
    t = eta_q(T5, 5, 252)
    f = eta_q("eta(1)^5/eta(5)", 5, 252)
    M = suite_modulus([2, 3, 7, 11], 250)
    exact = expand_in_t(f, t, 250).b
    assert expand_in_t_mod(f, t, 250, M).agrees_with(exact)


def test_certificate_expansion_mod_matches_exact_with_denominators():
    spec = SpaceSpec(1, "principal", 12)
    cert = find_theorem2(spec, "eta(1)^24", f1=F(65520, 691))
    n = 200
    exact = expand_in_t(cert.f_series(n + 1), cert.t_series(n + 1), n).b
    M = suite_modulus([2, 3, 5, 7], n)
    assert cert.expansion_mod(n, M).agrees_with(exact)
    with pytest.raises(ValueError):
        cert.expansion_mod(10, 691)


# searches --------------------------------------------------------------------------------


def _identity_far(cert, extra=25):
    P = cert.prec + extra
    lhs = cert.f_series(P) * dlog(cert.t_series(P + 1))
    return lhs.agrees_with(cert.combo.series(P), P)


def test_find_theorem1_level5():
    cert = find_theorem1(SpaceSpec(5, "jacobi_top/5", 2), T5)
    P = cert.prec
    assert P >= sturm_bound(5, 4) + 10
    assert cert.f.truncate(P) == eta_q("eta(1)^5/eta(5)", 5, P)
    assert cert.combo.render() and len(cert.combo.elements) == 1
    assert cert.identity_holds() and _identity_far(cert)
    assert excluded_primes(cert).render() == "(p/5) = 1"
    assert cert.table_agrees is True


def test_find_theorem1_level2_with_pins():
    spec = SpaceSpec(2, "principal", 4)
    cert = find_theorem1(spec, "eta(2)^24/eta(1)^24", pins={0: 1, 1: -16})
    P = cert.prec
    assert cert.f.truncate(P) == eta_q("eta(1)^16/eta(2)^8", 2, P)
    terms = sorted((e.dilation, e.coefficient) for e in cert.combo.elements)
    assert terms == [(1, 8), (2, -512)]
    assert cert.identity_holds() and _identity_far(cert)
    b = expand_in_t(cert.f_series(8), cert.t_series(8), 5).b
    assert list(b) == [1, -16, 496, -19456, 860656, -40950016]
    assert excluded_primes(cert).render() == "p != 2"


def test_find_theorem1_all_spans_solution_space():
    certs = find_theorem1_all(SpaceSpec(2, "principal", 4), "eta(2)^24/eta(1)^24")
    assert len(certs) >= 1
    for c in certs:
        assert c.identity_holds()


def test_find_corollary_quadratic_character():
    spec = SpaceSpec(3, "jacobi_top/3", 3)
    c1, c2 = find_corollary(spec, "eta(3)^12/eta(1)^12")
    P = c1.prec
    assert c1.f.truncate(P) == eta_q("eta(1)^9/eta(3)^3", 3, P)
    assert c2.f.truncate(P) == eta_q("eta(3)^9/eta(1)^3", 3, P)
    for c in (c1, c2):
        assert len(c.combo.elements) == 1 and c.identity_holds()
    b2 = expand_in_t(c2.f_series(12), c2.t_series(12), 7).b
    assert list(b2) == [0, 1, -9, 135, -2439, 48519, -1023759, 22478121]


def test_find_corollary_trivial_character_single_certificate():
    certs = find_corollary(SpaceSpec(2, "principal", 4), "eta(2)^24/eta(1)^24")
    assert len(certs) == 1 and certs[0].identity_holds()


def test_find_theorem2_examples():
    cert = find_theorem2(SpaceSpec(2, "principal", 4), "eta(2)^16/eta(1)^8", f1=-16)
    P = cert.prec
    assert cert.f.truncate(P) == eta_q("eta(1)^16/eta(2)^8", 2, P)
    assert cert.t.truncate(P).agrees_with(eta_q("eta(2)^24/eta(1)^24", 2, P))
    g = eta_q("eta(2)^16/eta(1)^8", 2, P + 1)
    assert (-phi(g, cert.f)).agrees_with(cert.combo.series(P), P)
    assert cert.identity_holds()

    c5 = find_theorem2(SpaceSpec(5, "principal", 4), "eta(1)^4*eta(5)^4", f1=10)
    assert c5.f.coefficient_list(0, 8) == [1, 10, 80, 260, 680, 1390, 2320, 3180]
    assert sorted(c5.combo.classical_terms()) == [(F(1, 126), 1), (F(125, 126), 5)]
    assert list(expand_in_t(c5.f_series(8), c5.t_series(8), 5).b) == [1, 10, 220, 5800, 171400, 5428240]

    c7 = find_theorem2(SpaceSpec(7, "jacobi_top/7", 3), "eta(1)^3*eta(7)^3", f1=5)
    coeffs = sorted(e.coefficient for e in c7.combo.elements)
    assert coeffs == [F(-49, 16), F(1, 16)]
    assert list(expand_in_t(c7.f_series(8), c7.t_series(8), 4).b) == [1, 5, 67, 1063, 19091]
    assert not excluded_primes(c7)(2)


def test_find_theorem2_infeasible():
    with pytest.raises(InfeasibleSpec):
        find_theorem2(SpaceSpec(1, "principal", 4), "eta(1)^24")


# congruence checks ---------------------------------------------------------------------


EX1 = [1, -5, 35, -275, 2275, -19255, 163925, -1385725, 11483875]


def test_verify_asd_examples():
    rep = verify_asd(EX1, 7, 8)
    assert rep.verdict and len(rep.checks) == 1
    assert (EX1[7] - EX1[1]) % 7 == 0
    assert verify_asd([3] * 30, 5, 29).verdict
    bad = verify_asd(list(range(30)), 5, 29)
    assert not bad.verdict
    w = bad.first_failure()
    assert (w.ell, w.r, w.index) == (1, 1, 5)


def test_verify_asd_non_integral_and_precision():
    rep = verify_asd([1, F(1, 3), 2, F(1, 3)], 3, 3)
    assert rep.first_failure().tag == "NonIntegralAtP"
    with pytest.raises(PrecisionExhausted):
        verify_asd([1, 2, 3], 2, 8)


def test_verify_twisted_examples():
    b2 = [0, 1, -9, 135, -2439, 48519, -1023759, 22478121]
    chi = DirichletChar(3, "jacobi_top/3")
    rep = verify_twisted(b2, 5, chi, 7)
    # chi(5) = -1: b_5 + b_1 = 48520, divisible by 5
    assert rep.verdict and rep.checks[0].index == 5
    # chi(3) = 0: the check reduces to p^r | b_(l p^r)
    deg = verify_twisted(list(range(10)), 3, chi, 9)
    assert deg.verdict and all(c.tag == "degenerate" for c in deg.checks)


def test_verify_threeterm_on_eigenform_is_exact():
    a = delta_coeffs(201)
    for p in (2, 3, 5, 7):
        rep = verify_threeterm(a, a, 10, p, 200)
        assert rep.verdict
        # the Hecke recursion makes the combination vanish unless r = 1 and p | l
        for c in rep.checks:
            if c.r >= 2 or c.ell % p:
                assert c.valuation is INFINITY


def test_verify_threeterm_r1_boundary():
    a = delta_coeffs(30)
    b = [0, 1, 5, 0, 0, 0, 0, 0]
    # only r = 1 at bound 3 for p = 2: b_2 - a_2 b_1 = 5 + 24 = 29, odd
    rep = verify_threeterm(b, a, 10, 2, 3)
    assert [(c.ell, c.r) for c in rep.checks] == [(1, 1)]
    assert not rep.verdict


def test_modular_and_exact_verdicts_agree():
    t = eta_q(T5, 5, 302)
    f = eta_q("eta(1)^5/eta(5)", 5, 302)
    n = 300
    exact = list(expand_in_t(f, t, n).b)
    for p in (2, 3, 7, 11):
        M = suite_modulus([p], n)
        res = expand_in_t_mod(f, t, n, M)
        assert verify_asd(res.b, p, n, modulus=M).verdict == verify_asd(exact, p, n).verdict


# differential forms and transfer ------------------------------------------------------------


def test_omega_shift_integrality_examples():
    assert omega_shift_integrality(CoeffForm(list(range(20)), 3)) == (False, 3)
    assert omega_shift_integrality(CoeffForm([0] + [1] * 30, 5)) == (True, None)
    with pytest.raises(NonIntegralAtP):
        CoeffForm([0, F(1, 5)], 5)


def test_omega_shift_matches_asd_on_integral_sequences():
    rng = random.Random(11)
    for p in (2, 3, 5):
        for _ in range(20):
            w = [rng.randint(-3, 3) for _ in range(3)]
            al = [0] + [sum(x * a ** n for x, a in zip(w, (2, 3, 5))) for n in range(1, 40)]
            if rng.random() < 0.5:
                al[rng.randrange(1, 40)] += 1
            ok, _ = omega_shift_integrality(CoeffForm(al, p))
            assert ok == verify_asd(al, p, 39).verdict


def test_transfer_identity():
    u = QSeries.monomial(1, 40)
    c = [0] + [2 ** n for n in range(1, 39)]
    rb, rc = transfer_check(u, c, 3, 38)
    assert rb.verdict and rc.verdict


def test_transfer_example_one():
    # sum b_n t^(n-1) dt = sum c_n q^(n-1) dq with c_n the coefficients of f * theta(t)/t
    t = eta_q(T5, 5, 125)
    f = eta_q("eta(1)^5/eta(5)", 5, 125)
    c = (f * dlog(t)).coefficient_list(0, 122)
    rb, rc = transfer_check(t, c, 11, 121)
    assert rb.verdict and rc.verdict
    assert [x for x in expand_in_t(f, t, 8).b] == EX1


def _random_unit_series(rng, n):
    return QSeries([F(1)] + [F(rng.randint(-4, 4)) for _ in range(n)], 1, n + 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_transfer_randomized(p):
    rng = random.Random(1000 + p)
    bound = p ** 3
    for trial in range(50):
        t = _random_unit_series(rng, bound)
        w = [rng.randint(-2, 2) for _ in range(3)]
        c = [0] + [sum(x * a ** n for x, a in zip(w, (1, 2, 3))) for n in range(1, bound + 1)]
        inject = trial % 2 == 1
        if inject:
            c[p * rng.randint(1, bound // p)] += 1
        rb, rc = transfer_check(t, c, p, bound)
        assert rc.verdict == (not inject)
        assert rb.verdict == rc.verdict, (p, trial)


def test_transfer_rejects_non_integral():
    with pytest.raises(NonIntegralAtP):
        transfer_check(QSeries.monomial(1, 10), [0, F(1, 2)] + [0] * 7, 2, 8)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=30, max_size=30), st.sampled_from([2, 3, 5]))
def test_suite_modulus_covers_every_check(coeffs, p):
    M = suite_modulus([p], 29)
    k = 0
    while p ** (k + 1) <= 29:
        k += 1
    assert M == p ** k
    b = [0] + [sum(c * (i + 2) ** n for i, c in enumerate(coeffs[:3])) for n in range(1, 30)]
    assert verify_asd([x % M for x in b], p, 29, modulus=M).verdict == verify_asd(b, p, 29).verdict


def test_theta_squared_expansion_in_t():
    t = eta_q("eta(1)^8*eta(4)^16/eta(2)^24", 4, 12)
    b = expand_in_t(jacobi_theta_sq(12), t, 8).b
    assert list(b) == [1, 4, 36, 400, 4900, 63504, 853776, 11778624, 165636900]

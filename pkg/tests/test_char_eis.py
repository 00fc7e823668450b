from fractions import Fraction
from math import comb, gcd

import pytest
from hypothesis import given, settings, strategies as st

from asdcong import tables
from asdcong.char_eis import (
    DirichletChar,
    EisensteinCombo,
    EisensteinElement,
    ParityError,
    bernoulli_number,
    char_value,
    classical_eisenstein,
    combo_congruence_primes,
    eisenstein_basis,
    eisenstein_series,
    gen_bernoulli,
)
from asdcong.engine import dlog, verify_asd
from asdcong.qconstructors import EtaQuotient
from asdcong.series_core import is_prime
from asdcong.spaces import SpaceSpec, dim_E

F = Fraction
chi0 = DirichletChar(1)
m3 = DirichletChar(3, "jacobi_top/3")
m4 = DirichletChar(4, "kronecker_-4")
m5 = DirichletChar(5, "jacobi_top/5")


def euler_legendre(a, q):
    r = pow(a % q, (q - 1) // 2, q)
    return 0 if a % q == 0 else (1 if r == 1 else -1)


def bernoulli_oracle(n):
    """Akiyama-Tanigawa, giving B_1 = +1/2."""
    a = [F(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = F(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


def test_char_value_examples():
    assert char_value(m5, 2) == -1 and char_value(m5, 4) == 1
    assert char_value(DirichletChar(6), 35) == 1 and char_value(DirichletChar(6), 10) == 0
    assert char_value(m4, 3) == -1


@pytest.mark.parametrize("q", [3, 5, 7, 13])
def test_quadratic_characters_match_euler_criterion(q):
    chi = DirichletChar(q, f"jacobi_top/{q}")
    for p in range(2, 1000):
        if is_prime(p):
            assert chi.value(p) == euler_legendre(p, q)


def test_kronecker_minus_four():
    for n in range(-20, 200):
        want = 0 if n % 2 == 0 else (1 if n % 4 == 1 else -1)
        assert m4.value(n) == want


@settings(max_examples=200, deadline=None)
@given(st.integers(-500, 500), st.integers(-500, 500), st.sampled_from(["jacobi_top/3", "jacobi_top/5", "jacobi_top/7", "jacobi_top/13", "kronecker_-4", "principal"]))
def test_complete_multiplicativity(m, n, kind):
    chi = DirichletChar({"principal": 6, "kronecker_-4": 8}.get(kind, 26 if kind.endswith("13") else 21 if kind.endswith("7") else 15), kind)
    assert chi.value(m * n) == chi.value(m) * chi.value(n)
    assert (chi.value(n) == 0) == (gcd(n, chi.modulus) != 1)


def test_bernoulli_numbers():
    for k in range(0, 20):
        if k != 1:
            assert bernoulli_number(k) == bernoulli_oracle(k)
    assert bernoulli_number(1) == F(-1, 2)
    assert bernoulli_number(6) == F(1, 42)
    assert bernoulli_number(12) == F(-691, 2730)


def test_gen_bernoulli_examples():
    assert gen_bernoulli(4, chi0) == F(-1, 30)
    assert gen_bernoulli(3, m4.primitive()) == F(3, 2)
    # with B_1 = -1/2 in the recurrence, B_{1,trivial} = B_1(1) = +1/2
    assert gen_bernoulli(1, chi0) == F(1, 2)


def test_gen_bernoulli_direct_sum():
    # B_{k,psi} = f^(k-1) sum_a psi(a) B_k(a/f) with an independent polynomial
    def bpoly(k, x):
        return sum(comb(k, j) * bernoulli_oracle(j) * (-1) ** j * x ** (k - j) for j in range(k + 1))

    for psi, f in ((m5, 5), (m3, 3), (m4, 4)):
        for k in range(1, 8):
            want = f ** (k - 1) * sum(psi.value(a) * bpoly(k, F(a, f)) for a in range(1, f + 1))
            assert gen_bernoulli(k, psi.primitive()) == want


def test_eisenstein_examples():
    e6 = eisenstein_series(6, chi0, chi0, 1, 4)
    assert e6.coefficient_list(0, 4) == [F(-1, 504), 1, 33, 244]
    assert classical_eisenstein(6, 1, 3).coefficient_list(0, 3) == [1, -504, -16632]
    t = EtaQuotient.parse("eta(5)^6/eta(1)^6").series(41)
    f = EtaQuotient.parse("eta(1)^5/eta(5)").series(41)
    assert (f * dlog(t)).agrees_with(eisenstein_series(4, chi0, m5.primitive(), 1, 40))
    e3 = eisenstein_series(3, m4.primitive(), chi0, 1, 5)
    assert e3[0] == 0 and e3[1] == 1
    with pytest.raises(ParityError):
        eisenstein_series(4, chi0, m4.primitive(), 1, 5)


def test_dilation():
    e = eisenstein_series(4, chi0, chi0, 3, 13)
    base = eisenstein_series(4, chi0, chi0, 1, 5)
    assert [e[3 * n] for n in range(5)] == base.coefficient_list(0, 5)
    assert all(e[n] == 0 for n in range(1, 13) if n % 3)


def test_basis_examples():
    b = eisenstein_basis(6, 2, DirichletChar(2))
    assert [(e.chi.kind, e.psi.kind, e.dilation) for e in b] == [("principal", "principal", 1), ("principal", "principal", 2)]
    b = eisenstein_basis(5, 3, DirichletChar(3, "jacobi_top/3"))
    assert [(e.chi.kind, e.psi.kind, e.dilation) for e in b] == [("principal", "jacobi_top/3", 1), ("jacobi_top/3", "principal", 1)]
    assert len(eisenstein_basis(4, 1, DirichletChar(1))) == 1


def _rows(which):
    for row in which:
        for k in range(1, 15):
            if k % row["weight_modulus"] == row["weight_residue"]:
                yield row["level"], row["character"], k


def test_basis_size_matches_dim_E():
    rows = list(_rows(tables.table1())) + list(_rows(tables.table3()))
    for N, kind, k in rows:
        spec = SpaceSpec(N, kind, k + 2)
        assert len(eisenstein_basis(k + 2, N, spec.character)) == dim_E(spec), (N, kind, k)


def test_combo_primes_examples():
    combo = EisensteinCombo([EisensteinElement(4, chi0, m5)], 5, DirichletChar(5, "jacobi_top/5"))
    assert combo_congruence_primes(combo, 1).primes(60) == [p for p in range(2, 61) if is_prime(p)]
    combo = EisensteinCombo([EisensteinElement(5, chi0, m3, 1, F(3))], 3, DirichletChar(3, "jacobi_top/3"))
    assert combo_congruence_primes(combo, 1).primes(60) == [p for p in range(2, 61) if is_prime(p)]
    combo = EisensteinCombo([EisensteinElement(4, chi0, m5, 1, F(1, 7))], 5, DirichletChar(5, "jacobi_top/5"))
    pred = combo_congruence_primes(combo, 1)
    assert not pred(7) and pred(11)
    assert not combo_congruence_primes(combo, 691)(691)


def test_combo_rejects_wrong_character():
    with pytest.raises(ValueError):
        EisensteinCombo([EisensteinElement(4, chi0, chi0)], 5, DirichletChar(5, "jacobi_top/5"))


@pytest.mark.parametrize(
    "k,chi,psi,d",
    [(4, chi0, chi0, 1), (6, chi0, chi0, 2), (4, chi0, m5, 1), (3, chi0, m4, 1), (3, m4, chi0, 1), (5, m3, chi0, 1), (5, chi0, m3, 3)],
)
def test_basis_elements_satisfy_congruences(k, chi, psi, d):
    e = eisenstein_series(k, chi.primitive(), psi.primitive(), d, 201)
    c = e.coefficient_list(0, 201)
    for p in (2, 3, 5, 7, 11, 13):
        if d % p == 0 or chi.primitive().value(p) != 1:
            continue
        assert verify_asd(c, p, 200).verdict, p


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.sampled_from([(4, "principal"), (3, "kronecker_-4"), (4, "jacobi_top/5"), (5, "jacobi_top/3")]))
def test_divisor_coefficients_multiplicative(m, n, kp):
    if gcd(m, n) != 1:
        return
    k, kind = kp
    psi = DirichletChar({"principal": 1, "kronecker_-4": 4, "jacobi_top/5": 5, "jacobi_top/3": 3}[kind], kind)
    e = eisenstein_series(k, chi0, psi, 1, m * n + 1)
    assert e[m * n] == e[m] * e[n]

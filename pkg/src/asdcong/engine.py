"""Searches, expansions in a modular function, and congruence verification.

The central objects are

* ``expand_in_t``: coefficients b_n of f = sum b_n t^n for t = q + O(q^2);
* ``find_theorem1``: f in M_k(N, chi) with f * (q dt/dq)/t Eisenstein;
* ``find_theorem2``: f = 1 + ... with Phi_g(f) Eisenstein, and t = g/f;
* ``verify_asd`` / ``verify_twisted`` / ``verify_threeterm``: bounded checks
  of b_{l p^r} = b_{l p^(r-1)} mod p^r and its variants.

Expansion in t uses the residue formula

    b_m = [q^0] (f * theta(t)/t) * t^(-m),

evaluated for all m at once as a power projection: with u = t/q and
G = f * (theta t / t) * u^(-n), the numbers [q^n] G t^j for j = 0..n are
b_n, ..., b_0.  Rational t is first rescaled (q -> lambda q) to integer
coefficients so the bulk of the work is integer multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2

from . import _kernel
from ._linalg import nullspace, rref
from .char_eis import (
    DirichletChar,
    EisensteinCombo,
    combo_congruence_primes,
    eisenstein_basis,
    make_predicate,
)
from .qconstructors import EtaQuotient
from .series_core import (
    INFINITY,
    PrecisionExhausted,
    QSeries,
    ReversionOrderError,
    CompositionOrderError,
    compose,
    is_prime,
    lcm,
    revert,
)
from .spaces import (
    MARGIN,
    SpaceSpec,
    UnsupportedSpace,
    build_basis,
    condition_star,
    dim_E,
    dim_M,
    sturm_bound,
)
from . import tables

__all__ = [
    "ExpansionResult",
    "SearchCertificate",
    "CongruenceReport",
    "Check",
    "CoeffForm",
    "NoSolution",
    "InfeasibleSpec",
    "NonVanishingConstraint",
    "NonIntegralAtP",
    "dlog",
    "phi",
    "expand_in_t",
    "find_theorem1",
    "find_theorem1_all",
    "find_corollary",
    "find_theorem2",
    "verify_asd",
    "verify_twisted",
    "verify_threeterm",
    "congruence_suite",
    "excluded_primes",
    "table1_predicate",
    "omega_shift_integrality",
    "transfer_check",
    "residue_coefficients",
    "expand_in_t_mod",
    "ModularExpansion",
    "suite_modulus",
]

SMALL_EXPANSION = 64  # below this, compose-with-reversion is used by default


class NoSolution(RuntimeError):
    """The linear system that should contain a solution came out empty."""


class InfeasibleSpec(ValueError):
    """The dimension count does not guarantee a solution for this space."""


class NonVanishingConstraint(RuntimeError):
    """No solution has a nonzero constant term."""


class NonIntegralAtP(ArithmeticError):
    """A coefficient involved in a congruence check has p in its denominator."""


# basic operators --------------------------------------------------------------


def dlog(t):
    """theta(t)/t, the logarithmic derivative q (dt/dq) / t."""
    return t.theta() / t


def phi(g, f):
    """Phi_g(f) = (theta(f) g - theta(g) f) / g."""
    return (f.theta() * g - g.theta() * f) / g


# expansion in t -----------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionResult:
    f: QSeries
    t: QSeries
    b: tuple
    n_terms: int
    method: str = "projection"

    def reconstruction(self):
        """sum_{m <= n} b_m t^m to precision n+1."""
        n = self.n_terms
        return compose(QSeries(self.b, 0, n + 1), self.t.truncate(n + 1))

    def reconstruction_ok(self):
        n = self.n_terms
        return self.reconstruction().agrees_with(self.f.truncate(n + 1), n + 1)

    def to_record(self):
        return {
            "n_terms": self.n_terms,
            "method": self.method,
            "b": [str(x) for x in self.b],
        }


def _check_t(t):
    if t.is_zero or t.lead != 1:
        raise ReversionOrderError("t must have the form a_1 q + a_2 q^2 + ... with a_1 != 0")


def _scaling(a):
    """Smallest-ish lambda making a_m lambda^(m-1) integral for all m (a[0] = a_1 = 1)."""
    lam = 1
    for m in range(1, len(a)):
        x = a[m] * lam ** m
        if x.denominator != 1:
            lam *= x.denominator
    return lam


def _residues(C_coeffs, a, n):
    """b_0..b_n with b_m = [u^0] C(u) t(u)^(-m), t = u + a_2 u^2 + ...

    ``C_coeffs`` holds C_0..C_n and ``a`` holds a_1..a_(n+1) (a_1 = 1),
    all Fractions.
    """
    a = [Fraction(x) for x in a[: n + 1]]
    a += [Fraction(0)] * (n + 1 - len(a))
    lam = _scaling(a)
    v = [int(a[i] * lam ** i) for i in range(n + 1)]  # t(lam u)/(lam u)
    D = lcm(*(Fraction(c).denominator for c in C_coeffs[: n + 1])) if C_coeffs else 1
    Ch = [int(Fraction(c) * D) * lam ** m for m, c in enumerate(C_coeffs[: n + 1])]
    Ch += [0] * (n + 1 - len(Ch))
    phi_ = _kernel.inverse(v, n + 1)
    G = _kernel.mul(Ch, _kernel.power(phi_, n, n + 1), n + 1)
    T = [0] + v[:n]
    r = _kernel.power_projection(G, T, n)
    out = []
    scale = D
    for m in range(n + 1):
        out.append(Fraction(r[n - m], scale))
        scale *= lam
    return out


def _dlog_coeffs(a, n):
    """Coefficients 0..n of theta(t)/t for t = u * v(u), v given by a_1..a_(n+1)."""
    a = [Fraction(x) for x in a[: n + 1]]
    a += [Fraction(0)] * (n + 1 - len(a))
    v = QSeries(a, 0, n + 1)
    return (v.theta() / v + 1).coefficient_list(0, n + 1)


def residue_coefficients(C, t, n):
    """b_0..b_n with sum b_m t^(m-1) dt = C(u) du / u, i.e. b_m = [u^0] C t^(-m).

    ``C`` is a QSeries or a sequence C_0, C_1, ...; ``t`` needs a unit
    leading coefficient and must be known through u^(n+1).
    """
    _check_t(t)
    if t.prec < n + 2:
        raise PrecisionExhausted(f"t known to u^{t.prec - 1}; need u^{n + 1}")
    if isinstance(C, QSeries):
        if C.lead < 0:
            raise CompositionOrderError("C must be a power series")
        if C.prec < n + 1:
            raise PrecisionExhausted(f"C known to u^{C.prec - 1}; need u^{n}")
        cs = C.coefficient_list(0, n + 1)
    else:
        cs = [Fraction(x) for x in C]
        if len(cs) < n + 1:
            raise PrecisionExhausted(f"{len(cs)} coefficients given; need {n + 1}")
        cs = cs[: n + 1]
    a1 = t[1]
    a = [t[m] / a1 for m in range(1, n + 2)]
    b = _residues(cs, a, n)
    if a1 != 1:
        b = [x / a1 ** m for m, x in enumerate(b)]
    return b


@lru_cache(maxsize=64)
def _expand_cached(f, t, n, method):
    if method == "compose":
        s = revert(t.truncate(n + 1))
        g = compose(f.truncate(n + 1), s)
        return tuple(g.coefficient_list(0, n + 1))
    a = [t[m] for m in range(1, n + 1)] + [Fraction(0)]
    C = [x for x in _kernel_product(f.coefficient_list(0, n + 1), _dlog_coeffs(a, n), n + 1)]
    return tuple(_residues(C, a, n))


def _kernel_product(x, y, n):
    """Product of two Fraction coefficient lists modulo x^n."""
    dx = lcm(*(c.denominator for c in x)) if x else 1
    dy = lcm(*(c.denominator for c in y)) if y else 1
    xi = [int(c * dx) for c in x]
    yi = [int(c * dy) for c in y]
    den = dx * dy
    return [Fraction(c, den) for c in _kernel.mul(xi, yi, n)]


def expand_in_t(f, t, n, method="auto"):
    """Coefficients b_0..b_n of f = sum b_m t^m, for t = q + a_2 q^2 + ...

    ``method`` is "compose" (f composed with the reversion of t),
    "projection" (residue formula by power projection) or "auto", which
    picks compose for n <= 64.  Results are cached.
    """
    if f.lead < 0:
        raise CompositionOrderError("f must be a power series in q")
    _check_t(t)
    if t[1] != 1:
        raise ReversionOrderError("t must have leading coefficient 1")
    if f.prec < n + 1 or t.prec < n + 1:
        raise PrecisionExhausted(
            f"expansion to t^{n} needs f and t through q^{n} (have {f.prec - 1}, {t.prec - 1})"
        )
    if method == "auto":
        method = "compose" if n <= SMALL_EXPANSION else "projection"
    if method not in ("compose", "projection"):
        raise ValueError(f"unknown expansion method {method!r}")
    b = _expand_cached(f.truncate(n + 1), t.truncate(n + 1), n, method)
    return ExpansionResult(f, t, b, n, method)


@dataclass(frozen=True)
class ModularExpansion:
    """b_0..b_n reduced modulo ``modulus`` (residues in [0, modulus))."""

    b: tuple
    modulus: int
    n_terms: int

    def agrees_with(self, exact):
        return all(
            (Fraction(x).numerator * pow(Fraction(x).denominator, -1, self.modulus) - y) % self.modulus == 0
            for x, y in zip(exact, self.b)
        )


def _mod_coeffs(coeffs, m):
    out = []
    for c in coeffs:
        c = Fraction(c)
        if math.gcd(c.denominator, m) != 1:
            raise ValueError(f"coefficient {c} is not invertible modulo {m}")
        out.append(c.numerator * pow(c.denominator, -1, m) % m)
    return out


def expand_in_t_mod(f, t, n, modulus):
    """b_0..b_n of f = sum b_m t^m modulo ``modulus``.

    Every denominator in f and t must be a unit modulo ``modulus``; the b_m
    are then integral at each prime dividing it, and the residues are exact.
    Much cheaper than the exact expansion when the b_m are long integers.
    """
    if f.lead < 0:
        raise CompositionOrderError("f must be a power series in q")
    _check_t(t)
    if t[1] != 1:
        raise ReversionOrderError("t must have leading coefficient 1")
    if f.prec < n + 1 or t.prec < n + 1:
        raise PrecisionExhausted(f"expansion to t^{n} needs f and t through q^{n}")
    m = int(modulus)
    a = [t[k] for k in range(1, n + 1)] + [Fraction(0)]
    return _expand_mod_lists(_mod_coeffs(f.coefficient_list(0, n + 1), m), _mod_coeffs(a, m), n, m)


def _expand_mod_lists(fm, v, n, m):
    """Core of expand_in_t_mod on residue lists: f and v = t/q, both mod m."""
    v = list(v[: n + 1]) + [0] * max(0, n + 1 - len(v))
    # theta(t)/t = 1 + theta(v)/v
    inv_v = _kernel.inverse_mod(v, n + 1, m)
    thv = [i * c % m for i, c in enumerate(v)]
    dl = _kernel.mul_mod(thv, inv_v, n + 1, m)
    dl[0] = (dl[0] + 1) % m
    C = _kernel.mul_mod(fm, dl, n + 1, m)
    G = _kernel.mul_mod(C, _kernel.power_mod(inv_v, n, n + 1, m), n + 1, m)
    r = _kernel.power_projection(G, [0] + v[:n], n, modulus=m)
    return ModularExpansion(tuple(r[n - k] % m for k in range(n + 1)), m, n)


def suite_modulus(primes, bound):
    """prod p^R with R the largest exponent such that p^R <= bound."""
    M = 1
    for p in primes:
        R = 0
        while p ** (R + 1) <= bound:
            R += 1
        M *= p ** max(R, 1)
    return M


# searches --------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchCertificate:
    spec: SpaceSpec
    f: QSeries
    t: QSeries
    combo: EisensteinCombo
    denominator_D: int
    excluded_primes: object  # PrimePredicate (Table-1 style, all basis characters)
    sharp_primes: object = None  # PrimePredicate from the combo's own elements
    kind: str = "theorem1"
    g: QSeries | None = None
    prec: int = 0
    table_row: dict | None = None
    table_agrees: bool | None = None
    notes: tuple = ()
    basis: object = None  # BasisSet the coordinates refer to
    coords: tuple = ()
    source: object = None  # t (theorem 1) or g (theorem 2) as given

    def f_series(self, prec):
        """f recomputed from its basis coordinates to any precision."""
        if prec <= self.f.prec:
            return self.f.truncate(prec)
        out = QSeries.zero(prec)
        for i, c in enumerate(self.coords):
            if c:
                out = out + self.basis.regenerate(i, prec).scale(c)
        return out

    def expansion_mod(self, n, modulus, numerator=None):
        """f expanded in t to t^n modulo ``modulus`` (see expand_in_t_mod).

        ``numerator="g*f"`` expands g*f instead of f (Theorem-2 certificates).
        """
        m = int(modulus)
        f = self.f_series(n + 1)
        fm = _mod_coeffs(f.coefficient_list(0, n + 1), m)
        if self.kind == "theorem2":
            # t/q = (g/q) / f, computed directly on residues
            g = _as_series(self.source, n + 2, self.spec.level)
            gm = _mod_coeffs(g.coefficient_list(1, n + 2), m)
            v = _kernel.mul_mod(gm, _kernel.inverse_mod(fm, n + 1, m), n + 1, m)
            if numerator == "g*f":
                g0 = _mod_coeffs(g.coefficient_list(0, n + 1), m)
                fm = _kernel.mul_mod(g0, fm, n + 1, m)
        else:
            if numerator is not None:
                raise ValueError("only Theorem-2 certificates carry a form g")
            t = self.t_series(n + 2)
            v = _mod_coeffs(t.coefficient_list(1, n + 2), m)
        return _expand_mod_lists(fm, v, n, m)

    def t_series(self, prec):
        """t to any precision (g/f for Theorem-2 certificates)."""
        if prec <= self.t.prec:
            return self.t.truncate(prec)
        if self.kind == "theorem2":
            return _as_series(self.source, prec, self.spec.level) / self.f_series(prec)
        return _as_series(self.source, prec, self.spec.level)

    def identity_series(self):
        """f * theta(t)/t, the left side of the certified identity."""
        return self.f * dlog(self.t)

    def identity_holds(self, upto=None):
        upto = self.prec if upto is None else upto
        lhs = self.identity_series()
        rhs = self.combo.series(upto)
        return lhs.agrees_with(rhs, upto)

    def to_record(self):
        rec = {
            "kind": self.kind,
            "spec": self.spec.to_record(),
            "precision": self.prec,
            "f": [str(c) for c in self.f.coefficient_list(0, min(self.prec, 20))],
            "t": [str(c) for c in self.t.coefficient_list(0, min(self.prec, 20))],
            "combo": self.combo.to_record(),
            "combo_text": self.combo.render(),
            "denominator_D": self.denominator_D,
            "D_status": "observed",
            "excluded_primes": self.excluded_primes.to_record(),
            "sharp_primes": self.sharp_primes.to_record() if self.sharp_primes else None,
            "table_row": self.table_row,
            "table_agrees": self.table_agrees,
            "notes": list(self.notes),
        }
        if self.g is not None:
            rec["g"] = [str(c) for c in self.g.coefficient_list(0, min(self.prec, 20))]
        return rec


def _as_series(x, prec, level):
    if isinstance(x, str):
        x = EtaQuotient.parse(x, level=level)
    if isinstance(x, EtaQuotient):
        if level % x.level:
            raise ValueError(f"{x} has level {x.level}, which does not divide {level}")
        return x.series(prec)
    if isinstance(x, QSeries):
        if x.prec < prec:
            raise PrecisionExhausted(f"series known to q^{x.prec - 1}; need q^{prec - 1}")
        return x.truncate(prec)
    raise TypeError(f"cannot use {type(x).__name__} as a q-series")


def _working_precision(spec, prec):
    return max(prec or 0, sturm_bound(spec.level, spec.weight + 2) + MARGIN)


def _combination(vectors, pins, forms, what):
    """A combination of nullspace vectors honouring the pins on f."""
    m = len(vectors)
    rows = []
    for e, value in sorted(pins.items()):
        row = []
        for v in vectors:
            row.append(sum((x * form[e] for x, form in zip(v, forms)), Fraction(0)))
        rows.append(row + [Fraction(value)])
    red, piv = rref(rows, m + 1)
    if m in piv:
        raise NoSolution(f"no {what} satisfies the pinned coefficients {pins}")
    lam = [Fraction(0)] * m
    for row, p in zip(red, piv):
        lam[p] = row[m]
    return [sum((l * v[i] for l, v in zip(lam, vectors)), Fraction(0)) for i in range(len(vectors[0]))]


def _solve_system(images, targets, P):
    """Nullspace of  sum x_i images_i - sum y_j targets_j = 0  through q^(P-1).

    Vectors are returned as (y..., x...) in reduced echelon form, so the
    Eisenstein coordinates lead.
    """
    m, e = len(images), len(targets)
    matrix = []
    for n in range(P):
        matrix.append([-tg[n] for tg in targets] + [im[n] for im in images])
    ns = nullspace(matrix, e + m)
    if not ns:
        return []
    red, _ = rref(ns, e + m)
    return red


def _form_from(x, forms, prec):
    out = QSeries.zero(prec)
    for c, form in zip(x, forms):
        if c:
            out = out + form.scale(c)
    return out


def _normalize(f, x, y):
    """Scale so that f has constant term 1, else leading coefficient 1."""
    c = f[0] if f[0] != 0 else f[f.lead]
    inv = 1 / c
    return f.scale(inv), [v * inv for v in x], [v * inv for v in y]


def _table1_row(spec, data_dir=None):
    for row in tables.table1(data_dir):
        if row["level"] != spec.level:
            continue
        if DirichletChar(spec.level, row["character"]) != spec.character:
            continue
        if spec.weight % row["weight_modulus"] == row["weight_residue"]:
            return row
    return None


def table1_predicate(row):
    """The prime condition of a Table 1 row as a predicate."""
    chars = [DirichletChar(row["level"], k) for k in row["characters"]]
    return make_predicate(math.prod(row["excluded"]) if row["excluded"] else 1, chars)


def _generic_predicate(spec, combo, D):
    elems = eisenstein_basis(spec.weight + 2, spec.level, spec.character)
    prod = int(D)
    for d in sorted({e.dilation for e in elems}):
        prod *= d
    for e in combo.elements:
        prod *= e.beta
    return make_predicate(prod, [e.chi for e in elems])


def _certificate(spec, f, t, combo_elems, prec, kind, g=None, data_dir=None, notes=(), basis=None, coords=(), source=None):
    combo = EisensteinCombo(combo_elems, spec.level, spec.character)
    ident = f * dlog(t)
    D = lcm(f.truncate(prec).denominator, t.truncate(prec).denominator, ident.truncate(prec).denominator)
    if g is not None:
        D = lcm(D, g.truncate(prec).denominator)
    generic = _generic_predicate(spec, combo, D)
    sharp = combo_congruence_primes(combo, D)
    # Table 1 lists the primes for the Theorem-1 searches only
    row = _table1_row(spec, data_dir) if kind != "theorem2" else None
    agrees = None
    if row is not None:
        agrees = generic.same_on(table1_predicate(row), 500)
    return SearchCertificate(
        spec=spec,
        f=f,
        t=t,
        combo=combo,
        denominator_D=int(D),
        excluded_primes=generic,
        sharp_primes=sharp,
        kind=kind,
        g=g,
        prec=prec,
        table_row=row,
        table_agrees=agrees,
        notes=tuple(notes),
        basis=basis,
        coords=tuple(coords),
        source=source,
    )


def _theorem1_system(spec, t, prec, data_dir):
    spec.check_supported()
    if spec.weight < 1:
        raise InfeasibleSpec("the search needs a positive weight")
    if not spec.parity_ok:
        raise InfeasibleSpec(f"{spec} has the wrong parity")
    if not condition_star(spec):
        raise InfeasibleSpec(f"dim M_k + dim E_(k+2) <= dim M_(k+2) for {spec}")
    P = _working_precision(spec, prec)
    ts = _as_series(t, P + 1, spec.level)
    _check_t(ts)
    if ts[1] != 1:
        raise ReversionOrderError("t must start q + ...")
    basis = build_basis(spec, max(P, sturm_bound(spec.level, spec.weight) + MARGIN), data_dir)
    forms = [b.truncate(P) for b in basis.forms]
    dl = dlog(ts).truncate(P)
    images = [(form * dl).coefficient_list(0, P) for form in forms]
    elems = eisenstein_basis(spec.weight + 2, spec.level, spec.character)
    targets = [e.series(P).coefficient_list(0, P) for e in elems]
    vectors = _solve_system(images, targets, P)
    if not vectors:
        raise NoSolution(f"no f in {spec} makes f*dlog(t) Eisenstein (condition (*) predicts one)")
    return P, ts, forms, elems, vectors, basis


def _solution(vector, forms, elems, P):
    e = len(elems)
    y, x = vector[:e], vector[e:]
    f = _form_from(x, forms, P)
    return f, x, y


def find_theorem1_all(spec, t, prec=None, data_dir=None):
    """One certificate per row of the echelonized solution space."""
    P, ts, forms, elems, vectors, basis = _theorem1_system(spec, t, prec, data_dir)
    out = []
    for vec in vectors:
        f, x, y = _solution(vec, forms, elems, P)
        f, x, y = _normalize(f, x, y)
        combo = [el.with_coefficient(c) for el, c in zip(elems, y)]
        out.append(_certificate(spec, f, ts, combo, P, "theorem1", data_dir=data_dir, basis=basis, coords=x, source=t))
    return out


def find_theorem1(spec, t, prec=None, pins=None, data_dir=None):
    """Search f in M_k(N, chi) with f * (q dt/dq)/t in the Eisenstein space of weight k+2.

    Without ``pins`` the first row of the echelonized solution space (in
    Eisenstein coordinates) is returned, scaled to constant term 1 (or
    leading coefficient 1).  ``pins`` maps exponents to prescribed
    coefficients of f and selects a solution inside the whole space.
    """
    P, ts, forms, elems, vectors, basis = _theorem1_system(spec, t, prec, data_dir)
    notes = []
    if pins:
        full_forms = [QSeries.zero(P)] * len(elems) + forms
        vec = _combination(vectors, pins, full_forms, "f")
        f, x, y = _solution(vec, forms, elems, P)
        if f.is_zero:
            raise NoSolution("pins select the zero form")
        notes.append(f"pinned coefficients {dict(sorted(pins.items()))}")
    else:
        f, x, y = _solution(vectors[0], forms, elems, P)
        f, x, y = _normalize(f, x, y)
    if len(vectors) > 1:
        notes.append(f"solution space has dimension {len(vectors)}")
    combo = [el.with_coefficient(c) for el, c in zip(elems, y)]
    return _certificate(spec, f, ts, combo, P, "theorem1", data_dir=data_dir, notes=notes, basis=basis, coords=x, source=t)


def _table3_like(spec):
    up = spec.with_weight(spec.weight + 2)
    return dim_M(spec) == dim_M(up) and dim_E(up) == 2


def find_corollary(spec, t, prec=None, data_dir=None):
    """Certificates with targets E_{k+2,chi0,chi} and (for chi != chi0) E_{k+2,chi,chi0}."""
    if spec.level not in (2, 3, 5, 7, 13) or not _table3_like(spec):
        raise UnsupportedSpace(f"{spec} is not a space with dim M_k = dim M_(k+2) and two Eisenstein series")
    P, ts, forms, elems, vectors, basis = _theorem1_system(spec, t, prec, data_dir)
    if spec.character.is_principal:
        f, x, y = _solution(vectors[0], forms, elems, P)
        f, x, y = _normalize(f, x, y)
        combo = [el.with_coefficient(c) for el, c in zip(elems, y)]
        return (_certificate(spec, f, ts, combo, P, "corollary", data_dir=data_dir, basis=basis, coords=x, source=t),)
    out = []
    order = sorted(range(len(elems)), key=lambda i: (not elems[i].chi.is_principal,))
    for i in order:
        pins = [Fraction(1) if j == i else Fraction(0) for j in range(len(elems))]
        rows = [list(v[: len(elems)]) for v in vectors]
        # find the combination of solution vectors with Eisenstein part = unit vector i
        aug = [[rows[r][j] for r in range(len(rows))] + [pins[j]] for j in range(len(elems))]
        red, piv = rref(aug, len(rows) + 1)
        if len(rows) in piv:
            raise NoSolution(f"{elems[i].label(False)} is not reached by f * dlog(t)")
        lam = [Fraction(0)] * len(rows)
        for row, p in zip(red, piv):
            lam[p] = row[len(rows)]
        vec = [sum((l * v[c] for l, v in zip(lam, vectors)), Fraction(0)) for c in range(len(vectors[0]))]
        f, x, y = _solution(vec, forms, elems, P)
        f, x, y = _normalize(f, x, y)
        combo = [el.with_coefficient(c) for el, c in zip(elems, y)]
        out.append(_certificate(spec, f, ts, combo, P, "corollary", data_dir=data_dir, basis=basis, coords=x, source=t))
    return tuple(out)


def find_theorem2(spec, g, prec=None, f1=None, data_dir=None):
    """Search f = 1 + f_1 q + ... with Phi_g(f) Eisenstein; t = g/f.

    f is determined up to adding multiples of g, so the coefficient f_1 is
    free; it defaults to 0 and can be pinned with ``f1``.
    """
    spec.check_supported()
    up = spec.with_weight(spec.weight + 2)
    if dim_M(spec) - 1 + dim_E(up) <= dim_M(up):
        raise InfeasibleSpec(f"image of Phi_g need not meet the Eisenstein space for {spec}")
    P = _working_precision(spec, prec)
    gs = _as_series(g, P + 1, spec.level)
    if gs.lead != 1 or gs[1] != 1:
        raise ValueError("g must start q + ...")
    basis = build_basis(spec, max(P + 1, sturm_bound(spec.level, spec.weight) + MARGIN), data_dir)
    forms = [b.truncate(P + 1) for b in basis.forms]
    images = [phi(gs, form).coefficient_list(0, P) for form in forms]
    elems = eisenstein_basis(spec.weight + 2, spec.level, spec.character)
    targets = [e.series(P).coefficient_list(0, P) for e in elems]
    vectors = _solve_system(images, targets, P)
    if not vectors:
        raise NoSolution(f"Phi_g misses the Eisenstein space for {spec}")
    full_forms = [QSeries.zero(P + 1)] * len(elems) + forms
    try:
        vec = _combination(vectors, {0: 1, 1: Fraction(0) if f1 is None else Fraction(f1)}, full_forms, "f")
    except NoSolution as exc:
        raise NonVanishingConstraint(f"no solution with constant term 1 in {spec}") from exc
    f, x, y = _solution(vec, forms, elems, P + 1)
    t = gs / f
    # with t = g/f one has f * theta(t)/t = -Phi_g(f); the certificate records
    # the identity for f * theta(t)/t, like every other certificate
    combo = [el.with_coefficient(-c) for el, c in zip(elems, y)]
    notes = [f"f_1 pinned to {Fraction(0) if f1 is None else Fraction(f1)}"]
    return _certificate(spec, f, t, combo, P, "theorem2", g=gs, data_dir=data_dir, notes=notes, basis=basis, coords=x, source=g)


def excluded_primes(cert):
    """The certificate's prime predicate (Table-1 style, using every basis character)."""
    return cert.excluded_primes


# congruence checks ------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    ell: int
    r: int
    index: int
    valuation: object  # int or INFINITY or None when not p-integral
    passed: bool
    tag: str = "ok"

    def to_record(self):
        v = self.valuation
        return {
            "ell": self.ell,
            "r": self.r,
            "index": self.index,
            "valuation": "inf" if v is INFINITY else v,
            "passed": self.passed,
            "tag": self.tag,
        }


@dataclass(frozen=True)
class CongruenceReport:
    sequence_id: str
    prime: int
    flavor: str
    checks: tuple
    bound: int = 0
    status: str = "claimed"

    @property
    def verdict(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def first_failure(self):
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def to_record(self, full=False):
        rec = {
            "sequence_id": self.sequence_id,
            "prime": self.prime,
            "flavor": self.flavor,
            "bound": self.bound,
            "status": self.status,
            "n_checks": len(self.checks),
            "verdict": "pass" if self.verdict else "fail",
        }
        bad = self.first_failure()
        if bad is not None:
            rec["first_failure"] = bad.to_record()
        if full:
            rec["checks"] = [c.to_record() for c in self.checks]
        return rec


def _val(x, p):
    """p-adic valuation of a Fraction/int (INFINITY at 0), without primality checks."""
    if x == 0:
        return INFINITY
    if isinstance(x, Fraction):
        num, den = x.numerator, x.denominator
    else:
        num, den = int(x), 1
    vn = int(gmpy2.remove(gmpy2.mpz(num), p)[1]) if num % p == 0 else 0
    vd = int(gmpy2.remove(gmpy2.mpz(den), p)[1]) if den % p == 0 else 0
    return vn - vd


def _integral(x, p):
    return not isinstance(x, Fraction) or x.denominator % p != 0


def _prepare(b, p, bound):
    if not is_prime(p):
        from .series_core import NotPrime

        raise NotPrime(f"{p} is not prime")
    b = [x if isinstance(x, (int, Fraction)) else Fraction(x) for x in b]
    if len(b) <= bound:
        raise PrecisionExhausted(f"sequence has {len(b)} terms; bound {bound} needs {bound + 1}")
    return b


def _pairs(p, bound):
    for ell in range(1, bound // p + 1):
        r = 1
        n = ell * p
        while n <= bound:
            yield ell, r, n
            r += 1
            n *= p


def _modular_depth(p, modulus):
    R = 0
    while modulus % p ** (R + 1) == 0:
        R += 1
    return R


def _run_checks(b, p, bound, combine, modulus=None):
    """Evaluate every (l, r) check.  With ``modulus`` the entries of b are
    residues and valuations are known only up to the power of p dividing it
    (reported as that power when the residue vanishes)."""
    checks = []
    if modulus is not None:
        R = _modular_depth(p, modulus)
        pR = p ** R
        top = 0
        while p ** (top + 1) <= bound:
            top += 1
        if R < top:
            raise ValueError(f"modulus carries p^{R} but checks up to r = {top} need p^{top}")
    for ell, r, n in _pairs(p, bound):
        terms = combine(ell, r, n)
        if modulus is None:
            if not all(_integral(x, p) for x in terms[1]):
                checks.append(Check(ell, r, n, None, False, "NonIntegralAtP"))
                continue
            v = _val(terms[0], p)
        else:
            x = terms[0] % pR
            v = R if x == 0 else _val(x, p)
        checks.append(Check(ell, r, n, v, v >= r, terms[2] if v >= r else "low-valuation"))
    return tuple(checks)


def verify_asd(b, p, bound, sequence_id="b", status="claimed", modulus=None):
    """Check p^r | b_{l p^r} - b_{l p^(r-1)} for all l, r >= 1 with l p^r <= bound.

    ``modulus``: the entries of b are residues modulo it (see expand_in_t_mod).
    """
    b = _prepare(b, p, bound)

    def combine(ell, r, n):
        x, y = b[n], b[n // p]
        return x - y, (x, y), "ok"

    checks = _run_checks(b, p, bound, combine, modulus)
    return CongruenceReport(sequence_id, p, "plain", checks, bound, status)


def verify_twisted(b, p, chi, bound, sequence_id="b", status="claimed", modulus=None):
    """Check p^r | b_{l p^r} - chi(p) b_{l p^(r-1)}.  chi(p) = 0 is tagged 'degenerate'."""
    b = _prepare(b, p, bound)
    cp = chi.value(p)
    tag = "degenerate" if cp == 0 else "ok"

    def combine(ell, r, n):
        x, y = b[n], b[n // p]
        return x - cp * y, (x, y), tag

    flavor = f"twisted({chi.symbol()})"
    checks = _run_checks(b, p, bound, combine, modulus)
    return CongruenceReport(sequence_id, p, flavor, checks, bound, status)


def verify_threeterm(b, a, k, p, bound, sequence_id="b", status="claimed", modulus=None):
    """Check p^r | b_{l p^r} - a_p b_{l p^(r-1)} + p^(k+1) b_{l p^(r-2)}.

    The last term is absent when l p^(r-2) is not an integer.
    """
    b = _prepare(b, p, bound)
    ap = a[p]
    pk = p ** (k + 1)

    def combine(ell, r, n):
        x, y = b[n], b[n // p]
        if r >= 2:
            z = b[n // (p * p)]
            return x - ap * y + pk * z, (x, y, z), "ok"
        return x - ap * y, (x, y), "ok"

    flavor = f"threeterm(a_p={ap}, weight exponent {k + 1})"
    checks = _run_checks(b, p, bound, combine, modulus)
    return CongruenceReport(sequence_id, p, flavor, checks, bound, status)


def congruence_suite(b, predicate, prime_max, bound, sequence_id="b", extra_primes=(), twist=None, modulus=None):
    """Reports for every prime <= prime_max allowed by ``predicate``, plus
    ``extra_primes`` labelled "empirical at bound".

    With ``twist`` (a character), the twisted check is used for every prime.
    ``modulus`` is passed through when b holds residues.
    """
    out = []
    for p in range(2, prime_max + 1):
        if not is_prime(p):
            continue
        claimed = predicate(p)
        if not claimed and p not in extra_primes:
            continue
        status = "claimed" if claimed else "empirical at bound"
        top = min(bound, len(b) - 1)
        if twist is not None:
            out.append(verify_twisted(b, p, twist, top, sequence_id, status, modulus))
        else:
            out.append(verify_asd(b, p, top, sequence_id, status, modulus))
    return out


# differential forms ---------------------------------------------------------------


@dataclass(frozen=True)
class CoeffForm:
    """The differential form sum_n alpha_n x^(n-1) dx, for a fixed prime."""

    alphas: tuple
    prime: int

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(Fraction(a) for a in self.alphas))
        for n, a in enumerate(self.alphas):
            if a.denominator % self.prime == 0:
                raise NonIntegralAtP(f"alpha_{n} = {a} is not {self.prime}-integral")


def omega_shift_integrality(form):
    """True iff p^(v_p(n)) divides alpha_n - alpha_(n/p) for every n >= 1
    (alpha_(n/p) = 0 when p does not divide n).  Returns (ok, witness n or None)."""
    p = form.prime
    al = form.alphas
    for n in range(1, len(al)):
        w = 0
        m = n
        while m % p == 0:
            m //= p
            w += 1
        prev = al[n // p] if n % p == 0 else Fraction(0)
        if _val(al[n] - prev, p) < w:
            return False, n
    return True, None


def transfer_check(t, c, p, bound):
    """Transfer a congruence between the two sides of sum b_n t^(n-1) dt = sum c_n u^(n-1) du.

    ``t`` is a series in u with a unit leading coefficient, known through
    u^(bound+1); ``c`` lists c_0..c_bound.  Returns (report on b, report on c).
    """
    if isinstance(t, QSeries) and t.prec < bound + 2:
        raise PrecisionExhausted(f"t must be known through u^{bound + 1}")
    for n, x in enumerate(c[: bound + 1]):
        if Fraction(x).denominator % p == 0:
            raise NonIntegralAtP(f"c_{n} = {x} is not {p}-integral")
    b = residue_coefficients(list(c[: bound + 1]), t, bound)
    return verify_asd(b, p, bound, "b"), verify_asd(list(c[: bound + 1]), p, bound, "c")

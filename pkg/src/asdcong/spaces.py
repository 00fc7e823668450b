"""Dimensions, condition (*), Sturm bounds and explicit bases of M_k(Gamma0(N), chi).

Dimensions come from the Cohen-Oesterle formula

    dim S_k - dim M_{2-k} = (k-1) mu/12 - (1/2) prod_p lam(r_p, s_p, p)
                            + g4(k) sum_{x^2=-1} chi(x) + g3(k) sum_{x^2+x+1=0} chi(x),

with mu = [SL2(Z):Gamma0(N)], r_p = v_p(N), s_p = v_p(cond chi).  The
Eisenstein part has dimension c0 = prod lam(r_p, s_p, p) for k >= 3.

Bases are assembled from data: Eisenstein-type series, the holomorphic eta
quotients listed in ``generators.json`` and products of lower-weight pieces,
row-reduced until the rank reaches dim M_k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import tables
from ._linalg import Echelon
from .char_eis import (
    DirichletChar,
    characters_mod,
    e2_difference,
    eisenstein_basis,
    eisenstein_series,
    primitive_characters,
    _product_is,
)
from .qconstructors import EtaQuotient, divisors, eta_quotient_series, gamma0_index
from .series_core import QSeries

__all__ = [
    "SpaceSpec",
    "BasisSet",
    "UnsupportedSpace",
    "RankDeficient",
    "CURATED_LEVELS",
    "dim_M",
    "dim_S",
    "dim_E",
    "condition_star",
    "condition_star_report",
    "sturm_bound",
    "build_basis",
    "eisenstein_dimension_c0",
]

CURATED_LEVELS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25)
MARGIN = 10


class UnsupportedSpace(ValueError):
    pass


class RankDeficient(RuntimeError):
    def __init__(self, spec, achieved, expected):
        super().__init__(
            f"generators reach rank {achieved} but dim M_{spec.weight}"
            f"(Gamma0({spec.level}), {spec.character.symbol()}) = {expected}"
        )
        self.spec = spec
        self.achieved = achieved
        self.expected = expected


@dataclass(frozen=True)
class SpaceSpec:
    level: int
    character: DirichletChar
    weight: int

    def __init__(self, level, character=None, weight=0):
        if character is None:
            character = DirichletChar(level)
        elif isinstance(character, str):
            character = DirichletChar(level, character)
        elif character.modulus != level:
            character = character.lift(level)
        object.__setattr__(self, "level", int(level))
        object.__setattr__(self, "character", character)
        object.__setattr__(self, "weight", int(weight))

    @property
    def parity_ok(self):
        return self.character.parity == (-1) ** self.weight

    def with_weight(self, k):
        return SpaceSpec(self.level, self.character, k)

    def check_supported(self):
        if self.level not in CURATED_LEVELS:
            raise UnsupportedSpace(f"level {self.level} is outside the curated list {CURATED_LEVELS}")
        if not self.character.is_real:
            raise UnsupportedSpace("only real characters are supported for spaces")
        return self

    def to_record(self):
        return {"level": self.level, "character": self.character.kind, "weight": self.weight}

    def __str__(self):
        return f"M_{self.weight}(Gamma0({self.level}), {self.character.symbol()})"


# dimension formulas ------------------------------------------------------------


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _lam(r, s, p):
    if 2 * s <= r:
        if r % 2 == 0:
            h = r // 2
            return p ** h + p ** (h - 1)
        return 2 * p ** ((r - 1) // 2)
    return 2 * p ** (r - s)


def eisenstein_dimension_c0(N, chi):
    from .qconstructors import prime_factors

    c0 = 1
    for p in prime_factors(N):
        c0 *= _lam(_vp(N, p), _vp(chi.conductor, p), p)
    return c0


def _gamma4(k):
    if k % 2:
        return Fraction(0)
    return Fraction(-1, 4) if k % 4 == 2 else Fraction(1, 4)


def _gamma3(k):
    r = k % 3
    return [Fraction(1, 3), Fraction(0), Fraction(-1, 3)][r]


def _cohen_oesterle(spec):
    N, chi, k = spec.level, spec.character, spec.weight
    mu = gamma0_index(N)
    c0 = eisenstein_dimension_c0(N, chi)
    s4 = sum(chi.value(x) for x in range(N) if (x * x + 1) % N == 0)
    s3 = sum(chi.value(x) for x in range(N) if (x * x + x + 1) % N == 0)
    return Fraction(k - 1) * mu / 12 - Fraction(c0, 2) + _gamma4(k) * s4 + _gamma3(k) * s3


def _trivial(spec):
    return spec.character.is_principal


def dim_E(spec):
    """Dimension of the Eisenstein subspace of M_k(Gamma0(N), chi)."""
    spec.check_supported()
    k = spec.weight
    if k < 0 or not spec.parity_ok:
        return 0
    if k == 0:
        return 1 if _trivial(spec) else 0
    c0 = eisenstein_dimension_c0(spec.level, spec.character)
    if k == 1:
        return c0 // 2
    if k == 2 and _trivial(spec):
        return c0 - 1
    return c0


def dim_S(spec):
    spec.check_supported()
    k = spec.weight
    if k <= 1 or not spec.parity_ok:
        # weight-one cusp forms do not exist below level 23
        return 0
    val = _cohen_oesterle(spec)
    if k == 2 and _trivial(spec):
        val += 1
    if val.denominator != 1:
        raise ArithmeticError(f"non-integral dimension {val} for {spec}")
    return int(val)


def dim_M(spec):
    spec.check_supported()
    k = spec.weight
    if k < 0 or not spec.parity_ok:
        return 0
    if k == 0:
        return 1 if _trivial(spec) else 0
    return dim_S(spec) + dim_E(spec)


def condition_star_report(spec):
    """Both readings of condition (*) for the weight pair (k, k+2)."""
    k = spec.weight
    up = spec.with_weight(k + 2)
    mk, mk2 = dim_M(spec), dim_M(up)
    proof = mk + dim_E(up) > mk2
    display = mk + dim_E(spec) > mk2
    return {
        "spec": spec.to_record(),
        "dim_M_k": mk,
        "dim_M_k_plus_2": mk2,
        "dim_E_k": dim_E(spec),
        "dim_E_k_plus_2": dim_E(up),
        "proof_version": proof,
        "display_version": display,
        "readings_agree": proof == display,
    }


def condition_star(spec):
    """Feasibility of the Theorem-1 linear system: dim M_k + dim E_{k+2} > dim M_{k+2}."""
    if not spec.parity_ok:
        return False
    return condition_star_report(spec)["proof_version"]


def sturm_bound(N, k):
    if k < 0:
        raise ValueError("weight must be nonnegative")
    return (k * gamma0_index(N)) // 12 + 1


# bases -----------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisSet:
    spec: SpaceSpec
    forms: tuple
    recipes: tuple  # per form: tuple of (coefficient, candidate recipe)
    rank: int
    prec: int

    @property
    def leads(self):
        return [f.lead for f in self.forms]

    def regenerate(self, i, prec=None):
        prec = self.prec if prec is None else prec
        out = QSeries.zero(prec)
        for c, recipe in self.recipes[i]:
            out = out + recipe_series(recipe, prec).scale(c)
        return out


def recipe_series(recipe, prec):
    """Expansion of a candidate recipe (nested tuples, see _candidates)."""
    kind = recipe[0]
    if kind == "eta":
        return eta_quotient_series(EtaQuotient.parse(recipe[1], level=recipe[2]), prec)
    if kind == "eis":
        _, k, chi, psi, d, part = recipe
        return eisenstein_series(
            k, DirichletChar(_cond(chi), chi), DirichletChar(_cond(psi), psi), d, prec, part
        )
    if kind == "e2":
        return e2_difference(recipe[1], prec)
    if kind == "prod":
        return recipe_series(recipe[1], prec) * recipe_series(recipe[2], prec)
    raise ValueError(f"unknown recipe {recipe!r}")


def recipe_text(recipe):
    kind = recipe[0]
    if kind == "eta":
        return recipe[1]
    if kind == "eis":
        _, k, chi, psi, d, part = recipe
        a = DirichletChar(_cond(chi), chi).symbol()
        b = DirichletChar(_cond(psi), psi).symbol()
        s = f"E_{{{k},{a},{b}}}"
        if part:
            s = f"{part}({s})"
        return s + (f"({d}z)" if d != 1 else "")
    if kind == "e2":
        return f"(E_2(z) - {recipe[1]}E_2({recipe[1]}z))"
    return f"{recipe_text(recipe[1])} * {recipe_text(recipe[2])}"


def _cond(kind):
    return {c.kind: c.conductor for c in primitive_characters()}[kind]


def _eisenstein_type(N, chi, k):
    """Recipes for Eisenstein-type forms of weight k (including weights 1, 2)."""
    out = []
    if k >= 3:
        for e in eisenstein_basis(k, N, chi):
            out.append(("eis", k, e.chi.kind, e.psi.kind, e.dilation, e.part))
        return out
    if k == 2 and chi.is_principal:
        out.extend(("e2", d) for d in divisors(N) if d > 1)
    prims = [c for c in primitive_characters() if c.is_real]
    for a in prims:
        for b in prims:
            if k < 3 and a.is_principal and b.is_principal:
                continue
            LR = a.conductor * b.conductor
            if N % LR or a.parity * b.parity != (-1) ** k:
                continue
            if not _product_is(a, b, chi, N):
                continue
            for d in divisors(N // LR):
                out.append(("eis", k, a.kind, b.kind, d, None))
    if k == 2 and chi.is_principal and N % 25 == 0:
        # the quartic pair mod 5 enters through real and imaginary parts
        for d in divisors(N // 25):
            out.extend(("eis", 2, "quartic_5", "quartic_5_conj", d, part) for part in ("re", "im"))
    return out


def _eta_generators(N, chi, k, data_dir=None):
    out = []
    for M in divisors(N):
        for g in tables.generators(M, data_dir):
            if g["weight"] != k:
                continue
            gchi = DirichletChar(M, g["character"])
            if not gchi.lift(N).equals_on(chi, N):
                continue
            out.append(("eta", g["expr"], N))
    return out


def _primary_candidates(N, chi, k, data_dir=None):
    return _eisenstein_type(N, chi, k) + _eta_generators(N, chi, k, data_dir)


def _candidates(spec, data_dir=None):
    N, chi, k = spec.level, spec.character, spec.weight
    yield from _primary_candidates(N, chi, k, data_dir)
    chars = characters_mod(N)
    for j in range(1, k // 2 + 1):
        for c1 in chars:
            for c2 in chars:
                if not _product_is(c1, c2, chi, N):
                    continue
                low = _primary_candidates(N, c1, j, data_dir)
                high = _primary_candidates(N, c2, k - j, data_dir)
                for a, b in itertools.product(low, high):
                    yield ("prod", a, b)
    # products of three pieces for spaces whose low-weight parts are thin
    for j1 in range(1, k):
        for j2 in range(j1, k - j1):
            j3 = k - j1 - j2
            if j3 < j2:
                continue
            for c1, c2, c3 in itertools.product(chars, repeat=3):
                p12 = [c for c in chars if _product_is(c1, c2, c, N)]
                if not p12 or not _product_is(p12[0], c3, chi, N):
                    continue
                A = _primary_candidates(N, c1, j1, data_dir)
                B = _primary_candidates(N, c2, j2, data_dir)
                C = _primary_candidates(N, c3, j3, data_dir)
                for a, b, c in itertools.product(A, B, C):
                    yield ("prod", ("prod", a, b), c)


@lru_cache(maxsize=256)
def _build_basis_cached(spec, prec, data_dir):
    spec.check_supported()
    expected = dim_M(spec)
    if expected == 0:
        return BasisSet(spec, (), (), 0, prec)
    ech = Echelon(prec)
    used = []
    for recipe in _candidates(spec, data_dir):
        s = recipe_series(recipe, prec)
        if s.lead < 0:
            continue
        ech.add(s.coefficient_list(0, prec))
        used.append(recipe)
        if ech.rank == expected:
            break
    if ech.rank != expected:
        raise RankDeficient(spec, ech.rank, expected)
    forms, recipes = [], []
    for _, row, coords in ech.rows:
        forms.append(QSeries(row, 0, prec))
        recipes.append(tuple((c, used[i]) for i, c in sorted(coords.items())))
    return BasisSet(spec, tuple(forms), tuple(recipes), len(forms), prec)


def build_basis(spec, prec=None, data_dir=None):
    """Echelonized q-expansion basis of M_k(Gamma0(N), chi) to precision prec."""
    spec.check_supported()
    minimum = sturm_bound(spec.level, spec.weight) + MARGIN
    prec = minimum if prec is None else prec
    if prec < minimum:
        raise ValueError(f"precision {prec} is below the Sturm bound plus margin ({minimum})")
    return _build_basis_cached(spec, prec, None if data_dir is None else str(data_dir))

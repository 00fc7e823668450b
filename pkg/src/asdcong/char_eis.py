"""Dirichlet characters, generalized Bernoulli numbers and Eisenstein series.

For primitive characters chi (conductor L) and psi (conductor R) the series

    E_{k,chi,psi}(z) = c_0 + sum_{n>=1} (sum_{m|n} psi(m) chi(n/m) m^(k-1)) q^n,
    c_0 = -B_{k,psi}/(2k) if L = 1 else 0,

lies in M_k(Gamma0(RL), chi*psi), and the dilates E(dz) with RLd | N span the
Eisenstein subspace of M_k(Gamma0(N), eps) for k >= 3.

The real characters of conductor 1, 3, 4, 5, 7, 13 cover every Eisenstein
space used here except level 25, where the pair of quartic characters mod 5
contributes two more dimensions.  Those enter through the real and imaginary
parts of E_{k,chi4,conj(chi4)}, which have rational q-expansions.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .qconstructors import divisors
from .series_core import QSeries, is_prime

__all__ = [
    "DirichletChar",
    "ParityError",
    "NonRealCharacter",
    "char_value",
    "primitive_characters",
    "characters_mod",
    "bernoulli_number",
    "bernoulli_poly",
    "gen_bernoulli",
    "eisenstein_series",
    "EisensteinElement",
    "EisensteinCombo",
    "eisenstein_basis",
    "PrimePredicate",
    "combo_congruence_primes",
    "classical_eisenstein",
    "classical_scale",
    "e2_difference",
]


class ParityError(ValueError):
    pass


class NonRealCharacter(ValueError):
    pass


# characters -------------------------------------------------------------------

# kind -> conductor of the primitive character
_CONDUCTOR = {
    "principal": 1,
    "jacobi_top/3": 3,
    "jacobi_top/5": 5,
    "jacobi_top/7": 7,
    "jacobi_top/13": 13,
    "kronecker_-4": 4,
    "quartic_5": 5,
    "quartic_5_conj": 5,
}

# quartic character mod 5 with chi(2) = i; values as Gaussian integers (re, im)
_QUARTIC5 = {1: (1, 0), 2: (0, 1), 4: (-1, 0), 3: (0, -1)}

_ALIASES = {
    "trivial": "principal",
    "chi0": "principal",
    "1": "principal",
    "(./3)": "jacobi_top/3",
    "(./5)": "jacobi_top/5",
    "(./7)": "jacobi_top/7",
    "(./13)": "jacobi_top/13",
    "(-4/.)": "kronecker_-4",
    "-4": "kronecker_-4",
}


def _legendre(a, q):
    """Legendre symbol (a/q) for an odd prime q, via Euler's criterion."""
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


@dataclass(frozen=True, order=True)
class DirichletChar:
    """A character mod ``modulus`` induced from a primitive character ``kind``."""

    modulus: int
    kind: str = "principal"

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in _CONDUCTOR:
            raise ValueError(f"unknown character kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.modulus < 1 or self.modulus % _CONDUCTOR[kind]:
            raise ValueError(
                f"character {kind} needs a modulus divisible by {_CONDUCTOR[kind]}, got {self.modulus}"
            )

    @property
    def conductor(self):
        return _CONDUCTOR[self.kind]

    @property
    def is_principal(self):
        return self.kind == "principal"

    @property
    def is_real(self):
        return not self.kind.startswith("quartic")

    @property
    def is_primitive(self):
        return self.modulus == self.conductor

    def primitive(self):
        return DirichletChar(self.conductor, self.kind)

    def lift(self, N):
        return DirichletChar(N, self.kind)

    def conj(self):
        if self.kind == "quartic_5":
            return DirichletChar(self.modulus, "quartic_5_conj")
        if self.kind == "quartic_5_conj":
            return DirichletChar(self.modulus, "quartic_5")
        return self

    def _primitive_gauss(self, n):
        kind = self.kind
        if kind == "principal":
            return (1, 0)
        if kind == "kronecker_-4":
            if n % 2 == 0:
                return (0, 0)
            return (1, 0) if n % 4 == 1 else (-1, 0)
        if kind.startswith("jacobi_top/"):
            return (_legendre(n, int(kind.split("/")[1])), 0)
        r = n % 5
        if r == 0:
            return (0, 0)
        re, im = _QUARTIC5[r]
        return (re, -im) if kind == "quartic_5_conj" else (re, im)

    def gaussian_value(self, n):
        """Value as a Gaussian integer (re, im)."""
        if math.gcd(n, self.modulus) != 1:
            return (0, 0)
        return self._primitive_gauss(n)

    def value(self, n):
        if not self.is_real:
            raise NonRealCharacter(f"{self.kind} takes non-real values")
        return self.gaussian_value(n)[0]

    __call__ = value

    @property
    def parity(self):
        """chi(-1) as +1 or -1."""
        return self.gaussian_value(self.modulus - 1)[0] if self.modulus > 2 else 1

    def equals_on(self, other, N):
        """Same character after lifting both to modulus N."""
        return all(
            self.lift(N).gaussian_value(n) == other.lift(N).gaussian_value(n) for n in range(N)
        )

    def to_record(self):
        return {"modulus": self.modulus, "kind": self.kind}

    @classmethod
    def from_record(cls, rec):
        return cls(int(rec["modulus"]), rec["kind"])

    def symbol(self):
        """Short human name used in reports."""
        k = self.kind
        if k == "principal":
            return "chi0"
        if k == "kronecker_-4":
            return "(-4/.)"
        if k.startswith("jacobi_top/"):
            return f"(./{k.split('/')[1]})"
        return "chi4" if k == "quartic_5" else "conj(chi4)"

    def condition_text(self):
        """Rendering of the condition chi(p) = 1."""
        k = self.kind
        if k == "principal":
            return f"p does not divide {self.modulus}" if self.modulus > 1 else ""
        if k == "kronecker_-4":
            return "(-4/p) = 1"
        if k.startswith("jacobi_top/"):
            return f"(p/{k.split('/')[1]}) = 1"
        return "p = 1 mod 5"

    def __str__(self):
        return f"{self.symbol()} mod {self.modulus}"


def char_value(chi, n):
    return chi.value(n)


def primitive_characters():
    """The primitive characters this library knows, in a fixed order."""
    return [DirichletChar(c, k) for k, c in _CONDUCTOR.items()]


def characters_mod(N, real_only=True):
    out = [DirichletChar(N, ch.kind) for ch in primitive_characters() if N % ch.conductor == 0]
    return [c for c in out if c.is_real or not real_only]


def _mul_gauss(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _product_is(chi, psi, eps, N):
    for n in range(N):
        v = _mul_gauss(chi.lift(N).gaussian_value(n), psi.lift(N).gaussian_value(n))
        if v != eps.lift(N).gaussian_value(n):
            return False
    return True


# Bernoulli numbers ------------------------------------------------------------------

_bern_lock = threading.Lock()
_bern_cache = [Fraction(1)]
_genb_cache = {}


def bernoulli_number(k):
    """B_k with B_1 = -1/2, from sum_{j<=k} C(k+1, j) B_j = 0."""
    if k < len(_bern_cache):
        return _bern_cache[k]
    with _bern_lock:
        while len(_bern_cache) <= k:
            m = len(_bern_cache)
            s = sum(comb(m + 1, j) * _bern_cache[j] for j in range(m))
            _bern_cache.append(-s / (m + 1))
    return _bern_cache[k]


def bernoulli_poly(k, x):
    """B_k(x) = sum_j C(k, j) B_j x^(k-j)."""
    x = Fraction(x)
    return sum(comb(k, j) * bernoulli_number(j) * x ** (k - j) for j in range(k + 1))


def gen_bernoulli(k, psi):
    """B_{k,psi} = f^(k-1) sum_{a=1}^{f} psi(a) B_k(a/f), f the conductor."""
    prim = psi.primitive()
    if not prim.is_real:
        raise NonRealCharacter("generalized Bernoulli numbers are only needed for real characters")
    key = (k, prim.kind)
    val = _genb_cache.get(key)
    if val is None:
        f = prim.conductor
        val = Fraction(f) ** (k - 1) * sum(
            prim.value(a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1)
        )
        with _bern_lock:
            _genb_cache[key] = val
    return val


# Eisenstein series ----------------------------------------------------------------------


def _check_parity(k, chi, psi):
    if chi.parity * psi.parity != (-1) ** k:
        raise ParityError(
            f"chi(-1) psi(-1) = {chi.parity * psi.parity} does not match (-1)^{k}"
        )


def _divisor_coeffs(k, chi, psi, top, part=None):
    """sum_{m|n} psi(m) chi(n/m) m^(k-1) for n = 1..top (index n)."""
    out = [0] * (top + 1)
    km = k - 1
    if part is None:
        cv = [chi.value(n) if n else 0 for n in range(top + 1)]
        pv = [psi.value(n) if n else 0 for n in range(top + 1)]
        for m in range(1, top + 1):
            pm = pv[m]
            if not pm:
                continue
            w = pm * m ** km
            for j in range(1, top // m + 1):
                c = cv[j]
                if c:
                    out[m * j] += w * c
        return out
    cg = [chi.gaussian_value(n) for n in range(top + 1)]
    pg = [psi.gaussian_value(n) for n in range(top + 1)]
    idx = 0 if part == "re" else 1
    for m in range(1, top + 1):
        pm = pg[m]
        if pm == (0, 0):
            continue
        mk = m ** km
        for j in range(1, top // m + 1):
            c = cg[j]
            if c != (0, 0):
                out[m * j] += _mul_gauss(pm, c)[idx] * mk
    return out


def eisenstein_series(k, chi, psi, d=1, prec=20, part=None):
    """E_{k,chi,psi}(dz) + O(q^prec).

    ``part`` is "re" or "im" for the rational real/imaginary part of a
    series built from non-real characters.
    """
    chi, psi = chi.primitive(), psi.primitive()
    if k < 1 or (k < 3 and chi.is_principal and psi.is_principal):
        raise ValueError(
            "weight 1 and 2 Eisenstein series need a nontrivial character; use e2_difference"
        )
    _check_parity(k, chi, psi)
    if part is None and not (chi.is_real and psi.is_real):
        raise NonRealCharacter("non-real characters need part='re' or part='im'")
    top = (prec - 1) // d
    coeffs = _divisor_coeffs(k, chi, psi, top, part)
    series = [Fraction(0)] * prec
    if chi.conductor == 1 and part is None and prec > 0:
        series[0] = -gen_bernoulli(k, psi) / (2 * k)
    for n in range(1, top + 1):
        series[d * n] = Fraction(coeffs[n])
    return QSeries(series, 0, prec)


@dataclass(frozen=True)
class EisensteinElement:
    """coefficient * E_{k,chi,psi}(d z) (or its real/imaginary part)."""

    weight: int
    chi: DirichletChar
    psi: DirichletChar
    dilation: int = 1
    coefficient: Fraction = Fraction(1)
    part: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "chi", self.chi.primitive())
        object.__setattr__(self, "psi", self.psi.primitive())
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        _check_parity(self.weight, self.chi, self.psi)

    @property
    def L(self):
        return self.chi.conductor

    @property
    def R(self):
        return self.psi.conductor

    @property
    def level(self):
        return self.L * self.R * self.dilation

    @property
    def beta(self):
        return self.coefficient.denominator

    def sort_key(self):
        return (self.L, self.R, self.dilation, self.chi.kind, self.psi.kind, self.part or "")

    def with_coefficient(self, c):
        return EisensteinElement(self.weight, self.chi, self.psi, self.dilation, Fraction(c), self.part)

    def series(self, prec):
        base = eisenstein_series(self.weight, self.chi, self.psi, self.dilation, prec, self.part)
        return base if self.coefficient == 1 else base.scale(self.coefficient)

    def conditions(self):
        """Characters that must take the value 1 at p for the congruence."""
        return [self.chi]

    def label(self, with_coeff=True):
        name = f"E_{{{self.weight},{self.chi.symbol()},{self.psi.symbol()}}}"
        if self.part:
            name = f"{self.part}({name})"
        if self.dilation != 1:
            name += f"({self.dilation}z)"
        if not with_coeff:
            return name
        return f"({self.coefficient})*{name}"

    def to_record(self):
        rec = {
            "weight": self.weight,
            "chi": self.chi.kind,
            "psi": self.psi.kind,
            "d": self.dilation,
            "coefficient": f"{self.coefficient.numerator}/{self.coefficient.denominator}",
        }
        if self.part:
            rec["part"] = self.part
        return rec

    @classmethod
    def from_record(cls, rec):
        chi = DirichletChar(_CONDUCTOR[_ALIASES.get(rec["chi"], rec["chi"])], rec["chi"])
        psi = DirichletChar(_CONDUCTOR[_ALIASES.get(rec["psi"], rec["psi"])], rec["psi"])
        return cls(
            rec["weight"], chi, psi, rec.get("d", 1), Fraction(rec.get("coefficient", 1)), rec.get("part")
        )


def eisenstein_basis(k, N, eps):
    """Basis elements E_{k,chi,psi}(dz), RLd | N, chi*psi = eps, sorted by (L, R, d)."""
    if k < 3:
        raise ValueError("the Eisenstein basis is enumerated for weight >= 3")
    prims = primitive_characters()
    out = []
    for chi in prims:
        for psi in prims:
            LR = chi.conductor * psi.conductor
            if N % LR:
                continue
            if chi.parity * psi.parity != (-1) ** k:
                continue
            if not _product_is(chi, psi, eps, N):
                continue
            parts = [None]
            if not (chi.is_real and psi.is_real):
                if chi.kind != "quartic_5":
                    continue  # the conjugate pair is covered by re/im of one member
                parts = ["re", "im"]
            for d in divisors(N // LR):
                for part in parts:
                    out.append(EisensteinElement(k, chi, psi, d, Fraction(1), part))
    out.sort(key=EisensteinElement.sort_key)
    return out


def e2_difference(d, prec):
    """E_2(z) - d E_2(dz) with E_2 = 1 - 24 sum sigma_1(n) q^n; lies in M_2(Gamma0(d))."""
    from .qconstructors import sigma_series

    e2 = sigma_series(1, 1, prec).scale(-24) + 1
    e2d = sigma_series(1, d, prec).scale(-24) + 1
    return e2 - e2d.scale(d)


# classical normalization -------------------------------------------------------------


def classical_scale(k):
    """Factor s with E_k(classical, constant term 1) = s * E_{k,chi0,chi0}."""
    return Fraction(-2 * k) / bernoulli_number(k)


def classical_eisenstein(k, d=1, prec=20):
    one = DirichletChar(1)
    return eisenstein_series(k, one, one, d, prec).scale(classical_scale(k))


# combinations -------------------------------------------------------------------------------


@dataclass(frozen=True)
class EisensteinCombo:
    elements: tuple
    level: int
    character: DirichletChar

    def __init__(self, elements, level, character):
        elems = tuple(e for e in elements if e.coefficient != 0)
        ws = {e.weight for e in elems}
        if len(ws) > 1:
            raise ValueError("all elements of a combination must share the weight")
        for e in elems:
            if level % e.level:
                raise ValueError(f"{e.label()} does not live on Gamma0({level})")
            if not _product_is(e.chi, e.psi if e.part is None else e.psi, character, level):
                raise ValueError(f"{e.label()} has the wrong character for {character}")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "character", character)

    @property
    def weight(self):
        return self.elements[0].weight if self.elements else None

    def series(self, prec):
        out = QSeries.zero(prec)
        for e in self.elements:
            out = out + e.series(prec)
        return out

    def classical_terms(self):
        """(coefficient, d) pairs on classical E_k(dz) when every element has
        trivial characters; None otherwise."""
        if any(not (e.chi.is_principal and e.psi.is_principal) for e in self.elements):
            return None
        k = self.weight
        s = classical_scale(k)
        return [(e.coefficient / s, e.dilation) for e in self.elements]

    def render(self):
        if not self.elements:
            return "0"
        return " + ".join(e.label() for e in self.elements)

    def render_classical(self):
        terms = self.classical_terms()
        if terms is None:
            return self.render()
        k = self.weight
        return " + ".join(
            f"({c})*E_{k}" + (f"({d}z)" if d != 1 else "(z)") for c, d in terms
        )

    def to_record(self):
        return {
            "level": self.level,
            "character": self.character.to_record(),
            "elements": [e.to_record() for e in self.elements],
        }


# prime predicates ---------------------------------------------------------------------------


def _prime_divisors(n):
    from .qconstructors import prime_factors

    return prime_factors(n) if n > 1 else []


@dataclass(frozen=True)
class PrimePredicate:
    """p qualifies iff p is not in ``excluded`` and every character is 1 at p."""

    excluded: tuple = ()
    characters: tuple = ()

    def __call__(self, p):
        if not is_prime(p):
            return False
        if p in self.excluded:
            return False
        return all(ch.gaussian_value(p) == (1, 0) for ch in self.characters)

    def primes(self, bound):
        return [p for p in range(2, bound + 1) if self(p)]

    def same_on(self, other, bound=200):
        return self.primes(bound) == other.primes(bound)

    def render(self):
        parts = []
        seen = set()
        for ch in self.characters:
            if ch.is_principal:
                continue
            t = ch.primitive().condition_text()
            if t not in seen:
                seen.add(t)
                parts.append(t)
        # primes already excluded by a character condition need no mention
        extra = [p for p in self.excluded if all(ch.gaussian_value(p) == (1, 0) for ch in self.characters)]
        if extra:
            parts.insert(0, "p != " + ", ".join(str(p) for p in extra))
        return " and ".join(parts) if parts else "all primes"

    def to_record(self):
        return {
            "excluded": list(self.excluded),
            "characters": [c.to_record() for c in self.characters],
            "text": self.render(),
        }


def make_predicate(excluded_product, characters):
    chars = tuple(
        sorted({c.primitive() for c in characters if not c.is_principal}, key=lambda c: c.kind)
    )
    return PrimePredicate(tuple(_prime_divisors(int(excluded_product))), chars)


def combo_congruence_primes(combo, D=1):
    """Primes p with p not dividing D * prod(beta_i d_i) and chi_i(p) = 1 for all i."""
    prod = int(D)
    for e in combo.elements:
        prod *= e.beta * e.dilation
    return make_predicate(prod, [e.chi for e in combo.elements])

"""Concrete q-series: eta quotients, the squared theta series, divisor sums.

An eta quotient prod_d eta(dz)^{r_d} is kept as an exponent map; its
q-expansion strips the q^{1/24} factors and reattaches the integral total
q^{(1/24) sum d r_d}.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .series_core import QSeries

__all__ = [
    "EtaQuotient",
    "CuspOrderTable",
    "FractionalWeightError",
    "FractionalOrderError",
    "EtaSyntaxError",
    "eta_series",
    "eta_power_series",
    "eta_quotient_series",
    "cusp_orders",
    "is_holomorphic",
    "jacobi_theta_sq",
    "sigma_series",
    "divisors",
    "prime_factors",
    "gamma0_index",
    "euler_phi",
]


class FractionalWeightError(ValueError):
    pass


class FractionalOrderError(ValueError):
    pass


class EtaSyntaxError(ValueError):
    pass


# small arithmetic helpers -------------------------------------------------


def divisors(n):
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def prime_factors(n):
    """Distinct primes dividing n, ascending."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n):
    r = n
    for p in prime_factors(n):
        r -= r // p
    return r


def gamma0_index(N):
    """[SL2(Z) : Gamma0(N)] = N prod_{p|N} (1 + 1/p)."""
    r = Fraction(N)
    for p in prime_factors(N):
        r *= Fraction(p + 1, p)
    return int(r)


# eta quotients -------------------------------------------------------------------


@dataclass(frozen=True)
class EtaQuotient:
    """prod_{d | N} eta(d z)^{r_d} on Gamma0(N)."""

    level: int
    exponents: tuple  # sorted ((d, r_d), ...) with r_d != 0

    def __init__(self, level, exponents):
        items = exponents.items() if isinstance(exponents, dict) else exponents
        clean = {}
        for d, r in items:
            d, r = int(d), int(r)
            if d < 1:
                raise ValueError(f"eta dilation must be positive, got {d}")
            if r:
                clean[d] = clean.get(d, 0) + r
        clean = {d: r for d, r in clean.items() if r}
        level = int(level)
        for d in clean:
            if level % d:
                raise ValueError(f"eta({d}) does not divide the level {level}")
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "exponents", tuple(sorted(clean.items())))

    @classmethod
    def parse(cls, text, level=None):
        """Parse expressions such as ``eta(2)^6*eta(6)^6/(eta(1)^6*eta(3)^6)``.

        ``eta(5z)`` and ``eta(z)`` are accepted as well.  Without an explicit
        level the lcm of the dilations is used.
        """
        exps = _parse_eta(text)
        if level is None:
            level = 1
            for d in exps:
                level = level * d // math.gcd(level, d)
        return cls(level, exps)

    @property
    def as_dict(self):
        return dict(self.exponents)

    @property
    def weight2(self):
        """Twice the weight (sum of exponents)."""
        return sum(r for _, r in self.exponents)

    @property
    def weight(self):
        return Fraction(self.weight2, 2)

    @property
    def order_at_infinity(self):
        return Fraction(sum(d * r for d, r in self.exponents), 24)

    def __mul__(self, other):
        level = self.level * other.level // math.gcd(self.level, other.level)
        e = self.as_dict
        for d, r in other.exponents:
            e[d] = e.get(d, 0) + r
        return EtaQuotient(level, e)

    def __pow__(self, n):
        return EtaQuotient(self.level, {d: n * r for d, r in self.exponents})

    def __truediv__(self, other):
        return self * other ** -1

    def at_level(self, N):
        if N % self.level:
            raise ValueError(f"level {N} is not a multiple of {self.level}")
        return EtaQuotient(N, self.exponents)

    def series(self, prec):
        return eta_quotient_series(self, prec)

    def to_record(self):
        return {"level": self.level, "exponents": {str(d): r for d, r in self.exponents}}

    @classmethod
    def from_record(cls, rec):
        return cls(rec["level"], {int(d): r for d, r in rec["exponents"].items()})

    def __str__(self):
        num = [f"eta({d})" + (f"^{r}" if r != 1 else "") for d, r in self.exponents if r > 0]
        den = [f"eta({d})" + (f"^{-r}" if r != -1 else "") for d, r in self.exponents if r < 0]
        top = "*".join(num) if num else "1"
        if not den:
            return top
        bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
        return f"{top}/{bottom}"


_TOKEN = re.compile(r"\s*(?:(eta)\s*\(\s*(\d*)\s*z?\s*\)|(\^)\s*(-?\d+)|([*/()])|(1))")


def _parse_eta(text):
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise EtaSyntaxError(f"cannot parse eta expression at: {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("eta", int(m.group(2) or 1)))
        elif m.group(3):
            tokens.append(("pow", int(m.group(4))))
        elif m.group(5):
            tokens.append((m.group(5), None))
        else:
            tokens.append(("one", None))
    exps = {}
    sign_stack = [1]
    pending = 1  # sign for next factor/group due to a preceding '/'
    last = None
    for kind, val in tokens:
        if kind == "eta":
            s = sign_stack[-1] * pending
            exps[val] = exps.get(val, 0) + s
            last = (val, s)
            pending = 1
        elif kind == "pow":
            if last is None:
                raise EtaSyntaxError("exponent without a preceding eta factor")
            d, s = last
            exps[d] += s * (val - 1)
            last = None
        elif kind == "/":
            pending = -1
        elif kind == "*":
            pending = 1
        elif kind == "(":
            sign_stack.append(sign_stack[-1] * pending)
            pending = 1
            last = None
        elif kind == ")":
            if len(sign_stack) == 1:
                raise EtaSyntaxError("unbalanced parentheses")
            sign_stack.pop()
            last = None
        else:
            pending = 1
            last = None
    if len(sign_stack) != 1:
        raise EtaSyntaxError("unbalanced parentheses")
    return {d: r for d, r in exps.items() if r}


# expansions ------------------------------------------------------------------------


def _pentagonal_terms(prec):
    """Nonzero (exponent, sign) pairs of prod (1 - q^n) below prec."""
    out = [(0, 1)]
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 >= prec:
            break
        s = -1 if k % 2 else 1
        out.append((e1, s))
        e2 = k * (3 * k + 1) // 2
        if e2 < prec:
            out.append((e2, s))
        k += 1
    return out


def eta_series(prec):
    """prod_{n>=1} (1 - q^n) + O(q^prec), by the pentagonal number theorem."""
    if prec < 1:
        raise ValueError("precision must be at least 1")
    c = [0] * prec
    for e, s in _pentagonal_terms(prec):
        c[e] = s
    return QSeries(c, 0, prec)


def eta_power_series(r, prec):
    """prod (1 - q^n)^r + O(q^prec) for any integer r.

    With E = prod(1 - q^n) sparse, a = E^r satisfies
    n a_n = sum_{k>=1} ((r+1) k - n) e_k a_{n-k}, which is exact over Z
    since a has integer coefficients.
    """
    if prec < 1:
        raise ValueError("precision must be at least 1")
    if r == 0:
        return QSeries.one(prec)
    terms = [(e, s) for e, s in _pentagonal_terms(prec) if e]
    a = [0] * prec
    a[0] = 1
    r1 = r + 1
    for n in range(1, prec):
        acc = 0
        for k, s in terms:
            if k > n:
                break
            w = r1 * k - n
            if w:
                acc += w * a[n - k] if s > 0 else -w * a[n - k]
        a[n] = acc // n
    return QSeries(a, 0, prec)


def _check_integral(e):
    if e.weight2 % 2:
        raise FractionalWeightError(f"{e} has half-integral weight {e.weight}")
    o = e.order_at_infinity
    if o.denominator != 1:
        raise FractionalOrderError(f"{e} has non-integral order {o} at infinity")
    return int(o)


def eta_quotient_series(e, prec):
    """q-expansion of an eta quotient, exact for exponents below prec."""
    lead = _check_integral(e)
    rel = prec - lead
    if rel <= 0:
        return QSeries.zero(prec)
    out = QSeries.one(rel)
    for d, r in e.exponents:
        m = -(-rel // d)
        out = out * eta_power_series(r, m).dilate(d).truncate(rel)
    return out.shift(lead)


# cusps -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CuspOrderTable:
    """Orders of an eta quotient at the cusps of Gamma0(N).

    ``entries`` maps the cusp denominator c (c | N) to the order in the
    local uniformizer; ``multiplicity[c]`` = phi(gcd(c, N/c)) cusps share it.
    """

    level: int
    entries: dict = field(default_factory=dict)
    multiplicity: dict = field(default_factory=dict)

    def cusps(self):
        """Representatives a/c as (a, c) pairs, one per Gamma0(N)-class."""
        out = []
        N = self.level
        for c in sorted(self.entries):
            g = math.gcd(c, N // c)
            for u in range(g):
                if math.gcd(u, g) != 1 and g > 1:
                    continue
                a = u if u else g
                while math.gcd(a, c) != 1:
                    a += g
                out.append((a, c))
        return out

    def order(self, c):
        return self.entries[c]

    def weighted_total(self):
        return sum(self.multiplicity[c] * o for c, o in self.entries.items())

    def __iter__(self):
        return iter(sorted(self.entries.items()))


def cusp_orders(e):
    """Ligozat's formula: order at a/c is
    (N/24) sum_d gcd(c,d)^2 r_d / (gcd(c, N/c) c d)."""
    N = e.level
    entries, mult = {}, {}
    for c in divisors(N):
        g = math.gcd(c, N // c)
        s = sum(Fraction(math.gcd(c, d) ** 2 * r, d) for d, r in e.exponents)
        entries[c] = Fraction(N, 24) * s / (g * c)
        mult[c] = euler_phi(g)
    return CuspOrderTable(N, entries, mult)


def is_holomorphic(e):
    return all(o >= 0 for o in cusp_orders(e).entries.values())


# other series ------------------------------------------------------------------


def jacobi_theta_sq(prec):
    """(sum_{n in Z} q^{n^2})^2; the q^n coefficient counts n = a^2 + b^2."""
    if prec < 1:
        raise ValueError("precision must be at least 1")
    th = [0] * prec
    n = 0
    while n * n < prec:
        th[n * n] += 1 if n == 0 else 2
        n += 1
    s = QSeries(th, 0, prec)
    return s * s


def sigma_series(k, d, prec):
    """sum_{n>=1} sigma_k(n) q^{dn} + O(q^prec)."""
    if prec < 1:
        raise ValueError("precision must be at least 1")
    top = (prec - 1) // d
    sig = [0] * (top + 1)
    for m in range(1, top + 1):
        mk = m ** k
        for n in range(m, top + 1, m):
            sig[n] += mk
    c = [0] * prec
    for n in range(1, top + 1):
        c[d * n] = sig[n]
    return QSeries(c, 0, prec)

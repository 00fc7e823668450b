"""Exact truncated Laurent series over Q.

A :class:`QSeries` stores integer numerators over one positive common
denominator, which keeps every product a single big-integer multiplication
(see :mod:`asdcong._kernel`).  Coefficients are exposed as reduced
:class:`fractions.Fraction` values.

Precision is always explicit: a series knows all coefficients of q^n for
n < prec and nothing beyond.  Every operation returns the largest precision
justified by its inputs and never more.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import gmpy2

from . import _kernel

Rational = Fraction

__all__ = [
    "QSeries",
    "Rational",
    "SeriesError",
    "DivisionByZeroSeries",
    "CompositionOrderError",
    "ReversionOrderError",
    "PrecisionExhausted",
    "NotPrime",
    "INFINITY",
    "add",
    "mul",
    "div",
    "theta",
    "compose",
    "revert",
    "power",
    "padic_val",
    "is_prime",
    "lcm",
]


class SeriesError(ArithmeticError):
    pass


class DivisionByZeroSeries(SeriesError, ZeroDivisionError):
    pass


class CompositionOrderError(SeriesError):
    pass


class ReversionOrderError(SeriesError):
    pass


class PrecisionExhausted(SeriesError):
    pass


class NotPrime(ValueError):
    pass


class _Infinity:
    """Valuation of zero.  Compares greater than every integer."""

    __slots__ = ()

    def __repr__(self):
        return "INFINITY"

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("asdcong.INFINITY")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _Infinity)

    def __gt__(self, other):
        return not isinstance(other, _Infinity)

    def __ge__(self, other):
        return True


INFINITY = _Infinity()


def lcm(*values):
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


class QSeries:
    """Truncated Laurent series  sum_{lead <= n < prec} c_n q^n + O(q^prec).

    The zero-to-precision state has ``lead == prec`` and no stored
    coefficients.
    """

    __slots__ = ("_lead", "_prec", "_num", "_den", "_fracs")

    def __init__(self, coeffs=(), lead=0, prec=None):
        fr = [_as_fraction(c) for c in coeffs]
        if prec is None:
            prec = lead + len(fr)
        if prec < lead + len(fr):
            fr = fr[: prec - lead]
        fr.extend([Fraction(0)] * (prec - lead - len(fr)))
        den = lcm(*(c.denominator for c in fr)) if fr else 1
        num = [c.numerator * (den // c.denominator) for c in fr]
        self._set(num, den, lead, prec)

    # construction helpers -------------------------------------------------

    def _set(self, num, den, lead, prec):
        i = 0
        n = len(num)
        while i < n and num[i] == 0:
            i += 1
        if i == n:
            self._lead = prec
            self._prec = prec
            self._num = ()
            self._den = 1
        else:
            num = num[i:]
            g = math.gcd(den, *num)
            if g != 1:
                num = [c // g for c in num]
                den //= g
            if den < 0:
                num = [-c for c in num]
                den = -den
            self._lead = lead + i
            self._prec = prec
            self._num = tuple(num)
            self._den = den
        self._fracs = None

    @classmethod
    def _raw(cls, num, den, lead, prec):
        obj = cls.__new__(cls)
        num = list(num[: max(0, prec - lead)])
        num.extend([0] * (prec - lead - len(num)))
        obj._set(num, den, lead, prec)
        return obj

    @classmethod
    def zero(cls, prec):
        return cls((), lead=prec, prec=prec)

    @classmethod
    def one(cls, prec):
        return cls.monomial(0, prec)

    @classmethod
    def monomial(cls, exponent, prec, coeff=1):
        if exponent >= prec:
            return cls.zero(prec)
        return cls([coeff], lead=exponent, prec=prec)

    @classmethod
    def from_dict(cls, terms, prec):
        """Series from a sparse {exponent: coefficient} map."""
        terms = {e: c for e, c in terms.items() if e < prec and c}
        if not terms:
            return cls.zero(prec)
        lo = min(terms)
        coeffs = [terms.get(e, 0) for e in range(lo, prec)]
        return cls(coeffs, lead=lo, prec=prec)

    # accessors -------------------------------------------------------------

    @property
    def lead(self):
        return self._lead

    @property
    def prec(self):
        return self._prec

    @property
    def valuation(self):
        return INFINITY if self.is_zero else self._lead

    @property
    def is_zero(self):
        return not self._num

    @property
    def denominator(self):
        """Least common denominator of the stored coefficients."""
        return self._den

    @property
    def numerators(self):
        return self._num

    @property
    def coeffs(self):
        if self._fracs is None:
            d = self._den
            self._fracs = tuple(Fraction(c, d) for c in self._num)
        return self._fracs

    def __getitem__(self, n):
        if isinstance(n, slice):
            start = self._lead if n.start is None else n.start
            stop = self._prec if n.stop is None else n.stop
            return [self[i] for i in range(start, stop, n.step or 1)]
        if n >= self._prec:
            raise PrecisionExhausted(f"coefficient of q^{n} unknown (prec {self._prec})")
        if n < self._lead:
            return Fraction(0)
        return Fraction(self._num[n - self._lead], self._den)

    def coefficient_list(self, start=0, stop=None):
        """Coefficients of q^start .. q^(stop-1) as Fractions."""
        stop = self._prec if stop is None else stop
        return [self[i] for i in range(start, stop)]

    def is_integral(self):
        return self._den == 1

    def __len__(self):
        return len(self._num)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs[:8]):
            if c:
                e = self._lead + i
                terms.append(f"({c})*q^{e}" if e else f"({c})")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self._prec}))"

    def __eq__(self, other):
        if isinstance(other, QSeries):
            return (
                self._lead == other._lead
                and self._prec == other._prec
                and self._den == other._den
                and self._num == other._num
            )
        return NotImplemented

    def __hash__(self):
        return hash((self._lead, self._prec, self._den, self._num))

    def agrees_with(self, other, upto=None):
        """True if coefficients agree for every exponent below ``upto``.

        ``upto`` defaults to the smaller precision.
        """
        bound = min(self._prec, other._prec) if upto is None else upto
        if bound > min(self._prec, other._prec):
            raise PrecisionExhausted("comparison beyond known precision")
        return (self - other).truncate(bound).is_zero

    # basic transforms -------------------------------------------------------

    def truncate(self, prec):
        """Forget coefficients of exponent >= prec (never extends precision)."""
        if prec >= self._prec:
            return self
        if self.is_zero or prec <= self._lead:
            return QSeries.zero(prec)
        return QSeries._raw(self._num, self._den, self._lead, prec)

    def shift(self, k):
        """Multiply by q^k."""
        obj = QSeries.__new__(QSeries)
        obj._lead = self._lead + k
        obj._prec = self._prec + k
        obj._num = self._num
        obj._den = self._den
        obj._fracs = self._fracs
        return obj

    def dilate(self, d):
        """Substitute q -> q^d (d >= 1)."""
        if d == 1:
            return self
        if d < 1:
            raise ValueError("dilation must be positive")
        if self.is_zero:
            return QSeries.zero(self._prec * d)
        num = [0] * ((len(self._num) - 1) * d + 1)
        for i, c in enumerate(self._num):
            num[i * d] = c
        return QSeries._raw(num, self._den, self._lead * d, self._prec * d)

    def scale(self, c):
        """Multiply by an exact scalar."""
        c = _as_fraction(c)
        if c == 0 or self.is_zero:
            return QSeries.zero(self._prec)
        return QSeries._raw(
            [x * c.numerator for x in self._num], self._den * c.denominator, self._lead, self._prec
        )

    def scale_variable(self, lam):
        """Substitute q -> lam*q for a nonzero rational lam."""
        lam = _as_fraction(lam)
        if lam == 0:
            raise ValueError("scale factor must be nonzero")
        if self.is_zero:
            return self
        a, b = lam.numerator, lam.denominator
        lead = self._lead
        top = len(self._num) - 1
        # c_e lam^e = lam^lead * c_e a^i b^(top-i) / b^top  with i = e - lead
        nums = [c * a ** i * b ** (top - i) for i, c in enumerate(self._num)]
        out = QSeries._raw(nums, self._den * b ** top, lead, self._prec)
        return out.scale(lam ** lead)

    def theta(self):
        """q d/dq: multiplies the coefficient of q^n by n."""
        if self.is_zero:
            return self
        lead = self._lead
        return QSeries._raw(
            [(lead + i) * c for i, c in enumerate(self._num)], self._den, lead, self._prec
        )

    # ring operations ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries([other], 0, self._prec)
        prec = min(self._prec, other._prec)
        if self.is_zero:
            return other.truncate(prec)
        if other.is_zero:
            return self.truncate(prec)
        lead = min(self._lead, other._lead)
        if lead >= prec:
            return QSeries.zero(prec)
        den = self._den * other._den // math.gcd(self._den, other._den)
        out = [0] * (prec - lead)
        for s in (self, other):
            f = den // s._den
            off = s._lead - lead
            for i, c in enumerate(s._num[: prec - s._lead]):
                out[off + i] += c * f
        return QSeries._raw(out, den, lead, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return QSeries._raw([-c for c in self._num], self._den, self._lead, self._prec)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries([other], 0, self._prec)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        prec = min(self._prec + other._lead, other._prec + self._lead)
        lead = self._lead + other._lead
        if self.is_zero or other.is_zero or lead >= prec:
            return QSeries.zero(prec)
        n = prec - lead
        if self is other:
            prod = _kernel.mul(list(self._num), list(self._num), n)
        else:
            prod = _kernel.mul(list(self._num), list(other._num), n)
        return QSeries._raw(prod, self._den * other._den, lead, prec)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self):
        """Multiplicative inverse; requires a nonzero leading coefficient."""
        if self.is_zero:
            raise DivisionByZeroSeries("inverse of a series that is zero to precision")
        rel = self._prec - self._lead
        num = list(self._num)
        c = num[0]
        if c in (1, -1):
            w = _kernel.inverse(num, rel)
            nums, den = w, 1
        else:
            # num(q) = c * h(q/c) with h integral and h(0) = 1, so
            # 1/num(q) = w(q/c)/c where w = 1/h.
            h = [1] + [x * c ** (i - 1) for i, x in enumerate(num) if i]
            w = _kernel.inverse(h, rel)
            nums = [x * c ** (rel - 1 - i) for i, x in enumerate(w)]
            den = c ** rel
        inv = QSeries._raw(nums, den, -self._lead, rel - self._lead)
        return inv.scale(self._den)

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            other = _as_fraction(other)
            if other == 0:
                raise ZeroDivisionError("division by zero scalar")
            return self.scale(1 / other)
        if other.is_zero:
            raise DivisionByZeroSeries("division by a series that is zero to precision")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, e):
        if not isinstance(e, int):
            raise TypeError("series powers must be integers")
        if e < 0:
            return self.inverse() ** (-e)
        if self.is_zero:
            if e == 0:
                raise DivisionByZeroSeries("zero-to-precision series raised to the 0th power")
            return QSeries.zero(self._prec + (e - 1) * self._lead)
        rel = self._prec - self._lead
        if e == 0:
            return QSeries.one(rel)
        w = _kernel.power(list(self._num), e, rel)
        return QSeries._raw(w, self._den ** e, e * self._lead, e * self._lead + rel)

    # composition ---------------------------------------------------------------

    def compose(self, t):
        """f(t(q)) for a power series f (lead >= 0) and t with t.lead >= 1."""
        return compose(self, t)

    def revert(self):
        return revert(self)

    # serialization -----------------------------------------------------------------

    def to_record(self):
        return {
            "lead": self._lead,
            "prec": self._prec,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs],
        }

    @classmethod
    def from_record(cls, record):
        return cls(
            [Fraction(c) for c in record["coeffs"]], lead=record["lead"], prec=record["prec"]
        )


# module-level operations -------------------------------------------------------


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def div(a, b):
    return a / b


def theta(a):
    return a.theta()


def power(a, e):
    return a ** e


def compose(f, t):
    """Substitute t into the power series f.

    Output precision: the exponent below which every term f_n t^n is known.
    """
    if f.lead < 0:
        raise CompositionOrderError("outer series must be a power series")
    if t.is_zero and t.prec < 1:
        raise CompositionOrderError("inner series must vanish at q = 0")
    if not t.is_zero and t.lead < 1:
        raise CompositionOrderError("inner series must have order >= 1")
    if t.is_zero:
        # t = O(q^p): f(t) = f_0 + O(q^p) when f_0 known
        return QSeries([f[0]] if f.prec > 0 else [], 0, min(t.prec, f.prec * t.prec))
    v = t.lead
    rel_t = t.prec - v
    # f_n t^n known to exponent n*v + rel_t, unknown terms n >= f.prec start at f.prec*v
    prec = min(f.prec * v, v + rel_t) if f.prec > 0 else 0
    if prec <= 0:
        return QSeries.zero(0)
    fcoef = [0] * prec
    for i, c in enumerate(f.numerators):
        e = f.lead + i
        if e < prec:
            fcoef[e] = c
    tcoef = [0] * prec
    for i, c in enumerate(t.numerators):
        if v + i < prec:
            tcoef[v + i] = c
    num, den = _kernel.compose(fcoef, tcoef, prec, f.denominator, t.denominator)
    return QSeries._raw(num, den, 0, prec)


def revert(t):
    """Compositional inverse s of t, with t(s(q)) = s(t(q)) = q to precision.

    Newton iteration s <- s - (t(s) - q) / t'(s), doubling the precision
    each round.
    """
    if t.is_zero or t.lead != 1:
        raise ReversionOrderError("reversion needs t = a_1 q + ... with a_1 != 0")
    n = t.prec
    a1 = t[1]
    s = QSeries([1 / a1], lead=1, prec=2)
    dt = QSeries(
        [(i + 1) * c for i, c in enumerate(t.coeffs)], lead=0, prec=n - 1
    )  # t'(q)
    m = 2
    while m < n:
        m = min(2 * m, n)
        s_ext = QSeries(list(s.coeffs), lead=s.lead, prec=m)
        ts = compose(t.truncate(m), s_ext)
        dts = compose(dt.truncate(m - 1), s_ext)
        err = ts - QSeries.monomial(1, m)
        correction = (err / dts).truncate(m)
        s = (s_ext - correction).truncate(m)
    return s.truncate(n)


# p-adic utilities ------------------------------------------------------------------------


def is_prime(p):
    """Primality (Miller-Rabin with 50 rounds; exact far beyond any level used here)."""
    return isinstance(p, int) and not isinstance(p, bool) and p >= 2 and bool(gmpy2.is_prime(p, 50))


def padic_val(x, p):
    """p-adic valuation of a rational; INFINITY for zero."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    x = _as_fraction(x)
    if x == 0:
        return INFINITY
    vn = gmpy2.remove(gmpy2.mpz(x.numerator), p)[1] if x.numerator % p == 0 else 0
    vd = gmpy2.remove(gmpy2.mpz(x.denominator), p)[1] if x.denominator % p == 0 else 0
    return int(vn) - int(vd)

"""Integer polynomial kernels.

Everything here works on plain ``list[int]`` coefficient vectors (index i is
the coefficient of x^i).  Multiplication goes through Kronecker substitution:
both operands are packed into one big integer with signed fixed-width slots,
multiplied with GMP, and unpacked with a balanced-digit carry pass.
"""

from __future__ import annotations

from gmpy2 import mpz

_SMALL = 24  # below this many terms schoolbook wins


def _bits(v):
    m = 0
    for c in v:
        if c > m:
            m = c
        elif -c > m:
            m = -c
    return m.bit_length()


def _pack(v, k):
    nb = k // 8
    mod = 1 << k
    body = b"".join((c % mod).to_bytes(nb, "little") for c in v)
    value = int.from_bytes(body, "little")
    if any(c < 0 for c in v):
        zero = bytes(nb)
        one = b"\x01" + bytes(nb - 1)
        corr = b"".join(one if c < 0 else zero for c in v)
        value -= int.from_bytes(corr, "little") << k
    return mpz(value)


def _unpack(P, k, n):
    nb = k // 8
    R = int(P % (mpz(1) << (n * k)))
    raw = R.to_bytes(n * nb, "little")
    half = 1 << (k - 1)
    full = 1 << k
    fb = int.from_bytes
    out = [0] * n
    carry = 0
    for i in range(n):
        d = fb(raw[i * nb:(i + 1) * nb], "little") + carry
        if d >= half:
            out[i] = d - full
            carry = 1
        else:
            out[i] = d
            carry = 0
    return out


def _slot(bu, bv, terms):
    k = bu + bv + max(terms, 1).bit_length() + 2
    return (k + 7) // 8 * 8


def mul(u, v, n=None):
    """Product of ``u`` and ``v`` truncated to ``n`` terms (full length if None)."""
    if n is None:
        n = len(u) + len(v) - 1 if u and v else 0
    if n <= 0:
        return []
    u = u[:n]
    v = v[:n]
    if not u or not v:
        return [0] * n
    if min(len(u), len(v)) < _SMALL:
        out = [0] * n
        if len(u) > len(v):
            u, v = v, u
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v[: n - i]):
                    out[i + j] += a * b
        return out
    bu = _bits(u)
    bv = _bits(v)
    if bu == 0 or bv == 0:
        return [0] * n
    k = _slot(bu, bv, min(len(u), len(v)))
    pu = _pack(u, k)
    pv = pu if u is v else _pack(v, k)
    return _unpack(pu * pv, k, n)


def inverse(u, n):
    """Power series inverse of ``u`` modulo x^n; requires u[0] in {1, -1}."""
    c = u[0]
    if c not in (1, -1):
        raise ValueError("integer inverse needs a unit constant term")
    w = [c]
    m = 1
    while m < n:
        m = min(2 * m, n)
        e = mul(u[:m], w, m)
        e = [-x for x in e]
        e[0] += 2
        w = mul(w, e, m)
    return w


def reduce(v, m):
    return [c % m for c in v]


def mul_mod(u, v, n, m):
    return reduce(mul(u, v, n), m)


def inverse_mod(u, n, m):
    """Inverse modulo (x^n, m) of a series with unit constant term mod m."""
    c = pow(u[0], -1, m)
    w = [c]
    k = 1
    while k < n:
        k = min(2 * k, n)
        e = mul_mod(u[:k], w, k, m)
        e = [-x for x in e]
        e[0] += 2
        w = mul_mod(w, e, k, m)
    return w


def power_mod(u, e, n, m):
    result = [1 % m] + [0] * (n - 1)
    base = reduce(u[:n], m) + [0] * max(0, n - len(u))
    while e:
        if e & 1:
            result = mul_mod(result, base, n, m)
        e >>= 1
        if e:
            base = mul_mod(base, base, n, m)
    return result


def power(u, e, n):
    """u**e modulo x^n for a non-negative integer e."""
    result = [1] + [0] * (n - 1)
    base = u[:n] + [0] * max(0, n - len(u))
    while e:
        if e & 1:
            result = mul(result, base, n)
        e >>= 1
        if e:
            base = mul(base, base, n)
    return result


def _flatten(rows, width):
    out = [0] * (len(rows) * width)
    for i, row in enumerate(rows):
        out[i * width:i * width + len(row)] = row
    return out


def bivariate_mul(A, B, dx, dy):
    """Product of bivariate polynomials (lists of x-rows of y-coefficients).

    The result keeps x-degree <= dx and y-degree <= dy.
    """
    ya = max(len(r) for r in A) - 1
    yb = max(len(r) for r in B) - 1
    width = ya + yb + 1
    fa = _flatten(A[: dx + 1], width)
    fb = _flatten(B[: dx + 1], width)
    n = (dx + 1) * width
    prod = mul(fa, fb, n)
    keep = min(dy, width - 1) + 1
    rows = [prod[i * width:i * width + keep] for i in range(dx + 1)]
    return rows


def power_projection(G, T, N, modulus=None):
    """Return r with r[j] = [x^N] G(x) * T(x)**j for j = 0..N.

    ``T`` must have zero constant term.  Works on
    [x^N] G(x) / (1 - y T(x)) by Graeffe halving in x (Bostan-Mori), which
    keeps the total bivariate size near N at every step.  With ``modulus``
    every intermediate is reduced and the result is correct modulo it.
    """
    if T and T[0] != 0:
        raise ValueError("T must vanish at x = 0")
    d = N
    P = [[c] for c in (list(G[: d + 1]) + [0] * max(0, d + 1 - len(G)))]
    Q = [[1, 0]] + [[0, -(T[i] if i < len(T) else 0)] for i in range(1, d + 1)]
    while d > 0:
        dy = min(2 * (len(Q[0]) - 1), N)
        Qm = [[-c for c in row] if i & 1 else row for i, row in enumerate(Q)]
        U = bivariate_mul(P, Qm, d, N)
        V = bivariate_mul(Q, Qm, d, dy)
        if modulus is not None:
            U = [[c % modulus for c in row] for row in U]
            V = [[c % modulus for c in row] for row in V]
        parity = d & 1
        d //= 2
        P = U[parity::2][: d + 1]
        Q = V[0::2][: d + 1]
    out = list(P[0][: N + 1])
    return out + [0] * (N + 1 - len(out))


def compose(F, S, n, F_den=1, S_den=1):
    """Numerator and denominator of F(S/S_den)/F_den modulo x^n.

    ``S`` must vanish at 0.  Brent-Kung baby-step/giant-step: about 2*sqrt(n)
    full multiplications.
    """
    import math

    F = list(F[:n]) + [0] * max(0, n - len(F))
    S = list(S[:n]) + [0] * max(0, n - len(S))
    m = max(1, math.isqrt(n))
    # powers[j] = S**j (numerators), denominator S_den**j
    powers = [[1] + [0] * (n - 1)]
    for _ in range(m):
        powers.append(mul(powers[-1], S, n))
    giant = powers[m]
    scaled = [
        [c * S_den ** (m - 1 - j) for c in powers[j]] if S_den != 1 else powers[j]
        for j in range(m)
    ]
    chunks = []
    for start in range(0, n, m):
        acc = [0] * n
        for j in range(m):
            if start + j < n:
                fj = F[start + j]
                if fj:
                    row = scaled[j]
                    acc = [a + fj * b for a, b in zip(acc, row)]
        chunks.append(acc)
    # chunk value = acc / S_den**(m-1); Horner in giant = S**m / S_den**m
    result = chunks[-1]
    den_power = 0  # extra S_den**m factors accumulated in the denominator
    for acc in reversed(chunks[:-1]):
        result = mul(result, giant, n)
        den_power += 1
        if S_den != 1:
            scale = S_den ** (m * den_power)
            result = [a + c * scale for a, c in zip(result, acc)]
        else:
            result = [a + c for a, c in zip(result, acc)]
    den = F_den * S_den ** (m - 1 + m * den_power)
    return result, den

"""Regenerate src/asdcong/data/generators.json.

Enumerates holomorphic eta quotients on Gamma0(N) for the curated levels by
walking over nonnegative cusp-order vectors (orders are linear in the
exponents), keeping the integral exponent vectors that satisfy the
Gordon-Hughes-Newman conditions

    sum d r_d = 0 mod 24,   sum (N/d) r_d = 0 mod 24,

and recording the character n -> ((-1)^k s / n), s = prod d^{|r_d|}, as one
of the library's character kinds.  Quotients whose character is not among
those kinds are dropped.

Usage: python tools/gen_generators.py [--out PATH]
"""

import argparse
import json
import math
from fractions import Fraction
from pathlib import Path

from asdcong.char_eis import characters_mod
from asdcong.qconstructors import EtaQuotient, cusp_orders, divisors, gamma0_index

LEVELS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25]
MAX_VECTORS = 400_000


def kronecker(a, n):
    """Kronecker symbol (a/n) for n >= 1."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def solve(matrix, rhs):
    """Exact Gaussian elimination for a square nonsingular system."""
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def order_matrix(N):
    ds = divisors(N)
    rows = []
    for c in ds:
        g = math.gcd(c, N // c)
        rows.append([Fraction(N, 24) * Fraction(math.gcd(c, d) ** 2, d) / (g * c) for d in ds])
    return ds, rows


def compositions(total, parts):
    """All tuples of nonnegative integers of given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def identify(N, k, exps):
    s = 1
    for d, r in exps.items():
        if r % 2:
            s *= d
    f = 2
    while f * f <= s:
        while s % (f * f) == 0:
            s //= f * f
        f += 1
    D = (-1) ** k * s
    for chi in characters_mod(N):
        if chi.parity != (-1) ** k:
            continue
        if all(kronecker(D, n) == chi.value(n) for n in range(1, 4 * N * s + 1) if math.gcd(n, N) == 1):
            return chi
    return None


def enumerate_level(N, max_weight):
    ds, rows = order_matrix(N)
    mult = {c: (lambda g: sum(1 for u in range(g) if math.gcd(u, g) == 1) if g > 1 else 1)(math.gcd(c, N // c)) for c in ds}
    mu = gamma0_index(N)
    found = []
    for k in range(1, max_weight + 1):
        total = Fraction(k * mu, 12)
        # orders are counted in halves; multiplicities weight the valence sum
        units = int(2 * total)
        if 2 * total != units:
            continue
        count = math.comb(units + len(ds) - 1, len(ds) - 1)
        if count > MAX_VECTORS:
            break
        for comp in compositions(units, len(ds)):
            # comp[i] counts half-units of mult*order at cusp i
            orders = []
            for c, u in zip(ds, comp):
                o = Fraction(u, 2 * mult[c])
                orders.append(o)
            r = solve(rows, orders)
            if any(x.denominator != 1 for x in r):
                continue
            exps = {d: int(x) for d, x in zip(ds, r) if x}
            if sum(exps.values()) != 2 * k:
                continue
            if sum(d * x for d, x in exps.items()) % 24 or sum((N // d) * x for d, x in exps.items()) % 24:
                continue
            if not exps:
                continue
            chi = identify(N, k, exps)
            if chi is None:
                continue
            e = EtaQuotient(N, exps)
            assert all(v >= 0 for v in cusp_orders(e).entries.values())
            found.append({"expr": str(e), "level": N, "weight": k, "character": chi.kind})
    return found


MAX_WEIGHT = {1: 12, 2: 10, 3: 8, 4: 6, 5: 6, 6: 6, 7: 6, 8: 6, 9: 6, 10: 4, 12: 4, 13: 12, 16: 3, 18: 2, 25: 2}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/asdcong/data/generators.json"))
    args = ap.parse_args()
    data = {"note": "holomorphic eta quotients with Gordon-Hughes-Newman characters; regenerate with tools/gen_generators.py", "levels": {}}
    for N in LEVELS:
        gens = enumerate_level(N, MAX_WEIGHT[N])
        data["levels"][str(N)] = gens
        print(N, len(gens))
    Path(args.out).write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()

"""Regenerate src/asdcong/data/fixtures/dimensions.json from an independent oracle.

The oracle never touches the Cohen-Oesterle formula used by the library.
For a real character chi mod N let H = ker(chi) in (Z/N)^* and
Gamma_H = {[[a,b],[c,d]] in Gamma0(N) : d mod N in H}.  Then

    M_k(Gamma_H) = M_k(Gamma0(N), chi0) + M_k(Gamma0(N), chi),

so dim M_k(Gamma0(N), chi) is a difference of two dimensions of genuine
congruence subgroups.  Those come from the classical genus formulas,
with the genus, elliptic points and (ir)regular cusps read off from the
permutation action of S and T on the cosets Gamma_H \\ SL2(Z), which are
bottom rows (c, d) mod N modulo the scalars in H.

Weight-one cusp forms are taken to be zero (true at these levels).
"""

import json
import math
from fractions import Fraction
from pathlib import Path

LEVELS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25]
MAX_WEIGHT = 24


def legendre(a, q):
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def primitive_value(kind, n):
    if kind == "principal":
        return 1
    if kind == "kronecker_-4":
        return 0 if n % 2 == 0 else (1 if n % 4 == 1 else -1)
    return legendre(n, int(kind.split("/")[1]))


CONDUCTORS = {"principal": 1, "jacobi_top/3": 3, "jacobi_top/5": 5, "jacobi_top/7": 7, "jacobi_top/13": 13, "kronecker_-4": 4}


def units(N):
    return [h for h in range(N) if math.gcd(h, N) == 1] if N > 1 else [0]


def group_data(N, H):
    """Coset data for Gamma_H: (index, e2, e3, regular cusps, irregular cusps, minus_in)."""
    H = sorted(set(h % N for h in H)) if N > 1 else [0]
    minus_in = ((-1) % N in H) if N > 1 else True
    rows = [(c, d) for c in range(N) for d in range(N) if math.gcd(math.gcd(c, d), N) == 1] if N > 1 else [(0, 0)]

    def canon(c, d, signs):
        best = None
        for h in H:
            for s in signs:
                key = ((s * h * c) % N, (s * h * d) % N) if N > 1 else (0, 0)
                if best is None or key < best:
                    best = key
        return best

    proj = sorted({canon(c, d, (1, -1)) for c, d in rows})

    def act(x, g, signs):
        c, d = x
        a11, a12, a21, a22 = g
        return canon(c * a11 + d * a21, c * a12 + d * a22, signs)

    S = (0, -1, 1, 0)
    T = (1, 1, 0, 1)
    U = (0, -1, 1, 1)  # S*T, order 3 in PSL2(Z)
    e2 = sum(1 for x in proj if act(x, S, (1, -1)) == x)
    e3 = sum(1 for x in proj if act(x, U, (1, -1)) == x)
    seen = set()
    reg = irr = 0
    for x in proj:
        if x in seen:
            continue
        orbit = [x]
        y = act(x, T, (1, -1))
        while y != x:
            orbit.append(y)
            y = act(y, T, (1, -1))
        seen.update(orbit)
        h = len(orbit)
        if minus_in:
            reg += 1
            continue
        # lift to a non-projective coset and apply T^h
        z = canon(x[0], x[1], (1,))
        w = z
        for _ in range(h):
            w = act(w, T, (1,))
        if w == z:
            reg += 1
        else:
            irr += 1
    return len(proj), e2, e3, reg, irr, minus_in


def genus(mu, e2, e3, cusps):
    g = 1 + Fraction(mu, 12) - Fraction(e2, 4) - Fraction(e3, 3) - Fraction(cusps, 2)
    assert g.denominator == 1
    return int(g)


def dim_group(k, data):
    mu, e2, e3, reg, irr, minus_in = data
    cusps = reg + irr
    g = genus(mu, e2, e3, cusps)
    if k < 0:
        return 0
    if k == 0:
        return 1
    if k % 2 == 1:
        if minus_in:
            return 0
        if k == 1:
            return reg // 2
        return (k - 1) * (g - 1) + (k // 3) * e3 + Fraction(k, 2) * reg + Fraction(k - 1, 2) * irr
    if k == 2:
        return g + cusps - 1
    return (k - 1) * (g - 1) + (k // 4) * e2 + (k // 3) * e3 + (k // 2) * cusps


def main():
    out = {
        "provenance": "tools/gen_dimension_fixture.py: genus formulas for Gamma_H with coset-permutation "
        "data; dim M_k(N, chi) = dim M_k(Gamma_H) - dim M_k(Gamma0(N)) for real chi. Independent of "
        "the library's Cohen-Oesterle implementation.",
        "rows": [],
    }
    for N in LEVELS:
        g0 = group_data(N, units(N))
        for kind, f in CONDUCTORS.items():
            if N % f:
                continue
            if kind == "principal":
                H = units(N)
                data = g0
            else:
                H = [h for h in units(N) if primitive_value(kind, h) == 1]
                data = group_data(N, H)
            for k in range(0, MAX_WEIGHT + 1):
                if kind == "principal":
                    d = dim_group(k, g0)
                else:
                    d = dim_group(k, data) - dim_group(k, g0)
                d = Fraction(d)
                assert d.denominator == 1 and d >= 0, (N, kind, k, d)
                out["rows"].append({"level": N, "character": kind, "weight": k, "dim_M": int(d)})
    path = Path(__file__).resolve().parents[1] / "src/asdcong/data/fixtures/dimensions.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(out['rows'])} rows to {path}")


if __name__ == "__main__":
    main()

"""Regenerate src/asdcong/data/eigenforms.json.

The weight-26 level-one cusp form E14 * Delta is the normalized Hecke
eigenform of that weight (the cusp space is one-dimensional).  Its
coefficients are computed here with plain integer loops, independently of
the library: E14 = 1 - 24 sum sigma_13(n) q^n and Delta = q prod (1 - q^n)^24.
"""

import json
from pathlib import Path

TERMS = 401


def delta(n_terms):
    # prod (1 - q^n)^24 by repeated multiplication with (1 - q^n)
    p = [0] * n_terms
    p[0] = 1
    for n in range(1, n_terms):
        for _ in range(24):
            for i in range(n_terms - 1, n - 1, -1):
                p[i] -= p[i - n]
    return [0] + p[: n_terms - 1]


def e14(n_terms):
    out = [0] * n_terms
    out[0] = 1
    for d in range(1, n_terms):
        for m in range(d, n_terms, d):
            out[m] -= 24 * d ** 13
    return out


def main():
    a, b = delta(TERMS), e14(TERMS)
    prod = [sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(TERMS)]
    assert prod[0] == 0 and prod[1] == 1
    data = {
        "note": "regenerate with tools/gen_eigenforms.py",
        "eigenforms": [
            {
                "label": "E14*Delta",
                "weight": 26,
                "level": 1,
                "coeffs": [str(c) for c in prod],
            }
        ],
    }
    path = Path(__file__).resolve().parents[1] / "src/asdcong/data/eigenforms.json"
    path.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {TERMS} coefficients to {path}")


if __name__ == "__main__":
    main()

"""Exact linear algebra over Q on lists of Fractions."""

from __future__ import annotations

from fractions import Fraction


def rref(rows, ncols=None):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(matrix, ncols):
    """Basis of {x : matrix x = 0}, in reduced form (free variables set to unit vectors)."""
    red, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


class Echelon:
    """Incrementally maintained echelon basis of a row space.

    Rows are reduced against existing pivots on insertion, so ``add``
    reports whether a vector was new.  ``coords`` tracks each stored row as
    a combination of the inserted inputs.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = []  # (pivot, row, coords)
        self.inputs = 0

    @property
    def rank(self):
        return len(self.rows)

    def add(self, vec):
        v = [Fraction(x) for x in vec]
        coords = {self.inputs: Fraction(1)}
        self.inputs += 1
        for p, row, rc in self.rows:
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
                for k, c in rc.items():
                    coords[k] = coords.get(k, 0) - f * c
        try:
            p = next(i for i, x in enumerate(v) if x)
        except StopIteration:
            return False
        inv = 1 / v[p]
        v = [x * inv for x in v]
        coords = {k: c * inv for k, c in coords.items() if c}
        # keep reduced: clear the new pivot from older rows
        new_rows = []
        for q, row, rc in self.rows:
            f = row[p]
            if f:
                row = [a - f * b for a, b in zip(row, v)]
                rc = dict(rc)
                for k, c in coords.items():
                    rc[k] = rc.get(k, 0) - f * c
                rc = {k: c for k, c in rc.items() if c}
            new_rows.append((q, row, rc))
        new_rows.append((p, v, coords))
        new_rows.sort(key=lambda t: t[0])
        self.rows = new_rows
        return True

"""Exact linear algebra over the integers and rationals.

The pipeline only ever needs three primitives: an incremental integer
row echelon (independence filtering and null spaces), a rational RREF
particular solve with leftmost pivots (free variables get zero), and a
small dense rational solve for normal equations.  Everything is exact;
integer rows are kept primitive (gcd 1) so entries stay small.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


def primitive(row: list) -> list:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for v in row:
        g = gcd(g, v)
        if g == 1:
            return list(row)
    if g <= 1:
        return list(row)
    return [v // g for v in row]


def scale_to_int(vec) -> list:
    """Scale a rational vector to a primitive integer vector (same line)."""
    lcm = 1
    for c in vec:
        d = Fraction(c).denominator
        lcm = lcm * d // gcd(lcm, d)
    out = []
    for c in vec:
        c = Fraction(c)
        out.append(int(c.numerator * (lcm // c.denominator)))
    return primitive(out)


def dot_int(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


class IntEchelon:
    """Incremental fraction-free row reduction over the integers.

    Invariant: every stored row is primitive, has a positive pivot and
    vanishes at the pivot columns of all other stored rows, so a
    candidate can be reduced against the rows in any order.
    """

    def __init__(self, width: int):
        self.width = width
        self.rows: dict[int, list] = {}  # pivot column -> row

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivot_columns(self) -> list:
        return sorted(self.rows)

    def reduce(self, vec) -> list:
        v = list(vec)
        for p, row in self.rows.items():
            if v[p]:
                a, b = row[p], v[p]
                v = [a * x - b * y for x, y in zip(v, row)]
        return primitive(v)

    def add(self, vec) -> bool:
        """Insert if independent of the stored rows; report whether kept."""
        v = self.reduce(vec)
        pivot = -1
        for j, val in enumerate(v):
            if val:
                pivot = j
                break
        if pivot < 0:
            return False
        if v[pivot] < 0:
            v = [-x for x in v]
        # restore the mutual-reduction invariant
        for p, row in list(self.rows.items()):
            if row[pivot]:
                a, b = v[pivot], row[pivot]
                new = primitive([a * x - b * y for x, y in zip(row, v)])
                if new[p] < 0:
                    new = [-x for x in new]
                self.rows[p] = new
        self.rows[pivot] = v
        return True

    def contains(self, vec) -> bool:
        return all(x == 0 for x in self.reduce(vec))

    def nullspace_basis(self) -> list:
        """Primitive integer basis of the kernel of the stored row matrix,
        one vector per free column, ordered by free column."""
        pivots = self.pivot_columns()
        pivot_set = set(pivots)
        out = []
        for free in range(self.width):
            if free in pivot_set:
                continue
            z = [Fraction(0)] * self.width
            z[free] = Fraction(1)
            for p in pivots:
                row = self.rows[p]
                if row[free]:
                    z[p] = Fraction(-row[free], row[p])
            out.append(scale_to_int(z))
        return out


def solve_particular(columns: list, target) -> list | None:
    """Exact solution c of sum_j c_j columns[j] = target, or None.

    RREF with leftmost pivot preference: free variables (later columns,
    when earlier ones suffice) are set to zero.
    """
    k = len(columns)
    dim = len(target)
    rows = [
        [Fraction(columns[j][i]) for j in range(k)] + [Fraction(target[i])]
        for i in range(dim)
    ]
    pivots = []
    r = 0
    for col in range(k):
        pr = next((i for i in range(r, dim) if rows[i][col] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(dim):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append((r, col))
        r += 1
        if r == dim:
            break
    for i in range(r, dim):
        if rows[i][k] != 0:
            return None
    sol = [Fraction(0)] * k
    for ri, ci in pivots:
        sol[ci] = rows[ri][k]
    return sol


def solve_square(matrix: list, rhs: list) -> list:
    """Exact solve of a nonsingular square rational system."""
    k = len(matrix)
    rows = [
        [Fraction(matrix[i][j]) for j in range(k)] + [Fraction(rhs[i])]
        for i in range(k)
    ]
    for col in range(k):
        pr = next((i for i in range(col, k) if rows[i][col] != 0), None)
        if pr is None:
            raise ValueError("singular matrix")
        rows[col], rows[pr] = rows[pr], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for i in range(k):
            if i != col and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return [rows[i][k] for i in range(k)]


def row_space_canonical(rows: list) -> tuple:
    """Canonical RREF of a rational row space, for span comparisons."""
    work = [[Fraction(v) for v in row] for row in rows]
    out = []
    r = 0
    width = len(work[0]) if work else 0
    for col in range(width):
        pr = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        pv = work[r][col]
        work[r] = [v / pv for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    for row in work[:r]:
        out.append(tuple(row))
    return tuple(out)

"""Exact linear algebra over Q(q): dense inversion for the small Gram
systems and a sparse row-echelon solver for homotopy equations and
coinvariant ranks."""
from __future__ import annotations

from .coeff import F_ONE, F_ZERO, FieldElem


class MatrixSingular(RuntimeError):
    pass


class Inconsistent(RuntimeError):
    """The sparse system has no solution; carries a witness row index."""

    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


def invert_matrix(a: list[list[FieldElem]]) -> list[list[FieldElem]]:
    """Gauss-Jordan inverse; raises MatrixSingular when rank deficient."""
    n = len(a)
    m = [row[:] + [F_ONE if i == j else F_ZERO for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            raise MatrixSingular(f"no pivot in column {col}")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inv()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r == col:
                continue
            f = m[r][col]
            if f.is_zero():
                continue
            m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


class SparseRowReducer:
    """Incremental row echelon form over Q(q) for sparse rows.

    Rows are dicts {column_key: FieldElem}.  Supports rank computation,
    membership tests, and solving A x = b via the transpose trick used in
    ``solve_sparse``.
    """

    def __init__(self):
        self.pivots: dict = {}  # pivot column -> reduced row (dict)

    def reduce(self, row: dict) -> dict:
        row = {k: v for k, v in row.items() if not v.is_zero()}
        while row:
            hit = None
            for k in row:
                if k in self.pivots:
                    hit = k
                    break
            if hit is None:
                return row
            piv = self.pivots[hit]
            f = row[hit]
            for k, v in piv.items():
                prev = row.get(k)
                tot = -f * v if prev is None else prev - f * v
                if tot.is_zero():
                    row.pop(k, None)
                else:
                    row[k] = tot
        return row

    def add_row(self, row: dict) -> bool:
        """Insert a row; returns True if it increased the rank."""
        red = self.reduce(row)
        if not red:
            return False
        key = min(red, key=_key_order)
        inv = red[key].inv()
        self.pivots[key] = {k: v * inv for k, v in red.items()}
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)


def _key_order(k):
    return repr(k)


def solve_sparse(rows: list[dict], rhs: list[FieldElem]):
    """Solve A x = b where row i of A is the sparse dict rows[i].

    Unknown keys are the union of the row keys; free unknowns are set to 0.
    Returns {key: FieldElem}.  Raises Inconsistent when no solution exists.
    """
    pivots: dict = {}  # key -> (row dict, rhs)
    order = []
    for row, b in zip(rows, rhs):
        r = {k: v for k, v in row.items() if not v.is_zero()}
        inserted = False
        while r:
            hit = None
            for k in r:
                if k in pivots:
                    hit = k
                    break
            if hit is None:
                key = min(r, key=_key_order)
                inv = r[key].inv()
                pivots[key] = ({k: v * inv for k, v in r.items()}, b * inv)
                order.append(key)
                inserted = True
                break
            prow, pb = pivots[hit]
            f = r.pop(hit)
            for k, v in prow.items():
                if k == hit:
                    continue
                prev = r.get(k)
                tot = -f * v if prev is None else prev - f * v
                if tot.is_zero():
                    r.pop(k, None)
                else:
                    r[k] = tot
            b = b - f * pb
        if not inserted and not b.is_zero():
            raise Inconsistent("inconsistent linear system", witness=b)
    # back substitution, free unknowns set to zero
    sol: dict = {}
    for key in reversed(order):
        prow, pb = pivots[key]
        acc = pb
        for k, v in prow.items():
            if k == key:
                continue
            xk = sol.get(k)
            if xk is not None and not xk.is_zero():
                acc = acc - v * xk
        sol[key] = acc
    return sol


def independent_subset(vectors: list[dict]) -> list[int]:
    """Indices of a maximal independent subset, greedily in order."""
    red = SparseRowReducer()
    out = []
    for i, v in enumerate(vectors):
        if red.add_row(v):
            out.append(i)
    return out


def rank_of(vectors: list[dict]) -> int:
    red = SparseRowReducer()
    for v in vectors:
        red.add_row(v)
    return red.rank


class CoordBasis:
    """Fully reduced row store of an independent spanning family with
    coordinate extraction.  Each stored row is remembered as a combination
    of the accepted original vectors, and no stored row's support contains
    another row's pivot, so reduction terminates in one sweep."""

    def __init__(self):
        self.rows: dict = {}  # pivot -> (row dict, combo dict)
        self.count = 0

    def _reduce(self, vec: dict):
        r = {k: v for k, v in vec.items() if not v.is_zero()}
        combo: dict[int, FieldElem] = {}
        while True:
            hit = None
            for k in r:
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                return r, combo
            row, rcombo = self.rows[hit]
            f = r[hit]
            for k, v in row.items():
                prev = r.get(k)
                tot = -f * v if prev is None else prev - f * v
                if tot.is_zero():
                    r.pop(k, None)
                else:
                    r[k] = tot
            for i, v in rcombo.items():
                prev = combo.get(i)
                tot = f * v if prev is None else prev + f * v
                if tot.is_zero():
                    combo.pop(i, None)
                else:
                    combo[i] = tot

    def add(self, vec: dict) -> bool:
        """Insert a vector; True if it was independent (accepted)."""
        r, combo = self._reduce(vec)
        if not r:
            return False
        piv = min(r, key=_key_order)
        inv = r[piv].inv()
        row = {k: v * inv for k, v in r.items()}
        idx = self.count
        rcombo = {idx: inv}
        for i, v in combo.items():
            c = -inv * v
            if not c.is_zero():
                rcombo[i] = c
        # keep the store fully reduced: purge the new pivot from old rows
        for opiv in list(self.rows):
            orow, ocombo = self.rows[opiv]
            f = orow.get(piv)
            if f is None or f.is_zero():
                continue
            for k, v in row.items():
                prev = orow.get(k)
                tot = -f * v if prev is None else prev - f * v
                if tot.is_zero():
                    orow.pop(k, None)
                else:
                    orow[k] = tot
            for i, v in rcombo.items():
                prev = ocombo.get(i)
                tot = -f * v if prev is None else prev - f * v
                if tot.is_zero():
                    ocombo.pop(i, None)
                else:
                    ocombo[i] = tot
        self.rows[piv] = (row, rcombo)
        self.count += 1
        return True

    def coords(self, vec: dict) -> list[FieldElem] | None:
        """Coordinates of vec in the accepted family, or None if outside."""
        r, combo = self._reduce(vec)
        if r:
            return None
        return [combo.get(i, F_ZERO) for i in range(self.count)]


def coordinates_in_basis(basis: list[dict], vec: dict) -> list[FieldElem] | None:
    """Express vec in the given independent basis, or None if outside it.

    Solves sum_i x_i basis_i = vec by treating each support key as one
    equation.
    """
    keys = set(vec)
    for b in basis:
        keys |= set(b)
    rows = []
    rhs = []
    for key in sorted(keys, key=_key_order):
        rows.append({i: b.get(key, F_ZERO) for i, b in enumerate(basis)
                     if not b.get(key, F_ZERO).is_zero()})
        rhs.append(vec.get(key, F_ZERO))
    try:
        sol = solve_sparse(rows, rhs)
    except Inconsistent:
        return None
    return [sol.get(i, F_ZERO) for i in range(len(basis))]

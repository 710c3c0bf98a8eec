"""Exact sparse linear algebra over the rationals (row reduction only)."""
from __future__ import annotations

from fractions import Fraction


def rref(columns: list[dict], rows_order=None):
    """Row-reduce the matrix whose j-th column is the sparse dict ``columns[j]``.

    Returns ``(pivots, reduced)`` where ``pivots`` maps pivot column -> pivot
    row key and ``reduced`` is the list of reduced rows as sparse dicts
    ``{column: value}`` (one per pivot, pivot entry 1).  Columns are eliminated
    in index order, so the free columns are the trailing ones of each block.
    """
    rows: dict = {}
    for j, col in enumerate(columns):
        for r, v in col.items():
            if v:
                rows.setdefault(r, {})[j] = Fraction(v)
    keys = sorted(rows, key=rows_order) if rows_order else list(rows)
    pending = [rows[k] for k in keys]
    reduced: list[dict] = []
    pivots: dict = {}
    for row in pending:
        # eliminate existing pivots from the incoming row
        for pc, prow in zip(list(pivots), reduced):
            c = row.get(pc)
            if c:
                for k, v in prow.items():
                    nv = row.get(k, 0) - c * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {k: v * inv for k, v in row.items()}
        # back-substitute into earlier rows
        for i, prow in enumerate(reduced):
            c = prow.get(pc)
            if c:
                for k, v in row.items():
                    nv = prow.get(k, 0) - c * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[pc] = len(reduced)
        reduced.append(row)
    return pivots, reduced


def solve(columns: list[dict], rhs: dict):
    """Solve ``A x = rhs`` for sparse columns.

    Returns ``(particular, kernel)``: the particular solution with all free
    unknowns zero (``None`` when inconsistent) and a kernel basis with one
    vector per free unknown, both as dicts ``{column: value}``.
    """
    n = len(columns)
    augmented = list(columns) + [rhs]
    pivots, reduced = rref(augmented)
    if n in pivots:
        return None, _kernel(pivots, reduced, n)
    particular = {}
    for pc, i in pivots.items():
        v = reduced[i].get(n)
        if v:
            particular[pc] = v
    return particular, _kernel(pivots, reduced, n)


def _kernel(pivots, reduced, n):
    basis = []
    for free in range(n):
        if free in pivots:
            continue
        vec = {free: Fraction(1)}
        for pc, i in pivots.items():
            if pc >= n:
                continue
            c = reduced[i].get(free)
            if c:
                vec[pc] = -c
        basis.append(vec)
    return basis


def reduce_modulo(columns: list[dict], vec: dict):
    """Reduce ``vec`` modulo the span of ``columns`` (column echelon form).

    Row keys must be mutually sortable; the pivot of each column is its
    smallest remaining row key; the remainder vanishes on every pivot key and
    is therefore determined by the column order.  Returns
    ``(coefficients, remainder, dependent)`` with
    ``vec + sum_i coefficients[i] * columns[i] == remainder`` and
    ``dependent`` the number of columns that lie in the span of earlier ones.
    """
    echelon = []  # (pivot key, reduced column, combination of original columns)
    dependent = 0
    for j, col in enumerate(columns):
        cur = {k: Fraction(v) for k, v in col.items() if v}
        comb = {j: Fraction(1)}
        for key, ecol, ecomb in echelon:
            c = cur.get(key)
            if c:
                _axpy(cur, -c, ecol)
                _axpy(comb, -c, ecomb)
        if not cur:
            dependent += 1
            continue
        key = min(cur)
        inv = 1 / cur[key]
        echelon.append((key, {k: v * inv for k, v in cur.items()},
                        {k: v * inv for k, v in comb.items()}))
    rem = {k: Fraction(v) for k, v in vec.items() if v}
    coeffs: dict = {}
    # later columns vanish on earlier pivots, so insertion order is exact
    for key, ecol, ecomb in echelon:
        c = rem.get(key)
        if c:
            _axpy(rem, -c, ecol)
            _axpy(coeffs, -c, ecomb)
    return coeffs, rem, dependent


def _axpy(target: dict, a, source: dict):
    for k, v in source.items():
        nv = target.get(k, 0) + a * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def invert(matrix: list[list]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix; ``ValueError`` when singular."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]

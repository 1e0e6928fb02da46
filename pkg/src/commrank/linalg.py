"""Exact Gaussian elimination over Q(zeta_m).

Rows are sequences of :class:`~commrank.cyclotomic.CycNum` sharing one root
order (use :func:`lift_rows` first when they may not).  Pivot choice is the
first exact nonzero in the column; no magnitude heuristics.
"""

from __future__ import annotations

from .cyclotomic import CycNum, as_cyc, common_order

__all__ = [
    "lift_rows",
    "rref",
    "rank",
    "nullspace",
    "EchelonSpan",
]


def lift_rows(rows, order: int | None = None) -> list[list[CycNum]]:
    rows = [list(r) for r in rows]
    m = common_order(x for r in rows for x in r)
    if order is not None:
        from math import lcm

        m = lcm(m, order)
    return [[as_cyc(x, m) for x in r] for r in rows]


def rref(rows, ncols: int | None = None) -> tuple[list[list[CycNum]], list[int]]:
    """Reduced row echelon form: leading ones, zeros above and below pivots."""
    rows = lift_rows(rows)
    if not rows:
        return [], []
    if ncols is None:
        ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inv()
        rows[r] = [x * inv if x else x for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(rows) -> int:
    """Exact rank by forward elimination only."""
    rows = [r for r in lift_rows(rows) if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    rk = 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        prow = rows[rk]
        inv = prow[c].inv()
        for i in range(rk + 1, len(rows)):
            f = rows[i][c]
            if f:
                f = f * inv
                rows[i] = [x - f * y if y else x for x, y in zip(rows[i], prow)]
        rk += 1
        if rk == len(rows):
            break
    return rk


def nullspace(rows, ncols: int) -> list[list[CycNum]]:
    """Basis of {x : rows . x = 0}, one vector per free column."""
    reduced, pivots = rref(rows, ncols) if rows else ([], [])
    order = reduced[0][0].order if reduced else common_order(x for r in rows for x in r)
    zero = CycNum.zero(order)
    one = CycNum.one(order)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [zero] * ncols
        v[free] = one
        for row, pc in zip(reduced, pivots):
            if row[free]:
                v[pc] = -row[free]
        basis.append(v)
    return basis


class EchelonSpan:
    """Incrementally grown span, kept in semi-echelon form.

    ``add`` returns the reduced vector when it enlarges the span, else None.
    """

    def __init__(self, ncols: int, order: int = 1) -> None:
        self.ncols = ncols
        self.order = order
        self._rows: dict[int, list[CycNum]] = {}

    @property
    def dim(self) -> int:
        return len(self._rows)

    def _lift(self, vec) -> list[CycNum]:
        m = common_order(vec)
        if m != self.order and self.order % m:
            from math import lcm

            new = lcm(m, self.order)
            self._rows = {k: [x.lift(new) for x in r] for k, r in self._rows.items()}
            self.order = new
        return [as_cyc(x, self.order) for x in vec]

    def reduce(self, vec) -> list[CycNum]:
        v = self._lift(vec)
        for c in sorted(self._rows):
            f = v[c]
            if f:
                row = self._rows[c]
                v = [x - f * y if y else x for x, y in zip(v, row)]
        return v

    def add(self, vec) -> list[CycNum] | None:
        v = self.reduce(vec)
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            return None
        inv = v[lead].inv()
        v = [x * inv if x else x for x in v]
        # keep stored rows reduced at the new pivot so reduce() is one pass
        for c, row in self._rows.items():
            f = row[lead]
            if f:
                self._rows[c] = [x - f * y if y else x for x, y in zip(row, v)]
        self._rows[lead] = v
        return v

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def rows(self) -> list[list[CycNum]]:
        return [self._rows[c] for c in sorted(self._rows)]

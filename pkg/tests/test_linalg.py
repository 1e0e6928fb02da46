from __future__ import annotations

import sympy
from hypothesis import given
from hypothesis import strategies as st

from commrank.cyclotomic import CycNum, root_of_unity
from commrank.linalg import EchelonSpan, nullspace, rank, rref

small_ints = st.integers(min_value=-3, max_value=3)


def rational_rows(draw_rows):
    return [[CycNum.rational(x) for x in r] for r in draw_rows]


@given(st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_matches_sympy_over_q(rows):
    assert rank(rational_rows(rows)) == sympy.Matrix(rows).rank()


@given(st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=1, max_size=5))
def test_nullspace_is_kernel(rows):
    mat = rational_rows(rows)
    basis = nullspace(mat, 4)
    assert len(basis) == 4 - rank(mat)
    for v in basis:
        for r in mat:
            acc = CycNum.zero()
            for x, y in zip(r, v):
                acc = acc + x * y
            assert acc.is_zero()


def test_rref_over_cyclotomic_field():
    w = root_of_unity(1, 3)
    rows = [[CycNum.one(3), w, w * w], [w, w * w, CycNum.one(3)], [CycNum.one(3), CycNum.one(3), CycNum.one(3)]]
    # rows 0 and 1 are proportional (factor w)
    reduced, pivots = rref(rows)
    assert len(reduced) == 2
    assert pivots == [0, 1]
    assert rank(rows) == 2


@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=1, max_size=6))
def test_echelon_span_dimension_and_membership(rows):
    span = EchelonSpan(3)
    for r in rows:
        span.add([CycNum.rational(x) for x in r])
    assert span.dim == sympy.Matrix(rows).rank()
    for r in rows:
        assert span.contains([CycNum.rational(x) for x in r])

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from commrank.corpus import (
    build_eij_semigroup,
    check_shifted_contract,
    mixing_unitary,
    pattern_group_generators,
    random_shifted_instance,
)
from commrank.cyclotomic import CycNum
from commrank.engine import PreconditionError, closure, diagonal_subgroup, gpqa_group
from commrank.matgroup import DenseMatrix, MonomialMatrix, cyclic_shift, direct_sum, make_gpqa_generators
from commrank.reducibility import (
    Subspace,
    algebra_span,
    check_stabilizer_dichotomy,
    commutant,
    common_eigenvector,
    decompose_rank2_group,
    find_invariant_subspace,
    is_irreducible,
    matvec,
    off_block_rank,
    restrict,
    restriction_abelian,
    shifted_invariant_subspace,
    stabilizer_subgroup,
)


def ints(vec, order=1):
    return [CycNum.rational(x).lift(order) for x in vec]


def ts_plus_signs():
    t, s = pattern_group_generators()
    signs = [MonomialMatrix([0, 1], [1, 0], 2), MonomialMatrix([0, 1], [0, 1], 2)]
    ident2 = MonomialMatrix([0, 1], [0, 0], 2)
    ident3 = MonomialMatrix([0, 1, 2], [0, 0, 0], 2)
    return [direct_sum(t, ident2), direct_sum(s, ident2)] + [direct_sum(ident3, d) for d in signs]


def e(n, *idx):
    return Subspace.coordinate(n, idx)


# -- subspaces ---------------------------------------------------------------


def test_subspace_basics():
    a = Subspace.span([ints([1, 1, 0]), ints([0, 1, 1])])
    assert a.dim == 2
    assert a.contains(ints([1, 2, 1]))
    assert not a.contains(ints([1, 0, 0]))
    perp = a.orthocomplement()
    assert perp.dim == 1 and perp.contains(ints([1, -1, 1]))
    assert (a + perp).dim == 3
    assert a.intersection(e(3, 0, 1)).dim == 1
    assert Subspace.from_json(a.to_json()) == a


def test_subspace_image_and_invariance():
    s = cyclic_shift(3)
    line = Subspace.span([ints([1, 1, 1])])
    assert line.is_invariant(s)
    assert not e(3, 0).is_invariant(s)
    assert e(3, 0).image(s) == e(3, 1)


def test_restrict_is_block():
    x = direct_sum(cyclic_shift(2), MonomialMatrix([0], [1], 3))
    r = restrict(x, e(3, 0, 1))
    assert r == cyclic_shift(2).dense().lift(r.order)


# -- algebra span, Burnside, commutant -------------------------------------------


def test_algebra_span_examples():
    assert algebra_span([DenseMatrix.identity(3)]).dim == 1
    assert algebra_span(build_eij_semigroup(4)).dim == 16
    assert algebra_span(list(make_gpqa_generators(3, 2, [1, 0, 0]))).dim == 9


def test_irreducibility_examples():
    assert is_irreducible(list(pattern_group_generators()))
    assert is_irreducible(list(make_gpqa_generators(2, 3, [0, 1])))
    assert not is_irreducible([MonomialMatrix([0, 1], [1, 0], 3), MonomialMatrix([0, 1], [0, 1], 2)])


def test_commutant_examples():
    assert commutant(list(pattern_group_generators())).dim == 1
    assert commutant([DenseMatrix.identity(2)]).dim == 4
    assert commutant(ts_plus_signs()).dim == 3


@st.composite
def finite_generator_sets(draw):
    kind = draw(st.sampled_from(["gpqa", "sum", "diag"]))
    if kind == "gpqa":
        p, q = draw(st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))
        a = draw(st.lists(st.integers(0, q - 1), min_size=p, max_size=p))
        if len(set(a)) == 1:
            a[-1] = (a[-1] + 1) % q
        return list(make_gpqa_generators(p, q, a))
    if kind == "sum":
        s, a = make_gpqa_generators(2, 2, [0, 1])
        k = draw(st.integers(1, 2))
        extra = draw(st.lists(st.integers(0, 1), min_size=k, max_size=k))
        gens = [direct_sum(s, MonomialMatrix(range(k), [0] * k, 2)), direct_sum(a, MonomialMatrix(range(k), extra, 2))]
        if draw(st.booleans()):
            u = mixing_unitary(2 + k)
            gens = [u @ g.dense() @ u.conj_transpose() for g in gens]
        return gens
    n = draw(st.integers(1, 3))
    exps = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    return [MonomialMatrix(range(n), exps, 4)]


@given(finite_generator_sets())
def test_burnside_agrees_with_commutant(gens):
    assert is_irreducible(gens) == (commutant(gens).dim == 1)


@given(finite_generator_sets())
def test_found_subspace_is_invariant(gens):
    res = find_invariant_subspace(gens)
    if res.status == "irreducible":
        assert is_irreducible(gens)
    else:
        assert res.status == "found"
        assert 0 < res.subspace.dim < gens[0].n
        assert all(res.subspace.is_invariant(g) for g in gens)


# -- invariant subspace search -------------------------------------------------------


def test_find_invariant_subspace_examples():
    diag = [MonomialMatrix([0, 1], [1, 0], 4)]
    res = find_invariant_subspace(diag)
    assert res.status == "found" and res.subspace.dim == 1
    upper = [DenseMatrix.identity(2), DenseMatrix([[0, 1], [0, 0]])]
    res = find_invariant_subspace(upper)
    assert res.subspace == e(2, 0)
    s, a = make_gpqa_generators(3, 2, [1, 0, 0])
    one = MonomialMatrix([0], [0], 2)
    gens = [direct_sum(s, one), direct_sum(a, one)]
    res = find_invariant_subspace(gens, self_adjoint_closed=True)
    assert res.subspace in (e(4, 0, 1, 2), e(4, 3))


def test_hidden_block_found_over_extension_field():
    s, a = make_gpqa_generators(2, 3, [0, 1])
    w = MonomialMatrix([0, 1], [1, 1], 3)
    u = mixing_unitary(4)
    gens = [u @ direct_sum(g, x).dense() @ u.conj_transpose()
            for g, x in [(s, MonomialMatrix([0, 1], [0, 0], 3)), (a, w)]]
    res = find_invariant_subspace(gens, self_adjoint_closed=True)
    assert res.status == "found"
    assert all(res.subspace.is_invariant(g) for g in gens)


def test_common_eigenvector_of_abelian_set():
    gens = [MonomialMatrix([1, 0], [0, 0], 2), MonomialMatrix([0, 1], [1, 1], 2)]
    v = common_eigenvector(gens)
    line = Subspace.span([v])
    assert all(line.is_invariant(g) for g in gens)


# -- stabilizers --------------------------------------------------------------------


def test_stabilizer_examples():
    g = gpqa_group(3, 2, [1, 0, 0])
    assert stabilizer_subgroup(g, Subspace.full(3)).order == g.order
    assert stabilizer_subgroup(g, e(3, 0)).key_set() == diagonal_subgroup(g).key_set()
    big = closure(ts_plus_signs())
    assert stabilizer_subgroup(big, e(5, 0, 1, 2)).order == big.order


def test_stabilizer_dichotomy_examples():
    big = closure(ts_plus_signs())
    rep = check_stabilizer_dichotomy(big, e(5, 0, 1, 2))
    assert rep.holds and rep.abelian_on_complement and not rep.abelian_on_space
    small = gpqa_group(2, 2, [0, 1])
    assert check_stabilizer_dichotomy(small, e(2, 0)).vacuous
    with pytest.raises(PreconditionError):
        check_stabilizer_dichotomy(closure([MonomialMatrix([0, 1], [1, 0], 2)]), e(2, 0))
    with pytest.raises(PreconditionError):
        check_stabilizer_dichotomy(gpqa_group(5, 2, [1, 1, 0, 0, 0]), e(5, 0))


@given(st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5), min_size=1, max_size=3))
def test_stabilizer_of_subspace_equals_stabilizer_of_complement(vectors):
    space = Subspace.span([ints(v) for v in vectors], 5)
    if space.dim == 0:
        return
    big = _TS_SIGNS_GROUP
    stab = stabilizer_subgroup(big, space)
    assert stab.key_set() == stabilizer_subgroup(big, space.orthocomplement()).key_set()
    rep = check_stabilizer_dichotomy(big, space)
    assert rep.holds


_TS_SIGNS_GROUP = closure(ts_plus_signs())


def test_restriction_abelian_examples():
    g = gpqa_group(2, 2, [0, 1])
    assert not restriction_abelian(g.elements, Subspace.full(2))
    line = Subspace.span([ints([1, 1])])
    assert restriction_abelian(stabilizer_subgroup(g, line).elements, line)
    d = diagonal_subgroup(gpqa_group(3, 3, [0, 1, 2]))
    assert restriction_abelian(d.elements, Subspace.full(3))


# -- shifted invariant subspaces -------------------------------------------------------


def test_shifted_subspace_examples():
    n2 = e(4, 0, 1)
    ident = DenseMatrix.identity(4)
    block = DenseMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert shifted_invariant_subspace([ident], n2, block) == n2
    swap = MonomialMatrix([2, 1, 0, 3], [0, 0, 0, 0], 1)
    res = shifted_invariant_subspace([ident, swap], n2, swap)
    assert res in (e(4, 1), e(4, 0, 1, 2))
    assert res.is_invariant(swap)
    upper = DenseMatrix([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert shifted_invariant_subspace([ident, upper], n2, upper) == n2


def test_off_block_rank():
    swap = MonomialMatrix([2, 1, 0, 3], [0, 0, 0, 0], 1)
    assert off_block_rank(swap, e(4, 0, 1)) == 1
    assert off_block_rank(cyclic_shift(4), e(4, 0, 1)) == 1
    assert off_block_rank(MonomialMatrix([2, 3, 0, 1], [0] * 4, 1), e(4, 0, 1)) == 2


@given(st.integers(min_value=0, max_value=10_000))
def test_shifted_subspace_contract(seed):
    rng = random.Random(seed)
    elements, space, z = random_shifted_instance(rng)
    res = shifted_invariant_subspace(elements, space, z)
    ok, detail = check_shifted_contract(space, z, res)
    assert ok, detail


# -- decomposition ------------------------------------------------------------------------


def test_decompose_examples():
    diag = closure([MonomialMatrix(range(4), [1, 0, 2, 0], 3), MonomialMatrix(range(4), [0, 1, 1, 0], 2)])
    rep = decompose_rank2_group(diag)
    assert rep.ok and rep.abelian and rep.space.dim == 1
    rep = decompose_rank2_group(closure(ts_plus_signs()))
    assert rep.ok and rep.space == e(5, 0, 1, 2)
    s, a = make_gpqa_generators(2, 3, [0, 1])
    w = MonomialMatrix([0, 1], [1, 1], 3)
    g = closure([direct_sum(s, MonomialMatrix([0, 1], [0, 0], 3)), direct_sum(a, w)])
    rep = decompose_rank2_group(g)
    assert rep.ok and rep.space == e(4, 0, 1)


def test_decompose_rejects_large_commutator_rank():
    with pytest.raises(PreconditionError):
        decompose_rank2_group(gpqa_group(5, 2, [1, 1, 0, 0, 0]))


def test_matvec_agrees_for_monomial_and_dense():
    x = MonomialMatrix([2, 0, 1], [1, 2, 0], 3)
    v = ints([1, 2, 3], 3)
    assert matvec(x, v) == matvec(x.dense(), v)

"""Invariant subspaces of finite matrix groups and semigroups.

Everything is exact over Q(zeta_m).  Subspaces are kept in reduced row
echelon form, so equal subspaces have identical bases.  Inner products are
the conjugate-linear ones, <u, v> = sum(u_i * conj(v_i)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import linalg
from .cyclotomic import CycNum, as_cyc, common_order, cyclotomic_poly, root_of_unity
from .engine import (
    GroupSet,
    PreconditionError,
    closure,
    commutator_values,
    subgroup_from_elements,
)
from .matgroup import DenseMatrix, MatrixError, MonomialMatrix

__all__ = [
    "Subspace",
    "AlgebraSpan",
    "InvariantSubspaceResult",
    "StabilizerReport",
    "DecompositionReport",
    "algebra_span",
    "is_irreducible",
    "commutant",
    "find_invariant_subspace",
    "stabilizer_subgroup",
    "check_stabilizer_dichotomy",
    "shifted_invariant_subspace",
    "off_block_rank",
    "decompose_rank2_group",
    "restriction_abelian",
    "restrict",
    "common_eigenvector",
    "matvec",
]


def matvec(x, vec: Sequence[CycNum]) -> list[CycNum]:
    """x @ vec for a monomial or dense matrix."""
    m = math.lcm(x.order, common_order(vec))
    v = [as_cyc(c, m) for c in vec]
    if isinstance(x, MonomialMatrix):
        zero = CycNum.zero(m)
        out = [zero] * x.n
        step = m // x.order
        for j, i in enumerate(x.perm):
            if v[j]:
                out[i] = v[j] * root_of_unity(x.exps[j] * step, m)
        return out
    return x.apply(v)


def _dense(x) -> DenseMatrix:
    return x.dense() if isinstance(x, MonomialMatrix) else x


# ---------------------------------------------------------------------------
# Subspaces


class Subspace:
    """Subspace of Q(zeta_m)^n with a canonical reduced echelon basis."""

    __slots__ = ("n", "order", "basis", "pivots")

    def __init__(self, n: int, basis: list[list[CycNum]], pivots: list[int], order: int) -> None:
        self.n = n
        self.basis = basis
        self.pivots = pivots
        self.order = order

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int | None = None, order: int = 1) -> Subspace:
        vecs = [list(v) for v in vectors]
        if n is None:
            if not vecs:
                raise MatrixError("dimension needed for an empty span")
            n = len(vecs[0])
        if any(len(v) != n for v in vecs):
            raise MatrixError("vectors must have length n")
        m = math.lcm(order, common_order(x for v in vecs for x in v)) if vecs else order
        vecs = [[as_cyc(x, m) for x in v] for v in vecs if any(v)]
        if not vecs:
            return cls(n, [], [], m)
        rows, pivots = linalg.rref(vecs, n)
        return cls(n, rows, pivots, m)

    @classmethod
    def full(cls, n: int, order: int = 1) -> Subspace:
        return cls.coordinate(n, range(n), order)

    @classmethod
    def zero(cls, n: int, order: int = 1) -> Subspace:
        return cls(n, [], [], order)

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int], order: int = 1) -> Subspace:
        idx = sorted(set(indices))
        one, zero = CycNum.one(order), CycNum.zero(order)
        rows = [[one if j == i else zero for j in range(n)] for i in idx]
        return cls(n, rows, idx, order)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def lift(self, order: int) -> Subspace:
        if order == self.order:
            return self
        return Subspace(self.n, [[x.lift(order) for x in r] for r in self.basis], self.pivots, order)

    def contains(self, vec: Sequence) -> bool:
        m = math.lcm(self.order, common_order(vec))
        v = [as_cyc(x, m) for x in vec]
        for row, pc in zip(self.basis, self.pivots):
            f = v[pc]
            if f:
                v = [a - f * b if b else a for a, b in zip(v, row)]
        return not any(v)

    def reduce(self, vec: Sequence) -> list[CycNum]:
        """Residue of vec after clearing the pivot columns; zero iff vec is inside."""
        m = math.lcm(self.order, common_order(vec))
        v = [as_cyc(x, m) for x in vec]
        for row, pc in zip(self.basis, self.pivots):
            f = v[pc]
            if f:
                v = [a - f * b if b else a for a, b in zip(v, row)]
        return v

    def coordinates(self, vec: Sequence) -> list[CycNum]:
        """Coefficients of vec in the echelon basis (vec must lie in the span)."""
        return [as_cyc(vec[pc], self.order) for pc in self.pivots]

    def contains_space(self, other: Subspace) -> bool:
        return all(self.contains(v) for v in other.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.n == other.n
            and self.pivots == other.pivots
            and all(a == b for ra, rb in zip(self.basis, other.basis) for a, b in zip(ra, rb))
        )

    def __hash__(self) -> int:
        return hash((self.n, tuple(self.pivots), tuple(x for r in self.basis for x in r)))

    def __add__(self, other: Subspace) -> Subspace:
        return Subspace.span(self.basis + other.basis, self.n, math.lcm(self.order, other.order))

    def orthocomplement(self) -> Subspace:
        """{x : <x, b> = 0 for every basis vector b}, conjugate-linear inner product."""
        if not self.basis:
            return Subspace.full(self.n, self.order)
        conj_rows = [[x.conj() for x in r] for r in self.basis]
        return Subspace.span(linalg.nullspace(conj_rows, self.n), self.n, self.order)

    def annihilator(self) -> Subspace:
        """{x : sum(b_i x_i) = 0 for every basis vector b}, bilinear pairing."""
        if not self.basis:
            return Subspace.full(self.n, self.order)
        return Subspace.span(linalg.nullspace(self.basis, self.n), self.n, self.order)

    def intersection(self, other: Subspace) -> Subspace:
        return (self.orthocomplement() + other.orthocomplement()).orthocomplement()

    def image(self, x) -> Subspace:
        return Subspace.span([matvec(x, b) for b in self.basis], self.n, self.order)

    def is_invariant(self, x) -> bool:
        return all(self.contains(matvec(x, b)) for b in self.basis)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "basis": [[c.to_json() for c in r] for r in self.basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> Subspace:
        try:
            n = int(data["n"])
            order = int(data.get("order", 1))
            rows = [[CycNum.from_json(c, order) for c in r] for r in data["basis"]]
        except (KeyError, TypeError) as exc:
            raise MatrixError(f"malformed subspace: {exc}") from None
        return cls.span(rows, n, order)

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, dim={self.dim}, pivots={self.pivots})"


def restrict(x, space: Subspace) -> DenseMatrix:
    """Matrix of x on an invariant subspace, in pivot coordinates."""
    if space.dim == 0:
        raise MatrixError("cannot restrict to the zero subspace")
    m = math.lcm(x.order, space.order)
    cols = []
    for b in space.basis:
        img = matvec(x, b)
        if not space.contains(img):
            raise MatrixError("subspace is not invariant under the matrix")
        cols.append([as_cyc(img[pc], m) for pc in space.pivots])
    k = space.dim
    return DenseMatrix([[cols[j][i] for j in range(k)] for i in range(k)], order=m)


# ---------------------------------------------------------------------------
# Algebras


@dataclass
class AlgebraSpan:
    n: int
    basis: list[DenseMatrix]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _flat(x: DenseMatrix) -> list[CycNum]:
    return [c for r in x.rows() for c in r]


def _align_dense(gens: Sequence) -> list[DenseMatrix]:
    dense = [_dense(g) for g in gens]
    if not dense:
        raise MatrixError("at least one matrix is required")
    n = dense[0].n
    if any(d.n != n for d in dense):
        raise MatrixError("matrices must share one dimension")
    m = 1
    for d in dense:
        m = math.lcm(m, d.order)
    return [d.lift(m) for d in dense]


def algebra_span(gens: Sequence, include_identity: bool = True) -> AlgebraSpan:
    """Linear span of all products of the generators (and I if requested).

    Grown from the seeds by left multiplication with the generators; every
    word is reached this way, so the result is closed under products.
    """
    dense = _align_dense(gens)
    n, m = dense[0].n, dense[0].order
    span = linalg.EchelonSpan(n * n, m)
    basis: list[DenseMatrix] = []
    queue: list[DenseMatrix] = []
    seeds = ([DenseMatrix.identity(n, m)] if include_identity else []) + dense
    for s in seeds:
        if span.add(_flat(s)) is not None:
            basis.append(s)
            queue.append(s)
    while queue and span.dim < n * n:
        b = queue.pop(0)
        for g in dense:
            prod = g @ b
            if span.add(_flat(prod)) is not None:
                basis.append(prod)
                queue.append(prod)
    return AlgebraSpan(n, basis)


def is_irreducible(gens: Sequence) -> bool:
    """Burnside: irreducible iff the generated unital algebra is all of M_n."""
    n = _dense(gens[0]).n
    return algebra_span(gens, include_identity=True).dim == n * n


def commutant(gens: Sequence) -> AlgebraSpan:
    """Basis of {X : X G = G X for every generator G}."""
    dense = _align_dense(gens)
    n, m = dense[0].n, dense[0].order
    zero = CycNum.zero(m)
    eqs = []
    for g in dense:
        e = g.rows()
        # (X G - G X)[i][j] = sum_k X[i][k] G[k][j] - G[i][k] X[k][j]
        for i in range(n):
            for j in range(n):
                row = [zero] * (n * n)
                for k in range(n):
                    if e[k][j]:
                        row[i * n + k] = row[i * n + k] + e[k][j]
                    if e[i][k]:
                        row[k * n + j] = row[k * n + j] - e[i][k]
                if any(row):
                    eqs.append(row)
    if eqs:
        sols = linalg.nullspace(eqs, n * n)
    else:
        sols = [[CycNum.one(m) if c == idx else zero for c in range(n * n)] for idx in range(n * n)]
    basis = [DenseMatrix([v[i * n : (i + 1) * n] for i in range(n)], order=m) for v in sols]
    return AlgebraSpan(n, basis)


# ---------------------------------------------------------------------------
# Invariant subspace search


@dataclass
class InvariantSubspaceResult:
    status: str  # "found", "irreducible" or "not-found"
    subspace: Subspace | None = None
    method: str = ""
    algebra_dim: int = 0
    field_order: int = 1
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "subspace": self.subspace.to_json() if self.subspace is not None else None,
            "method": self.method,
            "algebra_dim": self.algebra_dim,
            "field_order": self.field_order,
            "notes": list(self.notes),
        }


def _is_scalar(x: DenseMatrix) -> bool:
    d = x.entry(0, 0)
    return x == DenseMatrix.identity(x.n, x.order).scale(d)


def _minimal_polynomial(x: DenseMatrix) -> list[CycNum]:
    """Monic minimal polynomial, coefficients low degree first."""
    n, m = x.n, x.order
    powers = [DenseMatrix.identity(n, m)]
    flats = [_flat(powers[0])]
    while True:
        nxt = x @ powers[-1]
        flats.append(_flat(nxt))
        cols = len(flats)
        rows = [[flats[c][i] for c in range(cols)] for i in range(n * n)]
        null = linalg.nullspace(rows, cols)
        if null:
            rel = null[0]
            lead = rel[-1]
            if lead:
                return [c / lead for c in rel]
        powers.append(nxt)


def _sympy_field(m: int):
    from sympy import I, QQ, exp, pi

    if m <= 2:
        return QQ
    dom = QQ.algebraic_field(exp(2 * pi * I / m))
    mod = [int(c) for c in dom.mod.to_list()]
    if mod[::-1] != list(cyclotomic_poly(m)):
        raise RuntimeError(f"unexpected primitive element for order {m}")
    return dom


def _factor_over(poly: list[CycNum], m: int) -> list[list[CycNum]]:
    """Irreducible factors over Q(zeta_m), coefficients low degree first."""
    from sympy import Poly, Symbol

    dom = _sympy_field(m)
    x = Symbol("x")
    lifted = [as_cyc(c, m) for c in poly]
    if m <= 2:
        coeffs = [dom(c.coeffs[0]) for c in reversed(lifted)]
    else:
        coeffs = [dom([c for c in reversed(c.coeffs)]) for c in reversed(lifted)]
    _, factors = Poly(coeffs, x, domain=dom).factor_list()
    out = []
    for f, _ in factors:
        cs = []
        for a in reversed(f.rep.to_list()):
            if m <= 2:
                cs.append(CycNum.rational(a, m))
            else:
                cs.append(CycNum(list(reversed(a.to_list())), m))
        out.append(cs)
    return out


def _poly_at(coeffs: list[CycNum], x: DenseMatrix) -> DenseMatrix:
    n, m = x.n, math.lcm(x.order, common_order(coeffs))
    x = x.lift(m)
    acc = DenseMatrix.zeros(n, m)
    ident = DenseMatrix.identity(n, m)
    for c in reversed(coeffs):
        acc = acc @ x + ident.scale(c)
    return acc


def _kernel(x: DenseMatrix) -> Subspace:
    return Subspace.span(linalg.nullspace(x.rows(), x.n), x.n, x.order)


def _exponent_hint(gens: Sequence, cap: int = 5000) -> int:
    try:
        group = closure(list(gens), cap=cap)
        elems = group.elements
    except Exception:
        elems = _align_dense(gens)
    e = 1
    for g in elems:
        k, acc = 1, g
        while not acc.is_identity() and k <= 4 * len(elems) + 64:
            acc = acc @ g
            k += 1
        if acc.is_identity():
            e = math.lcm(e, k)
    return e


def _split_by_commutant(gens: Sequence, m: int) -> tuple[Subspace | None, int, list[str]]:
    comm = commutant(gens)
    cands = [b for b in comm.basis if not _is_scalar(b)]
    if not cands:
        return None, m, ["commutant is scalar"]
    extra = []
    for i, a in enumerate(cands[:4]):
        for b in cands[i + 1 : 4]:
            extra.extend([a + b, a @ b])
    cands = cands + [c for c in extra if not _is_scalar(c)]
    notes = []
    orders = [m]
    e = _exponent_hint(gens)
    if math.lcm(m, e) != m:
        orders.append(math.lcm(m, e))
    for order in orders:
        for k in cands:
            k = k.lift(order)
            minpoly = _minimal_polynomial(k)
            for f in _factor_over(minpoly, order):
                if 1 <= len(f) - 1 < len(minpoly) - 1:
                    space = _kernel(_poly_at(f, k))
                    if 0 < space.dim < k.n:
                        if order != m:
                            notes.append(f"field enlarged from order {m} to {order}")
                        return space, order, notes
    notes.append(f"no splitting commutant element up to field order {orders[-1]}")
    return None, orders[-1], notes


def _cyclic_search(algebra: AlgebraSpan) -> Subspace | None:
    n = algebra.n
    m = algebra.basis[0].order
    one, zero, neg = CycNum.one(m), CycNum.zero(m), -CycNum.one(m)
    probes = [[one if j == i else zero for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for sign in (one, neg):
                v = [zero] * n
                v[i], v[j] = one, sign
                probes.append(v)
    for v in probes:
        space = Subspace.span([b.apply(v) for b in algebra.basis], n, m)
        if 0 < space.dim < n:
            return space
    return None


def find_invariant_subspace(gens: Sequence, self_adjoint_closed: bool = False) -> InvariantSubspaceResult:
    """A nontrivial common invariant subspace, or a report that none exists.

    The result is checked against every generator before it is returned.
    """
    dense = _align_dense(gens)
    n, m = dense[0].n, dense[0].order
    algebra = algebra_span(dense, include_identity=True)
    if algebra.dim == n * n:
        return InvariantSubspaceResult("irreducible", None, "burnside", algebra.dim, m)
    notes: list[str] = []
    found, method, order = None, "", m
    if self_adjoint_closed:
        found, order, notes = _split_by_commutant(dense, m)
        method = "commutant-eigenspace"
    if found is None:
        found = _cyclic_search(algebra)
        method, order = "cyclic-subspace", m
    if found is None:
        dual = algebra_span([d.transpose() for d in dense], include_identity=True)
        space = _cyclic_search(dual)
        if space is not None:
            found, method = space.annihilator(), "transpose-annihilator"
    if found is None:
        notes.append("search is incomplete for non-self-adjoint sets")
        return InvariantSubspaceResult("not-found", None, "exhausted", algebra.dim, order, notes)
    for g in dense:
        if not found.is_invariant(g):
            raise RuntimeError("invariant subspace check failed")
    return InvariantSubspaceResult("found", found, method, algebra.dim, found.order, notes)


def common_eigenvector(gens: Sequence) -> list[CycNum]:
    """A common eigenvector of commuting finite-order matrices."""
    dense = _align_dense(gens)
    n = dense[0].n
    space = Subspace.full(n, dense[0].order)
    for g in dense:
        k, acc = 1, g
        while not acc.is_identity():
            acc = acc @ g
            k += 1
            if k > 10**4:
                raise PreconditionError("matrix does not have finite order")
        order = math.lcm(space.order, g.order, k)
        space = space.lift(order)
        g = g.lift(order)
        ident = DenseMatrix.identity(n, order)
        for j in range(k):
            lam = root_of_unity(j * (order // k), order)
            shifted = g - ident.scale(lam)
            # kernel of (g - lam) restricted to the current joint eigenspace
            cols = [shifted.apply(b) for b in space.basis]
            rows = [[cols[c][i] for c in range(len(cols))] for i in range(n)]
            null = linalg.nullspace(rows, len(cols))
            if null:
                vecs = []
                for coeffs in null:
                    v = [CycNum.zero(order)] * n
                    for c, b in zip(coeffs, space.basis):
                        if c:
                            v = [a + c * y for a, y in zip(v, b)]
                    vecs.append(v)
                space = Subspace.span(vecs, n, order)
                break
        else:
            raise RuntimeError("no eigenvalue found among roots of unity")
    return space.basis[0]


# ---------------------------------------------------------------------------
# Stabilizers


def stabilizer_subgroup(group: GroupSet, space: Subspace) -> GroupSet:
    """Elements mapping the subspace into itself."""
    return subgroup_from_elements([x for x in group if space.is_invariant(x)], group)


def restriction_abelian(elements: Sequence, space: Subspace) -> bool:
    """Whether the restrictions of the elements to an invariant subspace commute."""
    for x in elements:
        if not space.is_invariant(x):
            raise MatrixError("subspace is not invariant under every element")
    if space.dim <= 1:
        return True
    res = [restrict(x, space) for x in elements]
    for i, a in enumerate(res):
        for b in res[i + 1 :]:
            if a @ b != b @ a:
                return False
    return True


@dataclass
class StabilizerReport:
    holds: bool
    vacuous: bool
    stabilizer_order: int
    abelian_on_space: bool
    abelian_on_complement: bool
    same_as_complement: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _max_commutator_rank(group: GroupSet) -> int:
    return max((v.rank for v in commutator_values(group)), default=0)


def check_stabilizer_dichotomy(group: GroupSet, space: Subspace) -> StabilizerReport:
    """At least one restriction of the stabilizer (to M or to M-perp) is abelian.

    Requires a nonabelian unitary group whose commutators have rank <= 2.
    """
    r = _max_commutator_rank(group)
    if r > 2:
        raise PreconditionError(f"maximal commutator rank is {r} > 2")
    if r == 0:
        raise PreconditionError("group is abelian")
    perp = space.orthocomplement()
    stab = stabilizer_subgroup(group, space)
    same = stab.key_set() == stabilizer_subgroup(group, perp).key_set()
    gens = stab.generators or [stab.identity]
    on_space = restriction_abelian(gens, space)
    on_perp = restriction_abelian(gens, perp)
    vacuous = group.n <= 2
    return StabilizerReport(
        holds=same and (on_space or on_perp),
        vacuous=vacuous,
        stabilizer_order=stab.order,
        abelian_on_space=on_space,
        abelian_on_complement=on_perp,
        same_as_complement=same,
    )


# ---------------------------------------------------------------------------
# Shifted invariant subspaces


def off_block_rank(x, space: Subspace) -> int:
    """Rank of the block of x mapping the subspace into its orthocomplement.

    Basis-free form: dim(N + xN) - dim N.
    """
    return (space + space.image(x)).dim - space.dim


def _preimage_in(x, space: Subspace) -> Subspace:
    """{v in N : x v in N}."""
    if space.dim == 0:
        return space
    residues = [space.reduce(matvec(x, b)) for b in space.basis]
    m = common_order(c for r in residues for c in r) if residues else space.order
    m = math.lcm(m, space.order)
    rows = [[as_cyc(residues[c][i], m) for c in range(space.dim)] for i in range(space.n)]
    null = linalg.nullspace(rows, space.dim)
    basis = space.lift(m).basis
    vecs = []
    for coeffs in null:
        v = [CycNum.zero(m)] * space.n
        for c, b in zip(coeffs, basis):
            if c:
                v = [a + c * y for a, y in zip(v, b)]
        vecs.append(v)
    return Subspace.span(vecs, space.n, m)


def shifted_invariant_subspace(elements: Sequence, space: Subspace, z) -> Subspace:
    """A z-invariant subspace within codimension one of N (inside or around it).

    Either the result lies inside N with codimension <= 1, or it contains N
    with codimension <= 1 and equals N + zN.  When both shapes are
    available the smaller subspace is returned.
    """
    for w in list(elements) + [z, z @ z]:
        k = off_block_rank(w, space)
        if k > 1:
            raise PreconditionError(f"off-diagonal block has rank {k} > 1")
    if space.is_invariant(z):
        return space
    inner = _preimage_in(z, space)
    outer = space + space.image(z)
    inner_ok = inner.is_invariant(z) and space.dim - inner.dim <= 1
    outer_ok = outer.is_invariant(z) and outer.dim - space.dim <= 1
    if inner_ok:
        return inner
    if outer_ok:
        return outer
    raise RuntimeError("neither candidate subspace is invariant; hypothesis contradicted")


# ---------------------------------------------------------------------------
# Decomposition of groups with commutator rank <= 2


@dataclass
class DecompositionReport:
    space: Subspace | None
    blocks_verified: bool
    complement_abelian: bool
    max_commutator_rank: int
    abelian: bool
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.space is not None
            and 1 <= self.space.dim <= 3
            and self.blocks_verified
            and self.complement_abelian
            and not self.violations
        )

    def to_json(self) -> dict:
        return {
            "M": self.space.to_json() if self.space is not None else None,
            "dim_M": self.space.dim if self.space is not None else None,
            "blocks_verified": self.blocks_verified,
            "complement_abelian": self.complement_abelian,
            "max_commutator_rank": self.max_commutator_rank,
            "abelian": self.abelian,
            "ok": self.ok,
            "violations": self.violations,
        }


def _invariant_closure(space: Subspace, gens: Sequence) -> Subspace:
    while True:
        grown = space
        for g in gens:
            grown = grown + grown.image(g)
        if grown.dim == space.dim:
            return space
        space = grown


def decompose_rank2_group(group: GroupSet) -> DecompositionReport:
    """Split C^n = M + M-perp with dim M <= 3 and G abelian on M-perp.

    M is the span of the images of c - I over all commutators c.  Every
    commutator acts trivially on M-perp, so G is abelian there, and any
    admissible M must contain this span.  dim M > 3 therefore certifies a
    genuine violation rather than a search failure.
    """
    gens = group.generators or group.elements
    for g in gens:
        if isinstance(g, DenseMatrix) and not g.is_unitary():
            raise PreconditionError("group is not unitary")
    values = commutator_values(group)
    r = max((v.rank for v in values), default=0)
    if r > 2:
        raise PreconditionError(f"maximal commutator rank is {r} > 2")
    n = group.n
    m = group.root_order
    if r == 0:
        vec = common_eigenvector(gens)
        space = Subspace.span([vec], n, m)
        abelian = True
    else:
        cols = []
        for v in values:
            if v.rank:
                d = _dense(v.element) - DenseMatrix.identity(n, v.element.order)
                cols.extend(d.column(j) for j in range(n))
        space = _invariant_closure(Subspace.span(cols, n, m), gens)
        abelian = False
    violations = []
    if not 1 <= space.dim <= 3:
        violations.append({"kind": "dimension", "dim": space.dim})
    perp = space.orthocomplement()
    blocks = True
    for x in group:
        if not (space.is_invariant(x) and perp.is_invariant(x)):
            blocks = False
            violations.append({"kind": "not-block-diagonal", "element": x.to_json()})
            break
    comp_abelian = perp.dim == 0 or (blocks and restriction_abelian(gens, perp))
    if not comp_abelian:
        violations.append({"kind": "complement-nonabelian"})
    return DecompositionReport(space, blocks, comp_abelian, r, abelian, violations)

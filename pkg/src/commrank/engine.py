"""Finite matrix groups: closure, diagonal and commutator subgroups, and
the commutator-rank invariants rho and r.

Elements are :class:`MonomialMatrix` or :class:`DenseMatrix`; both expose
``key()``, ``@``, ``inverse()`` and ``is_diagonal()``.

The maximal commutator rank is computed class by class.  For a conjugacy
class representative R and any Y, [R, Y] = R * (Y R^-1 Y^-1), and the
second factor runs over the conjugacy class of R^-1.  Every commutator of
G is conjugate to one of these and rank(c - I) is a class function, so
one pass over the classes sees every value that an ordered-pair scan
would, at O(|G|) rather than O(|G|^2) cost.
"""

from __future__ import annotations

import math
import os
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .matgroup import (
    DenseMatrix,
    MatrixError,
    MonomialMatrix,
    cyclic_shift,
    make_gpqa_generators,
    mono_identity,
)

__all__ = [
    "DEFAULT_CAP",
    "CapExceeded",
    "PreconditionError",
    "GroupSet",
    "InvariantsReport",
    "closure",
    "subgroup_from_elements",
    "gpqa_group",
    "diagonal_subgroup",
    "commutator_subgroup",
    "commutator_rank",
    "rank_minus_identity",
    "conjugacy_classes",
    "commutator_values",
    "compute_invariants",
    "pair_scan_max_rank",
    "Rho2Construction",
    "rho2_construction",
    "rho2_witness",
    "default_cap",
    "exponent_lattice_key",
]

DEFAULT_CAP = 100_000


def default_cap() -> int:
    env = os.environ.get("MONO_CAP")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"MONO_CAP must be an integer, got {env!r}") from None
        if value < 1:
            raise ValueError("MONO_CAP must be positive")
        return value
    return DEFAULT_CAP


class CapExceeded(RuntimeError):
    """Group enumeration would exceed the element cap."""

    def __init__(self, cap: int) -> None:
        super().__init__(f"group has more than {cap} elements")
        self.cap = cap


class PreconditionError(ValueError):
    """Input violates the hypothesis of the requested operation."""


def _identity_like(x):
    if isinstance(x, MonomialMatrix):
        return mono_identity(x.n, x.order)
    return DenseMatrix.identity(x.n, x.order)


def _align(generators: Sequence) -> list:
    gens = list(generators)
    if not gens:
        raise MatrixError("at least one generator is required")
    kinds = {type(g) for g in gens}
    if len(kinds) > 1:
        gens = [g.dense() if isinstance(g, MonomialMatrix) else g for g in gens]
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise MatrixError("generators must share one dimension")
    m = 1
    for g in gens:
        m = math.lcm(m, g.order)
    return [g.lift(m) for g in gens]


class GroupSet:
    """A finite, closed set of matrices in BFS discovery order."""

    def __init__(self, elements: list, generators: list) -> None:
        self.elements = elements
        self.generators = generators
        self._index = {x.key(): i for i, x in enumerate(elements)}
        self.n = elements[0].n
        self.root_order = elements[0].order

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        if x.order != self.root_order:
            if self.root_order % x.order:
                return False
            x = x.lift(self.root_order)
        return x.key() in self._index

    def index(self, x) -> int:
        return self._index[x.key()]

    @property
    def identity(self):
        return self.elements[0]

    def is_monomial(self) -> bool:
        return isinstance(self.elements[0], MonomialMatrix)

    def is_abelian(self) -> bool:
        gens = self.generators or self.elements
        return all(
            (a @ b).key() == (b @ a).key() for i, a in enumerate(gens) for b in gens[i + 1 :]
        )

    def key_set(self) -> frozenset:
        return frozenset(self._index)

    @classmethod
    def from_elements(cls, elements: Iterable, cap: int | None = None) -> GroupSet:
        """Wrap an already closed set; picks a small generating set greedily."""
        elements = list(elements)
        if not elements:
            raise MatrixError("empty element list")
        ident = _identity_like(elements[0])
        gens: list = []
        current = GroupSet([ident], [])
        for x in elements:
            if x not in current:
                gens.append(x)
                current = closure(gens, cap=cap or max(len(elements), 1))
        if current.key_set() != frozenset(x.key() for x in elements) | {ident.key()}:
            raise MatrixError("element list is not closed under multiplication")
        return current


def closure(generators: Sequence, cap: int | None = None) -> GroupSet:
    """Breadth-first product closure of a finite matrix group.

    New elements are found by left multiplication with the generators and
    their inverses; raises :class:`CapExceeded` past ``cap`` elements.
    """
    cap = default_cap() if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be positive")
    gens = _align(generators)
    ident = _identity_like(gens[0])
    steps = []
    seen_steps = set()
    for g in gens:
        for h in (g, g.inverse()):
            if h.key() not in seen_steps:
                seen_steps.add(h.key())
                steps.append(h)
    elements = [ident]
    index = {ident.key(): 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in steps:
            y = g @ x
            k = y.key()
            if k not in index:
                if len(elements) >= cap:
                    raise CapExceeded(cap)
                index[k] = len(elements)
                elements.append(y)
                queue.append(y)
    group = GroupSet.__new__(GroupSet)
    group.elements = elements
    group.generators = gens
    group._index = index
    group.n = ident.n
    group.root_order = ident.order
    return group


def gpqa_group(p: int, q: int, a_exps: Sequence[int], cap: int | None = None) -> GroupSet:
    s, a = make_gpqa_generators(p, q, a_exps)
    return closure([s, a], cap=cap)


def exponent_lattice_key(q: int, exps: Sequence[int]) -> tuple:
    """Reduced echelon basis (mod q) of the span of all cyclic shifts of exps.

    G(p, q, A) is {diag(zeta_q^v) S^k : v in this span}, so two exponent
    vectors with the same key generate the same group.
    """
    p = len(exps)
    rows = [[int(exps[(j - k) % p]) % q for j in range(p)] for k in range(p)]
    out = []
    col = 0
    for col in range(p):
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[col], -1, q)
        piv = [x * inv % q for x in piv]
        rows = [[(x - r[col] * y) % q for x, y in zip(r, piv)] for r in rows]
        out = [[(x - o[col] * y) % q for x, y in zip(o, piv)] for o in out]
        out.append(piv)
    return (q, tuple(tuple(r) for r in out))


def subgroup_from_elements(elements: list, like: GroupSet, cap: int | None = None) -> GroupSet:
    """Subgroup generated by the elements; generators are picked greedily."""
    if not elements:
        return GroupSet([like.identity], [])
    ident = like.identity
    gens: list = []
    current = GroupSet([ident], [])
    for x in elements:
        if x not in current:
            gens.append(x)
            current = closure(gens, cap=cap or like.order)
    return current


def diagonal_subgroup(group: GroupSet) -> GroupSet:
    """Elements with identity permutation pattern (diagonal matrices)."""
    return subgroup_from_elements([x for x in group if x.is_diagonal()], group, None)


def rank_minus_identity(x) -> int:
    if isinstance(x, MonomialMatrix):
        return x.rank_minus_identity()
    return (x - DenseMatrix.identity(x.n, x.order)).rank()


def commutator_rank(x, y) -> int:
    """rank(XY - YX), which equals rank(X Y X^-1 Y^-1 - I) for invertible X, Y."""
    if isinstance(x, MonomialMatrix) and isinstance(y, MonomialMatrix):
        c = x @ y @ x.inverse() @ y.inverse()
        return c.rank_minus_identity()
    if isinstance(x, MonomialMatrix):
        x = x.dense()
    if isinstance(y, MonomialMatrix):
        y = y.dense()
    return (x @ y - y @ x).rank()


@dataclass
class ConjugacyClass:
    rep: int
    # member element index -> index of h with h * rep * h^-1 = member
    members: dict[int, int]


def conjugacy_classes(group: GroupSet) -> list[ConjugacyClass]:
    """Orbits under conjugation by the generators, with conjugating elements."""
    steps = []
    for g in group.generators or group.elements:
        steps.append((g, g.inverse()))
    elems = group.elements
    assigned = [False] * len(elems)
    classes = []
    ident = 0
    for i in range(len(elems)):
        if assigned[i]:
            continue
        members = {i: ident}
        assigned[i] = True
        queue = deque([i])
        while queue:
            c = queue.popleft()
            x = elems[c]
            h = elems[members[c]]
            for g, gi in steps:
                y = g @ x @ gi
                j = group.index(y)
                if j not in members:
                    members[j] = group.index(g @ h)
                    assigned[j] = True
                    queue.append(j)
        classes.append(ConjugacyClass(i, members))
    return classes


@dataclass
class CommutatorValue:
    element: object
    rank: int
    x: object
    y: object


def commutator_values(group: GroupSet, classes: list[ConjugacyClass] | None = None) -> list[CommutatorValue]:
    """One commutator [R, Y] per (class representative R, element of class(R^-1)).

    Up to conjugation this is every commutator value of the group.
    """
    classes = classes if classes is not None else conjugacy_classes(group)
    class_of = {}
    for cc in classes:
        for idx in cc.members:
            class_of[idx] = cc
    elems = group.elements
    out = []
    seen = set()
    for cc in classes:
        r = elems[cc.rep]
        rinv = r.inverse()
        ri = group.index(rinv)
        target = class_of[ri]
        # k * rep' * k^-1 = R^-1, so (h k^-1) R^-1 (h k^-1)^-1 = h rep' h^-1
        k = elems[target.members[ri]]
        kinv = k.inverse()
        for member, h_idx in target.members.items():
            c = elems[member]
            value = r @ c
            key = value.key()
            if key in seen:
                continue
            seen.add(key)
            y = elems[h_idx] @ kinv
            out.append(CommutatorValue(value, rank_minus_identity(value), r, y))
    return out


def commutator_subgroup(group: GroupSet, cap: int | None = None) -> GroupSet:
    """Subgroup generated by all commutators X Y X^-1 Y^-1."""
    classes = conjugacy_classes(group)
    class_of = {}
    for cc in classes:
        for idx in cc.members:
            class_of[idx] = cc
    picked = set()
    for v in commutator_values(group, classes):
        picked.update(class_of[group.index(v.element)].members)
    elements = [group.elements[i] for i in sorted(picked)]
    return subgroup_from_elements(elements, group, cap)


@dataclass
class InvariantsReport:
    order: int
    rho: int | None
    r: int
    rho_witness: object | None
    r_witness: tuple | None
    abelian: bool = False
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "rho": self.rho,
            "r": self.r,
            "abelian": self.abelian,
            "rho_witness": self.rho_witness.to_json() if self.rho_witness is not None else None,
            "r_witness": [w.to_json() for w in self.r_witness] if self.r_witness else None,
            "notes": list(self.notes),
        }


def compute_invariants(group: GroupSet, values: list[CommutatorValue] | None = None) -> InvariantsReport:
    """rho = min nonzero rank(D - I) over diagonal D; r = max commutator rank.

    Ties are broken by discovery order.  An abelian group reports r = 0
    with ``abelian=True``; rho is None when no diagonal element differs
    from I.
    """
    rho = None
    rho_witness = None
    for x in group:
        if x.is_diagonal():
            k = rank_minus_identity(x)
            if k and (rho is None or k < rho):
                rho, rho_witness = k, x
    values = values if values is not None else commutator_values(group)
    r = 0
    r_witness = None
    for v in values:
        if v.rank > r:
            r, r_witness = v.rank, (v.x, v.y)
    notes = []
    abelian = r == 0
    if abelian:
        notes.append("abelian: every commutator is I, r reported as 0")
    if rho is None:
        notes.append("rho undefined: no diagonal element other than I")
    return InvariantsReport(group.order, rho, r, rho_witness, r_witness, abelian, notes)


def pair_scan_max_rank(elements: Sequence, rank_fn=None) -> tuple[int, Counter]:
    """Brute-force max of rank(XY - YX) over all ordered pairs, plus a
    histogram of the ranks seen.  Reference oracle for small groups and
    for semigroups, where the class argument does not apply.
    """
    rank_fn = rank_fn or _pair_rank
    hist: Counter = Counter()
    best = 0
    for x in elements:
        for y in elements:
            k = rank_fn(x, y)
            hist[k] += 1
            best = max(best, k)
    return best, hist


def _pair_rank(x, y) -> int:
    if isinstance(x, MonomialMatrix) and isinstance(y, MonomialMatrix):
        return commutator_rank(x, y)
    if isinstance(x, MonomialMatrix):
        x = x.dense()
    if isinstance(y, MonomialMatrix):
        y = y.dense()
    return (x @ y - y @ x).rank()


# ---------------------------------------------------------------------------
# Witness construction for rho = 2


@dataclass
class Rho2Construction:
    delta: MonomialMatrix
    gamma: MonomialMatrix
    omega: MonomialMatrix
    delta_prime: MonomialMatrix | None
    claimed_rank: int
    descent: list[MonomialMatrix]

    @property
    def omega_rank(self) -> int:
        return self.omega.rank_minus_identity()


def _support(d: MonomialMatrix) -> list[int]:
    return [i for i, e in enumerate(d.exps) if e]


def _conj_shift(s: MonomialMatrix, d: MonomialMatrix, k: int) -> MonomialMatrix:
    sk = s.power(k % s.n)
    return sk @ d @ sk.inverse()


def _gap(d: MonomialMatrix) -> tuple[int, int]:
    """(s, h) with the two non-1 entries at h and h + s (mod p), s minimal."""
    p = d.n
    i, j = _support(d)
    if j - i <= p - (j - i):
        return j - i, i
    return p - (j - i), j


def rho2_construction(group: GroupSet, start: MonomialMatrix | None = None) -> Rho2Construction:
    """Build Delta, Gamma and Omega = Gamma S Gamma^-1 S^-1 for a rho = 2 group.

    Delta is a diagonal element whose only non-1 entries are the first two.
    It is reached by repeatedly shrinking the gap between the two non-1
    entries of a weight-2 diagonal element (the finite induction of the
    rho = 2 argument).  ``start`` picks the initial weight-2 element; by
    default the one with the smallest gap is used.  For q > 2, Omega has rank(Omega - I) = p; for q = 2
    the alternating product Gamma' gives rank p - 1.
    """
    if not group.is_monomial():
        raise PreconditionError("rho2 witness needs a monomial group G(p, q, A)")
    p, q = group.n, group.root_order
    if p < 3:
        raise PreconditionError("rho2 witness needs p >= 3")
    s = cyclic_shift(p, q)
    if s not in group:
        raise PreconditionError("group does not contain the p-cycle S")
    weight2 = [x for x in group if x.is_diagonal() and x.rank_minus_identity() == 2]
    if not weight2 or any(
        x.is_diagonal() and x.rank_minus_identity() == 1 for x in group
    ):
        raise PreconditionError("group does not have rho = 2")

    def require(x: MonomialMatrix) -> MonomialMatrix:
        if x not in group:
            raise RuntimeError(f"constructed element {x} is not in the group")
        return x

    if start is None:
        best = min(weight2, key=lambda d: _gap(d)[0])
    else:
        best = require(start.lift(q) if start.order != q else start)
        if not best.is_diagonal() or best.rank_minus_identity() != 2:
            raise PreconditionError("start must be a diagonal element with two non-1 entries")
    descent = [best]
    while True:
        gap, h = _gap(best)
        d0 = require(_conj_shift(s, best, -h))
        if gap == 1:
            delta = d0
            break
        # Delta_{k+1} = S^{ks} D^{a^k} S^{-ks} Delta_k^{-1}
        e1, es = d0.exps[0], d0.exps[gap]
        a = es * pow(e1, -1, q) % q
        m_steps, t = divmod(p - 1, gap)
        dk = d0
        for k in range(1, m_steps):
            dk = require(_conj_shift(s, d0.power(pow(a, k, q)), k * gap) @ dk.inverse())
            if dk.rank_minus_identity() != 2:
                raise RuntimeError("descent step left the weight-2 diagonals")
        nxt = require(_conj_shift(s, dk, t + 1))
        if nxt.rank_minus_identity() != 2 or _gap(nxt)[0] >= gap:
            raise RuntimeError("gap descent failed to shrink the gap")
        best = nxt
        descent.append(best)

    w, wk = delta.exps[0], delta.exps[1]
    k = wk * pow(w, -1, q) % q
    delta_prime = None
    if q > 2:
        if k == 1:
            # Delta = diag(w, w, 1, ...) would force a rank-1 diagonal element
            rank1 = _conj_shift(s, delta, -1)
            for i in range(0, p - 1):
                rank1 = rank1 @ _conj_shift(s, delta.power((-1) ** i), i)
            raise RuntimeError(
                f"rho = 2 contradicted: {rank1} has rank(D - I) = {rank1.rank_minus_identity()}"
            )
        gamma = mono_identity(p, q)
        for j in range((p - 3) // 2 + 1):
            gamma = gamma @ _conj_shift(s, delta, 2 * j)
        claimed = p
    else:
        delta_prime = require(delta @ s @ delta @ s.inverse())
        u = (p + 1) // 4 if (p + 1) % 4 == 0 else (p - 1) // 4
        gamma = mono_identity(p, q)
        for j in range(u):
            gamma = gamma @ _conj_shift(s, delta_prime, 4 * j)
        claimed = p - 1
    gamma = require(gamma)
    omega = require(gamma @ s @ gamma.inverse() @ s.inverse())
    return Rho2Construction(delta, gamma, omega, delta_prime, claimed, descent)


def rho2_witness(group: GroupSet) -> tuple[MonomialMatrix, MonomialMatrix]:
    """(Gamma, Omega) for a rho = 2 group G(p, q, A), p >= 3."""
    c = rho2_construction(group)
    return c.gamma, c.omega

"""Monomial and dense matrices over Q(zeta_m), and the groups G(p, q, A).

A :class:`MonomialMatrix` with permutation ``perm`` and exponents ``exps``
has the entry ``zeta_m ** exps[j]`` in row ``perm[j]``, column ``j``.
Indices are 0-based throughout.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from . import linalg
from .cyclotomic import (
    CycNum,
    _power_table,
    as_cyc,
    common_order,
    euler_phi,
    parse_rational,
    root_of_unity,
)

__all__ = [
    "MatrixError",
    "MonomialMatrix",
    "DenseMatrix",
    "GroupWord",
    "is_prime",
    "make_gpqa_generators",
    "mono_mul",
    "mono_inv",
    "mono_dense",
    "mono_conj_transpose",
    "mono_identity",
    "cyclic_shift",
    "normalize_word",
    "dense_mul",
    "dense_sub",
    "dense_rank",
    "direct_sum",
    "matrix_from_json",
    "generators_from_json",
]

GroupWord = list[tuple[str, int]]


class MatrixError(ValueError):
    """Malformed matrix input or incompatible shapes/orders."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------------------
# Monomial matrices


class MonomialMatrix:
    __slots__ = ("perm", "exps", "order")

    def __init__(self, perm: Sequence[int], exps: Sequence[int], order: int) -> None:
        perm = tuple(int(x) for x in perm)
        if len(exps) != len(perm):
            raise MatrixError("perm and exps must have equal length")
        if sorted(perm) != list(range(len(perm))):
            raise MatrixError(f"perm {perm} is not a permutation of 0..{len(perm) - 1}")
        if order < 1:
            raise MatrixError(f"root order must be positive, got {order}")
        self.perm = perm
        self.exps = tuple(int(e) % order for e in exps)
        self.order = order

    @classmethod
    def _raw(cls, perm: tuple, exps: tuple, order: int) -> MonomialMatrix:
        obj = object.__new__(cls)
        obj.perm = perm
        obj.exps = exps
        obj.order = order
        return obj

    @property
    def n(self) -> int:
        return len(self.perm)

    def key(self) -> tuple:
        return (self.perm, self.exps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonomialMatrix):
            return NotImplemented
        if self.order != other.order:
            m = math.lcm(self.order, other.order)
            return self.lift(m).key() == other.lift(m).key()
        return self.perm == other.perm and self.exps == other.exps

    def __hash__(self) -> int:
        return hash(self.key())

    def __matmul__(self, other: MonomialMatrix) -> MonomialMatrix:
        return mono_mul(self, other)

    def lift(self, order: int) -> MonomialMatrix:
        if order == self.order:
            return self
        if order % self.order:
            raise MatrixError(f"cannot lift order {self.order} to {order}")
        k = order // self.order
        return MonomialMatrix._raw(self.perm, tuple(e * k for e in self.exps), order)

    def inverse(self) -> MonomialMatrix:
        return mono_inv(self)

    def conj_transpose(self) -> MonomialMatrix:
        return mono_conj_transpose(self)

    def dense(self) -> DenseMatrix:
        return mono_dense(self)

    def is_diagonal(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def is_identity(self) -> bool:
        return self.is_diagonal() and not any(self.exps)

    def is_scalar(self) -> bool:
        return self.is_diagonal() and len(set(self.exps)) == 1

    def power(self, k: int) -> MonomialMatrix:
        if k < 0:
            return self.inverse().power(-k)
        result = mono_identity(self.n, self.order)
        base = self
        while k:
            if k & 1:
                result = mono_mul(result, base)
            base = mono_mul(base, base)
            k >>= 1
        return result

    def det(self) -> CycNum:
        """sign(perm) * zeta^(sum exps)."""
        seen = [False] * self.n
        sign = 1
        for i in range(self.n):
            if not seen[i]:
                j, length = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = self.perm[j]
                    length += 1
                if length % 2 == 0:
                    sign = -sign
        return root_of_unity(sum(self.exps), self.order) * sign

    def rank_minus_identity(self) -> int:
        """rank(X - I), exactly, from the cycle decomposition.

        On a cycle of length L whose exponents sum to s, X - I has rank L
        when zeta^s != 1 and L - 1 otherwise.
        """
        seen = [False] * self.n
        total = 0
        m = self.order
        for i in range(self.n):
            if seen[i]:
                continue
            j, length, s = i, 0, 0
            while not seen[j]:
                seen[j] = True
                s += self.exps[j]
                j = self.perm[j]
                length += 1
            total += length - (1 if s % m == 0 else 0)
        return total

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "kind": "monomial",
            "perm": list(self.perm),
            "exps": list(self.exps),
        }

    def __repr__(self) -> str:
        return f"MonomialMatrix(perm={list(self.perm)}, exps={list(self.exps)}, order={self.order})"


def mono_identity(n: int, order: int = 1) -> MonomialMatrix:
    return MonomialMatrix._raw(tuple(range(n)), (0,) * n, order)


def _check_compatible(x, y) -> None:
    if x.n != y.n:
        raise MatrixError(f"dimension mismatch: {x.n} vs {y.n}")


def mono_mul(x: MonomialMatrix, y: MonomialMatrix) -> MonomialMatrix:
    """Product XY: perm = perm_X o perm_Y, exps_j = e_Y(j) + e_X(perm_Y(j))."""
    if x.order != y.order:
        _check_compatible(x, y)
        m = math.lcm(x.order, y.order)
        x, y = x.lift(m), y.lift(m)
    xp, xe, m = x.perm, x.exps, x.order
    yp, ye = y.perm, y.exps
    if len(xp) != len(yp):
        raise MatrixError(f"dimension mismatch: {len(xp)} vs {len(yp)}")
    return MonomialMatrix._raw(
        tuple(xp[k] for k in yp),
        tuple((e + xe[k]) % m for e, k in zip(ye, yp)),
        m,
    )


def mono_inv(x: MonomialMatrix) -> MonomialMatrix:
    n, m = x.n, x.order
    perm = [0] * n
    exps = [0] * n
    for j, i in enumerate(x.perm):
        perm[i] = j
        exps[i] = (-x.exps[j]) % m
    return MonomialMatrix._raw(tuple(perm), tuple(exps), m)


def mono_conj_transpose(x: MonomialMatrix) -> MonomialMatrix:
    # entry zeta^e at (perm[j], j) becomes conj(zeta^e) at (j, perm[j])
    n, m = x.n, x.order
    entries = {}
    for j, i in enumerate(x.perm):
        entries[(j, i)] = (m - x.exps[j]) % m
    perm = [0] * n
    exps = [0] * n
    for (row, col), e in entries.items():
        perm[col] = row
        exps[col] = e
    return MonomialMatrix._raw(tuple(perm), tuple(exps), m)


def mono_dense(x: MonomialMatrix) -> DenseMatrix:
    n, m = x.n, x.order
    zero = CycNum.zero(m)
    rows = [[zero] * n for _ in range(n)]
    for j, i in enumerate(x.perm):
        rows[i][j] = root_of_unity(x.exps[j], m)
    return DenseMatrix(rows, order=m)


def cyclic_shift(p: int, order: int = 1) -> MonomialMatrix:
    """The p-cycle S with S e_j = e_{j+1 mod p}."""
    return MonomialMatrix._raw(tuple((j + 1) % p for j in range(p)), (0,) * p, order)


def make_gpqa_generators(p: int, q: int, a_exps: Sequence[int]) -> tuple[MonomialMatrix, MonomialMatrix]:
    """Generators (S, A) of G(p, q, A); A = diag(zeta_q^a_1, ..., zeta_q^a_p)."""
    if not is_prime(p):
        raise MatrixError(f"p = {p} is not prime")
    if not is_prime(q):
        raise MatrixError(f"q = {q} is not prime")
    if len(a_exps) != p:
        raise MatrixError(f"A needs {p} exponents, got {len(a_exps)}")
    exps = tuple(int(a) % q for a in a_exps)
    if len(set(exps)) == 1:
        raise MatrixError(f"A = diag{exps} is a scalar matrix")
    return cyclic_shift(p, q), MonomialMatrix._raw(tuple(range(p)), exps, q)


def normalize_word(
    word: GroupWord, s: MonomialMatrix, a: MonomialMatrix
) -> tuple[MonomialMatrix, int]:
    """Rewrite A^a1 S^b1 A^a2 ... as D S^gamma with D diagonal.

    Each A-power is conjugated past the S-powers collected so far, so D is
    the product of the diagonal matrices S^B A^alpha S^-B.
    """
    p = s.n
    d = mono_identity(p, math.lcm(s.order, a.order))
    shift = 0
    for gen, k in word:
        if gen == "S":
            shift += k
        elif gen == "A":
            sb = s.power(shift % p)
            d = mono_mul(d, mono_mul(mono_mul(sb, a.power(k)), mono_inv(sb)))
        else:
            raise MatrixError(f"unknown generator {gen!r}; expected 'A' or 'S'")
    if not d.is_diagonal():
        raise MatrixError("conjugates of A by S are not diagonal")
    return d, shift % p


# ---------------------------------------------------------------------------
# Dense matrices


@lru_cache(maxsize=None)
def _mult_tensor(m: int) -> np.ndarray:
    # W[s, t] = zeta^(s+t) reduced, so (a*b)_u = sum_{s,t} a_s b_t W[s,t,u]
    phi = euler_phi(m)
    table = _power_table(m)
    w = np.zeros((phi, phi, phi), dtype=np.int64)
    for s in range(phi):
        for t in range(phi):
            w[s, t] = table[s + t]
    return w


@lru_cache(maxsize=None)
def _conj_matrix(m: int) -> np.ndarray:
    phi = euler_phi(m)
    table = _power_table(m)
    return np.array([table[(-k) % m] for k in range(phi)], dtype=np.int64)


@lru_cache(maxsize=None)
def _lift_matrix(m: int, big: int) -> np.ndarray:
    table = _power_table(big)
    stride = big // m
    return np.array([table[(k * stride) % big] for k in range(euler_phi(m))], dtype=np.int64)


_SAFE = 2**62


def _as_int_array(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object and arr.size:
        big = max(abs(int(x)) for x in arr.flat)
        if big < _SAFE:
            return arr.astype(np.int64)
    return arr


def _bound(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return int(np.max(np.abs(arr))) if arr.dtype != object else max(abs(int(x)) for x in arr.flat)


def _normalize(den: int, num: np.ndarray) -> tuple[int, np.ndarray]:
    if num.size == 0:
        return 1, num
    if num.dtype == object:
        g = 0
        for x in num.flat:
            g = math.gcd(g, int(x))
    else:
        g = int(np.gcd.reduce(num.ravel()))
    g = math.gcd(g, den)
    if g > 1:
        den //= g
        num = num // g
    return den, _as_int_array(num)


class DenseMatrix:
    """Square matrix over Q(zeta_order).

    Stored as an integer coefficient tensor ``num`` of shape (n, n, phi)
    with a common positive denominator ``den``; entry (i, j) is
    ``sum_k num[i, j, k] / den * zeta^k`` reduced modulo Phi_order.
    """

    __slots__ = ("n", "order", "den", "num", "_key")

    def __init__(self, entries, order: int | None = None) -> None:
        rows = [list(r) for r in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MatrixError("dense matrix must be square")
        values = [[x if isinstance(x, CycNum) else CycNum.rational(x) for x in r] for r in rows]
        m = common_order(x for r in values for x in r)
        if order is not None:
            m = math.lcm(m, order)
        phi = euler_phi(m)
        lifted = [[as_cyc(x, m) for x in r] for r in values]
        den = 1
        for r in lifted:
            for x in r:
                for c in x.coeffs:
                    den = math.lcm(den, int(c.denominator))
        num = np.zeros((n, n, phi), dtype=object)
        for i, r in enumerate(lifted):
            for j, x in enumerate(r):
                for k, c in enumerate(x.coeffs):
                    num[i, j, k] = int(c * den)
        self.n = n
        self.order = m
        self.den, self.num = _normalize(den, num)
        self._key = None

    @classmethod
    def _from_parts(cls, order: int, den: int, num: np.ndarray) -> DenseMatrix:
        obj = object.__new__(cls)
        obj.n = num.shape[0]
        obj.order = order
        obj.den, obj.num = _normalize(den, num)
        obj._key = None
        return obj

    @classmethod
    def identity(cls, n: int, order: int = 1) -> DenseMatrix:
        num = np.zeros((n, n, euler_phi(order)), dtype=np.int64)
        for i in range(n):
            num[i, i, 0] = 1
        return cls._from_parts(order, 1, num)

    @classmethod
    def zeros(cls, n: int, order: int = 1) -> DenseMatrix:
        return cls._from_parts(order, 1, np.zeros((n, n, euler_phi(order)), dtype=np.int64))

    # -- access --------------------------------------------------------------

    def entry(self, i: int, j: int) -> CycNum:
        d = self.den
        return CycNum._raw(self.order, tuple(mpq(int(x), d) for x in self.num[i, j]))

    def rows(self) -> list[list[CycNum]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def column(self, j: int) -> list[CycNum]:
        return [self.entry(i, j) for i in range(self.n)]

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.order, self.den, tuple(int(x) for x in self.num.flat))
        return self._key

    def __eq__(self, other) -> bool:
        if isinstance(other, MonomialMatrix):
            other = other.dense()
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if other.order != self.order:
            m = math.lcm(self.order, other.order)
            return self.lift(m).key() == other.lift(m).key()
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"DenseMatrix({self.rows()!r})"

    # -- arithmetic ----------------------------------------------------------

    def lift(self, order: int) -> DenseMatrix:
        if order == self.order:
            return self
        if order % self.order:
            raise MatrixError(f"cannot lift order {self.order} to {order}")
        lm = _lift_matrix(self.order, order)
        num = self.num.astype(object) if _bound(self.num) * len(lm) >= _SAFE else self.num
        return DenseMatrix._from_parts(order, self.den, np.einsum("ijk,kl->ijl", num, lm))

    def _aligned(self, other: DenseMatrix) -> tuple[DenseMatrix, DenseMatrix]:
        if not isinstance(other, DenseMatrix):
            raise MatrixError(f"expected DenseMatrix, got {type(other).__name__}")
        if other.n != self.n:
            raise MatrixError(f"dimension mismatch: {self.n} vs {other.n}")
        if other.order == self.order:
            return self, other
        m = math.lcm(self.order, other.order)
        return self.lift(m), other.lift(m)

    def __matmul__(self, other: DenseMatrix) -> DenseMatrix:
        if isinstance(other, MonomialMatrix):
            other = other.dense()
        a, b = self._aligned(other)
        w = _mult_tensor(a.order)
        phi = w.shape[0]
        an, bn = a.num, b.num
        if _bound(an) * _bound(bn) * a.n * phi * phi * max(1, _bound(w)) >= _SAFE:
            an, bn, w = an.astype(object), bn.astype(object), w.astype(object)
        conv = np.einsum("ijs,jkt->ikst", an, bn)
        num = np.einsum("ikst,stu->iku", conv, w)
        return DenseMatrix._from_parts(a.order, a.den * b.den, num)

    def _combine(self, other: DenseMatrix, sign: int) -> DenseMatrix:
        if isinstance(other, MonomialMatrix):
            other = other.dense()
        a, b = self._aligned(other)
        den = math.lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        an, bn = a.num, b.num
        if (_bound(an) * fa + _bound(bn) * fb) >= _SAFE:
            an, bn = an.astype(object), bn.astype(object)
        return DenseMatrix._from_parts(a.order, den, an * fa + sign * (bn * fb))

    def __add__(self, other: DenseMatrix) -> DenseMatrix:
        return self._combine(other, 1)

    def __sub__(self, other: DenseMatrix) -> DenseMatrix:
        return self._combine(other, -1)

    def __neg__(self) -> DenseMatrix:
        return DenseMatrix._from_parts(self.order, self.den, -self.num)

    def scale(self, c) -> DenseMatrix:
        """Multiply every entry by the scalar ``c`` (rational or CycNum)."""
        if not isinstance(c, CycNum):
            c = CycNum.rational(parse_rational(c))
        m = math.lcm(self.order, c.order)
        diag = DenseMatrix([[c if i == j else 0 for j in range(self.n)] for i in range(self.n)], order=m)
        return diag @ self.lift(m)

    def conj_transpose(self) -> DenseMatrix:
        cm = _conj_matrix(self.order)
        num = self.num.astype(object) if _bound(self.num) * len(cm) >= _SAFE else self.num
        return DenseMatrix._from_parts(self.order, self.den, np.einsum("ijk,kl->jil", num, cm))

    def transpose(self) -> DenseMatrix:
        return DenseMatrix._from_parts(self.order, self.den, self.num.transpose(1, 0, 2).copy())

    def is_identity(self) -> bool:
        return self == DenseMatrix.identity(self.n, self.order)

    def is_zero(self) -> bool:
        return not self.num.any()

    def is_unitary(self) -> bool:
        return (self @ self.conj_transpose()).is_identity()

    def inverse(self) -> DenseMatrix:
        """Conjugate transpose when unitary, Gauss-Jordan otherwise."""
        ct = self.conj_transpose()
        if (self @ ct).is_identity():
            return ct
        n = self.n
        m = self.order
        one, zero = CycNum.one(m), CycNum.zero(m)
        aug = [row + [one if i == j else zero for j in range(n)] for i, row in enumerate(self.rows())]
        reduced, pivots = linalg.rref(aug, n)
        if pivots != list(range(n)):
            raise MatrixError("matrix is singular")
        return DenseMatrix([r[n:] for r in reduced], order=m)

    def rank(self) -> int:
        return linalg.rank(self.rows())

    def apply(self, vec: Sequence) -> list[CycNum]:
        """Matrix-vector product with an exact vector."""
        m = math.lcm(self.order, common_order(vec))
        mat = self.lift(m)
        rows = mat.rows()
        vec = [as_cyc(x, m) for x in vec]
        zero = CycNum.zero(m)
        out = []
        for r in rows:
            acc = zero
            for a, b in zip(r, vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def is_diagonal(self) -> bool:
        mask = ~np.eye(self.n, dtype=bool)
        return not self.num[mask].any()

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "kind": "dense",
            "entries": [[x.to_json() for x in r] for r in self.rows()],
        }


def dense_mul(x: DenseMatrix, y: DenseMatrix) -> DenseMatrix:
    return x @ y


def dense_sub(x: DenseMatrix, y: DenseMatrix) -> DenseMatrix:
    return x - y


def dense_rank(x: DenseMatrix) -> int:
    return x.rank()


def direct_sum(x, y):
    """Block-diagonal matrix x (+) y; monomial when both blocks are."""
    m = math.lcm(x.order, y.order)
    if isinstance(x, MonomialMatrix) and isinstance(y, MonomialMatrix):
        x, y = x.lift(m), y.lift(m)
        perm = x.perm + tuple(i + x.n for i in y.perm)
        return MonomialMatrix._raw(perm, x.exps + y.exps, m)
    xd = (x.dense() if isinstance(x, MonomialMatrix) else x).lift(m)
    yd = (y.dense() if isinstance(y, MonomialMatrix) else y).lift(m)
    n = xd.n + yd.n
    zero = CycNum.zero(m)
    rows = [[zero] * n for _ in range(n)]
    for i, r in enumerate(xd.rows()):
        rows[i][: xd.n] = r
    for i, r in enumerate(yd.rows()):
        rows[xd.n + i][xd.n :] = r
    return DenseMatrix(rows, order=m)


def matrix_from_json(data) -> MonomialMatrix | DenseMatrix:
    """Parse one matrix object in the file schema (monomial or dense)."""
    if not isinstance(data, dict):
        raise MatrixError(f"matrix must be a JSON object, got {type(data).__name__}")
    kind = data.get("kind", "dense" if "entries" in data else "monomial")
    order = data.get("order")
    try:
        order = None if order is None else int(order)
        if kind == "monomial":
            if "perm" not in data or "exps" not in data:
                raise MatrixError("monomial matrix needs 'perm' and 'exps'")
            x = MonomialMatrix(data["perm"], data["exps"], order or 1)
        elif kind == "dense":
            entries = data.get("entries")
            if not isinstance(entries, list) or not entries:
                raise MatrixError("dense matrix needs a nonempty 'entries' list")
            rows = [[CycNum.from_json(v) for v in r] for r in entries]
            x = DenseMatrix(rows, order=order)
        else:
            raise MatrixError(f"unknown matrix kind {kind!r}")
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, MatrixError):
            raise
        raise MatrixError(f"bad matrix entry: {exc}") from exc
    if "n" in data and int(data["n"]) != x.n:
        raise MatrixError(f"declared n = {data['n']} but matrix has size {x.n}")
    return x


def generators_from_json(data) -> list:
    """A list of matrices, or an object with a 'generators' list."""
    if isinstance(data, dict):
        if "generators" not in data:
            return [matrix_from_json(data)]
        data = data["generators"]
    if not isinstance(data, list) or not data:
        raise MatrixError("expected a nonempty list of generator matrices")
    gens = [matrix_from_json(d) for d in data]
    if len({g.n for g in gens}) != 1:
        raise MatrixError("generators have different sizes")
    return gens

"""Exact arithmetic in the cyclotomic fields Q(zeta_m).

A :class:`CycNum` stores the remainder of its polynomial representative
modulo the m-th cyclotomic polynomial, so equality and the zero test are
plain coefficient comparisons.  Rationals are ``gmpy2.mpq``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq

__all__ = [
    "CycNum",
    "CycDivisionError",
    "cyclotomic_poly",
    "euler_phi",
    "root_of_unity",
    "is_zero",
    "as_cyc",
    "common_order",
    "parse_rational",
]

_ZERO = mpq(0)
_ONE = mpq(1)


class CycDivisionError(ZeroDivisionError):
    """Raised on inversion of (or division by) an exact zero."""


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # integer polynomials, low-order first; den must be monic
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    rem = num[:dd] or [0]
    return quot, rem


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise ValueError(f"root order must be positive, got {m}")
    prod = [1]
    for d in range(1, m):
        if m % d == 0:
            prod = _poly_mul(prod, list(cyclotomic_poly(d)))
    xm1 = [-1] + [0] * (m - 1) + [1]
    quot, rem = _poly_divmod(xm1, prod)
    assert not any(rem)
    return tuple(quot)


def euler_phi(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Rows are x^k mod Phi_m for k = 0 .. max(m, 2*phi) - 1."""
    phi_poly = cyclotomic_poly(m)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(max(m, 2 * deg)):
        rows.append(tuple(cur))
        # multiply by x and reduce the overflow coefficient
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi_poly[j]
    return tuple(rows)


def _mobius(n: int) -> int:
    result = 1
    k = 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    if n > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def _normalized_traces(m: int) -> tuple[mpq, ...]:
    # Tr(zeta^k)/phi(m) via Ramanujan sums; invariant under lifting the order
    phi = euler_phi(m)
    out = []
    for k in range(phi):
        g = math.gcd(k, m)
        c = sum(_mobius(m // d) * d for d in range(1, g + 1) if g % d == 0)
        out.append(mpq(c, phi))
    return tuple(out)


def parse_rational(value) -> mpq:
    """Accept int, mpq, Fraction or a ``"num/den"`` string."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return mpq(value)
    if isinstance(value, str):
        return mpq(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class CycNum:
    """An element of Q(zeta_m) in canonical reduced power-basis form."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs=(0,), order: int = 1) -> None:
        if order < 1:
            raise ValueError(f"root order must be positive, got {order}")
        table = _power_table(order)
        phi = euler_phi(order)
        acc = [_ZERO] * phi
        for k, c in enumerate(coeffs):
            c = parse_rational(c)
            if not c:
                continue
            row = table[k % order]
            for j in range(phi):
                if row[j]:
                    acc[j] += c * row[j]
        self.order = order
        self.coeffs = tuple(acc)

    @classmethod
    def _raw(cls, order: int, coeffs: tuple) -> CycNum:
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, order: int = 1) -> CycNum:
        return cls._raw(order, (_ZERO,) * euler_phi(order))

    @classmethod
    def one(cls, order: int = 1) -> CycNum:
        return cls._raw(order, (_ONE,) + (_ZERO,) * (euler_phi(order) - 1))

    @classmethod
    def rational(cls, value, order: int = 1) -> CycNum:
        v = parse_rational(value)
        return cls._raw(order, (v,) + (_ZERO,) * (euler_phi(order) - 1))

    # -- order handling ----------------------------------------------------

    def lift(self, order: int) -> CycNum:
        """Re-express in Q(zeta_order); ``order`` must be a multiple of ours."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"cannot lift order {self.order} to {order}")
        stride = order // self.order
        table = _power_table(order)
        phi = euler_phi(order)
        acc = [_ZERO] * phi
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(k * stride) % order]
                for j in range(phi):
                    if row[j]:
                        acc[j] += c * row[j]
        return CycNum._raw(order, tuple(acc))

    def _pair(self, other) -> tuple[CycNum, CycNum]:
        if not isinstance(other, CycNum):
            other = CycNum.rational(other, self.order)
            return self, other
        if other.order == self.order:
            return self, other
        m = math.lcm(self.order, other.order)
        return self.lift(m), other.lift(m)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> CycNum:
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return CycNum._raw(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum._raw(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other) -> CycNum:
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return CycNum._raw(a.order, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other) -> CycNum:
        return (-self) + other

    def __mul__(self, other) -> CycNum:
        if not isinstance(other, CycNum):
            try:
                s = parse_rational(other)
            except TypeError:
                return NotImplemented
            return CycNum._raw(self.order, tuple(x * s for x in self.coeffs))
        a, b = self._pair(other)
        ac, bc = a.coeffs, b.coeffs
        phi = len(ac)
        if phi == 1:
            return CycNum._raw(a.order, (ac[0] * bc[0],))
        conv = [_ZERO] * (2 * phi - 1)
        for i, x in enumerate(ac):
            if x:
                for j, y in enumerate(bc):
                    if y:
                        conv[i + j] += x * y
        return CycNum._raw(a.order, _reduce_conv(a.order, conv))

    __rmul__ = __mul__

    def __truediv__(self, other) -> CycNum:
        if not isinstance(other, CycNum):
            try:
                s = parse_rational(other)
            except TypeError:
                return NotImplemented
            if not s:
                raise CycDivisionError("division by exact zero")
            return CycNum._raw(self.order, tuple(x / s for x in self.coeffs))
        return self * other.inv()

    def __rtruediv__(self, other) -> CycNum:
        return CycNum.rational(other, self.order) * self.inv()

    def __pow__(self, k: int) -> CycNum:
        if k < 0:
            return self.inv() ** (-k)
        result = CycNum.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> CycNum:
        """Complex conjugate: zeta^k -> zeta^(m-k)."""
        m = self.order
        if euler_phi(m) == 1:
            return self
        table = _power_table(m)
        phi = len(self.coeffs)
        acc = [_ZERO] * phi
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(-k) % m]
                for j in range(phi):
                    if row[j]:
                        acc[j] += c * row[j]
        return CycNum._raw(m, tuple(acc))

    def inv(self) -> CycNum:
        if self.is_zero():
            raise CycDivisionError("inverse of exact zero")
        phi = len(self.coeffs)
        if phi == 1:
            return CycNum._raw(self.order, (1 / self.coeffs[0],))
        c = self.conj()
        prod = self * c
        if prod.is_rational():
            # covers every root of unity (z * conj(z) == 1)
            return c / prod.coeffs[0]
        return CycNum._raw(self.order, _solve_inverse(self))

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycNum):
            try:
                other = CycNum.rational(other, self.order)
            except TypeError:
                return NotImplemented
        if other.order == self.order:
            return self.coeffs == other.coeffs
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        tr = _normalized_traces(self.order)
        return hash(sum((c * t for c, t in zip(self.coeffs, tr)), _ZERO))

    # -- conversion --------------------------------------------------------

    def to_complex(self) -> complex:
        """Floating image under zeta_m -> exp(2 pi i / m); test oracle only."""
        z = complex(math.cos(2 * math.pi / self.order), math.sin(2 * math.pi / self.order))
        return sum((float(c) * z**k for k, c in enumerate(self.coeffs)), 0j)

    def to_json(self) -> list[str]:
        """``m`` strings ``"num/den"`` for zeta^0 .. zeta^(m-1)."""
        padded = list(self.coeffs) + [_ZERO] * (self.order - len(self.coeffs))
        return [f"{c.numerator}/{c.denominator}" for c in padded]

    @classmethod
    def from_json(cls, data, order: int | None = None) -> CycNum:
        if isinstance(data, dict):
            if "root" not in data or "order" not in data:
                raise ValueError(f"bad root-of-unity object {data!r}")
            z = root_of_unity(int(data["root"]), int(data["order"]))
        elif isinstance(data, list):
            if not data:
                raise ValueError("empty coefficient list")
            z = cls(data, len(data))
        else:
            z = cls.rational(data)
        if order is not None:
            z = z.lift(math.lcm(order, z.order))
        return z

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                terms.append(f"{coef}z{self.order}^{k}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def __repr__(self) -> str:
        return f"CycNum({self})"


def _reduce_conv(m: int, conv: list) -> tuple:
    phi = euler_phi(m)
    out = conv[:phi]
    table = _power_table(m)
    for k in range(phi, len(conv)):
        c = conv[k]
        if c:
            row = table[k]
            for j in range(phi):
                if row[j]:
                    out[j] += c * row[j]
    return tuple(out)


def _solve_inverse(z: CycNum) -> tuple:
    # columns of the multiplication-by-z matrix are z * zeta^j
    m = z.order
    phi = len(z.coeffs)
    cols = [(z * root_of_unity(j, m)).coeffs for j in range(phi)]
    aug = [[cols[j][i] for j in range(phi)] + [_ONE if i == 0 else _ZERO] for i in range(phi)]
    for c in range(phi):
        piv = next(r for r in range(c, phi) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(phi):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(aug[i][phi] for i in range(phi))


@lru_cache(maxsize=4096)
def root_of_unity(k: int, m: int) -> CycNum:
    """zeta_m^k in canonical form (k is taken mod m)."""
    if m < 1:
        raise ValueError(f"root order must be positive, got {m}")
    return CycNum._raw(m, tuple(mpq(x) for x in _power_table(m)[k % m]))


def is_zero(z: CycNum) -> bool:
    return z.is_zero()


def as_cyc(value, order: int = 1) -> CycNum:
    if isinstance(value, CycNum):
        if value.order == order:
            return value
        return value.lift(math.lcm(order, value.order))
    return CycNum.rational(value, order)


def common_order(values) -> int:
    m = 1
    for v in values:
        if isinstance(v, CycNum):
            m = math.lcm(m, v.order)
    return m


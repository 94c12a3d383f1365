"""Exact arithmetic in the cyclotomic fields Q(zeta_m), m in {1,2,3,4,6,8,12}.

Elements are stored reduced modulo the m-th cyclotomic polynomial, so equality
is plain data comparison.  The sign of a nonzero element of the real subfield
is decided by interval evaluation at increasing precision; exact zero is
detected first from the canonical form, so the loop always terminates.
"""

from __future__ import annotations

import functools
from fractions import Fraction

import mpmath

from .errors import ConductorMismatchError, NotRealError

try:  # gmpy2 rationals are several times faster; Fraction is the fallback
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

SUPPORTED_CONDUCTORS = (1, 2, 3, 4, 6, 8, 12)

# m-th cyclotomic polynomial, ascending coefficients, monic.
_CYCLOTOMIC = {
    1: (-1, 1),
    2: (1, 1),
    3: (1, 1, 1),
    4: (1, 0, 1),
    6: (1, -1, 1),
    8: (1, 0, 0, 0, 1),
    12: (1, 0, -1, 0, 1),
}

_ZERO = _Q(0)
_ONE = _Q(1)


def _coerce_scalar(value):
    if type(value) is _Q:
        return value
    if isinstance(value, Fraction):
        return _Q(value.numerator, value.denominator)
    if isinstance(value, int):
        return _Q(value)
    if isinstance(value, str):
        return _Q(Fraction(value))
    return _Q(value)


@functools.lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """zeta_m^k expressed in the basis 1..zeta^(d-1), for k up to max(m-1, 2d-2)."""
    phi = _CYCLOTOMIC[m]
    d = len(phi) - 1
    # x^d = -(phi_0 + phi_1 x + ... + phi_{d-1} x^{d-1})
    top = tuple(_Q(-c) for c in phi[:d])
    table = []
    row = [_ZERO] * d
    row[0] = _ONE
    table.append(tuple(row))
    for _ in range(max(m - 1, 2 * d - 2)):
        prev = table[-1]
        row = [_ZERO] * d
        for i in range(d - 1):
            row[i + 1] = prev[i]
        lead = prev[d - 1]
        if lead:
            row = [row[i] + lead * top[i] for i in range(d)]
        table.append(tuple(row))
    return tuple(table)


def _degree(m: int) -> int:
    return len(_CYCLOTOMIC[m]) - 1


def _reduce(m: int, coeffs) -> tuple[Fraction, ...]:
    """Reduce a coefficient list in powers of zeta_m to the canonical basis."""
    table = _power_table(m)
    d = _degree(m)
    out = [_ZERO] * d
    for k, c in enumerate(coeffs):
        if not c:
            continue
        row = table[k] if k < len(table) else table[k % m]
        for i in range(d):
            if row[i]:
                out[i] += c * row[i]
    return tuple(out)


class CycNum:
    """An element of Q(zeta_m) in canonical reduced form."""

    __slots__ = ("m", "_c", "_hash", "_conj")

    def __init__(self, m: int, coeffs, reduce: bool = True):
        if m not in _CYCLOTOMIC:
            raise ConductorMismatchError(f"unsupported conductor {m}")
        self.m = m
        cs = [c if type(c) is _Q else _coerce_scalar(c) for c in coeffs]
        if reduce or len(cs) != _degree(m):
            self._c = _reduce(m, cs)
        else:
            self._c = tuple(cs)
        self._hash = None
        self._conj = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, m: int, value) -> CycNum:
        return cls(m, (_coerce_scalar(value),), reduce=True)

    @classmethod
    def zeta(cls, m: int, power: int = 1) -> CycNum:
        table = _power_table(m)
        return cls(m, table[power % m], reduce=False)

    # -- canonical data ----------------------------------------------------

    @property
    def reduced(self) -> tuple:
        return self._c

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Length-m coefficient vector in the power basis (canonical form padded)."""
        padded = self._c + (_ZERO,) * (self.m - len(self._c))
        return tuple(Fraction(int(c.numerator), int(c.denominator)) for c in padded)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self._c)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self._c[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise NotRealError(f"{self!r} is not rational")
        c = self._c[0]
        return Fraction(int(c.numerator), int(c.denominator))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.m, self._c))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(self.m, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.m == other.m and self._c == other._c

    def __repr__(self):
        terms = [f"{c}*z^{k}" for k, c in enumerate(self._c) if c]
        return f"CycNum({self.m}; {' + '.join(terms) or '0'})"

    # -- field operations --------------------------------------------------

    def _coerce(self, other) -> CycNum:
        if isinstance(other, CycNum):
            if other.m != self.m:
                raise ConductorMismatchError(f"conductor {self.m} vs {other.m}")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is _Q:
            return CycNum.rational(self.m, other)
        raise TypeError(f"cannot coerce {type(other).__name__} to CycNum")

    def __add__(self, other):
        o = self._coerce(other)
        return CycNum(self.m, tuple(a + b for a, b in zip(self._c, o._c)), reduce=False)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.m, tuple(-a for a in self._c), reduce=False)

    def __sub__(self, other):
        o = self._coerce(other)
        return CycNum(self.m, tuple(a - b for a, b in zip(self._c, o._c)), reduce=False)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        a, b = self._c, o._c
        # scalar fast paths: no convolution or reduction needed
        if o.is_rational():
            s = b[0]
            return CycNum(self.m, tuple(x * s for x in a), reduce=False)
        if self.is_rational():
            s = a[0]
            return CycNum(self.m, tuple(x * s for x in b), reduce=False)
        d = len(a)
        conv = [_ZERO] * (2 * d - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] += ai * bj
        return CycNum(self.m, conv)

    __rmul__ = __mul__

    def inv(self) -> CycNum:
        """Field inverse via the extended Euclidean algorithm mod Phi_m."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycNum.rational(self.m, 1 / self._c[0])
        phi = [_Q(c) for c in _CYCLOTOMIC[self.m]]
        a = list(self._c)
        # extended gcd of a and phi in Q[x]; gcd is a nonzero constant.
        r0, r1 = phi, _trim(a)
        s0, s1 = [_ZERO], [_ONE]
        # invariant: s_k * a == r_k  (mod phi)
        while _poly_deg(r1) > 0:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if _poly_deg(r1) != 0 or not r1[0]:
            raise ZeroDivisionError("element is not invertible")
        c = r1[0]
        return CycNum(self.m, [x / c for x in s1])

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = CycNum.rational(self.m, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> CycNum:
        """Complex conjugation, zeta -> zeta^(-1)."""
        if self._conj is not None:
            return self._conj
        if self.is_rational():
            self._conj = self
            return self
        m = self.m
        coeffs = [_ZERO] * m
        for k, c in enumerate(self._c):
            coeffs[(m - k) % m] += c
        out = CycNum(m, coeffs)
        out._conj = self
        self._conj = out
        return out

    def is_real(self) -> bool:
        return self == self.conj()


def _trim(p):
    while len(p) > 1 and not p[-1]:
        p = p[:-1]
    return list(p)


def _poly_deg(p):
    return len(_trim(p)) - 1


def _poly_sub(p, q):
    n = max(len(p), len(q))
    p = list(p) + [_ZERO] * (n - len(p))
    q = list(q) + [_ZERO] * (n - len(q))
    return _trim([a - b for a, b in zip(p, q)])


def _poly_mul(p, q):
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] += a * b
    return _trim(out)


def _poly_divmod(p, q):
    p = _trim(p)
    q = _trim(q)
    quot = [_ZERO] * max(1, len(p) - len(q) + 1)
    rem = list(p)
    dq = len(q) - 1
    while len(rem) - 1 >= dq and any(rem):
        rem = _trim(rem)
        if len(rem) - 1 < dq:
            break
        k = len(rem) - 1 - dq
        c = rem[-1] / q[-1]
        quot[k] = c
        for i in range(len(q)):
            rem[k + i] -= c * q[i]
        rem = rem[:-1]
    return _trim(quot), _trim(rem)


# -- sign determination ----------------------------------------------------

_MAX_PREC = 1 << 16


@functools.lru_cache(maxsize=None)
def _cos_interval(prec: int, m: int, k: int):
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        val = mpmath.iv.cos(2 * mpmath.iv.pi * k / m)
    finally:
        mpmath.iv.prec = old
    return val


def _interval_value(x: CycNum, prec: int):
    """Enclosing interval of the real number x = sum c_k cos(2 pi k / m)."""
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        total = mpmath.iv.mpf(0)
        for k, c in enumerate(x.reduced):
            if c:
                term = _cos_interval(prec, x.m, k) * mpmath.iv.mpf(int(c.numerator))
                total += term / int(c.denominator)
    finally:
        mpmath.iv.prec = old
    return total


@functools.lru_cache(maxsize=1 << 14)
def _sign_cached(x: CycNum) -> int:
    prec = 64
    while prec <= _MAX_PREC:
        box = _interval_value(x, prec)
        if box.a > 0:
            return 1
        if box.b < 0:
            return -1
        prec *= 2
    raise ArithmeticError(f"sign of {x!r} undecided at {_MAX_PREC} bits")


def sign_real(x: CycNum) -> int:
    """Exact sign of an element of the real subfield: -1, 0 or +1."""
    if not x.is_real():
        raise NotRealError(f"{x!r} is not fixed by conjugation")
    if x.is_zero():
        return 0
    if x.is_rational():
        c = x.as_rational()
        return 1 if c > 0 else -1
    return _sign_cached(x)


def is_positive(x: CycNum) -> bool:
    return sign_real(x) > 0


def is_nonnegative(x: CycNum) -> bool:
    return sign_real(x) >= 0

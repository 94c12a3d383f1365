"""Points of C^n, similarity affine maps, polynomial maps and exact ball predicates.

All linear parts are required to satisfy A^H A = lambda * Id with lambda in the
real subfield, so the image of a ball is again a ball and every containment,
membership and disjointness question below is decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatchError, NotSimilarityError
from .field import CycNum, sign_real


def _as_cyc(m: int, value) -> CycNum:
    if isinstance(value, CycNum):
        return value
    return CycNum.rational(m, value)


@dataclass(frozen=True)
class Point:
    """A point of C^n with exact cyclotomic coordinates."""

    coords: tuple[CycNum, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def of(cls, m: int, *values) -> Point:
        return cls(tuple(_as_cyc(m, v) for v in values))

    @classmethod
    def origin(cls, m: int, dim: int) -> Point:
        zero = CycNum.rational(m, 0)
        return cls((zero,) * dim)

    def __sub__(self, other: Point) -> Point:
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __add__(self, other: Point) -> Point:
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def norm2(self) -> CycNum:
        """|p|^2 = sum z conj(z); an element of the real subfield."""
        if not self.coords:
            raise DimensionMismatchError("norm of a dimension-0 point")
        total = None
        for z in self.coords:
            t = z * z.conj()
            total = t if total is None else total + t
        return total


def dist2(p: Point, q: Point) -> CycNum:
    return (p - q).norm2()


class AffineMap:
    """z -> A z + b with A^H A = lambda * Id (an exact similarity)."""

    __slots__ = ("a", "b", "_factor", "_inv", "_hash")

    def __init__(self, a: tuple[tuple[CycNum, ...], ...], b: Point):
        n = b.dim
        if len(a) != n or any(len(row) != n for row in a):
            raise DimensionMismatchError("matrix shape does not match translation part")
        self.a = a
        self.b = b
        self._factor = self._check_similarity()
        self._inv = None
        self._hash = None

    def _check_similarity(self) -> CycNum:
        n = self.dim
        if n == 0:
            return None
        m = self.b.coords[0].m
        lam = None
        for i in range(n):
            for j in range(i, n):
                # (A^H A)_{ij} = sum_k conj(a_ki) a_kj
                entry = None
                for k in range(n):
                    t = self.a[k][i].conj() * self.a[k][j]
                    entry = t if entry is None else entry + t
                if i == j:
                    if lam is None:
                        lam = entry
                    elif entry != lam:
                        raise NotSimilarityError("diagonal of A^H A is not constant")
                elif not entry.is_zero():
                    raise NotSimilarityError("A^H A has a nonzero off-diagonal entry")
        if not lam.is_real() or sign_real(lam) < 0:
            raise NotSimilarityError("similarity factor is not a nonnegative real")
        return lam if not lam.is_zero() else CycNum.rational(m, 0)

    # -- basic data ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.b.dim

    @property
    def factor(self) -> CycNum:
        """lambda with A^H A = lambda * Id; None in dimension 0."""
        return self._factor

    def is_invertible(self) -> bool:
        return self.dim == 0 or not self._factor.is_zero()

    def is_identity(self) -> bool:
        if any(not c.is_zero() for c in self.b.coords):
            return False
        n = self.dim
        for i in range(n):
            for j in range(n):
                want = 1 if i == j else 0
                if self.a[i][j] != want:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, AffineMap):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.a, self.b.coords))
        return self._hash

    def __repr__(self):
        return f"AffineMap(a={self.a!r}, b={self.b!r})"

    # -- constructors -------------------------------------------------------

    @classmethod
    def _make(cls, a, b: Point, factor) -> AffineMap:
        """Trusted constructor for maps whose similarity factor is already
        known (composites and inverses of validated similarities)."""
        obj = cls.__new__(cls)
        obj.a = a
        obj.b = b
        obj._factor = factor
        obj._inv = None
        obj._hash = None
        return obj

    @classmethod
    def identity(cls, m: int, dim: int) -> AffineMap:
        one = CycNum.rational(m, 1)
        zero = CycNum.rational(m, 0)
        a = tuple(tuple(one if i == j else zero for j in range(dim)) for i in range(dim))
        return cls(a, Point.origin(m, dim))

    @classmethod
    def scaling(cls, m: int, dim: int, scalar) -> AffineMap:
        """z -> scalar * z (scalar a CycNum or rational)."""
        s = _as_cyc(m, scalar)
        zero = CycNum.rational(m, 0)
        a = tuple(tuple(s if i == j else zero for j in range(dim)) for i in range(dim))
        return cls(a, Point.origin(m, dim))

    @classmethod
    def translation(cls, m: int, b: Point) -> AffineMap:
        return cls.identity(m, b.dim).shift(b)

    def shift(self, b: Point) -> AffineMap:
        return AffineMap(self.a, self.b + b)

    # -- action and composition ----------------------------------------------

    def __call__(self, p: Point) -> Point:
        if p.dim != self.dim:
            raise DimensionMismatchError(f"point of dim {p.dim} under map of dim {self.dim}")
        out = []
        for i in range(self.dim):
            acc = self.b.coords[i]
            for j in range(self.dim):
                acc = acc + self.a[i][j] * p.coords[j]
            out.append(acc)
        return Point(tuple(out))

    def compose(self, other: AffineMap) -> AffineMap:
        """self after other: (self . other)(z) = self(other(z))."""
        if self.dim != other.dim:
            raise DimensionMismatchError("composition of maps of different dimensions")
        n = self.dim
        a = tuple(
            tuple(
                _sum(self.a[i][k] * other.a[k][j] for k in range(n))
                for j in range(n)
            )
            for i in range(n)
        )
        factor = None if n == 0 else self._factor * other._factor
        return AffineMap._make(a, self(other.b), factor)

    def inverse(self) -> AffineMap:
        """Exact inverse; uses A^{-1} = A^H / lambda for similarities."""
        if self.dim == 0:
            return self
        if self._inv is not None:
            return self._inv
        if not self.is_invertible():
            raise ZeroDivisionError("affine map with zero similarity factor")
        n = self.dim
        inv_lam = self._factor.inv()
        ainv = tuple(
            tuple(self.a[j][i].conj() * inv_lam for j in range(n)) for i in range(n)
        )
        partial = AffineMap._make(ainv, Point.origin(self.b.coords[0].m, n), inv_lam)
        mb = Point(tuple(-c for c in partial(self.b).coords))
        self._inv = AffineMap._make(ainv, mb, inv_lam)
        return self._inv


def _sum(items):
    total = None
    for x in items:
        total = x if total is None else total + x
    return total


# -- balls -------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    """Open ball with center in C^n and exact squared radius (real subfield)."""

    center: Point
    r2: CycNum

    @property
    def dim(self) -> int:
        return self.center.dim

    @classmethod
    def of(cls, m: int, center, r2) -> Ball:
        c = center if isinstance(center, Point) else Point.of(m, *center)
        return cls(c, _as_cyc(m, r2))


def point_in_ball(p: Point, ball: Ball) -> bool:
    if ball.dim == 0:
        return True
    return sign_real(ball.r2 - dist2(p, ball.center)) > 0


def map_ball(f: AffineMap, ball: Ball) -> Ball:
    """Image of a ball under a similarity: center f(c), squared radius lambda*r2."""
    if ball.dim == 0:
        return ball
    return Ball(f(ball.center), f.factor * ball.r2)


def ball_in_ball(b1: Ball, b2: Ball) -> bool:
    """Open b1 inside open b2: d + r1 <= r2, decided by two exact sign tests."""
    if b1.dim == 0:
        return True
    d2 = dist2(b1.center, b2.center)
    s = b2.r2 - b1.r2 - d2
    if sign_real(s) < 0:
        return False
    return sign_real(s * s - 4 * d2 * b1.r2) >= 0


def balls_disjoint(b1: Ball, b2: Ball) -> bool:
    """Open balls disjoint: d >= r1 + r2."""
    if b1.dim == 0:
        return False
    d2 = dist2(b1.center, b2.center)
    t = d2 - b1.r2 - b2.r2
    if sign_real(t) < 0:
        return False
    return sign_real(t * t - 4 * b1.r2 * b2.r2) >= 0


def balls_equal(b1: Ball, b2: Ball) -> bool:
    if b1.dim == 0:
        return True
    return b1.center == b2.center and b1.r2 == b2.r2


# -- polynomial maps -----------------------------------------------------------

Monomial = tuple[int, ...]


class PolyMap:
    """Tuple of multivariate polynomials with CycNum coefficients.

    Coordinates are dictionaries {exponent tuple: coefficient} with zero
    coefficients dropped, so equality is canonical data comparison.
    """

    __slots__ = ("m", "dim_in", "dim_out", "coords")

    def __init__(self, m: int, dim_in: int, dim_out: int, coords):
        self.m = m
        self.dim_in = dim_in
        self.dim_out = dim_out
        cleaned = []
        for poly in coords:
            entry = {}
            for exps, c in poly.items():
                cc = _as_cyc(m, c)
                if len(exps) != dim_in:
                    raise DimensionMismatchError("monomial arity mismatch")
                if not cc.is_zero():
                    entry[tuple(exps)] = cc
            cleaned.append(entry)
        if len(cleaned) != dim_out:
            raise DimensionMismatchError("wrong number of coordinate polynomials")
        self.coords = tuple(cleaned)

    @classmethod
    def from_affine(cls, f: AffineMap) -> PolyMap:
        n = f.dim
        m = f.b.coords[0].m if n else 1
        coords = []
        for i in range(n):
            poly = {}
            zero_exp = (0,) * n
            if not f.b.coords[i].is_zero():
                poly[zero_exp] = f.b.coords[i]
            for j in range(n):
                if not f.a[i][j].is_zero():
                    e = [0] * n
                    e[j] = 1
                    poly[tuple(e)] = f.a[i][j]
            coords.append(poly)
        return cls(m, n, n, coords)

    @classmethod
    def identity(cls, m: int, dim: int) -> PolyMap:
        return cls.from_affine(AffineMap.identity(m, dim))

    def degree(self) -> int:
        return max((sum(e) for poly in self.coords for e in poly), default=0)

    def is_affine(self) -> bool:
        return self.degree() <= 1

    def to_affine(self) -> AffineMap:
        if not self.is_affine() or self.dim_in != self.dim_out:
            raise DimensionMismatchError("polynomial map is not affine")
        n = self.dim_in
        zero = CycNum.rational(self.m, 0)
        b = []
        a = []
        for i in range(n):
            poly = self.coords[i]
            b.append(poly.get((0,) * n, zero))
            row = []
            for j in range(n):
                e = [0] * n
                e[j] = 1
                row.append(poly.get(tuple(e), zero))
            a.append(tuple(row))
        return AffineMap(tuple(a), Point(tuple(b)))

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (
            self.m == other.m
            and self.dim_in == other.dim_in
            and self.dim_out == other.dim_out
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash(
            (
                self.m,
                self.dim_in,
                self.dim_out,
                tuple(tuple(sorted(p.items())) for p in self.coords),
            )
        )

    def __repr__(self):
        return f"PolyMap({self.dim_in}->{self.dim_out}, deg {self.degree()})"

    def __call__(self, p: Point) -> Point:
        if p.dim != self.dim_in:
            raise DimensionMismatchError("point dimension mismatch")
        out = []
        for poly in self.coords:
            acc = CycNum.rational(self.m, 0)
            for exps, c in poly.items():
                term = c
                for z, e in zip(p.coords, exps):
                    for _ in range(e):
                        term = term * z
                acc = acc + term
            out.append(acc)
        return Point(tuple(out))

    def compose(self, other: PolyMap | AffineMap) -> PolyMap:
        """self after other, by substituting other's coordinates into self."""
        if isinstance(other, AffineMap):
            other = PolyMap.from_affine(other)
        if other.dim_out != self.dim_in:
            raise DimensionMismatchError("composition dimension mismatch")
        one = {(0,) * other.dim_in: CycNum.rational(self.m, 1)}
        out = []
        for poly in self.coords:
            acc: dict = {}
            for exps, c in poly.items():
                term = dict(one)
                for var, e in enumerate(exps):
                    for _ in range(e):
                        term = _poly_mul(term, other.coords[var], self.m)
                for mono, coeff in term.items():
                    acc[mono] = acc.get(mono, CycNum.rational(self.m, 0)) + c * coeff
            out.append(acc)
        return PolyMap(self.m, other.dim_in, self.dim_out, out)

    def then(self, f: AffineMap) -> PolyMap:
        """f after self (post-compose with an affine map)."""
        return PolyMap.from_affine(f).compose(self)

    def coeff_norm1_bound(self) -> CycNum:
        """sum over coordinates i of sum |c| upper bounds via |c|^2: conservative
        scalar used by the lift containment warning; exactness is not needed here,
        so the bound is the real number sum of sqrt(c conj c) replaced by
        sum (1 + c conj c)/2 >= sum |c|."""
        total = CycNum.rational(self.m, 0)
        for poly in self.coords:
            for c in poly.values():
                total = total + (1 + c * c.conj()) * Fraction(1, 2)
        return total


def solve_linear(a: list[list[CycNum]], b: list[CycNum]) -> list[CycNum] | None:
    """One exact solution of A x = b by Gaussian elimination, or None when the
    system is inconsistent; free variables are set to zero."""
    n = len(a)
    if n == 0:
        return []
    m = b[0].m
    rows = [list(a[i]) + [b[i]] for i in range(n)]
    cols = len(a[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, n) if not rows[i][c].is_zero()), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inv()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if not rows[i][cols].is_zero():
            return None
    zero = CycNum.rational(m, 0)
    x = [zero] * cols
    for i, c in enumerate(pivots):
        x[c] = rows[i][cols]
    return x


def fixed_point(g: AffineMap) -> Point | None:
    """A fixed point of g, exactly; None when g has none."""
    n = g.dim
    if n == 0:
        return Point(())
    m = g.b.coords[0].m
    one = CycNum.rational(m, 1)
    a = [[g.a[i][j] - (one if i == j else 0) for j in range(n)] for i in range(n)]
    b = [-c for c in g.b.coords]
    sol = solve_linear(a, b)
    return Point(tuple(sol)) if sol is not None else None


def _poly_mul(p: dict, q: dict, m: int) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            prod = c1 * c2
            if e in out:
                out[e] = out[e] + prod
            else:
                out[e] = prod
    return out

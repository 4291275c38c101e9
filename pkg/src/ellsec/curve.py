"""Short-Weierstrass elliptic curves over F_p and their degree-n embeddings.

The curve is y^2 = x^3 + a*x + b with base point O at infinity.  Functions
with poles only at O of order at most n form an n-dimensional space with
the basis 1, x, y, x^2, xy, x^3, x^2 y, ... (pole orders 0, 2, 3, ..., n);
evaluating that basis embeds the curve into P^(n-1) as a degree-n normal
curve.  Samplers for the curve and for spans of k of its points feed the
interpolation stage.

The closed form used for the pair kernel in :mod:`ellsec.szego` assumes
exactly this model (trivializing differential dx/2y), which is why only
short Weierstrass form is supported.
"""

from __future__ import annotations

from .field import PrimeField

_RETRY_CAP = 100


class CurveError(Exception):
    pass


class CurvePoint:
    """Affine point (x, y) or the point at infinity."""

    __slots__ = ("x", "y", "is_infinity")

    def __init__(self, x=None, y=None, is_infinity=False):
        self.is_infinity = is_infinity
        self.x = x
        self.y = y

    @classmethod
    def infinity(cls):
        return cls(is_infinity=True)

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.is_infinity, self.x, self.y))

    def __repr__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


class Curve:
    """y^2 = x^3 + a*x + b over F_p, with nonzero discriminant."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: PrimeField, a: int, b: int):
        self.field = field
        self.a = a % field.p
        self.b = b % field.p
        disc = (4 * pow(self.a, 3, field.p) + 27 * self.b * self.b) % field.p
        if disc == 0:
            raise CurveError(f"singular curve: 4a^3 + 27b^2 = 0 mod {field.p}")

    def __repr__(self):
        return f"Curve(y^2 = x^3 + {self.a}x + {self.b} over F_{self.field.p})"

    def rhs(self, x: int) -> int:
        p = self.field.p
        return (pow(x, 3, p) + self.a * x + self.b) % p

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        return P.y * P.y % self.field.p == self.rhs(P.x)

    def neg(self, P: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return P
        return CurvePoint(P.x, self.field.neg(P.y))

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        """Chord-tangent group law with O as identity."""
        f = self.field
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x:
            if (P.y + Q.y) % f.p == 0:
                return CurvePoint.infinity()
            lam = f.div((3 * P.x * P.x + self.a) % f.p, 2 * P.y % f.p)
        else:
            lam = f.div(f.sub(Q.y, P.y), f.sub(Q.x, P.x))
        x3 = (lam * lam - P.x - Q.x) % f.p
        y3 = (lam * (P.x - x3) - P.y) % f.p
        return CurvePoint(x3, y3)

    def random_point(self, rng) -> CurvePoint:
        """Uniform-x affine point; the smaller square root is chosen."""
        f = self.field
        for _ in range(1000):
            x = f.rand_elem(rng)
            y = f.sqrt(self.rhs(x))
            if y is not None:
                return CurvePoint(x, y)
        raise CurveError("no curve point found; check the prime and curve")


class CurveFunction:
    """Function u(x) + y*v(x), regular away from O, with its pole order there.

    x has pole order 2 at O and y pole order 3, so the pole order is
    max(2*deg u, 3 + 2*deg v).  y-degree stays <= 1 because y^2 reduces
    along the curve equation.
    """

    __slots__ = ("field", "x_part", "y_part", "pole_order")

    def __init__(self, field: PrimeField, x_part, y_part=()):
        self.field = field
        self.x_part = _trim([c % field.p for c in x_part])
        self.y_part = _trim([c % field.p for c in y_part])
        po = 0
        if self.x_part != [0]:
            po = 2 * (len(self.x_part) - 1)
        if self.y_part != [0]:
            po = max(po, 3 + 2 * (len(self.y_part) - 1))
        self.pole_order = po

    def evaluate(self, P: CurvePoint) -> int:
        if P.is_infinity:
            raise CurveError("cannot evaluate at the base point O")
        p = self.field.p
        ux = _horner(self.x_part, P.x, p)
        vx = _horner(self.y_part, P.x, p)
        return (ux + P.y * vx) % p

    def __eq__(self, other):
        return (
            isinstance(other, CurveFunction)
            and self.x_part == other.x_part
            and self.y_part == other.y_part
        )

    def __repr__(self):
        return f"CurveFunction(x_part={self.x_part}, y_part={self.y_part}, pole={self.pole_order})"


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs or [0]


def _horner(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def rr_basis(field: PrimeField, n: int):
    """Basis of the functions with pole order <= n at O, ordered by pole order.

    Pole orders realized are 0, 2, 3, ..., n (order 1 is impossible),
    giving exactly n functions: 1, x, y, x^2, xy, x^3, x^2 y, ...
    """
    if n < 3:
        raise ValueError("need n >= 3")
    basis = [CurveFunction(field, [1])]
    for order in range(2, n + 1):
        if order % 2 == 0:
            xp = [0] * (order // 2) + [1]
            basis.append(CurveFunction(field, xp))
        else:
            yp = [0] * ((order - 3) // 2) + [1]
            basis.append(CurveFunction(field, [0], yp))
    return basis


def combine(field: PrimeField, coeffs, basis) -> CurveFunction:
    """Linear combination sum_i coeffs[i] * basis[i]."""
    if len(coeffs) != len(basis):
        raise ValueError("coefficient/basis length mismatch")
    p = field.p
    xp = [0]
    yp = [0]
    for c, f in zip(coeffs, basis):
        c %= p
        if not c:
            continue
        if len(f.x_part) > len(xp):
            xp += [0] * (len(f.x_part) - len(xp))
        for i, v in enumerate(f.x_part):
            xp[i] = (xp[i] + c * v) % p
        if len(f.y_part) > len(yp):
            yp += [0] * (len(f.y_part) - len(yp))
        for i, v in enumerate(f.y_part):
            yp[i] = (yp[i] + c * v) % p
    return CurveFunction(field, xp, yp)


def embed_point(field: PrimeField, Q: CurvePoint, n: int):
    """Coordinates (g_1(Q), ..., g_n(Q)) of the degree-n embedding."""
    if Q.is_infinity:
        raise CurveError("the embedding sampler never uses O")
    return [g.evaluate(Q) for g in rr_basis(field, n)]


def secant_sample(curve: Curve, k: int, n: int, rng):
    """Random point of the span of k independent curve points, in P^(n-1).

    Returns a length-n coordinate vector: a combination of the embeddings
    of k distinct random points with nonzero coefficients.  k = 1 samples
    the embedded curve itself.  Colliding points or zero coefficients are
    silently resampled, up to a retry cap.
    """
    if k < 1 or 2 * k - 1 > n - 2:
        raise ValueError(f"span of {k} points is not a proper subvariety of P^{n-1}")
    field = curve.field
    for _ in range(_RETRY_CAP):
        pts = [curve.random_point(rng) for _ in range(k)]
        if len(set(pts)) != k:
            continue
        coeffs = [field.rand_nonzero(rng) for _ in range(k)]
        vec = [0] * n
        for c, Q in zip(coeffs, pts):
            emb = embed_point(field, Q, n)
            vec = [(v + c * e) % field.p for v, e in zip(vec, emb)]
        if any(vec):
            return vec
    raise CurveError("secant sampler exceeded its retry cap")


def make_sampler(curve: Curve, k: int, n: int, rng):
    """Closure over secant_sample for the interpolation stage."""
    return lambda: secant_sample(curve, k, n, rng)

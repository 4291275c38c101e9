"""Sparse multivariate polynomials over F_p.

Polynomials live in k[x_1, ..., x_n] as maps from exponent vectors to
nonzero residues.  The monomial order used everywhere (serialization,
coefficient vectors, leading terms, division) is graded lexicographic
with x_1 > x_2 > ... > x_n, higher degree first.

Products whose term-pair count is large are routed through a numpy path
that packs exponent vectors into uint64 keys; small products stay on a
plain dict loop.  Both paths are exact.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import modmat
from .field import PrimeField


class NonDivisibleError(Exception):
    """Exact division failed; carries the nonzero remainder's lead term."""


class IntegrabilityError(Exception):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"component {index} is not the stated partial derivative")


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int):
    """All exponent vectors of the given total degree, graded-lex descending."""
    if degree < 0:
        return ()
    out = []

    def rec(i, rem, cur):
        if i == nvars - 1:
            out.append(tuple(cur + [rem]))
            return
        for e in range(rem, -1, -1):
            rec(i + 1, rem - e, cur + [e])

    rec(0, degree, [])
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int):
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


def grlex_key(exp):
    return (sum(exp), exp)


# -- packed representation helpers ------------------------------------------

_PACK_THRESHOLD = 4096  # term-pair count above which mul uses the numpy path


@lru_cache(maxsize=None)
def _pack_shift(nvars: int) -> int:
    return 64 // nvars


def _pack_exps(exps, nvars: int) -> np.ndarray:
    sh = _pack_shift(nvars)
    out = np.zeros(len(exps), dtype=np.uint64)
    for i, e in enumerate(exps):
        acc = 0
        for x in e:
            acc = (acc << sh) | x
        out[i] = acc
    return out


def _unpack_exp(key: int, nvars: int):
    sh = _pack_shift(nvars)
    mask = (1 << sh) - 1
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = key & mask
        key >>= sh
    return tuple(out)


@lru_cache(maxsize=None)
def _packed_monomials_asc(nvars: int, degree: int):
    """Packed keys of monomials(nvars, degree), sorted ascending."""
    keys = _pack_exps(monomials(nvars, degree), nvars)
    order = np.argsort(keys, kind="stable")
    return keys[order], order


def _combine_sorted(keys: np.ndarray, coeffs: np.ndarray, field: PrimeField):
    """Sum coefficients of equal keys; input unsorted, output sorted ascending."""
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    coeffs = coeffs[order]
    if len(keys) == 0:
        return keys, coeffs
    starts = np.flatnonzero(np.concatenate(([True], keys[1:] != keys[:-1])))
    # split sums into 31-bit halves so reduceat cannot overflow uint64
    hi = coeffs >> np.uint64(31)
    lo = coeffs & np.uint64((1 << 31) - 1)
    H = np.add.reduceat(hi, starts) % np.uint64(field.p)
    L = np.add.reduceat(lo, starts) % np.uint64(field.p)
    vals = modmat.vec_addmod(modmat.vec_mulmod(H, np.uint64((1 << 31) % field.p), field), L, field)
    keys = keys[starts]
    keep = vals != 0
    return keys[keep], vals[keep]


class MultiPoly:
    """Exact multivariate polynomial; terms map exponent tuples to residues."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: PrimeField, nvars: int, terms=None, _clean=False):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.field = field
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            clean = {}
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars or any(x < 0 for x in e):
                    raise ValueError(f"bad exponent vector {e} for nvars={nvars}")
                c = int(c) % field.p
                if c:
                    clean[e] = c
            self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars, {}, _clean=True)

    @classmethod
    def constant(cls, field, nvars, c):
        c = int(c) % field.p
        return cls(field, nvars, {(0,) * nvars: c} if c else {}, _clean=True)

    @classmethod
    def variable(cls, field, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): 1}, _clean=True)

    @classmethod
    def monomial(cls, field, nvars, exp, c=1):
        return cls(field, nvars, {tuple(exp): c})

    @classmethod
    def from_coefficient_vector(cls, field, nvars, degree, vec):
        mons = monomials(nvars, degree)
        if len(vec) != len(mons):
            raise ValueError("coefficient vector length mismatch")
        return cls(field, nvars, {m: int(c) for m, c in zip(mons, vec) if int(c) % field.p})

    # -- basic queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self):
        """(exponent, coefficient) of the graded-lex leading term; None if zero."""
        if not self.terms:
            return None
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def coefficient_vector(self, degree: int):
        return [self.terms.get(m, 0) for m in monomials(self.nvars, degree)]

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.field.p == other.field.p
            and self.terms == other.terms
        )

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_terms()[:8]:
            mono = "*".join(f"x{i+1}^{k}" if k > 1 else f"x{i+1}" for i, k in enumerate(e) if k)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        tail = " + ..." if len(self.terms) > 8 else ""
        return " + ".join(bits) + tail

    # -- ring operations -------------------------------------------------------

    def _check_compatible(self, other):
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
        if self.field.p != other.field.p:
            raise ValueError("field mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        p = self.field.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(self.field, self.nvars, out, _clean=True)

    def __sub__(self, other):
        self._check_compatible(other)
        p = self.field.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) - c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(self.field, self.nvars, out, _clean=True)

    def __neg__(self):
        p = self.field.p
        return MultiPoly(self.field, self.nvars, {e: p - c for e, c in self.terms.items()}, _clean=True)

    def scale(self, c: int):
        c = int(c) % self.field.p
        if not c:
            return MultiPoly.zero(self.field, self.nvars)
        p = self.field.p
        return MultiPoly(self.field, self.nvars, {e: v * c % p for e, v in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check_compatible(other)
        sa, sb = len(self.terms), len(other.terms)
        if sa == 0 or sb == 0:
            return MultiPoly.zero(self.field, self.nvars)
        if sa * sb >= _PACK_THRESHOLD and self._packable(other):
            return self._mul_packed(other)
        p = self.field.p
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (out.get(e, 0) + c1 * c2) % p
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly(self.field, self.nvars, out, _clean=True)

    __rmul__ = __mul__

    def _packable(self, other) -> bool:
        limit = (1 << _pack_shift(self.nvars)) - 1
        return self.degree() + other.degree() <= limit

    def _mul_packed(self, other):
        field = self.field
        ea = _pack_exps(list(self.terms.keys()), self.nvars)
        ca = np.fromiter(self.terms.values(), dtype=np.uint64, count=len(self.terms))
        eb = _pack_exps(list(other.terms.keys()), self.nvars)
        cb = np.fromiter(other.terms.values(), dtype=np.uint64, count=len(other.terms))
        with np.errstate(over="ignore"):
            keys = (ea[:, None] + eb[None, :]).ravel()
        coeffs = modmat.vec_mulmod(ca[:, None], cb[None, :], field).ravel()
        keys, vals = _combine_sorted(keys, coeffs, field)
        terms = {_unpack_exp(int(k), self.nvars): int(v) for k, v in zip(keys, vals)}
        return MultiPoly(field, self.nvars, terms, _clean=True)

    # -- calculus ----------------------------------------------------------------

    def partial_derivative(self, i: int):
        if not 0 <= i < self.nvars:
            raise ValueError(f"variable index {i} out of range")
        p = self.field.p
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                v = c * e[i] % p
                if v:
                    out[tuple(e2)] = v
        return MultiPoly(self.field, self.nvars, out, _clean=True)

    def evaluate(self, point) -> int:
        if len(point) != self.nvars:
            raise ValueError("point length mismatch")
        p = self.field.p
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * pow(x, k, p) % p
            total = (total + t) % p
        return total

    # -- division ------------------------------------------------------------------

    def exact_divide(self, divisor):
        """Quotient Q with self == Q * divisor, else NonDivisibleError.

        Single variables are handled by exponent shifting; the general case
        is greedy leading-term division under the graded-lex order, which
        decides exact divisibility by a single divisor.
        """
        self._check_compatible(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if not self.terms:
            return MultiPoly.zero(self.field, self.nvars)
        # fast path: divisor is c * x_i
        if len(divisor.terms) == 1:
            (de, dc), = divisor.terms.items()
            inv = self.field.inv(dc)
            p = self.field.p
            out = {}
            for e, c in self.terms.items():
                e2 = tuple(a - b for a, b in zip(e, de))
                if any(x < 0 for x in e2):
                    raise NonDivisibleError(f"term {e} not divisible by {de}")
                out[e2] = c * inv % p
            return MultiPoly(self.field, self.nvars, out, _clean=True)
        p = self.field.p
        de, dc = divisor.leading_term()
        dinv = self.field.inv(dc)
        rem = dict(self.terms)
        quot = {}
        while rem:
            e = max(rem, key=grlex_key)
            q = tuple(a - b for a, b in zip(e, de))
            if any(x < 0 for x in q):
                raise NonDivisibleError(f"remainder lead term {e} not divisible by {de}")
            qc = rem[e] * dinv % p
            quot[q] = qc
            for fe, fc in divisor.terms.items():
                t = tuple(a + b for a, b in zip(q, fe))
                v = (rem.get(t, 0) - qc * fc) % p
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return MultiPoly(self.field, self.nvars, quot, _clean=True)

    # -- composition -----------------------------------------------------------------

    def compose(self, maps):
        """Substitute maps[i] for variable i; maps is a PolyMap or list of forms."""
        forms = list(maps)
        return compose_many([self], forms)[0]

    # -- serialization ----------------------------------------------------------------

    def to_json_dict(self):
        return {
            "nvars": self.nvars,
            "terms": [{"exp": list(e), "c": str(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json_dict(cls, data, field):
        terms = {tuple(t["exp"]): int(t["c"]) for t in data["terms"]}
        return cls(field, int(data["nvars"]), terms)


# -- maps of projective space ---------------------------------------------------------


class PolyMap:
    """Ordered tuple of homogeneous forms of one degree: a rational self-map.

    Scalars are projective; `normalized()` fixes the representative whose
    first nonzero form has graded-lex leading coefficient 1.
    """

    __slots__ = ("forms",)

    def __init__(self, forms):
        forms = list(forms)
        if not forms:
            raise ValueError("empty map")
        f0 = forms[0]
        degs = set()
        for f in forms:
            if f.nvars != f0.nvars or f.field.p != f0.field.p:
                raise ValueError("mixed rings in PolyMap")
            if not f.is_homogeneous():
                raise ValueError("PolyMap forms must be homogeneous")
            if not f.is_zero():
                degs.add(f.degree())
        if not degs:
            raise ValueError("all forms are zero")
        if len(degs) != 1:
            raise ValueError(f"forms of mixed degrees {sorted(degs)}")
        self.forms = forms

    @property
    def field(self):
        return self.forms[0].field

    @property
    def nvars(self):
        return self.forms[0].nvars

    @property
    def degree(self):
        return max(f.degree() for f in self.forms)

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)

    def __getitem__(self, i):
        return self.forms[i]

    def __eq__(self, other):
        return isinstance(other, PolyMap) and self.forms == other.forms

    def evaluate(self, point):
        return [f.evaluate(point) for f in self.forms]

    def scale(self, c):
        return PolyMap([f.scale(c) for f in self.forms])

    def normalized(self):
        for f in self.forms:
            lt = f.leading_term()
            if lt is not None:
                return self.scale(self.field.inv(lt[1]))
        raise ValueError("all forms are zero")

    def no_common_factor(self, rng, attempts: int = 4) -> bool:
        """Random-line probe: True certifies the forms share no factor.

        Restricting to a line turns each form into a univariate polynomial;
        a common factor of positive degree survives restriction on a generic
        line, so a single line with coprime restrictions is a certificate.
        """
        field = self.field
        n = self.nvars
        for _ in range(attempts):
            u = [field.rand_elem(rng) for _ in range(n)]
            v = [field.rand_elem(rng) for _ in range(n)]
            restricted = [_restrict_to_line(f, u, v) for f in self.forms]
            restricted = [r for r in restricted if any(r)]
            if not restricted:
                continue
            g = restricted[0]
            for r in restricted[1:]:
                g = _poly1_gcd(g, r, field)
                if len(g) == 1:
                    break
            if len(g) == 1:
                return True
        return False

    def to_json_dict(self):
        return {
            "n": len(self.forms),
            "nvars": self.nvars,
            "degree": self.degree,
            "forms": [f.to_json_dict() for f in self.forms],
        }

    @classmethod
    def from_json_dict(cls, data, field):
        return cls([MultiPoly.from_json_dict(d, field) for d in data["forms"]])


def _restrict_to_line(f: MultiPoly, u, v):
    """Coefficients (ascending in s) of f(s*u + v)."""
    p = f.field.p
    out = [0] * (max(f.degree(), 0) + 1)
    for e, c in f.terms.items():
        conv = [c]
        for i, k in enumerate(e):
            for _ in range(k):
                # multiply by (v_i + s*u_i)
                nxt = [0] * (len(conv) + 1)
                for j, a in enumerate(conv):
                    nxt[j] = (nxt[j] + a * v[i]) % p
                    nxt[j + 1] = (nxt[j + 1] + a * u[i]) % p
                conv = nxt
        for j, a in enumerate(conv):
            out[j] = (out[j] + a) % p
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly1_gcd(a, b, field):
    """Monic gcd of univariate coefficient lists (ascending)."""

    def trim(x):
        while len(x) > 1 and x[-1] == 0:
            x.pop()
        return x

    a, b = trim(list(a)), trim(list(b))
    p = field.p
    while b != [0]:
        # a mod b
        a = list(a)
        while len(a) >= len(b) and a != [0]:
            f = a[-1] * field.inv(b[-1]) % p
            off = len(a) - len(b)
            for i, bc in enumerate(b):
                a[off + i] = (a[off + i] - f * bc) % p
            trim(a)
            if a == [0]:
                break
        a, b = b, a
    lead = a[-1]
    if lead:
        inv = field.inv(lead)
        a = [x * inv % p for x in a]
    return a


# -- Euler integration --------------------------------------------------------------------


def euler_integrate(components, degree: int) -> MultiPoly:
    """Recover homogeneous F of the given degree from its gradient.

    F = (1/degree) * sum_i x_i * g_i; each partial derivative is then checked
    against the input, and IntegrabilityError(i) names the first mismatch.
    """
    comps = list(components)
    if not comps:
        raise ValueError("empty gradient")
    field = comps[0].field
    nvars = comps[0].nvars
    if degree < 1:
        raise ValueError("degree must be positive")
    acc = MultiPoly.zero(field, nvars)
    for i, g in enumerate(comps):
        acc = acc + MultiPoly.variable(field, nvars, i) * g
    F = acc.scale(field.inv(degree % field.p))
    for i, g in enumerate(comps):
        if F.partial_derivative(i) != g:
            raise IntegrabilityError(i)
    return F


# -- shared-prefix composition --------------------------------------------------------------


def compose_many(polys, maps):
    """Substitute the same tuple of forms into several polynomials at once.

    maps must be homogeneous forms of one degree, one per variable of the
    inputs.  Partial products of the forms are shared across all inputs and
    across monomials with a common exponent prefix, which is what makes the
    degree-15 products of the larger runs affordable.
    """
    polys = list(polys)
    forms = list(maps)
    if not polys:
        return []
    field = polys[0].field
    m = polys[0].nvars
    if len(forms) != m:
        raise ValueError(f"need {m} forms, got {len(forms)}")
    d_map = None
    for f in forms:
        if f.nvars != forms[0].nvars or f.field.p != field.p:
            raise ValueError("mixed rings in substitution forms")
        if not f.is_homogeneous():
            raise ValueError("substitution forms must be homogeneous")
        if not f.is_zero():
            d = f.degree()
            if d_map is None:
                d_map = d
            elif d != d_map:
                raise ValueError("substitution forms of mixed degrees")
    if d_map is None:
        d_map = 1
    nout = forms[0].nvars
    for P in polys:
        if P.nvars != m or P.field.p != field.p:
            raise ValueError("input polynomial ring mismatch")

    needed = set()
    for P in polys:
        needed.update(P.terms)
    if not needed:
        return [MultiPoly.zero(field, nout) for _ in polys]

    children = {}
    for e in needed:
        for i in range(m):
            children.setdefault(e[:i], set()).add(e[i])

    max_deg_out = max(sum(e) for e in needed) * d_map
    dense = len(monomials(nout, max_deg_out)) > 2048 if max_deg_out <= (1 << _pack_shift(nout)) - 1 else False
    accs = [_Accumulator(field, nout, dense) for _ in polys]

    one = MultiPoly.constant(field, nout, 1)

    def walk(i, prefix, prod):
        if i == m:
            for P, acc in zip(polys, accs):
                c = P.terms.get(prefix)
                if c:
                    acc.add(prod, c)
            return
        cur = prod
        last = 0
        for e in sorted(children.get(prefix, ())):
            for _ in range(e - last):
                cur = cur * forms[i]
            last = e
            walk(i + 1, prefix + (e,), cur)

    walk(0, (), one)
    return [acc.finish() for acc in accs]


class _Accumulator:
    """Sum of scaled homogeneous polynomials, bucketed by total degree."""

    def __init__(self, field, nvars, dense):
        self.field = field
        self.nvars = nvars
        self.dense = dense
        self.buckets = {}

    def add(self, poly: MultiPoly, c: int):
        if poly.is_zero():
            return
        d = poly.degree()
        if not self.dense:
            p = self.field.p
            bucket = self.buckets.setdefault(d, {})
            for e, v in poly.terms.items():
                w = (bucket.get(e, 0) + v * c) % p
                if w:
                    bucket[e] = w
                else:
                    bucket.pop(e, None)
            return
        keys_sorted, _ = _packed_monomials_asc(self.nvars, d)
        bucket = self.buckets.get(d)
        if bucket is None:
            bucket = self.buckets[d] = np.zeros(len(keys_sorted), dtype=np.uint64)
        pe = _pack_exps(list(poly.terms.keys()), self.nvars)
        pc = np.fromiter(poly.terms.values(), dtype=np.uint64, count=len(poly.terms))
        pos = np.searchsorted(keys_sorted, pe)
        vals = modmat.vec_mulmod(pc, np.uint64(c % self.field.p), self.field)
        bucket[pos] = modmat.vec_addmod(bucket[pos], vals, self.field)

    def finish(self) -> MultiPoly:
        terms = {}
        if not self.dense:
            for bucket in self.buckets.values():
                terms.update(bucket)
            return MultiPoly(self.field, self.nvars, terms, _clean=True)
        for d, dense_vec in self.buckets.items():
            keys_sorted, _ = _packed_monomials_asc(self.nvars, d)
            nz = np.flatnonzero(dense_vec)
            for i in nz:
                terms[_unpack_exp(int(keys_sorted[i]), self.nvars)] = int(dense_vec[i])
        return MultiPoly(self.field, self.nvars, terms, _clean=True)

"""Arithmetic in a prime field F_p.

Every computation in this package happens over one fixed large prime p,
held in a :class:`PrimeField`.  Elements are plain ints in ``[0, p)``.
The default prime is the Mersenne prime 2^61 - 1: large enough that a
random nonzero polynomial of desk-scale degree vanishes at a random
point with probability well below 2^-40, small enough that products fit
in 128-bit intermediates.  A second documented prime is provided for
cross-prime reproducibility checks.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

DEFAULT_PRIME = 2305843009213693951  # 2^61 - 1, = 3 mod 4
ALT_PRIME = 2305843009213693967  # 2^61 + 15, = 3 mod 4; for cross-prime runs

# Deterministic Miller-Rabin witnesses, valid for all n < 3.3 * 10^24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for the 64-bit range we support."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _icbrt(n: int) -> int:
    x = int(round(n ** (1.0 / 3.0)))
    while x > 0 and x * x * x > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


class PrimeField:
    """The field F_p for an odd prime p < 2^62.

    The size cap comes from the Montgomery kernels in :mod:`ellsec.modmat`,
    which keep all intermediates inside uint64.
    """

    __slots__ = ("p", "mont_ninv", "mont_r2", "_recon_bound")

    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 3 or p % 2 == 0 or not is_prime(p):
            raise ValueError(f"field modulus must be an odd prime, got {p}")
        if p >= 1 << 62:
            raise ValueError(f"field modulus must be < 2^62, got {p}")
        self.p = p
        self.mont_ninv = (-pow(p, -1, 1 << 64)) % (1 << 64)
        self.mont_r2 = (1 << 128) % p
        # Default reconstruction bound ~ p^(1/3): a random residue then
        # reconstructs with probability ~ p^(-1/3), so a successful
        # reconstruction is strong evidence of a genuinely small fraction.
        self._recon_bound = _icbrt(p)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    # -- scalar arithmetic -------------------------------------------------

    def element(self, x: int) -> int:
        return x % self.p

    def add(self, a: int, b: int) -> int:
        s = a + b
        return s - self.p if s >= self.p else s

    def sub(self, a: int, b: int) -> int:
        d = a - b
        return d + self.p if d < 0 else d

    def neg(self, a: int) -> int:
        return self.p - a if a else 0

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        if b % self.p == 0:
            raise ZeroDivisionError("division by 0 in F_p")
        return a * pow(b, self.p - 2, self.p) % self.p

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.p)

    # -- random elements ---------------------------------------------------

    def rand_elem(self, rng) -> int:
        """Uniform residue from a seeded random.Random stream."""
        return rng.randrange(self.p)

    def rand_nonzero(self, rng) -> int:
        return rng.randrange(1, self.p)

    # -- square roots ------------------------------------------------------

    def is_square(self, a: int) -> bool:
        a %= self.p
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a: int):
        """Deterministic square root: the smaller of the two roots, or None.

        Tonelli-Shanks; for p = 3 mod 4 this reduces to one exponentiation.
        """
        p = self.p
        a %= p
        if a == 0:
            return 0
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            r = pow(a, (p + 1) // 4, p)
        else:
            q, s = p - 1, 0
            while q % 2 == 0:
                q //= 2
                s += 1
            z = 2
            while pow(z, (p - 1) // 2, p) != p - 1:
                z += 1
            m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
            while t != 1:
                i, tt = 0, t
                while tt != 1:
                    tt = tt * tt % p
                    i += 1
                b = pow(c, 1 << (m - i - 1), p)
                m, c = i, b * b % p
                t, r = t * c % p, r * b % p
        return min(r, p - r)

    # -- bridge to characteristic zero --------------------------------------

    def encode(self, q) -> int:
        """Image of a rational number (Fraction or int) in F_p."""
        fr = Fraction(q)
        return self.div(fr.numerator % self.p, fr.denominator % self.p)

    def rational_reconstruct(self, a: int, bound: int = None):
        """Recover u/v with a = u/v mod p and |u|, |v| <= bound, else None.

        Failure is a normal outcome, not an error.  The default bound is
        ~p^(1/3), which keeps accidental reconstructions of random residues
        negligible; pass a larger bound (capped at sqrt((p-1)/2), the
        uniqueness limit) to widen the search.
        """
        p = self.p
        if bound is None:
            bound = self._recon_bound
        bound = min(bound, isqrt((p - 1) // 2))
        a %= p
        r0, r1 = p, a
        t0, t1 = 0, 1
        while r1 > bound:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            t0, t1 = t1, t0 - q * t1
        if r1 > bound or t1 == 0 or abs(t1) > bound:
            return None
        fr = Fraction(r1, t1)
        if self.encode(fr) != a:
            return None
        return fr

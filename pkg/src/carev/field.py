"""Exact arithmetic in Z_p and GF(p^k), plus univariate polynomial algebra.

Everything here is pure and value-based: field elements are ints (prime
field) or tuples of ints (extension field, polynomial basis, little-endian
degree order), so they are hashable, immutable and safe to share.
"""

from __future__ import annotations

import itertools
import math
import random
import zlib
from functools import lru_cache

import numpy as np

from .errors import (
    DivisionByZero,
    DoesNotSplit,
    FieldMismatch,
    InputError,
    InternalVerificationFailed,
    NotSquarefree,
    UnsupportedRange,
)

MAX_PRIME = 1 << 31
MAX_EXT_DEGREE = 64

# Exhaustive root scan is used for fields up to this cardinality; larger
# fields go through seeded equal-degree splitting.
SCAN_LIMIT = 4096

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the supported p < 2^31."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
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


class PrimeField:
    """Z_p with elements represented as ints in [0, p)."""

    __slots__ = ("p",)
    k = 1

    def __init__(self, p: int):
        if p >= MAX_PRIME:
            raise UnsupportedRange(f"p = {p} exceeds the supported range (p < 2^31)")
        if not is_prime(p):
            raise InputError(f"p = {p} is not prime")
        self.p = p

    @property
    def order(self) -> int:
        return self.p

    @property
    def char(self) -> int:
        return self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def elem(self, v) -> int:
        if isinstance(v, (tuple, list)):
            if any(v[1:]):
                raise FieldMismatch("extension coordinates in a prime-field element")
            v = v[0] if v else 0
        return int(v) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero("inverse of 0")
        return pow(a, -1, self.p)

    def pw(self, a, e: int):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def frobenius(self, a):
        return a % self.p

    def embed(self, x: int):
        return x % self.p

    def coeff_vector(self, a) -> tuple:
        return (a,)

    def from_coeffs(self, c) -> int:
        if any(int(x) % self.p for x in c[1:]):
            raise FieldMismatch("nonzero extension coordinates")
        return int(c[0]) % self.p if len(c) else 0

    def sort_key(self, a):
        return (a,)

    def rand_elem(self, rng: random.Random):
        return rng.randrange(self.p)

    def all_elements(self):
        return range(self.p)

    def render(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class ExtField:
    """GF(p^k) as Z_p[a]/(modulus), elements are coefficient tuples."""

    __slots__ = ("base", "k", "modulus", "_red", "_red_np", "_big")

    def __init__(self, base: PrimeField, k: int, modulus):
        if k < 2:
            raise InputError("ExtField needs k >= 2; use PrimeField for k = 1")
        if k > MAX_EXT_DEGREE:
            raise UnsupportedRange(
                f"extension degree {k} exceeds the supported cap ({MAX_EXT_DEGREE})"
            )
        modulus = tuple(int(c) % base.p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise InputError("modulus must be monic of degree k")
        self.base = base
        self.k = k
        self.modulus = modulus
        p = base.p
        # Reduction rows: a^(k+i) mod modulus for i = 0 .. k-2.
        rows = []
        prev = tuple((-c) % p for c in modulus[:k])
        rows.append(prev)
        for _ in range(k - 2):
            shifted = (0,) + prev
            top = shifted[k]
            prev = tuple((shifted[i] + top * rows[0][i]) % p for i in range(k))
            rows.append(prev)
        self._red = tuple(rows)
        self._red_np = np.array(rows, dtype=np.int64) if rows else np.zeros((0, k), dtype=np.int64)
        self._big = k >= 16 and p < (1 << 26)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def char(self) -> int:
        return self.base.p

    @property
    def order(self) -> int:
        return self.base.p ** self.k

    @property
    def zero(self):
        return (0,) * self.k

    @property
    def one(self):
        return (1,) + (0,) * (self.k - 1)

    @property
    def gen(self):
        return tuple(1 if i == 1 else 0 for i in range(self.k))

    def elem(self, v):
        if isinstance(v, (int, np.integer)):
            return self.embed(int(v))
        c = [int(x) % self.p for x in v]
        if len(c) > self.k:
            raise FieldMismatch("coefficient vector longer than extension degree")
        c += [0] * (self.k - len(c))
        return tuple(c)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        if self._big:
            conv = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p
            res = conv[:k].copy()
            if conv.shape[0] > k:
                res = (res + conv[k:] @ self._red_np) % p
            return tuple(int(x) for x in res)
        conv = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        res = [c % p for c in conv[:k]]
        for i in range(k - 1):
            t = conv[k + i] % p
            if t:
                row = self._red[i]
                for j in range(k):
                    res[j] = (res[j] + t * row[j]) % p
        return tuple(res)

    def inv(self, a):
        if not any(a):
            raise DivisionByZero("inverse of 0")
        base = self.base
        f = Poly(base, a)
        m = Poly(base, self.modulus)
        g, u, _ = poly_extgcd(f, m)
        if g.degree != 0:
            raise InternalVerificationFailed("modulus not coprime with element")
        scale = base.inv(g.coeffs[0])
        u = u.scale(scale) % m
        return self.elem(u.coeffs)

    def pw(self, a, e: int):
        if e < 0:
            a = self.inv(a)
            e = -e
        result = self.one
        b = a
        while e:
            if e & 1:
                result = self.mul(result, b)
            b = self.mul(b, b)
            e >>= 1
        return result

    def frobenius(self, a):
        return self.pw(a, self.p)

    def embed(self, x: int):
        return (x % self.p,) + (0,) * (self.k - 1)

    def coeff_vector(self, a) -> tuple:
        return a

    def from_coeffs(self, c):
        return self.elem(tuple(c))

    def project(self, a) -> int:
        """Base-field value of an element, or raise if it has ext coordinates."""
        if any(a[1:]):
            raise FieldMismatch(f"element {a} is not in the base field")
        return a[0]

    def sort_key(self, a):
        return a

    def rand_elem(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def all_elements(self):
        for rev in itertools.product(range(self.p), repeat=self.k):
            yield tuple(reversed(rev))

    def render(self, a) -> str:
        terms = []
        for i in range(self.k - 1, -1, -1):
            c = a[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                var = "a" if i == 1 else f"a^{i}"
                terms.append(var if c == 1 else f"{c}*{var}")
        return "+".join(terms) if terms else "0"

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ExtField", self.p, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})"


class Poly:
    """Dense univariate polynomial over a field, little-endian coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        coeffs = [field.elem(c) if not _is_elem(field, c) else c for c in coeffs]
        n = len(coeffs)
        zero = field.zero
        while n and coeffs[n - 1] == zero:
            n -= 1
        self.field = field
        self.coeffs = tuple(coeffs[:n])

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (field.one,))

    @classmethod
    def x(cls, field):
        return cls(field, (field.zero, field.one))

    @classmethod
    def from_ints(cls, field, ints):
        return cls(field, [field.elem(i) for i in ints])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        if self.is_zero:
            raise DivisionByZero("leading coefficient of zero polynomial")
        return self.coeffs[-1]

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch("polynomials over different fields")

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __add__(self, other):
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        F = self.field
        return Poly(F, [F.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        F = self.field
        if self.is_zero or other.is_zero:
            return Poly.zero(F)
        out = [F.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == F.zero:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Poly(F, out)

    def scale(self, c):
        F = self.field
        return Poly(F, [F.mul(c, x) for x in self.coeffs])

    def monic(self):
        if self.is_zero:
            return self
        return self.scale(self.field.inv(self.lead))

    def __divmod__(self, other):
        self._check(other)
        if other.is_zero:
            raise DivisionByZero("division by zero polynomial")
        F = self.field
        rem = list(self.coeffs)
        d = other.degree
        inv_lead = F.inv(other.lead)
        q = [F.zero] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c == F.zero:
                continue
            factor = F.mul(c, inv_lead)
            q[i - d] = factor
            for j, oc in enumerate(other.coeffs):
                rem[i - d + j] = F.sub(rem[i - d + j], F.mul(factor, oc))
        return Poly(F, q), Poly(F, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def gcd(self, other):
        """Monic greatest common divisor."""
        self._check(other)
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def derivative(self):
        F = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            # i * c in the field: add c to itself (i mod char) times.
            c = self.coeffs[i]
            acc = F.zero
            for _ in range(i % F.char):
                acc = F.add(acc, c)
            out.append(acc)
        return Poly(F, out)

    def eval(self, x):
        F = self.field
        acc = F.zero
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def shift(self, c):
        """Return f(x - c)."""
        F = self.field
        shifted_x = Poly(F, (F.neg(c), F.one))
        acc = Poly.zero(F)
        for coeff in reversed(self.coeffs):
            acc = acc * shifted_x + Poly(F, (coeff,))
        return acc

    def pow_mod(self, e: int, m: "Poly"):
        if e < 0:
            raise InputError("pow_mod exponent must be nonnegative")
        result = Poly.one(self.field) % m
        b = self % m
        while e:
            if e & 1:
                result = (result * b) % m
            b = (b * b) % m
            e >>= 1
        return result

    def lift(self, E):
        """Reinterpret a base-field polynomial over the extension E."""
        if E == self.field:
            return self
        return Poly(E, [E.embed(c) for c in self.coeffs])

    def __repr__(self):
        F = self.field
        if self.is_zero:
            return "Poly(0)"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == F.zero:
                continue
            cs = F.render(c)
            if i == 0:
                terms.append(cs)
            else:
                xs = "x" if i == 1 else f"x^{i}"
                terms.append(xs if cs == "1" else f"({cs})*{xs}")
        return "Poly(" + " + ".join(terms) + ")"


def _is_elem(field, c):
    if isinstance(field, PrimeField):
        return isinstance(c, int) and 0 <= c < field.p
    return isinstance(c, tuple) and len(c) == field.k


def poly_extgcd(f: Poly, g: Poly):
    """Extended Euclid: returns (d, u, v) with u*f + v*g = d."""
    F = f.field
    r0, r1 = f, g
    u0, u1 = Poly.one(F), Poly.zero(F)
    v0, v1 = Poly.zero(F), Poly.one(F)
    while not r1.is_zero:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    return r0, u0, v0


def _seed_for(*parts) -> int:
    blob = "|".join(str(p) for p in parts).encode()
    return zlib.crc32(blob)


# ---------------------------------------------------------------------------
# Fast modular polynomial arithmetic over GF(p) (numpy-backed), used by the
# irreducibility test and distinct-degree factorization.
# ---------------------------------------------------------------------------


class _GFpModCtx:
    """Arithmetic in GF(p)[x] modulo a fixed monic polynomial."""

    def __init__(self, f: Poly):
        field = f.field
        p, D = field.p, f.degree
        self.p, self.D = p, D
        dtype = object if p >= (1 << 26) else np.int64
        self.dtype = dtype
        rows = []
        if D >= 1:
            r0 = np.array([(-c) % p for c in f.coeffs[:D]], dtype=dtype)
            rows.append(r0)
            prev = r0
            for _ in range(D - 2):
                shifted = np.concatenate(([0], prev[:-1]))
                top = prev[-1]
                prev = (shifted + top * r0) % p
                rows.append(prev)
        self.table = np.array(rows, dtype=dtype) if rows else np.zeros((0, max(D, 1)), dtype=dtype)

    def reduce(self, vec):
        D, p = self.D, self.p
        if vec.shape[0] <= D:
            out = np.zeros(D, dtype=self.dtype)
            out[: vec.shape[0]] = vec % p
            return out
        low = vec[:D] % p
        high = vec[D:] % p
        return (low + high @ self.table[: high.shape[0]]) % p

    def mul(self, a, b):
        return self.reduce(np.convolve(a, b))

    def pow(self, a, e: int):
        result = np.zeros(self.D, dtype=self.dtype)
        if self.D == 0:
            return result
        result[0] = 1
        b = self.reduce(a.copy())
        while e:
            if e & 1:
                result = self.mul(result, b)
            b = self.mul(b, b)
            e >>= 1
        return result

    def to_poly(self, vec, field) -> Poly:
        return Poly(field, [int(c) for c in vec])

    def from_poly(self, f: Poly):
        out = np.zeros(self.D, dtype=self.dtype)
        for i, c in enumerate(f.coeffs):
            out[i] = c
        return out


class _ExtModCtx:
    """Arithmetic in E[x] modulo a fixed monic polynomial, E an extension
    field.  Polynomials are (deg, k) coefficient arrays; products use one
    1-D convolution via Kronecker substitution (ext blocks of width 2k-1
    never overlap)."""

    def __init__(self, E: "ExtField", h: Poly):
        self.E = E
        self.p = E.char
        self.k = E.k
        self.n = h.degree
        self.width = 2 * self.k - 1
        self.dtype = object if self.p >= (1 << 25) else np.int64
        self.red = E._red_np.astype(self.dtype)
        hc = np.array([E.coeff_vector(c) for c in h.coeffs], dtype=self.dtype)
        rows = [(-hc[: self.n]) % self.p]  # x^n mod h (h is monic)
        for _ in range(self.n - 2):
            cur = rows[-1]
            top = cur[-1].copy()
            shifted = np.vstack([np.zeros((1, self.k), dtype=self.dtype), cur[:-1]])
            rows.append((shifted + self._scalar_mul(top, rows[0])) % self.p)
        self.table = rows

    def _scalar_mul(self, s, a):
        """Multiply each ext coefficient of a (rows) by the ext element s."""
        out = np.zeros((a.shape[0], self.width), dtype=self.dtype)
        for u in range(self.k):
            if s[u]:
                out[:, u : u + self.k] += s[u] * a
        out %= self.p
        return (out[:, : self.k] + out[:, self.k :] @ self.red) % self.p

    def reduce(self, c):
        n, p = self.n, self.p
        if c.shape[0] <= n:
            out = np.zeros((n, self.k), dtype=self.dtype)
            out[: c.shape[0]] = c % p
            return out
        out = c[:n] % p
        for j in range(n, c.shape[0]):
            s = c[j] % p
            if s.any():
                out = (out + self._scalar_mul(s, self.table[j - n])) % p
        return out

    def mul(self, a, b):
        n, k, w = self.n, self.k, self.width
        fa = np.zeros((n, w), dtype=self.dtype)
        fa[:, :k] = a
        fb = np.zeros((n, w), dtype=self.dtype)
        fb[:, :k] = b
        conv = np.convolve(fa.reshape(-1), fb.reshape(-1))
        full = np.zeros(((2 * n - 1) * w,), dtype=self.dtype)
        keep = min(conv.shape[0], full.shape[0])
        full[:keep] = conv[:keep]  # anything past block 2n-2 is structurally zero
        blocks = full.reshape(2 * n - 1, w) % self.p
        ext_red = (blocks[:, :k] + blocks[:, k:] @ self.red) % self.p
        return self.reduce(ext_red)

    def pow(self, a, e: int):
        result = np.zeros((self.n, self.k), dtype=self.dtype)
        result[0, 0] = 1
        b = self.reduce(a.copy())
        while e:
            if e & 1:
                result = self.mul(result, b)
            b = self.mul(b, b)
            e >>= 1
        return result

    def to_poly(self, vec, field=None) -> Poly:
        E = self.E
        return Poly(E, [E.elem([int(v) for v in row]) for row in vec])

    def from_poly(self, f: Poly):
        out = np.zeros((self.n, self.k), dtype=self.dtype)
        for i, c in enumerate(f.coeffs):
            out[i] = self.E.coeff_vector(c)
        return out


def _mod_ctx(field, h: Poly):
    """Numpy-backed modular-arithmetic context for field[x]/(h)."""
    if isinstance(field, ExtField):
        return _ExtModCtx(field, h)
    return _GFpModCtx(h)


# ---------------------------------------------------------------------------
# Factorization over GF(p)
# ---------------------------------------------------------------------------


def _pth_root(f: Poly) -> Poly:
    """p-th root of f = g(x^p) over GF(p) (Frobenius fixes Z_p coefficients)."""
    p = f.field.p
    out = []
    for i, c in enumerate(f.coeffs):
        if i % p == 0:
            out.append(c)
        elif c != f.field.zero:
            raise InternalVerificationFailed("not a p-th power")
    return Poly(f.field, out)


def squarefree_decomposition(f: Poly):
    """Monic squarefree decomposition over GF(p): list of (g_i, multiplicity).

    Handles the characteristic-p case (vanishing derivative means the input
    is a p-th power of a lower-degree polynomial).
    """
    if f.is_zero:
        raise InputError("zero polynomial")
    result = []

    def rec(g: Poly, scale: int):
        if g.degree <= 0:
            return
        gp = g.derivative()
        if gp.is_zero:
            rec(_pth_root(g), scale * g.field.p)
            return
        c = g.gcd(gp)
        w = (g // c).monic()
        i = 1
        while w.degree > 0:
            y = w.gcd(c)
            fac = (w // y).monic()
            if fac.degree > 0:
                result.append((fac, i * scale))
            w = y
            c = (c // y).monic()
            i += 1
        if c.degree > 0:
            rec(_pth_root(c), scale * g.field.p)

    rec(f.monic(), 1)
    result.sort(key=lambda t: (t[1], t[0].coeffs))
    return result


def squarefree_part(f: Poly) -> Poly:
    prod = Poly.one(f.field)
    for g, _ in squarefree_decomposition(f):
        prod = prod * g
    return prod


def factor_distinct_degree(f: Poly):
    """Distinct-degree factorization of a monic squarefree f over GF(p).

    Returns [(d, product of all irreducible factors of degree d)], d ascending.
    """
    if f.degree < 1:
        raise InputError("degree must be >= 1")
    f = f.monic()
    if f.gcd(f.derivative()).degree != 0:
        raise NotSquarefree("input shares a factor with its derivative")
    field = f.field
    p = field.p
    out = []
    rem = f
    ctx = _GFpModCtx(rem)
    h = ctx.from_poly(Poly.x(field) % rem)
    d = 0
    while rem.degree > 2 * d:
        d += 1
        h = ctx.pow(h, p)
        hp = ctx.to_poly(h, field)
        g = (hp - Poly.x(field)).gcd(rem)
        if g.degree > 0:
            out.append((d, g.monic()))
            rem = (rem // g).monic()
            if rem.degree == 0:
                break
            ctx = _GFpModCtx(rem)
            h = ctx.from_poly(hp % rem)
    if rem.degree > 0:
        out.append((rem.degree, rem))
    return out


def is_irreducible(f: Poly) -> bool:
    """Rabin test for a monic polynomial over GF(p)."""
    k = f.degree
    if k < 1:
        return False
    if k == 1:
        return True
    field = f.field
    p = field.p
    ctx = _GFpModCtx(f.monic())
    x = ctx.from_poly(Poly.x(field) % f)
    # x^(p^j) mod f for j = 1..k via repeated Frobenius.
    powers = {}
    h = x.copy()
    for j in range(1, k + 1):
        h = ctx.pow(h, p)
        powers[j] = h.copy()
    if not np.array_equal(ctx.reduce(powers[k]), ctx.reduce(x)):
        return False
    for q in _prime_divisors(k):
        hp = ctx.to_poly(powers[k // q], field)
        if (hp - Poly.x(field)).gcd(f).degree != 0:
            return False
    return True


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def canonical_modulus(p: int, k: int) -> tuple:
    """Smallest monic irreducible of degree k over GF(p).

    Candidates are ordered with the constant term varying fastest, so the
    choice is reproducible everywhere.
    """
    field = PrimeField(p)
    for n in range(p**k):
        digits = []
        t = n
        for _ in range(k):
            digits.append(t % p)
            t //= p
        cand = Poly(field, digits + [1])
        if is_irreducible(cand):
            return cand.coeffs
    raise InternalVerificationFailed("no irreducible polynomial found")  # pragma: no cover


def equal_degree_factor(f: Poly, d: int, rng: random.Random | None = None):
    """Split a monic product of distinct degree-d irreducibles (Cantor-Zassenhaus).

    Works over GF(p) and over extension fields; seeded deterministically when
    no RNG is supplied.
    """
    field = f.field
    if rng is None:
        rng = random.Random(_seed_for("edf", repr(field), f.coeffs, d))
    q = field.order
    out = []

    def split(g: Poly):
        if g.degree == d:
            out.append(g.monic())
            return
        n = g.degree
        ctx = _mod_ctx(field, g)
        while True:
            h = Poly(field, [field.rand_elem(rng) for _ in range(n)])
            if h.degree < 1:
                continue
            hv = ctx.from_poly(h)
            if q % 2 == 1:
                w = ctx.to_poly(ctx.pow(hv, (q**d - 1) // 2), field) - Poly.one(field)
            else:
                # Characteristic 2: trace map over GF(2).
                bits = d * _log2_order(field)
                t = hv
                acc = hv.copy()
                for _ in range(bits - 1):
                    t = ctx.mul(t, t)
                    acc = (acc + t) % 2
                w = ctx.to_poly(acc, field)
            c = w.gcd(g)
            if 0 < c.degree < g.degree:
                split(c.monic())
                split((g // c).monic())
                return

    split(f.monic())
    out.sort(key=lambda t: t.coeffs)
    return out


def _log2_order(field) -> int:
    # Only meaningful in characteristic 2.
    return field.k if isinstance(field, ExtField) else 1


def factor_irreducible(f: Poly):
    """Full factorization over GF(p): list of (monic irreducible, multiplicity)."""
    out = []
    for g, mult in squarefree_decomposition(f):
        for d, prod in factor_distinct_degree(g):
            for irr in equal_degree_factor(prod, d):
                out.append((irr, mult))
    out.sort(key=lambda t: (t[0].degree, t[0].coeffs))
    return out


def splitting_field(polys, verify: bool = True):
    """Smallest GF(p^K) over which every input splits into linear factors."""
    polys = list(polys)
    if not polys:
        raise InputError("need at least one polynomial")
    base = polys[0].field
    if not isinstance(base, PrimeField):
        raise InputError("splitting_field expects polynomials over a prime field")
    K = 1
    for f in polys:
        if f.is_zero:
            raise InputError("zero polynomial has no splitting field")
        if f.field != base:
            raise FieldMismatch("polynomials over different prime fields")
        if f.degree == 0:
            continue
        g = squarefree_part(f.monic())
        for d, _ in factor_distinct_degree(g):
            K = math.lcm(K, d)
    if K == 1:
        E = base
    else:
        if K > MAX_EXT_DEGREE:
            raise UnsupportedRange(
                f"splitting field degree {K} exceeds the supported cap ({MAX_EXT_DEGREE})"
            )
        E = ExtField(base, K, canonical_modulus(base.p, K))
    if verify:
        for f in polys:
            if f.degree > 0:
                roots_with_multiplicity(f, E)
    return E


def _root_of_linear(g: Poly):
    F = g.field
    return F.mul(F.neg(g.coeffs[0]), F.inv(g.coeffs[1]))


def _root_in_ext(G: Poly, E) -> tuple:
    """One root in E of an irreducible G over GF(p) whose degree divides E.k."""
    h = G.lift(E).monic()
    rng = random.Random(_seed_for("root", E.p, E.modulus, G.coeffs))
    q = E.order
    while h.degree > 1:
        n = h.degree
        ctx = _ExtModCtx(E, h)
        while True:
            cand = Poly(E, [E.rand_elem(rng) for _ in range(n)])
            if cand.degree < 1:
                continue
            cv = ctx.from_poly(cand)
            if q % 2 == 1:
                w = ctx.to_poly(ctx.pow(cv, (q - 1) // 2)) - Poly.one(E)
            else:
                t = cv
                acc = cv.copy()
                for _ in range(E.k - 1):
                    t = ctx.mul(t, t)
                    acc = (acc + t) % 2
                w = ctx.to_poly(acc)
            c = w.gcd(h)
            if 0 < c.degree < h.degree:
                h = c.monic() if c.degree <= h.degree - c.degree else (h // c).monic()
                break
    return _root_of_linear(h)


def _eval_all_np(g: Poly, E):
    """Evaluate g at every element of E (vectorized); returns (elements, values)."""
    p, k = E.char, E.k if isinstance(E, ExtField) else 1
    q = E.order
    elems = np.zeros((q, k), dtype=np.int64)
    idx = np.arange(q)
    for i in range(k):
        elems[:, i] = idx % p
        idx //= p
    coeffs = [np.asarray(E.coeff_vector(c), dtype=np.int64) for c in g.coeffs]
    acc = np.zeros((q, k), dtype=np.int64)
    acc += coeffs[-1]
    if isinstance(E, ExtField):
        red = E._red_np
        for c in reversed(coeffs[:-1]):
            conv = np.zeros((q, 2 * k - 1), dtype=np.int64)
            for u in range(k):
                conv[:, u : u + k] += acc[:, u : u + 1] * elems
            conv %= p
            nxt = conv[:, :k] + conv[:, k:] @ red
            acc = (nxt + c) % p
    else:
        for c in reversed(coeffs[:-1]):
            acc = (acc * elems + c) % p
    return elems, acc


def roots_with_multiplicity(f: Poly, E):
    """Roots of f (over GF(p)) in E with multiplicities, canonically ordered.

    Verifies by reconstruction that f splits completely; raises DoesNotSplit
    otherwise.
    """
    base = f.field
    if f.degree < 0:
        raise InputError("zero polynomial")
    if f.degree == 0:
        return []
    roots: list[tuple] = []
    if E.order <= SCAN_LIMIT:
        # Multiplicities come from the squarefree decomposition over the base
        # field; each squarefree part is scanned for (necessarily distinct)
        # roots, avoiding repeated synthetic division in the extension.
        p = E.char
        k = E.k if isinstance(E, ExtField) else 1
        for part, mult in squarefree_decomposition(f.monic()):
            g = part.lift(E) if isinstance(E, ExtField) else part
            _, vals = _eval_all_np(g, E)
            hit = np.nonzero(~vals.any(axis=1))[0]
            if hit.size != part.degree:
                raise DoesNotSplit(f"{f!r} does not split over {E!r}")
            for flat in hit:
                coeffs, t = [], int(flat)
                for _ in range(k):
                    coeffs.append(t % p)
                    t //= p
                alpha = E.elem(coeffs) if isinstance(E, ExtField) else coeffs[0]
                roots.append((alpha, mult))
    else:
        for G, mult in factor_irreducible(f):
            d = G.degree
            if d == 1:
                roots.append((E.embed(_root_of_linear(G)), mult))
                continue
            if not isinstance(E, ExtField) or E.k % d != 0:
                raise DoesNotSplit(f"factor of degree {d} cannot split over {E!r}")
            alpha = _root_in_ext(G, E)
            orbit = [alpha]
            for _ in range(d - 1):
                orbit.append(E.frobenius(orbit[-1]))
            for r in orbit:
                roots.append((r, mult))
    # Reconstruction check.
    prod = Poly(E, (E.embed(base.elem(f.lead)) if isinstance(E, ExtField) else f.lead,))
    for alpha, mult in roots:
        lin = Poly(E, (E.neg(alpha), E.one))
        for _ in range(mult):
            prod = prod * lin
    if prod != f.lift(E):
        raise DoesNotSplit(f"reconstruction failed for {f!r} over {E!r}")
    roots.sort(key=lambda t: E.sort_key(t[0]))
    return roots

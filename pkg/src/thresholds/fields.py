"""Arithmetic over GF(q) for prime powers q <= 256, plus vector indexing.

Field elements are integer codes in [0, q).  For prime q the code is the
residue itself; for q = p^m the code packs the polynomial coefficients
c_0 + c_1 p + ... + c_{m-1} p^{m-1}.  Extension-field multiplication goes
through exp/log tables built once from the lexicographically least primitive
polynomial, so every run of the library uses the same tables.

Vectors over GF(q) of length b are identified with indices in [0, q^b) by the
little-endian radix-q packing: coordinate i is the i-th base-q digit.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DigitOutOfRangeError,
    LengthMismatchError,
    NotPrimePowerError,
    ShapeMismatchError,
    SizeCapError,
    UnsupportedError,
)

MAX_ORDER = 256


def _factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q == p**m, or raise NotPrimePowerError."""
    if q < 2:
        raise NotPrimePowerError(f"field order must be >= 2, got {q}")
    p = None
    for d in range(2, q + 1):
        if q % d == 0:
            p = d
            break
    m = 0
    rest = q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise NotPrimePowerError(f"{q} is not a prime power")
    return p, m


def _poly_mul_mod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    """Multiply coefficient lists a*b modulo the monic `modulus`, coefficients mod p."""
    m = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            prod[i + j] = (prod[i + j] + ca * cb) % p
    # reduce: x^m = -(modulus[0] + ... + modulus[m-1] x^{m-1})
    for deg in range(len(prod) - 1, m - 1, -1):
        c = prod[deg]
        if c == 0:
            continue
        prod[deg] = 0
        for j in range(m):
            prod[deg - m + j] = (prod[deg - m + j] - c * modulus[j]) % p
    out = prod[:m]
    out += [0] * (m - len(out))
    return out


def _find_primitive_modulus(p: int, m: int) -> list[int]:
    """Lowest-code monic polynomial of degree m over GF(p) whose root x generates
    the multiplicative group.  Returned as [c_0, ..., c_{m-1}] (x^m coefficient
    implicit).  The code of a candidate is sum c_i p^i, scanned ascending."""
    q = p**m
    for code in range(1, q):
        coeffs = [(code // p**i) % p for i in range(m)]
        if coeffs[0] == 0:
            continue  # x would not be invertible
        # walk powers of x; primitive iff the first q-1 powers are exactly the
        # nonzero codes (repeat-before-the-end catches reducible moduli too)
        seen = set()
        cur = [0] * m
        cur[1 % m] = 1  # the element x (for m == 1 this branch is never used)
        x = cur[:]
        ok = True
        for _ in range(q - 1):
            packed = sum(c * p**i for i, c in enumerate(cur))
            if packed in seen:
                ok = False
                break
            seen.add(packed)
            cur = _poly_mul_mod(cur, x, coeffs + [1], p)
        if ok and len(seen) == q - 1:
            return coeffs
    raise AssertionError(f"no primitive polynomial found for p={p}, m={m}")


@dataclass(frozen=True)
class FieldSpec:
    """Immutable description of GF(q) with lookup tables.

    Attributes
    ----------
    q, p, m : int
        Field order and its prime-power factorization q = p^m.
    modulus : tuple[int, ...]
        Low coefficients of the defining polynomial (empty for prime fields).
    exp, log : tuple[int, ...]
        exp[k] = x^k as an element code (length q-1); log[a] = discrete log of
        the nonzero code a (log[0] is unused and set to -1).  Empty for m == 1.
    """

    q: int
    p: int
    m: int
    modulus: tuple[int, ...] = ()
    exp: tuple[int, ...] = ()
    log: tuple[int, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- scalar ops ---------------------------------------------------------

    def _check(self, a: int) -> None:
        if not 0 <= a < self.q:
            raise DigitOutOfRangeError(f"element code {a} outside [0, {self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if self.m == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mult = 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        self._check(a)
        if self.m == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mult = 1
        while a:
            out += ((-(a % p)) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return (a * b) % self.p
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    # -- vectorized tables --------------------------------------------------

    @property
    def add_table(self) -> np.ndarray:
        """q x q numpy table of sums (int16)."""
        tab = self._cache.get("add")
        if tab is None:
            q = self.q
            tab = np.empty((q, q), dtype=np.int16)
            for a in range(q):
                for b in range(a, q):
                    s = self.add(a, b)
                    tab[a, b] = s
                    tab[b, a] = s
            self._cache["add"] = tab
        return tab

    @property
    def mul_table(self) -> np.ndarray:
        """q x q numpy table of products (int16)."""
        tab = self._cache.get("mul")
        if tab is None:
            q = self.q
            tab = np.zeros((q, q), dtype=np.int16)
            for a in range(1, q):
                for b in range(a, q):
                    s = self.mul(a, b)
                    tab[a, b] = s
                    tab[b, a] = s
            self._cache["mul"] = tab
        return tab

    @property
    def neg_table(self) -> np.ndarray:
        tab = self._cache.get("neg")
        if tab is None:
            tab = np.array([self.neg(a) for a in range(self.q)], dtype=np.int16)
            self._cache["neg"] = tab
        return tab


@functools.lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Build (and cache) the FieldSpec for GF(q), q a prime power <= 256."""
    if q > MAX_ORDER:
        raise UnsupportedError(f"field order {q} exceeds the cap {MAX_ORDER}")
    p, m = _factor_prime_power(q)
    if m == 1:
        return FieldSpec(q=q, p=p, m=m)
    modulus = _find_primitive_modulus(p, m)
    # rebuild the power sweep to record exp/log, starting from x^0 = 1
    exp = []
    log = [-1] * q
    x = [0] * m
    x[1] = 1
    cur = [0] * m
    cur[0] = 1
    for k in range(q - 1):
        packed = sum(c * p**i for i, c in enumerate(cur))
        exp.append(packed)
        log[packed] = k
        cur = _poly_mul_mod(cur, x, modulus + [1], p)
    return FieldSpec(q=q, p=p, m=m, modulus=tuple(modulus), exp=tuple(exp), log=tuple(log))


# -- vector <-> index packing ----------------------------------------------


def vec_encode(v, q: int, b: int | None = None) -> int:
    """Pack a length-b digit sequence into its little-endian radix-q index."""
    v = list(v)
    if b is not None and len(v) != b:
        raise LengthMismatchError(f"expected {b} coordinates, got {len(v)}")
    idx = 0
    mult = 1
    for d in v:
        d = int(d)
        if not 0 <= d < q:
            raise DigitOutOfRangeError(f"digit {d} outside [0, {q})")
        idx += d * mult
        mult *= q
    return idx


def vec_decode(idx: int, q: int, b: int) -> tuple[int, ...]:
    """Inverse of vec_encode; raises if idx needs more than b digits."""
    if not 0 <= idx < q**b:
        raise DigitOutOfRangeError(f"index {idx} outside [0, {q}^{b})")
    out = []
    for _ in range(b):
        out.append(idx % q)
        idx //= q
    return tuple(out)


@functools.lru_cache(maxsize=64)
def vec_table(q: int, b: int) -> np.ndarray:
    """(q^b, b) array whose row i holds the digits of index i.  Read-only."""
    n = q**b
    if n > 1 << 24:
        raise SizeCapError(f"q^b = {n} exceeds the vector-table cap 2^24")
    idx = np.arange(n, dtype=np.int64)
    cols = [(idx // q**j) % q for j in range(b)]
    tab = np.stack(cols, axis=1).astype(np.int16)
    tab.setflags(write=False)
    return tab


def matvec_apply(A, v, fs: FieldSpec) -> tuple[int, ...]:
    """Apply a rows x cols matrix (list of rows of element codes) to a vector."""
    A = [list(row) for row in A]
    v = list(v)
    if not A:
        raise ShapeMismatchError("matrix must have at least one row")
    cols = len(A[0])
    if any(len(row) != cols for row in A):
        raise ShapeMismatchError("ragged matrix rows")
    if len(v) != cols:
        raise LengthMismatchError(f"matrix has {cols} columns, vector has {len(v)}")
    out = []
    for row in A:
        acc = 0
        for a, x in zip(row, v):
            acc = fs.add(acc, fs.mul(a, x))
        out.append(acc)
    return tuple(out)


def matvec_all(A, fs: FieldSpec, b: int) -> np.ndarray:
    """Image index of every vector in GF(q)^b under A (shape (rows, b)).

    Vectorized over all q^b inputs; returns an int64 array of packed output
    indices with the same little-endian convention.
    """
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2:
        raise ShapeMismatchError("matrix must be two-dimensional")
    if A.shape[1] != b:
        raise ShapeMismatchError(f"matrix has {A.shape[1]} columns, expected {b}")
    q = fs.q
    digits = vec_table(q, b)
    mul_tab = fs.mul_table
    add_tab = fs.add_table
    n = digits.shape[0]
    out = np.zeros(n, dtype=np.int64)
    mult = 1
    for j in range(A.shape[0]):
        acc = np.zeros(n, dtype=np.int16)
        for t in range(b):
            a = int(A[j, t])
            if a == 0:
                continue
            term = mul_tab[a, digits[:, t]]
            acc = add_tab[acc, term]
        out += acc.astype(np.int64) * mult
        mult *= q
    return out

"""Arithmetic over F_q and exact rank of matrices over F_q.

Elements are integers in ``[0, q)``.  For ``q = p^f`` the element with index
``c_0 + c_1 p + ... + c_{f-1} p^{f-1}`` is the residue class of the polynomial
``c_0 + c_1 x + ... + c_{f-1} x^{f-1}`` modulo the field's modulus.  Addition
is therefore digit-wise addition mod ``p`` of the base-``p`` indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import EntryOutOfRange, EnumerationCapExceeded, NotPrimePower, UnsupportedOrder

MAX_PRIME_POWER = 16
ENUMERATION_CAP = 2**20


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power_decomposition(q: int) -> tuple[int, int] | None:
    """Return ``(p, f)`` with ``q == p**f`` and ``p`` prime, or ``None``."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    f, r = 0, q
    while r % p == 0:
        r //= p
        f += 1
    return (p, f) if r == 1 else None


# Polynomials over F_p are coefficient tuples, lowest degree first.

def _poly_mod(a: list[int], m: tuple[int, ...], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree ``1..deg//2``."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(list(poly), tuple(low) + (1,), p):
                return False
    return True


def smallest_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``f`` whose coefficient vector, read as a
    base-``p`` integer (``c_0`` least significant), is smallest."""
    for code in range(p**f):
        low = tuple((code // p**i) % p for i in range(f))
        poly = low + (1,)
        if is_irreducible(poly, p):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {f} over F_{p}")


@dataclass(frozen=True, eq=False)
class FieldContext:
    q: int
    p: int
    f: int
    modulus: tuple[int, ...]
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return int(self.inv_table[a])

    @property
    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other):
        return isinstance(other, FieldContext) and self.q == other.q and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.q, self.modulus))


def _element_poly(a: int, p: int, f: int) -> list[int]:
    return [(a // p**i) % p for i in range(f)]


def _poly_element(c: list[int], p: int) -> int:
    return sum(ci * p**i for i, ci in enumerate(c))


def make_field(q: int) -> FieldContext:
    """Build F_q with full operation tables.

    Prime powers are supported up to 16; primes of any size are accepted
    (tables are ``q x q``, so keep ``q`` modest).
    """
    dec = prime_power_decomposition(int(q))
    if dec is None:
        raise NotPrimePower(q)
    p, f = dec
    if f > 1 and q > MAX_PRIME_POWER:
        raise UnsupportedOrder(q)

    idx = np.arange(q)
    if f == 1:
        modulus: tuple[int, ...] = ()
        add = (idx[:, None] + idx[None, :]) % q
        mul = (idx[:, None] * idx[None, :]) % q
    else:
        modulus = smallest_irreducible(p, f)
        digits = np.array([_element_poly(a, p, f) for a in range(q)])
        weights = p ** np.arange(f)
        add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            pa = digits[a]
            for b in range(a, q):
                prod = np.convolve(pa, digits[b]) % p
                red = _poly_mod(list(prod), modulus, p)
                mul[a, b] = mul[b, a] = _poly_element(red, p)
    add = add.astype(np.int64)
    mul = mul.astype(np.int64)
    neg = np.argmin(add, axis=1).astype(np.int64)  # add[a, neg[a]] == 0 is the unique zero in row a
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    for t in (add, mul, neg, inv):
        t.setflags(write=False)
    return FieldContext(q, p, f, modulus, add, mul, neg, inv)


@dataclass(frozen=True, eq=False)
class FqMatrix:
    """An ``e x d`` matrix of field-element indices."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2 or 0 in arr.shape:
            raise ValueError("FqMatrix needs a non-empty 2-d array")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __eq__(self, other):
        return isinstance(other, FqMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"FqMatrix({self.entries.tolist()})"


def _check_entries(ctx: FieldContext, m: np.ndarray) -> None:
    if m.size and (m.min() < 0 or m.max() >= ctx.q):
        raise EntryOutOfRange(f"matrix entries must lie in [0, {ctx.q})")


def mat_add(ctx: FieldContext, a: FqMatrix, b: FqMatrix) -> FqMatrix:
    return FqMatrix(ctx.add_table[a.entries, b.entries])


def mat_sub(ctx: FieldContext, a: FqMatrix, b: FqMatrix) -> FqMatrix:
    return FqMatrix(ctx.add_table[a.entries, ctx.neg_table[b.entries]])


def rank(ctx: FieldContext, m: FqMatrix | np.ndarray) -> int:
    """F_q-rank by Gaussian elimination on the operation tables."""
    a = np.array(m.entries if isinstance(m, FqMatrix) else m, dtype=np.int64)
    _check_entries(ctx, a)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = ctx.mul_table[ctx.inv_table[a[r, c]], a[r]]
        for i in range(rows):
            if i != r and a[i, c]:
                factor = ctx.neg_table[a[i, c]]
                a[i] = ctx.add_table[a[i], ctx.mul_table[factor, a[r]]]
        r += 1
    return r


def matrix_to_index(ctx: FieldContext, m: FqMatrix) -> int:
    """Row-major base-q encoding; entry (0, 0) is the most significant digit."""
    idx = 0
    for v in m.entries.ravel():
        idx = idx * ctx.q + int(v)
    return idx


def index_to_matrix(ctx: FieldContext, index: int, e: int, d: int) -> FqMatrix:
    if not 0 <= index < ctx.q ** (e * d):
        raise EntryOutOfRange(f"index {index} out of range for {e}x{d} over F_{ctx.q}")
    digits = []
    for _ in range(e * d):
        index, r = divmod(index, ctx.q)
        digits.append(r)
    return FqMatrix(np.array(digits[::-1]).reshape(e, d))


def enumerate_matrices(ctx: FieldContext, e: int, d: int, cap: int = ENUMERATION_CAP) -> Iterator[FqMatrix]:
    """All ``e x d`` matrices in index order (see :func:`matrix_to_index`)."""
    total = ctx.q ** (e * d)
    if total > cap:
        raise EnumerationCapExceeded(f"q^(ed) = {total} exceeds the enumeration cap {cap}")

    def gen():
        for digits in itertools.product(range(ctx.q), repeat=e * d):
            yield FqMatrix(np.array(digits).reshape(e, d))

    return gen()

"""Intersection-array analytics.

Gaussian binomials, classical parameters, eigenvalues of the tridiagonal
intersection matrix, the root/sign data of the Terwilliger polynomial for
classical parameters, the clique bound on local eigenvalues, and the
``{7(M-1), 6(M-2), 4(M-4); 1, 6, 28}`` family.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import (
    BadParameters,
    DegenerateSmallestEigenvalue,
    InfeasibleArray,
    ParseError,
    SignNotConstant,
)


def gaussian_binomial(n: int, m: int, q: int) -> int:
    """``[n m]_q`` from the product formula, exact."""
    if not (0 <= m <= n) or q < 2:
        raise BadParameters(f"gaussian_binomial needs 0 <= m <= n and q >= 2, got ({n}, {m}, {q})")
    num = den = 1
    for i in range(m):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    value, rem = divmod(num, den)
    assert rem == 0
    return value


def _qint(j: int, b: int) -> int:
    """``[j 1]_b = 1 + b + ... + b^(j-1)``."""
    return sum(b**t for t in range(j))


@dataclass(frozen=True)
class IntersectionArray:
    """``{b_0, ..., b_{D-1}; c_1, ..., c_D}``.

    Rejected at construction unless ``c_1 = 1``, all entries are positive,
    every ``a_i >= 0`` and every ``k_i`` is an integer.
    """

    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.b)
        c = tuple(int(x) for x in self.c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if len(b) != len(c) or not b:
            raise ParseError("need D >= 1 entries on both sides of ';'")
        if c[0] != 1:
            raise InfeasibleArray("c_1 must be 1", {"rule": "c1", "c1": c[0]})
        if min(b + c) <= 0:
            raise InfeasibleArray("entries must be positive", {"rule": "positivity"})
        for i, ai in enumerate(self.a):
            if ai < 0:
                raise InfeasibleArray(f"a_{i} = {ai} < 0", {"rule": "a_nonneg", "i": i, "a": ai})
        num = den = 1
        for i in range(1, self.D + 1):
            num *= b[i - 1]
            den *= c[i - 1]
            if num % den:
                raise InfeasibleArray(
                    f"k_{i} = {Fraction(num, den)} is not an integer",
                    {"rule": "k_integral", "i": i, "k": str(Fraction(num, den))},
                )

    @classmethod
    def parse(cls, text: str) -> "IntersectionArray":
        s = re.sub(r"\s+", "", text)
        m = re.fullmatch(r"\{([0-9,]+);([0-9,]+)\}", s)
        if not m:
            raise ParseError(f"cannot parse intersection array {text!r}")
        try:
            b = tuple(int(x) for x in m.group(1).split(","))
            c = tuple(int(x) for x in m.group(2).split(","))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
        return cls(b, c)

    def __str__(self):
        return "{" + ",".join(map(str, self.b)) + ";" + ",".join(map(str, self.c)) + "}"

    @property
    def D(self) -> int:
        return len(self.b)

    @property
    def k(self) -> int:
        return self.b[0]

    def b_(self, i: int) -> int:
        """``b_i`` with ``b_D = 0``."""
        return self.b[i] if i < self.D else 0

    def c_(self, i: int) -> int:
        """``c_i`` with ``c_0 = 0``."""
        return 0 if i == 0 else self.c[i - 1]

    @property
    def a(self) -> tuple[int, ...]:
        """``a_0..a_D``."""
        return tuple(self.k - self.b_(i) - self.c_(i) for i in range(self.D + 1))

    @property
    def sizes(self) -> tuple[int, ...]:
        """``k_0..k_D``."""
        out = [1]
        for i in range(1, self.D + 1):
            out.append(out[-1] * self.b[i - 1] // self.c[i - 1])
        return tuple(out)

    @property
    def v(self) -> int:
        return sum(self.sizes)

    def srg_parameters(self) -> tuple[int, int, int, int]:
        if self.D != 2:
            raise BadParameters("SRG parameters need diameter 2")
        return (self.v, self.k, self.a[1], self.c[1])

    @cached_property
    def eigenvalues(self) -> list:
        return drg_eigenvalues(self)


# Bilinear forms closed forms ---------------------------------------------------

def bilinear_forms_array(q: int, e: int, d: int) -> IntersectionArray:
    """Intersection array of ``Bil_q(e x d)``."""
    if e < d or d < 2 or q < 2:
        raise BadParameters(f"need e >= d >= 2 and q >= 2, got q={q}, e={e}, d={d}")
    b = [q ** (2 * j - 2) * (q - 1) * gaussian_binomial(d - j + 1, 1, q) * gaussian_binomial(e - j + 1, 1, q)
         for j in range(1, d + 1)]
    c = [q ** (j - 1) * gaussian_binomial(j, 1, q) for j in range(1, d + 1)]
    return IntersectionArray(tuple(b), tuple(c))


def family_array(M: int) -> IntersectionArray:
    """``{7(M-1), 6(M-2), 4(M-4); 1, 6, 28}`` for ``M >= 6``."""
    if M < 6:
        raise BadParameters(f"family array defined for M >= 6, got {M}")
    return IntersectionArray((7 * (M - 1), 6 * (M - 2), 4 * (M - 4)), (1, 6, 28))


# Classical parameters ------------------------------------------------------------

@dataclass(frozen=True)
class ClassicalParameters:
    D: int
    b: int
    alpha: Fraction
    beta: Fraction

    def qint(self, j: int) -> int:
        return _qint(j, self.b)

    def c_(self, i: int) -> Fraction:
        return self.qint(i) * (1 + self.alpha * self.qint(i - 1))

    def b_(self, i: int) -> Fraction:
        return (self.qint(self.D) - self.qint(i)) * (self.beta - self.alpha * self.qint(i))

    def as_tuple(self) -> tuple:
        return (self.D, self.b, self.alpha, self.beta)

    def __str__(self):
        return f"({self.D},{self.b},{self.alpha},{self.beta})"


def detect_classical_parameters(arr: IntersectionArray) -> ClassicalParameters | None:
    """First ``b in 2..b_0`` for which the classical formulas reproduce ``arr``."""
    D = arr.D
    if D < 2:
        return None
    for b in range(2, arr.k + 1):
        alpha = Fraction(arr.c[1], b + 1) - 1
        beta = Fraction(arr.b[0], _qint(D, b))
        cand = ClassicalParameters(D, b, alpha, beta)
        if all(cand.c_(i) == arr.c_(i) for i in range(1, D + 1)) and \
                all(cand.b_(i) == arr.b_(i) for i in range(0, D)):
            return cand
    return None


# Eigenvalues ------------------------------------------------------------------------

@dataclass(frozen=True)
class IrrationalEigenvalue:
    """A real root bracketed in ``[lo, hi]`` together with its float estimate."""

    approx: float
    lo: float
    hi: float

    def __float__(self):
        return self.approx


def _intersection_charpoly(arr: IntersectionArray) -> list[int]:
    """Characteristic polynomial of the tridiagonal intersection matrix,
    integer coefficients, highest degree first."""
    a = arr.a
    p_prev = [1]                 # p_0
    p_cur = [1, -a[0]]           # p_1 = x - a_0
    for i in range(1, arr.D + 1):
        # p_{i+1} = (x - a_i) p_i - b_{i-1} c_i p_{i-1}
        t = list(np.polymul([1, -a[i]], p_cur).astype(object))
        s = [arr.b[i - 1] * arr.c[i - 1] * coef for coef in p_prev]
        s = [0] * (len(t) - len(s)) + s
        nxt = [int(x) - int(y) for x, y in zip(t, s)]
        p_prev, p_cur = p_cur, nxt
    return p_cur


def _poly_eval(poly: list[int], x) -> int:
    acc = 0
    for coef in poly:
        acc = acc * x + coef
    return acc


def _deflate(poly: list[int], r: int) -> list[int]:
    out = []
    acc = 0
    for coef in poly:
        acc = acc * r + coef
        out.append(acc)
    assert out[-1] == 0
    return out[:-1]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    ds = set()
    i = 1
    while i * i <= n:
        if n % i == 0:
            ds.update((i, n // i))
        i += 1
    return sorted(ds)


def drg_eigenvalues(arr: IntersectionArray) -> list:
    """The ``D + 1`` eigenvalues, descending.

    The characteristic polynomial is monic with integer coefficients, so every
    rational root is an integer dividing the trailing nonzero coefficient;
    those are extracted exactly.  Any remaining roots are returned as
    :class:`IrrationalEigenvalue` brackets.
    """
    poly = _intersection_charpoly(arr)
    roots: list = []
    while len(poly) > 1 and poly[-1] == 0:
        roots.append(0)
        poly = poly[:-1]
    changed = True
    while changed and len(poly) > 1:
        changed = False
        for d in _divisors(poly[-1]):
            for r in (d, -d):
                if _poly_eval(poly, r) == 0:
                    roots.append(r)
                    poly = _deflate(poly, r)
                    changed = True
                    break
            if changed:
                break
    if len(poly) > 1:
        for z in np.roots([float(c) for c in poly]):
            x = float(np.real(z))
            lo, hi = x - 1e-7, x + 1e-7
            # widen until the exact polynomial changes sign across the bracket
            for _ in range(40):
                if _poly_eval(poly, Fraction(lo)) * _poly_eval(poly, Fraction(hi)) <= 0:
                    break
                lo, hi = x - 2 * (x - lo), x + 2 * (hi - x)
            roots.append(IrrationalEigenvalue(x, lo, hi))
    return sorted(roots, key=float, reverse=True)


def smallest_eigenvalue(arr: IntersectionArray):
    return drg_eigenvalues(arr)[-1]


def clique_bound(arr: IntersectionArray) -> Fraction:
    """Upper bound ``-1 - b_1/(theta_D + 1)`` on local eigenvalues."""
    theta = smallest_eigenvalue(arr)
    if isinstance(theta, IrrationalEigenvalue):
        raise DegenerateSmallestEigenvalue("smallest eigenvalue is not rational; bound not exact")
    if theta >= -1:
        raise DegenerateSmallestEigenvalue(f"theta_D = {theta} >= -1")
    b1 = arr.b[1] if arr.D >= 2 else 0
    return -1 - Fraction(b1, theta + 1)


# Terwilliger polynomial ------------------------------------------------------------

Interval = tuple  # (lo, hi); lo/hi are Fractions, None means unbounded


@dataclass(frozen=True)
class TerwilligerConstraint:
    roots: tuple[Fraction, ...]
    leading_sign: int
    admissible: tuple[Interval, ...]

    def value_sign(self, x) -> int:
        prod = Fraction(self.leading_sign)
        for r in self.roots:
            prod *= Fraction(x) - r
        return (prod > 0) - (prod < 0)

    def contains(self, x) -> bool:
        x = Fraction(x)
        return any((lo is None or lo <= x) and (hi is None or x <= hi) for lo, hi in self.admissible)

    def contains_float(self, x: float, tol: float = 1e-9) -> bool:
        return any((lo is None or lo - tol <= x) and (hi is None or x <= hi + tol) for lo, hi in self.admissible)

    @property
    def bounded(self) -> bool:
        return all(lo is not None and hi is not None for lo, hi in self.admissible)


def terwilliger_leading_sign(params: ClassicalParameters, i: int) -> int:
    b = params.b
    val = -(2 * _qint(i + 1, b) - (1 + b**i)) * (2 * _qint(i, b) - (1 + b ** (i - 1)))
    return (val > 0) - (val < 0)


def terwilliger_roots(params: ClassicalParameters) -> tuple[Fraction, ...]:
    b, D, alpha, beta = params.b, params.D, params.alpha, params.beta
    last = alpha * b * Fraction(b ** (D - 1) - 1, b - 1) - 1
    return (beta - alpha - 1, Fraction(-1), Fraction(-b - 1), last)


def signed_region(roots: tuple[Fraction, ...], sign: int) -> tuple[Interval, ...]:
    """Closed set where ``sign * prod(x - r) >= 0``, as merged intervals."""
    if sign == 0:
        return ((None, None),)
    pts = sorted(set(roots))

    def positive(x: Fraction) -> bool:
        val = Fraction(sign)
        for r in roots:
            val *= x - r
        return val > 0

    # open segments between consecutive distinct roots
    segs = []
    bounds = [None] + pts + [None]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if lo is None and hi is None:
            probe = Fraction(0)
        elif lo is None:
            probe = hi - 1
        elif hi is None:
            probe = lo + 1
        else:
            probe = (lo + hi) / 2
        segs.append((lo, hi, positive(probe)))
    out: list[list] = []
    for lo, hi, pos in segs:
        if pos:
            if out and out[-1][1] is not None and out[-1][1] == lo:
                out[-1][1] = hi
            else:
                out.append([lo, hi])
        # roots are always admissible
    for r in pts:
        if not any((lo is None or lo <= r) and (hi is None or r <= hi) for lo, hi in out):
            out.append([r, r])
    out.sort(key=lambda iv: (iv[0] is not None, iv[0] if iv[0] is not None else 0))
    merged: list[list] = []
    for lo, hi in out:
        if merged and merged[-1][1] is not None and lo is not None and merged[-1][1] >= lo:
            if hi is None or (merged[-1][1] is not None and hi > merged[-1][1]):
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


def terwilliger_constraint(params: ClassicalParameters) -> TerwilligerConstraint:
    """Roots, leading sign and admissible region ``{x : sign * prod(x - root) >= 0}``.

    The polynomial is only known up to a positive factor here, which does not
    change where it is non-negative.
    """
    if params.D < 3:
        raise BadParameters("Terwilliger polynomial needs diameter D >= 3")
    signs = {i: terwilliger_leading_sign(params, i) for i in range(2, params.D)}
    if len(set(signs.values())) != 1:
        raise SignNotConstant(signs)
    sign = next(iter(signs.values()))
    roots = tuple(sorted(terwilliger_roots(params)))
    return TerwilligerConstraint(roots, sign, signed_region(roots, sign))


def intersect_upper(region: tuple[Interval, ...], upper: Fraction | None) -> tuple[Interval, ...]:
    if upper is None:
        return region
    out = []
    for lo, hi in region:
        if lo is not None and lo > upper:
            continue
        new_hi = upper if hi is None or hi > upper else hi
        out.append((lo, new_hi))
    return tuple(out)


def format_interval(iv: Interval) -> str:
    lo, hi = iv
    if lo is not None and lo == hi:
        return "{" + str(lo) + "}"
    return f"[{'-inf' if lo is None else lo},{'inf' if hi is None else hi}]"


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = math.gcd(g, int(x))
    return g

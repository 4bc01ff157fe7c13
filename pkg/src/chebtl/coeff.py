"""Exact arithmetic in the coefficient field Q(q).

Elements are fractions of integer Laurent polynomials in q, kept in a
canonical reduced form so that equality is structural and zero tests are
trivial.  Everything here is exact; there is no floating point anywhere.
"""
from __future__ import annotations

import math
from fractions import Fraction


class DivisionByZero(ZeroDivisionError):
    """Division or inversion by the zero field element."""


class PoleAtPoint(ArithmeticError):
    """Specialization q -> q0 hit a zero of the denominator."""


def _trim(coeffs: list[int], off: int) -> tuple[int, tuple[int, ...]]:
    lo = 0
    hi = len(coeffs)
    while hi > lo and coeffs[hi - 1] == 0:
        hi -= 1
    while lo < hi and coeffs[lo] == 0:
        lo += 1
    if lo == hi:
        return 0, ()
    return off + lo, tuple(coeffs[lo:hi])


class LaurentPoly:
    """Integer Laurent polynomial, stored as a dense window of coefficients.

    ``off`` is the exponent of the first stored coefficient; the invariant is
    that the first and last stored coefficients are nonzero (the zero
    polynomial stores an empty tuple).

    >>> LaurentPoly.from_terms([(1, 1), (-1, 1)])
    LaurentPoly('q + q^-1')
    """

    __slots__ = ("off", "coeffs")

    def __init__(self, off: int, coeffs: tuple[int, ...]):
        self.off = off
        self.coeffs = coeffs

    @staticmethod
    def zero() -> "LaurentPoly":
        return _ZERO

    @staticmethod
    def one() -> "LaurentPoly":
        return _ONE

    @staticmethod
    def from_int(c: int) -> "LaurentPoly":
        if c == 0:
            return _ZERO
        return LaurentPoly(0, (c,))

    @staticmethod
    def q_power(k: int, c: int = 1) -> "LaurentPoly":
        if c == 0:
            return _ZERO
        return LaurentPoly(k, (c,))

    @staticmethod
    def from_terms(terms) -> "LaurentPoly":
        terms = [(e, c) for e, c in terms if c != 0]
        if not terms:
            return _ZERO
        lo = min(e for e, _ in terms)
        hi = max(e for e, _ in terms)
        buf = [0] * (hi - lo + 1)
        for e, c in terms:
            buf[e - lo] += c
        off, coeffs = _trim(buf, lo)
        return LaurentPoly(off, coeffs)

    def terms(self) -> list[tuple[int, int]]:
        return [(self.off + i, c) for i, c in enumerate(self.coeffs) if c != 0]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.off == 0 and self.coeffs == (1,)

    @property
    def min_exp(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no exponents")
        return self.off

    @property
    def max_exp(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no exponents")
        return self.off + len(self.coeffs) - 1

    def leading_coeff(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        lo = min(self.off, other.off)
        hi = max(self.off + len(self.coeffs), other.off + len(other.coeffs))
        buf = [0] * (hi - lo)
        for i, c in enumerate(self.coeffs):
            buf[self.off - lo + i] = c
        for i, c in enumerate(other.coeffs):
            buf[other.off - lo + i] += c
        off, coeffs = _trim(buf, lo)
        return LaurentPoly(off, coeffs)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.off, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return _ZERO
        if len(a) == 1:
            c = a[0]
            return LaurentPoly(self.off + other.off, tuple(c * x for x in b))
        if len(b) == 1:
            c = b[0]
            return LaurentPoly(self.off + other.off, tuple(c * x for x in a))
        buf = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    buf[i + j] += ca * cb
        return LaurentPoly(self.off + other.off, tuple(buf))

    def scale(self, c: int) -> "LaurentPoly":
        if c == 0:
            return _ZERO
        return LaurentPoly(self.off, tuple(c * x for x in self.coeffs))

    def shift(self, k: int) -> "LaurentPoly":
        if not self.coeffs:
            return self
        return LaurentPoly(self.off + k, self.coeffs)

    def content(self) -> int:
        """gcd of the coefficients, with the sign of the leading one."""
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        if g and self.coeffs[-1] < 0:
            g = -g
        return g

    def evaluate(self, q0: Fraction) -> Fraction:
        if q0 == 0:
            raise PoleAtPoint("q must specialize to a nonzero rational")
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * q0 + c
        return acc * q0 ** self.off

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentPoly)
            and self.off == other.off
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.off, self.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in reversed(self.terms()):
            if e == 0:
                mono = str(abs(c))
            else:
                qq = "q" if e == 1 else f"q^{e}"
                mono = qq if abs(c) == 1 else f"{abs(c)}*{qq}"
            parts.append(("- " if c < 0 else "+ ") + mono)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    def __repr__(self) -> str:
        return f"LaurentPoly('{self}')"


_ZERO = LaurentPoly(0, ())
_ONE = LaurentPoly(0, (1,))


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of dense integer polynomials (low-to-high)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[shift + i] -= lr * c
        while r and r[-1] == 0:
            r.pop()
    return r


def _primitive(a: list[int]) -> list[int]:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    if g == 0:
        return []
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """gcd in the ring of integer Laurent polynomials.

    The result is primitive up to the gcd of contents, has nonnegative
    minimal exponent 0, and a positive leading coefficient.  q-power units
    are quotiented away, so gcd(q^3, q^-2) = 1.
    """
    if a.is_zero() and b.is_zero():
        return _ZERO
    if a.is_zero():
        return _normalize_gcd(b)
    if b.is_zero():
        return _normalize_gcd(a)
    ca, cb = abs(a.content()), abs(b.content())
    cg = math.gcd(ca, cb)
    pa = _primitive(list(a.coeffs))
    pb = _primitive(list(b.coeffs))
    if len(pa) < len(pb):
        pa, pb = pb, pa
    while pb:
        r = _primitive(_prem(pa, pb))
        pa, pb = pb, r
    out = [c * cg for c in pa]
    return LaurentPoly(0, tuple(out))


def _normalize_gcd(a: LaurentPoly) -> LaurentPoly:
    c = a.content()
    coeffs = tuple(x if c > 0 else -x for x in a.coeffs)
    return LaurentPoly(0, coeffs)


def poly_exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact division a / b; raises ValueError when b does not divide a."""
    if b.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if a.is_zero():
        return _ZERO
    ra = list(a.coeffs)
    rb = list(b.coeffs)
    lb = rb[-1]
    quo = [0] * (len(ra) - len(rb) + 1)
    if len(quo) <= 0:
        raise ValueError("degree of divisor exceeds dividend")
    for k in range(len(quo) - 1, -1, -1):
        c = ra[k + len(rb) - 1]
        if c % lb:
            raise ValueError("inexact polynomial division")
        q = c // lb
        quo[k] = q
        if q:
            for i, cb in enumerate(rb):
                ra[k + i] -= q * cb
    if any(ra):
        raise ValueError("inexact polynomial division")
    off, coeffs = _trim(quo, a.off - b.off)
    return LaurentPoly(off, coeffs)


def poly_lcm(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.is_zero() or b.is_zero():
        return _ZERO
    g = poly_gcd(a, b)
    return poly_exact_div(a * b, g)


class FieldElem:
    """Element of Q(q) in canonical form: reduced fraction num/den with the
    denominator a true polynomial (lowest exponent 0) with positive leading
    coefficient.  Canonical form makes == and hash structural."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = _ONE, _reduced: bool = False):
        if den.is_zero():
            raise DivisionByZero("zero denominator in Q(q)")
        if num.is_zero():
            self.num = _ZERO
            self.den = _ONE
            return
        if _reduced or den.is_one():
            self.num = num
            self.den = den
            return
        g = poly_gcd(num, den)
        if not g.is_one():
            num = poly_exact_div(num, g)
            den = poly_exact_div(den, g)
        # pull the q-power and the sign out of the denominator
        k = den.min_exp
        if k:
            den = den.shift(-k)
            num = num.shift(-k)
        if den.leading_coeff() < 0:
            den = -den
            num = -num
        self.num = num
        self.den = den

    @staticmethod
    def zero() -> "FieldElem":
        return F_ZERO

    @staticmethod
    def one() -> "FieldElem":
        return F_ONE

    @staticmethod
    def from_int(c: int) -> "FieldElem":
        return FieldElem(LaurentPoly.from_int(c), _ONE, _reduced=True)

    @staticmethod
    def from_poly(p: LaurentPoly) -> "FieldElem":
        return FieldElem(p, _ONE, _reduced=True)

    @staticmethod
    def q_power(k: int, c: int = 1) -> "FieldElem":
        return FieldElem(LaurentPoly.q_power(k, c), _ONE, _reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def __add__(self, other: "FieldElem") -> "FieldElem":
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return FieldElem(self.num + other.num, self.den)
        return FieldElem(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "FieldElem":
        return FieldElem(-self.num, self.den, _reduced=True)

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        return self + (-other)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        if self.num.is_zero() or other.num.is_zero():
            return F_ZERO
        if self.den.is_one() and other.den.is_one():
            return FieldElem(self.num * other.num, _ONE, _reduced=True)
        # cross-reduce before multiplying to keep intermediate degrees low
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num if g1.is_one() else poly_exact_div(self.num, g1)
        d2 = other.den if g1.is_one() else poly_exact_div(other.den, g1)
        n2 = other.num if g2.is_one() else poly_exact_div(other.num, g2)
        d1 = self.den if g2.is_one() else poly_exact_div(self.den, g2)
        return FieldElem(n1 * n2, d1 * d2)

    def inv(self) -> "FieldElem":
        if self.num.is_zero():
            raise DivisionByZero("inverting zero in Q(q)")
        return FieldElem(self.den, self.num)

    def __truediv__(self, other: "FieldElem") -> "FieldElem":
        return self * other.inv()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldElem)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"FieldElem('{self}')"


F_ZERO = FieldElem(_ZERO, _ONE, _reduced=True)
F_ONE = FieldElem(_ONE, _ONE, _reduced=True)


def field_arith(a: FieldElem, b: FieldElem | None, op: str) -> FieldElem:
    """Dispatch wrapper over the FieldElem operators, for the CLI and tests."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown field operation {op!r}")


def quantum_integer(n: int) -> LaurentPoly:
    """The balanced quantum integer [n] = q^(n-1) + q^(n-3) + ... + q^(1-n).

    >>> str(quantum_integer(2))
    'q + q^-1'
    >>> quantum_integer(0).is_zero()
    True
    """
    if n < 0:
        raise ValueError("quantum integers are indexed by nonnegative n")
    if n == 0:
        return _ZERO
    coeffs = [0] * (2 * n - 1)
    coeffs[0::2] = [1] * n
    return LaurentPoly(1 - n, tuple(coeffs))


def quantum_integer_field(n: int) -> FieldElem:
    return FieldElem.from_poly(quantum_integer(n))


def specialize(a: FieldElem, q0) -> Fraction:
    """Exact rational value of a at q = q0 (a nonzero rational)."""
    q0 = Fraction(q0)
    if q0 == 0:
        raise PoleAtPoint("q = 0 is not an allowed specialization point")
    den = a.den.evaluate(q0)
    if den == 0:
        raise PoleAtPoint(f"denominator vanishes at q = {q0}")
    return a.num.evaluate(q0) / den


_SESSION_GENERICITY_BOUND = 0


class GenericityReport:
    """Outcome of a genericity check: 1 - q^d invertible for 0 < d <= d_max."""

    __slots__ = ("d_max", "all_invertible", "checked")

    def __init__(self, d_max: int, all_invertible: bool, checked: list[int]):
        self.d_max = d_max
        self.all_invertible = all_invertible
        self.checked = checked

    def to_json(self) -> dict:
        return {
            "d_max": self.d_max,
            "all_invertible": self.all_invertible,
            "checked": list(self.checked),
            "session_bound": session_genericity_bound(),
        }


def genericity_check(d_max: int) -> GenericityReport:
    """Confirm 1 - q^d is a unit in Q(q) for 1 <= d <= d_max and record
    d_max as the session's genericity bound.

    Over Q(q) with q transcendental this is symbolically trivial (the
    polynomials are nonzero), but the check is still run explicitly so the
    session bound is an honest certificate for the annulus and arc modules.
    """
    global _SESSION_GENERICITY_BOUND
    checked = []
    ok = True
    for d in range(1, d_max + 1):
        p = LaurentPoly.from_terms([(0, 1), (d, -1)])
        if p.is_zero():
            ok = False
        else:
            checked.append(d)
    if ok and d_max > _SESSION_GENERICITY_BOUND:
        _SESSION_GENERICITY_BOUND = d_max
    return GenericityReport(d_max, ok, checked)


def session_genericity_bound() -> int:
    return _SESSION_GENERICITY_BOUND


def require_genericity(d: int) -> None:
    """Raise unless the session has certified 1 - q^e invertible for e <= d."""
    if d > _SESSION_GENERICITY_BOUND:
        genericity_check(d)

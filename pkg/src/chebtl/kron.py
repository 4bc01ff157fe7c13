"""Certified Kronecker substitution for integer Laurent polynomials.

Heavy identity checks (n = 7, 8 idempotent batteries) would drown in dense
polynomial convolutions.  Instead we evaluate polynomials at q = 2^bits and
do single big-integer operations, tracking degree-span and coefficient-height
bounds alongside.  While every height bound stays below 2^(bits-1) the
balanced base-2^bits digit expansion is injective, so integer equality is
polynomial equality: the test is exact, not probabilistic.  If a bound ever
reaches the margin a PrecisionLoss is raised and the caller restarts with
more bits.
"""
from __future__ import annotations

from .coeff import LaurentPoly


class PrecisionLoss(ArithmeticError):
    """Height bound reached the injectivity margin; escalate bits and retry."""


class KronCtx:
    """Shared evaluation context: q = 2^bits."""

    __slots__ = ("bits", "margin")

    def __init__(self, bits: int = 128):
        self.bits = bits
        self.margin = 1 << (bits - 1)

    def lift(self, p: LaurentPoly) -> "KElem":
        if p.is_zero():
            return KElem(self, 0, 0, 0, 0)
        val = 0
        for e, c in p.terms():
            val += c << (self.bits * (e - p.min_exp))
        height = max(abs(c) for _, c in p.terms())
        return KElem(self, val, p.min_exp, p.max_exp - p.min_exp, height)


class KElem:
    """value = (poly at q=2^bits) * 2^(bits*off) with certified bounds.

    ``span`` bounds the degree spread of the underlying polynomial and
    ``height`` bounds the absolute value of its coefficients.
    """

    __slots__ = ("ctx", "val", "off", "span", "height")

    def __init__(self, ctx: KronCtx, val: int, off: int, span: int, height: int):
        self.ctx = ctx
        self.val = val
        self.off = off
        self.span = span
        self.height = height

    def _check(self, height: int) -> int:
        if height >= self.ctx.margin:
            raise PrecisionLoss(f"height bound 2^{height.bit_length()} at {self.ctx.bits} bits")
        return height

    def __add__(self, other: "KElem") -> "KElem":
        if self.val == 0:
            return other
        if other.val == 0:
            return self
        a, b = self, other
        off = min(a.off, b.off)
        va = a.val << (a.ctx.bits * (a.off - off))
        vb = b.val << (b.ctx.bits * (b.off - off))
        span = max(a.off + a.span, b.off + b.span) - off
        height = self._check(a.height + b.height)
        return KElem(a.ctx, va + vb, off, span, height)

    def __neg__(self) -> "KElem":
        return KElem(self.ctx, -self.val, self.off, self.span, self.height)

    def __sub__(self, other: "KElem") -> "KElem":
        return self + (-other)

    def __mul__(self, other: "KElem") -> "KElem":
        if self.val == 0 or other.val == 0:
            return KElem(self.ctx, 0, 0, 0, 0)
        height = self._check(
            (min(self.span, other.span) + 1) * self.height * other.height
        )
        return KElem(
            self.ctx,
            self.val * other.val,
            self.off + other.off,
            self.span + other.span,
            height,
        )

    def is_zero(self) -> bool:
        # bounds were enforced on every operation, so this is exact
        return self.val == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, KElem):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("KElem is not hashable")


def with_escalation(fn, start_bits: int = 128, max_bits: int = 8192):
    """Run fn(ctx), doubling the bit width on PrecisionLoss."""
    bits = start_bits
    while True:
        try:
            return fn(KronCtx(bits))
        except PrecisionLoss:
            if bits >= max_bits:
                raise
            bits *= 2

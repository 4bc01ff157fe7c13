"""Decategorified quantum annular closure: skein values of BN complexes,
graded Euler characteristics after closure, and the q-twist vanishing
rules for annular cobordism descriptors."""
from __future__ import annotations

from dataclasses import dataclass

from .coeff import (
    F_ONE,
    F_ZERO,
    FieldElem,
    LaurentPoly,
    require_genericity,
)
from .complexes import GradedComplex
from .tangle import annular_closure, through_degree
from .tl import TLElement, ZPoly, annular_skein_closure, chebyshev_coefficients, delta_power, tl_compose_many


class BaseMismatch(TypeError):
    pass


class BadFactorization(ValueError):
    pass


class AnnularSkeinElement:
    """Element of the skein of the annulus: a polynomial in z, where z marks
    one essential circle, with Q(q) coefficients."""

    __slots__ = ("poly",)

    def __init__(self, poly: ZPoly | None = None):
        self.poly = poly or ZPoly()

    def coefficients(self) -> dict[int, FieldElem]:
        return dict(self.poly.coeffs)

    def coeff(self, e: int) -> FieldElem:
        return self.poly.coeff(e)

    def in_chebyshev_basis(self) -> dict[int, FieldElem]:
        return chebyshev_coefficients(self.poly)

    def __add__(self, other: "AnnularSkeinElement") -> "AnnularSkeinElement":
        return AnnularSkeinElement(self.poly + other.poly)

    def __eq__(self, other) -> bool:
        return isinstance(other, AnnularSkeinElement) and self.poly == other.poly

    def __str__(self) -> str:
        return str(self.poly)

    __repr__ = __str__

    def to_json(self) -> dict:
        from .tl import field_to_json

        return {str(e): field_to_json(c) for e, c in sorted(self.poly.coeffs.items())}


@dataclass
class ClosureRecord:
    gid: str
    tdeg: int
    qshift: int
    essential: int
    trivial: int


@dataclass
class ClosureProfile:
    records: list[ClosureRecord]

    def to_json(self) -> list:
        return [
            {
                "id": r.gid,
                "tdeg": r.tdeg,
                "qshift": r.qshift,
                "essential": r.essential,
                "trivial": r.trivial,
            }
            for r in self.records
        ]


def close_objects(cx: GradedComplex) -> ClosureProfile:
    """Annular closure of every generator of a BN(n,n) complex."""
    if cx.base.kind != "BN" or cx.base.n != cx.base.m:
        raise BaseMismatch("close_objects needs a square BN complex")
    records = []
    for g in cx.generators():
        ess, triv = annular_closure(g.obj)
        records.append(ClosureRecord(g.gid, g.tdeg, g.qshift, ess, triv))
    return ClosureProfile(records)


def trace_euler(cx: GradedComplex) -> AnnularSkeinElement:
    """Graded Euler characteristic of the annular closure:
    sum over generators of (-1)^tdeg q^qshift (q+q^-1)^trivial z^essential."""
    if cx.base.kind == "TL":
        # TL complexes are already annular via the skein closure of chi
        from .chebyshev import chi_closure, euler_characteristic

        return AnnularSkeinElement(chi_closure(euler_characteristic(cx)))
    prof = close_objects(cx)
    out = ZPoly()
    require_genericity(2 * cx.base.n)
    for r in prof.records:
        c = FieldElem.q_power(r.qshift) * delta_power(r.trivial)
        if r.tdeg % 2:
            c = -c
        out = out + ZPoly.monomial(r.essential, c)
    return AnnularSkeinElement(out)


def trace_euler_truncated(p) -> tuple[AnnularSkeinElement, int]:
    """trace_euler of a truncated projector with its declared q-degree
    cutoff: exact below the cutoff, garbage at and above it."""
    return trace_euler(p.complex), p.trace_cutoff


def vanishes_below(c: FieldElem, cutoff: int) -> bool:
    """True when c is a Laurent polynomial supported in degrees >= cutoff."""
    if c.is_zero():
        return True
    if not c.den.is_one():
        return False
    return c.num.min_exp >= cutoff


def chebyshev_indicator_below_cutoff(
    el: AnnularSkeinElement, n: int, cutoff: int
) -> dict[str, bool]:
    """Check the decategorified projector shape: in the Chebyshev basis the
    S_n coefficient is 1 + O(q^cutoff) and every other coefficient is
    O(q^cutoff)."""
    coeffs = el.in_chebyshev_basis()
    ok_others = all(
        vanishes_below(c, cutoff) for k, c in coeffs.items() if k != n
    )
    sn = coeffs.get(n, F_ZERO) - F_ONE
    return {
        "S_n_coefficient_is_1": vanishes_below(sn, cutoff),
        "other_coefficients_vanish": ok_others,
        "cutoff": cutoff,
    }


@dataclass
class AnnularPart:
    """One component of an elementary annular cobordism descriptor."""

    kind: str  # 'essential' (wraps the annulus) or 'trivial'
    dots: int = 0
    degree: int = 0  # intrinsic degree of the part, for endomorphism parts


@dataclass
class VanishingVerdict:
    value: FieldElem
    vanished: bool
    reason: str | None

    def to_json(self) -> dict:
        from .tl import field_to_json

        return {
            "value": field_to_json(self.value),
            "vanished": self.vanished,
            "reason": self.reason,
        }


def essential_dot_vanishing(parts: list[AnnularPart]) -> VanishingVerdict:
    """Evaluate an elementary annular cobordism descriptor in the quantum
    annular category: a dot on an essential (membrane-crossing) component
    kills the term since (1 - q^2) times it vanishes and 1 - q^2 is a unit;
    more generally a nonzero-degree endomorphism part dies by the
    (1 - q^d)-invertibility argument.  Trivial parts evaluate by the
    k[x]/x^2 sphere rules."""
    value = F_ONE
    for part in parts:
        if part.kind == "essential":
            if part.dots > 0:
                require_genericity(2)
                return VanishingVerdict(
                    F_ZERO, True, "dot on an essential component: (1-q^2) u = 0"
                )
            if part.degree != 0:
                require_genericity(abs(part.degree))
                return VanishingVerdict(
                    F_ZERO,
                    True,
                    f"degree {part.degree} endomorphism: (1-q^{part.degree}) u = 0",
                )
        elif part.kind == "trivial":
            # closed trivial component: sphere with the given dots
            if part.dots == 1:
                continue
            return VanishingVerdict(
                F_ZERO, True, f"closed trivial part with {part.dots} dots"
            )
        else:
            raise ValueError(f"unknown part kind {part.kind!r}")
    return VanishingVerdict(value, False, None)


def cyclicity_rotate(
    word: list[TLElement], cut: int, shift_allocation: int = 0
) -> tuple[TLElement, int]:
    """Rotate a factorization x = g o f (g = word[:cut], f = word[cut:]) to
    f o g; returns the rotated element and the q-power carried by the
    cyclicity isomorphism for the chosen formal shift allocation.

    With all shifts on the default allocation the power is 0 and the
    annular closures of both sides agree exactly; reallocating a formal
    shift q^k from one factor to the other rescales the cyclicity
    isomorphism by q^(difference), as recorded in the returned exponent.
    """
    if not 0 < cut < len(word) or len(word) < 2:
        raise BadFactorization("cut must split the word into two nonempty parts")
    x = tl_compose_many(*word)
    if x.n != x.m:
        raise BadFactorization("rotation needs a square composite")
    g = tl_compose_many(*word[:cut]) if cut > 1 else word[0]
    f = tl_compose_many(*word[cut:]) if cut < len(word) - 1 else word[cut]
    if f.m != g.n:
        raise BadFactorization("factorization does not compose")
    rotated = tl_compose_many(f, g)
    return rotated, shift_allocation

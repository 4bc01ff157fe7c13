"""The Chebyshev systems at desk scale: Khovanov's colored complexes V_n,
the Jones-Wenzl system im p_n, the triangle data connecting consecutive
members, and the uniqueness-theorem comparison maps between systems."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .coeff import F_ONE, FieldElem
from .complexes import (
    ChainMap,
    GradedComplex,
    Generator,
    TL_BASE,
    cone,
    d_squared_check,
    identity_map,
    null_homotopy_solve,
    one_term_complex,
    tensor,
)
from .tangle import cup_tangle
from .tl import (
    KaroubiObject,
    TLElement,
    ZPoly,
    annular_skein_closure,
    identity_element,
    jones_wenzl,
    juxtapose_element,
    pad_right,
    quantum_integer,
    sandwich,
    tl_compose,
    tl_compose_many,
)


class NotATriangle(RuntimeError):
    pass


class CompletionFailed(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# k-pairings and the Khovanov complex


def pairings(n: int, k: int) -> list[frozenset[int]]:
    """k-pairings of n dots: k disjoint adjacent pairs, recorded by the left
    dot of each pair.

    >>> [len(pairings(4, k)) for k in range(3)]
    [1, 3, 1]
    """
    out = []
    for combo in itertools.combinations(range(n - 1), k):
        if all(b - a >= 2 for a, b in zip(combo, combo[1:])):
            out.append(frozenset(combo))
    return out


def _unpaired_left_of(s: frozenset[int], p: int) -> int:
    """Number of dots left of p not covered by a pair of s."""
    covered = set()
    for a in s:
        covered.add(a)
        covered.add(a + 1)
    return sum(1 for d in range(p) if d not in covered)


def _pairing_gid(s: frozenset[int]) -> str:
    return "s" + "_".join(map(str, sorted(s))) if s else "s"


def khovanov_complex(n: int) -> GradedComplex:
    """Khovanov's complex V_n over TL: chain group at tdeg -k is the sum of
    k-pairings (object: the unpaired dots), differentials remove one pair,
    inserting a cup, with the sign (-1)^(number of pairs right of the
    removed pair)."""
    cx = GradedComplex(TL_BASE)
    for k in range(n // 2 + 1):
        for s in pairings(n, k):
            cx.add_generator(
                Generator(_pairing_gid(s), -k, 0, KaroubiObject.plain(n - 2 * k))
            )
    for k in range(1, n // 2 + 1):
        for s in pairings(n, k):
            for p in sorted(s):
                s2 = s - {p}
                i = _unpaired_left_of(s, p)
                m = n - 2 * len(s)
                cupm = TLElement.from_tangle(cup_tangle(m + 2, i + 1))
                sign = sum(1 for q in s if q > p)
                if sign % 2:
                    cupm = -cupm
                cx.set_entry(_pairing_gid(s), _pairing_gid(s2), cupm)
    return cx


def kh_chain_ranks(n: int) -> list[int]:
    return [len(pairings(n, k)) for k in range(n // 2 + 1)]


# ---------------------------------------------------------------------------
# Chebyshev systems


@dataclass
class ChebyshevSystem:
    """A family of complexes V^(n) with structure maps pi^(n) from
    V^(n-1) x V, over the TL Karoubi base; V is the one-strand object with
    ev = cap and coev = cup."""

    name: str
    complexes: dict[int, GradedComplex] = field(default_factory=dict)
    pi: dict[int, ChainMap] = field(default_factory=dict)

    def v(self, n: int) -> GradedComplex:
        return self.complexes[n]


V_OBJ = KaroubiObject.plain(1)


def _cap_element() -> TLElement:
    from .tangle import cap_tangle

    return TLElement.from_tangle(cap_tangle(2, 1))


def _cup_element() -> TLElement:
    return TLElement.from_tangle(cup_tangle(2, 1))


def tensor_with_v(cx: GradedComplex) -> GradedComplex:
    return tensor(cx, one_term_complex(TL_BASE, V_OBJ, gid="v"))


def tensor_map_with_v(f: ChainMap, src: GradedComplex, tgt: GradedComplex) -> ChainMap:
    """f x id_V on the tensor_with_v complexes (no Koszul sign: |id| = 0)."""
    out = ChainMap(src, tgt, None, f.tdegree, f.qdegree)
    for (a, b), m in f.entries.items():
        out.set_entry(f"{a}*v", f"{b}*v", pad_right(m, 1))
    return out


def jw_system(n_max: int) -> ChebyshevSystem:
    """The Jones-Wenzl system: V^(n) = im p_n as a one-term complex, with
    pi^(n) the projector itself.  The figure-eight identities
    iota kappa = id - rho pi and kappa iota = id are asserted symbolically."""
    sys = ChebyshevSystem("jw")
    for n in range(n_max + 1):
        obj = KaroubiObject.wrap(jones_wenzl(n))
        sys.complexes[n] = one_term_complex(TL_BASE, obj, gid="p")
    for n in range(1, n_max + 1):
        src = tensor_with_v(sys.complexes[n - 1])
        pi = ChainMap(src, sys.complexes[n])
        pi.set_entry("p*v", "p", jones_wenzl(n))
        sys.pi[n] = pi
        if n >= 2:
            ik, ki = jw_structure_identities(n)
            assert ik and ki, f"JW homotopy identities failed at n={n}"
    return sys


def jw_morphisms(n: int):
    """(pi, rho, iota, kappa) for the JW triangle at strand count n."""
    pn = jones_wenzl(n)
    a = pad_right(jones_wenzl(n - 1), 1)
    p2 = jones_wenzl(n - 2)
    cup = pad_right(identity_element(n - 2), 0)
    iota = tl_compose_many(a, juxtapose_element(identity_element(n - 2), _cup_element()), p2)
    scalar = FieldElem(quantum_integer(n - 1), quantum_integer(n))
    kappa = tl_compose_many(
        p2, juxtapose_element(identity_element(n - 2), _cap_element()), a
    ).scale(scalar)
    return pn, pn, iota, kappa


def jw_structure_identities(n: int) -> tuple[bool, bool]:
    """dh = id - rho pi and hd = id from the JW model figure,
    with d = iota and h = kappa."""
    pn, _, iota, kappa = jw_morphisms(n)
    a = pad_right(jones_wenzl(n - 1), 1)
    dh = tl_compose(iota, kappa)
    ik_ok = dh == (a - pn)
    hd = tl_compose(kappa, iota)
    ki_ok = hd == jones_wenzl(n - 2)
    return ik_ok, ki_ok


def khovanov_system(n_max: int) -> ChebyshevSystem:
    """Khovanov's system: pi^(n) is the inclusion of the subcomplex of
    pairings whose rightmost dot is unpaired."""
    sys = ChebyshevSystem("khovanov")
    for n in range(n_max + 1):
        sys.complexes[n] = khovanov_complex(n)
    for n in range(1, n_max + 1):
        src = tensor_with_v(sys.complexes[n - 1])
        tgt = sys.complexes[n]
        pi = ChainMap(src, tgt)
        for s in _all_pairings(n - 1):
            gid = _pairing_gid(s) + "*v"
            m = (n - 1) - 2 * len(s) + 1
            pi.set_entry(gid, _pairing_gid(s), identity_element(m))
        sys.pi[n] = pi
    return sys


def _all_pairings(n: int):
    out = []
    for k in range(n // 2 + 1):
        out.extend(pairings(n, k))
    return out


def kh_cone_decomposition(n: int) -> dict[str, bool]:
    """V_n as the mapping cone of V_{n-2} -> V_{n-1} x V: the generator
    bijection is by rightmost-dot-paired status, the cone map is id x coev
    restricted, and the cone differential must match V_n entrywise."""
    vn = khovanov_complex(n)
    vn2 = khovanov_complex(n - 2)
    vn1v = tensor_with_v(khovanov_complex(n - 1))
    # cone map f: V_{n-2} -> V_{n-1} x V: append a cup on the right edge
    f = ChainMap(vn2, vn1v)
    for s in _all_pairings(n - 2):
        m = (n - 2) - 2 * len(s)
        cupm = TLElement.from_tangle(cup_tangle(m + 2, m + 1))
        f.set_entry(_pairing_gid(s), _pairing_gid(s) + "*v", cupm)
    report = {"cone_map_closed": f.is_closed()}
    c = cone(f)
    # bijection: first type (rightmost dot paired) <-> x.<pairing of n-2>,
    # second type <-> y.<pairing of n-1>*v
    def match(gid_vn: str, s: frozenset[int]):
        if n - 2 in s:
            return "x." + _pairing_gid(frozenset(s - {n - 2}))
        return "y." + _pairing_gid(s) + "*v"

    ok_gens = True
    mapping = {}
    for s in _all_pairings(n):
        gid = _pairing_gid(s)
        target = match(gid, s)
        mapping[gid] = target
        gv, gc = vn.gens[gid], c.gens.get(target)
        if gc is None or (gv.tdeg, gv.qshift, gv.obj) != (gc.tdeg, gc.qshift, gc.obj):
            ok_gens = False
    report["generator_bijection"] = ok_gens
    ok_diff = True
    seen = set()
    for (a, b), m in vn.diff.items():
        ma, mb = mapping[a], mapping[b]
        mc = c.entry(ma, mb)
        if mc is None or mc != m:
            ok_diff = False
        seen.add((ma, mb))
    for key in c.diff:
        if key not in seen:
            ok_diff = False
    report["differential_matches_cone"] = ok_diff
    report["cone_map_is_coev_cup"] = True  # by construction above
    return report


# ---------------------------------------------------------------------------
# Triangles


def iota_map(sys: ChebyshevSystem, n: int) -> ChainMap:
    """iota^(n-2) = (pi^(n-1) x id) o (id x coev): V^(n-2) -> V^(n-1) x V."""
    vn2 = sys.v(n - 2)
    src_vv = tensor(vn2, one_term_complex(TL_BASE, KaroubiObject.plain(2), gid="vv"))
    # id x coev: entries g -> g*vv with idem u cup
    idcoev = ChainMap(vn2, src_vv)
    for g in vn2.gens.values():
        e = g.obj.idem
        m = tl_compose(
            juxtapose_element(e, identity_element(2)),
            juxtapose_element(e, _cup_element()),
        )
        idcoev.set_entry(g.gid, f"{g.gid}*vv", m)
    # pi^(n-1) x id: (V^(n-2) x V x V -> V^(n-1) x V), collapsing the
    # bracketing: our src_vv generators g*vv correspond to (g*v)*v
    pi_prev = sys.pi[n - 1]
    vn1v = tensor_with_v(sys.v(n - 1))
    piid = ChainMap(src_vv, vn1v)
    for (a, b), m in pi_prev.entries.items():
        # a = "<g>*v" in tensor_with_v(V^(n-2)); strip the marker
        ga = a[: -len("*v")]
        piid.set_entry(f"{ga}*vv", f"{b}*v", pad_right(m, 1))
    return piid.compose(idcoev)


@dataclass
class TriangleWitness:
    phi: ChainMap       # V^(n) -> Cone(iota)
    phi_bar: ChainMap   # Cone(iota) -> V^(n)
    h_cone: ChainMap    # homotopy: id_cone - phi phi_bar = [d, h_cone]
    h_v: ChainMap       # homotopy: id_V - phi_bar phi = [d, h_v]


def triangle_check(sys: ChebyshevSystem, n: int) -> TriangleWitness:
    """Verify the distinguished triangle at n: Cone(iota^(n-2)) is homotopy
    equivalent to V^(n), returning verified witness maps.  For the JW
    system the witnesses are the closed-form figure maps; for the Khovanov
    system the cone is split by the pairing bijection.  The verification
    itself is generic and exact."""
    iota = iota_map(sys, n)
    if not iota.is_closed():
        raise NotATriangle(f"iota^{n - 2} is not closed")
    c = cone(iota)
    vn = sys.v(n)
    if sys.name == "jw":
        pn, rho, _, kappa = jw_morphisms(n)
        phi = ChainMap(vn, c)
        phi.set_entry("p", "y.p*v", rho)
        phi_bar = ChainMap(c, vn)
        phi_bar.set_entry("y.p*v", "p", pn)
        h_cone = ChainMap(c, c, None, -1, 0)
        h_cone.set_entry("y.p*v", "x.p", kappa)
        h_v = ChainMap(vn, vn, None, -1, 0)
    elif sys.name == "khovanov":
        phi = ChainMap(vn, c)
        phi_bar = ChainMap(c, vn)
        for s in _all_pairings(n):
            gid = _pairing_gid(s)
            if n - 2 in s:
                tgt = "x." + _pairing_gid(frozenset(s - {n - 2}))
            else:
                tgt = "y." + _pairing_gid(s) + "*v"
            ident = vn.gens[gid].obj.idem
            phi.set_entry(gid, tgt, ident)
            phi_bar.set_entry(tgt, gid, ident)
        h_cone = ChainMap(c, c, None, -1, 0)
        h_v = ChainMap(vn, vn, None, -1, 0)
    else:
        raise NotATriangle(f"unknown system {sys.name}")
    _verify_triangle(vn, c, phi, phi_bar, h_cone, h_v)
    return TriangleWitness(phi, phi_bar, h_cone, h_v)


def _verify_triangle(vn, c, phi, phi_bar, h_cone, h_v) -> None:
    if not phi.is_closed():
        raise NotATriangle("phi is not closed")
    if not phi_bar.is_closed():
        raise NotATriangle("phi_bar is not closed")
    r1 = identity_map(vn) - phi_bar.compose(phi)
    if not (r1 - h_v.commutator_with_d()).is_zero():
        raise NotATriangle("phi_bar o phi is not homotopic to the identity")
    r2 = identity_map(c) - phi.compose(phi_bar)
    if not (r2 - h_cone.commutator_with_d()).is_zero():
        raise NotATriangle("phi o phi_bar is not homotopic to the identity")


# ---------------------------------------------------------------------------
# Uniqueness: comparing two systems


@dataclass
class ThetaData:
    theta: dict[int, ChainMap]
    theta_inv: dict[int, ChainMap]
    verified: dict[int, bool]


def build_theta(a: ChebyshevSystem, b: ChebyshevSystem, n_max: int) -> ThetaData:
    """Inductively build homotopy equivalences theta^(n): V_a^(n) -> V_b^(n)
    completing morphisms of the distinguished triangles, normalizing
    theta^(0) and theta^(1) to identities (both systems share V = object 1).
    Each theta is verified a homotopy equivalence by exhibiting the inverse
    from the swapped construction and homotoping both composites to
    identities."""
    theta: dict[int, ChainMap] = {}
    theta_inv: dict[int, ChainMap] = {}
    verified: dict[int, bool] = {}
    for n in (0, 1):
        theta[n] = _matching_identity(a.v(n), b.v(n))
        theta_inv[n] = _matching_identity(b.v(n), a.v(n))
        verified[n] = True
    for n in range(2, n_max + 1):
        theta[n] = _theta_step(a, b, theta, n)
        theta_inv[n] = _theta_step(b, a, theta_inv, n)
        lhs = theta_inv[n].compose(theta[n]) - identity_map(a.v(n))
        rhs = theta[n].compose(theta_inv[n]) - identity_map(b.v(n))
        try:
            null_homotopy_solve(lhs)
            null_homotopy_solve(rhs)
            verified[n] = True
        except Exception as exc:  # noqa: BLE001
            raise CompletionFailed(
                f"theta^{n} is not invertible up to homotopy: {exc}"
            ) from exc
        # middle square of the triangle morphism
        sq = theta[n].compose(a.pi[n]) - b.pi[n].compose(
            tensor_map_with_v(theta[n - 1], tensor_with_v(a.v(n - 1)), tensor_with_v(b.v(n - 1)))
        )
        try:
            null_homotopy_solve(sq)
        except Exception as exc:  # noqa: BLE001
            raise CompletionFailed(
                f"theta^{n} does not commute with pi up to homotopy"
            ) from exc
    return ThetaData(theta, theta_inv, verified)


def _matching_identity(x: GradedComplex, y: GradedComplex) -> ChainMap:
    """Identity-shaped map between complexes with identical generator data
    (used for theta^0, theta^1 where both systems share the object)."""
    out = ChainMap(x, y)
    xs = x.generators()
    ys = y.generators()
    assert len(xs) == len(ys) == 1, "theta normalization needs one-term ends"
    gx, gy = xs[0], ys[0]
    assert gx.obj == gy.obj and gx.tdeg == gy.tdeg
    out.set_entry(gx.gid, gy.gid, gx.obj.idem)
    return out


def _theta_step(a: ChebyshevSystem, b: ChebyshevSystem, theta: dict[int, ChainMap], n: int) -> ChainMap:
    iota_a = iota_map(a, n)
    iota_b = iota_map(b, n)
    ta = triangle_check(a, n)
    tb = triangle_check(b, n)
    th_v = tensor_map_with_v(
        theta[n - 1], tensor_with_v(a.v(n - 1)), tensor_with_v(b.v(n - 1))
    )
    # left square commutation up to homotopy: solve the correction
    diff = th_v.compose(iota_a) - iota_b.compose(theta[n - 2])
    try:
        corr = null_homotopy_solve(diff)
    except Exception as exc:  # noqa: BLE001
        raise CompletionFailed(
            f"left triangle square does not commute at n={n}"
        ) from exc
    # cone functoriality: [[theta^(n-2), 0], [corr, theta^(n-1) x id]]
    ca = cone(iota_a)
    cb = cone(iota_b)
    kmap = ChainMap(ca, cb)
    for (x, y), m in theta[n - 2].entries.items():
        kmap.set_entry(f"x.{x}", f"x.{y}", m)
    for (x, y), m in th_v.entries.items():
        kmap.set_entry(f"y.{x}", f"y.{y}", m)
    for (x, y), m in corr.entries.items():
        kmap.set_entry(f"x.{x}", f"y.{y}", m)
    if not kmap.is_closed():
        raise CompletionFailed(f"cone map not closed at n={n}")
    return tb.phi_bar.compose(kmap.compose(ta.phi))


# ---------------------------------------------------------------------------
# Euler characteristics


def euler_characteristic(cx: GradedComplex) -> dict[int, TLElement]:
    """Graded Euler characteristic in the split Grothendieck data of the TL
    base: strand count -> alternating q-weighted sum of the idempotents."""
    if cx.base.kind != "TL":
        raise TypeError("euler_characteristic expects a TL-based complex")
    out: dict[int, TLElement] = {}
    for g in cx.gens.values():
        e = g.obj.idem
        c = FieldElem.q_power(g.qshift)
        if g.tdeg % 2:
            c = -c
        m = out.get(g.obj.n)
        term = e.scale(c)
        out[g.obj.n] = term if m is None else m + term
    return {k: v for k, v in out.items() if not v.is_zero()}


def chi_closure(chi: dict[int, TLElement]) -> ZPoly:
    out = ZPoly()
    for el in chi.values():
        out = out + annular_skein_closure(el)
    return out


def grothendieck_formula(n: int) -> dict[int, TLElement]:
    """Sum over k of (-1)^k binom(n-k, k) [id_(n-2k)]."""
    import math

    out: dict[int, TLElement] = {}
    for k in range(n // 2 + 1):
        c = FieldElem.from_int(math.comb(n - k, k) * (-1 if k % 2 else 1))
        out[n - 2 * k] = identity_element(n - 2 * k).scale(c)
    return out

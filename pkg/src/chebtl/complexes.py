"""Bounded-above chain complexes over the Temperley-Lieb Karoubi category or
a Bar-Natan morphism category, with cones, tensor and star products,
delooping, Gaussian elimination, homotopy solving, homological perturbation,
splicing and hair combing.

Conventions: cohomological differentials (tdeg +1); a differential or chain
map entry from a generator with q-shift a to one with q-shift b must have
intrinsic degree a - b + (global q-degree of the map); t-shifts negate the
differential.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .coeff import F_ONE, F_ZERO, FieldElem
from . import cob as cobmod
from .cob import Cobordism, cob_compose, cob_juxtapose, cob_star, identity_cob
from .linalg import CoordBasis, Inconsistent, solve_sparse
from .tangle import FlatTangle, juxtapose
from .tl import (
    KaroubiObject,
    TLElement,
    juxtapose_element,
    sandwich,
    tl_compose,
)


class BaseMismatch(TypeError):
    pass


class NotClosed(ValueError):
    pass


class InterfaceMismatch(ValueError):
    pass


class WindowTooSmall(RuntimeError):
    pass


class NotNullHomotopic(RuntimeError):
    pass


class HypothesisFailed(RuntimeError):
    pass


class ChainConditionViolated(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Bases


class BNBase:
    """Morphism category BN(n, m): flat tangles and dotted cobordisms."""

    kind = "BN"
    __slots__ = ("n", "m")

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m

    def __eq__(self, other):
        return isinstance(other, BNBase) and (self.n, self.m) == (other.n, other.m)

    def __hash__(self):
        return hash(("BN", self.n, self.m))

    def check_object(self, obj) -> None:
        assert isinstance(obj, FlatTangle) and (obj.n, obj.m) == (self.n, self.m)

    def identity(self, obj):
        return identity_cob(obj)

    def zero_mor(self, src, tgt):
        return Cobordism.zero(src, tgt)

    def compose(self, f, g):
        return cob_compose(f, g)

    def is_zero(self, f) -> bool:
        return f.is_zero()

    def identity_multiple(self, f, src, tgt):
        if src != tgt:
            return None
        return f.is_identity_multiple()

    def entry_degree_ok(self, f, qsrc: int, qtgt: int, qdeg: int) -> bool:
        return f.degrees() <= {qsrc - qtgt + qdeg}

    def hom_basis_keys(self, src, tgt, degree: int):
        return cobmod.hom_basis(src, tgt, degree)

    def basis_morphism(self, src, tgt, key, coeff=F_ONE):
        return cobmod.basis_cob(src, tgt, key, coeff)

    def coords(self, f):
        return dict(f.terms)

    def object_json(self, obj):
        from .tl import tangle_to_json

        return tangle_to_json(obj)

    def object_from_json(self, data):
        from .tl import tangle_from_json

        return tangle_from_json(data)

    def morphism_json(self, f):
        return f.to_json()

    def morphism_from_json(self, data):
        return Cobordism.from_json(data)


class TLKarBase:
    """Karoubi envelope of TL: objects im(e), morphisms sandwiched elements."""

    kind = "TL"
    __slots__ = ("_hom_cache",)

    def __init__(self):
        self._hom_cache: dict = {}

    def __eq__(self, other):
        return isinstance(other, TLKarBase)

    def __hash__(self):
        return hash("TLKar")

    def check_object(self, obj) -> None:
        assert isinstance(obj, KaroubiObject)

    def identity(self, obj: KaroubiObject):
        return obj.idem

    def zero_mor(self, src: KaroubiObject, tgt: KaroubiObject):
        return TLElement.zero(src.n, tgt.n)

    def compose(self, f: TLElement, g: TLElement):
        return tl_compose(f, g)

    def is_zero(self, f) -> bool:
        return f.is_zero()

    def identity_multiple(self, f: TLElement, src: KaroubiObject, tgt: KaroubiObject):
        if src != tgt or f.is_zero():
            return None
        idem = src.idem
        d = next(iter(idem.terms))
        base = idem.terms[d]
        c = f.coeff(d) / base
        if c.is_zero():
            return None
        if f == idem.scale(c):
            return c
        return None

    def entry_degree_ok(self, f, qsrc: int, qtgt: int, qdeg: int) -> bool:
        # TL morphisms are intrinsically degree 0
        return f.is_zero() or qsrc - qtgt + qdeg == 0

    def _hom_data(self, src: KaroubiObject, tgt: KaroubiObject):
        key = (src.n, src.idem_key, tgt.n, tgt.idem_key)
        if key in self._hom_cache:
            return self._hom_cache[key]
        from .tangle import all_matchings

        vecs = []
        mors = []
        for d in all_matchings(src.n, tgt.n):
            m = sandwich(tgt, TLElement.from_tangle(d), src)
            if m.is_zero():
                continue
            vecs.append({t.pairs: c for t, c in m.terms.items()})
            mors.append(m)
        basis = CoordBasis()
        chosen = []
        for vec, m in zip(vecs, mors):
            if basis.add(vec):
                chosen.append(m)
        data = (basis, chosen)
        self._hom_cache[key] = data
        return data

    def hom_basis_keys(self, src, tgt, degree: int):
        if degree != 0:
            return []
        basis, chosen = self._hom_data(src, tgt)
        return list(range(len(chosen)))

    def basis_morphism(self, src, tgt, key, coeff=F_ONE):
        _, chosen = self._hom_data(src, tgt)
        return chosen[key].scale(coeff)

    def coords(self, f: TLElement):
        raise NotImplementedError("use coords_in for TL morphisms")

    def coords_in(self, src, tgt, f: TLElement):
        basis, _ = self._hom_data(src, tgt)
        vec = {t.pairs: c for t, c in f.terms.items()}
        out = basis.coords(vec)
        if out is None:
            raise ValueError("morphism not in the sandwich hom space")
        return {i: c for i, c in enumerate(out) if not c.is_zero()}

    def object_json(self, obj: KaroubiObject):
        return {"n": obj.n, "idempotent": obj.idem.to_json()}

    def object_from_json(self, data):
        return KaroubiObject.wrap(TLElement.from_json(data["idempotent"]))

    def morphism_json(self, f: TLElement):
        return f.to_json()

    def morphism_from_json(self, data):
        return TLElement.from_json(data)


TL_BASE = TLKarBase()


# ---------------------------------------------------------------------------
# Complexes


@dataclass(frozen=True)
class Generator:
    gid: str
    tdeg: int
    qshift: int
    obj: object


class GradedComplex:
    """Bounded-above complex: generators with (tdeg, qshift, object) and a
    sparse degree-one differential."""

    __slots__ = ("base", "gens", "diff", "_out", "_in")

    def __init__(self, base, gens: list[Generator] | None = None, diff=None):
        self.base = base
        self.gens: dict[str, Generator] = {}
        self.diff: dict[tuple[str, str], object] = {}
        self._out: dict[str, set[str]] = {}
        self._in: dict[str, set[str]] = {}
        for g in gens or []:
            self.add_generator(g)
        for (a, b), m in (diff or {}).items():
            self.set_entry(a, b, m)

    def add_generator(self, g: Generator) -> None:
        assert g.gid not in self.gens, f"duplicate generator {g.gid}"
        self.base.check_object(g.obj)
        self.gens[g.gid] = g
        self._out[g.gid] = set()
        self._in[g.gid] = set()

    def set_entry(self, a: str, b: str, m) -> None:
        ga, gb = self.gens[a], self.gens[b]
        assert gb.tdeg == ga.tdeg + 1, f"entry {a}->{b} not degree one"
        if self.base.is_zero(m):
            self.diff.pop((a, b), None)
            self._out[a].discard(b)
            self._in[b].discard(a)
            return
        assert self.base.entry_degree_ok(m, ga.qshift, gb.qshift, 0), (
            f"entry {a}->{b} has wrong q-degree"
        )
        self.diff[(a, b)] = m
        self._out[a].add(b)
        self._in[b].add(a)

    def entry(self, a: str, b: str):
        return self.diff.get((a, b))

    def generators(self) -> list[Generator]:
        return sorted(self.gens.values(), key=lambda g: (-g.tdeg, g.gid))

    def tdeg_range(self) -> tuple[int, int]:
        if not self.gens:
            return (0, -1)
        ts = [g.tdeg for g in self.gens.values()]
        return (min(ts), max(ts))

    def is_zero_complex(self) -> bool:
        return not self.gens

    def copy(self) -> "GradedComplex":
        out = GradedComplex(self.base)
        for g in self.gens.values():
            out.add_generator(g)
        for (a, b), m in self.diff.items():
            out.set_entry(a, b, m)
        return out

    def relabel(self, fn) -> "GradedComplex":
        out = GradedComplex(self.base)
        for g in self.gens.values():
            out.add_generator(Generator(fn(g.gid), g.tdeg, g.qshift, g.obj))
        for (a, b), m in self.diff.items():
            out.set_entry(fn(a), fn(b), m)
        return out

    def shift(self, t: int = 0, q: int = 0) -> "GradedComplex":
        """t^t q^q shift; odd t-shifts negate the differential."""
        out = GradedComplex(self.base)
        for g in self.gens.values():
            out.add_generator(Generator(g.gid, g.tdeg + t, g.qshift + q, g.obj))
        for (a, b), m in self.diff.items():
            out.set_entry(a, b, m if t % 2 == 0 else _neg(self.base, m))
        return out

    def truncate_below(self, lo: int) -> "GradedComplex":
        """Drop generators with tdeg < lo (bounded-above truncation)."""
        out = GradedComplex(self.base)
        for g in self.gens.values():
            if g.tdeg >= lo:
                out.add_generator(g)
        for (a, b), m in self.diff.items():
            if a in out.gens and b in out.gens:
                out.set_entry(a, b, m)
        return out

    def d_squared_witness(self):
        """None if d^2 = 0; else ((a, c), composite) for the first failure."""
        by_src: dict[str, list[str]] = {}
        for (a, b) in self.diff:
            by_src.setdefault(a, []).append(b)
        for a in sorted(by_src):
            acc: dict[str, object] = {}
            for b in sorted(by_src[a]):
                for c in sorted(self._out[b]):
                    m = self.base.compose(self.diff[(b, c)], self.diff[(a, b)])
                    if c in acc:
                        acc[c] = _add(self.base, acc[c], m)
                    else:
                        acc[c] = m
            for c, m in sorted(acc.items()):
                if not self.base.is_zero(m):
                    return (a, c), m
        return None

    def to_json(self) -> dict:
        base_json = (
            {"base": "TL"}
            if self.base.kind == "TL"
            else {"base": "BN", "n": self.base.n, "m": self.base.m}
        )
        gens = [
            {
                "id": g.gid,
                "tdeg": g.tdeg,
                "qshift": g.qshift,
                "object": self.base.object_json(g.obj),
            }
            for g in sorted(self.gens.values(), key=lambda g: g.gid)
        ]
        diff = [
            {"from": a, "to": b, "morphism": self.base.morphism_json(m)}
            for (a, b), m in sorted(self.diff.items())
        ]
        return {**base_json, "generators": gens, "differential": diff}

    @staticmethod
    def from_json(data: dict) -> "GradedComplex":
        if data["base"] == "TL":
            base = TL_BASE
        else:
            base = BNBase(data["n"], data["m"])
        out = GradedComplex(base)
        for g in data["generators"]:
            out.add_generator(
                Generator(g["id"], g["tdeg"], g["qshift"], base.object_from_json(g["object"]))
            )
        for e in data["differential"]:
            out.set_entry(e["from"], e["to"], base.morphism_from_json(e["morphism"]))
        return out


def _add(base, f, g):
    return f + g


def _neg(base, f):
    return -f


def d_squared_check(c: GradedComplex):
    """(passed, witness): verifies the differential squares to zero."""
    w = c.d_squared_witness()
    return (w is None), w


def one_term_complex(base, obj, tdeg: int = 0, qshift: int = 0, gid: str = "g0") -> GradedComplex:
    out = GradedComplex(base)
    out.add_generator(Generator(gid, tdeg, qshift, obj))
    return out


# ---------------------------------------------------------------------------
# Chain maps


class ChainMap:
    """Map of complexes with homological degree tdegree and q-degree qdegree.

    Entries go from source generators to target generators with
    tdeg(target) = tdeg(source) + tdegree."""

    __slots__ = ("source", "target", "entries", "tdegree", "qdegree")

    def __init__(self, source, target, entries=None, tdegree: int = 0, qdegree: int = 0):
        self.source = source
        self.target = target
        self.tdegree = tdegree
        self.qdegree = qdegree
        self.entries: dict[tuple[str, str], object] = {}
        for (a, b), m in (entries or {}).items():
            self.set_entry(a, b, m)

    def set_entry(self, a: str, b: str, m) -> None:
        ga = self.source.gens[a]
        gb = self.target.gens[b]
        assert gb.tdeg == ga.tdeg + self.tdegree
        if self.source.base.is_zero(m):
            self.entries.pop((a, b), None)
            return
        assert self.source.base.entry_degree_ok(
            m, ga.qshift, gb.qshift, self.qdegree
        ), f"chain map entry {a}->{b} has wrong q-degree"
        self.entries[(a, b)] = m

    def entry(self, a, b):
        return self.entries.get((a, b))

    def __add__(self, other: "ChainMap") -> "ChainMap":
        assert (self.tdegree, self.qdegree) == (other.tdegree, other.qdegree)
        out = ChainMap(self.source, self.target, None, self.tdegree, self.qdegree)
        acc = dict(self.entries)
        for k, m in other.entries.items():
            acc[k] = _add(self.source.base, acc[k], m) if k in acc else m
        for (a, b), m in acc.items():
            out.set_entry(a, b, m)
        return out

    def __neg__(self) -> "ChainMap":
        out = ChainMap(self.source, self.target, None, self.tdegree, self.qdegree)
        for (a, b), m in self.entries.items():
            out.entries[(a, b)] = _neg(self.source.base, m)
        return out

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def scale(self, c: FieldElem) -> "ChainMap":
        out = ChainMap(self.source, self.target, None, self.tdegree, self.qdegree)
        if not c.is_zero():
            for k, m in self.entries.items():
                out.entries[k] = m.scale(c)
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other."""
        assert other.target is self.source or other.target.gens.keys() == self.source.gens.keys()
        base = self.source.base
        out = ChainMap(
            other.source,
            self.target,
            None,
            self.tdegree + other.tdegree,
            self.qdegree + other.qdegree,
        )
        acc: dict = {}
        for (a, b), g in other.entries.items():
            for (b2, c), f in self.entries.items():
                if b2 != b:
                    continue
                m = base.compose(f, g)
                key = (a, c)
                acc[key] = _add(base, acc[key], m) if key in acc else m
        for (a, c), m in acc.items():
            out.set_entry(a, c, m)
        return out

    def commutator_with_d(self) -> "ChainMap":
        """[delta, f] = delta_Y o f - (-1)^{|f|} f o delta_X, degree +1 map."""
        base = self.source.base
        out = ChainMap(
            self.source, self.target, None, self.tdegree + 1, self.qdegree
        )
        acc: dict = {}
        for (a, b), m in self.entries.items():
            for c in self.target._out[b]:
                comp = base.compose(self.target.diff[(b, c)], m)
                key = (a, c)
                acc[key] = _add(base, acc[key], comp) if key in acc else comp
        sign = -1 if self.tdegree % 2 == 0 else 1
        for (a, b), dm in self.source.diff.items():
            for (b2, c), m in self.entries.items():
                if b2 != b:
                    continue
                comp = base.compose(m, dm)
                if sign < 0:
                    comp = _neg(base, comp)
                key = (a, c)
                acc[key] = _add(base, acc[key], comp) if key in acc else comp
        for (a, c), m in acc.items():
            out.set_entry(a, c, m)
        return out

    def is_closed(self) -> bool:
        return self.commutator_with_d().is_zero()


def identity_map(c: GradedComplex) -> ChainMap:
    out = ChainMap(c, c)
    for g in c.gens.values():
        out.set_entry(g.gid, g.gid, c.base.identity(g.obj))
    return out


def cone(f: ChainMap) -> GradedComplex:
    """Mapping cone of a degree-(0,0) closed chain map: t^-1 X + Y."""
    if (f.tdegree, f.qdegree) != (0, 0):
        raise NotClosed("cone expects a degree (0,0) chain map")
    if not f.is_closed():
        raise NotClosed("cone of a non-closed map")
    base = f.source.base
    out = GradedComplex(base)
    for g in f.source.gens.values():
        out.add_generator(Generator(f"x.{g.gid}", g.tdeg - 1, g.qshift, g.obj))
    for g in f.target.gens.values():
        out.add_generator(Generator(f"y.{g.gid}", g.tdeg, g.qshift, g.obj))
    for (a, b), m in f.source.diff.items():
        out.set_entry(f"x.{a}", f"x.{b}", _neg(base, m))
    for (a, b), m in f.target.diff.items():
        out.set_entry(f"y.{a}", f"y.{b}", m)
    for (a, b), m in f.entries.items():
        out.set_entry(f"x.{a}", f"y.{b}", m)
    return out


# ---------------------------------------------------------------------------
# Monoidal structure


def tensor(a: GradedComplex, b: GradedComplex) -> GradedComplex:
    """Tensor product over the TL base; Koszul sign on the left factor."""
    if a.base.kind != "TL" or b.base.kind != "TL":
        raise BaseMismatch("tensor is for TL-based complexes")
    out = GradedComplex(a.base)
    for ga in a.gens.values():
        for gb in b.gens.values():
            obj = KaroubiObject.wrap(juxtapose_element(ga.obj.idem, gb.obj.idem))
            out.add_generator(
                Generator(
                    f"{ga.gid}*{gb.gid}",
                    ga.tdeg + gb.tdeg,
                    ga.qshift + gb.qshift,
                    obj,
                )
            )
    for (a1, a2), m in a.diff.items():
        for gb in b.gens.values():
            out.set_entry(
                f"{a1}*{gb.gid}",
                f"{a2}*{gb.gid}",
                juxtapose_element(m, gb.obj.idem),
            )
    for (b1, b2), m in b.diff.items():
        for ga in a.gens.values():
            entry = juxtapose_element(ga.obj.idem, m)
            if ga.tdeg % 2:
                entry = -entry
            out.set_entry(f"{ga.gid}*{b1}", f"{ga.gid}*{b2}", entry)
    return out


def star_compose(a: GradedComplex, b: GradedComplex) -> GradedComplex:
    """Horizontal composition of BN complexes: a over BN(k,m) after b over
    BN(n,k); same Koszul sign convention as tensor."""
    if a.base.kind != "BN" or b.base.kind != "BN":
        raise BaseMismatch("star_compose is for BN-based complexes")
    if a.base.n != b.base.m:
        raise BaseMismatch(
            f"cannot star-compose BN({a.base.n},{a.base.m}) with BN({b.base.n},{b.base.m})"
        )
    base = BNBase(b.base.n, a.base.m)
    out = GradedComplex(base)
    objs: dict[tuple[str, str], FlatTangle] = {}
    from .tangle import compose as tcompose

    for ga in a.gens.values():
        for gb in b.gens.values():
            obj, _ = tcompose(ga.obj, gb.obj)
            objs[(ga.gid, gb.gid)] = obj
            out.add_generator(
                Generator(
                    f"{ga.gid}*{gb.gid}",
                    ga.tdeg + gb.tdeg,
                    ga.qshift + gb.qshift,
                    obj,
                )
            )
    for (a1, a2), m in a.diff.items():
        for gb in b.gens.values():
            out.set_entry(
                f"{a1}*{gb.gid}",
                f"{a2}*{gb.gid}",
                cob_star(m, identity_cob(gb.obj)),
            )
    for (b1, b2), m in b.diff.items():
        for ga in a.gens.values():
            entry = cob_star(identity_cob(ga.obj), m)
            if ga.tdeg % 2:
                entry = entry.scale(FieldElem.from_int(-1))
            out.set_entry(f"{ga.gid}*{b1}", f"{ga.gid}*{b2}", entry)
    return out


def juxtapose_complex(a: GradedComplex, t: FlatTangle) -> GradedComplex:
    """a u (identity complex on t): extra strands on the right."""
    if a.base.kind != "BN":
        raise BaseMismatch("juxtapose_complex is for BN-based complexes")
    base = BNBase(a.base.n + t.n, a.base.m + t.m)
    out = GradedComplex(base)
    idc = identity_cob(t)
    for g in a.gens.values():
        out.add_generator(
            Generator(g.gid, g.tdeg, g.qshift, juxtapose(g.obj, t))
        )
    for (x, y), m in a.diff.items():
        out.set_entry(x, y, cob_juxtapose(m, idc))
    return out


# ---------------------------------------------------------------------------
# Delooping and Gaussian elimination


class Equivalence:
    """Tracked homotopy equivalence data between an old and a new complex:
    fwd: old -> new and bwd: new -> old, with fwd o bwd = id_new and
    bwd o fwd homotopic to id_old."""

    __slots__ = ("fwd", "bwd")

    def __init__(self, fwd: ChainMap, bwd: ChainMap):
        self.fwd = fwd
        self.bwd = bwd


def _compose_equiv(outer: Equivalence, inner: Equivalence) -> Equivalence:
    return Equivalence(outer.fwd.compose(inner.fwd), inner.bwd.compose(outer.bwd))


def deloop_pass(c: GradedComplex, track: bool = False):
    """Replace every generator whose tangle has circles by its 2^(#circles)
    q-shifted circle-free copies, conjugating the differential by the
    delooping isomorphism.  Returns the new complex (and the tracked
    isomorphism pair when track=True)."""
    if c.base.kind != "BN":
        return (c, Equivalence(identity_map(c), identity_map(c))) if track else c
    cur = c
    equiv: Equivalence | None = None
    while True:
        gid = None
        for g in cur.generators():
            if g.obj.circles:
                gid = g.gid
                break
        if gid is None:
            break
        cur, step = _deloop_one(cur, gid)
        if track:
            equiv = step if equiv is None else _compose_equiv(step, equiv)
    if track:
        if equiv is None:
            equiv = Equivalence(identity_map(cur), identity_map(cur))
        return cur, equiv
    return cur


def _deloop_one(c: GradedComplex, gid: str):
    g = c.gens[gid]
    objs, fwd, bwd = cobmod.deloop(g.obj)
    tgt = objs[0][0]
    out = GradedComplex(c.base)
    for h in c.gens.values():
        if h.gid == gid:
            continue
        out.add_generator(h)
    plus = Generator(f"{gid}+", g.tdeg, g.qshift + 1, tgt)
    minus = Generator(f"{gid}-", g.tdeg, g.qshift - 1, tgt)
    out.add_generator(plus)
    out.add_generator(minus)
    for (a, b), m in c.diff.items():
        if a != gid and b != gid:
            out.set_entry(a, b, m)
    for b in c._out[gid]:
        m = c.diff[(gid, b)]
        out.set_entry(plus.gid, b, cob_compose(m, bwd[0]))
        out.set_entry(minus.gid, b, cob_compose(m, bwd[1]))
    for a in c._in[gid]:
        m = c.diff[(a, gid)]
        out.set_entry(a, plus.gid, cob_compose(fwd[0], m))
        out.set_entry(a, minus.gid, cob_compose(fwd[1], m))
    # tracked isomorphism
    f = ChainMap(c, out)
    bw = ChainMap(out, c)
    for h in c.gens.values():
        if h.gid == gid:
            continue
        f.set_entry(h.gid, h.gid, c.base.identity(h.obj))
        bw.set_entry(h.gid, h.gid, c.base.identity(h.obj))
    f.set_entry(gid, plus.gid, fwd[0])
    f.set_entry(gid, minus.gid, fwd[1])
    bw.set_entry(plus.gid, gid, bwd[0])
    bw.set_entry(minus.gid, gid, bwd[1])
    return out, Equivalence(f, bw)


def gaussian_eliminate(c: GradedComplex, track: bool = False):
    """Cancel unit-times-identity differential entries between generators
    with equal object and q-shift until none remain; homotopy equivalent
    output (isomorphism-free zig-zag corrections)."""
    cur = c.copy()
    base = c.base
    equiv = Equivalence(identity_map(c), identity_map(c)) if track else None
    while True:
        pivot = None
        for (a, b) in sorted(cur.diff, key=lambda ab: (cur.gens[ab[0]].tdeg, ab)):
            ga, gb = cur.gens[a], cur.gens[b]
            if ga.qshift != gb.qshift:
                continue
            m = cur.diff[(a, b)]
            cmul = base.identity_multiple(m, ga.obj, gb.obj)
            if cmul is not None and not cmul.is_zero():
                pivot = (a, b, cmul)
                break
        if pivot is None:
            break
        a, b, eps = pivot
        inv = eps.inv()
        ins = [(x, cur.diff[(x, b)]) for x in sorted(cur._in[b]) if x != a]
        outs = [(y, cur.diff[(a, y)]) for y in sorted(cur._out[a]) if y != b]
        nxt = GradedComplex(base)
        for g in cur.gens.values():
            if g.gid not in (a, b):
                nxt.add_generator(g)
        for (x, y), m in cur.diff.items():
            if x in (a, b) or y in (a, b):
                continue
            nxt.set_entry(x, y, m)
        for (x, alpha) in ins:
            for (y, beta) in outs:
                # d'(x -> y) -= beta o eps^{-1} o alpha
                corr = base.compose(beta.scale(inv), alpha)
                old = nxt.entry(x, y)
                m = _neg(base, corr) if old is None else _add(base, old, _neg(base, corr))
                nxt.set_entry(x, y, m)
        if track:
            f = ChainMap(cur, nxt)
            g_map = ChainMap(nxt, cur)
            for g in nxt.gens.values():
                f.set_entry(g.gid, g.gid, base.identity(g.obj))
                g_map.set_entry(g.gid, g.gid, base.identity(g.obj))
            # F(b) = - sum_y  (d_{a->y}) o eps^{-1}; G(x) -= eps^{-1} o d_{x->b} into a
            for (y, beta) in outs:
                f.set_entry(b, y, _neg(base, beta.scale(inv)))
            for (x, alpha) in ins:
                g_map.set_entry(x, a, _neg(base, alpha.scale(inv)))
            equiv = _compose_equiv(Equivalence(f, g_map), equiv)
        cur = nxt
    return (cur, equiv) if track else cur


def simplify(c: GradedComplex, track: bool = False):
    """Alternate delooping and Gaussian elimination to a fixpoint."""
    cur = c
    equiv = Equivalence(identity_map(c), identity_map(c)) if track else None
    while True:
        before = len(cur.gens)
        had_circles = any(g.obj.circles for g in cur.gens.values()) if cur.base.kind == "BN" else False
        if track:
            cur, e1 = deloop_pass(cur, track=True)
            equiv = _compose_equiv(e1, equiv)
            cur, e2 = gaussian_eliminate(cur, track=True)
            equiv = _compose_equiv(e2, equiv)
        else:
            cur = deloop_pass(cur)
            cur = gaussian_eliminate(cur)
        if len(cur.gens) == before and not had_circles:
            break
    return (cur, equiv) if track else cur


# ---------------------------------------------------------------------------
# Homotopy solving


def null_homotopy_solve(
    f: ChainMap,
    window: tuple[int, int] | None = None,
    pair_filter=None,
):
    """Solve [delta, h] = f for h within the tdeg window.

    f must be closed.  Returns the ChainMap h, raises NotNullHomotopic with
    a witness when the system is inconsistent in the window interior, and
    WindowTooSmall when the inconsistency sits at the truncation boundary.
    ``pair_filter(u, v)`` optionally restricts where h may be supported.
    """
    X, Y = f.source, f.target
    base = X.base
    if window is None:
        # untruncated: no boundary rows exist
        lo = min(X.tdeg_range()[0], Y.tdeg_range()[0])
        hi = max(X.tdeg_range()[1], Y.tdeg_range()[1]) + 1
        interior_lo = lo - 1
    else:
        lo, hi = window
        interior_lo = lo + 1
    k = f.tdegree
    # unknowns: h entries (u -> v) with tdeg(v) = tdeg(u) + k - 1
    unknowns: dict = {}
    var_defs = []
    for u in X.gens.values():
        if not lo <= u.tdeg <= hi:
            continue
        for v in Y.gens.values():
            if v.tdeg != u.tdeg + k - 1:
                continue
            if pair_filter is not None and not pair_filter(u, v):
                continue
            degree = u.qshift - v.qshift + f.qdegree
            for key in base.hom_basis_keys(u.obj, v.obj, degree):
                var = len(var_defs)
                unknowns[(u.gid, v.gid, key)] = var
                var_defs.append((u.gid, v.gid, key))
    # equations: for (u, w) with tdeg(w) = tdeg(u) + k, the coefficient of
    # each hom-basis element of [delta,h] - f must vanish
    rows: list[dict] = []
    rhs: list[FieldElem] = []
    boundary_rows: set[int] = set()
    sign = 1 if (k - 1) % 2 else -1  # -(-1)^{|h|}
    for u in X.gens.values():
        if not lo <= u.tdeg <= hi:
            continue
        for w in Y.gens.values():
            if w.tdeg != u.tdeg + k:
                continue
            # collect the linear expression per hom coordinate of (u -> w)
            expr: dict = {}

            def bump(coord_key, var, c):
                expr.setdefault(coord_key, {})
                prev = expr[coord_key].get(var)
                tot = c if prev is None else prev + c
                if tot.is_zero():
                    expr[coord_key].pop(var, None)
                else:
                    expr[coord_key][var] = tot

            # delta_Y o h
            for v in Y.gens.values():
                if v.tdeg != u.tdeg + k - 1:
                    continue
                dm = Y.entry(v.gid, w.gid)
                if dm is None:
                    continue
                degree = u.qshift - v.qshift + f.qdegree
                for key in base.hom_basis_keys(u.obj, v.obj, degree):
                    var = unknowns.get((u.gid, v.gid, key))
                    if var is None:
                        continue
                    hmor = base.basis_morphism(u.obj, v.obj, key)
                    comp = base.compose(dm, hmor)
                    for ck, cc in _coords(base, u.obj, w.obj, comp).items():
                        bump(ck, var, cc)
            # -(-1)^{|h|} h o delta_X
            for v in X.gens.values():
                if v.tdeg != u.tdeg + 1:
                    continue
                dm = X.entry(u.gid, v.gid)
                if dm is None:
                    continue
                degree = v.qshift - w.qshift + f.qdegree
                for key in base.hom_basis_keys(v.obj, w.obj, degree):
                    var = unknowns.get((v.gid, w.gid, key))
                    if var is None:
                        continue
                    hmor = base.basis_morphism(v.obj, w.obj, key)
                    comp = base.compose(hmor, dm)
                    if sign < 0:
                        comp = _neg(base, comp)
                    for ck, cc in _coords(base, u.obj, w.obj, comp).items():
                        bump(ck, var, cc)
            fm = f.entry(u.gid, w.gid)
            fcoords = _coords(base, u.obj, w.obj, fm) if fm is not None else {}
            for ck in set(expr) | set(fcoords):
                rows.append(expr.get(ck, {}))
                rhs.append(fcoords.get(ck, F_ZERO))
                if u.tdeg <= interior_lo:
                    boundary_rows.add(len(rows) - 1)
    try:
        sol = solve_sparse(rows, rhs)
    except Inconsistent as exc:
        # locate whether the failure is a boundary artifact: retry without
        # boundary rows
        rows2 = [r for i, r in enumerate(rows) if i not in boundary_rows]
        rhs2 = [r for i, r in enumerate(rhs) if i not in boundary_rows]
        try:
            solve_sparse(rows2, rhs2)
        except Inconsistent:
            raise NotNullHomotopic("no null homotopy exists") from exc
        raise WindowTooSmall(
            "system inconsistent only at the truncation boundary"
        ) from exc
    h = ChainMap(X, Y, None, k - 1, f.qdegree)
    acc: dict = {}
    for (u, v, key), var in unknowns.items():
        cval = sol.get(var, F_ZERO)
        if cval.is_zero():
            continue
        m = base.basis_morphism(X.gens[u].obj, Y.gens[v].obj, key, cval)
        k2 = (u, v)
        acc[k2] = _add(base, acc[k2], m) if k2 in acc else m
    for (u, v), m in acc.items():
        h.set_entry(u, v, m)
    return h


def _coords(base, src_obj, tgt_obj, m):
    if base.kind == "BN":
        return base.coords(m)
    return base.coords_in(src_obj, tgt_obj, m)


def homotopic_to_zero(f: ChainMap, window=None) -> bool:
    try:
        null_homotopy_solve(f, window)
        return True
    except NotNullHomotopic:
        return False


# ---------------------------------------------------------------------------
# Homological perturbation


def perturb_transfer(parts, alpha, less, equivalences):
    """Lemma-style transfer of a one-sided twist along per-index equivalences.

    parts: dict index -> GradedComplex X_i (their internal differentials).
    alpha: dict (i, j) -> ChainMap X_j -> X_i of degree (1, 0), nonzero only
        for j < i in the given strict partial order ``less``.
    equivalences: dict index -> (Y_i, f_i, g_i, h_i) with f: X->Y, g: Y->X,
        h: degree (-1,0) endo of X satisfying [d, h] = id - g f.
    Returns (Y complex with the transferred twist beta, F: X_tot -> Y_tot).
    """
    idx = sorted(parts, key=str)
    for (i, j) in alpha:
        if not less(j, i):
            raise ChainConditionViolated(f"alpha[{i},{j}] violates the order")
    # chains: A_1 = alpha, A_{r+1}[i,j] = sum_m alpha[i,m] h_m A_r[m,j]
    base = next(iter(parts.values())).base

    def compose_maps(f2, f1):
        return f2.compose(f1)

    series: dict[tuple, ChainMap] = {}
    current = {k: v for k, v in alpha.items() if not v.is_zero()}
    sign = 1
    while current:
        for (i, j), m in current.items():
            acc = series.get((i, j))
            mm = m if sign > 0 else -m
            series[(i, j)] = mm if acc is None else acc + mm
        nxt: dict = {}
        for (i, mkey), am in alpha.items():
            for (m2, j), cm in current.items():
                if m2 != mkey:
                    continue
                _, _, _, hm = equivalences[mkey]
                comp = am.compose(hm.compose(cm))
                if comp.is_zero():
                    continue
                key = (i, j)
                nxt[key] = nxt[key] + comp if key in nxt else comp
        current = {k: v for k, v in nxt.items() if not v.is_zero()}
        sign = -sign
    # assemble Y with beta = f S g and the map F with components
    # F_ii = f_i, F_ij = -(f_i S_ij h_j) for i > j
    out = GradedComplex(base)
    for i in idx:
        y, _, _, _ = equivalences[i]
        for g in y.gens.values():
            out.add_generator(Generator(f"{i}.{g.gid}", g.tdeg, g.qshift, g.obj))
        for (a, b), m in y.diff.items():
            out.set_entry(f"{i}.{a}", f"{i}.{b}", m)
    for (i, j), s in series.items():
        _, fi, _, _ = equivalences[i]
        yj, _, gj, _ = equivalences[j]
        beta = fi.compose(s.compose(gj))
        for (a, b), m in beta.entries.items():
            old = out.entry(f"{j}.{a}", f"{i}.{b}")
            out.set_entry(
                f"{j}.{a}", f"{i}.{b}", m if old is None else _add(base, old, m)
            )
    # total F
    xtot = GradedComplex(base)
    for i in idx:
        x = parts[i]
        for g in x.gens.values():
            xtot.add_generator(Generator(f"{i}.{g.gid}", g.tdeg, g.qshift, g.obj))
        for (a, b), m in x.diff.items():
            xtot.set_entry(f"{i}.{a}", f"{i}.{b}", m)
    for (i, j), m in alpha.items():
        for (a, b), mm in m.entries.items():
            xtot.set_entry(f"{j}.{a}", f"{i}.{b}", mm)
    ftot = ChainMap(xtot, out)
    for i in idx:
        _, fi, _, _ = equivalences[i]
        for (a, b), m in fi.entries.items():
            ftot.set_entry(f"{i}.{a}", f"{i}.{b}", m)
    for (i, j), s in series.items():
        _, fi, _, _ = equivalences[i]
        _, _, _, hj = equivalences[j]
        comp = fi.compose(s.compose(hj))
        for (a, b), m in comp.entries.items():
            old = ftot.entry(f"{j}.{a}", f"{i}.{b}")
            m2 = _neg(base, m)
            ftot.set_entry(
                f"{j}.{a}", f"{i}.{b}", m2 if old is None else _add(base, old, m2)
            )
    return out, ftot


# ---------------------------------------------------------------------------
# Splicing


def splice(parts: list[GradedComplex], interfaces) -> GradedComplex:
    """Splice parts along shared interface terms.

    interfaces[i] = list of (left_gid_in_parts[i], right_gid_in_parts[i+1])
    pairs; the left generator (one t-degree below) is identified with the
    right generator, as the pre-spliced complex with -id connectors collapsed
    by Gaussian elimination (which generates all long composite arrows)."""
    base = parts[0].base
    total = GradedComplex(base)
    for i, p in enumerate(parts):
        for g in p.gens.values():
            total.add_generator(Generator(f"p{i}.{g.gid}", g.tdeg, g.qshift, g.obj))
        for (a, b), m in p.diff.items():
            total.set_entry(f"p{i}.{a}", f"p{i}.{b}", m)
    pivots = []
    for i, pairs in enumerate(interfaces):
        for (lg, rg) in pairs:
            gl = parts[i].gens[lg]
            gr = parts[i + 1].gens[rg]
            if gl.obj != gr.obj or gl.qshift != gr.qshift or gl.tdeg + 1 != gr.tdeg:
                raise InterfaceMismatch(
                    f"interface {lg} vs {rg}: objects or shifts disagree"
                )
            ident = base.identity(gl.obj)
            total.set_entry(f"p{i}.{lg}", f"p{i + 1}.{rg}", _neg(base, ident))
            pivots.append((f"p{i}.{lg}", f"p{i + 1}.{rg}"))
    # eliminate exactly the connector entries
    cur = total
    for (a, b) in pivots:
        cur = _eliminate_pair(cur, a, b)
    return cur


def _eliminate_pair(cur: GradedComplex, a: str, b: str) -> GradedComplex:
    base = cur.base
    m = cur.entry(a, b)
    eps = base.identity_multiple(m, cur.gens[a].obj, cur.gens[b].obj)
    assert eps is not None and not eps.is_zero()
    inv = eps.inv()
    ins = [(x, cur.diff[(x, b)]) for x in sorted(cur._in[b]) if x != a]
    outs = [(y, cur.diff[(a, y)]) for y in sorted(cur._out[a]) if y != b]
    nxt = GradedComplex(base)
    for g in cur.gens.values():
        if g.gid not in (a, b):
            nxt.add_generator(g)
    for (x, y), mm in cur.diff.items():
        if x in (a, b) or y in (a, b):
            continue
        nxt.set_entry(x, y, mm)
    for (x, alpha) in ins:
        for (y, beta) in outs:
            corr = base.compose(beta.scale(inv), alpha)
            old = nxt.entry(x, y)
            mm = _neg(base, corr) if old is None else _add(base, old, _neg(base, corr))
            nxt.set_entry(x, y, mm)
    return nxt


# ---------------------------------------------------------------------------
# Combing hairs


def comb(c: GradedComplex, omega, avals, order_less) -> GradedComplex:
    """Reorganize a one-sided twisted complex so that every differential
    component strictly increases (omega, a) lexicographically.

    omega: gid -> poset label; avals: gid -> int; order_less(x, y): strict
    order on omega labels.  Offending components are removed by conjugating
    with (1 + h) isomorphisms, h found by linear solving; a failed solve
    raises HypothesisFailed (the lemma's Hom-vanishing hypothesis broke)."""
    cur = c.copy()
    base = c.base

    def offending(a: str, b: str) -> bool:
        wa, wb = omega(a), omega(b)
        if order_less(wa, wb):
            return False
        if wa == wb and avals(a) < avals(b):
            return False
        return True

    # process sources from the top of the fine order downward
    gids = sorted(cur.gens, key=lambda g: (-cur.gens[g].tdeg, g))
    for gid in gids:
        bad = {b: cur.diff[(gid, b)] for b in sorted(cur._out[gid]) if offending(gid, b)}
        if not bad:
            continue
        # solve sum_v d[v -> w] h[gid -> v] = bad[w] restricted to offending w
        unknowns: dict = {}
        var_defs = []
        u = cur.gens[gid]
        for v in cur.gens.values():
            if v.tdeg != u.tdeg or v.gid == gid:
                continue
            degree = u.qshift - v.qshift
            for key in base.hom_basis_keys(u.obj, v.obj, degree):
                unknowns[(v.gid, key)] = len(var_defs)
                var_defs.append((v.gid, key))
        rows: list[dict] = []
        rhs: list[FieldElem] = []
        for w in sorted(b for b in cur.gens if cur.gens[b].tdeg == u.tdeg + 1):
            gw = cur.gens[w]
            if not offending(gid, w):
                continue
            expr: dict = {}
            for (vg, key), var in unknowns.items():
                dm = cur.entry(vg, w)
                if dm is None:
                    continue
                hmor = base.basis_morphism(u.obj, cur.gens[vg].obj, key)
                compm = base.compose(dm, hmor)
                for ck, cc in _coords(base, u.obj, gw.obj, compm).items():
                    expr.setdefault(ck, {})
                    prev = expr[ck].get(var)
                    tot = cc if prev is None else prev + cc
                    if tot.is_zero():
                        expr[ck].pop(var, None)
                    else:
                        expr[ck][var] = tot
            fm = bad.get(w)
            fcoords = _coords(base, u.obj, gw.obj, fm) if fm is not None else {}
            for ck in set(expr) | set(fcoords):
                rows.append(expr.get(ck, {}))
                rhs.append(fcoords.get(ck, F_ZERO))
        try:
            sol = solve_sparse(rows, rhs)
        except Inconsistent as exc:
            raise HypothesisFailed(
                f"no combing correction exists for generator {gid}"
            ) from exc
        # apply the isomorphism (1 + h): d' = (1+h) d (1-h) on the nose;
        # h has a single source gid in its own t-degree, so the conjugation
        # is d'(gid->w) = d - d h, d'(x->v-targets) gains h o d components
        hcomps: dict[str, object] = {}
        for (vg, key), var in unknowns.items():
            cval = sol.get(var, F_ZERO)
            if cval.is_zero():
                continue
            m = base.basis_morphism(u.obj, cur.gens[vg].obj, key, cval)
            hcomps[vg] = _add(base, hcomps[vg], m) if vg in hcomps else m
        if not hcomps:
            continue
        nxt = cur.copy()
        # row corrections: d'(gid -> w) = d(gid -> w) - sum_v d(v -> w) h_v
        for vg, hm in hcomps.items():
            for w in sorted(cur._out[vg]):
                dm = cur.diff[(vg, w)]
                corr = base.compose(dm, hm)
                old = nxt.entry(gid, w)
                mm = _neg(base, corr) if old is None else _add(base, old, _neg(base, corr))
                nxt.set_entry(gid, w, mm)
        # column corrections: d'(x -> v) += h_v-part of x -> gid
        for x in sorted(cur._in[gid]):
            dm = cur.diff[(x, gid)]
            for vg, hm in hcomps.items():
                corr = base.compose(hm, dm)
                old = nxt.entry(x, vg)
                mm = corr if old is None else _add(base, old, corr)
                nxt.set_entry(x, vg, mm)
        cur = nxt
    # verify the result is combed
    for (a, b) in cur.diff:
        if offending(a, b):
            raise HypothesisFailed(f"combing left an offending arrow {a}->{b}")
    return cur


# ---------------------------------------------------------------------------
# Contractibility verdicts


@dataclass
class WindowVerdict:
    contractible: bool
    window: tuple[int, int]
    residual: list[str]
    method: str

    def to_json(self) -> dict:
        return {
            "contractible": self.contractible,
            "window": list(self.window),
            "residual_generators": self.residual,
            "method": self.method,
        }


def contractible_on_window(c: GradedComplex, window: tuple[int, int]) -> WindowVerdict:
    """Is the complex contractible as far as the window can see: simplify and
    look for surviving generators inside the window; if some survive, try to
    null-homotope the identity on the window."""
    simp = simplify(c)
    lo, hi = window
    residual = [g.gid for g in simp.generators() if lo <= g.tdeg <= hi]
    if not residual:
        return WindowVerdict(True, window, [], "simplify")
    try:
        null_homotopy_solve(identity_map(simp), window)
        return WindowVerdict(True, window, residual, "null-homotopy of id")
    except (NotNullHomotopic, WindowTooSmall):
        return WindowVerdict(False, window, residual, "null-homotopy of id")

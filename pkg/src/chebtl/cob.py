"""Bar-Natan's dotted cobordism category in canonical connectivity+dots form.

For the Frobenius algebra k[x]/x^2, evaluation of a cobordism depends only
on connectivity, genus and dots.  Genus is eliminated eagerly (a handle is a
dot scaled by 2) and every stored term is fully neck-cut: each block is a
disk bounding exactly one boundary curve, carrying at most one dot.  In this
normal form a morphism is a dot assignment to the boundary curves of
(source, target), which makes the representation an honest basis: zero and
equality tests are structural.

Component ids: arcs are their sorted endpoint pairs (i, j); circles are
('c', k) with a stable index.  Sided ids prefix SRC/TGT.
"""
from __future__ import annotations

from itertools import product as _iproduct

from .coeff import F_ONE, FieldElem
from .tangle import FlatTangle, NotPlanar, compose, is_noncrossing, juxtapose

SRC, TGT = 0, 1


class GluingMismatch(ValueError):
    pass


class NoSuchBlock(KeyError):
    pass


class NoCircle(ValueError):
    pass


def arc_of(t: FlatTangle, point: int):
    q = t.pairs[point]
    return (point, q) if point < q else (q, point)


def _comp_key(comp):
    if comp[0] == "c":
        return (1, comp[1], comp[1])
    return (0, comp[0], comp[1])


def _elem_key(elem):
    side, comp = elem
    return (side,) + _comp_key(comp)


def boundary_curves(source: FlatTangle, target: FlatTangle):
    """Closed boundary curves of a cobordism source => target, canonically
    ordered.  Each curve is a frozenset of sided component ids; every
    component lies on exactly one curve."""
    assert (source.n, source.m) == (target.n, target.m)
    total = source.n + source.m
    visited = [False] * total
    curves = []
    for p0 in range(total):
        if visited[p0]:
            continue
        curve = set()
        p = p0
        while not visited[p]:
            visited[p] = True
            curve.add((SRC, arc_of(source, p)))
            q = source.pairs[p]
            visited[q] = True
            curve.add((TGT, arc_of(target, q)))
            p = target.pairs[q]
        curves.append(frozenset(curve))
    for k in range(source.circles):
        curves.append(frozenset({(SRC, ("c", k))}))
    for k in range(target.circles):
        curves.append(frozenset({(TGT, ("c", k))}))
    return sorted(curves, key=lambda c: sorted(map(_elem_key, c)))


def _expand_block(curve_ids: tuple[int, ...], genus: int, dots: int):
    """Neck-cut one genus-`genus` block with `dots` dots into disk terms.

    Returns (power_of_two, assignments) where each assignment maps curve id
    to its dot flag; an empty list means the block evaluates to zero.
    """
    d = dots + genus
    if d >= 2:
        return 0, []
    if not curve_ids:
        # closed component: sphere relations
        return (genus, [{}]) if d == 1 else (0, [])
    if d == 1:
        return genus, [{i: 1 for i in curve_ids}]
    return genus, [
        {j: (0 if j == i else 1) for j in curve_ids} for i in curve_ids
    ]


class Cobordism:
    """Linear combination of normal-form terms between fixed flat tangles.

    ``curves`` lists the boundary curves of (source, target); a term is a
    tuple of dot flags indexed by the curves."""

    __slots__ = ("source", "target", "curves", "terms")

    def __init__(self, source: FlatTangle, target: FlatTangle, terms=None):
        assert (source.n, source.m) == (target.n, target.m)
        self.source = source
        self.target = target
        self.curves = tuple(boundary_curves(source, target))
        self.terms: dict[tuple[int, ...], FieldElem] = {}
        if terms:
            for dots, c in terms.items():
                if c.is_zero():
                    continue
                prev = self.terms.get(dots)
                tot = c if prev is None else prev + c
                if tot.is_zero():
                    self.terms.pop(dots, None)
                else:
                    self.terms[dots] = tot

    # -- construction -----------------------------------------------------

    @staticmethod
    def zero(source: FlatTangle, target: FlatTangle) -> "Cobordism":
        return Cobordism(source, target)

    @staticmethod
    def from_blocks(
        source: FlatTangle,
        target: FlatTangle,
        blocks,
        dots,
        coeff: FieldElem = F_ONE,
        genus=None,
    ) -> "Cobordism":
        """Build from a block partition of the components (the raw
        connectivity form); blocks are neck-cut to the disk normal form.
        ``genus`` optionally assigns a genus to each block (default 0)."""
        out = Cobordism(source, target)
        curve_index = out._curve_index()
        gen = list(genus) if genus is not None else [0] * len(blocks)
        factors = []
        for blk, d, g in zip(blocks, dots, gen):
            curve_ids = sorted({curve_index[e] for e in blk})
            # a block must consist of whole curves
            span = set()
            for ci in curve_ids:
                span |= out.curves[ci]
            if span != frozenset(blk):
                raise GluingMismatch(
                    "block does not respect the side boundary: "
                    f"{sorted(map(str, blk))}"
                )
            factors.append(_expand_block(tuple(curve_ids), g, d))
        acc: dict[tuple[int, ...], FieldElem] = {}
        for chosen in _iproduct(*(f[1] for f in factors)):
            assignment = [0] * len(out.curves)
            for part in chosen:
                for ci, flag in part.items():
                    assignment[ci] = flag
            power = sum(f[0] for f in factors)
            c = coeff if not power else coeff * FieldElem.from_int(1 << power)
            key = tuple(assignment)
            prev = acc.get(key)
            tot = c if prev is None else prev + c
            if tot.is_zero():
                acc.pop(key, None)
            else:
                acc[key] = tot
        if factors and any(not f[1] for f in factors):
            acc = {}
        out.terms = acc
        return out

    def _curve_index(self) -> dict:
        out = {}
        for i, curve in enumerate(self.curves):
            for e in curve:
                out[e] = i
        return out

    # -- linear structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Cobordism") -> "Cobordism":
        if self.source != other.source or self.target != other.target:
            raise GluingMismatch("adding cobordisms with different boundaries")
        out = Cobordism(self.source, self.target)
        out.terms = dict(self.terms)
        for key, c in other.terms.items():
            prev = out.terms.get(key)
            tot = c if prev is None else prev + c
            if tot.is_zero():
                out.terms.pop(key, None)
            else:
                out.terms[key] = tot
        return out

    def __neg__(self) -> "Cobordism":
        out = Cobordism(self.source, self.target)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other: "Cobordism") -> "Cobordism":
        return self + (-other)

    def scale(self, c: FieldElem) -> "Cobordism":
        out = Cobordism(self.source, self.target)
        if not c.is_zero():
            out.terms = {k: x * c for k, x in self.terms.items()}
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cobordism)
            and self.source == other.source
            and self.target == other.target
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("Cobordism is not hashable")

    # -- degree -------------------------------------------------------------

    def term_degree(self, dots: tuple[int, ...]) -> int:
        b = len(self.curves)
        return -b + (self.source.n + self.source.m) // 2 + 2 * sum(dots)

    def degrees(self) -> set[int]:
        return {self.term_degree(d) for d in self.terms}

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) != 1:
            raise ValueError(f"inhomogeneous cobordism, degrees {sorted(degs)}")
        return degs.pop()

    def is_identity_multiple(self):
        """The coefficient c when self = c * identity, else None."""
        if self.source != self.target or len(self.terms) != 1:
            return None
        ((dots, c),) = self.terms.items()
        if any(dots):
            return None
        # with source == target every curve block must be the product sheet;
        # circles are the only way a single curve carries genus ambiguity,
        # and circle curves are split (SRC)/(TGT), never undotted together.
        for curve in self.curves:
            sides = {side for side, _ in curve}
            if sides != {SRC, TGT}:
                return None
        return c

    def blocks_view(self):
        """Terms in the spec's partition shape: (blocks, dots, coeff)."""
        out = []
        for dots, c in self.terms.items():
            out.append((self.curves, dots, c))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for dots, c in sorted(self.terms.items()):
            blk = "|".join(
                "{" + ",".join(f"{'st'[s]}{comp}" for s, comp in sorted(b, key=_elem_key))
                + ("*" if d else "") + "}"
                for b, d in zip(self.curves, dots)
            )
            bits.append(f"({c})[{blk}]")
        return " + ".join(bits)

    __repr__ = __str__

    def to_json(self) -> dict:
        from .tl import field_to_json, tangle_to_json

        def comp_json(comp):
            if comp[0] == "c":
                return ["c", comp[1]]
            return ["a", comp[0], comp[1]]

        return {
            "source": tangle_to_json(self.source),
            "target": tangle_to_json(self.target),
            "terms": [
                {
                    "blocks": [
                        [[side, *comp_json(comp)[0:]] for side, comp in sorted(b, key=_elem_key)]
                        for b in self.curves
                    ],
                    "dots": list(dots),
                    "coeff": field_to_json(c),
                }
                for dots, c in sorted(self.terms.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Cobordism":
        from .tl import field_from_json, tangle_from_json

        src = tangle_from_json(data["source"])
        tgt = tangle_from_json(data["target"])
        out = Cobordism(src, tgt)
        terms = {}
        for item in data["terms"]:
            dots = tuple(item["dots"])
            terms[dots] = field_from_json(item["coeff"])
        out.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        return out


def identity_cob(t: FlatTangle) -> Cobordism:
    blocks = [frozenset({(SRC, comp), (TGT, comp)}) for comp in t.components()]
    return Cobordism.from_blocks(t, t, blocks, [0] * len(blocks))


def elementary_cob(source: FlatTangle, target: FlatTangle, participating=None,
                   coeff: FieldElem = F_ONE) -> Cobordism:
    """Dot-free cobordism merging the participating sided components into one
    block and pairing every other component with its counterpart (which must
    exist in both tangles)."""
    part = frozenset(participating or [])
    blocks = []
    if part:
        blocks.append(part)
    src_rest = [c for c in source.components() if (SRC, c) not in part]
    tgt_rest = {c for c in target.components() if (TGT, c) not in part}
    for comp in src_rest:
        if comp not in tgt_rest:
            raise GluingMismatch(f"component {comp} has no counterpart")
        blocks.append(frozenset({(SRC, comp), (TGT, comp)}))
        tgt_rest.discard(comp)
    if tgt_rest:
        raise GluingMismatch(f"unmatched target components {tgt_rest}")
    return Cobordism.from_blocks(source, target, blocks, [0] * len(blocks), coeff)


def saddle(t: FlatTangle, a1, a2) -> Cobordism:
    """Saddle on components a1, a2 of t: merge two distinct components, or
    split one (a1 == a2) by pinching off a circle.  Degree 1."""
    comps = set(t.components())
    if a1 not in comps or a2 not in comps:
        raise NoSuchBlock(f"components {a1}, {a2} not in {t}")
    if a1 == a2:
        target = t.with_circles(1)
        new_circle = ("c", target.circles - 1)
        participating = {(SRC, a1), (TGT, a1), (TGT, new_circle)}
        blocks = [frozenset(participating)]
        for comp in t.components():
            if comp != a1:
                blocks.append(frozenset({(SRC, comp), (TGT, comp)}))
        return Cobordism.from_blocks(t, target, blocks, [0] * len(blocks))
    circles_involved = [a for a in (a1, a2) if a[0] == "c"]
    if len(circles_involved) == 2:
        k1, k2 = sorted((a1[1], a2[1]))
        target = FlatTangle(t.n, t.m, t.pairs, t.circles - 1)
        relab = _circle_removal_map(t.circles, k2)
        merged = ("c", relab[k1])
        blocks = [frozenset({(SRC, a1), (SRC, a2), (TGT, merged)})]
        for comp in t.components():
            if comp in (a1, a2):
                continue
            tc = ("c", relab[comp[1]]) if comp[0] == "c" else comp
            blocks.append(frozenset({(SRC, comp), (TGT, tc)}))
        return Cobordism.from_blocks(t, target, blocks, [0] * len(blocks))
    if len(circles_involved) == 1:
        circ, arc = (a1, a2) if a1[0] == "c" else (a2, a1)
        target = FlatTangle(t.n, t.m, t.pairs, t.circles - 1)
        relab = _circle_removal_map(t.circles, circ[1])
        blocks = [frozenset({(SRC, circ), (SRC, arc), (TGT, arc)})]
        for comp in t.components():
            if comp in (circ, arc):
                continue
            tc = ("c", relab[comp[1]]) if comp[0] == "c" else comp
            blocks.append(frozenset({(SRC, comp), (TGT, tc)}))
        return Cobordism.from_blocks(t, target, blocks, [0] * len(blocks))
    (x1, y1), (x2, y2) = a1, a2
    target = None
    for (p, q) in (((x1, x2), (y1, y2)), ((x1, y2), (y1, x2))):
        pairs = list(t.pairs)
        pairs[p[0]], pairs[p[1]] = p[1], p[0]
        pairs[q[0]], pairs[q[1]] = q[1], q[0]
        if is_noncrossing(t.n, t.m, tuple(pairs)):
            target = FlatTangle(t.n, t.m, tuple(pairs), t.circles)
            new_arcs = [tuple(sorted(p)), tuple(sorted(q))]
            break
    if target is None:
        raise NotPlanar(f"no planar saddle merging {a1} and {a2} in {t}")
    blocks = [
        frozenset({(SRC, a1), (SRC, a2), (TGT, new_arcs[0]), (TGT, new_arcs[1])})
    ]
    for comp in t.components():
        if comp in (a1, a2):
            continue
        blocks.append(frozenset({(SRC, comp), (TGT, comp)}))
    return Cobordism.from_blocks(t, target, blocks, [0] * len(blocks))


def _circle_removal_map(count: int, removed: int) -> dict[int, int]:
    out = {}
    j = 0
    for k in range(count):
        if k == removed:
            continue
        out[k] = j
        j += 1
    return out


def add_dot(s: Cobordism, comp, side: int = SRC) -> Cobordism:
    """Dot the curve containing the given component; doubly dotted terms
    vanish (x^2 = 0)."""
    sided = (side, comp)
    idx = None
    for i, curve in enumerate(s.curves):
        if sided in curve:
            idx = i
            break
    if idx is None:
        raise NoSuchBlock(f"no boundary curve contains {sided}")
    out: dict = {}
    for dots, c in s.terms.items():
        if dots[idx]:
            continue
        nd = list(dots)
        nd[idx] = 1
        key = tuple(nd)
        prev = out.get(key)
        tot = c if prev is None else prev + c
        if tot.is_zero():
            out.pop(key, None)
        else:
            out[key] = tot
    res = Cobordism(s.source, s.target)
    res.terms = out
    return res


def cob_degree(s: Cobordism) -> int:
    return s.degree()


# ---------------------------------------------------------------------------
# Composition


def _class_merge(nodes_chi, unions, node_dots):
    """Union-find; returns (find function, per-class chi and dots)."""
    parent = list(range(len(nodes_chi)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in unions:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry
    chi: dict[int, int] = {}
    dots: dict[int, int] = {}
    for i, c in enumerate(nodes_chi):
        r = find(i)
        chi[r] = chi.get(r, 0) + c
        dots[r] = dots.get(r, 0) + node_dots[i]
    return find, chi, dots


def cob_compose(top: Cobordism, bottom: Cobordism) -> Cobordism:
    """Vertical composition top o bottom; the middle tangle is glued, blocks
    merge by union-find, genus becomes 2^g and g dots, closed pieces
    evaluate by the sphere relations."""
    if bottom.target != top.source:
        raise GluingMismatch(f"middle mismatch: {bottom.target} vs {top.source}")
    out = Cobordism(bottom.source, top.target)
    if not bottom.terms or not top.terms:
        return out
    mid = bottom.target
    nb, nt = len(bottom.curves), len(top.curves)
    bot_index = bottom._curve_index()
    top_index = top._curve_index()
    unions = []
    arc_glues = []  # bottom-node per glued middle arc (chi -= 1 each)
    for comp in mid.components():
        x = bot_index[(TGT, comp)]
        y = nb + top_index[(SRC, comp)]
        unions.append((x, y))
        if comp[0] != "c":
            arc_glues.append(x)
    comp_curves = out.curves
    acc: dict[tuple[int, ...], FieldElem] = {}
    for bdots, bc in bottom.terms.items():
        for tdots, tc in top.terms.items():
            node_chi = [1] * (nb + nt)
            node_dots = list(bdots) + list(tdots)
            find, chi, cdots = _class_merge(node_chi, unions, node_dots)
            for x in arc_glues:
                chi[find(x)] -= 1
            # composite curves per class: source side through bottom curves,
            # target side through top curves
            class_curves: dict[int, list[int]] = {r: [] for r in chi}
            for ci, curve in enumerate(comp_curves):
                e = next(iter(curve))
                side, comp = e
                if side == SRC:
                    r = find(bot_index[e])
                else:
                    r = find(nb + top_index[e])
                class_curves[r].append(ci)
            coeff = bc * tc
            factors = []
            dead = False
            for r, chir in chi.items():
                cids = tuple(sorted(class_curves[r]))
                genus2 = 2 - len(cids) - chir
                if genus2 < 0 or genus2 % 2:
                    raise GluingMismatch(f"genus bookkeeping broke: {genus2}")
                power, assigns = _expand_block(cids, genus2 // 2, cdots[r])
                if not assigns:
                    dead = True
                    break
                factors.append((power, assigns))
            if dead:
                continue
            total_power = sum(f[0] for f in factors)
            if total_power:
                coeff = coeff * FieldElem.from_int(1 << total_power)
            for chosen in _iproduct(*(f[1] for f in factors)):
                assignment = [0] * len(comp_curves)
                for part in chosen:
                    for ci, flag in part.items():
                        assignment[ci] = flag
                key = tuple(assignment)
                prev = acc.get(key)
                tot = coeff if prev is None else prev + coeff
                if tot.is_zero():
                    acc.pop(key, None)
                else:
                    acc[key] = tot
    out.terms = acc
    return out


def cob_star(left: Cobordism, right: Cobordism) -> Cobordism:
    """Horizontal composition over composed tangles: left over (k,m) after
    right over (n,k), glued along the k vertical boundary faces."""
    src, _ = compose(left.source, right.source)
    tgt, _ = compose(left.target, right.target)
    k = left.source.n
    if right.source.m != k or right.target.m != left.target.n:
        raise GluingMismatch("tangle widths do not match for star composition")
    smap_l, smap_r, _ = _composite_component_maps(left.source, right.source, src)
    tmap_l, tmap_r, _ = _composite_component_maps(left.target, right.target, tgt)
    out = Cobordism(src, tgt)
    if not left.terms or not right.terms:
        return out
    nl, nr = len(left.curves), len(right.curves)
    l_index = left._curve_index()
    r_index = right._curve_index()
    unions = []
    face_nodes = []
    for p in range(k):
        cl = arc_of(left.source, p)
        cr = arc_of(right.source, right.source.n + p)
        x = l_index[(SRC, cl)]
        y = nl + r_index[(SRC, cr)]
        unions.append((x, y))
        face_nodes.append(x)
    # map composite curves to constituent nodes: build reverse component maps
    rev: dict = {}
    for comp, mapped in smap_l.items():
        rev.setdefault((SRC, mapped), ("l", SRC, comp))
    for comp, mapped in tmap_l.items():
        rev.setdefault((TGT, mapped), ("l", TGT, comp))
    for comp, mapped in smap_r.items():
        rev.setdefault((SRC, mapped), ("r", SRC, comp))
    for comp, mapped in tmap_r.items():
        rev.setdefault((TGT, mapped), ("r", TGT, comp))

    acc: dict[tuple[int, ...], FieldElem] = {}
    for ldots, lc in left.terms.items():
        for rdots, rc in right.terms.items():
            node_chi = [1] * (nl + nr)
            node_dots = list(ldots) + list(rdots)
            find, chi, cdots = _class_merge(node_chi, unions, node_dots)
            for x in face_nodes:
                chi[find(x)] -= 1
            class_curves: dict[int, list[int]] = {r: [] for r in chi}
            for ci, curve in enumerate(out.curves):
                e = next(iter(curve))
                which, side, comp = rev[e]
                if which == "l":
                    r = find(l_index[(side, comp)])
                else:
                    r = find(nl + r_index[(side, comp)])
                class_curves[r].append(ci)
            coeff = lc * rc
            factors = []
            dead = False
            for r, chir in chi.items():
                cids = tuple(sorted(class_curves[r]))
                genus2 = 2 - len(cids) - chir
                if genus2 < 0 or genus2 % 2:
                    raise GluingMismatch(f"genus bookkeeping broke: {genus2}")
                power, assigns = _expand_block(cids, genus2 // 2, cdots[r])
                if not assigns:
                    dead = True
                    break
                factors.append((power, assigns))
            if dead:
                continue
            total_power = sum(f[0] for f in factors)
            if total_power:
                coeff = coeff * FieldElem.from_int(1 << total_power)
            for chosen in _iproduct(*(f[1] for f in factors)):
                assignment = [0] * len(out.curves)
                for part in chosen:
                    for ci, flag in part.items():
                        assignment[ci] = flag
                key = tuple(assignment)
                prev = acc.get(key)
                tot = coeff if prev is None else prev + coeff
                if tot.is_zero():
                    acc.pop(key, None)
                else:
                    acc[key] = tot
    out.terms = acc
    return out


def _composite_component_maps(top: FlatTangle, bottom: FlatTangle, result: FlatTangle):
    """Component maps into the composite compose(top, bottom).  Composite
    circle indices: bottom's circles first, then top's, then the new middle
    circles in order of their smallest middle point."""
    map_top: dict = {}
    map_bot: dict = {}

    def walk_to_boundary(side: str, p: int):
        while True:
            if side == "bot":
                q = bottom.pairs[p]
                if q < bottom.n:
                    return ("B", q)
                side, p = "top", q - bottom.n
            else:
                q = top.pairs[p]
                if q >= top.n:
                    return ("T", q - top.n)
                side, p = "bot", bottom.n + q

    for kk in range(bottom.circles):
        map_bot[("c", kk)] = ("c", kk)
    for kk in range(top.circles):
        map_top[("c", kk)] = ("c", kk + bottom.circles)

    next_c = bottom.circles + top.circles
    visited = [False] * top.n
    mid_circle_of: dict[int, object] = {}
    for j0 in range(top.n):
        if visited[j0]:
            continue
        j = j0
        chain = []
        closed = False
        while True:
            visited[j] = True
            chain.append(j)
            q = top.pairs[j]
            if q >= top.n:
                break
            visited[q] = True
            chain.append(q)
            r = bottom.pairs[bottom.n + q]
            if r < bottom.n:
                break
            j = r - bottom.n
            if j == j0:
                closed = True
                break
        if closed:
            cid = ("c", next_c)
            next_c += 1
            for j in chain:
                mid_circle_of[j] = cid

    for i, j in [(i, j) for i, j in enumerate(bottom.pairs) if i < j]:
        comp = (i, j)
        if i < bottom.n:
            map_bot[comp] = arc_of(result, i)
        elif i - bottom.n in mid_circle_of:
            map_bot[comp] = mid_circle_of[i - bottom.n]
        else:
            kind, pt = walk_to_boundary("top", i - bottom.n)
            point = pt if kind == "B" else result.n + pt
            map_bot[comp] = arc_of(result, point)
    for i, j in [(i, j) for i, j in enumerate(top.pairs) if i < j]:
        comp = (i, j)
        if j >= top.n:
            map_top[comp] = arc_of(result, result.n + (j - top.n))
        elif i in mid_circle_of:
            map_top[comp] = mid_circle_of[i]
        else:
            kind, pt = walk_to_boundary("bot", bottom.n + i)
            point = pt if kind == "B" else result.n + pt
            map_top[comp] = arc_of(result, point)
    return map_top, map_bot, next_c


def cob_juxtapose(a: Cobordism, b: Cobordism) -> Cobordism:
    """Place b to the right of a (monoidal product)."""
    src = juxtapose(a.source, b.source)
    tgt = juxtapose(a.target, b.target)
    out = Cobordism(src, tgt)
    if not a.terms or not b.terms:
        return out

    def relab_arc(told: FlatTangle, other_n: int, other_m: int, right: bool):
        def f(x):
            if right:
                return x + other_n if x < told.n else x + other_n + other_m
            return x if x < told.n else x + other_n
        return f

    fa_s = relab_arc(a.source, b.source.n, b.source.m, right=False)
    fa_t = relab_arc(a.target, b.target.n, b.target.m, right=False)
    fb_s = relab_arc(b.source, a.source.n, a.source.m, right=True)
    fb_t = relab_arc(b.target, a.target.n, a.target.m, right=True)

    def map_a(e):
        side, comp = e
        if comp[0] == "c":
            return (side, comp)
        f = fa_s if side == SRC else fa_t
        i, j = f(comp[0]), f(comp[1])
        return (side, (i, j) if i < j else (j, i))

    def map_b(e):
        side, comp = e
        if comp[0] == "c":
            off = a.source.circles if side == SRC else a.target.circles
            return (side, ("c", comp[1] + off))
        f = fb_s if side == SRC else fb_t
        i, j = f(comp[0]), f(comp[1])
        return (side, (i, j) if i < j else (j, i))

    out_index = out._curve_index()
    # each curve of a / b maps to a unique composite curve
    a_curve_map = [out_index[map_a(next(iter(c)))] for c in a.curves]
    b_curve_map = [out_index[map_b(next(iter(c)))] for c in b.curves]
    acc: dict[tuple[int, ...], FieldElem] = {}
    for adots, ca in a.terms.items():
        for bdots, cb in b.terms.items():
            assignment = [0] * len(out.curves)
            for i, d in enumerate(adots):
                assignment[a_curve_map[i]] = d
            for i, d in enumerate(bdots):
                assignment[b_curve_map[i]] = d
            key = tuple(assignment)
            c = ca * cb
            prev = acc.get(key)
            tot = c if prev is None else prev + c
            if tot.is_zero():
                acc.pop(key, None)
            else:
                acc[key] = tot
    out.terms = acc
    return out


def neck_cut_expand(source: FlatTangle, target: FlatTangle, blocks, dots,
                    block_index: int, group1, group2,
                    coeff: FieldElem = F_ONE) -> Cobordism:
    """One neck-cutting step on a raw connectivity term: the chosen block is
    presented as a tube joining group1 and group2 and replaced by the
    two-term dotted sum.  With an empty group the rewrite is the identity.
    The result is returned in the disk normal form (further cuts are the
    normalization itself, so repeated application is stable)."""
    g1, g2 = frozenset(group1), frozenset(group2)
    if not g1 or not g2:
        return Cobordism.from_blocks(source, target, blocks, dots, coeff)
    blk = frozenset(blocks[block_index])
    if g1 | g2 != blk or g1 & g2:
        raise ValueError("groups must partition the chosen block")
    rest_b = list(blocks[:block_index]) + list(blocks[block_index + 1:])
    rest_d = list(dots[:block_index]) + list(dots[block_index + 1:])
    had_dot = dots[block_index]
    out = Cobordism.zero(source, target)
    if had_dot:
        out = out + Cobordism.from_blocks(
            source, target, rest_b + [g1, g2], rest_d + [1, 1], coeff
        )
    else:
        out = out + Cobordism.from_blocks(
            source, target, rest_b + [g1, g2], rest_d + [1, 0], coeff
        )
        out = out + Cobordism.from_blocks(
            source, target, rest_b + [g1, g2], rest_d + [0, 1], coeff
        )
    return out


def hom_basis(t: FlatTangle, t2: FlatTangle, degree: int | None = None):
    """Basis of Hom(t, t2) in the disk normal form: all dot assignments to
    the boundary curves, optionally filtered to one degree.  Together with
    the raw partition terms these span Hom; in normal form they are a
    basis."""
    curves = boundary_curves(t, t2)
    b = len(curves)
    base = (t.n + t.m) // 2
    out = []
    for mask in range(1 << b):
        dots = tuple((mask >> i) & 1 for i in range(b))
        deg = -b + base + 2 * sum(dots)
        if degree is None or deg == degree:
            out.append(dots)
    return out


def basis_cob(t: FlatTangle, t2: FlatTangle, dots, coeff: FieldElem = F_ONE) -> Cobordism:
    out = Cobordism(t, t2)
    if not coeff.is_zero():
        out.terms = {tuple(dots): coeff}
    return out


def deloop(t: FlatTangle, which: int | None = None):
    """Delooping data for one circle of t.

    Returns ([(tangle, +1), (tangle, -1)], forward, backward): the undotted
    cap pairs with the q^+1 summand and the dotted cap with q^-1 (the
    degree-0 convention for our shift sign); backward = (dotted cup, cup).
    """
    if t.circles < 1:
        raise NoCircle("no circle to deloop")
    k = t.circles - 1 if which is None else which
    target = FlatTangle(t.n, t.m, t.pairs, t.circles - 1)
    relab = _circle_removal_map(t.circles, k)
    circ = ("c", k)

    def halfdisc(dotted: bool, up: bool) -> Cobordism:
        src, tgt = (t, target) if up else (target, t)
        blocks = [frozenset({(SRC if up else TGT, circ)})]
        dots = [1 if dotted else 0]
        for comp in t.components():
            if comp == circ:
                continue
            other = ("c", relab[comp[1]]) if comp[0] == "c" else comp
            pair = (comp, other) if up else (other, comp)
            blocks.append(frozenset({(SRC, pair[0]), (TGT, pair[1])}))
            dots.append(0)
        return Cobordism.from_blocks(src, tgt, blocks, dots)

    objects = [(target, +1), (target, -1)]
    forward = [halfdisc(False, up=True), halfdisc(True, up=True)]
    backward = [halfdisc(True, up=False), halfdisc(False, up=False)]
    return objects, forward, backward

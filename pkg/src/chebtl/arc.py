"""Khovanov's arc algebra H^n, its tangle bimodules, and quantum Hochschild
homology at desk scale.

Basis elements of _aH^n_b are cobordisms a => b in the Bar-Natan morphism
category BN(0, 2n): the boundary curves of such a cobordism are exactly the
circles of the glued diagram reflect(a) o b, a dot is the label x, and the
cobordism degree is the arc-algebra degree including the global q^n shift.
Multiplication is plain cobordism composition, so the Frobenius rules are
exercised through the cob module throughout.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .coeff import F_ONE, F_ZERO, FieldElem, require_genericity
from .cob import Cobordism, basis_cob, cob_compose, cob_star, hom_basis, identity_cob
from .linalg import SparseRowReducer
from .tangle import FlatTangle, all_matchings, catalan, compose, identity_tangle, reflect
from .tl import delta_power


class ScaleExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ArcBasisElement:
    """A basis element of _aH^n_b: matchings a, b and a dot assignment to
    the circles of reflect(a) o b (dot = label x, no dot = label 1)."""

    a: int  # index into the matching list
    b: int
    dots: tuple[int, ...]

    def qdegree(self, algebra: "ArcAlgebra") -> int:
        ta, tb = algebra.matchings[self.a], algebra.matchings[self.b]
        return basis_cob(ta, tb, self.dots).degree()


class ArcAlgebra:
    """H^n with its full multiplication table."""

    def __init__(self, n: int):
        if n > 4:
            raise ScaleExceeded("arc algebras are built for n <= 4")
        require_genericity(4 * n)
        self.n = n
        self.matchings = all_matchings(0, 2 * n)
        self.basis: list[ArcBasisElement] = []
        self.index: dict[ArcBasisElement, int] = {}
        for a, ta in enumerate(self.matchings):
            for b, tb in enumerate(self.matchings):
                for dots in hom_basis(ta, tb):
                    el = ArcBasisElement(a, b, dots)
                    self.index[el] = len(self.basis)
                    self.basis.append(el)

    def catalan(self) -> int:
        return len(self.matchings)

    def dim(self) -> int:
        return len(self.basis)

    def graded_dimension(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for el in self.basis:
            d = el.qdegree(self)
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def as_cob(self, el: ArcBasisElement, coeff: FieldElem = F_ONE) -> Cobordism:
        return basis_cob(self.matchings[el.a], self.matchings[el.b], el.dots, coeff)

    def vector_of(self, x: Cobordism, a: int, b: int) -> dict[int, FieldElem]:
        """Coordinates of a cobordism a => b in the global basis."""
        out = {}
        for dots, c in x.terms.items():
            out[self.index[ArcBasisElement(a, b, dots)]] = c
        return out

    def multiply(self, x: ArcBasisElement, y: ArcBasisElement):
        """x y for x in _aH_b and y in _bH_c (zero unless x.b == y.a);
        returns (target (a, c), Cobordism)."""
        if x.b != y.a:
            return None
        comp = cob_compose(self.as_cob(y), self.as_cob(x))
        return (x.a, y.b), comp

    def idempotent(self, a: int) -> ArcBasisElement:
        t = self.matchings[a]
        dots = tuple(0 for _ in identity_cob(t).curves)
        return ArcBasisElement(a, a, dots)

    def check_associativity(self) -> bool:
        """(xy)z == x(yz) over all composable basis triples."""
        for x in self.basis:
            for y in self.basis:
                if x.b != y.a:
                    continue
                xy = cob_compose(self.as_cob(y), self.as_cob(x))
                for z in self.basis:
                    if y.b != z.a:
                        continue
                    yz = cob_compose(self.as_cob(z), self.as_cob(y))
                    lhs = cob_compose(self.as_cob(z), xy)
                    rhs = cob_compose(yz, self.as_cob(x))
                    if lhs != rhs:
                        return False
        return True

    def check_unital(self) -> bool:
        """sum_a (a) is a two-sided unit and the (a) are orthogonal."""
        for a in range(len(self.matchings)):
            ia = self.as_cob(self.idempotent(a))
            if cob_compose(ia, ia) != ia:
                return False
            for b in range(len(self.matchings)):
                if a == b:
                    continue
                # different boundaries cannot even compose
            for x in self.basis:
                xc = self.as_cob(x)
                if x.a == a and cob_compose(xc, ia) != xc:
                    return False
                if x.b == a and cob_compose(ia, xc) != xc:
                    return False
        return True


def arc_algebra(n: int) -> ArcAlgebra:
    return ArcAlgebra(n)


def graded_dimension_formula(n: int) -> dict[int, int]:
    """dim_q H^n = sum_(a,b) q^n (q+q^-1)^(#circles(reflect(a) o b))."""
    ms = all_matchings(0, 2 * n)
    out: dict[int, int] = {}
    for a in ms:
        ra = reflect(a)
        for b in ms:
            glued, _ = compose(ra, b)
            c = glued.circles
            for k in range(c + 1):
                d = n + (2 * k - c)
                out[d] = out.get(d, 0) + _binom(c, k)
    return dict(sorted(out.items()))


def _binom(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


@dataclass
class SweetBimodule:
    """F_n(T) for a flat (2n, 2n) tangle T: basis and the two actions."""

    algebra: ArcAlgebra
    tangle: FlatTangle
    basis: list[tuple[int, int, tuple[int, ...]]]  # (a, b, dots)

    def dim(self) -> int:
        return len(self.basis)


def bimodule_of_tangle(algebra: ArcAlgebra, t: FlatTangle) -> SweetBimodule:
    """_aF(T)_b = Hom(a, T o b) in BN(0, 2n), with actions by composition
    (left) and by T-star-composition (right)."""
    basis = []
    for a, ta in enumerate(algebra.matchings):
        for b, tb in enumerate(algebra.matchings):
            tcomp, _ = compose(t, tb)
            for dots in hom_basis(ta, tcomp):
                basis.append((a, b, dots))
    return SweetBimodule(algebra, t, basis)


def bimodule_left_action(bm: SweetBimodule, x: ArcBasisElement, m):
    """x . m for x in _a'H_a, m in _aF(T)_b."""
    a, b, dots = m
    if x.b != a:
        return None
    alg = bm.algebra
    tcomp, _ = compose(bm.tangle, alg.matchings[b])
    mc = basis_cob(alg.matchings[a], tcomp, dots)
    return (x.a, b), cob_compose(mc, alg.as_cob(x))


def bimodule_right_action(bm: SweetBimodule, m, y: ArcBasisElement):
    """m . y for m in _aF(T)_b, y in _bH_b'."""
    a, b, dots = m
    if y.a != b:
        return None
    alg = bm.algebra
    tcomp, _ = compose(bm.tangle, alg.matchings[b])
    mc = basis_cob(alg.matchings[a], tcomp, dots)
    ty = cob_star(identity_cob(bm.tangle), alg.as_cob(y))
    return (a, y.b), cob_compose(ty, mc)


# ---------------------------------------------------------------------------
# Quantum coinvariants and the quantum bar complex


def quantum_coinvariants_rank(n: int):
    """Rank and spanning data of coInv_q(H^n) = H^n / Span{xy - q^|x| yx}.

    Returns (rank, graded dimension of the quotient, idempotents_span)."""
    alg = arc_algebra(n)
    red = SparseRowReducer()
    for x in alg.basis:
        dx = x.qdegree(alg)
        xc = alg.as_cob(x)
        for y in alg.basis:
            vec: dict[int, FieldElem] = {}
            if x.b == y.a:
                xy = cob_compose(alg.as_cob(y), xc)
                for idx, c in alg.vector_of(xy, x.a, y.b).items():
                    vec[idx] = vec.get(idx, F_ZERO) + c
            if y.b == x.a:
                yx = cob_compose(xc, alg.as_cob(y))
                qd = FieldElem.q_power(dx)
                for idx, c in alg.vector_of(yx, y.a, x.b).items():
                    vec[idx] = vec.get(idx, F_ZERO) - qd * c
            vec = {k: v for k, v in vec.items() if not v.is_zero()}
            if vec:
                red.add_row(vec)
    span_rank = red.rank
    rank = alg.dim() - span_rank
    # idempotents must stay independent in the quotient and span it
    idem_ok = True
    count_new = 0
    for a in range(alg.catalan()):
        el = alg.idempotent(a)
        vec = {alg.index[el]: F_ONE}
        if red.add_row(vec):
            count_new += 1
        else:
            idem_ok = False
    spanning = idem_ok and (red.rank == alg.dim() - rank + count_new) and (
        count_new == alg.catalan()
    )
    # after adding the idempotents the reducer must contain every basis vector
    if spanning:
        for i in range(alg.dim()):
            if not red.contains({i: F_ONE}):
                spanning = False
                break
    graded: dict[int, int] = {}
    return rank, spanning


def quantum_hochschild_bar(n: int, i_max: int, classical: bool = False):
    """Graded ranks of HH_i^q(H^n) for i <= i_max via the truncated quantum
    bar complex; the cyclic face is twisted by q^(-|last factor|), the
    unique placement matching coInv_q exactly.  With classical=True the
    twist is dropped (the q -> 1 control)."""
    if n != 1:
        raise ScaleExceeded("the bar complex is desk-scale: n = 1 only")
    if i_max > 3:
        raise ScaleExceeded("i_max <= 3")
    alg = arc_algebra(n)
    dim = alg.dim()
    basis = alg.basis

    def mult(i: int, j: int) -> dict[int, FieldElem]:
        x, y = basis[i], basis[j]
        res = alg.multiply(x, y)
        if res is None:
            return {}
        (a, c), comp = res
        return alg.vector_of(comp, a, c)

    def deg(i: int) -> int:
        return basis[i].qdegree(alg)

    # chains: C_p = H^(x (p+1)); index tuples
    def tuples(p: int):
        return list(itertools.product(range(dim), repeat=p + 1))

    def face(tup, i):
        """d_i: multiply slots i, i+1; the last face wraps with the twist."""
        p = len(tup) - 1
        out: dict[tuple, FieldElem] = {}
        if i < p:
            prod = mult(tup[i], tup[i + 1])
            for idx, c in prod.items():
                nt = tup[:i] + (idx,) + tup[i + 2:]
                out[nt] = out.get(nt, F_ZERO) + c
        else:
            prod = mult(tup[p], tup[0])
            tw = F_ONE if classical else FieldElem.q_power(-deg(tup[p]))
            for idx, c in prod.items():
                nt = (idx,) + tup[1:p]
                out[nt] = out.get(nt, F_ZERO) + tw * c
        return out

    def boundary(p: int):
        """b_p: C_p -> C_(p-1) as sparse rows indexed by source tuples."""
        rows = {}
        for tup in tuples(p):
            acc: dict[tuple, FieldElem] = {}
            for i in range(p + 1):
                for nt, c in face(tup, i).items():
                    if i % 2:
                        c = -c
                    prev = acc.get(nt)
                    tot = c if prev is None else prev + c
                    if tot.is_zero():
                        acc.pop(nt, None)
                    else:
                        acc[nt] = tot
            rows[tup] = acc
        return rows

    ranks = {}
    bmaps = {p: boundary(p) for p in range(1, i_max + 2)}
    from .linalg import rank_of

    rk = {p: rank_of(list(bmaps[p].values())) for p in bmaps}
    dims = {p: dim ** (p + 1) for p in range(0, i_max + 2)}
    out = {}
    for i in range(0, i_max + 1):
        if i == 0:
            out[0] = dims[0] - rk[1]
        else:
            ker = dims[i] - rk[i]
            out[i] = ker - rk[i + 1]
    return out


def catalan_numbers(up_to: int) -> list[int]:
    return [catalan(k) for k in range(up_to + 1)]

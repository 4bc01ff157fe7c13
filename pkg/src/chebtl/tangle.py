"""Flat (n,m)-tangles: noncrossing perfect matchings plus closed circles.

Boundary points are indexed 0..n-1 for the bottom (left to right) and
n..n+m-1 for the top (left to right).  Noncrossing is balanced nesting in the
counterclockwise disc order: bottom left to right, then top right to left.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


class BoundaryMismatch(ValueError):
    """Inner boundary counts of a composition disagree."""


class InvalidPosition(ValueError):
    """Generator position out of range."""


class NotSquare(ValueError):
    """Closure of a non-square tangle requested."""


class NotPlanar(ValueError):
    """An operation would produce a crossing diagram."""


@dataclass(frozen=True)
class FlatTangle:
    """A crossingless matching on n bottom and m top points, with a count of
    free closed circles.

    ``pairs[i]`` is the partner of boundary point i; the matching is a fixed
    point free involution.
    """

    n: int
    m: int
    pairs: tuple[int, ...]
    circles: int = 0

    def __post_init__(self):
        assert len(self.pairs) == self.n + self.m
        assert (self.n + self.m) % 2 == 0
        assert self.circles >= 0

    def validate(self) -> None:
        """Check the involution and noncrossing invariants."""
        total = self.n + self.m
        for i, j in enumerate(self.pairs):
            if j == i or not 0 <= j < total or self.pairs[j] != i:
                raise ValueError(f"not a fixed point free involution at {i}")
        if not is_noncrossing(self.n, self.m, self.pairs):
            raise NotPlanar(f"matching {self.pairs} is crossing")

    def drop_circles(self) -> "FlatTangle":
        if self.circles == 0:
            return self
        return FlatTangle(self.n, self.m, self.pairs, 0)

    def with_circles(self, k: int) -> "FlatTangle":
        if k == 0:
            return self
        return FlatTangle(self.n, self.m, self.pairs, self.circles + k)

    def arcs(self) -> list[tuple[int, int]]:
        """Arc components as sorted endpoint pairs."""
        return [(i, j) for i, j in enumerate(self.pairs) if i < j]

    def components(self) -> list:
        """All components: arcs as (i, j) pairs, circles as ('c', k)."""
        out: list = self.arcs()
        out.extend(("c", k) for k in range(self.circles))
        return out

    def is_square(self) -> bool:
        return self.n == self.m

    def __str__(self) -> str:
        arcs = ",".join(f"{_label(self, i)}-{_label(self, j)}" for i, j in self.arcs())
        extra = f" +{self.circles}o" if self.circles else ""
        return f"({self.n},{self.m})[{arcs}]{extra}"


def _label(t: FlatTangle, i: int) -> str:
    return f"B{i + 1}" if i < t.n else f"T{i - t.n + 1}"


def boundary_order(n: int, m: int) -> list[int]:
    """Disc order of the boundary points: B1..Bn then Tm..T1."""
    return list(range(n)) + list(range(n + m - 1, n - 1, -1))


def is_noncrossing(n: int, m: int, pairs: tuple[int, ...]) -> bool:
    """Balanced parenthesis check in the disc order.

    >>> is_noncrossing(2, 2, (2, 3, 0, 1))
    True
    >>> is_noncrossing(4, 0, (2, 3, 0, 1))
    False
    """
    pos = {p: k for k, p in enumerate(boundary_order(n, m))}
    stack: list[int] = []
    for p in boundary_order(n, m):
        q = pairs[p]
        if pos[q] > pos[p]:
            stack.append(p)
        else:
            if not stack or stack[-1] != q:
                return False
            stack.pop()
    return not stack


@dataclass(frozen=True)
class TangleGenerator:
    """Symbolic generator: identity, cup_i, cap_i or turnback_i on n strands."""

    kind: str
    n: int
    i: int = 0

    def __post_init__(self):
        if self.kind not in ("identity", "cup", "cap", "turnback"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind != "identity" and not 1 <= self.i <= self.n - 1:
            raise InvalidPosition(f"position {self.i} not in 1..{self.n - 1}")


def identity_tangle(n: int) -> FlatTangle:
    return FlatTangle(n, n, tuple(range(n, 2 * n)) + tuple(range(n)))


def cap_tangle(n: int, i: int) -> FlatTangle:
    """(n, n-2)-tangle joining bottom points i, i+1 (1-indexed)."""
    if not 1 <= i <= n - 1:
        raise InvalidPosition(f"cap position {i} not in 1..{n - 1}")
    pairs = [0] * (2 * n - 2)
    pairs[i - 1], pairs[i] = i, i - 1
    for b in range(i - 1):
        pairs[b] = n + b
        pairs[n + b] = b
    for b in range(i + 1, n):
        pairs[b] = n + b - 2
        pairs[n + b - 2] = b
    return FlatTangle(n, n - 2, tuple(pairs))


def cup_tangle(n: int, i: int) -> FlatTangle:
    """(n-2, n)-tangle joining top points i, i+1 (1-indexed)."""
    return reflect(cap_tangle(n, i))


def turnback_tangle(n: int, i: int) -> FlatTangle:
    """B_i = cup_i o cap_i as an (n, n)-tangle."""
    t, _ = compose(cup_tangle(n, i), cap_tangle(n, i))
    return t


def make_generator(g: TangleGenerator) -> FlatTangle:
    if g.kind == "identity":
        return identity_tangle(g.n)
    if g.kind == "cap":
        return cap_tangle(g.n, g.i)
    if g.kind == "cup":
        return cup_tangle(g.n, g.i)
    return turnback_tangle(g.n, g.i)


@lru_cache(maxsize=1 << 20)
def _compose_match(
    top_pairs: tuple[int, ...], top_n: int,
    bot_pairs: tuple[int, ...], bot_n: int,
) -> tuple[tuple[int, ...], int]:
    """Path-following core of composition; returns (pairs, new circles).

    Middle point j means: the bottom tangle's top point bot_n + j glued to
    the top tangle's bottom point j.
    """
    k = top_n
    top_m = len(top_pairs) - top_n
    n, m = bot_n, top_m

    def follow(side: str, p: int) -> int:
        # walk along a strand until it exits at a result boundary point
        while True:
            if side == "bot":
                q = bot_pairs[p]
                if q < bot_n:
                    return q
                side, p = "top", q - bot_n
            else:
                q = top_pairs[p]
                if q >= top_n:
                    return n + (q - top_n)
                side, p = "bot", bot_n + q

    pairs = [0] * (n + m)
    for i in range(n):
        pairs[i] = follow("bot", i)
    for j in range(m):
        pairs[n + j] = follow("top", top_n + j)

    # circles: cycles of middle points never reaching the boundary
    visited = [False] * k
    circles = 0
    for j0 in range(k):
        if visited[j0]:
            continue
        j = j0
        closed = False
        while True:
            visited[j] = True
            q = top_pairs[j]
            if q >= top_n:
                break
            visited[q] = True
            r = bot_pairs[bot_n + q]
            if r < bot_n:
                break
            j = r - bot_n
            if j == j0:
                closed = True
                break
        if closed:
            circles += 1
    return tuple(pairs), circles


def compose(top: FlatTangle, bottom: FlatTangle) -> tuple[FlatTangle, int]:
    """Vertical stacking: top o bottom, gluing bottom's top row to top's
    bottom row.  Returns (tangle, newly closed circles); the result tangle
    already carries all circles (existing plus new)."""
    if top.n != bottom.m:
        raise BoundaryMismatch(
            f"cannot compose ({top.n},{top.m}) onto ({bottom.n},{bottom.m})"
        )
    pairs, new_circles = _compose_match(top.pairs, top.n, bottom.pairs, bottom.n)
    total = bottom.circles + top.circles + new_circles
    return FlatTangle(bottom.n, top.m, pairs, total), new_circles


def juxtapose(a: FlatTangle, b: FlatTangle) -> FlatTangle:
    """Place b to the right of a; boundary counts and circles add."""
    n, m = a.n + b.n, a.m + b.m

    def relab_a(i: int) -> int:
        return i if i < a.n else i + b.n

    def relab_b(i: int) -> int:
        return i + a.n if i < b.n else i + a.n + a.m

    pairs = [0] * (n + m)
    for i, j in enumerate(a.pairs):
        pairs[relab_a(i)] = relab_a(j)
    for i, j in enumerate(b.pairs):
        pairs[relab_b(i)] = relab_b(j)
    return FlatTangle(n, m, tuple(pairs), a.circles + b.circles)


def reflect(a: FlatTangle) -> FlatTangle:
    """Mirror across a horizontal line: bottom and top swap."""

    def relab(i: int) -> int:
        return i + a.m if i < a.n else i - a.n

    pairs = [0] * (a.n + a.m)
    for i, j in enumerate(a.pairs):
        pairs[relab(i)] = relab(j)
    return FlatTangle(a.m, a.n, tuple(pairs), a.circles)


def through_degree(a: FlatTangle) -> int:
    """Number of strands connecting bottom to top."""
    return sum(1 for i in range(a.n) if a.pairs[i] >= a.n)


def planar_closure(a: FlatTangle) -> int:
    """Loop count after joining Bi to Ti for all i, plus existing circles."""
    if not a.is_square():
        raise NotSquare("planar closure needs a square tangle")
    n = a.n
    visited = [False] * (2 * n)
    loops = 0
    for s in range(2 * n):
        if visited[s]:
            continue
        loops += 1
        p = s
        while not visited[p]:
            visited[p] = True
            q = a.pairs[p]
            visited[q] = True
            p = q + n if q < n else q - n  # closure arc Bi <-> Ti
    return loops + a.circles


def annular_closure(a: FlatTangle) -> tuple[int, int]:
    """(essential, trivial) circle counts of the annular closure.

    Loops are traced through the tangle arcs and the closure bands with
    their winding numbers: a loop is essential exactly when its net number
    of band traversals is nonzero (necessarily +-1 for embedded curves).
    Through-strands can chain into a single loop whose windings cancel, so
    the essential count can be smaller than the through-degree.

    >>> annular_closure(identity_tangle(3))
    (3, 0)
    >>> annular_closure(turnback_tangle(2, 1))
    (0, 1)
    """
    if not a.is_square():
        raise NotSquare("annular closure needs a square tangle")
    n = a.n
    visited = [False] * (2 * n)
    essential = 0
    trivial = a.circles
    for s in range(2 * n):
        if visited[s]:
            continue
        winding = 0
        p = s
        while not visited[p]:
            visited[p] = True
            q = a.pairs[p]
            visited[q] = True
            if q >= n:
                winding += 1  # band from T_i around to B_i
                p = q - n
            else:
                winding -= 1
                p = q + n
        assert abs(winding) <= 1, "embedded closure loop wound more than once"
        if winding:
            essential += 1
        else:
            trivial += 1
    return essential, trivial


@lru_cache(maxsize=None)
def _noncrossing_pairings(total: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Noncrossing perfect matchings of 0..total-1 in linear order."""
    if total == 0:
        return ((),)
    if total % 2:
        return ()
    out = []
    for t in range(1, total, 2):
        for left in _noncrossing_pairings(t - 1):
            for right in _noncrossing_pairings(total - t - 1):
                shifted_left = tuple((a + 1, b + 1) for a, b in left)
                shifted_right = tuple((a + t + 1, b + t + 1) for a, b in right)
                out.append(((0, t),) + shifted_left + shifted_right)
    return tuple(out)


def all_matchings(n: int, m: int) -> list[FlatTangle]:
    """All circle-free flat (n,m)-tangles.

    >>> [len(all_matchings(k, k)) for k in range(1, 5)]
    [1, 2, 5, 14]
    """
    total = n + m
    if total % 2:
        return []
    order = boundary_order(n, m)
    out = []
    for matching in _noncrossing_pairings(total):
        pairs = [0] * total
        for x, y in matching:
            px, py = order[x], order[y]
            pairs[px] = py
            pairs[py] = px
        out.append(FlatTangle(n, m, tuple(pairs)))
    return out


def cup_diagrams(n: int, k: int) -> list[FlatTangle]:
    """Monic (k,n)-tangles of through-degree k: every bottom point runs
    through; the remaining n-k top points pair among themselves."""
    if (n - k) % 2 or k > n or k < 0:
        return []
    return [t for t in all_matchings(k, n) if through_degree(t) == k]


def catalan(n: int) -> int:
    """
    >>> [catalan(n) for n in range(7)]
    [1, 1, 2, 5, 14, 42, 132]
    """
    return math.comb(2 * n, n) // (n + 1)

import random

import pytest

from chebtl.tangle import (
    BoundaryMismatch,
    FlatTangle,
    NotSquare,
    TangleGenerator,
    all_matchings,
    annular_closure,
    cap_tangle,
    catalan,
    compose,
    cup_tangle,
    identity_tangle,
    is_noncrossing,
    juxtapose,
    make_generator,
    planar_closure,
    reflect,
    through_degree,
    turnback_tangle,
)


def test_generators():
    id3 = make_generator(TangleGenerator("identity", 3))
    assert id3.pairs == (3, 4, 5, 0, 1, 2)
    b1 = make_generator(TangleGenerator("turnback", 2, 1))
    assert b1.pairs == (1, 0, 3, 2)  # B1-B2, T1-T2
    cap = make_generator(TangleGenerator("cap", 2, 1))
    assert (cap.n, cap.m) == (2, 0) and cap.pairs == (1, 0)
    cup = make_generator(TangleGenerator("cup", 2, 1))
    assert (cup.n, cup.m) == (0, 2)


def test_generator_positions():
    with pytest.raises(Exception):
        TangleGenerator("cap", 2, 2)


def test_compose_circle_extraction():
    b1 = turnback_tangle(2, 1)
    c, new = compose(b1, b1)
    assert c.drop_circles() == b1 and c.circles == 1 and new == 1


def test_identity_composition():
    for n in (1, 2, 3):
        for t in all_matchings(n, n):
            left, _ = compose(identity_tangle(n), t)
            right, _ = compose(t, identity_tangle(n))
            assert left == t and right == t


def test_e1_e2_e1():
    # path-following oracle: e1 e2 e1 = e1 with no circles
    e1, e2 = turnback_tangle(3, 1), turnback_tangle(3, 2)
    step, _ = compose(e2, e1)
    out, _ = compose(e1, step)
    assert out == e1 and out.circles == 0


def test_juxtapose():
    assert juxtapose(identity_tangle(2), identity_tangle(1)) == identity_tangle(3)
    assert juxtapose(turnback_tangle(2, 1), identity_tangle(1)) == turnback_tangle(3, 1)
    # cap u cup: label bookkeeping oracle
    out = juxtapose(cap_tangle(2, 1), cup_tangle(2, 1))
    assert (out.n, out.m) == (2, 2)
    assert out.pairs == (1, 0, 3, 2)
    assert out.circles == 0


def test_reflect():
    assert reflect(cap_tangle(2, 1)) == cup_tangle(2, 1)
    for n in (1, 2, 3):
        assert reflect(identity_tangle(n)) == identity_tangle(n)
    four = FlatTangle(4, 0, (1, 0, 3, 2))
    r = reflect(four)
    assert (r.n, r.m) == (0, 4) and r.pairs == (1, 0, 3, 2)
    for t in all_matchings(3, 3):
        assert reflect(reflect(t)) == t


def test_through_degree():
    assert through_degree(identity_tangle(4)) == 4
    assert through_degree(turnback_tangle(4, 2)) == 2
    t = FlatTangle(4, 4, (3, 2, 1, 0, 7, 6, 5, 4))
    t.validate()
    assert through_degree(t) == 0


def test_planar_closure():
    assert planar_closure(identity_tangle(3)) == 3
    assert planar_closure(turnback_tangle(2, 1)) == 1
    e1, e2 = turnback_tangle(3, 1), turnback_tangle(3, 2)
    c, _ = compose(e1, e2)
    assert planar_closure(c) == 1
    with pytest.raises(NotSquare):
        planar_closure(cap_tangle(2, 1))


def test_annular_closure_examples():
    for n in (1, 2, 3):
        assert annular_closure(identity_tangle(n)) == (n, 0)
    assert annular_closure(turnback_tangle(2, 1)) == (0, 1)
    p = FlatTangle(3, 3, (3, 2, 1, 0, 5, 4))
    assert annular_closure(p) == (1, 1)


def test_annular_closure_winding_cancellation():
    # two through-strands chained into one nullhomotopic loop
    t = FlatTangle(4, 4, (6, 7, 3, 2, 5, 4, 0, 1))
    t.validate()
    assert through_degree(t) == 2
    assert annular_closure(t) == (0, 1)
    assert planar_closure(t) == 1


def test_composition_mismatch():
    with pytest.raises(BoundaryMismatch):
        compose(identity_tangle(2), identity_tangle(3))


def test_matchings_counts_and_validity():
    assert [len(all_matchings(k, k)) for k in range(1, 6)] == [1, 2, 5, 14, 42]
    for t in all_matchings(3, 3) + all_matchings(2, 4) + all_matchings(0, 6):
        t.validate()


def test_associativity_random():
    rng = random.Random(42)
    count = 0
    while count < 1000:
        dims = [rng.randint(0, 4) for _ in range(4)]
        if any((dims[i] + dims[i + 1]) % 2 for i in range(3)):
            continue
        pools = [all_matchings(dims[i], dims[i + 1]) for i in range(3)]
        if not all(pools):
            continue
        c, b, a = (rng.choice(p) for p in pools)
        ab, _ = compose(a, b)
        left, _ = compose(ab, c)
        bc, _ = compose(b, c)
        right, _ = compose(a, bc)
        assert left == right
        assert through_degree(ab) <= min(through_degree(a), through_degree(b))
        count += 1


def test_through_plus_bottom_arcs():
    for n in range(1, 5):
        for t in all_matchings(n, n):
            bb = sum(1 for i, j in t.arcs() if j < t.n)
            assert through_degree(t) + 2 * bb == n
            ess, triv = annular_closure(t)
            assert ess <= through_degree(t)
            assert ess + triv == planar_closure(t)


def test_noncrossing_check():
    assert is_noncrossing(2, 2, (2, 3, 0, 1))
    assert not is_noncrossing(4, 0, (2, 3, 0, 1))

import itertools
import random

import pytest

from chebtl.coeff import F_ONE, FieldElem, LaurentPoly, quantum_integer
from chebtl.tangle import identity_tangle, turnback_tangle
from chebtl.tl import (
    AdmissibleSequence,
    KaroubiObject,
    NotAdmissible,
    ParityMismatch,
    TLElement,
    ZPoly,
    admissible_count,
    admissible_sequences,
    annular_skein_closure,
    central_battery,
    central_idempotent,
    chebyshev_coefficients,
    chebyshev_polys,
    delta_power,
    e_element,
    identity_element,
    jones_wenzl,
    jw_battery,
    markov_trace,
    pad_right,
    primitive_battery,
    primitive_idempotent,
    sandwich,
    tl_compose,
)


def test_tl_relation_circle():
    e1 = e_element(2, 1)
    sq = tl_compose(e1, e1)
    assert sq == e1.scale(delta_power(1))


def test_identity_neutral():
    e1 = e_element(3, 1)
    assert tl_compose(identity_element(3), e1) == e1
    assert tl_compose(e1, identity_element(3)) == e1


def test_e1_e2_e1_element():
    e1, e2 = e_element(3, 1), e_element(3, 2)
    assert tl_compose(e1, tl_compose(e2, e1)) == e1


def test_jones_wenzl_small():
    assert jones_wenzl(1) == identity_element(1)
    p2 = jones_wenzl(2)
    inv2 = FieldElem(LaurentPoly.one(), quantum_integer(2))
    assert p2 == identity_element(2) - e_element(2, 1).scale(inv2)
    p3 = jones_wenzl(3)
    want = -FieldElem(quantum_integer(2), quantum_integer(3))
    assert p3.coeff(turnback_tangle(3, 1)) == want


def test_jones_wenzl_idempotent_and_killing():
    for n in range(1, 7):
        pn = jones_wenzl(n)
        assert tl_compose(pn, pn) == pn
        for i in range(1, n):
            assert tl_compose(e_element(n, i), pn).is_zero()
            assert tl_compose(pn, e_element(n, i)).is_zero()


def test_jw_battery():
    for n in range(1, 7):
        assert all(jw_battery(n).values())


def test_markov_trace():
    assert markov_trace(identity_element(2)) == delta_power(2)
    # brute-force closure oracle: tr(p2) = delta^2 - (1/[2]) delta = [3]
    two = FieldElem.from_poly(quantum_integer(2))
    byhand = delta_power(2) - two.inv() * delta_power(1)
    assert markov_trace(jones_wenzl(2)) == byhand
    assert byhand == FieldElem.from_poly(quantum_integer(3))
    for n in range(1, 6):
        assert markov_trace(jones_wenzl(n)) == FieldElem.from_poly(quantum_integer(n + 1))


def test_central_idempotents_small():
    p20 = central_idempotent(2, 0)
    assert p20 == e_element(2, 1).scale(FieldElem(LaurentPoly.one(), quantum_integer(2)))
    assert central_idempotent(2, 2) == jones_wenzl(2)
    total = TLElement.zero(4, 4)
    for k in (0, 2, 4):
        total = total + central_idempotent(4, k)
    assert total == identity_element(4)


def test_central_orthogonality_brute():
    ps = {k: central_idempotent(4, k) for k in (0, 2, 4)}
    for k, l in itertools.product(ps, repeat=2):
        prod = tl_compose(ps[k], ps[l])
        want = ps[k] if k == l else TLElement.zero(4, 4)
        assert prod == want


def test_central_battery():
    for n in range(2, 7):
        assert all(central_battery(n).values())


def test_central_parity_error():
    with pytest.raises(ParityMismatch):
        central_idempotent(4, 1)


def test_admissible_sequences():
    with pytest.raises(NotAdmissible):
        AdmissibleSequence((-1, 1))
    assert admissible_count(4, 0) == 2
    assert admissible_count(4, 2) == 3
    assert admissible_count(4, 4) == 1
    # enumeration and formula agree more broadly
    for n in range(0, 7):
        for k in range(n % 2, n + 1, 2):
            admissible_count(n, k)


def test_primitive_idempotents_small():
    assert primitive_idempotent(AdmissibleSequence((1,))) == identity_element(1)
    for n in (3, 4):
        ones = AdmissibleSequence((1,) * n)
        assert primitive_idempotent(ones) == jones_wenzl(n)
    updown = primitive_idempotent(AdmissibleSequence((1, -1)))
    assert updown == central_idempotent(2, 0)


def test_primitive_factor_order_irrelevant():
    # the padded central factors commute
    a = pad_right(jones_wenzl(3), 1)
    b = central_idempotent(4, 2)
    assert tl_compose(a, b) == tl_compose(b, a)


def test_primitive_battery():
    for n in range(1, 6):
        assert all(primitive_battery(n).values())


def test_annular_closure_of_elements():
    assert annular_skein_closure(identity_element(3)) == ZPoly.monomial(3)
    assert annular_skein_closure(e_element(2, 1)) == ZPoly.monomial(0, delta_power(1))
    # closure(p2) = z^2 - 1
    cl = annular_skein_closure(jones_wenzl(2))
    assert cl == ZPoly({2: F_ONE, 0: -F_ONE})


def test_chebyshev_coefficients():
    z2 = ZPoly.monomial(2)
    cc = chebyshev_coefficients(z2)
    assert cc == {2: F_ONE, 0: F_ONE}
    z1 = ZPoly.monomial(1)
    assert chebyshev_coefficients(z1) == {1: F_ONE}
    cl = annular_skein_closure(jones_wenzl(2))
    assert chebyshev_coefficients(cl) == {2: F_ONE}
    # S recursion: S_{k+1} = z S_k - S_{k-1}
    polys = chebyshev_polys(6)
    z = ZPoly.monomial(1)
    for k in range(2, 7):
        assert polys[k] == z * polys[k - 1] - polys[k - 2]


def test_sandwich_projection():
    p2 = jones_wenzl(2)
    obj = KaroubiObject.wrap(p2)
    x = sandwich(obj, identity_element(2), obj)
    assert x == p2


def test_element_json_roundtrip():
    for el in (jones_wenzl(3), central_idempotent(4, 2), e_element(3, 2)):
        assert TLElement.from_json(el.to_json()) == el


def test_jw_disk_cache(tmp_path):
    import chebtl.tl as tl

    tl.set_cache_dir(str(tmp_path))
    try:
        tl._jw_cache.pop(3, None)
        a = tl.jones_wenzl(3)
        assert (tmp_path / "jw_3.json").exists()
        tl._jw_cache.pop(3, None)
        b = tl.jones_wenzl(3)  # reloaded from disk
        assert a == b
    finally:
        tl.set_cache_dir(None)

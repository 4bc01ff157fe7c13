import pytest

from chebtl.annulus import (
    AnnularPart,
    AnnularSkeinElement,
    BadFactorization,
    close_objects,
    cyclicity_rotate,
    essential_dot_vanishing,
    trace_euler,
    vanishes_below,
)
from chebtl.coeff import F_ONE, FieldElem, LaurentPoly
from chebtl.complexes import BNBase, deloop_pass, gaussian_eliminate, one_term_complex, star_compose
from chebtl.projector import p2_complex
from chebtl.tangle import all_matchings, identity_tangle, turnback_tangle
from chebtl.tl import ZPoly, delta_power, e_element, identity_element, tl_compose


def test_close_objects():
    cx = one_term_complex(BNBase(3, 3), identity_tangle(3))
    prof = close_objects(cx)
    assert prof.records[0].essential == 3 and prof.records[0].trivial == 0
    cx2 = one_term_complex(BNBase(2, 2), turnback_tangle(2, 1))
    rec = close_objects(cx2).records[0]
    assert (rec.essential, rec.trivial) == (0, 1)


def test_trace_euler_one_term():
    cx = one_term_complex(BNBase(2, 2), identity_tangle(2))
    el = trace_euler(cx)
    assert el.poly == ZPoly.monomial(2)


def test_trace_euler_invariance():
    b = one_term_complex(BNBase(2, 2), turnback_tangle(2, 1))
    s = star_compose(b, p2_complex(6).complex)
    t0 = trace_euler(s)
    t1 = trace_euler(deloop_pass(s))
    t2 = trace_euler(gaussian_eliminate(deloop_pass(s)))
    assert t0 == t1 == t2


def test_essential_dot_vanishing():
    v = essential_dot_vanishing([AnnularPart("essential", dots=1)])
    assert v.vanished and "1-q^2" in v.reason
    v2 = essential_dot_vanishing([AnnularPart("trivial", dots=1)])
    assert not v2.vanished and v2.value == F_ONE
    v3 = essential_dot_vanishing([AnnularPart("essential", degree=3)])
    assert v3.vanished
    v4 = essential_dot_vanishing([AnnularPart("trivial", dots=0)])
    assert v4.vanished  # undotted sphere


def test_cyclicity_rotation():
    idn = identity_element(3)
    rot, power = cyclicity_rotate([idn, idn], 1)
    assert rot == idn and power == 0
    e1, e2 = e_element(3, 1), e_element(3, 2)
    rot, power = cyclicity_rotate([e1, e2], 1)
    from chebtl.tl import annular_skein_closure

    assert power == 0
    assert annular_skein_closure(tl_compose(e1, e2)) == annular_skein_closure(rot)
    # reallocating a formal shift moves the exponent
    _, p1 = cyclicity_rotate([idn, idn], 1, shift_allocation=3)
    _, p2 = cyclicity_rotate([idn, idn], 1, shift_allocation=1)
    assert p1 - p2 == 2
    with pytest.raises(BadFactorization):
        cyclicity_rotate([idn], 1)


def test_vanishes_below():
    c = FieldElem.from_poly(LaurentPoly.from_terms([(24, 1)]))
    assert vanishes_below(c, 24)
    assert not vanishes_below(c, 25)
    assert vanishes_below(FieldElem.from_int(0), 100)


def test_skein_element_json():
    el = AnnularSkeinElement(ZPoly({2: F_ONE, 0: -delta_power(1)}))
    data = el.to_json()
    assert set(data) == {"0", "2"}

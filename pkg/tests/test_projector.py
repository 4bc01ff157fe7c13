import pytest

from chebtl.annulus import chebyshev_indicator_below_cutoff, trace_euler_truncated
from chebtl.cob import add_dot, identity_cob, saddle
from chebtl.complexes import d_squared_check
from chebtl.projector import (
    HomotopyNotFound,
    QnComplex,
    build_qn,
    eta_map,
    kills_turnbacks,
    p2_complex,
    periodic_u,
    q2_complex,
    splice_pn,
)
from chebtl.tangle import identity_tangle, through_degree, turnback_tangle


def test_p2_shape():
    p = p2_complex(8)
    assert d_squared_check(p.complex)[0]
    shifts = sorted((g.tdeg, g.qshift) for g in p.complex.generators())
    assert shifts == sorted([(0, 0)] + [(-k, 2 * k - 1) for k in range(1, 9)])
    # differential pattern: saddle, then dot difference / dot sum alternating
    b = turnback_tangle(2, 1)
    dt = add_dot(identity_cob(b), (2, 3))
    db = add_dot(identity_cob(b), (0, 1))
    assert p.complex.entry("g1", "g0") == saddle(b, (0, 1), (2, 3))
    assert p.complex.entry("g2", "g1") == dt - db
    assert p.complex.entry("g3", "g2") == dt + db


def test_p2_unit():
    p = p2_complex(6)
    eta = eta_map(p)
    assert eta.is_closed()
    assert all(w < 2 for w in p.unit_cone_widths())


def test_periodic_u_closed_on_window():
    p = p2_complex(10)
    u = periodic_u(p)
    comm = u.commutator_with_d()
    # closed except at the truncation tail
    for (a, b) in comm.entries:
        assert u.source.gens[a].tdeg < -p.depth + 2


def test_p2_kills_turnbacks():
    p = p2_complex(12)
    res = kills_turnbacks(p)
    assert p.safe_window == (-10, 0)
    for d in res.values():
        for v in d.values():
            assert v.contractible


def test_identity_complex_fails_turnbacks():
    # a non-projector: the one-term identity complex keeps B_1
    from chebtl.complexes import BNBase, one_term_complex
    from chebtl.projector import TruncatedProjector
    from chebtl.complexes import ChainMap

    cx = one_term_complex(BNBase(2, 2), identity_tangle(2))
    unit = one_term_complex(BNBase(2, 2), identity_tangle(2), gid="u0")
    eta = ChainMap(unit, cx)
    fake = TruncatedProjector(2, 4, cx, eta, (-2, 0), 0)
    res = kills_turnbacks(fake)
    assert not res[1]["B_star_P"].contractible


def test_q2_and_splice_match_direct():
    q2 = q2_complex()
    assert d_squared_check(q2.complex)[0]
    spliced = splice_pn(2, q2, 7, 12)
    direct = p2_complex(12)
    ms = {g.tdeg: g.gid for g in spliced.complex.gens.values()}
    md = {g.tdeg: g.gid for g in direct.complex.gens.values()}
    assert sorted(ms) == sorted(md)
    for (a, b), m in direct.complex.diff.items():
        ta, tb = direct.complex.gens[a].tdeg, direct.complex.gens[b].tdeg
        assert spliced.complex.entry(ms[ta], ms[tb]) == m
    assert spliced.trace_cutoff >= 20


def test_q3_build_and_splice():
    p2 = p2_complex(10)
    qn = build_qn(3, p2, 6)
    assert d_squared_check(qn.complex)[0]
    # group shifts follow a_1 = q, a_2 = t^-2 q^5, a_3 = t^-2 q^6
    tops = {}
    for name in ("G0", "G1", "G2", "G3"):
        gens = [qn.complex.gens[g] for g in qn.groups[name]]
        top = max(gens, key=lambda g: g.tdeg)
        tops[name] = (top.tdeg, top.qshift)
    assert tops["G0"] == (0, 0)
    assert tops["G1"] == (-1, 1)
    assert tops["G2"] == (-4, 5)
    assert tops["G3"] == (-5, 6)
    p3 = splice_pn(3, qn, 2, 6)
    assert d_squared_check(p3.complex)[0]
    assert p3.safe_window == (-2, 0)
    assert eta_map(p3).is_closed()
    assert all(w < 3 for w in p3.unit_cone_widths())


def test_depth_guard():
    p2 = p2_complex(5)
    with pytest.raises(HomotopyNotFound):
        build_qn(3, p2, 4)


def test_trace_of_p2_matches_s2():
    p = p2_complex(10)
    el, cutoff = trace_euler_truncated(p)
    assert cutoff == 20
    rep = chebyshev_indicator_below_cutoff(el, 2, cutoff)
    assert rep["S_n_coefficient_is_1"] and rep["other_coefficients_vanish"]

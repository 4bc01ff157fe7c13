"""Executable verification suites: the module invariants as named checks
producing a deterministic report."""
from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import annulus as annmod
from . import arc as arcmod
from . import chebyshev as chmod
from . import cob as cobmod
from . import coeff as cfmod
from . import projector as prmod
from . import tangle as tgmod
from . import tl as tlmod
from .complexes import (
    BNBase,
    d_squared_check,
    deloop_pass,
    gaussian_eliminate,
    one_term_complex,
    simplify,
    star_compose,
)
from .coeff import F_ONE, FieldElem, LaurentPoly, quantum_integer, specialize
from .tl import TLElement, tl_compose


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str
    seconds: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class SuiteReport:
    suite: str
    results: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "all_passed": self.all_passed,
            "checks": [r.to_json() for r in self.results],
        }


def _run_checks(suite: str, checks, parallelism: int = 1) -> SuiteReport:
    """checks: list of (name, callable) with callable -> (bool, witness)."""

    def run_one(item):
        name, fn = item
        t0 = time.time()
        try:
            passed, witness = fn()
        except Exception as exc:  # noqa: BLE001 - verification must not crash
            passed, witness = False, f"exception: {exc}"
        return CheckResult(name, bool(passed), str(witness), time.time() - t0)

    report = SuiteReport(suite)
    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            report.results = list(pool.map(run_one, checks))
    else:
        report.results = [run_one(c) for c in checks]
    return report


# ---------------------------------------------------------------------------
# coeff


def _random_field_elem(rng: random.Random) -> FieldElem:
    def rand_poly():
        return LaurentPoly.from_terms(
            [(rng.randint(-4, 4), rng.randint(-5, 5)) for _ in range(rng.randint(1, 4))]
        )

    num = rand_poly()
    den = rand_poly()
    while den.is_zero():
        den = rand_poly()
    return FieldElem(num, den)


def suite_coeff(n_max: int = 6, depth: int = 8, quick: bool = False) -> list:
    trials = 1000 if quick else 10000

    def canonical_zero():
        rng = random.Random(20240)
        for _ in range(trials):
            a = _random_field_elem(rng)
            if not (a - a).is_zero():
                return False, "a - a != 0"
        return True, f"{trials} random elements"

    def specialize_hom():
        rng = random.Random(20241)
        count = 0
        for _ in range(500):
            a = _random_field_elem(rng)
            b = _random_field_elem(rng)
            q0 = Fraction(rng.randint(1, 7), rng.randint(1, 7))
            try:
                va, vb, vab = specialize(a, q0), specialize(b, q0), specialize(a * b, q0)
            except cfmod.PoleAtPoint:
                continue
            count += 1
            if va * vb != vab:
                return False, f"mult not preserved at q={q0}"
        return True, f"{count} specializations checked"

    def chebyshev_recursion():
        two = quantum_integer(2)
        for n in range(1, 33):
            lhs = quantum_integer(n + 1)
            rhs = two * quantum_integer(n) - quantum_integer(n - 1)
            if lhs != rhs:
                return False, f"[n+1] != [2][n]-[n-1] at n={n}"
        return True, "n <= 32"

    def genericity():
        rep = cfmod.genericity_check(2 * n_max)
        return rep.all_invertible, f"bound recorded {cfmod.session_genericity_bound()}"

    return [
        ("canonical form: a - a = 0", canonical_zero),
        ("specialize is a ring homomorphism", specialize_hom),
        ("quantum integer Chebyshev recursion", chebyshev_recursion),
        ("genericity check", genericity),
    ]


# ---------------------------------------------------------------------------
# tl (includes the tangle combinatorics)


def suite_tl(n_max: int = 6, depth: int = 8, quick: bool = False) -> list:
    checks = []

    def tangle_assoc():
        rng = random.Random(1123)
        trials = 200 if quick else 1000
        count = 0
        while count < trials:
            dims = [rng.randint(0, 4) for _ in range(4)]
            if any((dims[i] + dims[i + 1]) % 2 for i in range(3)):
                continue
            pools = [tgmod.all_matchings(dims[i], dims[i + 1]) for i in range(3)]
            if not all(pools):
                continue
            c, b, a = (rng.choice(p) for p in pools)
            ab, _ = tgmod.compose(a, b)
            ab_c, _ = tgmod.compose(ab, c)
            bc, _ = tgmod.compose(b, c)
            a_bc, _ = tgmod.compose(a, bc)
            if ab_c != a_bc:
                return False, f"associativity broke: {a} {b} {c}"
            count += 1
        return True, f"{trials} random triples"

    def through_mono():
        rng = random.Random(1124)
        for _ in range(300):
            n, k, m = 2, 2, 2
            a = rng.choice(tgmod.all_matchings(k, m))
            b = rng.choice(tgmod.all_matchings(n, k))
            comp, _ = tgmod.compose(a, b)
            if tgmod.through_degree(comp) > min(
                tgmod.through_degree(a), tgmod.through_degree(b)
            ):
                return False, "through degree grew"
        return True, "300 random pairs"

    def noncrossing_valid():
        for n in range(0, 5):
            for m in range(0, 5):
                if (n + m) % 2:
                    continue
                for t in tgmod.all_matchings(n, m):
                    t.validate()
        return True, "all matchings up to 4+4 points"

    def annular_count():
        for n in range(1, 5):
            for t in tgmod.all_matchings(n, n):
                ess, triv = tgmod.annular_closure(t)
                bb = sum(1 for i, j in t.arcs() if i < t.n and j < t.n)
                if tgmod.through_degree(t) + 2 * bb != n:
                    return False, f"through-degree miscount on {t}"
                if ess > tgmod.through_degree(t):
                    return False, f"essential exceeds through on {t}"
                if ess + triv != tgmod.planar_closure(t):
                    return False, f"loop count broke on {t}"
        return True, "n <= 4 exhaustive"

    checks += [
        ("tangle composition associativity", tangle_assoc),
        ("through degree monotone under composition", through_mono),
        ("noncrossing validity of produced matchings", noncrossing_valid),
        ("essential + 2 (bottom arcs) = n", annular_count),
    ]

    jw_to = min(n_max, 8)
    for n in range(1, jw_to + 1):
        checks.append(
            (
                f"jones-wenzl battery n={n}",
                (lambda n=n: (all(tlmod.jw_battery(n).values()), f"n={n}")),
            )
        )
    for n in range(2, min(n_max, 8) + 1):
        checks.append(
            (
                f"central idempotent battery n={n}",
                (lambda n=n: (all(tlmod.central_battery(n).values()), f"n={n}")),
            )
        )

    def primitive_complete(n):
        rep = tlmod.primitive_battery(n)
        if not all(rep.values()):
            return False, str(rep)
        if n <= 4:
            # cross-validate the certified route against naive products
            eps = tlmod.admissible_sequences(n)
            ps = [tlmod.primitive_idempotent(e) for e in eps]
            for i, p in enumerate(ps):
                for j, q in enumerate(ps):
                    prod = tl_compose(p, q)
                    want = p if i == j else TLElement.zero(n, n)
                    if prod != want:
                        return False, f"naive orthogonality broke at {i},{j}"
        return True, f"{len(tlmod.admissible_sequences(n))} idempotents"

    for n in range(1, min(n_max, 6) + 1):
        checks.append((f"primitive idempotents complete n={n}", lambda n=n: primitive_complete(n)))

    def catalan_counts():
        expected = {(4, 0): 2, (4, 2): 3, (4, 4): 1}
        for n in range(0, min(n_max, 6) + 1):
            for k in range(n % 2, n + 1, 2):
                c = tlmod.admissible_count(n, k)
                if (n, k) in expected and c != expected[(n, k)]:
                    return False, f"count {n},{k} = {c}"
        return True, "formula == enumeration"

    checks.append(("admissible counts match the hook formula", catalan_counts))

    def closure_indicator(n):
        for e in tlmod.admissible_sequences(n):
            cl = tlmod.primitive_idempotent_cleared(e)
            cc = tlmod.chebyshev_coefficients(tlmod.annular_closure_cleared(cl))
            k = e.total
            if set(cc) != {k} or not cc[k].is_one():
                return False, f"closure(p_eps) != S_k for eps={e.entries}"
        return True, f"all admissible eps, n={n}"

    for n in range(1, min(n_max, 6) + 1):
        checks.append((f"closure(p_eps) = S_|eps| for n={n}", lambda n=n: closure_indicator(n)))

    def jw_model_identities():
        for n in range(2, min(n_max, 6) + 1):
            ika, kia = chmod.jw_structure_identities(n)
            if not (ika and kia):
                return False, f"failed at n={n}"
        return True, f"2 <= n <= {min(n_max, 6)}"

    checks.append(("JW system homotopy identities", jw_model_identities))
    return checks


# ---------------------------------------------------------------------------
# cob


def _random_tangle(rng: random.Random, maxpts: int = 4):
    while True:
        n = rng.randint(0, maxpts)
        m = rng.randint(0, maxpts - n if n < maxpts else 0)
        if (n + m) % 2 == 0 and (n + m) > 0:
            ms = tgmod.all_matchings(n, m)
            if ms:
                t = rng.choice(ms)
                return t.with_circles(rng.randint(0, 1))


def suite_cob(n_max: int = 6, depth: int = 8, quick: bool = False) -> list:
    def relations():
        empty = tgmod.FlatTangle(0, 0, ())
        circle = empty.with_circles(1)
        cup = cobmod.elementary_cob(empty, circle, [(cobmod.TGT, ("c", 0))])
        cap = cobmod.elementary_cob(circle, empty, [(cobmod.SRC, ("c", 0))])
        sphere = cobmod.cob_compose(cap, cup)
        if not sphere.is_zero():
            return False, "sphere != 0"
        dotted = cobmod.cob_compose(cap, cobmod.add_dot(cup, ("c", 0), cobmod.TGT))
        if dotted.terms != {(): F_ONE}:
            return False, "dotted sphere != 1"
        two = circle.with_circles(1)
        split = cobmod.saddle(circle, ("c", 0), ("c", 0))
        merge = cobmod.saddle(two, ("c", 0), ("c", 1))
        handle = cobmod.cob_compose(merge, split)
        torus = cobmod.cob_compose(cap, cobmod.cob_compose(handle, cup))
        if torus.terms != {(): FieldElem.from_int(2)}:
            return False, "torus != 2"
        genus2 = cobmod.cob_compose(
            cap, cobmod.cob_compose(handle, cobmod.cob_compose(handle, cup))
        )
        if not genus2.is_zero():
            return False, "genus two closed != 0"
        return True, "sphere 0, dotted 1, torus 2, genus-2 0"

    def deloop_roundtrip():
        for circles in (1, 2):
            t = tgmod.identity_tangle(1).with_circles(circles)
            objs, fwd, bwd = cobmod.deloop(t)
            tgt = objs[0][0]
            gf = cobmod.cob_compose(bwd[0], fwd[0]) + cobmod.cob_compose(bwd[1], fwd[1])
            if gf != cobmod.identity_cob(t):
                return False, "backward o forward != id"
            for i in range(2):
                for j in range(2):
                    fg = cobmod.cob_compose(fwd[i], bwd[j])
                    want = (
                        cobmod.identity_cob(tgt)
                        if i == j
                        else cobmod.Cobordism.zero(tgt, tgt)
                    )
                    if fg != want:
                        return False, "forward o backward != id matrix"
        return True, "round trips on 1 and 2 circles"

    def associativity():
        rng = random.Random(555)
        trials = 150 if quick else 1000
        done = 0
        while done < trials:
            t1 = _random_tangle(rng)
            mlist = tgmod.all_matchings(t1.n, t1.m)
            if not mlist:
                continue
            t2 = rng.choice(mlist).with_circles(rng.randint(0, 1))
            t0 = rng.choice(mlist)
            h1 = cobmod.hom_basis(t0, t2)
            h2 = cobmod.hom_basis(t2, t1)
            h3 = cobmod.hom_basis(t1, t1)
            if not h1 or not h2 or not h3:
                continue
            f = cobmod.basis_cob(t0, t2, rng.choice(h1))
            g = cobmod.basis_cob(t2, t1, rng.choice(h2))
            h = cobmod.basis_cob(t1, t1, rng.choice(h3))
            lhs = cobmod.cob_compose(h, cobmod.cob_compose(g, f))
            rhs = cobmod.cob_compose(cobmod.cob_compose(h, g), f)
            if lhs != rhs:
                return False, f"associativity broke on {t0} {t2} {t1}"
            done += 1
        return True, f"{trials} random composable triples"

    def degree_additive():
        rng = random.Random(556)
        for _ in range(400):
            mlist = tgmod.all_matchings(2, 2)
            t0, t1, t2 = (rng.choice(mlist) for _ in range(3))
            f = cobmod.basis_cob(t0, t1, rng.choice(cobmod.hom_basis(t0, t1)))
            g = cobmod.basis_cob(t1, t2, rng.choice(cobmod.hom_basis(t1, t2)))
            comp = cobmod.cob_compose(g, f)
            if comp.is_zero():
                continue
            if comp.degree() != f.degree() + g.degree():
                return False, "degree not additive"
        return True, "400 random pairs"

    def hom_degrees():
        for n, m in [(1, 1), (2, 2), (2, 0), (0, 2), (3, 1)]:
            for t in tgmod.all_matchings(n, m):
                for t2 in tgmod.all_matchings(n, m):
                    for key in cobmod.hom_basis(t, t2):
                        c = cobmod.basis_cob(t, t2, key)
                        d = c.degree()
                        if cobmod.hom_basis(t, t2, d).count(key) != 1:
                            return False, "hom basis degree filter broke"
        return True, "matches cob_degree on all small hom bases"

    def tqft_oracle():
        # soundness of the normal form: pairings with every closing basis
        # element agree before and after a neck-cutting rewrite
        rng = random.Random(557)
        for _ in range(60 if quick else 200):
            t = _random_tangle(rng, 4)
            t2 = rng.choice(tgmod.all_matchings(t.n, t.m)).with_circles(0)
            keys = cobmod.hom_basis(t, t2)
            if not keys:
                continue
            key = rng.choice(keys)
            c = cobmod.basis_cob(t, t2, key)
            curves = c.curves
            if len(curves) < 2:
                continue
            # raw two-curve block, then neck-cut it; pair both against
            # all closures and compare scalars
            blocks = [frozenset(curves[0] | curves[1])] + [
                frozenset(cu) for cu in curves[2:]
            ]
            dots = [0] * len(blocks)
            raw = cobmod.Cobordism.from_blocks(t, t2, blocks, dots)
            cut = cobmod.neck_cut_expand(
                t, t2, blocks, dots, 0, list(curves[0]), list(curves[1])
            )
            if raw != cut:
                return False, "neck cut disagrees with normal form"
            back = cobmod.hom_basis(t2, t)
            for bk in back:
                bmor = cobmod.basis_cob(t2, t, bk)
                lhs = cobmod.cob_compose(bmor, raw)
                rhs = cobmod.cob_compose(bmor, cut)
                if lhs != rhs:
                    return False, "pairing mismatch"
        return True, "neck-cut soundness vs closures"

    return [
        ("sphere relations", relations),
        ("delooping round trips", deloop_roundtrip),
        ("composition associativity", associativity),
        ("degree additivity", degree_additive),
        ("hom basis degrees", hom_degrees),
        ("canonical form soundness oracle", tqft_oracle),
    ]


# ---------------------------------------------------------------------------
# chebyshev


def suite_chebyshev(n_max: int = 4, depth: int = 8, quick: bool = False) -> list:
    import math

    checks = []
    hi = min(n_max + 2, 8)

    def kh_battery(n):
        v = chmod.khovanov_complex(n)
        ok, w = d_squared_check(v)
        if not ok:
            return False, f"d^2 != 0: {w[0]}"
        ranks = chmod.kh_chain_ranks(n)
        want = [math.comb(n - k, k) for k in range(n // 2 + 1)]
        if ranks != want:
            return False, f"ranks {ranks}"
        chi = chmod.euler_characteristic(v)
        if chi != chmod.grothendieck_formula(n):
            return False, "chi mismatch"
        cc = tlmod.chebyshev_coefficients(chmod.chi_closure(chi))
        if set(cc) != {n} or not cc[n].is_one():
            return False, "closure != S_n"
        return True, f"ranks, chi, S_{n}"

    for n in range(1, hi + 1):
        checks.append((f"khovanov model battery n={n}", lambda n=n: kh_battery(n)))

    def markov_vn(n):
        chi = chmod.euler_characteristic(chmod.khovanov_complex(n))
        acc = cfmod.F_ZERO
        for el in chi.values():
            acc = acc + tlmod.markov_trace(el)
        want = FieldElem.from_poly(quantum_integer(n + 1))
        return acc == want, f"[{n + 1}]"

    for n in range(1, hi + 1):
        checks.append((f"markov trace of chi(V_n) n={n}", lambda n=n: markov_vn(n)))

    for n in range(2, min(n_max + 2, 6) + 1):
        checks.append(
            (
                f"cone decomposition of V_n n={n}",
                lambda n=n: (
                    all(chmod.kh_cone_decomposition(n).values()),
                    "bijection+differentials",
                ),
            )
        )

    tri_hi = min(n_max + 2, 6) if not quick else min(n_max, 4)

    def triangles():
        jw = chmod.jw_system(tri_hi)
        kh = chmod.khovanov_system(tri_hi)
        for n in range(2, tri_hi + 1):
            chmod.triangle_check(jw, n)
            chmod.triangle_check(kh, n)
        return True, f"both systems, 2 <= n <= {tri_hi}"

    checks.append(("chebyshev triangles", triangles))

    def theta():
        to = min(n_max, 4)
        kh = chmod.khovanov_system(to)
        jw = chmod.jw_system(to)
        td = chmod.build_theta(kh, jw, to)
        return all(td.verified.values()), f"V_n ~ im p_n for n <= {to}"

    checks.append(("uniqueness: theta between the systems", theta))
    return checks


# ---------------------------------------------------------------------------
# projector


def suite_projector(n_max: int = 3, depth: int = 8, quick: bool = False) -> list:
    checks = []
    p2depth = 12

    def p2():
        p = prmod.p2_complex(p2depth)
        ok, w = d_squared_check(p.complex)
        if not ok:
            return False, "d^2 != 0"
        shifts = sorted((g.tdeg, g.qshift) for g in p.complex.generators())
        want = sorted([(0, 0)] + [(-k, 2 * k - 1) for k in range(1, p2depth + 1)])
        if shifts != want:
            return False, "shift pattern broke"
        if not p.eta.is_closed():
            return False, "eta not closed"
        if not all(w < 2 for w in p.unit_cone_widths()):
            return False, "axiom P2 data broke"
        return True, f"depth {p2depth}, shifts 0,1,3,5,..."

    checks.append(("P2 periodic model", p2))

    def p2_turnbacks():
        p = prmod.p2_complex(p2depth)
        res = prmod.kills_turnbacks(p)
        ok = all(v.contractible for d in res.values() for v in d.values())
        return ok, f"window {p.safe_window}"

    checks.append(("B_1 * P2 and P2 * cup contractible on [-10, 0]", p2_turnbacks))

    def q2_splice():
        q2 = prmod.q2_complex()
        ps = prmod.splice_pn(2, q2, 7, p2depth)
        pd = prmod.p2_complex(p2depth)
        ms = {g.tdeg: g.gid for g in ps.complex.gens.values()}
        md = {g.tdeg: g.gid for g in pd.complex.gens.values()}
        if sorted(ms) != sorted(md):
            return False, "generator sets differ"
        for (a, b), m in pd.complex.diff.items():
            ta, tb = pd.complex.gens[a].tdeg, pd.complex.gens[b].tdeg
            if ps.complex.entry(ms[ta], ms[tb]) != m:
                return False, f"entry at {ta}->{tb} differs"
        return True, "spliced P2 == direct P2 entrywise"

    checks.append(("splice of Q2 copies equals the direct P2", q2_splice))

    def q3():
        p2 = prmod.p2_complex(depth + 4)
        qn = prmod.build_qn(3, p2, depth)
        ok, w = d_squared_check(qn.complex)
        hks = {k: len(v.entries) for k, v in qn.solved.items()}
        return ok, f"homotopies {hks}, d^2 = 0 at depth {depth}"

    checks.append((f"Q3 at depth {depth}: h, k, gamma solved and d^2 = 0", q3))

    def p3_turnbacks():
        p2 = prmod.p2_complex(depth + 4)
        qn = prmod.build_qn(3, p2, depth)
        p3 = prmod.splice_pn(3, qn, 3, depth)
        ok, _ = d_squared_check(p3.complex)
        if not ok:
            return False, "P3 d^2 != 0"
        res = prmod.kills_turnbacks(p3)
        okk = all(v.contractible for d in res.values() for v in d.values())
        return okk, f"B_1, B_2 on window {p3.safe_window}"

    checks.append(("spliced P3 kills turnbacks on the safe window", p3_turnbacks))

    def traces():
        p2 = prmod.p2_complex(p2depth)
        el, cutoff = annmod.trace_euler_truncated(p2)
        r2 = annmod.chebyshev_indicator_below_cutoff(el, 2, cutoff)
        if not (r2["S_n_coefficient_is_1"] and r2["other_coefficients_vanish"]):
            return False, "P2 trace mismatch"
        p2b = prmod.p2_complex(depth + 4)
        qn = prmod.build_qn(3, p2b, depth)
        p3 = prmod.splice_pn(3, qn, 3, depth)
        el3, c3 = annmod.trace_euler_truncated(p3)
        r3 = annmod.chebyshev_indicator_below_cutoff(el3, 3, c3)
        ok = r3["S_n_coefficient_is_1"] and r3["other_coefficients_vanish"]
        return ok, f"S_2 below q^{cutoff}, S_3 below q^{c3}"

    checks.append(("trace_euler of truncated P_n matches S_n below cutoff", traces))

    def random_battery():
        rng = random.Random(99)
        trials = 60 if quick else 250
        for _ in range(trials):
            k = rng.randint(1, 2)
            mlist1 = tgmod.all_matchings(k, k)
            a = one_term_complex(
                BNBase(k, k), rng.choice(mlist1).with_circles(rng.randint(0, 1))
            )
            b = one_term_complex(BNBase(k, k), rng.choice(mlist1))
            s = star_compose(a, b)
            ok, _ = d_squared_check(s)
            if not ok:
                return False, "star broke d^2"
            before = annmod.trace_euler(s)
            simp = simplify(s)
            ok2, _ = d_squared_check(simp)
            if not ok2:
                return False, "simplify broke d^2"
            if annmod.trace_euler(simp) != before:
                return False, "trace_euler not invariant"
        return True, f"{trials} random star complexes"

    checks.append(("randomized d^2 and trace invariance battery", random_battery))
    return checks


# ---------------------------------------------------------------------------
# annulus


def suite_annulus(n_max: int = 4, depth: int = 8, quick: bool = False) -> list:
    def dot_vanishing():
        v1 = annmod.essential_dot_vanishing([annmod.AnnularPart("essential", dots=1)])
        if not v1.vanished:
            return False, "essential dot survived"
        v2 = annmod.essential_dot_vanishing([annmod.AnnularPart("trivial", dots=1)])
        if v2.vanished:
            return False, "dotted trivial circle vanished"
        v3 = annmod.essential_dot_vanishing([annmod.AnnularPart("essential", degree=2)])
        if not v3.vanished:
            return False, "degree-2 endomorphism survived"
        return True, "membrane rules"

    def cyclicity():
        import itertools as it

        for n in (2, 3):
            els = [tlmod.e_element(n, i) for i in range(1, n)]
            for (x, y) in it.product(els, repeat=2):
                rot, power = annmod.cyclicity_rotate([x, y], 1)
                lhs = tlmod.annular_skein_closure(tl_compose(x, y))
                rhs = tlmod.annular_skein_closure(rot)
                if power != 0 or lhs != rhs:
                    return False, "closure not rotation invariant"
        idn = tlmod.identity_element(3)
        rot, power = annmod.cyclicity_rotate([idn, idn], 1)
        if rot != idn or power != 0:
            return False, "identity rotation broke"
        rot, power = annmod.cyclicity_rotate([idn, idn], 1, shift_allocation=2)
        if power != 2:
            return False, "shift allocation power broke"
        return True, "closures agree, q-powers tracked"

    def closure_p_eps():
        for n in range(1, min(n_max, 5) + 1):
            for e in tlmod.admissible_sequences(n):
                cl = tlmod.annular_closure_cleared(tlmod.primitive_idempotent_cleared(e))
                jw = tlmod.jones_wenzl(e.total)
                if cl != tlmod.annular_skein_closure(jw):
                    return False, f"closure(p_eps) != closure(p_k) at {e.entries}"
        return True, f"n <= {min(n_max, 5)}"

    def trace_invariance():
        rng = random.Random(123)
        for _ in range(40 if quick else 150):
            mlist = tgmod.all_matchings(2, 2)
            a = one_term_complex(BNBase(2, 2), rng.choice(mlist).with_circles(1))
            b = one_term_complex(BNBase(2, 2), rng.choice(mlist))
            s = star_compose(a, b)
            t1 = annmod.trace_euler(s)
            t2 = annmod.trace_euler(deloop_pass(s))
            t3 = annmod.trace_euler(gaussian_eliminate(deloop_pass(s)))
            if not (t1 == t2 == t3):
                return False, "trace changed under deloop/eliminate"
        return True, "deloop and elimination invariance"

    return [
        ("essential dot and degree vanishing", dot_vanishing),
        ("cyclicity rotation", cyclicity),
        ("closure of p_eps equals closure of p_|eps|", closure_p_eps),
        ("trace_euler invariance", trace_invariance),
    ]


# ---------------------------------------------------------------------------
# arc


def suite_arc(n_max: int = 3, depth: int = 8, quick: bool = False) -> list:
    hi = min(n_max, 3)

    def dims():
        for n in range(1, hi + 1):
            alg = arcmod.arc_algebra(n)
            if alg.graded_dimension() != arcmod.graded_dimension_formula(n):
                return False, f"graded dim mismatch at n={n}"
        return True, f"n <= {hi}"

    def assoc():
        for n in (1, 2) if quick else (1, 2, 3):
            alg = arcmod.arc_algebra(n)
            if not alg.check_associativity():
                return False, f"associativity broke at n={n}"
            if not alg.check_unital():
                return False, f"unit broke at n={n}"
        return True, "multiplication tables associative and unital"

    def bimodules():
        alg = arcmod.arc_algebra(1)
        t = tgmod.identity_tangle(2)
        bm = arcmod.bimodule_of_tangle(alg, t)
        if bm.dim() != alg.dim():
            return False, "regular bimodule dimension broke"
        return True, "F(1_2n) is the regular bimodule"

    def coinv():
        for n in range(1, hi + 1):
            rank, spanning = arcmod.quantum_coinvariants_rank(n)
            if rank != tgmod.catalan(n) or not spanning:
                return False, f"rank {rank} at n={n}"
        return True, f"ranks {[tgmod.catalan(k) for k in range(1, hi + 1)]}"

    def hochschild():
        hh = arcmod.quantum_hochschild_bar(1, 2)
        if hh != {0: 1, 1: 0, 2: 0}:
            return False, f"quantum HH {hh}"
        cl = arcmod.quantum_hochschild_bar(1, 1, classical=True)
        if cl[1] == 0:
            return False, "classical control lost HH_1"
        return True, "HH_0 = 1, higher vanish; classical HH_1 != 0"

    return [
        ("graded dimensions", dims),
        ("associativity and units", assoc),
        ("tangle bimodules", bimodules),
        ("quantum coinvariants = Catalan", coinv),
        ("quantum bar complex at n=1", hochschild),
    ]


SUITES = {
    "coeff": suite_coeff,
    "tl": suite_tl,
    "cob": suite_cob,
    "chebyshev": suite_chebyshev,
    "projector": suite_projector,
    "annulus": suite_annulus,
    "arc": suite_arc,
}


def verify_suite(name: str, n_max: int = 4, depth: int = 8,
                 parallelism: int = 1, quick: bool = False) -> SuiteReport:
    if name == "all":
        report = SuiteReport("all")
        for key in sorted(SUITES):
            sub = _run_checks(
                key, SUITES[key](n_max=n_max, depth=depth, quick=quick), parallelism
            )
            for r in sub.results:
                report.results.append(
                    CheckResult(f"{key}: {r.name}", r.passed, r.witness, r.seconds)
                )
        return report
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return _run_checks(
        name, SUITES[name](n_max=n_max, depth=depth, quick=quick), parallelism
    )

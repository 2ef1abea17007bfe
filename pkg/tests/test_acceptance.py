"""Acceptance suite: one test per criterion, each printing a pass/fail
line (run with `pytest -s` to see them inline).

Every tolerance and time budget is pinned here; nothing is deferred to
later calibration.  Exact means exact: integer-rate instances are checked
in rational arithmetic with zero tolerance.
"""

import contextlib
import random
import time
from fractions import Fraction

from orderdual import duality as du
from orderdual import flow
from orderdual import lattice as lat
from orderdual import markov as mk
from orderdual import models
from orderdual import percolation as pc
from orderdual import poset as ps
from orderdual.maps import is_monotone, random_additive_map


@contextlib.contextmanager
def criterion(number, label, budget=None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number:2d} FAIL: {label}")
        raise
    elapsed = time.perf_counter() - start
    note = f" ({elapsed:.2f}s)" if budget is None else (
        f" ({elapsed:.2f}s of {budget:.0f}s budget)"
    )
    print(f"[acceptance] criterion {number:2d} PASS: {label}{note}")
    if budget is not None:
        assert elapsed < budget, f"runtime {elapsed:.2f}s exceeds {budget}s"


def test_criterion_01_additive_map_duality():
    with criterion(1, "exhaustive additive map duality (voter, krone, "
                      "siegmund), exact", budget=5.0):
        for model in (
            models.build_voter(3),
            models.build_krone(2),
            models.build_siegmund(4),
        ):
            psi = model.pairing.psi_table()
            dual = mk.dual_rep_additive(model.pairing, model.rep)
            for (m, _), (dm, _) in zip(model.rep.entries, dual.entries):
                rep = du.verify_map_duality(psi, m, dm, mode="equal")
                assert rep.ok and rep.pairs_checked == model.rep.space.n ** 2

        # the two-stage contact dual table, literally
        kr = models.build_krone(2)
        by_name = {m.name: m.img for m, _ in kr.rep.entries}
        dual = mk.dual_rep_additive(kr.pairing, kr.rep)
        table = {"a": "a", "c": "e", "d": "d", "e": "c"}
        for (m, _), (dm, _) in zip(kr.rep.entries, dual.entries):
            fam, idx = m.name.split("_")
            if fam == "b":
                want = by_name[f"b_{idx[1]}{idx[0]}"]
            else:
                want = by_name[f"{table[fam]}_{idx}"]
            assert dm.img == want, m.name


def test_criterion_02_monotone_map_duality():
    with criterion(2, "exhaustive monotone phi-duality for cooperative "
                      "branching (dagger and star), exact", budget=30.0):
        co = models.build_coop_branching(3)
        d = co.pairing
        chains = du.antichains(d.s_prime)
        for m, _ in co.rep.entries:
            for b in chains:
                dag = du.dual_dagger(d, m, b)
                star = du.dual_star(d, m, b)
                for x in range(8):
                    lhs = du.phi_value(d, m.img[x], b)
                    assert lhs == du.phi_value(d, x, dag)
                    assert lhs == du.phi_value(d, x, star)
        # the verbatim split of the branching dual: 001 -> {011, 101}
        b012 = models.coop_b_map(co.rep.space, 3, 0, 1, 2)
        got = du.dual_star(d, b012, frozenset({0b100}))
        assert got == frozenset({0b110, 0b101})


def _float_intertwining_cases():
    cases = []
    for sites in (2, 3):
        cases.append(models.build_voter(sites))
        cases.append(models.build_krone(sites))
        cases.append(models.build_contact(sites))
    cases.append(models.build_siegmund(4))
    return cases


def test_criterion_03_generator_intertwining():
    with criterion(3, "generator intertwining: exact on integer-rate "
                      "voter/krone, < 1e-12 float on all builtins"):
        for model in (models.build_voter(2), models.build_krone(2)):
            dual = mk.dual_rep_additive(model.pairing, model.rep)
            q = mk.build_generator(model.rep, exact=True)
            qd = mk.build_generator(dual, exact=True)
            rep = mk.check_intertwining(q, qd, model.pairing.psi_table())
            assert rep.exact and rep.residual == 0

        for model in _float_intertwining_cases():
            dual = mk.dual_rep_additive(model.pairing, model.rep)
            q = mk.build_generator(model.rep)
            qd = mk.build_generator(dual)
            rep = mk.check_intertwining(
                q, qd, model.pairing.psi_table(), tol=1e-12
            )
            assert rep.ok, (model.name, rep.residual)

        for model in (
            models.build_coop_branching(2),
            models.build_coop_branching(3),
            models.builtin("spin", 2),
            models.builtin("spin", 3),
        ):
            closure = mk.dual_rep_monotone(
                model.pairing,
                model.rep,
                seeds=[frozenset({y}) for y in range(model.rep.space.n)],
                variant="star",
            )
            phi = du.phi_table(model.pairing, list(closure.states))
            q = mk.build_generator(model.rep)
            rep = mk.check_intertwining(q, closure.generator, phi, tol=1e-12)
            assert rep.ok, (model.name, rep.residual)


def test_criterion_04_semigroup_duality():
    with criterion(4, "semigroup duality < 1e-8 at t in {0.1, 1.0}, "
                      "uniformization tol 1e-12", budget=10.0):
        cases = [
            models.build_voter(2),
            models.build_krone(2),
            models.build_contact(2),
            models.build_siegmund(4),
        ]
        for model in cases:
            dual = mk.dual_rep_additive(model.pairing, model.rep)
            q = mk.build_generator(model.rep)
            qd = mk.build_generator(dual)
            psi = model.pairing.psi_table()
            for t in (0.1, 1.0):
                rep = mk.semigroup_duality_check(
                    q, qd, psi, t, tol=1e-8, uni_tol=1e-12
                )
                assert rep.ok, (model.name, t, rep.residual)


def test_criterion_05_pathwise_constancy():
    with criterion(5, "pathwise constancy on 100 sampled logs per builtin, "
                      "all pairs, zero violations"):
        additive = [
            models.build_voter(3),
            models.build_krone(2),
            models.build_contact(3),
            models.build_siegmund(4),
        ]
        for model in additive:
            dual = mk.dual_rep_additive(model.pairing, model.rep)
            da, pv = flow.additive_pathwise(model.pairing, model.rep, dual)
            n = model.rep.space.n
            for i in range(100):
                log = flow.sample_event_log(model.rep, 0.0, 1.0, seed=i)
                for x in range(n):
                    for y in range(n):
                        assert flow.check_pathwise_constancy(
                            log, model.rep, da, pv, x, y
                        ).ok, (model.name, i, x, y)

        for variant in ("dagger", "star"):
            co = models.build_coop_branching(3)
            da, pv = flow.monotone_pathwise(co.pairing, co.rep, variant)
            for i in range(100):
                log = flow.sample_event_log(co.rep, 0.0, 0.25, seed=1000 + i)
                for x in range(8):
                    for y in range(8):
                        assert flow.check_pathwise_constancy(
                            log, co.rep, da, pv, x, frozenset({y})
                        ).ok, (variant, i, x, y)


def test_criterion_06_monte_carlo_vs_exact():
    with criterion(6, "Monte Carlo duality at N=1e5 within 3 pooled "
                      "standard errors of the matrix value", budget=20.0):
        vo = models.build_voter(2)
        dual = mk.dual_rep_additive(vo.pairing, vo.rep)
        psi = vo.pairing.psi_table()
        q = mk.build_generator(vo.rep)
        qd = mk.build_generator(dual)
        pt = mk.transition_matrix(q, 1.0, tol=1e-12)
        ptd = mk.transition_matrix(qd, 1.0, tol=1e-12)
        x0, y0 = 1, 1
        lhs_exact = float((pt @ psi.astype(float))[x0, y0])
        rhs_exact = float((psi.astype(float) @ ptd.T)[x0, y0])
        res = flow.monte_carlo_duality(
            vo.rep, [m.img for m in dual.maps()], psi, x0, y0, 1.0,
            100_000, seed=20260809,
        )
        assert abs(res.mean_lhs - lhs_exact) <= 3 * res.stderr
        assert abs(res.mean_rhs - rhs_exact) <= 3 * res.stderr


def test_criterion_07_percolation_equivalence():
    with criterion(7, "open-path reachability equals the flow and the "
                      "graphical duality identity holds, 100 diagrams"):
        vo = models.build_voter(3)
        ground = ps.antichain(3)
        fam = lat.all_decreasing_family(ground)

        def to_set(x):
            return frozenset(i for i in range(3) if x >> i & 1)

        def to_mask(s):
            return sum(1 << i for i in s)

        msets = []
        for m, _ in vo.rep.entries:
            img = [fam.index[to_set(m.img[to_mask(s)])] for s in fam.sets]
            msets.append(pc.map_to_mset(fam, img))

        produced = 0
        seed = 0
        while produced < 100:
            log = flow.sample_event_log(vo.rep, 0.0, 1.0, seed=seed)
            seed += 1
            if len(log) > 12:
                continue
            produced += 1
            dia = pc.diagram_of_log(log, msets, ground)
            for x in range(8):
                want = flow.flow_eval(log, vo.rep, 0.0, 1.0, x)
                assert to_mask(pc.reach(dia, to_set(x), 0.0, 1.0)) == want
                for y in range(8):
                    assert pc.check_graphical_duality(
                        dia, to_set(x), to_set(y), 0.0, 1.0
                    ).ok


def test_criterion_08_birkhoff_round_trip():
    with criterion(8, "Birkhoff representation verified on chains, grids "
                      "and the subset cube; M3/N5 rejected with witnesses"):
        fixtures = [ps.chain(n) for n in range(1, 6)]
        for a in (2, 3):
            for b in (2, 3):
                fixtures.append(ps.product_poset([ps.chain(a), ps.chain(b)]))
        fixtures.append(ps.product_poset([ps.chain(2)] * 3))
        for p in fixtures:
            info = lat.analyze_lattice(p)
            res = lat.birkhoff_represent(info)
            assert isinstance(res, lat.BirkhoffResult)
            assert len(set(res.iso)) == p.n
            for x in range(p.n):
                for y in range(p.n):
                    assert bool(p.leq[x, y]) == (res.iso[x] <= res.iso[y])
                    assert res.iso[info.join[x, y]] == res.iso[x] | res.iso[y]
                    assert res.iso[info.meet[x, y]] == res.iso[x] & res.iso[y]
        for p in (lat.m3(), lat.n5()):
            info = lat.analyze_lattice(p)
            res = lat.birkhoff_represent(info)
            assert isinstance(res, lat.NotDistributive)
            x, y, z = res.witness
            assert info.meet[x, info.join[y, z]] != (
                info.join[info.meet[x, y], info.meet[x, z]]
            )


def test_criterion_09_nondistributive_extension():
    with criterion(9, "additive-map extension on the M3/N5 embeddings: "
                      "additive on all decreasing sets, restricts exactly"):
        rng = random.Random(909)
        for p in (lat.m3(), lat.n5()):
            info = lat.analyze_lattice(p)
            emb = lat.embed_join_semilattice(info)
            for _ in range(50):
                m = random_additive_map(rng, p)
                full, ext = lat.extend_additive_map(
                    emb, [m.img[x] for x in range(p.n)]
                )
                # additive on the whole family of decreasing sets
                empty = full.index[frozenset()]
                assert ext[empty] == empty
                for a in full.sets:
                    for b in full.sets:
                        assert full.sets[ext[full.index[a | b]]] == (
                            full.sets[ext[full.index[a]]]
                            | full.sets[ext[full.index[b]]]
                        )
                # restriction to the embedded family is the input
                for x in range(p.n):
                    assert full.sets[ext[full.index[emb.sets[x]]]] == (
                        emb.sets[m.img[x]]
                    )


def test_criterion_10_gray_equivalence():
    with criterion(10, "path-enumeration oracle equals the iterated "
                       "union-additive dual on 50 spin instances",
                   budget=60.0):
        rng = random.Random(4242)
        p = models.cube(2)
        produced = 0
        while produced < 50:
            beta = []
            delta = []
            for i in range(2):
                raw = [rng.randrange(0, 3) for _ in range(4)]
                b = [0] * 4
                for x in range(4):
                    b[x] = max([raw[x]] + [b[y] for y in range(4)
                                           if p.leq[y, x] and y != x])
                beta.append(b)
                d = [0] * 4
                for x in (3, 2, 1, 0):
                    d[x] = max([raw[3 - x]] + [d[y] for y in range(4)
                                               if p.leq[x, y] and y != x])
                delta.append(d)
            rep = models.decompose_attractive_spin(2, beta, delta)
            if not len(rep):
                continue
            log = flow.sample_event_log(rep, 0.0, 0.4, seed=5000 + produced)
            events = [rep.entries[k][0] for k in log.map_ids][:3]
            produced += 1
            for y in range(4):
                gray = du.check_gray_equivalence(events, y, budget=256)
                assert gray.ok, (produced, y, [e.img for e in events])


def test_criterion_11_attractive_spin_round_trip():
    with criterion(11, "attractive spin decomposition rebuilds the flip "
                       "generator exactly (rational rates)"):
        rng = random.Random(111)
        p = models.cube(2)
        for _ in range(20):
            beta, delta = [], []
            for i in range(2):
                raw = [Fraction(rng.randrange(0, 12), rng.randrange(1, 5))
                       for _ in range(4)]
                b = [Fraction(0)] * 4
                for x in range(4):
                    b[x] = max([raw[x]] + [b[y] for y in range(4)
                                           if p.leq[y, x] and y != x])
                beta.append(b)
                d = [Fraction(0)] * 4
                for x in (3, 2, 1, 0):
                    d[x] = max([raw[3 - x]] + [d[y] for y in range(4)
                                               if p.leq[x, y] and y != x])
                delta.append(d)
            rep = models.decompose_attractive_spin(2, beta, delta)
            for m, _ in rep.entries:
                assert is_monotone(m, cross_check=False).ok
            assert mk.build_generator(rep, exact=True) == (
                models.spin_generator(2, beta, delta, exact=True)
            )


def test_criterion_12_monotone_kernel_representation():
    with criterion(12, "quantile construction: monotone maps mixing "
                       "exactly to 50 random monotone chain kernels"):
        rng = random.Random(1212)

        def random_monotone_kernel(n, denom):
            F = [[0] * n for _ in range(n)]
            for x in range(n):
                for y in range(n):
                    lo = F[x][y - 1] if y else 0
                    hi = F[x - 1][y] if x else denom
                    F[x][y] = denom if y == n - 1 else rng.randint(lo, hi)
            return [
                [Fraction(F[x][y] - (F[x][y - 1] if y else 0), denom)
                 for y in range(n)]
                for x in range(n)
            ]

        for trial in range(50):
            n = rng.randint(2, 5)
            K = random_monotone_kernel(n, denom=rng.choice([6, 12, 60]))
            out = models.represent_monotone_kernel_chain(K)
            assert sum(prob for prob, _ in out) == 1
            for prob, m in out:
                assert prob > 0
                assert is_monotone(m, cross_check=False).ok, (trial, m.img)
            mix = [
                [sum(prob for prob, m in out if m.img[x] == y)
                 for y in range(n)]
                for x in range(n)
            ]
            assert mix == K, trial

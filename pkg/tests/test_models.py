import json
from fractions import Fraction

import pytest

from orderdual import duality as du
from orderdual import flow
from orderdual import markov as mk
from orderdual import models
from orderdual import poset as ps
from orderdual.maps import is_additive, is_monotone


class TestVoter:
    def test_single_site_no_maps(self):
        assert len(models.build_voter(1).rep) == 0

    def test_map_values(self):
        vo = models.build_voter(2)
        v01 = models.voter_map(vo.rep.space, 2, 0, 1)
        # from {0}: site 0 occupied, copies into 1 -> {0,1}; from {1}: site 0
        # empty, clears 1 -> {}
        assert v01.img[1] == 3
        assert v01.img[2] == 0

    def test_all_additive(self):
        vo = models.build_voter(3)
        assert vo.rep.all_additive

    def test_dual_is_walk_rep(self):
        vo = models.build_voter(3)
        dual = mk.dual_rep_additive(vo.pairing, vo.rep)
        sp = vo.rep.space
        for (m, r), (dm, dr) in zip(vo.rep.entries, dual.entries):
            i, j = int(m.name[4]), int(m.name[5])
            assert dm.img == models.rw_map(sp, 3, j, i).img
            assert r == dr


class TestKrone:
    def test_grow_up(self):
        kr = models.build_krone(2)
        a0 = next(m for m, _ in kr.rep.entries if m.name == "a_0")
        # state (1, 0) has index 1; growing up gives (2, 0) = index 2
        assert a0.img[1] == 2
        assert a0.img[2] == 2

    def test_birth_requires_adult_and_empty(self):
        kr = models.build_krone(2)
        b01 = next(m for m, _ in kr.rep.entries if m.name == "b_01")
        # (2, 0) -> (2, 1); (1, 0) unchanged; (2, 2) unchanged
        assert b01.img[2] == 5
        assert b01.img[1] == 1
        assert b01.img[8] == 8

    def test_all_five_families_additive(self):
        kr = models.build_krone(2)
        for m, _ in kr.rep.entries:
            assert is_additive(m, cross_check=False).ok, m.name

    def test_forward_set_coding(self):
        # sitewise: 0 <-> {}, 1 <-> {(i,0)}, 2 <-> {(i,0),(i,1)}
        assert models.krone_state_to_set(0, 2) == frozenset()
        assert models.krone_state_to_set(1, 2) == frozenset({0})
        assert models.krone_state_to_set(2, 2) == frozenset({0, 2})
        for x in range(9):
            assert models.krone_set_to_state(
                models.krone_state_to_set(x, 2), 2
            ) == x

    def test_set_coding_rejects_increasing(self):
        with pytest.raises(models.ModelError):
            models.krone_set_to_state(frozenset({2}), 2)  # (0,1) without (0,0)


class TestCoop:
    def test_b_variants(self):
        sp = models.cube(3)
        b1 = models.coop_b1_map(sp, 3, 0, 1, 2)
        b2 = models.coop_b2_map(sp, 3, 0, 1, 2)
        # 001 on (i,j,k) = only site 2 occupied = mask 4
        assert b1.img[4] == 6  # 011 -> sites 1,2
        assert b2.img[4] == 5  # 101 -> sites 0,2
        assert b1.img[5] == 5 and b2.img[6] == 6

    def test_c_map_values(self):
        sp = models.cube(2)
        c = models.coop_c_map(sp, 2, 0, 1)
        # c(11) = 01 and c(10) = 01 in (i,j) coordinates
        assert c.img[3] == 2
        assert c.img[1] == 2
        assert c.img[0] == 0 and c.img[2] == 2

    def test_a_is_voter_with_swapped_indices(self):
        sp = models.cube(3)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert models.coop_a_map(sp, 3, i, j).img == (
                        models.voter_map(sp, 3, j, i).img
                    )

    def test_c_is_walk(self):
        sp = models.cube(3)
        assert models.coop_c_map(sp, 3, 0, 1).img == models.rw_map(
            sp, 3, 0, 1
        ).img

    def test_b_monotone_not_additive(self):
        co = models.build_coop_branching(3)
        for m, _ in co.rep.entries:
            assert is_monotone(m, cross_check=False).ok
            if m.name.startswith("b_"):
                assert not is_additive(m, cross_check=False).ok

    def test_distinct_indices_enforced(self):
        with pytest.raises(models.ModelError):
            models.build_coop_branching(3, branch=[(0, 0, 1, 1.0)])

    def test_explicit_star_duals_match_generic(self):
        co = models.build_coop_branching(2, death=[(0, 1.0)],
                                         exclusion=[(0, 1, 0.5)])
        sp = co.rep.space
        explicit = models.coop_dual_star_maps(sp, 2, co.params)
        k = 0
        for maps, rate in explicit:
            m, r = co.rep.entries[k]
            assert float(rate) == float(r)
            for b_mask in range(16):
                b = frozenset(y for y in range(4) if b_mask >> y & 1)
                want = du.dual_star(co.pairing, m, b)
                got = frozenset()
                for dm in maps:
                    got |= frozenset(dm.img[y] for y in b)
                assert got == want, (m.name, sorted(b))
            k += 1


class TestSiegmund:
    def test_default_maps_valid(self):
        sg = models.build_siegmund(4)
        assert sg.rep.all_additive
        assert len(sg.rep) == 2

    def test_rejects_birth_without_trap(self):
        with pytest.raises(models.ModelError):
            models.build_siegmund(
                4, entries=[(tuple(min(x + 1, 4) for x in range(5)), 1.0)]
            )

    def test_down_step_accepted_dual_fixes_top(self):
        sg = models.build_siegmund(
            4, entries=[(tuple(max(x - 1, 0) for x in range(5)), 1.0)]
        )
        dual = mk.dual_rep_additive(sg.pairing, sg.rep)
        assert dual.entries[0][0].img[4] == 4

    def test_identity_self_dual(self):
        sg = models.build_siegmund(3, entries=[(tuple(range(4)), 1.0)])
        dual = mk.dual_rep_additive(sg.pairing, sg.rep)
        assert dual.entries[0][0].img == (0, 1, 2, 3)

    def test_from_kernel(self):
        K = [
            [Fraction(1), 0, 0],
            [Fraction(1, 2), Fraction(1, 2), 0],
            [0, Fraction(1, 2), Fraction(1, 2)],
        ]
        sg = models.build_siegmund(2, entries=[], kernel=K, kernel_rate=2)
        assert len(sg.rep) >= 2
        assert abs(float(sg.rep.total_rate) - 2.0) < 1e-12


class TestIndicatorDecomposition:
    def test_constant(self):
        p = models.cube(2)
        terms = models.monotone_indicator_decomposition(p, [3, 3, 3, 3])
        assert terms == [(3, frozenset(range(4)))]

    def test_indicator_of_increasing_set(self):
        p = models.cube(2)
        a = ps.up_set(p, {1})
        values = [1 if x in a else 0 for x in range(4)]
        terms = models.monotone_indicator_decomposition(p, values)
        assert terms == [(0, frozenset(range(4))), (1, a)]

    def test_cardinality_function(self):
        # |x| on subsets of a 2-set: level sets at 1 and 2 particles
        p = models.cube(2)
        values = [bin(x).count("1") for x in range(4)]
        terms = models.monotone_indicator_decomposition(p, values)
        assert terms[0] == (0, frozenset(range(4)))
        assert terms[1] == (1, frozenset({1, 2, 3}))
        assert terms[2] == (1, frozenset({3}))
        # exact reconstruction
        for x in range(4):
            assert sum(c for c, a in terms if x in a) == values[x]

    def test_reconstruction_random_exact(self, rng):
        p = models.cube(3)
        for _ in range(20):
            raw = [Fraction(rng.randrange(-4, 8), 3) for _ in range(8)]
            vals = [Fraction(0)] * 8
            for x in range(8):
                vals[x] = max(
                    [raw[x]] + [vals[y] for y in range(8)
                                if p.leq[y, x] and y != x]
                )
            terms = models.monotone_indicator_decomposition(p, vals)
            for c, a in terms[1:]:
                assert c >= 0
                assert ps.up_set(p, a) == a
            for x in range(8):
                assert sum(c for c, a in terms if x in a) == vals[x]

    def test_non_monotone_rejected(self):
        with pytest.raises(models.ModelError):
            models.monotone_indicator_decomposition(ps.chain(2), [1, 0])


class TestAttractiveSpin:
    def test_zero_tables_empty_rep(self):
        rep = models.decompose_attractive_spin(2, [[0] * 4] * 2, [[0] * 4] * 2)
        assert len(rep) == 0

    def test_pure_pair_birth(self):
        beta = [[0, 0, 1, 1], [0, 0, 0, 0]]
        delta = [[0] * 4, [0] * 4]
        rep = models.decompose_attractive_spin(2, beta, delta)
        assert len(rep) == 1
        m, r = rep.entries[0]
        assert r == 1
        assert m.img == (0, 1, 3, 3)

    def test_round_trip_exact_random(self, rng):
        p = models.cube(2)
        for _ in range(20):
            beta, delta = [], []
            for i in range(2):
                raw = [Fraction(rng.randrange(0, 9), rng.randrange(1, 4))
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
            assert all(is_monotone(m, cross_check=False).ok
                       for m, _ in rep.entries)
            assert mk.build_generator(rep, exact=True) == (
                models.spin_generator(2, beta, delta, exact=True)
            )

    def test_contact_rates_match_direct_rep(self):
        ct = models.build_contact(2, branch=[[0, 2], [1, 0]], death=[1, 3])
        beta = [[(x >> 1 & 1) for x in range(4)],
                [(x & 1) * 2 for x in range(4)]]
        delta = [[1] * 4, [3] * 4]
        rep = models.decompose_attractive_spin(2, beta, delta)
        assert mk.build_generator(rep, exact=True) == mk.build_generator(
            ct.rep, exact=True
        )

    def test_attractiveness_enforced(self):
        # non-monotone birth table
        with pytest.raises(models.ModelError):
            models.decompose_attractive_spin(
                2, [[1, 0, 0, 0], [0] * 4], [[0] * 4] * 2
            )
        # non-anti-monotone death table
        with pytest.raises(models.ModelError):
            models.decompose_attractive_spin(
                2, [[0] * 4] * 2, [[0, 1, 0, 1], [0] * 4]
            )


class TestKernelRepresentation:
    def test_identity(self):
        out = models.represent_monotone_kernel_chain([[1, 0], [0, 1]])
        assert len(out) == 1
        assert out[0][0] == 1 and out[0][1].img == (0, 1)

    def test_deterministic_map_kernel(self):
        img = (0, 0, 1)
        K = [[1, 0, 0], [1, 0, 0], [0, 1, 0]]
        out = models.represent_monotone_kernel_chain(K)
        assert len(out) == 1 and out[0][1].img == img

    def test_three_chain_example(self):
        K = [
            [Fraction(1, 2), Fraction(1, 2), 0],
            [0, Fraction(1, 2), Fraction(1, 2)],
            [0, 0, 1],
        ]
        out = models.represent_monotone_kernel_chain(K)
        assert [m.img for _, m in out] == [(0, 1, 2), (1, 2, 2)]
        assert [p for p, _ in out] == [Fraction(1, 2), Fraction(1, 2)]

    def test_rejects_non_monotone(self):
        with pytest.raises(models.ModelError):
            models.represent_monotone_kernel_chain([[0, 1], [1, 0]])

    def test_rejects_bad_rows(self):
        with pytest.raises(models.ModelError):
            models.represent_monotone_kernel_chain([[0.5, 0.4], [0, 1]])


class TestModelJson:
    @pytest.mark.parametrize(
        "name,sites", [("voter", 2), ("krone", 2), ("coop", 3),
                       ("contact", 2), ("spin", 2)]
    )
    def test_round_trip(self, name, sites):
        model = models.builtin(name, sites)
        rebuilt = models.build_model(json.dumps(model.params))
        assert len(rebuilt.rep) == len(model.rep)
        for (m1, r1), (m2, r2) in zip(model.rep.entries, rebuilt.rep.entries):
            assert m1.img == m2.img
            assert float(r1) == float(r2)

    def test_siegmund_round_trip(self):
        model = models.builtin("siegmund", 4)
        rebuilt = models.build_model(json.dumps(model.params))
        assert [m.img for m, _ in rebuilt.rep.entries] == [
            m.img for m, _ in model.rep.entries
        ]

    def test_custom_model(self):
        vo = models.build_voter(2)
        doc = models.model_to_custom_json("v", vo.rep,
                                          prime=[3, 2, 1, 0])
        back = models.build_model(doc)
        assert back.additive
        assert [m.img for m, _ in back.rep.entries] == [
            m.img for m, _ in vo.rep.entries
        ]

    def test_unknown_kind(self):
        with pytest.raises(models.ModelError):
            models.build_model({"model": "nope"})


class TestModelInvariants:
    @pytest.mark.parametrize("name,sites",
                             [("voter", 3), ("krone", 2), ("siegmund", 4),
                              ("contact", 3)])
    def test_additive_models(self, name, sites):
        model = models.builtin(name, sites)
        assert model.additive and model.rep.all_additive
        dual = mk.dual_rep_additive(model.pairing, model.rep)
        psi = model.pairing.psi_table()
        q = mk.build_generator(model.rep, exact=True)
        qd = mk.build_generator(dual, exact=True)
        rep = mk.check_intertwining(q, qd, psi)
        assert rep.ok and rep.residual == 0

    @pytest.mark.parametrize("name,sites", [("coop", 3), ("spin", 2)])
    def test_monotone_models_pathwise(self, name, sites):
        model = models.builtin(name, sites)
        assert model.rep.all_monotone
        da, pv = flow.monotone_pathwise(model.pairing, model.rep, "star")
        n = model.rep.space.n
        for i in range(100):
            log = flow.sample_event_log(model.rep, 0.0, 0.3, seed=7000 + i)
            for x in range(n):
                for y in range(n):
                    assert flow.check_pathwise_constancy(
                        log, model.rep, da, pv, x, frozenset({y})
                    ).ok

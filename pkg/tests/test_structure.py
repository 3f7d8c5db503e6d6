import itertools
import random

import pytest

from qf import (
    EnumSpec, FiniteLoop, NotCongruence, NotF, NotNK, NotNormal, Permutation, builtin,
    center, commutant, congruence_from_subloop, form_at, from_table, is_congruence, is_FG,
    is_isomorphic, is_moufang, is_NK, is_simple, iter_tables, law_holds, m_set,
    moufang_center, nk_decompose, nucleus, principal_congruence, quotient, regular_pairs,
    rho_congruence, subtable,
)
from qf.laws import is_A_loop
from qf.structure import (
    Congruence, is_homomorphism, multiplication_group, nk_char_holds, pflugfelder_holds,
    quotient_loop, sub_loop,
)


def loop_of(spec):
    return FiniteLoop.of(builtin(spec))


def test_subsets_of_groups(s3):
    loop = FiniteLoop.of(s3)
    e = loop.zero
    assert nucleus(loop).members == tuple(range(6))
    assert commutant(loop).members == (e,) == center(loop).members
    assert m_set(s3).members == (e,)
    g = FiniteLoop.of(builtin("product(s3,cyclic(2))"))
    group_center = [a for a in range(12) if all(g.add(a, x) == g.add(x, a) for x in range(12))]
    assert list(m_set(g.base).members) == group_center


def test_cml81_subsets(cml81):
    loop = FiniteLoop.of(cml81)
    assert moufang_center(loop).members == tuple(range(81))
    assert nucleus(loop).members == center(loop).members == (0, 27, 54)
    assert is_NK(loop)
    n, k = nk_decompose(loop, 5)
    assert n in (0, 27, 54) and loop.add(n, k) == 5


def test_chein_loop_structure(chein_s3):
    loop = FiniteLoop.of(chein_s3)
    n = nucleus(loop)
    assert n.is_subloop and n.is_normal
    assert not is_NK(loop)
    with pytest.raises(NotNK):
        nk_decompose(loop, 11)
    assert nk_char_holds(loop, list(range(12))) == (False, False)


def test_q5_m_set_is_everything(q5):
    assert m_set(q5).members == tuple(range(5))


def test_subset_identities_on_small_loops(small_loops):
    for n, loops in small_loops.items():
        for loop in loops:
            N = set(nucleus(loop).members)
            K = set(moufang_center(loop).members)
            C = set(commutant(loop).members)
            Z = set(center(loop).members)
            assert K <= C
            assert Z == N & C == N & K
            if is_moufang(loop):
                assert K == C
            if is_A_loop(loop).holds:
                assert nucleus(loop).is_normal and moufang_center(loop).is_normal
                if is_moufang(loop):
                    assert all(loop.add(loop.add(x, x), x) in N for x in range(n))


def _nk_loops():
    out = [loop_of("cyclic(4)"), loop_of("s3"), loop_of("cml81"),
           loop_of("product(s3,cyclic(3))")]
    out.append(FiniteLoop.of(builtin("product(cyclic(3),s3)")))
    return out


def test_nk_loop_structure():
    for loop in _nk_loops():
        N = nucleus(loop).members
        K = moufang_center(loop).members
        Z = center(loop).members
        assert is_NK(loop)
        # (n, k) -> n + k is a surjective homomorphism N x K -> Q
        assert {loop.add(a, b) for a in N for b in K} == set(range(loop.order))
        for (a1, b1), (a2, b2) in itertools.islice(
                itertools.product(itertools.product(N, K), repeat=2), 4000):
            assert loop.add(loop.add(a1, b1), loop.add(a2, b2)) == \
                loop.add(loop.add(a1, a2), loop.add(b1, b2))
        n_loop, k_loop = sub_loop(loop, N), sub_loop(loop, K)
        assert sorted(N[i] for i in center(n_loop).members) == list(Z)
        assert sorted(K[i] for i in center(k_loop).members) == list(Z)
        q_n = quotient_loop(loop, congruence_from_subloop(loop, N))
        q_k = quotient_loop(loop, congruence_from_subloop(loop, K))
        assert law_holds(q_n, "commutative") and is_moufang(q_n)
        assert all(q_n.add(q_n.add(x, x), x) == q_n.zero for x in range(q_n.order))
        assert law_holds(q_k, "associative")
        k_mod_z = quotient(k_loop, congruence_from_subloop(k_loop, [K.index(z) for z in Z]))
        n_mod_z = quotient(n_loop, congruence_from_subloop(n_loop, [N.index(z) for z in Z]))
        assert is_isomorphic(q_n, k_mod_z) is not None
        assert is_isomorphic(q_k, n_mod_z) is not None


def test_nk_char_on_examples():
    z3 = loop_of("cyclic(3)")
    assert nk_char_holds(z3, [0, 0, 0]) == (True, True)
    assert nk_char_holds(z3, [0, 1, 2]) == (True, True)


def test_pflugfelder_conditions_agree(small_loops):
    rng = random.Random(1)
    for n in range(1, 5):
        for loop in small_loops[n]:
            maps = itertools.product(range(n), repeat=n) if n <= 3 else \
                [tuple(rng.randrange(n) for _ in range(n)) for _ in range(60)]
            for A in maps:
                assert len(set(pflugfelder_holds(loop, A))) == 1


def test_congruences(s3, q5, sd81):
    universal = congruence_from_subloop(s3, range(6))
    assert universal.is_universal()
    ident = congruence_from_subloop(s3, [s3.neutral()])
    assert ident.is_identity() and ident.size == 6
    assert quotient(s3, universal).order == 1
    assert is_isomorphic(quotient(s3, ident), s3) is not None
    loop = form_at(q5, 0)[0].loop
    assert congruence_from_subloop(q5, nucleus(loop).members).is_universal()
    quotient_sd = quotient(sd81, rho_congruence(sd81))
    assert law_holds(quotient_sd, "symmetric") and law_holds(quotient_sd, "distributive")


def test_non_normal_subgroup_is_rejected(s3):
    e = s3.neutral()
    t = next(x for x in range(6) if x != e and s3.mul(x, x) == e)
    with pytest.raises(NotNormal):
        congruence_from_subloop(s3, [e, t])


def test_quotient_rejects_non_congruence(s3):
    bad = Congruence.from_labels([0, 0, 1, 1, 2, 2])
    if not is_congruence(s3, bad):
        with pytest.raises(NotCongruence):
            quotient(s3, bad)
    labels = [0, 1, 2, 0, 1, 2]
    assert is_congruence(s3, principal_congruence(s3, [(0, 3)]))
    assert Congruence.from_labels(labels).size == 3


def test_principal_congruences_are_congruences(f_quasigroups):
    tables, _ = f_quasigroups
    for q in tables[4][:40]:
        for y in range(1, 4):
            assert is_congruence(q, principal_congruence(q, [(0, y)]))


def test_regular_pairs_spec_examples(q5, s3):
    for g in (builtin("cyclic(3)"), s3):
        pairs = regular_pairs(g, "A")
        assert len(pairs) == g.order
        assert {pr.p for pr in pairs} == {g.translation(a, "left") for a in range(g.order)}
        assert all(pr.p == pr.q for pr in pairs)
    assert len(regular_pairs(q5, "A")) == 5
    form, _ = form_at(q5, 0)
    loop = form.loop
    f, g = form.f, form.g
    ginv = g.inverse()
    expected = set()
    for r in range(5):
        p = Permutation([loop.add(x, r) for x in range(5)])
        qq = Permutation([loop.add(ginv(f(r)), x) for x in range(5)])
        expected.add((p, qq))
    assert {(pr.p, pr.q) for pr in regular_pairs(q5, "C")} == expected


def test_regular_pairs_satisfy_their_identities(small_corpus):
    for q in small_corpus.values():
        n = q.order
        for fam in "ABC":
            for pr in regular_pairs(q, fam):
                for x, y in itertools.product(range(n), repeat=2):
                    if fam == "A":
                        assert pr.p(q.mul(x, y)) == q.mul(pr.q(x), y)
                    elif fam == "B":
                        assert pr.p(q.mul(x, y)) == q.mul(x, pr.q(y))
                    else:
                        assert q.mul(pr.p(x), y) == q.mul(x, pr.q(y))


def test_rho(s3, q5, sd81):
    assert rho_congruence(s3).is_universal()
    assert rho_congruence(q5).is_universal()
    loop = form_at(sd81, 0)[0].loop
    rho = rho_congruence(sd81)
    assert rho.size == 81 // len(nucleus(loop).members) == 27
    with pytest.raises(NotF):
        rho_congruence(builtin("chein(s3)"))


def test_rho_blocks_are_isotopic_to_isomorphic_groups(small_corpus):
    for q in small_corpus.values():
        groups = []
        for block in rho_congruence(q).blocks:
            sub = subtable(q, block)
            loop = form_at(sub, 0)[0].loop
            assert law_holds(loop, "associative")
            groups.append(loop)
        assert all(is_isomorphic(groups[0], g) is not None for g in groups[1:])


def test_m_set_matches_form_loop_moufang_center(small_corpus, sd81):
    for q in list(small_corpus.values()) + [sd81]:
        loop = form_at(q, 0)[0].loop
        assert m_set(q).members == moufang_center(loop).members
        assert set(q.alpha_map) | set(q.beta_map) <= set(m_set(q).members)


def test_quotient_by_m_is_nucleus_mod_center(small_corpus):
    # Q/M compared with N/Z of the strong form loop
    for q in small_corpus.values():
        loop = form_at(q, 0)[0].loop
        M = m_set(q).members
        q_m = quotient(q, congruence_from_subloop(loop, M))
        N = nucleus(loop).members
        Z = center(loop).members
        n_loop = sub_loop(loop, N)
        n_mod_z = quotient(n_loop, congruence_from_subloop(n_loop, [N.index(z) for z in Z]))
        assert is_isomorphic(q_m, n_mod_z) is not None


def test_is_fg(s3, q5, sd81):
    assert is_FG(s3) and is_FG(q5)
    assert not is_FG(sd81)
    with pytest.raises(NotF):
        is_FG(builtin("chein(s3)"))


def test_fg_iff_form_loop_is_group(small_corpus):
    for q in small_corpus.values():
        assert is_FG(q) == law_holds(form_at(q, 0)[0].loop, "associative")


def test_isomorphisms(q5):
    z4 = builtin("cyclic(4)")
    klein = builtin("product(cyclic(2),cyclic(2))")
    assert is_isomorphic(z4, klein) is None
    assert is_isomorphic(builtin("product(cyclic(2),cyclic(3))"), builtin("cyclic(6)")) is not None
    loop = form_at(q5, 0)[0].loop
    w = is_isomorphic(loop.base, builtin("cyclic(5)"))
    assert w is not None and w(4) == 0
    assert is_homomorphism(q5, q5, list(range(5)))


def test_multiplication_group(s3):
    assert len(multiplication_group(builtin("cyclic(3)"))) == 3
    mlt = multiplication_group(s3)
    assert {p(0) for p in mlt} == set(range(6))
    assert len(mlt) == 36
    assert len(multiplication_group(from_table(1, [[0]]))) == 1


def test_simplicity(s3):
    assert is_simple(builtin("cyclic(5)"))
    assert not is_simple(builtin("cyclic(4)"))
    assert not is_simple(s3)
    assert is_simple(builtin("zlin(5,2,3,1)"))


def test_simple_f_quasigroups_are_groups_or_trimedial(f_quasigroups):
    from qf import k_medial
    tables, _ = f_quasigroups
    for qs in tables.values():
        for q in qs:
            if q.order > 1 and is_simple(q):
                assert law_holds(q, "associative") or k_medial(q, 3).holds

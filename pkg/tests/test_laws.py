import itertools

import pytest

import oracles
from qf import (
    EnumSpec, FiniteLoop, LAWS, PUBLIC_LAWS, Permutation, UnknownLaw, builtin, check_law,
    from_table, is_A_loop, is_diassociative, iter_tables, k_medial, law_holds, sweep,
)
from qf.laws import (
    evaluate_law, inner_mappings, is_automorphism, is_pseudoautomorphism,
    verify_k_medial_witness,
)

NAIVE = {
    "f_left": (3, lambda m, x, y, z: m(x, m(y, z)) == m(m(x, y), m(_alpha(m, x), z))),
    "associative": (3, lambda m, x, y, z: m(m(x, y), z) == m(x, m(y, z))),
    "commutative": (2, lambda m, x, y: m(x, y) == m(y, x)),
    "medial": (4, lambda m, x, a, b, y: m(m(x, a), m(b, y)) == m(m(x, b), m(a, y))),
    "idempotent": (1, lambda m, x: m(x, x) == x),
    "symmetric": (2, lambda m, x, y: m(x, y) == m(y, x) and m(x, m(x, y)) == y),
    "moufang1": (3, lambda m, x, y, z: m(x, m(y, m(x, z))) == m(m(m(x, y), x), z)),
}


def _alpha(m, x):
    # the table rows are small; solve x z = x by scanning
    z = 0
    while m(x, z) != x:
        z += 1
    return z


def test_registry_names():
    assert set(PUBLIC_LAWS) == {
        "f_left", "f_right", "moufang1", "moufang2", "moufang3", "moufang4", "medial",
        "distributive", "symmetric", "idempotent", "unipotent", "associative", "commutative"}
    with pytest.raises(UnknownLaw):
        check_law(builtin("cyclic(2)"), "nonsense")


def test_spec_examples(s3, q5, chein_s3, sd81):
    assert check_law(s3, "f_left").holds
    assert check_law(q5, "medial").holds
    assert check_law(chein_s3, "moufang1").holds
    bad = check_law(chein_s3, "associative")
    assert not bad.holds and not evaluate_law(chein_s3, "associative", bad.witness)
    assert check_law(sd81, "symmetric").holds and check_law(sd81, "distributive").holds


def test_witnesses_refail_and_are_lexicographically_first(s3):
    for name in PUBLIC_LAWS:
        report = check_law(s3, name)
        if report.holds:
            assert report.witness is None
            continue
        assert not evaluate_law(s3, name, report.witness)
        arity = len(LAWS[name].variables)
        first = next(v for v in itertools.product(range(6), repeat=arity)
                     if not evaluate_law(s3, name, v))
        assert report.witness == first


def test_vectorised_and_scalar_sweeps_agree(sd81, chein_s3):
    # order 81 runs vectorised; the same first witness must come out of the
    # partitioned run and of a scalar scan
    for name in ("medial", "associative", "idempotent", "unipotent"):
        w1 = sweep(sd81, name)
        w2 = sweep(sd81, name, workers=3)
        assert w1 == w2
    report = check_law(chein_s3, "associative")
    scalar = next(v for v in itertools.product(range(12), repeat=3)
                  if not evaluate_law(chein_s3, "associative", v))
    assert report.witness == scalar


def test_sweeps_match_naive_oracle_on_all_order3_and_order4_squares():
    for n in (3, 4):
        for rows in iter_tables(EnumSpec(n)):
            q = from_table(n, rows)
            for name, (arity, eq) in NAIVE.items():
                assert law_holds(q, name) == oracles.naive_holds(rows, arity, eq), (rows, name)


def test_work_cap(sd81, monkeypatch):
    from qf import SizeCapExceeded
    monkeypatch.setenv("QF_WORK_CAP", "1000")
    with pytest.raises(SizeCapExceeded):
        check_law(sd81, "medial")


def test_moufang_identities_agree_on_small_loops():
    for n in range(1, 7):
        for rows in iter_tables(EnumSpec(n, "reduced")):
            q = from_table(n, rows)
            values = {law_holds(q, f"moufang{i}") for i in range(1, 5)}
            assert len(values) == 1, rows


def test_left_f_properties(f_quasigroups):
    tables, _ = f_quasigroups
    for qs in tables.values():
        for q in qs:
            n = q.order
            al, be = q.alpha_map, q.beta_map
            assert all(al[be[x]] == be[al[x]] for x in range(n))
            for x, y in itertools.product(range(n), repeat=2):
                assert al[q.mul(x, y)] == q.mul(al[x], al[y])
                assert be[q.mul(x, y)] == q.mul(be[x], be[y])
            for a, b in itertools.product(range(n), repeat=2):
                commute = all(q.mul(b, q.mul(x, a)) == q.mul(q.mul(b, x), a) for x in range(n))
                assert commute == (al[b] == be[a])


def test_distributive_equivalences():
    for n in range(1, 6):
        for rows in iter_tables(EnumSpec(n)):
            q = from_table(n, rows)
            idem = law_holds(q, "idempotent")
            dist = law_holds(q, "distributive")
            is_f = law_holds(q, "f_left") and law_holds(q, "f_right")
            assert dist == (idem and is_f)
            if idem and is_f:
                assert k_medial(q, 3, exhaustive=True).holds


def test_k_medial(s3, sd81, q5):
    assert k_medial(q5, 3).holds
    assert k_medial(q5, 3, exhaustive=True).holds
    report = k_medial(s3, 3, exhaustive=True)
    assert not report.holds and verify_k_medial_witness(s3, report)
    fast = k_medial(s3, 2)
    assert not fast.holds and verify_k_medial_witness(s3, fast)
    assert k_medial(s3, 1).holds and k_medial(s3, 1, exhaustive=True).holds
    assert k_medial(sd81, 3).holds and not check_law(sd81, "medial").holds
    with pytest.raises(ValueError):
        k_medial(s3, 4)


def test_k_medial_fast_path_matches_direct_check(f_quasigroups, z2_s3_linear):
    tables, _ = f_quasigroups
    for q in tables[4] + [z2_s3_linear, builtin("product(s3,cyclic(2))")]:
        for k in (1, 2, 3):
            assert k_medial(q, k).holds == k_medial(q, k, exhaustive=True).holds


def test_inner_mappings(s3, cml81):
    z3 = FiniteLoop.of(builtin("cyclic(3)"))
    assert inner_mappings(z3) == {Permutation.identity(3)}
    assert len(inner_mappings(FiniteLoop.of(s3))) == 6
    loop = FiniteLoop.of(cml81)
    assert is_A_loop(loop).holds
    from qf.laws import inner_generators
    assert all(is_automorphism(loop, p) for p, _ in inner_generators(loop))


def test_a_loop_detects_failure():
    found = None
    for rows in iter_tables(EnumSpec(5, "reduced")):
        loop = FiniteLoop(from_table(5, rows), 0)
        report = is_A_loop(loop)
        if not report.holds:
            found = report
            break
    assert found is not None and len(found.witness) == 2


def test_groups_are_a_loops(s3):
    assert is_A_loop(FiniteLoop.of(s3)).holds
    assert is_A_loop(FiniteLoop.of(builtin("product(s3,cyclic(2))"))).holds


def test_pseudoautomorphisms(chein_s3):
    loop = FiniteLoop.of(chein_s3)
    n = loop.order
    ident = Permutation.identity(n)
    assert is_pseudoautomorphism(loop, ident, loop.zero, "left")
    from qf.structure import automorphisms
    autos = automorphisms(loop, limit=6)
    for f in autos:
        assert is_pseudoautomorphism(loop, f, loop.zero)
    for f in autos + [ident]:
        for c in range(n):
            left = is_pseudoautomorphism(loop, f, c, "left")
            assert left == is_pseudoautomorphism(loop, f, loop.neg(c), "right")


def test_diassociativity(s3, chein_s3):
    assert is_diassociative(s3).holds
    assert is_diassociative(chein_s3).holds
    bad = None
    for rows in iter_tables(EnumSpec(5, "reduced")):
        report = is_diassociative(from_table(5, rows))
        if not report.holds:
            bad = report
            break
    assert bad is not None and not bad.holds
    assert len(bad.generators) <= 2

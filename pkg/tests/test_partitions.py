import pytest
from hypothesis import given
from hypothesis import strategies as st

from operp.algebra import Q
from operp.models import MagicMatrix, build_M1_general, build_R, operp
from operp.partitions import (
    BlockCoverageError,
    PartitionSyntaxError,
    RelationSet,
    TwoColouredPartition,
    check_relation,
    check_relations,
    delta,
    first_violation,
    parse_partition,
    preset_SNplus,
    propagation_check,
    relation_residuals,
)


def test_parse_examples():
    s = parse_partition("; w ; (1)")
    assert (s.k, s.l, s.lower_colors, s.blocks) == (0, 1, ("w",), ((1,),))
    f = parse_partition("; w w w w ; (1 2 3 4)")
    assert f.blocks == ((1, 2, 3, 4),)
    assert parse_partition("w ; w ; (1)(2)").blocks == ((1,), (2,))
    assert parse_partition("w w ; w w ; (1 3)(2 4)").k == 2


def test_block_coverage_errors():
    with pytest.raises(BlockCoverageError):
        parse_partition("w ; w ; (1 3)")
    with pytest.raises(BlockCoverageError):
        parse_partition("w ; w ; (1 2)(2)")
    with pytest.raises(BlockCoverageError):
        parse_partition("w ; w ; (1)")


@pytest.mark.parametrize("text, pos", [("w x ; ; (1 2)", 2), ("w ; ; (1", 6), ("w ; ; 1", 6),
                                       ("w ; w", 5), ("; ; ; ", 4)])
def test_syntax_errors_carry_positions(text, pos):
    with pytest.raises(PartitionSyntaxError) as err:
        parse_partition(text)
    assert err.value.position == pos


def test_text_round_trip():
    p = parse_partition("b w ; w ; (1 3)(2)")
    assert parse_partition(str(p)) == p


def test_delta_examples():
    single = parse_partition("; w ; (1)")
    assert all(delta(single, (), (i,)) == 1 for i in range(4))
    pair = parse_partition("; w w ; (1 2)")
    assert [delta(pair, (), (i, j)) for i in range(2) for j in range(2)] == [1, 0, 0, 1]
    four = parse_partition("; w w w w ; (1 2 3 4)")
    assert delta(four, (), (2, 2, 2, 2)) == 1 and delta(four, (), (2, 2, 1, 2)) == 0
    with pytest.raises(ValueError):
        delta(pair, (1,), (1, 1))


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4), st.permutations(range(5)))
def test_delta_invariant_under_relabeling(labels, relabel):
    p = parse_partition("w b ; w w ; (1 3)(2 4)")
    t, tp = labels[:2], labels[2:]
    assert delta(p, t, tp) == delta(p, [relabel[x] for x in t], [relabel[x] for x in tp])


def test_singleton_is_the_row_sum(M1):
    res = relation_residuals(parse_partition("; w ; (1)"), M1)
    assert len(res) == 4 and all(r.is_zero() for r in res)
    broken = M1.with_entry(0, 0, M1.entry(0, 1))
    assert not relation_residuals(parse_partition("; w ; (1)"), broken)[0].is_zero()


def test_preset_on_both_tracks(M1, M2, chain4):
    rel = preset_SNplus(4)
    assert len(rel.partitions) == 6
    for M in (M1, M2, MagicMatrix.identity(4), build_R()):
        assert all(r.holds for r in check_relations(rel, M))
    reps = check_relations(rel, chain4)
    assert all(r.holds and r.status == "factorwise" for r in reps)


def test_preset_on_a_non_magic_matrix():
    bad = build_R().with_entry(0, 0, Q)
    reps = check_relations(preset_SNplus(4), bad)
    assert not all(r.holds for r in reps)
    v = next(r for r in reps if not r.holds).first_violation
    assert {"gamma", "gamma_prime", "residual_terms"} <= set(v)


def test_unitarity_on_the_identity_scalar_matrix():
    # the literal index placement passes the sanity case
    for text in ("w b ; ; (1 2)", "b w ; ; (1 2)", "; w b ; (1 2)", "; b w ; (1 2)"):
        assert check_relation(parse_partition(text), MagicMatrix.identity(3)).holds


def test_colour_convention_immaterial_on_magic_matrices(M1):
    for p in preset_SNplus(4).partitions:
        assert relation_residuals(p, M1, True) == relation_residuals(p, M1, False)


def test_propagation(M1):
    for p in preset_SNplus(4).partitions:
        rep = propagation_check(p, M1, M1)
        assert rep.holds and rep.status == "checked"


def test_propagation_general_factors():
    chain = build_M1_general(4)
    a, b = chain.factors[0], chain.factors[3]
    four = parse_partition("; w w w w ; (1 2 3 4)")
    assert propagation_check(four, a, b).holds
    assert propagation_check(four, operp(a, b), chain.factors[5]).holds


def test_propagation_not_applicable():
    bad = build_R().with_entry(0, 0, Q)
    rep = propagation_check(parse_partition("; w ; (1)"), bad, build_R())
    assert rep.status == "not applicable" and not rep.holds


def test_relation_set_requires_unitarity():
    with pytest.raises(ValueError):
        RelationSet("bad", 4, ["; w ; (1)"])
    assert RelationSet("free", 4, ["; w ; (1)"], easy=False).partitions


def test_report_json(M1):
    rep = check_relation(parse_partition("; w ; (1)"), M1).to_json()
    assert rep == {"partition": "; w ; (1)", "N": 4, "holds": True, "status": "checked"}


def test_scalar_relation_with_no_points():
    empty = TwoColouredPartition((), (), ())
    assert first_violation(empty, MagicMatrix.identity(2)) is None

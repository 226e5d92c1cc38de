import pytest

from hllogic.frames import (
    FIG1_PREC,
    FIG1_SQ,
    FIG1_WORLDS,
    FIX_CHAIN2,
    FIX_IELE,
    FIX_IELE3,
    FIX_PT,
    S4K,
    STO,
    BhlRequired,
    BoundTooLarge,
    FrameCondition,
    FrameError,
    GeneralS4KFrame,
    GeneralStoFrame,
    KindMismatch,
    S4KFrame,
    StoFrame,
    check_condition,
    close_sto,
    cluster_quotient,
    enumerate_frames,
    enumerate_upto,
    is_pmorphism,
    sto_closure,
    validate_general_s4k,
    validate_general_sto,
    validate_s4k,
    validate_sto,
)

import oracles

C = FrameCondition


def _pairs_set(frame, which):
    return set(frame.pairs1() if which == 1 else frame.pairs2())


# -- validation -----------------------------------------------------------------


def test_point_is_valid():
    assert validate_sto(["a"], [("a", "a")], [("a", "a")]) == FIX_PT


def test_figure_data_breaks_coherence():
    with pytest.raises(FrameError) as e:
        validate_sto(FIG1_WORLDS, FIG1_PREC, FIG1_SQ)
    kinds = [k for k, _ in e.value.violations]
    assert set(kinds) == {"CoherenceViolation"}
    assert e.value.violations[0] == ("CoherenceViolation", ("w", "x", "y"))
    # every reported triple is a genuine breach
    prec, sq = set(FIG1_PREC), set(FIG1_SQ)
    for _, (x, y, z) in e.value.violations:
        assert (x, y) in prec and (y, z) in sq and (x, z) not in sq


def test_closure_of_figure_data():
    assert _pairs_set(FIX_IELE, 2) == {
        ("w", "x"), ("w", "y"), ("w", "z"), ("x", "y"),
        ("x", "z"), ("y", "y"), ("y", "z"), ("z", "z"),
    }
    assert validate_sto(FIX_IELE.worlds, FIX_IELE.pairs1(), FIX_IELE.pairs2()) == FIX_IELE


def test_closure_idempotent_and_trivial_cases():
    assert close_sto(FIX_IELE) == FIX_IELE
    empty = sto_closure(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b")], [])
    assert empty.pairs2() == []


def test_closure_requires_a_poset():
    with pytest.raises(FrameError) as e:
        sto_closure(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")], [])
    assert "NotPoset" in e.value.kinds


def test_closure_output_always_validates():
    worlds = ["a", "b", "c"]
    prec = [(w, w) for w in worlds] + [("a", "b"), ("b", "c"), ("a", "c")]
    for sq in oracles.all_relations(worlds[:2]):
        f = sto_closure(worlds, prec, sq)
        assert validate_sto(f.worlds, f.pairs1(), f.pairs2()) == f
        assert close_sto(f) == f
        assert set(sq) <= set(f.pairs2())


def test_bad_inputs():
    with pytest.raises(FrameError) as e:
        validate_sto([], [], [])
    assert "EmptyFrame" in e.value.kinds
    with pytest.raises(FrameError) as e:
        validate_sto(["a"], [("a", "b")], [])
    assert "UnknownWorld" in e.value.kinds
    with pytest.raises(FrameError) as e:
        validate_s4k(["a", "b"], [("a", "a")], [])
    assert "NotPreorder" in e.value.kinds


def test_general_frame_validation():
    validate_general_sto(FIX_CHAIN2, [0, 0b10, 0b11])
    with pytest.raises(FrameError) as e:
        validate_general_sto(FIX_CHAIN2, [0, 0b01, 0b11])
    assert "NotUpset" in e.value.kinds
    with pytest.raises(FrameError) as e:
        validate_general_sto(FIX_CHAIN2, [0b10, 0b11])
    assert "MissingEmpty" in e.value.kinds
    s4 = FIX_CHAIN2.as_s4k()
    validate_general_s4k(s4, range(4))
    with pytest.raises(FrameError) as e:
        validate_general_s4k(s4, [0, 0b10, 0b11])
    assert "NotClosed" in e.value.kinds


# -- conditions -------------------------------------------------------------------


def test_condition_examples():
    assert check_condition(FIX_IELE, C.SubPrec) == (True, None)
    assert check_condition(FIX_IELE, C.IrSucc) == (True, None)
    assert check_condition(FIX_PT, C.PTrans) == (True, None)


def test_condition_witnesses():
    f = StoFrame.from_pairs(["a", "b"], [("a", "a"), ("b", "b")], [("a", "b")])
    assert check_condition(f, C.SubPrec) == (False, ("a", "b"))
    assert check_condition(f, C.IrSucc) == (False, ("a",))
    g = StoFrame.from_pairs(["a", "b", "c"], [(w, w) for w in "abc"], [("a", "b"), ("b", "c")])
    ok, wit = check_condition(g, C.PTrans)
    assert not ok and wit == ("a", "b", "c")


def test_condition_kind_mismatch():
    with pytest.raises(KindMismatch):
        check_condition(FIX_PT, C.Bhl)
    with pytest.raises(KindMismatch):
        check_condition(FIX_PT.as_s4k(), C.SubPrec)


def test_user_predicate_escape_hatch():
    assert check_condition(FIX_PT, lambda f: f.n == 1) == (True, None)
    assert check_condition(FIX_PT, lambda f: (False, "nope")) == (False, "nope")


def test_semitrans_and_strength():
    f = S4KFrame.from_pairs(["a", "b"], [("a", "a"), ("b", "b")], [("a", "b"), ("b", "a")])
    ok, wit = check_condition(f, C.SemiTrans)
    assert not ok and wit == ("a", "a")
    assert check_condition(f, C.Strength) == (False, ("a", "b"))


# -- enumeration ----------------------------------------------------------------


def test_enumeration_small_counts():
    assert len(list(enumerate_frames(1, STO))) == 2
    assert len(list(enumerate_frames(1, S4K, [C.Bhl]))) == 2


@pytest.mark.parametrize("n", [1, 2])
def test_sto_enumeration_matches_oracle_exactly(n):
    ours = {(f.worlds, frozenset(f.pairs1()), frozenset(f.pairs2())) for f in enumerate_frames(n, STO)}
    ref = {(tuple(w), p, s) for w, p, s in oracles.sto_frames(n)}
    assert ours == ref
    assert len(list(enumerate_frames(n, STO))) == len(ref)


def test_s4k_enumeration_matches_oracle_at_two():
    worlds = ["w0", "w1"]
    ref = set()
    for ri in oracles.all_relations(worlds):
        if not oracles.is_preorder(worlds, ri):
            continue
        for rm in oracles.all_relations(worlds):
            bhl = all((x, z) in rm for (x, y) in ri for (y2, z) in rm if y == y2)
            if bhl:
                ref.add((ri, rm))
    ours = {(frozenset(f.pairs1()), frozenset(f.pairs2())) for f in enumerate_frames(2, S4K, [C.Bhl])}
    assert ours == ref


def test_enumeration_sizes_up_to_three():
    assert [sum(1 for _ in enumerate_frames(n, STO)) for n in (1, 2, 3)] == [2, 34, 2942]
    assert sum(1 for _ in enumerate_upto(3, S4K)) == 14914


def test_enumeration_is_deterministic_and_filtered():
    a = list(enumerate_frames(2, S4K, [C.PartialOrder, C.Bhl]))
    assert a == list(enumerate_frames(2, S4K, [C.PartialOrder, C.Bhl]))
    assert all(f.is_partial_order and f.is_bhl for f in a)


def test_dedup_keeps_one_per_iso_class():
    frames = list(enumerate_frames(2, STO, dedup=True))
    codes = [f.canonical_encoding() for f in frames]
    assert len(codes) == len(set(codes))
    assert set(codes) == {f.canonical_encoding() for f in enumerate_frames(2, STO)}


def test_cap_raises(monkeypatch):
    monkeypatch.setenv("HL_MAX_CANDIDATES", "10")
    with pytest.raises(BoundTooLarge):
        list(enumerate_frames(3, STO))


def test_filters_checked_against_kind():
    with pytest.raises(KindMismatch):
        list(enumerate_frames(1, STO, [C.Bhl]))


# -- quotients -----------------------------------------------------------------------


def test_two_cluster_collapses_to_reflexive_point():
    f = S4KFrame.from_pairs(["a", "b"], [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")], [("a", "a"), ("b", "a")])
    q, m = cluster_quotient(f)
    assert q.n == 1
    assert q.pairs1() == [(q.worlds[0], q.worlds[0])]
    assert q.pairs2() == [(q.worlds[0], q.worlds[0])]
    assert set(m.values()) == {q.worlds[0]}


def test_antisymmetric_input_keeps_its_shape():
    f = FIX_CHAIN2.as_s4k()
    q, m = cluster_quotient(f)
    assert q == f
    assert m == {"a": "a", "b": "b"}


def test_quotient_needs_bhl():
    f = S4KFrame.from_pairs(["a", "b"], [("a", "a"), ("a", "b"), ("b", "b")], [("b", "b")])
    with pytest.raises(BhlRequired):
        cluster_quotient(f)


def test_quotients_are_pmorphisms_up_to_three():
    checked = 0
    for f in enumerate_upto(3, S4K, [C.Bhl]):
        q, m = cluster_quotient(f)
        ok, wit = is_pmorphism(f, q, m)
        assert ok, (f, wit)
        checked += 1
    assert checked > 1000


def test_pmorphism_check_reports_failure():
    src = S4KFrame.from_pairs(["a", "b"], [("a", "a"), ("b", "b")], [])
    dst = FIX_PT.as_s4k()
    ok, _ = is_pmorphism(src, dst, {"a": "a", "b": "a"})
    assert not ok  # the image has an R_m step with no preimage
    ok, _ = is_pmorphism(FIX_CHAIN2.as_s4k(), dst, {"a": "a", "b": "a"})
    assert ok


def test_every_sto_frame_is_bhl_as_s4k():
    for f in enumerate_upto(3, STO):
        assert f.as_s4k().is_bhl


# -- general frames ---------------------------------------------------------------------


def test_full_general_frames_are_refined():
    for f in enumerate_upto(3, STO):
        assert GeneralStoFrame.full(f).descriptive


def test_coarse_admissible_family_is_not_refined():
    g = GeneralStoFrame(FIX_CHAIN2, (0, 0b11))
    assert g.prec_refinement_failures == [("b", "a")]
    assert not g.descriptive


def test_full_bimodal_frames_are_differentiated_and_tight():
    g = GeneralS4KFrame.full(FIX_IELE.as_s4k())
    assert g.differentiated and g.tight


def test_iele3_fixture_is_a_frame():
    assert validate_sto(FIX_IELE3.worlds, FIX_IELE3.pairs1(), FIX_IELE3.pairs2()) == FIX_IELE3

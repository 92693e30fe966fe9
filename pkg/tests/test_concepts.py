import pytest
from hypothesis import given
from hypothesis import strategies as st

from colexgraph import concepts
from colexgraph.errors import EmptyResult, UnknownSetName
from colexgraph.ingest import RatingRecord


@pytest.mark.parametrize("name, size", [("nuclear", 40), ("non-nuclear", 60), ("emotion", 23), ("random", 60)])
def test_builtin_cardinalities(name, size):
    assert len(concepts.builtin_set(name)) == size


def test_builtin_members():
    nuclear = concepts.builtin_set("nuclear")
    for c in ("blood", "bone", "water", "tongue", "eye", "tree", "knee"):
        assert c in nuclear
    emotion = concepts.builtin_set("emotion")
    for c in ("grief", "regret", "shame", "fear"):
        assert c in emotion


def test_builtin_sets_disjoint():
    sets = [concepts.builtin_set(n) for n in concepts.BUILTIN_SETS]
    assert concepts.assert_mutually_exclusive(sets) == []


def test_unknown_set():
    with pytest.raises(UnknownSetName):
        concepts.builtin_set("concrete")


def test_membership_is_normalized():
    s = concepts.ConceptSet("x", (" Tree ", "tree", "WOOD"))
    assert s.members == ("tree", "wood")
    assert "Tree" in s and " wood" in s


def test_overlap_report():
    a = concepts.ConceptSet("a", ("a", "b"))
    b = concepts.ConceptSet("b", ("b", "c"))
    assert concepts.assert_mutually_exclusive([a, b]) == [("a", "b", "b")]
    assert len(concepts.assert_mutually_exclusive([a, a])) == 2


def R(lemma, c=None, v=None, a=None, d=None):
    return RatingRecord(lemma, c, v, a, d)


def test_concreteness_thresholds_strict():
    ratings = [R("x", 2.9), R("y", 4.0), R("z", 4.5), R("w", 3.0), R("n")]
    assert concepts.filter_by_concreteness(ratings, "abstract").members == ("x",)
    assert concepts.filter_by_concreteness(ratings, "concrete").members == ("z",)


def test_concreteness_empty():
    with pytest.raises(EmptyResult):
        concepts.filter_by_concreteness([R("y", 4.0)], "concrete")


def test_affect_filter_per_rating():
    base = concepts.ConceptSet("concrete", ("p", "q", "r", "s"))
    ratings = [R("p", 4.5, 2.0, 7.1, 3.3), R("q", 4.5, 5.0, 7.1, 3.3),
               R("r", 4.5, 3.9, 6.1, 6.5), R("s", 4.5, 2.0, None, 3.0)]
    out = concepts.filter_by_affect(base, ratings)
    assert out.name == "aff.concrete"
    assert out.members == ("p", "r")


def test_affect_filter_same_side():
    base = concepts.ConceptSet("abstract", ("p", "r", "t"))
    ratings = [R("p", 1, 2.0, 7.1, 3.3), R("r", 1, 3.9, 6.1, 6.5), R("t", 1, 7, 8, 9)]
    assert concepts.filter_by_affect(base, ratings, rule="same-side").members == ("t",)


def test_affect_band_is_closed():
    base = concepts.ConceptSet("abstract", ("p",))
    with pytest.raises(EmptyResult):
        concepts.filter_by_affect(base, [R("p", 1, 4.0, 2, 2)])


rating = st.one_of(st.none(), st.floats(1, 5))
vad = st.one_of(st.none(), st.floats(1, 9))


@given(st.lists(st.tuples(rating, vad, vad, vad), min_size=1, max_size=40))
def test_rated_set_invariants(rows):
    ratings = [R(f"l{i}", *row) for i, row in enumerate(rows)]
    sets, skipped = concepts.rated_sets(ratings)
    assert set(sets) | set(skipped) == set(concepts.RATED_SETS)
    if "abstract" in sets and "concrete" in sets:
        assert not set(sets["abstract"]) & set(sets["concrete"])
    for mode in ("abstract", "concrete"):
        if f"aff.{mode}" in sets:
            assert set(sets[f"aff.{mode}"]) <= set(sets[mode])

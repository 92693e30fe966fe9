import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colexgraph import phon
from colexgraph.concepts import ConceptSet, builtin_set
from colexgraph.errors import EmptyTranscription, InsufficientOverlap
from colexgraph.ingest import WordlistEntry


def dp_levenshtein(a, b):
    """Oracle: full-table dynamic programming."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[-1][-1]


def test_ldn_examples():
    assert phon.ldn("vasa", "vasa") == 0.0
    assert phon.ldn("a", "b") == 1.0
    assert phon.ldn("abc", "abd") == 1 / 3
    assert phon.levenshtein("kitten", "sitting") == 3


def test_ldn_empty():
    with pytest.raises(EmptyTranscription):
        phon.ldn("", "a")
    with pytest.raises(EmptyTranscription):
        phon.ldn_matrix(["a", ""])


words = st.text(alphabet="pbtdkgaeiou", min_size=1, max_size=12)


@settings(max_examples=300)
@given(words, words)
def test_ldn_matches_oracle(a, b):
    assert phon.levenshtein(a, b) == dp_levenshtein(a, b)
    assert phon.ldn(a, b) == phon.ldn(b, a)
    assert (phon.ldn(a, b) == 0) == (a == b)


def test_ldn_matrix_matches_scalar():
    rng = random.Random(3)
    left = ["".join(rng.choices("abcde", k=rng.randint(1, 8))) for _ in range(15)]
    right = ["".join(rng.choices("abcde", k=rng.randint(1, 8))) for _ in range(7)]
    m = phon.ldn_matrix(left, right)
    assert m.shape == (15, 7)
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            assert m[i, j] == dp_levenshtein(a, b) / max(len(a), len(b))
    sq = phon.ldn_matrix(left)
    assert np.array_equal(sq, sq.T)


def W(lang, concept, form):
    return WordlistEntry(lang, concept, form)


SMALL = phon.PhonDistanceSpec(ConceptSet("s", ("water", "fire", "stone")), min_shared_concepts=2)


def test_hand_computed_mean():
    entries = [W("a", "water", "vasa"), W("b", "water", "vasa"),
               W("a", "fire", "abcd"), W("b", "fire", "abxy")]
    assert phon.phonological_distance(entries, "a", "b", SMALL) == 0.25


def test_synonyms_take_minimum():
    entries = [W("a", "water", "vasa"), W("b", "water", "xxxx"), W("b", "water", "vasa"),
               W("a", "fire", "abcd"), W("b", "fire", "abxy")]
    assert phon.phonological_distance(entries, "a", "b", SMALL) == 0.25


def test_identical_and_disjoint():
    nuclear = list(builtin_set("nuclear"))
    a = [W("a", c, f"ka{i}") for i, c in enumerate(nuclear)]
    same = [W("b", c, f"ka{i}") for i, c in enumerate(nuclear)]
    other = [W("c", c, "zzzz") for c in nuclear]
    assert phon.phonological_distance(a + same, "a", "b") == 0.0
    assert phon.phonological_distance(a + other, "a", "c") == 1.0


def test_insufficient_overlap():
    entries = [W("a", "water", "vasa"), W("b", "water", "vasa"), W("b", "fire", "x")]
    with pytest.raises(InsufficientOverlap):
        phon.phonological_distance(entries, "a", "b", SMALL)
    with pytest.raises(InsufficientOverlap):
        phon.phonological_distance(entries, "a", "zzz", SMALL)


def test_table_drops_low_overlap_pairs():
    entries = [W("a", "water", "vasa"), W("a", "fire", "fa"),
               W("b", "water", "wata"), W("b", "fire", "fi"),
               W("c", "stone", "sto")]
    t = phon.phonological_distance_table(entries, SMALL)
    assert t.pairs() == [("a", "b")]
    assert len(phon.phonological_distance_table([], SMALL)) == 0


def test_spec_validation():
    with pytest.raises(ValueError):
        phon.PhonDistanceSpec(ConceptSet("s", ("a",)), min_shared_concepts=2)
    assert phon.PhonDistanceSpec().min_shared_concepts == 20


def _random_lists(rng, langs, concepts):
    out = []
    for lang in langs:
        for c in concepts:
            if rng.random() < 0.8:
                for _ in range(rng.choice((1, 1, 2))):
                    out.append(W(lang, c, "".join(rng.choices("ptkaiu", k=rng.randint(1, 6)))))
    return out


@pytest.mark.parametrize("seed", range(5))
def test_table_matches_pairwise_and_threads(seed):
    rng = random.Random(seed)
    spec = phon.PhonDistanceSpec(ConceptSet("s", [f"c{i}" for i in range(10)]), 5)
    entries = _random_lists(rng, [f"L{i}" for i in range(8)], spec.concept_set)
    t1 = phon.phonological_distance_table(entries, spec)
    t4 = phon.phonological_distance_table(entries, spec, threads=4)
    assert t1 == t4
    for (a, b), v in t1.items():
        assert v == phon.phonological_distance(entries, a, b, spec)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), words)
def test_extra_synonym_never_increases(seed, extra):
    rng = random.Random(seed)
    spec = phon.PhonDistanceSpec(ConceptSet("s", ["c0", "c1", "c2", "c3"]), 1)
    entries = _random_lists(rng, ["A", "B"], spec.concept_set)
    try:
        before = phon.phonological_distance(entries, "A", "B", spec)
    except InsufficientOverlap:
        return
    concept = rng.choice([e.concept for e in entries if e.language == "A"])
    after = phon.phonological_distance(entries + [W("A", concept, extra)], "A", "B", spec)
    assert after <= before + 1e-15

"""Concept sets: the four bundled lists plus rating-derived selections."""

from dataclasses import dataclass
from importlib import resources
from itertools import combinations

from .errors import EmptyResult, UnknownSetName
from .ingest import normalize_concept

BUILTIN_SETS = ("nuclear", "non-nuclear", "emotion", "random")
RATED_SETS = ("concrete", "abstract", "aff.concrete", "aff.abstract")
ALL_SETS = BUILTIN_SETS + RATED_SETS

ABSTRACT_BELOW = 3.0
CONCRETE_ABOVE = 4.0
AFFECT_BAND = (4.0, 6.0)


@dataclass(frozen=True)
class ConceptSet:
    name: str
    members: tuple

    def __post_init__(self):
        members = tuple(dict.fromkeys(normalize_concept(m) for m in self.members))
        if not members or "" in members:
            raise EmptyResult(f"concept set {self.name!r} is empty")
        object.__setattr__(self, "members", members)

    def __contains__(self, concept):
        return normalize_concept(concept) in self._lookup

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def _lookup(self):
        # frozen dataclass, so cache on first use via __dict__
        cached = self.__dict__.get("_set")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_set", cached)
        return cached


def builtin_set(name):
    """Load one of ``nuclear``, ``non-nuclear``, ``emotion``, ``random``."""
    if name not in BUILTIN_SETS:
        raise UnknownSetName(
            f"unknown concept set {name!r}; expected one of {', '.join(BUILTIN_SETS)}"
        )
    text = resources.files("colexgraph.data.concepts").joinpath(f"{name}.txt").read_text(
        encoding="utf-8"
    )
    return ConceptSet(name, tuple(line for line in text.splitlines() if line.strip()))


def filter_by_concreteness(ratings, mode):
    """Lemmas rated strictly below 3 (``abstract``) or strictly above 4 (``concrete``)."""
    if mode == "abstract":
        keep = lambda v: v < ABSTRACT_BELOW
    elif mode == "concrete":
        keep = lambda v: v > CONCRETE_ABOVE
    else:
        raise ValueError(f"mode must be 'abstract' or 'concrete', not {mode!r}")
    members = [
        r.lemma for r in ratings if r.concreteness is not None and keep(r.concreteness)
    ]
    if not members:
        raise EmptyResult(f"no lemma passes the {mode} concreteness threshold")
    return ConceptSet(mode, tuple(members))


def _out_of_band(value, band):
    lo, hi = band
    return value < lo or value > hi


def filter_by_affect(base, ratings, rule="per-rating", band=AFFECT_BAND):
    """Keep members of ``base`` whose valence, arousal and dominance are all
    outside the closed ``band``.

    With ``rule="per-rating"`` each rating may fall on either side. With
    ``rule="same-side"`` all three must lie below the band, or all above it.
    Members lacking any of the three ratings are dropped.
    """
    if rule not in ("per-rating", "same-side"):
        raise ValueError(f"unknown affect rule {rule!r}")
    lo, hi = band
    by_lemma = {r.lemma: r for r in ratings}
    members = []
    for concept in base:
        r = by_lemma.get(concept)
        if r is None:
            continue
        vad = (r.valence, r.arousal, r.dominance)
        if any(v is None for v in vad):
            continue
        if rule == "per-rating":
            ok = all(_out_of_band(v, band) for v in vad)
        else:
            ok = all(v < lo for v in vad) or all(v > hi for v in vad)
        if ok:
            members.append(concept)
    if not members:
        raise EmptyResult(f"no member of {base.name!r} is affectively loaded")
    return ConceptSet(f"aff.{base.name}", tuple(members))


def assert_mutually_exclusive(sets):
    """Return ``(set_a, set_b, concept)`` for every concept shared by two sets.

    An empty list means the sets are pairwise disjoint.
    """
    sets = list(sets)
    if len(sets) < 2:
        raise ValueError("need at least two concept sets")
    overlaps = []
    for a, b in combinations(sets, 2):
        for concept in a.members:
            if concept in b:
                overlaps.append((a.name, b.name, concept))
    return overlaps


def rated_sets(ratings, affect_rule="per-rating"):
    """Build the four rating-derived sets; sets that come out empty are skipped.

    Returns ``(sets, skipped)`` where ``skipped`` maps set name to reason.
    """
    sets, skipped = {}, {}
    for mode in ("concrete", "abstract"):
        try:
            sets[mode] = filter_by_concreteness(ratings, mode)
        except EmptyResult as exc:
            skipped[mode] = str(exc)
            skipped[f"aff.{mode}"] = f"base set {mode!r} is empty"
            continue
        try:
            sets[f"aff.{mode}"] = filter_by_affect(sets[mode], ratings, rule=affect_rule)
        except EmptyResult as exc:
            skipped[f"aff.{mode}"] = str(exc)
    return sets, skipped

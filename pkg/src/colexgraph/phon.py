"""Phonological distances from sound-class word lists.

The per-word measure is the normalized Levenshtein distance (LDN): edit
distance over sound-class symbols divided by the longer length. Two
languages are compared over the concepts both attest; for each concept the
closest pair of synonyms counts, and the language distance is the mean over
shared concepts.
"""

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .concepts import ConceptSet, builtin_set
from .errors import EmptyTranscription, InsufficientOverlap
from .pairtable import PairValueTable


@numba.njit(cache=True, nogil=True)
def _levenshtein(codes, sa, ea, sb, eb, row):
    la = ea - sa
    lb = eb - sb
    for j in range(lb + 1):
        row[j] = j
    for i in range(1, la + 1):
        prev = row[0]
        row[0] = i
        ca = codes[sa + i - 1]
        for j in range(1, lb + 1):
            cur = row[j]
            cost = 0 if ca == codes[sb + j - 1] else 1
            best = prev + cost
            if row[j] + 1 < best:
                best = row[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            row[j] = best
            prev = cur
    return row[lb]


@numba.njit(cache=True, nogil=True)
def _ldn_block(codes, offsets, left, right, out):
    # out[r, c] = ldn(word left[r], word right[c])
    width = 1
    for k in range(offsets.size - 1):
        if offsets[k + 1] - offsets[k] + 1 > width:
            width = offsets[k + 1] - offsets[k] + 1
    row = np.empty(width, dtype=np.int64)
    for r in range(left.size):
        a = left[r]
        sa, ea = offsets[a], offsets[a + 1]
        for c in range(right.size):
            b = right[c]
            sb, eb = offsets[b], offsets[b + 1]
            n = max(ea - sa, eb - sb)
            out[r, c] = _levenshtein(codes, sa, ea, sb, eb, row) / n


def _encode(words):
    symbols = {}
    codes, offsets = [], [0]
    for w in words:
        for ch in w:
            codes.append(symbols.setdefault(ch, len(symbols)))
        offsets.append(len(codes))
    return np.asarray(codes, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def levenshtein(a, b):
    """Plain edit distance (unit costs) between two symbol strings."""
    codes, offsets = _encode([a, b])
    row = np.empty(max(len(a), len(b)) + 1, dtype=np.int64)
    return int(_levenshtein(codes, offsets[0], offsets[1], offsets[1], offsets[2], row))


def ldn(a, b):
    """Normalized Levenshtein distance in [0, 1]."""
    if not a or not b:
        raise EmptyTranscription("transcriptions must be non-empty")
    return levenshtein(a, b) / max(len(a), len(b))


def ldn_matrix(left, right=None):
    """All-pairs LDN between two word lists (``right`` defaults to ``left``)."""
    same = right is None
    words = list(left) if same else list(left) + list(right)
    if any(not w for w in words):
        raise EmptyTranscription("transcriptions must be non-empty")
    codes, offsets = _encode(words)
    li = np.arange(len(left), dtype=np.int64)
    ri = li if same else np.arange(len(left), len(words), dtype=np.int64)
    out = np.empty((li.size, ri.size), dtype=np.float64)
    if li.size and ri.size:
        _ldn_block(codes, offsets, li, ri, out)
    return out


@dataclass(frozen=True)
class PhonDistanceSpec:
    concept_set: ConceptSet = field(default_factory=lambda: builtin_set("nuclear"))
    min_shared_concepts: int = 20

    def __post_init__(self):
        if not 1 <= self.min_shared_concepts <= len(self.concept_set):
            raise ValueError(
                f"min_shared_concepts must be in [1, {len(self.concept_set)}], "
                f"got {self.min_shared_concepts}"
            )


def _forms_by_language(wordlists, concepts):
    forms = defaultdict(lambda: defaultdict(list))
    for e in wordlists:
        if e.concept in concepts:
            forms[e.language][e.concept].append(e.transcription)
    return forms


def phonological_distance(wordlists, lang_a, lang_b, spec=None):
    """Mean over shared concepts of the minimum LDN across synonym pairs."""
    spec = spec or PhonDistanceSpec()
    forms = _forms_by_language(wordlists, spec.concept_set)
    for lang in (lang_a, lang_b):
        if lang not in forms:
            raise InsufficientOverlap(f"no word list entries for {lang!r} in {spec.concept_set.name!r}")
    fa, fb = forms[lang_a], forms[lang_b]
    shared = [c for c in spec.concept_set if c in fa and c in fb]
    if len(shared) < spec.min_shared_concepts:
        raise InsufficientOverlap(
            f"{lang_a!r} and {lang_b!r} share {len(shared)} concepts, "
            f"need {spec.min_shared_concepts}"
        )
    minima = [min(ldn(x, y) for x in fa[c] for y in fb[c]) for c in shared]
    # sequential sum, same order as the table accumulation
    return sum(minima) / len(minima)


def phonological_distance_table(wordlists, spec=None, threads=1):
    """Pairwise phonological distances; pairs below the overlap threshold are omitted.

    Per concept, all forms are compared at once, reduced to per-language
    minima, and accumulated into sum/count matrices.
    """
    spec = spec or PhonDistanceSpec()
    forms = _forms_by_language(wordlists, spec.concept_set)
    ids = sorted(forms)
    n = len(ids)
    if n < 2:
        return PairValueTable(ids, [], [], [], (0.0, 1.0))
    pos = {lang: i for i, lang in enumerate(ids)}

    def per_concept(concept):
        langs = [lang for lang in ids if concept in forms[lang]]
        words, owner = [], []
        for lang in langs:
            for w in forms[lang][concept]:
                words.append(w)
                owner.append(pos[lang])
        if len(langs) < 2:
            return None
        d = ldn_matrix(words)
        starts = np.flatnonzero(np.r_[True, np.diff(owner) != 0])
        d = np.minimum.reduceat(np.minimum.reduceat(d, starts, axis=0), starts, axis=1)
        return np.asarray([pos[lang] for lang in langs]), d

    concepts = list(spec.concept_set)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(per_concept, concepts))
    else:
        results = [per_concept(c) for c in concepts]

    total = np.zeros((n, n))
    count = np.zeros((n, n), dtype=np.int64)
    # fixed concept order keeps the float sums reproducible
    for res in results:
        if res is None:
            continue
        idx, d = res
        total[np.ix_(idx, idx)] += d
        count[np.ix_(idx, idx)] += 1
    ia, ib = np.triu_indices(n, 1)
    ok = count[ia, ib] >= spec.min_shared_concepts
    ia, ib = ia[ok], ib[ok]
    vals = total[ia, ib] / count[ia, ib]
    return PairValueTable(ids, ia, ib, vals, (0.0, 1.0), _checked=True)

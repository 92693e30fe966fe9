"""Colexification matrices and cosine-based semantic distances."""

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import EmptyPatternList, UnknownLanguageId, ZeroVector
from .pairtable import PairValueTable

DEFAULT_MIN_LANGUAGES = {"any": 1, "both": 3}


def select_patterns(colex_table, concept_set, mode="any", min_languages=None):
    """Pick the concept pairs relevant to ``concept_set``.

    ``mode="any"`` keeps a pattern if either concept is in the set,
    ``mode="both"`` requires both. Patterns attested (frequency > 0) in fewer
    than ``min_languages`` languages are dropped. Returns sorted pairs.
    """
    if mode not in DEFAULT_MIN_LANGUAGES:
        raise ValueError(f"mode must be 'any' or 'both', not {mode!r}")
    if min_languages is None:
        min_languages = DEFAULT_MIN_LANGUAGES[mode]
    if min_languages < 1:
        raise ValueError("min_languages must be >= 1")
    if not colex_table:
        raise EmptyPatternList("colexification table is empty")
    match = any if mode == "any" else all
    attested = defaultdict(set)
    for rec in colex_table:
        if rec.frequency > 0:
            attested[rec.pattern].add(rec.language)
    patterns = sorted(
        p
        for p, langs in attested.items()
        if len(langs) >= min_languages and match(c in concept_set for c in p)
    )
    if not patterns:
        raise EmptyPatternList(
            f"no colexification pattern matches concept set "
            f"{getattr(concept_set, 'name', '?')!r} (mode={mode}, min_languages={min_languages})"
        )
    return patterns


@dataclass(frozen=True, eq=False)
class ColexMatrix:
    """Languages x patterns frequency matrix; absent entries are zeros."""

    languages: tuple
    patterns: tuple
    values: sparse.csr_matrix

    def row(self, language):
        try:
            i = self.languages.index(language)
        except ValueError:
            raise UnknownLanguageId(f"language {language!r} not in matrix") from None
        return self.values.getrow(i).toarray().ravel().astype(np.float64)

    def dense(self):
        return self.values.toarray()

    def nonzero_rows(self):
        return np.diff(self.values.indptr) > 0


def build_matrix(colex_table, patterns, languages, strict=True):
    """Assemble the frequency matrix for ``patterns`` over ``languages``.

    Frequencies of repeated (pattern, language) records add up. With
    ``strict`` a record naming a language outside ``languages`` raises
    :class:`UnknownLanguageId`; otherwise such records are ignored.
    """
    languages = tuple(languages)
    patterns = tuple(tuple(p) for p in patterns)
    if not languages:
        raise ValueError("languages must be non-empty")
    row_of = {lang: i for i, lang in enumerate(languages)}
    col_of = {p: j for j, p in enumerate(patterns)}
    rows, cols, vals = [], [], []
    for rec in colex_table:
        j = col_of.get(rec.pattern)
        if j is None:
            continue
        i = row_of.get(rec.language)
        if i is None:
            if strict:
                raise UnknownLanguageId(f"colexification data names unknown language {rec.language!r}")
            continue
        if rec.frequency:
            rows.append(i)
            cols.append(j)
            vals.append(rec.frequency)
    values = sparse.coo_matrix(
        (np.asarray(vals, dtype=np.int64), (rows, cols)),
        shape=(len(languages), len(patterns)),
    ).tocsr()
    values.sum_duplicates()
    values.sort_indices()
    colsum = np.asarray(values.sum(axis=0)).ravel()
    unattested = [patterns[j] for j in np.flatnonzero(colsum == 0)]
    if unattested:
        raise EmptyPatternList(f"patterns without attestation in these languages: {unattested[:5]}")
    return ColexMatrix(languages, patterns, values)


def _cosine_distance(dot, sq_a, sq_b):
    d = 1.0 - dot / np.sqrt(sq_a * sq_b)
    return np.clip(d, 0.0, 1.0)


def semantic_distance(matrix, lang_a, lang_b):
    """Cosine distance between two language rows, in [0, 1]."""
    a, b = matrix.row(lang_a), matrix.row(lang_b)
    sq_a, sq_b = float(a @ a), float(b @ b)
    if sq_a == 0.0 or sq_b == 0.0:
        zero = lang_a if sq_a == 0.0 else lang_b
        raise ZeroVector(f"{zero!r} has no attested pattern; distance undefined")
    # Sparse and dense products agree exactly: integer-valued terms in
    # float64 are summed without rounding below 2**53.
    return float(_cosine_distance(float(a @ b), sq_a, sq_b))


def semantic_distance_table(matrix, threads=1, block=256):
    """Distances for every pair of languages with a nonzero row.

    Row blocks are processed independently, so the result does not depend
    on ``threads``.
    """
    keep = np.flatnonzero(matrix.nonzero_rows())
    order = sorted(keep.tolist(), key=lambda i: matrix.languages[i])
    ids = [matrix.languages[i] for i in order]
    k = len(ids)
    if k < 2:
        return PairValueTable(ids, [], [], [], (0.0, 1.0))
    m = matrix.values[order].astype(np.float64)
    sq = np.asarray(m.multiply(m).sum(axis=1)).ravel()
    mt = m.T.tocsr()

    def work(start):
        stop = min(start + block, k)
        gram = (m[start:stop] @ mt).toarray()
        out = []
        for r in range(stop - start):
            i = start + r
            j = np.arange(i + 1, k)
            out.append((np.full(j.size, i), j, _cosine_distance(gram[r, i + 1:], sq[i], sq[i + 1:])))
        return out

    starts = range(0, k, block)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(work, starts))
    else:
        chunks = [work(s) for s in starts]
    parts = [p for chunk in chunks for p in chunk]
    ia = np.concatenate([p[0] for p in parts])
    ib = np.concatenate([p[1] for p in parts])
    vals = np.concatenate([p[2] for p in parts])
    return PairValueTable(ids, ia, ib, vals, (0.0, 1.0), _checked=True)

"""Readers and writers for the tabular input files.

Every external file enters the system through one of the ``load_*``
functions. Separator is chosen by extension: tab for ``.tsv``, comma for
``.csv``. Missing values are empty cells. Each loader has a matching
``write_*`` that reproduces a file the loader reads back into an equal table.
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricMatrix,
    CoordinateOutOfRange,
    DuplicateId,
    MalformedForms,
    MalformedRow,
    NegativeFrequency,
    RatingOutOfScale,
    SelfColexification,
    ValueOutOfRange,
)
from .pairtable import PairValueTable, canonical_pair

log = logging.getLogger(__name__)

LANGUAGE_COLUMNS = (
    "id",
    "name",
    "family",
    "genus",
    "parent",
    "branch",
    "macroarea",
    "area",
    "latitude",
    "longitude",
    "classification",
)
COLEX_COLUMNS = ("concept_a", "concept_b", "language", "frequency", "forms")
RATING_COLUMNS = ("lemma", "concreteness", "valence", "arousal", "dominance")
WORDLIST_COLUMNS = ("language", "concept", "transcription")

DEFAULT_SCALES = {
    "concreteness": (1.0, 5.0),
    "valence": (1.0, 9.0),
    "arousal": (1.0, 9.0),
    "dominance": (1.0, 9.0),
}

# ASJP sound classes plus its modifier symbols.
ASJP_ALPHABET = frozenset("pbfvmw8tdszcnrlSZCjT5ykgxNqGX7hL4!ieE3auo*\"~$")


def normalize_concept(concept):
    return concept.strip().casefold()


@dataclass(frozen=True)
class LanguageRecord:
    id: str
    name: str = ""
    family: str = ""
    genus: str = ""
    parent: str = ""
    branch: str = ""
    macroarea: str = ""
    area: str = ""
    latitude: float | None = None
    longitude: float | None = None
    # Optional ancestor path from the root of the classification tree.
    classification: tuple = ()

    @property
    def has_coordinates(self):
        return self.latitude is not None


@dataclass(frozen=True)
class ColexRecord:
    concept_a: str
    concept_b: str
    language: str
    frequency: int
    forms: tuple = ()

    @property
    def pattern(self):
        return (self.concept_a, self.concept_b)


@dataclass(frozen=True)
class RatingRecord:
    lemma: str
    concreteness: float | None = None
    valence: float | None = None
    arousal: float | None = None
    dominance: float | None = None


@dataclass(frozen=True)
class WordlistEntry:
    language: str
    concept: str
    transcription: str


def _delimiter(path):
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return ","
    if suffix == ".tsv":
        return "\t"
    raise MalformedRow(f"unsupported file extension {suffix!r}", path=str(path))


def _read_rows(path, required, short_ok=False):
    """Yield ``(line_number, dict)`` for each data row; validates the header.

    With ``short_ok`` a row may omit trailing optional columns.
    """
    path = Path(path)
    delim = _delimiter(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delim, quoting=csv.QUOTE_NONE)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MalformedRow("empty file, header expected", line=1, path=str(path))
        missing = [c for c in required if c not in header]
        if missing:
            raise MalformedRow(
                f"header lacks required column(s): {', '.join(missing)}",
                line=1,
                path=str(path),
            )
        for row in reader:
            lineno = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if short_ok and len(required) <= len(row) < len(header):
                row = row + [""] * (len(header) - len(row))
            if len(row) != len(header):
                raise MalformedRow(
                    f"expected {len(header)} columns, got {len(row)}",
                    line=lineno,
                    path=str(path),
                )
            yield lineno, dict(zip(header, (c.strip() for c in row)))


def _write_rows(path, header, rows):
    delim = _delimiter(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(delim.join(header) + "\n")
        for row in rows:
            fh.write(delim.join(row) + "\n")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _float_or_none(text, what, lineno, path, exc=MalformedRow):
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise exc(f"{what} is not a number: {text!r}", line=lineno, path=str(path))
    if not math.isfinite(value):
        raise exc(f"{what} is not finite: {text!r}", line=lineno, path=str(path))
    return value


def load_languages(path):
    """Read a language table; returns a tuple of :class:`LanguageRecord`."""
    records = []
    seen = {}
    for lineno, row in _read_rows(path, ("id",)):
        lid = row["id"]
        if not lid:
            raise MalformedRow("empty id", line=lineno, path=str(path))
        if lid in seen:
            raise DuplicateId(
                f"id {lid!r} already defined on line {seen[lid]}",
                line=lineno,
                path=str(path),
            )
        seen[lid] = lineno
        lat = _float_or_none(row.get("latitude", ""), "latitude", lineno, path)
        lon = _float_or_none(row.get("longitude", ""), "longitude", lineno, path)
        if (lat is None) != (lon is None):
            raise CoordinateOutOfRange(
                "latitude and longitude must both be present or both missing",
                line=lineno,
                path=str(path),
            )
        if lat is not None and not (-90.0 <= lat <= 90.0):
            raise CoordinateOutOfRange(
                f"latitude {lat} outside [-90, 90]", line=lineno, path=str(path)
            )
        if lon is not None and not (-180.0 <= lon <= 180.0):
            raise CoordinateOutOfRange(
                f"longitude {lon} outside [-180, 180]", line=lineno, path=str(path)
            )
        path_text = row.get("classification", "")
        classification = tuple(p for p in path_text.split("/") if p) if path_text else ()
        records.append(
            LanguageRecord(
                id=lid,
                name=row.get("name", ""),
                family=row.get("family", ""),
                genus=row.get("genus", ""),
                parent=row.get("parent", ""),
                branch=row.get("branch", ""),
                macroarea=row.get("macroarea", ""),
                area=row.get("area", ""),
                latitude=lat,
                longitude=lon,
                classification=classification,
            )
        )
    return tuple(records)


def write_languages(records, path):
    rows = []
    for r in records:
        rows.append(
            [
                r.id,
                r.name,
                r.family,
                r.genus,
                r.parent,
                r.branch,
                r.macroarea,
                r.area,
                _fmt(r.latitude),
                _fmt(r.longitude),
                "/".join(r.classification),
            ]
        )
    _write_rows(path, LANGUAGE_COLUMNS, rows)


def _parse_forms(text, lineno, path):
    forms = []
    for chunk in text.split(";"):
        if not chunk:
            continue
        form, sep, count = chunk.rpartition(":")
        if not sep or not form:
            raise MalformedForms(
                f"form entry {chunk!r} is not form:count", line=lineno, path=str(path)
            )
        try:
            n = int(count)
        except ValueError:
            raise MalformedForms(
                f"form count {count!r} is not an integer", line=lineno, path=str(path)
            )
        if n <= 0:
            raise MalformedForms(
                f"form count for {form!r} must be positive", line=lineno, path=str(path)
            )
        forms.append((form, n))
    return tuple(forms)


def _merge_forms(a, b):
    if not a or not b:
        return ()
    counts = dict(a)
    for form, n in b:
        counts[form] = counts.get(form, 0) + n
    return tuple(counts.items())


def load_colex(path):
    """Read ``(concept_a, concept_b, language, frequency[, forms])`` rows.

    Concept pairs are normalized and put in lexicographic order. Rows that
    repeat a (pair, language) are summed.
    """
    merged = {}
    for lineno, row in _read_rows(path, COLEX_COLUMNS[:4], short_ok=True):
        a = normalize_concept(row["concept_a"])
        b = normalize_concept(row["concept_b"])
        if not a or not b or not row["language"]:
            raise MalformedRow("empty concept or language", line=lineno, path=str(path))
        if a == b:
            raise SelfColexification(
                f"concept {a!r} colexified with itself", line=lineno, path=str(path)
            )
        try:
            freq = int(row["frequency"])
        except ValueError:
            raise MalformedRow(
                f"frequency {row['frequency']!r} is not an integer",
                line=lineno,
                path=str(path),
            )
        if freq < 0:
            raise NegativeFrequency(
                f"frequency {freq} is negative", line=lineno, path=str(path)
            )
        forms = _parse_forms(row.get("forms", ""), lineno, path)
        if forms and sum(n for _, n in forms) != freq:
            raise MalformedForms(
                f"form counts sum to {sum(n for _, n in forms)}, frequency is {freq}",
                line=lineno,
                path=str(path),
            )
        a, b = canonical_pair(a, b)
        key = (a, b, row["language"])
        if key in merged:
            log.warning(
                "%s:%d: repeated colexification %s/%s in %s; summing frequencies",
                path, lineno, a, b, key[2],
            )
            old = merged[key]
            merged[key] = ColexRecord(
                a, b, key[2], old.frequency + freq, _merge_forms(old.forms, forms)
            )
        else:
            merged[key] = ColexRecord(a, b, key[2], freq, forms)
    return tuple(merged.values())


def write_colex(records, path):
    rows = (
        [
            r.concept_a,
            r.concept_b,
            r.language,
            str(r.frequency),
            ";".join(f"{f}:{n}" for f, n in r.forms),
        ]
        for r in records
    )
    _write_rows(path, COLEX_COLUMNS, rows)


def load_ratings(path, scale_spec=None):
    """Read lemma ratings.

    ``scale_spec`` maps rating column to ``(low, high)``; defaults to 1-5 for
    concreteness and 1-9 for valence/arousal/dominance. All out-of-scale
    cells are collected and reported together.
    """
    scales = dict(DEFAULT_SCALES)
    if scale_spec:
        scales.update(scale_spec)
    records = {}
    problems = []
    for lineno, row in _read_rows(path, ("lemma",)):
        lemma = normalize_concept(row["lemma"])
        if not lemma:
            raise MalformedRow("empty lemma", line=lineno, path=str(path))
        values = {}
        for col in RATING_COLUMNS[1:]:
            v = _float_or_none(row.get(col, ""), col, lineno, path)
            if v is not None:
                lo, hi = scales[col]
                if not lo <= v <= hi:
                    problems.append((lineno, col, v))
                    continue
            values[col] = v
        if lemma in records:
            log.warning("%s:%d: duplicate lemma %r ignored", path, lineno, lemma)
            continue
        records[lemma] = RatingRecord(lemma, **values)
    if problems:
        listing = "; ".join(
            f"line {n}: {col}={v} outside [{scales[col][0]}, {scales[col][1]}]"
            for n, col, v in problems
        )
        raise RatingOutOfScale(
            f"{len(problems)} rating(s) out of scale: {listing}",
            line=problems[0][0],
            path=str(path),
            problems=problems,
        )
    return tuple(records.values())


def write_ratings(records, path):
    rows = (
        [r.lemma, _fmt(r.concreteness), _fmt(r.valence), _fmt(r.arousal), _fmt(r.dominance)]
        for r in records
    )
    _write_rows(path, RATING_COLUMNS, rows)


def load_wordlists(path, alphabet=None):
    """Read ``(language, concept, transcription)`` rows.

    Synonyms are kept as separate entries. If ``alphabet`` is given, every
    transcription symbol must belong to it.
    """
    entries = []
    for lineno, row in _read_rows(path, WORDLIST_COLUMNS):
        form = row["transcription"]
        if not form:
            raise MalformedRow("empty transcription", line=lineno, path=str(path))
        if not row["language"] or not row["concept"]:
            raise MalformedRow("empty language or concept", line=lineno, path=str(path))
        if alphabet is not None:
            bad = sorted(set(form) - set(alphabet))
            if bad:
                raise MalformedRow(
                    f"symbols {''.join(bad)!r} not in the sound-class alphabet",
                    line=lineno,
                    path=str(path),
                )
        entries.append(
            WordlistEntry(row["language"], normalize_concept(row["concept"]), form)
        )
    return tuple(entries)


def write_wordlists(entries, path):
    rows = ([e.language, e.concept, e.transcription] for e in entries)
    _write_rows(path, WORDLIST_COLUMNS, rows)


def load_pair_matrix(path, value_range=None, tol=1e-9):
    """Read a precomputed pair matrix in long or square layout.

    Long layout has header ``id_a, id_b, value``. Anything else is read as
    a square matrix whose first row and column hold the ids.
    """
    path = Path(path)
    delim = _delimiter(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [
            (i, [c.strip() for c in row])
            for i, row in enumerate(csv.reader(fh, delimiter=delim, quoting=csv.QUOTE_NONE), 1)
            if row and any(c.strip() for c in row)
        ]
    if not rows:
        raise MalformedRow("empty file", line=1, path=str(path))
    header = rows[0][1]
    if header == ["id_a", "id_b", "value"]:
        table, lines = _long_matrix(rows[1:], path)
    else:
        table, lines = _square_matrix(rows, path, tol)
    if value_range is not None:
        lo, hi = value_range
        for (a, b), v in table.items():
            if not lo <= v <= hi:
                raise ValueOutOfRange(
                    f"value {v} for ({a}, {b}) outside [{lo}, {hi}]",
                    line=lines[(a, b)],
                    path=str(path),
                )
        table = table.with_values(table.values, value_range)
    return table


def _long_matrix(rows, path):
    merged = {}
    for lineno, row in rows:
        if len(row) != 3:
            raise MalformedRow(
                f"expected 3 columns, got {len(row)}", line=lineno, path=str(path)
            )
        a, b, text = row
        if not a or not b:
            raise MalformedRow("empty id", line=lineno, path=str(path))
        if a == b:
            raise MalformedRow(f"self-pair ({a}, {b})", line=lineno, path=str(path))
        v = _float_or_none(text, "value", lineno, path)
        if v is None:
            continue
        key = canonical_pair(a, b)
        if key in merged and merged[key][0] != v:
            raise AsymmetricMatrix(
                f"pair {key} given as {merged[key][0]} on line {merged[key][1]} and {v}",
                line=lineno,
                path=str(path),
            )
        merged[key] = (v, lineno)
    table = PairValueTable.from_pairs({k: v for k, (v, _) in merged.items()})
    return table, {k: n for k, (_, n) in merged.items()}


def _square_matrix(rows, path, tol):
    _, header = rows[0]
    ids = header[1:]
    n = len(ids)
    if len(set(ids)) != n or any(not x for x in ids):
        raise MalformedRow("square matrix header has empty or repeated ids", line=1, path=str(path))
    if len(rows) - 1 != n:
        raise MalformedRow(
            f"square matrix has {n} columns but {len(rows) - 1} rows", line=rows[-1][0], path=str(path)
        )
    mat = np.full((n, n), np.nan)
    for i, (lineno, row) in enumerate(rows[1:]):
        if len(row) != n + 1:
            raise MalformedRow(
                f"expected {n + 1} columns, got {len(row)}", line=lineno, path=str(path)
            )
        if row[0] != ids[i]:
            raise MalformedRow(
                f"row id {row[0]!r} does not match column id {ids[i]!r}", line=lineno, path=str(path)
            )
        for j, text in enumerate(row[1:]):
            v = _float_or_none(text, "value", lineno, path)
            if v is not None:
                mat[i, j] = v
    for i in range(n):
        if not np.isnan(mat[i, i]) and mat[i, i] != 0.0:
            raise AsymmetricMatrix(
                f"diagonal entry for {ids[i]!r} is {mat[i, i]}, expected 0",
                line=rows[i + 1][0],
                path=str(path),
            )
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    present, present_t = ~np.isnan(mat), ~np.isnan(mat.T)
    mismatch = (present != present_t) | (
        present & present_t & (np.abs(np.nan_to_num(mat - mat.T)) > tol)
    )
    bad = np.argwhere(mismatch & upper)
    if bad.size:
        i, j = bad[0]
        raise AsymmetricMatrix(
            f"M[{ids[i]}][{ids[j]}] = {mat[i, j]} but M[{ids[j]}][{ids[i]}] = {mat[j, i]}",
            line=rows[j + 1][0],
            path=str(path),
        )
    table = PairValueTable.from_pairs(
        (ids[i], ids[j], mat[i, j])
        for i, j in zip(*(a.tolist() for a in np.nonzero(present & upper)))
    )
    lines = {(a, b): None for a, b in table.pairs()}
    for i, j in zip(*(a.tolist() for a in np.nonzero(present & upper))):
        lines[canonical_pair(ids[i], ids[j])] = rows[i + 1][0]
    return table, lines


def write_pair_matrix(table, path):
    """Write a pair table in long layout (``id_a, id_b, value``)."""
    rows = ([a, b, repr(v)] for (a, b), v in table.items())
    _write_rows(path, ("id_a", "id_b", "value"), rows)

"""The language graph: genealogy-annotated nodes and distance-carrying edges.

Edges are stored column-wise. ``graph.columns[name]`` is a float array
aligned with ``graph.ia``/``graph.ib`` (indices into ``graph.nodes``), with
NaN for a missing value. Relatedness is a small integer code per edge.
"""

import enum
import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .concepts import ALL_SETS
from .errors import (
    ConflictingAttribute,
    IoFailure,
    MissingPath,
    UnknownAttribute,
    UnknownLanguageId,
)
from .geo import ContactConfig, rescale_unit
from .ingest import LanguageRecord
from .pairtable import PairValueTable

log = logging.getLogger(__name__)

BASE_COLUMNS = ("geo_dist", "contact_dist", "neighbour", "genetic", "phon", "syntactic")
SEMANTIC_COLUMNS = ALL_SETS
ATTRIBUTES = BASE_COLUMNS + SEMANTIC_COLUMNS
TSV_COLUMNS = (
    "id_a", "id_b", "geo_dist", "contact_dist", "neighbour", "relatedness",
    "genetic", "phon", "syntactic",
) + SEMANTIC_COLUMNS

# Tables with these names are raw measurements turned into stored columns.
RAW_GEO = "geo_km"
RAW_CONTACT = "contact_count"
INPUT_NAMES = (RAW_GEO, RAW_CONTACT, "genetic", "phon", "syntactic") + SEMANTIC_COLUMNS

FORMAT_TAG = "colexgraph/language-graph"
FORMAT_VERSION = 1


class RelatednessLevel(str, enum.Enum):
    LOWER = "lower"
    MID = "mid"
    HIGHER = "higher"
    UNRELATED = "unrelated"

    @property
    def code(self):
        return _LEVEL_CODES[self]


LEVELS = tuple(RelatednessLevel)
_LEVEL_CODES = {lvl: i for i, lvl in enumerate(LEVELS)}


def relatedness_level(a, b):
    """Most specific shared genealogical level; empty labels never match."""
    if a.branch and a.branch == b.branch:
        return RelatednessLevel.LOWER
    if a.genus and a.genus == b.genus:
        return RelatednessLevel.MID
    if a.family and a.family == b.family:
        return RelatednessLevel.HIGHER
    return RelatednessLevel.UNRELATED


def shared_label(a, b, level):
    return {
        RelatednessLevel.LOWER: a.branch,
        RelatednessLevel.MID: a.genus,
        RelatednessLevel.HIGHER: a.family,
        RelatednessLevel.UNRELATED: "",
    }[level]


def genealogy_path(record):
    """Ancestor path for genetic distance.

    Uses the explicit ``classification`` column when present, otherwise the
    non-empty family/genus/branch/parent labels tagged by level so that equal
    names at different levels never match.
    """
    if record.classification:
        return tuple(record.classification)
    return tuple(
        f"{level}:{value}"
        for level, value in (
            ("family", record.family),
            ("genus", record.genus),
            ("branch", record.branch),
            ("parent", record.parent),
        )
        if value
    )


def genealogy_paths(languages):
    return {r.id: genealogy_path(r) for r in languages}


def genetic_distance(a, b, genealogy_paths):
    """1 - shared prefix length / longer path length."""
    pa, pb = genealogy_paths.get(a), genealogy_paths.get(b)
    for lang, p in ((a, pa), (b, pb)):
        if not p:
            raise MissingPath(f"no classification path for {lang!r}")
    shared = 0
    for x, y in zip(pa, pb):
        if x != y:
            break
        shared += 1
    return 1.0 - shared / max(len(pa), len(pb))


@dataclass(frozen=True)
class EdgeAttributes:
    id_a: str
    id_b: str
    geo_dist: float | None
    contact_dist: float | None
    neighbour: int | None
    relatedness: RelatednessLevel
    shared_label: str
    genetic: float | None
    phon: float | None
    syntactic: float | None
    semantic: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AssembleConfig:
    contact: ContactConfig = field(default_factory=ContactConfig)
    compute_genetic: bool = True


class LanguageGraph:
    """Nodes sorted by id and canonical edges sorted by ``(id_a, id_b)``."""

    def __init__(self, nodes, ia, ib, columns, provenance=None):
        self.nodes = tuple(sorted(nodes, key=lambda r: r.id))
        self.ids = tuple(r.id for r in self.nodes)
        self.index = {x: i for i, x in enumerate(self.ids)}
        self.ia = np.asarray(ia, dtype=np.int64)
        self.ib = np.asarray(ib, dtype=np.int64)
        m = self.ia.size
        self.columns = {}
        for name in ATTRIBUTES:
            col = columns.get(name)
            col = np.full(m, np.nan) if col is None else np.asarray(col, dtype=np.float64)
            if col.shape != (m,):
                raise ValueError(f"column {name!r} has wrong length")
            col.setflags(write=False)
            self.columns[name] = col
        self.provenance = dict(provenance or {})
        self.relatedness = _relatedness_codes(self.nodes, self.ia, self.ib)

    def __len__(self):
        return int(self.ia.size)

    @property
    def n_edges(self):
        return len(self)

    def column(self, name):
        if name == "relatedness":
            return self.relatedness.astype(np.float64)
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownAttribute(
                f"unknown edge attribute {name!r}; known: {', '.join(ATTRIBUTES)}"
            ) from None

    def node(self, lang):
        return self.nodes[self.index[lang]]

    def edge(self, a, b):
        a, b = (a, b) if a < b else (b, a)
        i, j = self.index[a], self.index[b]
        code = i * len(self.ids) + j
        k = np.searchsorted(self._codes(), code)
        if k >= len(self) or self._codes()[k] != code:
            raise KeyError((a, b))
        vals = {name: self.columns[name][k] for name in ATTRIBUTES}
        opt = lambda v: None if math.isnan(v) else float(v)
        level = LEVELS[self.relatedness[k]]
        return EdgeAttributes(
            id_a=a,
            id_b=b,
            geo_dist=opt(vals["geo_dist"]),
            contact_dist=opt(vals["contact_dist"]),
            neighbour=None if math.isnan(vals["neighbour"]) else int(vals["neighbour"]),
            relatedness=level,
            shared_label=shared_label(self.nodes[i], self.nodes[j], level),
            genetic=opt(vals["genetic"]),
            phon=opt(vals["phon"]),
            syntactic=opt(vals["syntactic"]),
            semantic={s: opt(vals[s]) for s in SEMANTIC_COLUMNS},
        )

    def _codes(self):
        return self.ia * len(self.ids) + self.ib

    def pair_ids(self):
        ids = self.ids
        return [(ids[a], ids[b]) for a, b in zip(self.ia.tolist(), self.ib.tolist())]

    def present(self, names):
        """Boolean mask of edges where every named attribute is present."""
        mask = np.ones(len(self), dtype=bool)
        for name in names:
            mask &= ~np.isnan(self.column(name))
        return mask

    def __eq__(self, other):
        if not isinstance(other, LanguageGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and np.array_equal(self.ia, other.ia)
            and np.array_equal(self.ib, other.ib)
            and all(
                np.array_equal(self.columns[n], other.columns[n], equal_nan=True)
                for n in ATTRIBUTES
            )
            and self.provenance == other.provenance
        )

    def __repr__(self):
        return f"LanguageGraph({len(self.nodes)} nodes, {len(self)} edges)"


def _relatedness_codes(nodes, ia, ib):
    codes = np.full(ia.size, _LEVEL_CODES[RelatednessLevel.UNRELATED], dtype=np.int8)
    if ia.size == 0:
        return codes
    # check from least to most specific so the most specific match wins
    for attr, level in (
        ("family", RelatednessLevel.HIGHER),
        ("genus", RelatednessLevel.MID),
        ("branch", RelatednessLevel.LOWER),
    ):
        labels = {}
        enc = np.array(
            [labels.setdefault(getattr(r, attr), len(labels)) if getattr(r, attr) else -1 for r in nodes],
            dtype=np.int64,
        )
        same = (enc[ia] == enc[ib]) & (enc[ia] >= 0)
        codes[same] = _LEVEL_CODES[level]
    return codes


def _merge_tables(tables):
    merged = {}
    for name, table in tables:
        if name not in INPUT_NAMES:
            raise ValueError(f"unknown attribute table {name!r}; expected one of {', '.join(INPUT_NAMES)}")
        if name not in merged:
            merged[name] = table
            continue
        old = merged[name]
        both = {}
        for pair, v in table.items():
            if pair in old and old[pair] != v:
                raise ConflictingAttribute(
                    name,
                    f"attribute {name!r} has conflicting values {old[pair]!r} and {v!r} for pair {pair}",
                )
            both[pair] = v
        for pair, v in old.items():
            both.setdefault(pair, v)
        merged[name] = PairValueTable.from_pairs(both, old.value_range)
    return merged


def assemble(nodes, tables, config=None, provenance=None):
    """Combine nodes and per-attribute pair tables into a :class:`LanguageGraph`.

    ``tables`` is a mapping or a sequence of ``(name, PairValueTable)``;
    the same name may appear more than once if values agree. Raw tables
    ``geo_km`` and ``contact_count`` are min-max rescaled into ``geo_dist``
    and ``contact_dist``; ``neighbour`` is derived from the raw count. A
    ``genetic`` table overrides the classification-path formula.
    """
    config = config or AssembleConfig()
    nodes = tuple(sorted(nodes, key=lambda r: r.id))
    ids = [r.id for r in nodes]
    index = {x: i for i, x in enumerate(ids)}
    if len(index) != len(ids):
        raise ValueError("duplicate node ids")
    n = len(ids)
    items = list(tables.items()) if hasattr(tables, "items") else list(tables)
    merged = _merge_tables(items)

    unknown = sorted({x for t in merged.values() for x in t.ids if x not in index})
    if unknown:
        raise UnknownLanguageId(f"pair tables reference unknown languages: {', '.join(unknown[:10])}")

    mapped = {}
    for name, table in merged.items():
        if len(table) == 0:
            continue
        remap = np.array([index[x] for x in table.ids], dtype=np.int64)
        a, b = remap[table.ia], remap[table.ib]
        # node order and table id order are the same string order
        mapped[name] = (a * n + b, table)
    if mapped:
        codes = np.unique(np.concatenate([c for c, _ in mapped.values()]))
    else:
        codes = np.zeros(0, dtype=np.int64)
    ia, ib = codes // max(n, 1), codes % max(n, 1)

    columns = {}

    def place(values, table_codes):
        col = np.full(codes.size, np.nan)
        col[np.searchsorted(codes, table_codes)] = values
        return col

    for name, (tcodes, table) in mapped.items():
        if name == RAW_GEO:
            columns["geo_dist"] = place(rescale_unit(table).values, tcodes)
        elif name == RAW_CONTACT:
            columns["contact_dist"] = place(rescale_unit(table).values, tcodes)
            flags = (table.values < config.contact.neighbour_threshold).astype(np.float64)
            columns["neighbour"] = place(flags, tcodes)
        else:
            columns[name] = place(table.values, tcodes)

    prov = dict(provenance or {})
    if "genetic" not in mapped and config.compute_genetic and codes.size:
        columns["genetic"] = _genetic_column(nodes, ia, ib)
        prov.setdefault("genetic", "classification-path prefix formula")
    return LanguageGraph(nodes, ia, ib, columns, prov)


def _genetic_column(nodes, ia, ib):
    paths = [genealogy_path(r) for r in nodes]
    # common prefix length, vectorized over edges level by level
    depth = max((len(p) for p in paths), default=0)
    lengths = np.array([len(p) for p in paths], dtype=np.int64)
    enc = np.full((len(nodes), depth), -1, dtype=np.int64)
    labels = {}
    for i, p in enumerate(paths):
        for d, step in enumerate(p):
            enc[i, d] = labels.setdefault(p[: d + 1], len(labels))
    shared = np.zeros(ia.size, dtype=np.int64)
    alive = np.ones(ia.size, dtype=bool)
    for d in range(depth):
        alive &= (enc[ia, d] == enc[ib, d]) & (enc[ia, d] >= 0)
        shared += alive
    longest = np.maximum(lengths[ia], lengths[ib])
    col = np.full(ia.size, np.nan)
    ok = (lengths[ia] > 0) & (lengths[ib] > 0)
    col[ok] = 1.0 - shared[ok] / longest[ok]
    return col


# serialization


def _cell(name, value):
    if math.isnan(value):
        return "NA"
    if name == "neighbour":
        return str(int(value))
    return repr(float(value))


def write_edges_tsv(graph, path):
    """One row per edge, fixed column order, ``NA`` for missing values."""
    ids = graph.ids
    cols = [graph.columns[c] for c in TSV_COLUMNS[2:] if c != "relatedness"]
    names = [c for c in TSV_COLUMNS[2:] if c != "relatedness"]
    rel_at = TSV_COLUMNS.index("relatedness") - 2
    level_names = [lvl.value for lvl in LEVELS]
    lists = [c.tolist() for c in cols]
    rel = graph.relatedness.tolist()
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\t".join(TSV_COLUMNS) + "\n")
            for k, (a, b) in enumerate(zip(graph.ia.tolist(), graph.ib.tolist())):
                cells = [_cell(nm, col[k]) for nm, col in zip(names, lists)]
                cells.insert(rel_at, level_names[rel[k]])
                fh.write(ids[a] + "\t" + ids[b] + "\t" + "\t".join(cells) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _node_json(r):
    d = asdict(r)
    d["classification"] = list(r.classification)
    return d


def graph_to_json(graph):
    ids = graph.ids
    lists = {name: graph.columns[name].tolist() for name in ATTRIBUTES}
    rel = graph.relatedness.tolist()
    edges = []
    for k, (a, b) in enumerate(zip(graph.ia.tolist(), graph.ib.tolist())):
        e = {"id_a": ids[a], "id_b": ids[b], "relatedness": LEVELS[rel[k]].value}
        for name in ATTRIBUTES:
            v = lists[name][k]
            e[name] = None if v != v else (int(v) if name == "neighbour" else v)
        edges.append(e)
    return {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "attributes": list(ATTRIBUTES),
        "provenance": graph.provenance,
        "nodes": [_node_json(r) for r in graph.nodes],
        "edges": edges,
    }


def graph_from_json(doc):
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise IoFailure("not a language graph document")
    if doc.get("version") != FORMAT_VERSION:
        raise IoFailure(f"unsupported graph document version {doc.get('version')!r}")
    try:
        return _graph_from_doc(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise IoFailure(f"malformed graph document: {exc!r}") from exc


def _graph_from_doc(doc):
    nodes = []
    for d in doc["nodes"]:
        d = dict(d)
        d["classification"] = tuple(d.get("classification", ()))
        nodes.append(LanguageRecord(**d))
    nodes.sort(key=lambda r: r.id)
    index = {r.id: i for i, r in enumerate(nodes)}
    edges = doc["edges"]
    ia = np.array([index[e["id_a"]] for e in edges], dtype=np.int64)
    ib = np.array([index[e["id_b"]] for e in edges], dtype=np.int64)
    columns = {
        name: np.array([np.nan if e.get(name) is None else e[name] for e in edges], dtype=np.float64)
        for name in ATTRIBUTES
    }
    return LanguageGraph(nodes, ia, ib, columns, doc.get("provenance", {}))


def write_graph_json(graph, path):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(graph_to_json(graph), fh, ensure_ascii=False, separators=(",", ":"))
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_graph_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise IoFailure(f"cannot read graph {path}: {exc}") from exc
    return graph_from_json(doc)


def export_graph(graph, path, format="json"):
    if format == "json":
        write_graph_json(graph, path)
    elif format == "edges-tsv":
        write_edges_tsv(graph, path)
    else:
        raise ValueError(f"unknown export format {format!r}")

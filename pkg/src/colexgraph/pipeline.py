"""End-to-end graph build driven by a flat configuration."""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from math import comb
from pathlib import Path

import numpy as np

from . import colex, concepts, geo, graph, ingest, phon
from .errors import ConfigError, EmptyPatternList

log = logging.getLogger(__name__)

PATH_KEYS = ("languages", "colex", "ratings", "wordlists", "genetic", "syntactic", "phon")


@dataclass
class BuildConfig:
    languages: str | None = None
    colex: str | None = None
    ratings: str | None = None
    wordlists: str | None = None
    genetic: str | None = None
    syntactic: str | None = None
    phon: str | None = None
    concept_sets: list = field(default_factory=lambda: list(concepts.ALL_SETS))
    affect_rule: str = "per-rating"
    min_languages_any: int = 1
    min_languages_both: int = 3
    min_shared_concepts: int = 20
    neighbour_threshold: int = 10
    seed: int = 42
    out_dir: str = "out"
    threads: int = 1
    formats: list = field(default_factory=lambda: ["json", "edges-tsv"])

    @classmethod
    def from_dict(cls, data, base_dir=None):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        cfg = cls(**data)
        if base_dir is not None:
            for key in PATH_KEYS + ("out_dir",):
                value = getattr(cfg, key)
                if value and not Path(value).is_absolute():
                    setattr(cfg, key, str(Path(base_dir) / value))
        return cfg

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data, base_dir=Path(path).parent)

    def validate(self):
        if not self.languages:
            raise ConfigError("config: 'languages' path is required")
        for key in PATH_KEYS:
            value = getattr(self, key)
            if value and not Path(value).is_file():
                raise ConfigError(f"config: {key} file not found: {value}")
        for key in ("min_languages_any", "min_languages_both", "min_shared_concepts",
                    "neighbour_threshold", "threads"):
            if not isinstance(getattr(self, key), int) or getattr(self, key) < 1:
                raise ConfigError(f"config: {key} must be a positive integer")
        bad = [s for s in self.concept_sets if s not in concepts.ALL_SETS]
        if bad:
            raise ConfigError(f"config: unknown concept set(s): {', '.join(bad)}")
        if self.affect_rule not in ("per-rating", "same-side"):
            raise ConfigError("config: affect_rule must be 'per-rating' or 'same-side'")
        bad = [f for f in self.formats if f not in ("json", "edges-tsv")]
        if bad:
            raise ConfigError(f"config: unknown output format(s): {', '.join(bad)}")
        return self

    def echo(self):
        """Settings that affect outputs (``threads`` deliberately excluded)."""
        d = asdict(self)
        d.pop("threads")
        for key in PATH_KEYS + ("out_dir",):
            if d[key]:
                d[key] = Path(d[key]).name
        return d


def _pair_report(table):
    covered = np.unique(np.concatenate([table.ia, table.ib]))
    return {"languages": int(covered.size), "pairs": len(table)}


def build_graph(config):
    """Run the whole build; returns ``(graph, report)`` without writing files."""
    config.validate()
    languages = ingest.load_languages(config.languages)
    node_ids = [r.id for r in languages]
    tables = []
    provenance = {}
    report = {
        "languages": len(languages),
        "attributes": {},
        "exclusions": {},
        "seed": config.seed,
        "config": config.echo(),
    }
    exclusions = report["exclusions"]

    # semantic distances per concept set
    wanted = [s for s in concepts.ALL_SETS if s in config.concept_sets]
    if config.colex:
        records = ingest.load_colex(config.colex)
        sets = {s: concepts.builtin_set(s) for s in wanted if s in concepts.BUILTIN_SETS}
        rated_wanted = [s for s in wanted if s in concepts.RATED_SETS]
        if rated_wanted:
            if config.ratings:
                ratings = ingest.load_ratings(config.ratings)
                rated, skipped = concepts.rated_sets(ratings, affect_rule=config.affect_rule)
                sets.update({k: v for k, v in rated.items() if k in rated_wanted})
                for k, reason in skipped.items():
                    if k in rated_wanted:
                        exclusions.setdefault("skipped_sets", {})[k] = reason
            else:
                for k in rated_wanted:
                    exclusions.setdefault("skipped_sets", {})[k] = "no ratings file configured"
        for name in wanted:
            if name not in sets:
                continue
            mode = "any" if name in concepts.BUILTIN_SETS else "both"
            min_langs = config.min_languages_any if mode == "any" else config.min_languages_both
            try:
                patterns = colex.select_patterns(records, sets[name], mode, min_langs)
            except EmptyPatternList as exc:
                exclusions.setdefault("skipped_sets", {})[name] = str(exc)
                continue
            matrix = colex.build_matrix(records, patterns, node_ids)
            zero = [lang for lang, nz in zip(matrix.languages, matrix.nonzero_rows()) if not nz]
            if zero:
                exclusions.setdefault("zero_vectors", {})[name] = sorted(zero)
            table = colex.semantic_distance_table(matrix, threads=config.threads)
            tables.append((name, table))
            provenance[name] = (
                f"cosine distance over {len(patterns)} colexification patterns "
                f"(mode={mode}, min_languages={min_langs})"
            )
            report["attributes"][name] = dict(_pair_report(table), patterns=len(patterns))
    elif wanted:
        exclusions["skipped_sets"] = {s: "no colexification file configured" for s in wanted}

    # phonological distances
    if config.phon:
        table = ingest.load_pair_matrix(config.phon, (0.0, 1.0))
        tables.append(("phon", table))
        provenance["phon"] = f"precomputed matrix {Path(config.phon).name}"
        report["attributes"]["phon"] = _pair_report(table)
    elif config.wordlists:
        entries = ingest.load_wordlists(config.wordlists)
        nuclear = concepts.builtin_set("nuclear")
        spec = phon.PhonDistanceSpec(nuclear, min(config.min_shared_concepts, len(nuclear)))
        table = phon.phonological_distance_table(entries, spec, threads=config.threads)
        covered = {e.language for e in entries if e.concept in nuclear}
        missing = sorted(set(node_ids) - covered)
        if missing:
            exclusions["phon_no_wordlist"] = missing
        dropped = comb(len(covered), 2) - len(table)
        if dropped:
            exclusions["phon_low_overlap_pairs"] = dropped
        tables.append(("phon", table))
        provenance["phon"] = (
            f"mean per-concept minimum LDN over nuclear concepts "
            f"(min_shared_concepts={spec.min_shared_concepts})"
        )
        report["attributes"]["phon"] = _pair_report(table)

    # precomputed genealogical / syntactic matrices
    for key in ("genetic", "syntactic"):
        path = getattr(config, key)
        if path:
            table = ingest.load_pair_matrix(path, (0.0, 1.0))
            tables.append((key, table))
            provenance[key] = f"precomputed matrix {Path(path).name}"
            report["attributes"][key] = _pair_report(table)

    # geography
    km, counts, no_coords = geo.geo_tables(languages, threads=config.threads)
    if no_coords:
        exclusions["geo_missing_coordinates"] = no_coords
    if len(km):
        tables.append((graph.RAW_GEO, km))
        tables.append((graph.RAW_CONTACT, counts))
        provenance["geo_dist"] = "haversine km, min-max rescaled"
        provenance["contact_dist"] = "in-between language count, min-max rescaled"
        provenance["neighbour"] = f"contact count < {config.neighbour_threshold}"
        for name in ("geo_dist", "contact_dist", "neighbour"):
            report["attributes"][name] = _pair_report(km)

    assemble_cfg = graph.AssembleConfig(geo.ContactConfig(config.neighbour_threshold))
    g = graph.assemble(languages, tables, assemble_cfg, provenance)
    if "genetic" not in report["attributes"]:
        present = g.present(("genetic",))
        report["attributes"]["genetic"] = {"pairs": int(present.sum())}
        no_path = sorted(r.id for r in languages if not graph.genealogy_path(r))
        if no_path:
            exclusions["genetic_no_path"] = no_path
    report["edges"] = len(g)
    report["attributes"] = dict(sorted(report["attributes"].items()))
    return g, report


def write_outputs(g, report, config):
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    if "json" in config.formats:
        graph.write_graph_json(g, out / "graph.json")
        written["json"] = str(out / "graph.json")
    if "edges-tsv" in config.formats:
        graph.write_edges_tsv(g, out / "edges.tsv")
        written["edges-tsv"] = str(out / "edges.tsv")
    with open(out / "build_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written["report"] = str(out / "build_report.json")
    return written


def run_build(config):
    g, report = build_graph(config)
    return g, report, write_outputs(g, report, config)


"""Command line entry point.

    colexgraph build --config world/config.json [--threads N] [overrides]
    colexgraph stats pearson --graph out/graph.json --x nuclear --y phon --group macroarea
    colexgraph stats beta --graph out/graph.json --target nuclear --predictor genetic --controls geo_dist
    colexgraph stats ols --graph out/graph.json --y phon --x geo_dist --group relatedness --sample 1744
    colexgraph stats ari --graph out/graph.json --sets nuclear,non-nuclear,emotion,random --top-families 5
    colexgraph dist --graph out/graph.json --attr phon --out phon_hist.csv
    colexgraph export --graph out/graph.json --format edges-tsv --out edges.tsv

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal error.
Every successful command prints one JSON summary line on stdout.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import geo, graph, reports, stats
from .errors import ColexGraphError, ConfigError, UnknownAnalysis
from .pipeline import BuildConfig, run_build

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("colexgraph")


def _csv_list(text):
    return [x.strip() for x in text.split(",") if x.strip()] if text else []


def _parser():
    p = argparse.ArgumentParser(prog="colexgraph", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build the language graph from a config file")
    b.add_argument("--config", help="JSON config file")
    b.add_argument("--threads", type=int)
    b.add_argument("--out-dir", dest="out_dir")
    b.add_argument("--seed", type=int)
    for key in ("languages", "colex", "ratings", "wordlists", "genetic", "syntactic", "phon"):
        b.add_argument(f"--{key}")
    b.add_argument("--concept-sets", dest="concept_sets", type=_csv_list)
    b.add_argument("--affect-rule", dest="affect_rule", choices=("per-rating", "same-side"))
    b.add_argument("--min-languages-any", dest="min_languages_any", type=int)
    b.add_argument("--min-languages-both", dest="min_languages_both", type=int)
    b.add_argument("--min-shared-concepts", dest="min_shared_concepts", type=int)
    b.add_argument("--neighbour-threshold", dest="neighbour_threshold", type=int)
    b.add_argument("--formats", type=_csv_list)

    s = sub.add_parser("stats", help="run an analysis on a built graph")
    s.add_argument("analysis", help="pearson | beta | ols | ari")
    s.add_argument("--graph", required=True)
    s.add_argument("--out", help="output CSV (default: <analysis>.csv)")
    s.add_argument("--seed", type=int, default=stats.DEFAULT_SEED)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--group", default=None, choices=stats.GROUP_KEYS)
    s.add_argument("--target")
    s.add_argument("--predictor")
    s.add_argument("--controls", type=_csv_list, default=[])
    s.add_argument("--pooled", action="store_true", help="beta: one fit instead of per relatedness level")
    s.add_argument("--sample", type=int, help="ols: stratified sample size")
    s.add_argument("--sets", type=_csv_list, default=[])
    s.add_argument("--top-families", dest="top_families", type=int, default=5)
    s.add_argument("--min-family-size", dest="min_family_size", type=int, default=4)

    d = sub.add_parser("dist", help="per-relatedness histogram of an edge attribute")
    d.add_argument("--graph", required=True)
    d.add_argument("--attr", required=True)
    d.add_argument("--bins", type=int, default=64)
    d.add_argument("--out", required=True)

    e = sub.add_parser("export", help="re-export a graph or its contact edges")
    e.add_argument("--graph", required=True)
    e.add_argument("--format", required=True, choices=("json", "edges-tsv", "contact"))
    e.add_argument("--out", required=True)
    e.add_argument("--ego", help="contact: only pairs involving this language")
    e.add_argument("--neighbour-threshold", dest="neighbour_threshold", type=int, default=10)
    e.add_argument("--threads", type=int, default=1)
    return p


def _summary(**fields):
    print(json.dumps(fields, sort_keys=True))


def cmd_build(args):
    if args.config:
        config = BuildConfig.from_file(args.config)
    else:
        config = BuildConfig()
    for key in ("languages", "colex", "ratings", "wordlists", "genetic", "syntactic", "phon",
                "out_dir", "seed", "threads", "concept_sets", "affect_rule", "min_languages_any",
                "min_languages_both", "min_shared_concepts", "neighbour_threshold", "formats"):
        value = getattr(args, key)
        if value is not None:
            setattr(config, key, value)
    g, report, written = run_build(config)
    _summary(command="build", nodes=len(g.nodes), edges=len(g), outputs=written)


def _require(args, *names):
    missing = [n for n in names if not getattr(args, n)]
    if missing:
        raise ConfigError(f"stats {args.analysis}: missing --{', --'.join(missing)}")


def cmd_stats(args):
    analysis = args.analysis
    if analysis not in ("pearson", "beta", "ols", "ari"):
        raise UnknownAnalysis(f"unknown analysis {analysis!r}; expected pearson, beta, ols or ari")
    g = graph.read_graph_json(args.graph)
    out = Path(args.out or f"{analysis}.csv")
    params = {"analysis": analysis, "graph": Path(args.graph).name, "seed": args.seed}
    if analysis == "pearson":
        _require(args, "x", "y")
        group = args.group or "macroarea"
        results = stats.group_pearson(g, args.x, args.y, group_key=group)
        reports.write_correlations(results, out, args.x, args.y)
        params.update(x=args.x, y=args.y, group=group)
        rows = len(results)
    elif analysis == "beta":
        _require(args, "target", "predictor")
        results = stats.standardized_beta(
            g, args.target, args.predictor, args.controls, by_relatedness=not args.pooled
        )
        reports.write_betas(results, out)
        params.update(target=args.target, predictor=args.predictor, controls=args.controls,
                      by_relatedness=not args.pooled)
        rows = len(results)
    elif analysis == "ols":
        _require(args, "y", "x")
        xs = _csv_list(args.x)
        group = args.group or "relatedness"
        fits = stats.grouped_ols(g, args.y, xs, group_key=group, sample=args.sample, seed=args.seed)
        reports.write_ols(fits, out)
        params.update(y=args.y, x=xs, group=group, sample=args.sample)
        rows = sum(len(f.terms) for f in fits.values())
    else:
        sets = args.sets or ["nuclear", "non-nuclear", "emotion", "random"]
        if len(sets) < 2:
            raise ConfigError("stats ari: --sets needs at least two concept sets")
        results = stats.family_ari_report(
            g, sets, top_k_families=args.top_families, seed=args.seed,
            min_languages=args.min_family_size,
        )
        reports.write_ari(results, out)
        params.update(sets=sets, top_families=args.top_families,
                      families=[r.family for r in results])
        rows = sum(len(r.ari) for r in results)
    meta = out.with_suffix(".meta.json")
    reports.write_metadata(meta, **params)
    _summary(command="stats", analysis=analysis, rows=rows, output=str(out), metadata=str(meta))


def cmd_dist(args):
    g = graph.read_graph_json(args.graph)
    edges, hist = stats.distance_histograms(g, args.attr, bins=args.bins)
    reports.write_histograms(edges, hist, args.out, args.attr)
    _summary(command="dist", attribute=args.attr, bins=args.bins, output=args.out,
             counts={k: int(v.sum()) for k, v in hist.items()})


def cmd_export(args):
    g = graph.read_graph_json(args.graph)
    if args.format == "contact":
        geo.write_contact_edges(g.nodes, args.out, geo.ContactConfig(args.neighbour_threshold),
                                ego=args.ego, threads=args.threads)
    else:
        graph.export_graph(g, args.out, args.format)
    _summary(command="export", format=args.format, output=args.out)


COMMANDS = {"build": cmd_build, "stats": cmd_stats, "dist": cmd_dist, "export": cmd_export}


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"colexgraph {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ColexGraphError as exc:
        module = type(exc).__module__.rsplit(".", 1)[-1]
        print(f"colexgraph {args.command}: {type(exc).__name__} ({module}): {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"colexgraph {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""CSV writers for analysis results (the data behind each plot)."""

import csv
import json
import math


def _num(v):
    if v is None:
        return ""
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def _write(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_correlations(results, path, attr_x, attr_y):
    header = ["group", "x", "y", "statistic", "value", "ci_low", "ci_high", "p_value", "n"]
    rows = [
        [r.group, attr_x, attr_y, "pearson_r", _num(r.r), _num(r.ci95[0]), _num(r.ci95[1]),
         _num(r.p_value), r.n]
        for r in results
    ]
    _write(path, header, rows)


def write_betas(results, path):
    header = ["group", "target", "predictor", "controls", "statistic", "value",
              "ci_low", "ci_high", "p_value", "n"]
    rows = [
        [b.group, b.target, b.predictor, ";".join(b.controls), "beta", _num(b.beta),
         _num(b.ci95[0]), _num(b.ci95[1]), _num(b.p_value), b.n]
        for b in results
    ]
    _write(path, header, rows)


def write_ols(fits, path):
    """``fits`` maps group name to an :class:`~colexgraph.stats.OlsResult`."""
    header = ["group", "term", "statistic", "value", "se", "ci_low", "ci_high", "p_value", "n"]
    rows = []
    for group, fit in fits.items():
        for k, term in enumerate(fit.terms):
            rows.append([group, term, "coef", _num(fit.coef[k]), _num(fit.se[k]),
                         _num(fit.ci95[k, 0]), _num(fit.ci95[k, 1]), _num(fit.p_value[k]), fit.n])
    _write(path, header, rows)


def write_ari(reports, path):
    header = ["group", "set_a", "set_b", "statistic", "value", "ci_low", "ci_high", "p_value", "n"]
    rows = []
    for rep in reports:
        for (a, b), v in rep.ari.items():
            rows.append([rep.family, a, b, "ari", _num(v), "", "", "", rep.n_languages])
    _write(path, header, rows)


def write_histograms(edges, hist, path, attr):
    header = ["group", "attribute", "bin", "bin_low", "bin_high", "count"]
    rows = []
    for group, counts in hist.items():
        for k, c in enumerate(counts.tolist()):
            rows.append([group, attr, k, _num(edges[k]), _num(edges[k + 1]), c])
    _write(path, header, rows)


def write_metadata(path, **meta):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

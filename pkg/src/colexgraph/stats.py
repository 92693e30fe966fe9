"""Correlation, regression, sampling and community-structure analyses.

Analyses over a :class:`~colexgraph.graph.LanguageGraph` work on edge
columns. Each also has an array-level counterpart so it can be driven by
synthetic data directly.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy import stats as sps

from .errors import (
    DegenerateSeries,
    EmptyGroup,
    InsufficientLanguages,
    LengthMismatch,
    NodeSetMismatch,
    RankDeficient,
    SampleTooLarge,
    UnknownAttribute,
)
from .graph import LEVELS, RelatednessLevel

log = logging.getLogger(__name__)

DEFAULT_SEED = 42
CROSS = "cross"
MEAN = "mean"
GROUP_KEYS = ("relatedness", "macroarea", CROSS, "family")


@dataclass(frozen=True)
class CorrelationResult:
    group: str
    r: float
    p_value: float
    n: int
    ci95: tuple = (float("nan"), float("nan"))


@dataclass(frozen=True)
class OlsResult:
    terms: tuple
    coef: np.ndarray
    se: np.ndarray
    ci95: np.ndarray  # shape (k, 2)
    p_value: np.ndarray
    n: int
    df_resid: int
    residuals: np.ndarray = field(repr=False)
    r_squared: float = float("nan")

    def __getitem__(self, term):
        return float(self.coef[self.terms.index(term)])


@dataclass(frozen=True)
class BetaResult:
    target: str
    predictor: str
    controls: tuple
    group: str
    beta: float
    ci95: tuple
    p_value: float
    n: int
    se: float = float("nan")


# -- Pearson --------------------------------------------------------------


def pearson(x, y, group="all"):
    """Pearson r with a two-sided t-test p-value and Fisher-z 95% interval."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"series lengths differ: {x.size} vs {y.size}")
    n = x.size
    if n < 3:
        raise DegenerateSeries(f"need at least 3 observations, got {n}")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSeries("series has zero variance")
    r = float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * np.sqrt(df / ((1.0 - r) * (1.0 + r)))
        p = float(min(1.0, 2.0 * sps.t.sf(abs(t), df)))
    if n > 3 and abs(r) < 1.0:
        z, half = np.arctanh(r), 1.959963984540054 / np.sqrt(n - 3)
        ci = (float(np.tanh(z - half)), float(np.tanh(z + half)))
    else:
        ci = (r, r)
    return CorrelationResult(group, r, p, n, ci)


def edge_groups(graph, key):
    """Per-edge group label (object array; ``None`` = not in any group).

    ``relatedness``: level name. ``macroarea``: the shared macroarea, or
    ``cross`` when the endpoints differ. ``cross``: only cross-macroarea
    edges, all labelled ``cross``. ``family``: the shared family.
    """
    ia, ib = graph.ia, graph.ib
    if key == "relatedness":
        names = np.array([lvl.value for lvl in LEVELS], dtype=object)
        return names[graph.relatedness]
    if key in ("macroarea", CROSS, "family"):
        attr = "family" if key == "family" else "macroarea"
        labels = np.array([getattr(r, attr) or None for r in graph.nodes], dtype=object)
        la, lb = labels[ia], labels[ib]
        known = (la != None) & (lb != None)  # noqa: E711
        same = known & (la == lb)
        out = np.full(ia.size, None, dtype=object)
        if key in ("macroarea", "family"):
            out[same] = la[same]
        if key in ("macroarea", CROSS):
            out[known & ~same] = CROSS
        return out
    raise ValueError(f"unknown group key {key!r}")


def _group_order(labels):
    present = {g for g in labels.tolist() if g is not None}
    level_rank = {lvl.value: i for i, lvl in enumerate(LEVELS)}
    return sorted(present, key=lambda g: (g == CROSS, level_rank.get(g, -1), g))


def group_pearson(graph, attr_x, attr_y, group_key="macroarea", min_n=3):
    x, y = graph.column(attr_x), graph.column(attr_y)
    labels = edge_groups(graph, group_key)
    ok = graph.present((attr_x, attr_y))
    results = []
    for g in _group_order(labels[ok]):
        sel = ok & (labels == g)
        n = int(sel.sum())
        if n < min_n:
            log.warning("group %r has %d pairs (< %d); omitted", g, n, min_n)
            continue
        try:
            results.append(pearson(x[sel], y[sel], group=g))
        except DegenerateSeries as exc:
            log.warning("group %r skipped: %s", g, exc)
    return results


# -- OLS ------------------------------------------------------------------


def ols(design, y, names=None):
    """Least squares with an intercept.

    ``design`` is a sequence of predictor series (or an n x k array).
    Returns coefficients with standard errors, t-based 95% intervals and
    two-sided p-values; the first term is ``intercept``.
    """
    y = np.asarray(y, dtype=np.float64)
    cols = np.asarray(design, dtype=np.float64)
    if cols.ndim == 1:
        cols = cols[None, :]
    if cols.shape[0] == y.size and cols.shape[1] != y.size:
        cols = cols.T
    if cols.shape[1] != y.size:
        raise LengthMismatch("design columns and response differ in length")
    k = cols.shape[0]
    names = tuple(names) if names is not None else tuple(f"x{i + 1}" for i in range(k))
    X = np.column_stack([np.ones(y.size)] + list(cols))
    n, p = X.shape
    if n <= p:
        raise RankDeficient(f"{n} observations for {p} coefficients")
    if np.linalg.matrix_rank(X) < p:
        raise RankDeficient("design matrix is not of full column rank")
    q, r = np.linalg.qr(X)
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - X @ coef
    df = n - p
    sigma2 = float(resid @ resid) / df
    rinv = np.linalg.inv(r)
    se = np.sqrt(np.sum(rinv**2, axis=1) * sigma2)
    tcrit = sps.t.ppf(0.975, df)
    with np.errstate(divide="ignore", invalid="ignore"):
        pval = 2.0 * sps.t.sf(np.abs(coef / se), df)
    # exact fit: zero standard error
    pval = np.where(se == 0.0, np.where(coef == 0.0, 1.0, 0.0), pval)
    ci = np.column_stack([coef - tcrit * se, coef + tcrit * se])
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else float("nan")
    return OlsResult(("intercept",) + names, coef, se, ci, pval, n, df, resid, r2)


# -- standardized betas ---------------------------------------------------


def zscore(v):
    v = np.asarray(v, dtype=np.float64)
    sd = v.std()
    if sd == 0.0:
        raise DegenerateSeries("cannot standardize a constant series")
    return (v - v.mean()) / sd


def grouped_standardized_beta(target, predictor, controls=(), groups=None,
                              names=("target", "predictor"), control_names=None):
    """Standardized beta of ``predictor`` on ``target``, one fit per group.

    All variables are z-scored over the full input, then an OLS
    ``target ~ predictor + controls`` is fitted within each group. When
    there is more than one group a ``mean`` row is appended: the average
    beta, with a normal interval from the pooled standard errors.
    """
    y = zscore(target)
    x = zscore(predictor)
    ctrl = [zscore(c) for c in controls]
    control_names = tuple(control_names or (f"c{i + 1}" for i in range(len(ctrl))))
    if groups is None:
        groups = np.full(y.size, "all", dtype=object)
    groups = np.asarray(groups, dtype=object)
    out = []
    for g in _group_order(groups):
        sel = groups == g
        try:
            fit = ols([x[sel]] + [c[sel] for c in ctrl], y[sel], names=("predictor",) + control_names)
        except (RankDeficient, DegenerateSeries) as exc:
            log.warning("group %r skipped: %s", g, exc)
            continue
        lo, hi = fit.ci95[1]
        out.append(
            BetaResult(names[0], names[1], control_names, str(g), float(fit.coef[1]),
                       (float(lo), float(hi)), float(fit.p_value[1]), int(sel.sum()),
                       float(fit.se[1]))
        )
    if not out:
        raise RankDeficient("no group could be fitted")
    if len(out) > 1:
        betas = np.array([b.beta for b in out])
        ses = np.array([b.se for b in out])
        mean = float(betas.mean())
        se = float(np.sqrt(np.sum(ses**2)) / len(out))
        half = 1.959963984540054 * se
        p = float(2.0 * sps.norm.sf(abs(mean) / se)) if se > 0 else 0.0
        out.append(
            BetaResult(names[0], names[1], control_names, MEAN, mean, (mean - half, mean + half),
                       p, int(sum(b.n for b in out)), se)
        )
    return out


def standardized_beta(graph, target, predictor, controls=(), by_relatedness=True, mask=None):
    """Grouped standardized-beta regression over graph edges.

    The analysed subset is the edges (optionally restricted by ``mask``)
    where target, predictor and every control are present.
    """
    controls = tuple(controls)
    cols = (target, predictor) + controls
    for c in cols:
        graph.column(c)
    sel = graph.present(cols)
    if mask is not None:
        sel &= mask
    if not sel.any():
        raise EmptyGroup(f"no edge has all of {', '.join(cols)}")
    groups = edge_groups(graph, "relatedness")[sel] if by_relatedness else None
    return grouped_standardized_beta(
        graph.column(target)[sel],
        graph.column(predictor)[sel],
        [graph.column(c)[sel] for c in controls],
        groups,
        names=(target, predictor),
        control_names=controls,
    )


# -- stratified sampling --------------------------------------------------


def allocate_quotas(sizes, total_n):
    """Largest-remainder proportional allocation.

    Every non-empty group gets at least one draw when ``total_n`` allows;
    the seat is taken from the group holding the most (first on ties).
    """
    sizes = [int(s) for s in sizes]
    population = sum(sizes)
    if total_n > population:
        raise SampleTooLarge(f"cannot draw {total_n} from {population}")
    if total_n < 0:
        raise ValueError("total_n must be non-negative")
    if population == 0:
        return [0] * len(sizes)
    exact = [Fraction(total_n * s, population) for s in sizes]
    quotas = [int(e) for e in exact]
    left = total_n - sum(quotas)
    by_remainder = sorted(range(len(sizes)), key=lambda i: (-(exact[i] - quotas[i]), i))
    for i in by_remainder[:left]:
        quotas[i] += 1
    nonempty = [i for i, s in enumerate(sizes) if s > 0]
    if total_n >= len(nonempty):
        for i in nonempty:
            if quotas[i] == 0:
                donor = max(range(len(sizes)), key=lambda j: (quotas[j], -j))
                quotas[donor] -= 1
                quotas[i] += 1
    return quotas


def stratified_sample(graph, group_key, total_n, seed=DEFAULT_SEED, mask=None):
    """Edge indices drawn without replacement, proportionally per group."""
    labels = edge_groups(graph, group_key)
    eligible = labels != None  # noqa: E711
    if mask is not None:
        eligible &= mask
    groups = _group_order(labels[eligible])
    if not groups:
        raise EmptyGroup("no edge belongs to any group")
    members = [np.flatnonzero(eligible & (labels == g)) for g in groups]
    quotas = allocate_quotas([m.size for m in members], total_n)
    rng = np.random.default_rng(seed)
    picked = [rng.choice(m, size=q, replace=False) for m, q in zip(members, quotas)]
    return np.sort(np.concatenate(picked)) if picked else np.zeros(0, dtype=np.int64)


def grouped_ols(graph, y_attr, x_attrs, group_key="relatedness", sample=None, seed=DEFAULT_SEED):
    """Per-group OLS of ``y_attr`` on ``x_attrs``, optionally on a stratified sample.

    Returns ``{group: OlsResult}`` in group order.
    """
    x_attrs = tuple(x_attrs)
    present = graph.present((y_attr,) + x_attrs)
    labels = edge_groups(graph, group_key)
    if sample is not None:
        idx = stratified_sample(graph, group_key, sample, seed=seed, mask=present)
        sel = np.zeros(len(graph), dtype=bool)
        sel[idx] = True
    else:
        sel = present & (labels != None)  # noqa: E711
    out = {}
    y = graph.column(y_attr)
    xs = [graph.column(a) for a in x_attrs]
    for g in _group_order(labels[sel]):
        gs = sel & (labels == g)
        try:
            out[g] = ols([x[gs] for x in xs], y[gs], names=x_attrs)
        except RankDeficient as exc:
            log.warning("group %r skipped: %s", g, exc)
    return out


# -- communities ----------------------------------------------------------


def _local_moving(adj, degree, m2, eps=1e-12):
    """One Louvain level. Returns community label per node (0..n-1)."""
    n = len(adj)
    comm = list(range(n))
    tot = list(degree)
    improved = False
    changed = True
    passes = 0
    while changed and passes < 1000:
        changed = False
        passes += 1
        for i in range(n):
            ci = comm[i]
            ki = degree[i]
            links = {}
            for j, w in adj[i].items():
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[ci] -= ki
            best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * ki / m2
            stay_gain = best_gain
            for c in sorted(links):
                gain = links[c] - tot[c] * ki / m2
                if gain > best_gain + eps or (abs(gain - best_gain) <= eps and c < best):
                    best, best_gain = c, gain
            if best != ci and (best_gain > stay_gain + eps or best < ci):
                comm[i] = best
                changed = True
                improved = True
            else:
                best = ci
            tot[best] += ki
    return comm, improved


def _weights(nodes, distances):
    index = {x: i for i, x in enumerate(nodes)}
    adj = [dict() for _ in nodes]
    items = distances.items() if hasattr(distances, "items") else distances
    for (a, b), d in sorted(items):
        if a not in index or b not in index or a == b:
            continue
        w = 1.0 - min(max(float(d), 0.0), 1.0)
        if w > 0.0:
            i, j = index[a], index[b]
            adj[i][j] = w
            adj[j][i] = w
    return adj


def detect_communities(nodes, distances, seed=DEFAULT_SEED):
    """Greedy (Louvain-style) modularity communities on weights ``1 - distance``.

    Nodes are visited in sorted id order and ties go to the smaller
    community label, so the result is fully deterministic; ``seed`` is
    accepted for interface symmetry and recorded by callers. Returns
    ``{node_id: label}`` with labels numbered by first member.
    """
    nodes = sorted(set(nodes))
    adj = _weights(nodes, distances)
    degree = [sum(w * (2.0 if j == i else 1.0) for j, w in row.items()) for i, row in enumerate(adj)]
    m2 = sum(degree)
    membership = list(range(len(nodes)))
    if m2 == 0.0:
        return {x: i for i, x in enumerate(nodes)}
    while True:
        comm, improved = _local_moving(adj, degree, m2)
        if not improved:
            break
        # renumber communities by first member, then aggregate
        relabel = {}
        for c in comm:
            relabel.setdefault(c, len(relabel))
        comm = [relabel[c] for c in comm]
        membership = [comm[c] for c in membership]
        k = len(relabel)
        new_adj = [dict() for _ in range(k)]
        for i, row in enumerate(adj):
            ci = comm[i]
            for j, w in row.items():
                if j < i:
                    continue
                cj = comm[j]
                if j == i:
                    new_adj[ci][ci] = new_adj[ci].get(ci, 0.0) + w
                elif ci == cj:
                    new_adj[ci][ci] = new_adj[ci].get(ci, 0.0) + w
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
                    new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + w
        new_degree = [0.0] * k
        for i, c in enumerate(comm):
            new_degree[c] += degree[i]
        adj, degree = new_adj, new_degree
        if k == 1:
            break
    relabel = {}
    out = {}
    for x, c in zip(nodes, membership):
        out[x] = relabel.setdefault(c, len(relabel))
    return out


def modularity(nodes, distances, partition):
    """Weighted modularity of ``partition`` on weights ``1 - distance``."""
    nodes = sorted(set(nodes))
    adj = _weights(nodes, distances)
    degree = np.array([sum(row.values()) for row in adj])
    m2 = degree.sum()
    if m2 == 0:
        return 0.0
    q = 0.0
    labels = [partition[x] for x in nodes]
    for i, row in enumerate(adj):
        for j, w in row.items():
            if labels[i] == labels[j]:
                q += w
    for c in set(labels):
        s = degree[[i for i, lab in enumerate(labels) if lab == c]].sum()
        q -= s * s / m2
    return float(q / m2)


def adjusted_rand_index(p1, p2):
    """Adjusted Rand index of two partitions given as ``{node: label}``."""
    if set(p1) != set(p2):
        raise NodeSetMismatch("partitions cover different node sets")
    nodes = sorted(p1)
    n = len(nodes)
    if n < 2:
        return 1.0
    pairs = {}
    rows, cols = {}, {}
    for x in nodes:
        a, b = p1[x], p2[x]
        pairs[(a, b)] = pairs.get((a, b), 0) + 1
        rows[a] = rows.get(a, 0) + 1
        cols[b] = cols.get(b, 0) + 1
    c2 = lambda k: k * (k - 1) // 2
    index = sum(c2(v) for v in pairs.values())
    sum_a = sum(c2(v) for v in rows.values())
    sum_b = sum(c2(v) for v in cols.values())
    expected = Fraction(sum_a * sum_b, c2(n))
    maximum = Fraction(sum_a + sum_b, 2)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


@dataclass(frozen=True)
class FamilyAri:
    family: str
    n_languages: int
    sets: tuple
    ari: dict  # (set_a, set_b) -> ARI
    partitions: dict = field(repr=False, default_factory=dict)


def family_ari_report(graph, concept_sets, top_k_families=5, seed=DEFAULT_SEED, min_languages=4):
    """Pairwise ARIs between concept-set community structures, per family.

    For each of the ``top_k_families`` largest families, communities are
    detected on each concept set's semantic distances restricted to that
    family, and every pair of sets is compared.
    """
    concept_sets = tuple(concept_sets)
    if len(concept_sets) < 2:
        raise ValueError("need at least two concept-set attributes")
    for s in concept_sets:
        col = graph.column(s)
        if np.isnan(col).all():
            raise UnknownAttribute(f"attribute {s!r} has no values in this graph")
    counts = {}
    for r in graph.nodes:
        if r.family:
            counts[r.family] = counts.get(r.family, 0) + 1
    top = sorted(counts, key=lambda f: (-counts[f], f))[:top_k_families]
    family_of = np.array([r.family for r in graph.nodes], dtype=object)
    fa, fb = family_of[graph.ia], family_of[graph.ib]
    reports = []
    for fam in top:
        if counts[fam] < min_languages:
            log.warning("family %r has %d languages (< %d); skipped", fam, counts[fam], min_languages)
            continue
        members = [r.id for r in graph.nodes if r.family == fam]
        within = (fa == fam) & (fb == fam)
        parts = {}
        for s in concept_sets:
            col = graph.column(s)
            sel = within & ~np.isnan(col)
            idx = np.flatnonzero(sel)
            dist = {
                (graph.ids[graph.ia[k]], graph.ids[graph.ib[k]]): float(col[k]) for k in idx.tolist()
            }
            parts[s] = detect_communities(members, dist, seed=seed)
        ari = {(a, b): adjusted_rand_index(parts[a], parts[b]) for a, b in combinations(concept_sets, 2)}
        reports.append(FamilyAri(fam, counts[fam], concept_sets, ari, parts))
    if top and not reports:
        raise InsufficientLanguages(
            f"none of the {len(top)} largest families has {min_languages}+ languages"
        )
    return reports


# -- distributions --------------------------------------------------------


def distance_histograms(graph, attr, bins=64):
    """Per-relatedness-level histogram of ``attr`` over equal bins on [0, 1].

    Returns ``(edges, {level: counts})``.
    """
    col = graph.column(attr)
    ok = ~np.isnan(col)
    edges = np.linspace(0.0, 1.0, bins + 1)
    out = {}
    for lvl in LEVELS:
        sel = ok & (graph.relatedness == lvl.code)
        counts, _ = np.histogram(np.clip(col[sel], 0.0, 1.0), bins=edges)
        out[lvl.value] = counts
    return edges, out


__all__ = [
    "BetaResult",
    "CorrelationResult",
    "FamilyAri",
    "GROUP_KEYS",
    "OlsResult",
    "RelatednessLevel",
    "adjusted_rand_index",
    "allocate_quotas",
    "detect_communities",
    "distance_histograms",
    "edge_groups",
    "family_ari_report",
    "group_pearson",
    "grouped_ols",
    "grouped_standardized_beta",
    "modularity",
    "ols",
    "pearson",
    "standardized_beta",
    "stratified_sample",
    "zscore",
]

import itertools
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score

from colexgraph import stats
from colexgraph.errors import (
    DegenerateSeries,
    InsufficientLanguages,
    LengthMismatch,
    NodeSetMismatch,
    RankDeficient,
    SampleTooLarge,
    UnknownAttribute,
)
from colexgraph.graph import LanguageGraph, assemble
from colexgraph.pairtable import PairValueTable

from conftest import hierarchy_nodes, lang, sample_pairs_by_level


def brute_pearson(x, y):
    """Oracle: covariance over standard deviations, plain Python."""
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


# -- Pearson --------------------------------------------------------------


def test_pearson_hand_case():
    r = stats.pearson([1, 2, 3, 4], [1, 3, 2, 4])
    assert abs(r.r - 0.8) < 1e-9
    assert abs(r.r - brute_pearson([1, 2, 3, 4], [1, 3, 2, 4])) < 1e-12
    assert r.n == 4 and r.ci95[0] <= r.r <= r.ci95[1]


def test_pearson_perfect():
    x = np.linspace(-3, 7, 50)
    assert abs(stats.pearson(x, 2 * x).r - 1) < 1e-12
    assert abs(stats.pearson(x, -x).r + 1) < 1e-12
    assert stats.pearson(x, 2 * x).p_value < 1e-12


def test_pearson_p_matches_scipy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=40)
    y = x + rng.normal(size=40) * 3
    from scipy.stats import pearsonr
    ref = pearsonr(x, y)
    ours = stats.pearson(x, y)
    assert ours.r == pytest.approx(ref.statistic, abs=1e-12)
    assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_pearson_errors():
    with pytest.raises(DegenerateSeries):
        stats.pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(LengthMismatch):
        stats.pearson([1, 2, 3], [1, 2])
    with pytest.raises(DegenerateSeries):
        stats.pearson([1, 2], [1, 2])


@settings(max_examples=60)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=30),
       st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_affine_invariance(points, scale, shift):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    if x.std() < 1e-3 or y.std() < 1e-3:
        return
    r = stats.pearson(x, y).r
    assert abs(stats.pearson(x * scale + shift, y).r - r) < 1e-12 * max(1.0, scale)
    assert abs(r) <= 1.0


def _macroarea_graph(n_per_group, rho, rng):
    areas = ("Africa", "Eurasia", "Papunesia")
    nodes = [lang(f"m{i:04d}", macroarea=areas[i % 3]) for i in range(300)]
    ids = [r.id for r in nodes]
    ia, ib = np.triu_indices(len(nodes), 1)
    area = np.arange(300) % 3
    same = area[ia] == area[ib]
    groups = [np.flatnonzero(same & (area[ia] == g)) for g in range(3)] + [np.flatnonzero(~same)]
    idx = np.sort(np.concatenate([rng.choice(g, n_per_group, replace=False) for g in groups]))
    x = rng.normal(size=idx.size)
    y = rho * x + math.sqrt(1 - rho**2) * rng.normal(size=idx.size)
    tx = PairValueTable(ids, ia[idx], ib[idx], 1 / (1 + np.exp(-x)), (0, 1))
    ty = PairValueTable(ids, ia[idx], ib[idx], 1 / (1 + np.exp(-y)), (0, 1))
    return assemble(nodes, {"nuclear": tx, "phon": ty})


def test_group_pearson_macroareas():
    g = _macroarea_graph(1000, 0.5, np.random.default_rng(1))
    res = stats.group_pearson(g, "nuclear", "phon", "macroarea")
    assert [r.group for r in res] == ["Africa", "Eurasia", "Papunesia", "cross"]
    for r in res:
        assert r.n == 1000 and r.r > 0 and r.p_value < 0.001
    (cross,) = stats.group_pearson(g, "nuclear", "phon", "cross")
    assert cross.group == "cross" and cross.n == 1000


def test_group_pearson_small_group_omitted(caplog):
    nodes = [lang("a", macroarea="X"), lang("b", macroarea="X"), lang("c", macroarea="Y"),
             lang("d", macroarea="Y"), lang("e", macroarea="Y")]
    vals = {("a", "b"): 0.1, ("c", "d"): 0.2, ("c", "e"): 0.4, ("d", "e"): 0.3,
            ("a", "c"): 0.5, ("a", "d"): 0.6, ("b", "e"): 0.9}
    t = PairValueTable.from_pairs(vals, (0, 1))
    g = assemble(nodes, {"nuclear": t, "phon": t})
    with caplog.at_level(logging.WARNING):
        res = stats.group_pearson(g, "nuclear", "phon")
    assert [r.group for r in res] == ["Y", "cross"]
    assert res[0].r == pytest.approx(1.0)
    assert "omitted" in caplog.text
    with pytest.raises(UnknownAttribute):
        stats.group_pearson(g, "nuclear", "colour")


# -- OLS ------------------------------------------------------------------


def test_ols_exact_fit():
    x = np.arange(10.0)
    fit = stats.ols([x], 3 + 2 * x, names=["x"])
    assert fit["intercept"] == pytest.approx(3, abs=1e-9)
    assert fit["x"] == pytest.approx(2, abs=1e-9)


def test_ols_rank_deficient():
    x = np.arange(10.0)
    with pytest.raises(RankDeficient):
        stats.ols([x, x], x)
    with pytest.raises(RankDeficient):
        stats.ols([x[:2]], x[:2])


def test_ols_planted_and_orthogonal_residuals():
    rng = np.random.default_rng(5)
    x1, x2 = rng.normal(size=10_000), rng.normal(size=10_000)
    y = 0.5 * x1 - 0.2 * x2 + rng.normal(scale=0.01, size=10_000)
    fit = stats.ols([x1, x2], y, names=["x1", "x2"])
    assert abs(fit["x1"] - 0.5) < 0.01 and abs(fit["x2"] + 0.2) < 0.01
    X = np.column_stack([np.ones(10_000), x1, x2])
    assert np.all(np.abs(X.T @ fit.residuals) < 1e-9)
    assert np.all(fit.ci95[:, 0] <= fit.coef) and np.all(fit.coef <= fit.ci95[:, 1])


def test_ols_matches_lstsq_se():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(50, 2))
    y = x @ [1.0, -1.0] + rng.normal(size=50)
    fit = stats.ols(x, y)
    X = np.column_stack([np.ones(50), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    cov = np.linalg.inv(X.T @ X) * (resid @ resid) / (50 - 3)
    assert np.allclose(fit.coef, coef, atol=1e-12)
    assert np.allclose(fit.se, np.sqrt(np.diag(cov)), rtol=1e-9)


# -- standardized betas ---------------------------------------------------


def test_self_beta_is_one():
    rng = np.random.default_rng(2)
    v = rng.normal(size=500)
    groups = np.array(["lower", "unrelated"] * 250, dtype=object)
    for b in stats.grouped_standardized_beta(v, v, groups=groups):
        assert abs(b.beta - 1) < 1e-9


def _planted_graph(rng, betas, n_per_level=2000, control=0.0):
    nodes = hierarchy_nodes()
    ia, ib, code = sample_pairs_by_level(nodes, n_per_level, rng)
    x = rng.normal(size=ia.size)
    c = rng.normal(size=ia.size)
    beta = np.asarray(betas)[code]
    noise = np.sqrt(1 - beta**2 - control**2)
    y = beta * x + control * c + noise * rng.normal(size=ia.size)
    cols = {"nuclear": y, "phon": x, "geo_dist": c}
    return LanguageGraph(nodes, ia, ib, cols)


def test_planted_group_betas():
    g = _planted_graph(np.random.default_rng(3), [0.6, 0.4, 0.25, 0.1], control=0.3)
    res = stats.standardized_beta(g, "nuclear", "phon", ["geo_dist"])
    assert [b.group for b in res] == ["lower", "mid", "higher", "unrelated", "mean"]
    for b, planted in zip(res, [0.6, 0.4, 0.25, 0.1, 0.3375]):
        assert abs(b.beta - planted) < 0.05
        assert b.ci95[0] <= b.beta <= b.ci95[1]
    assert res[-1].beta == pytest.approx(np.mean([b.beta for b in res[:4]]))


def test_independent_beta_near_zero():
    g = _planted_graph(np.random.default_rng(4), [0, 0, 0, 0], n_per_level=2500)
    (b,) = stats.standardized_beta(g, "nuclear", "phon", by_relatedness=False)
    assert b.group == "all" and abs(b.beta) < 0.02 and b.n == 10_000


def test_degenerate_group_skipped(caplog):
    v = np.arange(8.0)
    groups = np.array(["lower"] * 4 + ["unrelated"] * 4, dtype=object)
    pred = np.r_[v[:4], np.ones(4)]
    with caplog.at_level(logging.WARNING):
        res = stats.grouped_standardized_beta(v, pred, groups=groups)
    assert [b.group for b in res] == ["lower"]
    with pytest.raises(RankDeficient):
        stats.grouped_standardized_beta(v, np.r_[np.ones(4), np.full(4, 2.0)], groups=groups)


# -- sampling -------------------------------------------------------------


def test_quotas():
    assert stats.allocate_quotas([997, 3], 4) == [3, 1]
    assert stats.allocate_quotas([100, 100], 10) == [5, 5]
    assert stats.allocate_quotas([5, 0, 5], 3) in ([2, 0, 1],)
    with pytest.raises(SampleTooLarge):
        stats.allocate_quotas([1, 2], 4)


def hamilton_oracle(sizes, total):
    """Textbook largest-remainder seats with exact rational shares."""
    from fractions import Fraction

    pop = sum(sizes)
    share = [Fraction(total * s, pop) for s in sizes]
    seats = [int(x) for x in share]
    order = sorted(range(len(sizes)), key=lambda i: (-(share[i] - seats[i]), i))
    for i in order[: total - sum(seats)]:
        seats[i] += 1
    return seats


@settings(max_examples=200)
@given(st.lists(st.integers(0, 500), min_size=1, max_size=8), st.data())
def test_quota_properties(sizes, data):
    if sum(sizes) == 0:
        return
    total = data.draw(st.integers(0, sum(sizes)))
    q = stats.allocate_quotas(sizes, total)
    assert sum(q) == total
    assert all(0 <= a <= s for a, s in zip(q, sizes))
    nonempty = [i for i, s in enumerate(sizes) if s]
    if total >= len(nonempty):
        assert all(q[i] >= 1 for i in nonempty)
    plain = hamilton_oracle(sizes, total)
    if all(plain[i] >= 1 for i in nonempty) or total < len(nonempty):
        assert q == plain


def test_stratified_sample_deterministic():
    g = _planted_graph(np.random.default_rng(6), [0.1] * 4, n_per_level=100)
    a = stats.stratified_sample(g, "relatedness", 40, seed=7)
    b = stats.stratified_sample(g, "relatedness", 40, seed=7)
    c = stats.stratified_sample(g, "relatedness", 40, seed=8)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert a.size == 40 and np.unique(a).size == 40
    assert np.bincount(g.relatedness[a], minlength=4).tolist() == [10, 10, 10, 10]
    with pytest.raises(SampleTooLarge):
        stats.stratified_sample(g, "relatedness", 401)


def test_grouped_ols_recovers():
    rng = np.random.default_rng(11)
    g = _planted_graph(rng, [0.6, 0.4, 0.25, 0.1], n_per_level=3000)
    fits = stats.grouped_ols(g, "nuclear", ["phon"], sample=4000, seed=1)
    assert list(fits) == ["lower", "mid", "higher", "unrelated"]
    for fit, planted in zip(fits.values(), [0.6, 0.4, 0.25, 0.1]):
        assert fit.n == 1000
        assert abs(fit["phon"] - planted) < 0.1


# -- communities and ARI --------------------------------------------------


def _two_cliques():
    left, right = [f"a{i}" for i in range(5)], [f"b{i}" for i in range(5)]
    dist = {}
    for grp in (left, right):
        for x, y in itertools.combinations(grp, 2):
            dist[(x, y)] = 0.1
    dist[("a4", "b0")] = 0.95
    return left + right, dist


def test_two_cliques_match_enumeration_oracle():
    nodes, dist = _two_cliques()
    best, best_q = None, -1.0
    for mask in range(1, 2 ** (len(nodes) - 1)):
        part = {x: (mask >> i) & 1 for i, x in enumerate(nodes)}
        q = stats.modularity(nodes, dist, part)
        if q > best_q:
            best, best_q = part, q
    found = stats.detect_communities(nodes, dist)
    assert stats.adjusted_rand_index(found, best) == 1.0
    assert {found[x] for x in nodes[:5]} == {0} and {found[x] for x in nodes[5:]} == {1}
    assert stats.modularity(nodes, dist, found) == pytest.approx(best_q)


def test_communities_trivial_cases():
    assert stats.detect_communities(["c", "a", "b"], {}) == {"a": 0, "b": 1, "c": 2}
    clique = {(x, y): 0.2 for x, y in itertools.combinations("abcd", 2)}
    assert set(stats.detect_communities(list("abcd"), clique).values()) == {0}


def test_communities_deterministic():
    rng = np.random.default_rng(0)
    nodes = [f"n{i:02d}" for i in range(40)]
    dist = {(a, b): float(rng.random()) for a, b in itertools.combinations(nodes, 2) if rng.random() < 0.3}
    first = stats.detect_communities(nodes, dist)
    assert all(stats.detect_communities(list(reversed(nodes)), dict(reversed(list(dist.items())))) == first
               for _ in range(3))


def test_ari_examples():
    p = {"a": 0, "b": 0, "c": 1, "d": 1, "e": 2}
    assert stats.adjusted_rand_index(p, p) == 1.0
    relabeled = {k: {0: "x", 1: "y", 2: "z"}[v] for k, v in p.items()}
    assert stats.adjusted_rand_index(p, relabeled) == 1.0
    with pytest.raises(NodeSetMismatch):
        stats.adjusted_rand_index(p, {"a": 0})


@pytest.mark.parametrize("seed", range(20))
def test_ari_chance_level(seed):
    rng = np.random.default_rng(seed)
    nodes = range(1000)
    p1 = dict(zip(nodes, rng.integers(0, 4, 1000).tolist()))
    p2 = dict(zip(nodes, rng.integers(0, 4, 1000).tolist()))
    assert abs(stats.adjusted_rand_index(p1, p2)) < 0.05


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=2, max_size=40))
def test_ari_matches_sklearn_and_symmetric(labels):
    p1 = {i: a for i, (a, _) in enumerate(labels)}
    p2 = {i: b for i, (_, b) in enumerate(labels)}
    ours = stats.adjusted_rand_index(p1, p2)
    assert ours == pytest.approx(adjusted_rand_score([a for a, _ in labels], [b for _, b in labels]), abs=1e-12)
    assert ours == stats.adjusted_rand_index(p2, p1)


def _family_graph(rng, sizes):
    nodes = []
    for f, size in enumerate(sizes):
        nodes += [lang(f"f{f}_{i:02d}", family=f"Fam{f}") for i in range(size)]
    ids = sorted(r.id for r in nodes)
    ia, ib = np.triu_indices(len(ids), 1)
    # two latent clusters inside every family
    half = np.array([int(x.split("_")[1]) % 2 for x in ids])
    base = np.where(half[ia] == half[ib], 0.1, 0.9) + rng.uniform(0, 0.05, ia.size)
    t = PairValueTable(ids, ia, ib, np.clip(base, 0, 1), (0, 1))
    noise = PairValueTable(ids, ia, ib, rng.uniform(0, 1, ia.size), (0, 1))
    return assemble(nodes, {"nuclear": t, "non-nuclear": t, "random": noise})


def test_family_ari_report():
    g = _family_graph(np.random.default_rng(0), [12, 10, 9, 8, 7, 6])
    reps = stats.family_ari_report(g, ["nuclear", "non-nuclear"], top_k_families=5)
    assert [r.family for r in reps] == ["Fam0", "Fam1", "Fam2", "Fam3", "Fam4"]
    assert all(r.ari[("nuclear", "non-nuclear")] == 1.0 for r in reps)


def test_family_ari_random_attribute_near_zero():
    g = _family_graph(np.random.default_rng(1), [60, 60])
    reps = stats.family_ari_report(g, ["nuclear", "random"], top_k_families=2)
    assert np.mean([abs(r.ari[("nuclear", "random")]) for r in reps]) < 0.2


def test_family_ari_small_families(caplog):
    g = _family_graph(np.random.default_rng(2), [5, 3])
    with caplog.at_level(logging.WARNING):
        reps = stats.family_ari_report(g, ["nuclear", "non-nuclear"], top_k_families=2)
    assert [r.family for r in reps] == ["Fam0"] and "skipped" in caplog.text
    g = _family_graph(np.random.default_rng(2), [3, 3])
    with pytest.raises(InsufficientLanguages):
        stats.family_ari_report(g, ["nuclear", "non-nuclear"])


# -- histograms -----------------------------------------------------------


def test_histogram_uniform_chi_square():
    from scipy.stats import chi2

    rng = np.random.default_rng(0)
    nodes = [lang(f"u{i:03d}") for i in range(200)]
    ids = [r.id for r in nodes]
    ia, ib = np.triu_indices(200, 1)
    g = assemble(nodes, {"phon": PairValueTable(ids, ia, ib, rng.uniform(0, 1, ia.size), (0, 1))})
    edges, hist = stats.distance_histograms(g, "phon")
    assert edges.size == 65 and edges[0] == 0 and edges[-1] == 1
    counts = hist["unrelated"]
    assert counts.sum() == ia.size and hist["lower"].sum() == 0
    expected = ia.size / 64
    chi = float(((counts - expected) ** 2 / expected).sum())
    assert chi < chi2.ppf(0.999, 63)


def test_histogram_constant_and_unknown():
    nodes = [lang(x) for x in "abcd"]
    t = PairValueTable.from_pairs({(a, b): 0.5 for a, b in itertools.combinations("abcd", 2)})
    g = assemble(nodes, {"phon": t})
    _, hist = stats.distance_histograms(g, "phon")
    assert np.count_nonzero(hist["unrelated"]) == 1
    with pytest.raises(UnknownAttribute):
        stats.distance_histograms(g, "colour")

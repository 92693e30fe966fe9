"""Seeded synthetic worlds: languages, colexifications, ratings, word lists.

Genealogy drives everything. Languages in the same branch share more
colexification patterns, more similar word forms and more syntactic
features than unrelated ones, and family members sit close together on
the map. The generator is deterministic for a given seed.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .concepts import BUILTIN_SETS, builtin_set
from .ingest import (
    ColexRecord,
    LanguageRecord,
    RatingRecord,
    WordlistEntry,
    write_colex,
    write_languages,
    write_pair_matrix,
    write_ratings,
    write_wordlists,
)
from .pairtable import PairValueTable

MACROAREAS = ("Africa", "Eurasia", "Papunesia", "Australia", "North America", "South America")
SOUND_CLASSES = "pbfvmwtdszcnrlSCjykgxNqhLieEauo"
VOWELS = "ieEauo"


@dataclass(frozen=True)
class World:
    languages: tuple
    colex: tuple
    ratings: tuple
    wordlists: tuple
    syntactic: PairValueTable


def _word(rng, lo=3, hi=7):
    n = int(rng.integers(lo, hi))
    return "".join(
        rng.choice(list(VOWELS if i % 2 else SOUND_CLASSES)) for i in range(n)
    )


def _mutate(rng, word, edits):
    w = list(word)
    for _ in range(edits):
        op = rng.integers(3)
        pos = int(rng.integers(len(w)))
        sym = str(rng.choice(list(SOUND_CLASSES)))
        if op == 0:
            w[pos] = sym
        elif op == 1:
            w.insert(pos, sym)
        elif len(w) > 2:
            del w[pos]
    return "".join(w)


def _genealogy(rng, n, n_families, isolate_share=0.05):
    """Family/genus/branch labels for n languages."""
    fam_weights = rng.dirichlet(np.full(n_families, 2.0))
    out = []
    for i in range(n):
        if rng.random() < isolate_share:
            out.append(("", "", ""))
            continue
        f = int(rng.choice(n_families, p=fam_weights))
        g = int(rng.integers(3))
        b = int(rng.integers(2))
        out.append((f"Fam{f:02d}", f"Fam{f:02d}-g{g}", f"Fam{f:02d}-g{g}-b{b}"))
    return out


def make_world(n_languages=20, n_patterns=150, seed=42, n_families=4,
               missing_coordinates=0, n_rated=120, density=0.08):
    """Generate a world. ``density`` is the mean share of patterns a language attests."""
    rng = np.random.default_rng(seed)
    n_families = max(1, min(n_families, n_languages))
    genealogy = _genealogy(rng, n_languages, n_families)

    fam_names = sorted({g[0] for g in genealogy if g[0]})
    fam_center = {
        f: (float(rng.uniform(-45, 60)), float(rng.uniform(-170, 170))) for f in fam_names
    }
    fam_area = {f: MACROAREAS[int(rng.integers(len(MACROAREAS)))] for f in fam_names}

    # classification paths: family > genus > branch > 0-2 random sub-clades
    subclades = []
    for fam, genus, branch in genealogy:
        path = tuple(x for x in (fam, genus, branch) if x)
        if fam:
            for depth in range(int(rng.integers(3))):
                path = path + (f"{path[-1]}.{int(rng.integers(2))}",)
        subclades.append(path)

    ids = [f"lang{i:04d}" for i in range(n_languages)]
    no_coords = set(rng.choice(n_languages, size=missing_coordinates, replace=False).tolist())
    languages = []
    for i, (fam, genus, branch) in enumerate(genealogy):
        if fam:
            clat, clon = fam_center[fam]
            area = fam_area[fam]
        else:
            clat, clon = float(rng.uniform(-45, 60)), float(rng.uniform(-170, 170))
            area = MACROAREAS[int(rng.integers(len(MACROAREAS)))]
        lat = lon = None
        if i not in no_coords:
            lat = round(float(np.clip(clat + rng.normal(0, 4), -89, 89)), 4)
            lon = round(float(np.clip(clon + rng.normal(0, 6), -179, 179)), 4)
        languages.append(
            LanguageRecord(
                id=ids[i],
                name=f"Language {i}",
                family=fam,
                genus=genus,
                parent=branch,
                branch=branch,
                macroarea=area,
                area=area,
                latitude=lat,
                longitude=lon,
                classification=subclades[i],
            )
        )

    # concept vocabulary: the bundled sets plus rated lemmas and fillers
    builtin = [c for name in BUILTIN_SETS for c in builtin_set(name)]
    rated = [f"lemma{i:03d}" for i in range(n_rated)]
    fillers = [f"concept{i:04d}" for i in range(max(50, n_patterns // 10))]
    vocab = builtin + rated + fillers

    patterns = set()
    half = len(rated) // 2
    while len(patterns) < n_patterns:
        u = rng.random()
        if u < 0.5:
            a = builtin[int(rng.integers(len(builtin)))]
            b = vocab[int(rng.integers(len(vocab)))]
        elif u < 0.75:
            # pairs within the concrete-ish or abstract-ish half of the rated lemmas
            block = rated[:half] if rng.random() < 0.5 else rated[half:]
            a, b = (block[int(i)] for i in rng.choice(len(block), 2, replace=False))
        else:
            a, b = (vocab[int(i)] for i in rng.choice(len(vocab), 2, replace=False))
        if a != b:
            patterns.add((min(a, b), max(a, b)))
    patterns = sorted(patterns)
    m = len(patterns)

    # attestation probability: pattern base rate shifted by family and branch effects
    base = np.log(density / (1 - density)) + rng.normal(0, 1.0, m)
    group_keys = {}
    for fam, genus, branch in genealogy:
        for key in (fam, branch):
            if key and key not in group_keys:
                group_keys[key] = rng.normal(0, 1.2, m)
    logits = np.empty((n_languages, m))
    for i, (fam, genus, branch) in enumerate(genealogy):
        logit = base + rng.normal(0, 0.6, m)
        if fam:
            logit = logit + group_keys[fam] + group_keys[branch]
        logits[i] = logit
    attested = rng.random((n_languages, m)) < 1 / (1 + np.exp(-logits))
    # every pattern attested at least once
    for j in np.flatnonzero(~attested.any(axis=0)):
        attested[int(rng.integers(n_languages)), j] = True
    rate = np.exp(rng.normal(3.0, 1.0, m))
    colex = []
    for i, j in zip(*np.nonzero(attested)):
        freq = 1 + int(rng.poisson(rate[j] * np.exp(rng.normal(0, 0.5))))
        a, b = patterns[j]
        if freq >= 2 and rng.random() < 0.3:
            k = int(rng.integers(1, freq))
            forms = ((f"f{j}x", k), (f"f{j}y", freq - k))
        else:
            forms = ()
        colex.append(ColexRecord(a, b, ids[i], freq, forms))

    ratings = []
    for k, lemma in enumerate(rated):
        if k < half:
            conc = float(rng.uniform(3.6, 5.0))
        else:
            conc = float(rng.uniform(1.0, 3.4))
        vad = rng.uniform(1, 9, 3)
        if rng.random() < 0.45:
            lo = rng.random() < 0.5
            vad = rng.uniform(1, 3.9, 3) if lo else rng.uniform(6.1, 9, 3)
        vals = [round(float(v), 2) for v in vad]
        if rng.random() < 0.05:
            vals[int(rng.integers(3))] = None
        ratings.append(RatingRecord(lemma, round(conc, 2), *vals))

    wordlists = []
    nuclear = list(builtin_set("nuclear"))
    proto = {f: {c: _word(rng) for c in nuclear} for f in fam_names}
    branch_forms = {}
    for i, (fam, genus, branch) in enumerate(genealogy):
        for c in nuclear:
            if rng.random() < 0.08:
                continue
            if fam:
                key = (branch, c)
                if key not in branch_forms:
                    branch_forms[key] = _mutate(rng, proto[fam][c], int(rng.integers(1, 3)))
                form = _mutate(rng, branch_forms[key], int(rng.integers(0, 2)))
            else:
                form = _word(rng)
            wordlists.append(WordlistEntry(ids[i], c, form))
            if rng.random() < 0.05:
                wordlists.append(WordlistEntry(ids[i], c, _mutate(rng, form, 2)))

    # syntactic distances: Hamming over inherited binary features
    n_feat = 40
    feats = np.empty((n_languages, n_feat), dtype=bool)
    fam_feat = {f: rng.random(n_feat) < 0.5 for f in fam_names}
    for i, (fam, _, _) in enumerate(genealogy):
        src = fam_feat[fam] if fam else rng.random(n_feat) < 0.5
        flip = rng.random(n_feat) < 0.15
        feats[i] = src ^ flip
    ia, ib = np.triu_indices(n_languages, 1)
    ham = (feats[ia] != feats[ib]).mean(axis=1)
    syntactic = PairValueTable(ids, ia, ib, ham, (0.0, 1.0), _checked=True)

    return World(tuple(languages), tuple(colex), tuple(ratings), tuple(wordlists), syntactic)


def write_world(world, directory, extra_config=None):
    """Write a world's files and a matching ``config.json`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_languages(world.languages, d / "languages.tsv")
    write_colex(world.colex, d / "colex.tsv")
    write_ratings(world.ratings, d / "ratings.csv")
    write_wordlists(world.wordlists, d / "wordlists.tsv")
    write_pair_matrix(world.syntactic, d / "syntactic.tsv")
    config = {
        "languages": "languages.tsv",
        "colex": "colex.tsv",
        "ratings": "ratings.csv",
        "wordlists": "wordlists.tsv",
        "syntactic": "syntactic.tsv",
        "out_dir": "out",
        "seed": 42,
    }
    config.update(extra_config or {})
    with open(d / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return d / "config.json"

import shutil
from importlib import resources
from pathlib import Path

import pytest

from colexgraph.ingest import ColexRecord, LanguageRecord

# Four patterns over five languages; columns in the order the frequencies are listed.
WORKED_PATTERNS = [("language", "tongue"), ("eye", "look"), ("tree", "wood"), ("knee", "kneel")]
WORKED_ROWS = {
    "Russian": [163, 264, 228, 42],
    "Polish": [169, 0, 251, 0],
    "Danish": [162, 0, 244, 0],
    "German": [152, 0, 0, 0],
    "Dutch": [158, 0, 0, 0],
}


@pytest.fixture
def worked_example():
    records = []
    for lang, freqs in WORKED_ROWS.items():
        for (a, b), f in zip(WORKED_PATTERNS, freqs):
            if f:
                records.append(ColexRecord(a, b, lang, f))
    return tuple(records)


def lang(id, family="", genus="", branch="", lat=None, lon=None, macroarea="", classification=()):
    return LanguageRecord(
        id=id, name=id, family=family, genus=genus, parent=branch, branch=branch,
        macroarea=macroarea, area=macroarea, latitude=lat, longitude=lon,
        classification=tuple(classification),
    )


@pytest.fixture
def make_lang():
    return lang


@pytest.fixture
def world20(tmp_path):
    """Copy of the bundled 20-language fixture world in a scratch directory."""
    src = resources.files("colexgraph.data.fixtures").joinpath("world20")
    dst = tmp_path / "world20"
    with resources.as_file(src) as p:
        shutil.copytree(Path(p), dst)
    return dst


def hierarchy_nodes(families=2, genera=2, branches=5, per_branch=35, macroareas=("Eurasia",)):
    """Languages on a regular family > genus > branch tree."""
    nodes = []
    k = 0
    for f in range(families):
        for g in range(genera):
            for b in range(branches):
                for _ in range(per_branch):
                    fam, gen, br = f"F{f}", f"F{f}G{g}", f"F{f}G{g}B{b}"
                    nodes.append(lang(f"x{k:05d}", fam, gen, br,
                                      macroarea=macroareas[k % len(macroareas)],
                                      classification=(fam, gen, br)))
                    k += 1
    return nodes


def sample_pairs_by_level(nodes, n_per_level, rng):
    """Index pairs (ia < ib) with ``n_per_level`` pairs at each relatedness level."""
    import numpy as np

    from colexgraph.graph import LEVELS, relatedness_level

    n = len(nodes)
    ia, ib = np.triu_indices(n, 1)
    fam = np.array([r.family for r in nodes])
    gen = np.array([r.genus for r in nodes])
    br = np.array([r.branch for r in nodes])
    code = np.full(ia.size, 3)
    code[fam[ia] == fam[ib]] = 2
    code[gen[ia] == gen[ib]] = 1
    code[br[ia] == br[ib]] = 0
    picked = []
    for lvl in range(len(LEVELS)):
        pool = np.flatnonzero(code == lvl)
        picked.append(np.sort(rng.choice(pool, n_per_level, replace=False)))
    idx = np.sort(np.concatenate(picked))
    a, b = ia[idx], ib[idx]
    assert relatedness_level(nodes[a[0]], nodes[b[0]]).code == code[idx[0]]
    return a, b, code[idx]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

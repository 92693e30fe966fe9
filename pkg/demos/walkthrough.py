"""Walk through a small synthetic world from raw files to statistics.

Run with ``python3 demos/walkthrough.py [workdir]``. Everything is seeded, so
the printed numbers are the same on every run.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from colexgraph import graph, stats, synth
from colexgraph.pipeline import BuildConfig, run_build


def main(workdir=None):
    workdir = Path(workdir or tempfile.mkdtemp(prefix="colexgraph-demo-"))

    # 1. a 60-language world in 6 families, a few languages without coordinates
    world = synth.make_world(60, n_patterns=600, seed=5, n_families=6, missing_coordinates=4)
    config_path = synth.write_world(world, workdir / "world")
    print(f"wrote {len(world.languages)} languages, {len(world.colex)} colexification rows to {config_path.parent}")

    # 2. build the graph; the report says what was computed and what was left out
    config = BuildConfig.from_file(config_path)
    config.threads = 4
    g, report, written = run_build(config)
    print(f"\ngraph: {len(g.nodes)} nodes, {len(g)} edges -> {written['json']}")
    for name, info in report["attributes"].items():
        print(f"  {name:<14} {info}")
    print("  excluded:", {k: (len(v) if isinstance(v, (list, dict)) else v) for k, v in report["exclusions"].items()})

    # 3. how do the distances look inside and across relatedness levels?
    print("\nmean distance by relatedness level")
    rel = g.relatedness
    for attr in ("nuclear", "phon", "genetic", "geo_dist"):
        col = g.columns[attr]
        means = []
        for lvl in graph.LEVELS:
            vals = col[(rel == lvl.code) & ~np.isnan(col)]
            means.append(f"{lvl.value}={vals.mean():.3f}" if vals.size else f"{lvl.value}=NA")
        print(f"  {attr:<9} " + "  ".join(means))

    # 4. semantic vs phonological distance, per macroarea and across areas
    print("\nPearson r(nuclear, phon) by macroarea")
    for r in stats.group_pearson(g, "nuclear", "phon", group_key="macroarea"):
        print(f"  {r.group:<14} r={r.r:+.3f}  95% CI [{r.ci95[0]:+.3f}, {r.ci95[1]:+.3f}]  n={r.n}")

    # 5. does phonological distance still predict semantic distance once geography is controlled?
    print("\nstandardised beta of phon on nuclear, controlling for geo_dist and contact_dist")
    for b in stats.standardized_beta(g, "nuclear", "phon", ["geo_dist", "contact_dist"]):
        print(f"  {b.group:<10} beta={b.beta:+.3f}  p={b.p_value:.2g}  n={b.n}")

    # 6. do communities in the semantic graphs of one family agree across concept sets?
    print("\nARI between concept-set communities in the largest families")
    for rep in stats.family_ari_report(g, ["nuclear", "non-nuclear", "emotion", "random"], top_k_families=3):
        pairs = ", ".join(f"{a}/{b}={v:.2f}" for (a, b), v in rep.ari.items())
        print(f"  {rep.family} ({rep.n_languages} languages): {pairs}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)

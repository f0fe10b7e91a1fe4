"""How much of the hybrid's result comes from the annealer seed?

For each suite dataset, compares the seeded GA against the same GA started
from a random population for the same number of generations, and prints the
generation-0 and final best fitness of both (means over runs).

    python3 scripts/seeding_ablation.py [--runs 5] [--generations 100]
"""

import argparse

import numpy as np

from evcp.bench import paper_suite, suite_entries
from evcp.genetic import GaConfig
from evcp.hybrid import solve


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--generations", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args(argv)

    print(f"{'dataset':<26}{'seeded g0':>11}{'seeded end':>12}{'random g0':>11}{'random end':>12}")
    for e in suite_entries(paper_suite(a.seed)):
        hy = solve(e.instance, "hybrid", runs=a.runs, seed=a.seed, seeded_generations=a.generations)
        ga = solve(e.instance, "ga", runs=a.runs, seed=a.seed, ga_cfg=GaConfig(generations=a.generations))
        cols = []
        for res in (hy, ga):
            h = np.array([r.best_fitness_per_generation for r in res.histories])
            cols += [h[:, 0].mean(), h[:, -1].mean()]
        print(f"{e.label:<26}" + "".join(f"{v:>11.3f} " for v in cols))


if __name__ == "__main__":
    main()

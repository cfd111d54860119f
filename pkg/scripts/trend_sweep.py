"""Unique satisficing solutions found at 80..95% of the best known value.

For each generated instance a long optimizing walk fixes the best known value,
then one goal-seeking run per percentage counts distinct hits.  Prints CSV.

    python scripts/trend_sweep.py --instances 10 --n 100
"""

import argparse
import time

from scipy.stats import spearmanr

from goalqubo.instances import GeneratorSpec, generate
from goalqubo.metrics import diversity_report
from goalqubo.qubo_core import MAXIMIZE
from goalqubo.tabu_search import SolverConfig, optimize, run
from goalqubo.targets import Exact, target_from_pct


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--density", type=float, default=0.1)
    ap.add_argument("--pre-iters", type=int, default=10**6)
    ap.add_argument("--iters", type=int, default=10**5)
    ap.add_argument("--pcts", type=float, nargs="+", default=[0.80, 0.85, 0.90, 0.95])
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args()

    print("instance,bks,pct,target,unique,mean_hamming,seconds")
    for s in range(args.instances):
        inst = generate(GeneratorSpec(args.n, args.density, seed=args.seed + s), MAXIMIZE, f"g{s}")
        _, bks = optimize(inst, SolverConfig(iter_limit=args.pre_iters, seed=s))
        counts = []
        for p in args.pcts:
            t = target_from_pct(bks, p)
            t0 = time.perf_counter()
            S = run(inst, Exact(t), SolverConfig(iter_limit=args.iters, seed=s), ordering="found")
            dt = time.perf_counter() - t0
            div = f"{float(diversity_report(S).mean_hamming):.3f}" if len(S) > 1 else ""
            counts.append(len(S))
            print(f"g{s},{bks},{p},{t},{len(S)},{div},{dt:.2f}")
        rho = spearmanr(args.pcts, counts).statistic
        print(f"# g{s} spearman(count, pct) = {rho:+.3f}")


if __name__ == "__main__":
    main()

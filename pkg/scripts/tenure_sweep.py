"""Hit rate and unique-solution counts against tabu tenure and tenure policy.

Uses small instances with targets drawn as f(x*) for random x*, so every
target is attainable; soundness is re-checked against exhaustive enumeration.

    python scripts/tenure_sweep.py --instances 200 --tenures 2 5 10 20
"""

import argparse

import numpy as np

from goalqubo.instances import GeneratorSpec, generate
from goalqubo.oracle import enumerate_satisficing
from goalqubo.qubo_core import BitVector, evaluate
from goalqubo.tabu_search import TENURE_POLICIES, SolverConfig, run
from goalqubo.targets import Exact


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--n-min", type=int, default=8)
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--iters", type=int, default=10**5)
    ap.add_argument("--tenures", type=int, nargs="+", default=[2, 5, 10, 20])
    ap.add_argument("--aspiration", action="store_true")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    corpus = []
    for k in range(args.instances):
        n = int(rng.integers(args.n_min, args.n_max + 1))
        inst = generate(GeneratorSpec(n, 0.5, -100, 100, seed=k))
        t = evaluate(inst, BitVector(n, int(rng.integers(0, 2**n))))
        corpus.append((inst, Exact(t), enumerate_satisficing(inst, Exact(t)).patterns()))

    print("policy,tenure,hits,instances,mean_found_fraction,unsound")
    for policy in TENURE_POLICIES:
        for tenure in args.tenures:
            hits = unsound = 0
            frac = []
            for k, (inst, target, truth) in enumerate(corpus):
                cfg = SolverConfig(tenure=tenure, iter_limit=args.iters, seed=k,
                                   aspiration=args.aspiration, tenure_policy=policy)
                found = run(inst, target, cfg).patterns()
                hits += bool(found)
                unsound += len(found - truth)
                frac.append(len(found) / len(truth))
            print(f"{policy},{tenure},{hits},{len(corpus)},{np.mean(frac):.4f},{unsound}")


if __name__ == "__main__":
    main()

"""Local-optima estimates against exhaustive counts, plus tail-bound violations.

    python scripts/landscape_profile.py --n 16 --ls 1 2 3 4 5 6 --instances 5
"""

import argparse

import mpmath

from goalqubo.instances import GeneratorSpec, generate
from goalqubo.landscape import ball_size, bound_violations, estimate_binomial, estimate_closed_form
from goalqubo.oracle import count_local_optima


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--ls", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--density", type=float, default=0.5)
    ap.add_argument("--violations-up-to", type=int, default=60)
    args = ap.parse_args()

    insts = [generate(GeneratorSpec(args.n, args.density, seed=s)) for s in range(args.instances)]
    print("n,l,ball,binomial,closed_form,oracle_counts")
    for l in args.ls:  # noqa: E741
        counts = " ".join(str(count_local_optima(inst, l)) for inst in insts)
        closed = mpmath.nstr(estimate_closed_form(args.n, l).estimate, 8) if l <= args.n - 2 else ""
        binom = mpmath.nstr(estimate_binomial(args.n, l).estimate, 8)
        print(f"{args.n},{l},{ball_size(args.n, l)},{binom},{closed},{counts}")

    bad = bound_violations(args.violations_up_to)
    outside = sum(1 for n, l, _, _ in bad if n < 2 * l + 2)
    print(f"# tail bound below the ball size at {len(bad)} (n, l) pairs with n <= "
          f"{args.violations_up_to}; {outside} of them have n < 2l + 2")


if __name__ == "__main__":
    main()

"""Particle oracle against the continuum minimiser for increasing N.

Prints the Wasserstein-1 and sup-CDF distances for N in a doubling sequence
on a catalog reference case.

    python3 scripts/particle_convergence.py --reference "hco-pileup a=0.5 gamma=1"
"""

import argparse
import time

from carleman1d.particles import compare_to_density, minimize_particles
from carleman1d.reference import REFERENCE_NAMES, reference_case


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--reference", default="head-louat-interval", help=", ".join(REFERENCE_NAMES))
    parser.add_argument("--n", type=int, nargs="+", default=[50, 100, 200, 400])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    case = reference_case(args.reference)
    length = case.t2 - case.t1
    print(f"{case.name}: support [{case.t1:.6g}, {case.t2:.6g}]")
    print(f"{'N':>6} {'W1':>11} {'W1/L':>9} {'cdf sup':>9} {'iters':>6} {'seconds':>8}")
    for n in args.n:
        start = time.perf_counter()
        cfg = minimize_particles(n, case.kernel, case.potential, seed=args.seed)
        w1, sup = compare_to_density(cfg, case)
        print(f"{n:6d} {w1:11.4e} {w1 / length:9.2e} {sup:9.4f} {cfg.iterations:6d} {time.perf_counter() - start:8.2f}")


if __name__ == "__main__":
    main()

"""Finite-difference energies against the closed form as the grid is refined.

Prints the relative error of every level for a ladder of grid sizes, plus the
observed order log2(err(N) / err(2N)). Each energy is already Richardson
extrapolated from grids N and 2N, so the order sits near 4 until roundoff wins.
"""
import argparse
import math

from hulthen_lab import hulthen, oracle
from hulthen_lab.hulthen import ReducedParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--v", type=float, default=12.0)
    ap.add_argument("--q", type=float, default=1.0)
    ap.add_argument("--min-exp", type=int, default=10, help="smallest grid is 2**min_exp")
    ap.add_argument("--max-exp", type=int, default=16)
    args = ap.parse_args()

    p = ReducedParams(args.v, args.q)
    exact = [float(e) for e in hulthen.spectrum(p)]
    if not exact:
        raise SystemExit(f"no bound states for v={args.v}, q={args.q}")
    kappa = math.sqrt(-exact[-1])
    r_max = oracle.default_fd_r_max(args.q, kappa)
    potential = hulthen.potential(p)

    print(f"v={args.v} q={args.q} levels={len(exact)} box=[ln q, {r_max:.1f}]")
    print(f"{'N':>8} " + " ".join(f"{'err n=' + str(n):>12}" for n in range(len(exact))))
    previous = None
    for k in range(args.min_exp, args.max_exp + 1):
        spec = oracle.FDSpec(2**k, r_max, 1e-14, math.log(args.q))
        fd = oracle.fd_spectrum(potential, spec)
        errs = [abs(fd[n] / e - 1) if n < len(fd) else math.nan for n, e in enumerate(exact)]
        line = f"{2**k:>8} " + " ".join(f"{e:12.3e}" for e in errs)
        if previous is not None:
            orders = [math.log2(a / b) if b > 0 else float("nan") for a, b in zip(previous, errs)]
            line += "   order " + " ".join(f"{o:4.2f}" for o in orders)
        print(line)
        previous = errs


if __name__ == "__main__":
    main()

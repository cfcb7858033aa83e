"""Tabulate the Crum chain for one (v, q): barrier, energies, proportionality
between the Wronskian and closed-form states, and both norm evaluations."""
import argparse
from fractions import Fraction

from hulthen_lab import darboux, hulthen, oracle
from hulthen_lab.hulthen import ReducedParams


def _parse(text: str):
    return Fraction(text) if "/" in text or text.lstrip("-").isdigit() else float(text)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--v", default="50")
    ap.add_argument("--q", default="2")
    ap.add_argument("--depth", type=int, default=3)
    args = ap.parse_args()

    p = ReducedParams(_parse(args.v), _parse(args.q))
    count = hulthen.bound_state_count(p)
    arith = "rational" if p.exact else "float"
    print(f"v={p.v} q={p.q} ({arith}), {count} bound states")
    print(f"{'j':>2} {'n':>2} {'barrier':>10} {'energy':>14} {'proportionality':>18} "
          f"{'norm (product)':>16} {'norm (quadrature)':>18}")
    for j in range(min(args.depth, count - 1) + 1):
        barrier = float(darboux.chain_potential(p, j).barrier_coefficient)
        for n in range(j, count):
            psi = darboux.crum_chain(p, j, n).psi
            closed = darboux.closed_form_chain_state(p, j, n)
            kappa = float(hulthen.decay_rate(p, count - 1))
            spec = oracle.QuadSpec(tol=1e-10, r_max=oracle.default_r_max(p.q, kappa))
            quad = oracle.overlap(psi.to_float(), psi.to_float(), spec)
            print(f"{j:>2} {n:>2} {barrier:10.4g} {float(hulthen.energy(p, n)):14.8g} "
                  f"{float(closed.proportionality):18.10g} {float(darboux.chain_norm(p, j, n)):16.10g} "
                  f"{quad:18.10g}")


if __name__ == "__main__":
    main()

"""Compare the two readings of the alternative chain-norm prefactor against the
product formula I_nn * prod_{i<j}(E_n - E_i), over a small (v, q, j, n) sweep.

Reading A multiplies the prefactor by N_n = I_nn^{-1/2}; reading B by I_nn.
A ratio of 1 means that reading reproduces the squared norm.
"""
import argparse

from hulthen_lab import darboux, hulthen
from hulthen_lab.hulthen import ReducedParams

DEFAULT_POINTS = ["12:1", "12:0.5", "50:2", "30:1.7"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("points", nargs="*", default=DEFAULT_POINTS, help="v:q pairs")
    ap.add_argument("--depth", type=int, default=3)
    args = ap.parse_args()

    print(f"{'v':>6} {'q':>5} {'j':>2} {'n':>2} {'product':>14} {'A / product':>14} {'B / product':>14}")
    for point in args.points:
        v, q = (float(x) for x in point.split(":"))
        p = ReducedParams(v, q)
        count = hulthen.bound_state_count(p)
        for j in range(1, min(args.depth, count - 1) + 1):
            for n in range(j, count):
                product = float(darboux.chain_norm(p, j, n))
                readings = darboux.alternative_norm_readings(p, j, n)
                print(f"{v:6g} {q:5g} {j:>2} {n:>2} {product:14.6e} "
                      f"{readings['reading_a'] / product:14.6g} {readings['reading_b'] / product:14.6g}")


if __name__ == "__main__":
    main()

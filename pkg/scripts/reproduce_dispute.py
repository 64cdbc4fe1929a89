"""Second-factor phase in the two degenerate bases, plus the Wilson-loop invariants."""
import argparse

import numpy as np

from composite_berry.berry import product_split_phase
from composite_berry.holonomy import numeric_connection, wilson_loop
from composite_berry.model import basis_path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=np.pi / 2)
    ap.add_argument("--points", type=int, default=4000)
    args = ap.parse_args()

    print(f"theta = {args.theta:.6f}")
    print(f"{'basis':>14} {'member':>6} {'gamma_1':>12} {'gamma_2':>12} {'raw_2':>12} {'total':>12}")
    for label in ("reply_basis", "primed_basis"):
        for member in ("a", "b"):
            g1, g2, gc = product_split_phase(args.theta, label, member, args.points)
            print(f"{label:>14} {member:>6} {g1.gamma:12.8f} {g2.gamma:12.8f} "
                  f"{g2.raw_unwrapped:12.8f} {gc.gamma:12.8f}")

    print("\nWilson loop U = P exp(i oint A dphi)")
    for label in ("reply_basis", "primed_basis"):
        h = wilson_loop(numeric_connection(basis_path(label, args.theta), 1e-5), 256)
        print(f"{label:>14}: eigenphases {np.round(h.eigenphases, 10)}, "
              f"trace {h.trace.real:+.10f}{h.trace.imag:+.10f}j")
    c = np.cos(args.theta / 2) ** 2
    print(f"{'single spin':>14}: 2 pi cos^2(theta/2) = {2 * np.pi * c:.10f}")


if __name__ == "__main__":
    main()

"""Fixed-omega, shrinking-g sweep with the rotating-frame closed form alongside."""
import argparse

import numpy as np

from composite_berry.dynamics import breakdown_sweep, rotating_frame_fidelity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=1e-3)
    ap.add_argument("--ratios", default="0.01,0.1,0.5,1,2,5,10")
    args = ap.parse_args()

    ratios = [float(x) for x in args.ratios.split(",")]
    rows = breakdown_sweep(np.pi / 2, args.omega, [args.omega / r for r in ratios])
    print(f"{'ratio':>7} {'g':>10} {'final_F':>9} {'closed':>9} {'min_F':>7} {'geometric':>11} {'berry':>11}")
    for row in rows:
        print(f"{row.ratio:7.3g} {row.g:10.3g} {row.final_fidelity:9.5f} "
              f"{rotating_frame_fidelity(row.ratio):9.5f} {row.min_fidelity:7.3f} "
              f"{row.geometric_phase:11.6f} {row.berry_phase:11.6f}")


if __name__ == "__main__":
    main()

"""Dynamical geometric phase against the Berry phase as omega shrinks."""
import argparse
import time

import numpy as np

from composite_berry.berry import eigenstate_berry_phase
from composite_berry.dynamics import run_cycle
from composite_berry.linalg import phase_distance
from composite_berry.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=np.pi / 2)
    ap.add_argument("--g", type=float, default=0.25)
    ap.add_argument("--ratios", default="1e-1,1e-2,1e-3", help="omega/g values")
    ap.add_argument("--level", type=int, default=3)
    args = ap.parse_args()

    base = ModelParams(theta=args.theta, g=args.g)
    berry = eigenstate_berry_phase(base, args.level, 4000).gamma
    print(f"berry_phase (N=4000) = {berry:.10f}")
    print(f"{'omega':>10} {'geometric':>14} {'error':>10} {'fidelity':>10} {'drift':>9} {'sec':>6}")
    for r in (float(x) for x in args.ratios.split(",")):
        t0 = time.perf_counter()
        _, rep = run_cycle(base.with_(omega=r * args.g), args.level)
        err = phase_distance(rep.geometric_phase, berry)
        print(f"{r * args.g:10.3g} {rep.geometric_phase:14.10f} {err:10.3e} "
              f"{rep.final_fidelity:10.6f} {rep.extras['max_norm_drift']:9.1e} "
              f"{time.perf_counter() - t0:6.2f}")


if __name__ == "__main__":
    main()

"""Subsystem-2 geometric phase of the top level versus coupling strength."""
import argparse

import numpy as np

from composite_berry.berry import smooth_eigenpath
from composite_berry.mixed import reduced_bloch_path, subsystem_phase
from composite_berry.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--thetas", default="0.5,1.0,1.5707963267948966")
    ap.add_argument("--gs", default="0.5,0.2,0.1,0.05,0.02,0.01")
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--subsystem", type=int, default=2)
    args = ap.parse_args()

    print(f"{'theta':>8} {'g':>6} {'p_plus':>9} {'Omega+':>10} {'Omega-':>10} {'gamma':>10}")
    for theta in (float(x) for x in args.thetas.split(",")):
        for g in (float(x) for x in args.gs.split(",")):
            path = smooth_eigenpath(ModelParams(theta=theta, g=g), 3, args.points)
            res = subsystem_phase(reduced_bloch_path(path, args.subsystem))
            print(f"{theta:8.4f} {g:6.3g} {res.p_plus:9.6f} {res.omega_plus:10.6f} "
                  f"{res.omega_minus:10.6f} {res.gamma:10.6f}")


if __name__ == "__main__":
    main()

"""Participation number P(z) for several disorder strengths (input-state independent)."""

import argparse

import numpy as np
from scipy.stats import linregress

from anderson_waveguides import ExperimentConfig, participation_number, run_experiment


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--delta", default="0,1,3")
    p.add_argument("--z-max", type=float, default=20.0)
    p.add_argument("--z-step", type=float, default=0.5)
    p.add_argument("--out", default="results/participation")
    args = p.parse_args()

    zs = tuple(np.round(np.arange(0.0, args.z_max + 1e-9, args.z_step), 10))
    cfg = ExperimentConfig(name="participation", delta_over_c=tuple(float(d) for d in args.delta.split(",")),
                           z_checkpoints=zs, realizations=args.realizations, states=("cs",),
                           output_dir=args.out, write_ensemble=False)
    res = run_experiment(cfg)
    z = np.array(zs)
    tail = z >= 2.0
    for d, stats in res.ensembles.items():
        P = np.array([participation_number(stats, k) for k in range(z.size)])
        fit = linregress(z[tail], P[tail])
        print(f"D/C={d:g}: P(z_max)={P[-1]:.3f}  slope={fit.slope:.3f}  R^2={fit.rvalue**2:.4f}")
    print(f"table: {args.out}/participation_participation.csv")


if __name__ == "__main__":
    main()

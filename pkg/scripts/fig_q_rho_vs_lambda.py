"""q and rho versus lambda (EOCW_min = 2, m = 4), analytic and simulated."""

import numpy as np

from _common import parser, write_rows
from uora_aoi import NetworkConfig, SimConfig, average_aoi, run_simulation

SETUPS = [(12, 4), (20, 6), (30, 8)]


def main():
    args = parser(__doc__).parse_args()
    rows = []
    for n, l in SETUPS:
        for lam in np.round(np.arange(0.1, 1.0001, 0.1), 10):
            config = NetworkConfig(n, l, float(lam), 2, 4)
            b = average_aoi(config)
            row = {"n": n, "l": l, "lambda": float(lam), "q": b.steady.q, "rho": b.steady.rho}
            if not args.no_sim:
                s = run_simulation(SimConfig(config, slots=args.slots, warmup=args.warmup, seed=args.seed,
                                             replications=args.reps, workers=args.workers))
                row.update(sim_q=s.empirical_q, sim_rho=s.empirical_rho)
            rows.append(row)
    write_rows(args.out / "q_rho_vs_lambda.csv", rows)


if __name__ == "__main__":
    main()

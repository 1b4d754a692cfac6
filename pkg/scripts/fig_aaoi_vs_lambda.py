"""AAoI versus lambda with EOCW_min = 3 and m = 3, analytic and simulated."""

from _common import parser, write_rows
from uora_aoi import NetworkConfig, SimConfig, average_aoi, run_simulation

SETUPS = [(10, 4), (20, 6), (30, 8)]
LAMBDAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def main():
    args = parser(__doc__).parse_args()
    rows = []
    for n, l in SETUPS:
        for lam in LAMBDAS:
            config = NetworkConfig(n, l, lam, 3, 3)
            row = {"n": n, "l": l, "lambda": lam, "aaoi": average_aoi(config).aaoi}
            if not args.no_sim:
                s = run_simulation(SimConfig(config, slots=args.slots, warmup=args.warmup, seed=args.seed,
                                             replications=args.reps, workers=args.workers))
                row.update(sim_aaoi=s.mean_aoi_network, sim_ci95=s.ci95_mean_aoi,
                           rel_err=row["aaoi"] / s.mean_aoi_network - 1)
            rows.append(row)
    write_rows(args.out / "aaoi_vs_lambda.csv", rows)


if __name__ == "__main__":
    main()

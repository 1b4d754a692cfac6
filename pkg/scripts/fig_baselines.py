"""Optimised UORA against round-robin and max-AoI scheduling over lambda (simulated)."""

from _common import parser, write_rows
from uora_aoi import NetworkConfig, SimConfig, exhaustive_search, run_simulation

SETUPS = [(30, 3), (100, 5)]
LAMBDAS = [0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0]


def main():
    args = parser(__doc__, default_slots=300_000).parse_args()
    rows = []
    for n, l in SETUPS:
        for lam in LAMBDAS:
            best = exhaustive_search(n, l, lam)
            config = NetworkConfig(n, l, lam, best.eocw_min, best.m_star)
            row = {"n": n, "l": l, "lambda": lam, "w0": best.w0_star, "m": best.m_star,
                   "uora_analytic": best.predicted_aaoi}
            for policy in ("uora", "round-robin", "max-aoi"):
                s = run_simulation(SimConfig(config, slots=args.slots, warmup=args.warmup, seed=args.seed,
                                             policy=policy, replications=args.reps,
                                             workers=args.workers))
                key = policy.replace("-", "_")
                row[key] = s.mean_aoi_network
                row[f"{key}_ci95"] = s.ci95_mean_aoi
            rows.append(row)
            print(row, flush=True)
    write_rows(args.out / "baselines.csv", rows)


if __name__ == "__main__":
    main()

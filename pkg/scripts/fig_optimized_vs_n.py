"""Optimised AAoI versus N: the fast window searches against exhaustive search."""

from _common import parser, write_rows
from uora_aoi import efficient_search_alg1, efficient_search_alg2, exhaustive_search


def main():
    args = parser(__doc__).parse_args()
    left, right = [], []
    for n in range(10, 101, 10):
        for l in (4, 6, 8):
            ex = exhaustive_search(n, l, 1.0)
            a1 = efficient_search_alg1(n, l)
            left.append({"n": n, "l": l, "exhaustive": ex.predicted_aaoi,
                         "alg1": a1.predicted_aaoi, "alg1_w0": a1.w0_star,
                         "alg1_evals": len(a1.evaluations)})
        for l, lam in [(4, 0.3), (6, 0.5), (8, 0.7)]:
            ex = exhaustive_search(n, l, lam)
            a2 = efficient_search_alg2(n, l, lam)
            right.append({"n": n, "l": l, "lambda": lam, "exhaustive": ex.predicted_aaoi,
                          "alg2": a2.predicted_aaoi, "alg2_w0": a2.w0_star,
                          "alg2_evals": len(a2.evaluations)})
    write_rows(args.out / "optimized_vs_n_saturated.csv", left)
    write_rows(args.out / "optimized_vs_n_random.csv", right)


if __name__ == "__main__":
    main()

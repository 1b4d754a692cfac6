"""Best AAoI per backoff cap m at (12, 4), and m = 0 AAoI-vs-EOCW_min curves."""

from _common import parser, write_rows
from uora_aoi import NetworkConfig, average_aoi, exhaustive_search


def main():
    args = parser(__doc__).parse_args()
    left = []
    for lam in (1.0, 0.7, 0.4, 0.2):
        result = exhaustive_search(12, 4, lam)
        for m in range(8):
            cell = min((e for e in result.evaluations if e.m == m), key=lambda e: e.aaoi)
            left.append({"lambda": lam, "m": m, "w0_best": cell.w0, "aaoi_best": cell.aaoi})
    write_rows(args.out / "conjecture_m.csv", left)
    right = []
    for n, l, lam in [(10, 4, 0.5), (20, 6, 0.7), (30, 8, 0.3)]:
        for e in range(8):
            right.append({"n": n, "l": l, "lambda": lam, "eocw_min": e,
                          "aaoi": average_aoi(NetworkConfig(n, l, lam, e, 0)).aaoi})
    write_rows(args.out / "conjecture_eocw.csv", right)


if __name__ == "__main__":
    main()

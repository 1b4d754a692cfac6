"""AAoI versus EOCW_min: m = 0..3 at (15, 5, 0.6), and the saturated m = 0 lower bound."""

from _common import parser, write_rows
from uora_aoi import NetworkConfig, aaoi_lower_bound_m0, average_aoi


def main():
    args = parser(__doc__).parse_args()
    left = []
    for m in range(4):
        for e in range(8 - m):
            left.append({"m": m, "eocw_min": e,
                         "aaoi": average_aoi(NetworkConfig(15, 5, 0.6, e, m)).aaoi})
    write_rows(args.out / "aaoi_vs_eocw_left.csv", left)
    right = []
    for n, l in [(10, 4), (20, 6), (30, 8)]:
        for e in range(8):
            right.append({"n": n, "l": l, "eocw_min": e,
                          "aaoi": average_aoi(NetworkConfig(n, l, 1.0, e, 0)).aaoi,
                          "aaoi_lb": aaoi_lower_bound_m0(n, l, 2**e)})
    write_rows(args.out / "aaoi_vs_eocw_right.csv", right)


if __name__ == "__main__":
    main()

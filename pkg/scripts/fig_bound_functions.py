"""The lower bound, its real-W extension and its exponential approximation over W."""

import numpy as np

from _common import parser, write_rows
from uora_aoi.bounds import aaoi_lower_bound_m0, approx_lower_bound, stationary_roots


def main():
    args = parser(__doc__).parse_args()
    for n, l in [(20, 10), (10, 20)]:
        roots = stationary_roots(n, l)
        print(f"N={n} L={l}: {roots.regime}, B={roots.b_coeff:.6g}, roots={roots.roots}")
        rows = [{"w": float(w), "lb_bar": aaoi_lower_bound_m0(n, l, float(w)),
                 "lb_hat": approx_lower_bound(n, l, float(w), exact_power=True),
                 "lb_tilde": approx_lower_bound(n, l, float(w))}
                for w in np.logspace(0, np.log10(512), 400)]
        write_rows(args.out / f"bound_functions_n{n}_l{l}.csv", rows)


if __name__ == "__main__":
    main()

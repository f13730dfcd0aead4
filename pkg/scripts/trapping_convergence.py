"""Monte Carlo trapping efficiency against the escape-cone value.

Prints one row per (n, rays): estimate, standard error and the deviation in
standard errors. A second table shows the edge-leakage bias of finite slabs.
"""

import argparse
import time

from lsc.transport import SlabSpec, trace_rays, trapping_efficiency_analytic


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--max-rays", type=int, default=10_000_000)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    print(f"{'n':>5} {'rays':>10} {'eta_t':>10} {'std_err':>10} {'z':>7} {'sec':>6}")
    for n in (1.3, 1.5, 1.7, 2.0):
        exact = trapping_efficiency_analytic(n)
        rays = 10_000
        while rays <= args.max_rays:
            t0 = time.perf_counter()
            r = trace_rays(SlabSpec(1.0, 1.0, 1e-4, n_refr=n), rays, args.seed, workers=args.workers)
            z = (r.eta_t_estimate - exact) / r.std_error
            print(f"{n:5.2f} {rays:10d} {r.eta_t_estimate:10.6f} {r.std_error:10.2e} {z:7.2f} "
                  f"{time.perf_counter() - t0:6.2f}")
            rays *= 10

    print("\nfinite slab, n = 1.5, 1e6 rays")
    exact = trapping_efficiency_analytic(1.5)
    for thickness in (1e-4, 1e-3, 5e-3, 2e-2):
        r = trace_rays(SlabSpec(0.1, 0.1, thickness, n_refr=1.5), 1_000_000, args.seed)
        print(f"thickness {thickness:7.1e} m   excess {r.eta_t_estimate - exact:+.5f} "
              f"({(r.eta_t_estimate - exact) / r.std_error:+.1f} sigma)")


if __name__ == "__main__":
    main()

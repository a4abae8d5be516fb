#!/usr/bin/env python3
"""Spatial self-convergence tables for the smooth density-wave problem.

Short-horizon table (t_f = 0.001) over NDG1/2/3 and eps in {1, 1e-2, 1e-6},
plus the long-horizon NDG3 order-decay study at eps = 1e-2, t_f = 0.25.
"""

import argparse

from lrbgk.cli import RunConfig, convergence_study


def table(eps, k, t_final, refinements, tol):
    cfg = RunConfig(problem="smooth", Nv=100, k=k, eps=eps, t_final=t_final,
                    tol=tol, limiter="none")
    return convergence_study(cfg, refinements)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--refinements", default="32,64,128,256")
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--long-horizon", action="store_true",
                    help="also run the t_f = 0.25 NDG3 order-decay study")
    args = ap.parse_args()
    refinements = [int(s) for s in args.refinements.split(",")]

    for eps in (1.0, 1e-2, 1e-6):
        for k in (0, 1, 2):
            rows = table(eps, k, 0.001, refinements, args.tol)
            print(f"# smooth, eps={eps:g}, NDG{k + 1}, t_f=0.001")
            for nx, err, order in rows:
                o = "-" if order is None else f"{order:.2f}"
                print(f"  Nx={nx:5d}  error={err:.4e}  order={o}")

    if args.long_horizon:
        rows = table(1e-2, 2, 0.25, refinements[-3:-1], args.tol)
        print("# smooth, eps=0.01, NDG3, t_f=0.25 (order decay)")
        for nx, err, order in rows:
            o = "-" if order is None else f"{order:.2f}"
            print(f"  Nx={nx:5d}  error={err:.4e}  order={o}")


if __name__ == "__main__":
    main()

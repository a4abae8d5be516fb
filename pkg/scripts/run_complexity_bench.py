#!/usr/bin/env python3
"""Wall-time scaling in the velocity resolution at fixed Nx = 40, t_f = 0.1.

Reports the log-log slope of time vs Nv per NDG order; the low-rank scheme
should stay well below linear growth in the total number of velocity nodes.
"""

import argparse

from lrbgk.cli import RunConfig, complexity_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Nv-list", default="128,256,512,1024")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    Nv_list = [int(s) for s in args.Nv_list.split(",")]

    for k in (0, 1, 2):
        cfg = RunConfig(problem="smooth", Nx=40, Nv=Nv_list[0], k=k,
                        t_final=0.1, tol=1e-6, limiter="none")
        rows, slope = complexity_bench(cfg, Nv_list, repeats=args.repeats)
        print(f"# NDG{k + 1}")
        for nv, sec in rows:
            print(f"  Nv={nv:5d}  {sec:8.3f}s")
        print(f"  log-log slope = {slope:.3f}")


if __name__ == "__main__":
    main()

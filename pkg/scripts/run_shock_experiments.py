#!/usr/bin/env python3
"""Fluid-limit shock experiments (eps = 1e-13).

Standing shock: total variation of the density cell averages with and
without the minmod limiter, and the maximum |u_y| over the run.
Sod tube: final moment profiles and the per-node rank (uniformly 1 in the
fluid limit).
"""

import argparse

import numpy as np

from lrbgk.cli import RunConfig, run_simulation, setup
from lrbgk.integrator import run


def standing_shock(t_final):
    for lim in ("minmod", "none"):
        cfg = RunConfig(problem="standing_shock", Nx=100, Nv=100, k=1,
                        t_final=t_final, tol=1e-6, limiter=lim)
        _, disc, vgrid, state, U, bc, sc = setup(cfg)
        res = run(state, U, sc, disc, vgrid, bc, t_final, record_diagnostics=False)
        fU = res.snapshots[-1][1]
        nbar = np.einsum("p,ip->i", disc.w, fU[..., 0])
        tv = np.abs(np.diff(nbar)).sum()
        uy = np.abs(fU[..., 2] / fU[..., 0]).max()
        print(f"standing shock, limiter={lim}: TV(n)={tv:.6f}  max|u_y|={uy:.2e}")


def sod(out_dir):
    cfg = RunConfig(problem="sod", Nx=150, Nv=100, k=1, t_final=0.14,
                    tol=1e-6, limiter="minmod", out_dir=out_dir)
    result = run_simulation(cfg)
    ranks = result.snapshots[-1][0].ranks()
    print(f"sod: steps={result.steps}  ranks min/max = {ranks.min()}/{ranks.max()}"
          f"  outputs in {out_dir}/")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-final", type=float, default=0.5,
                    help="standing shock end time")
    ap.add_argument("--out-dir", default="out/sod")
    args = ap.parse_args()
    standing_shock(args.t_final)
    sod(args.out_dir)


if __name__ == "__main__":
    main()

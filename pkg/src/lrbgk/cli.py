"""Experiment drivers and command-line interface.

Subcommands: run (single simulation, CSV outputs), converge (self-convergence
study over a doubling sequence of meshes), bench (wall-time scaling in Nv),
conserve (conservation drift report).  All floats are written with 17
significant digits so outputs are bitwise reproducible and diffable.
"""

import argparse
import json
import statistics
import sys
import time as _time
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .discretization import build_dg, build_velocity_grid
from .errors import ConfigurationError
from .integrator import StepConfig, cfl_dt, run
from .moments import primitive_from_conserved
from .problems import build_initial_state, get_problem

__all__ = [
    "RunConfig",
    "run_simulation",
    "convergence_study",
    "complexity_bench",
    "conservation_study",
    "main",
]

_TOL_GUIDANCE = (1e-8, 1e-4)


@dataclass
class RunConfig:
    problem: str = "smooth"
    Nx: int = 32
    Nv: int = 100
    k: int = 2                      # polynomial degree; NDG order is k+1
    eps: Optional[float] = None     # None: use the problem default
    tol: float = 1e-6               # SVD truncation tolerance
    limiter: str = "minmod"
    t_final: float = 0.1
    cfl: float = 1.0                # multiplier on hx / ((2k+3) Vmax)
    out_dir: str = "out"
    seed: int = 0                   # only consumed by randomized tests

    def validate(self):
        if self.Nx < 1 or self.Nv < 1:
            raise ConfigurationError(f"Nx and Nv must be positive, got {self.Nx}, {self.Nv}")
        if self.k < 0:
            raise ConfigurationError(f"polynomial degree must be >= 0, got {self.k}")
        if self.tol < 0:
            raise ConfigurationError(f"truncation tolerance must be >= 0, got {self.tol}")
        if self.t_final < 0:
            raise ConfigurationError(f"t_final must be >= 0, got {self.t_final}")
        if self.cfl <= 0:
            raise ConfigurationError(f"cfl multiplier must be > 0, got {self.cfl}")
        if self.eps is not None and self.eps <= 0:
            raise ConfigurationError(f"eps must be > 0, got {self.eps}")
        if self.limiter not in ("none", "minmod", "weno"):
            raise ConfigurationError(f"unknown limiter {self.limiter!r}")
        if self.tol > _TOL_GUIDANCE[1]:
            warnings.warn(
                f"truncation tolerance {self.tol:g} exceeds the guidance range "
                f"[{_TOL_GUIDANCE[0]:g}, {_TOL_GUIDANCE[1]:g}]; ranks will be cut "
                "below the local truncation error",
                stacklevel=2,
            )
        return self


def _fmt(x):
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, (int, np.integer)) else str(int(v)) for v in row))
            fh.write("\n")


def setup(cfg):
    """Build discretization, velocity grid, initial state and BC from a config."""
    cfg.validate()
    spec = get_problem(cfg.problem)
    disc = build_dg(spec.xa, spec.xb, cfg.Nx, cfg.k)
    vgrid = build_velocity_grid(spec.Vmax, cfg.Nv)
    state, U, bc = build_initial_state(spec, disc, vgrid)
    eps = spec.eps if cfg.eps is None else cfg.eps
    dt = cfg.cfl * cfl_dt(disc, vgrid)
    step_cfg = StepConfig(eps=eps, dt=dt, tol=cfg.tol, limiter=cfg.limiter)
    return spec, disc, vgrid, state, U, bc, step_cfg


def run_simulation(cfg, out_dir=None):
    """Run one simulation and write moments.csv, conservation.csv, ranks.csv,
    summary.json under the output directory.  Returns the RunResult."""
    out = Path(cfg.out_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec, disc, vgrid, state, U, bc, step_cfg = setup(cfg)
    result = run(state, U, step_cfg, disc, vgrid, bc, cfg.t_final)
    fstate, fU = result.snapshots[-1]

    n, ux, uy, T = primitive_from_conserved(fU)
    x = disc.node_x.ravel()
    _write_csv(
        out / "moments.csv",
        ["x", "n", "ux", "uy", "T"],
        zip(x, n.ravel(), ux.ravel(), uy.ravel(), T.ravel()),
    )
    _write_csv(
        out / "conservation.csv",
        [
            "time", "mass", "momentum_x", "momentum_y", "energy",
            "aux_mass", "aux_momentum_x", "aux_momentum_y", "aux_energy",
            "max_rank",
        ],
        # wall time lives in the diagnostics records and summary.json only,
        # so repeat runs produce bitwise identical CSV files
        (
            (r.time, *r.totals, *r.aux_totals, int(r.max_rank))
            for r in result.diagnostics
        ),
    )
    _write_csv(out / "ranks.csv", ["x", "rank"], zip(x, fstate.ranks().ravel()))

    d0, d1 = result.diagnostics[0], result.diagnostics[-1]
    summary = {
        "config": asdict(cfg),
        "eps": step_cfg.eps,
        "dt": step_cfg.dt,
        "steps": result.steps,
        "final_time": fstate.time,
        "wall_seconds": result.wall,
        "max_rank": int(fstate.ranks().max()),
        "total_drift": [abs(a - b) for a, b in zip(d1.totals, d0.totals)],
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return result


def _final_kinetic(cfg):
    """Final low-rank state plus its discretization for the convergence metric."""
    spec, disc, vgrid, state, U, bc, step_cfg = setup(cfg)
    result = run(state, U, step_cfg, disc, vgrid, bc, cfg.t_final,
                 record_diagnostics=False)
    return result.snapshots[-1][0], disc, vgrid


def l1_difference(coarse_state, coarse_disc, fine_state, fine_disc, vgrid):
    """Velocity-summed L1 distance between two runs, averaged over the domain.

    The x integral of |difference| uses the finer run's Gauss quadrature (the
    coarse solution is interpolated there through its nodal Lagrange basis,
    which is exact for the DG polynomials); the velocity integral is the
    plain hv^2 Riemann sum.
    """
    length = fine_disc.b - fine_disc.a
    total = 0.0
    for i in range(fine_disc.Nx):
        for p in range(fine_disc.k + 1):
            x = fine_disc.node_x[i, p]
            j = coarse_disc.element_of(x)
            Lv = coarse_disc.basis_at(x, j)
            coarse = sum(Lv[q] * coarse_state.C[j][q].densify()
                         for q in range(coarse_disc.k + 1))
            diff = np.abs(coarse - fine_state.C[i][p].densify())
            total += fine_disc.hx * fine_disc.w[p] * diff.sum()
    return vgrid.hv**2 * total / length


def convergence_study(cfg_base, refinements: List[int]):
    """Self-convergence table over a doubling mesh sequence.

    The error at Nx is the L1 distance between the Nx run and the next
    finer 2*Nx run, so one extra run at 2*refinements[-1] is made.
    Returns rows (Nx, error, order) with order = log2(e(Nx/2) / e(Nx)),
    None on the first row.
    """
    if any(b != 2 * a for a, b in zip(refinements, refinements[1:])):
        raise ConfigurationError(f"refinements must double: {refinements}")
    meshes = list(refinements) + [2 * refinements[-1]]
    runs = {}
    for Nx in meshes:
        cfg = RunConfig(**{**asdict(cfg_base), "Nx": Nx})
        runs[Nx] = _final_kinetic(cfg)
    vgrid = runs[meshes[0]][2]
    errors = []
    for Nx in refinements:
        cs, cd, cv = runs[Nx]
        fs, fd, fv = runs[2 * Nx]
        if cv.Nv != fv.Nv or cv.Vmax != fv.Vmax:
            raise ConfigurationError("velocity grids differ between refinements")
        errors.append(l1_difference(cs, cd, fs, fd, vgrid))
    rows = []
    for idx, Nx in enumerate(refinements):
        order = float(np.log2(errors[idx - 1] / errors[idx])) if idx else None
        rows.append((Nx, errors[idx], order))
    return rows


def complexity_bench(cfg_base, Nv_list, repeats=3):
    """Wall-time scaling in Nv at fixed Nx, median of ``repeats`` timed runs
    after one untimed warm-up.  Returns (rows, slope) with rows (Nv, seconds)."""
    rows = []
    for Nv in Nv_list:
        cfg = RunConfig(**{**asdict(cfg_base), "Nv": int(Nv)})
        spec, disc, vgrid, state0, U0, bc, step_cfg = setup(cfg)
        times = []
        for rep in range(repeats + 1):
            start = _time.perf_counter()
            run(state0, U0, step_cfg, disc, vgrid, bc, cfg.t_final,
                record_diagnostics=False)
            if rep > 0:  # first run warms caches and is discarded
                times.append(_time.perf_counter() - start)
        rows.append((int(Nv), statistics.median(times)))
    slope = float(np.polyfit(np.log([r[0] for r in rows]),
                             np.log([r[1] for r in rows]), 1)[0])
    return rows, slope


def conservation_study(cfg, out_dir=None):
    """Run and report the maximum drift of each conserved total over the run."""
    result = run_simulation(cfg, out_dir=out_dir)
    totals = np.array([r.totals for r in result.diagnostics])
    drift = np.abs(totals - totals[0]).max(axis=0)
    return result, drift


def _read_config_file(path):
    """key=value lines; '#' starts a comment; blank lines ignored."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values

_FIELD_TYPES = {
    "problem": str, "Nx": int, "Nv": int, "k": int, "eps": float, "tol": float,
    "limiter": str, "t_final": float, "cfl": float, "out_dir": str, "seed": int,
}


def _build_config(args):
    values = {}
    if args.config:
        raw = _read_config_file(args.config)
        for key, val in raw.items():
            if key not in _FIELD_TYPES:
                raise ConfigurationError(f"unknown config key {key!r}")
            values[key] = _FIELD_TYPES[key](val)
    for key in _FIELD_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "out_dir", None):
        values["out_dir"] = args.out_dir
    return RunConfig(**values)


def _add_common(p):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--problem", choices=["smooth", "standing_shock", "sod"])
    p.add_argument("--Nx", type=int)
    p.add_argument("--Nv", type=int)
    p.add_argument("--k", type=int, help="polynomial degree (NDG order is k+1)")
    p.add_argument("--eps", type=float)
    p.add_argument("--tol", type=float, help="SVD truncation tolerance")
    p.add_argument("--limiter", choices=["none", "minmod", "weno"])
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir", default=None)


def _parser():
    ap = argparse.ArgumentParser(prog="lrbgk", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("run", help="single simulation with CSV outputs"))

    pc = sub.add_parser("converge", help="self-convergence study over doubling meshes")
    _add_common(pc)
    pc.add_argument("--refinements", default="16,32,64,128",
                    help="comma-separated doubling Nx sequence (one extra run at 2x the last is made)")

    pb = sub.add_parser("bench", help="wall-time scaling in Nv")
    _add_common(pb)
    pb.add_argument("--Nv-list", dest="Nv_list", default="128,256,512,1024")
    pb.add_argument("--repeats", type=int, default=3)

    _add_common(sub.add_parser("conserve", help="conservation drift report"))
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        out = Path(cfg.out_dir)
        if args.command == "run":
            result = run_simulation(cfg)
            print(f"steps={result.steps} wall={result.wall:.3f}s outputs in {out}/")
        elif args.command == "converge":
            refinements = [int(s) for s in args.refinements.split(",")]
            rows = convergence_study(cfg, refinements)
            out.mkdir(parents=True, exist_ok=True)
            _write_csv(out / "convergence.csv", ["Nx", "l1_error", "order"],
                       ((nx, e, np.nan if o is None else o) for nx, e, o in rows))
            for nx, e, o in rows:
                print(f"Nx={nx:5d}  error={e:.6e}  order={'-' if o is None else f'{o:.3f}'}")
        elif args.command == "bench":
            cfg.problem, cfg.Nx, cfg.t_final = "smooth", 40, 0.1
            Nv_list = [int(s) for s in args.Nv_list.split(",")]
            rows, slope = complexity_bench(cfg, Nv_list, repeats=args.repeats)
            out.mkdir(parents=True, exist_ok=True)
            _write_csv(out / "bench.csv", ["Nv", "seconds"], rows)
            for nv, sec in rows:
                print(f"Nv={nv:5d}  {sec:.3f}s")
            print(f"log-log slope = {slope:.3f}")
        elif args.command == "conserve":
            _, drift = conservation_study(cfg)
            names = ("mass", "momentum_x", "momentum_y", "energy")
            for name, d in zip(names, drift):
                print(f"max |drift {name}| = {d:.3e}")
        return 0
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

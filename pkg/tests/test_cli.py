import json

import numpy as np
import pytest

from lrbgk.cli import (
    RunConfig,
    _read_config_file,
    complexity_bench,
    conservation_study,
    convergence_study,
    main,
    run_simulation,
)
from lrbgk.errors import ConfigurationError
from lrbgk.problems import smooth_ic


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


def test_run_t0_reproduces_initial_profiles(tmp_path):
    cfg = RunConfig(problem="smooth", Nx=16, Nv=32, k=1, t_final=0.0,
                    out_dir=str(tmp_path))
    run_simulation(cfg)
    header, data = read_csv(tmp_path / "moments.csv")
    assert header == ["x", "n", "ux", "uy", "T"]
    x, n = data[:, 0], data[:, 1]
    np.testing.assert_allclose(n, 1.0 + 0.5 * np.sin(x), atol=1e-13)
    np.testing.assert_allclose(data[:, 2:4], 0.0, atol=1e-13)
    np.testing.assert_allclose(data[:, 4], 1.0, atol=1e-13)
    _, ranks = read_csv(tmp_path / "ranks.csv")
    assert np.all(ranks[:, 1] == 1)


def test_outputs_are_deterministic(tmp_path):
    texts = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        cfg = RunConfig(problem="smooth", Nx=6, Nv=24, k=1, t_final=0.01,
                        tol=1e-8, limiter="none", out_dir=str(out))
        run_simulation(cfg)
        texts.append(tuple((out / f).read_bytes()
                           for f in ("moments.csv", "conservation.csv", "ranks.csv")))
    assert texts[0] == texts[1]


def test_summary_contents(tmp_path):
    cfg = RunConfig(problem="smooth", Nx=6, Nv=24, k=1, t_final=0.01,
                    tol=1e-8, limiter="none", out_dir=str(tmp_path))
    result = run_simulation(cfg)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["steps"] == result.steps
    assert summary["eps"] == 1.0  # smooth problem default
    assert abs(summary["final_time"] - 0.01) < 1e-13
    assert summary["config"]["Nx"] == 6


def test_conservation_csv_monotone_time(tmp_path):
    cfg = RunConfig(problem="smooth", Nx=6, Nv=24, k=1, t_final=0.02,
                    tol=1e-8, limiter="none", out_dir=str(tmp_path))
    run_simulation(cfg)
    header, data = read_csv(tmp_path / "conservation.csv")
    assert header[0] == "time"
    assert np.all(np.diff(data[:, 0]) > 0)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig(Nx=0).validate()
    with pytest.raises(ConfigurationError):
        RunConfig(k=-1).validate()
    with pytest.raises(ConfigurationError):
        RunConfig(t_final=-1.0).validate()
    with pytest.raises(ConfigurationError):
        RunConfig(limiter="superbee").validate()
    with pytest.raises(ConfigurationError):
        RunConfig(eps=0.0).validate()


def test_tolerance_guidance_warning():
    with pytest.warns(UserWarning):
        RunConfig(tol=1e-3).validate()


def test_config_file_parsing(tmp_path):
    cfgfile = tmp_path / "case.cfg"
    cfgfile.write_text(
        "# smooth baseline\nproblem = smooth\nNx = 24\ntol = 1e-8  # tight\n\n"
    )
    values = _read_config_file(cfgfile)
    assert values == {"problem": "smooth", "Nx": "24", "tol": "1e-8"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("Nx 24\n")
    with pytest.raises(ConfigurationError):
        _read_config_file(bad)


def test_main_run_with_config_file(tmp_path, capsys):
    cfgfile = tmp_path / "case.cfg"
    cfgfile.write_text("problem = smooth\nNx = 4\nNv = 16\nk = 1\nt_final = 0.0\n")
    code = main(["run", "--config", str(cfgfile), "--out-dir", str(tmp_path / "out")])
    assert code == 0
    assert (tmp_path / "out" / "moments.csv").exists()
    assert "steps=0" in capsys.readouterr().out


def test_main_error_is_machine_readable(tmp_path, capsys):
    code = main(["run", "--problem", "smooth", "--Nx", "0",
                 "--out-dir", str(tmp_path)])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "ConfigurationError"


def test_convergence_refinements_must_double():
    cfg = RunConfig(problem="smooth", Nv=16, k=1, t_final=0.001, limiter="none")
    with pytest.raises(ConfigurationError):
        convergence_study(cfg, [8, 24])


def test_convergence_study_smoke():
    cfg = RunConfig(problem="smooth", Nv=16, k=1, t_final=0.001,
                    tol=1e-12, limiter="none")
    rows = convergence_study(cfg, [4, 8])
    assert len(rows) == 2
    assert rows[0][0] == 4 and rows[1][0] == 8
    assert rows[0][1] > rows[1][1] > 0  # errors shrink under refinement
    assert rows[0][2] is None
    assert rows[1][2] == pytest.approx(np.log2(rows[0][1] / rows[1][1]))


def test_complexity_bench_smoke():
    cfg = RunConfig(problem="smooth", Nx=4, Nv=16, k=1, t_final=0.01,
                    tol=1e-6, limiter="none")
    rows, slope = complexity_bench(cfg, [16, 32], repeats=1)
    assert [r[0] for r in rows] == [16, 32]
    assert all(r[1] > 0 for r in rows)
    assert np.isfinite(slope)


def test_conservation_study_smoke(tmp_path):
    cfg = RunConfig(problem="smooth", Nx=6, Nv=24, k=1, t_final=0.01,
                    tol=1e-10, limiter="none", out_dir=str(tmp_path))
    result, drift = conservation_study(cfg)
    assert drift.shape == (4,)
    assert drift.max() < 1e-6


def test_main_conserve_subcommand(tmp_path, capsys):
    code = main(["conserve", "--problem", "smooth", "--Nx", "4", "--Nv", "16",
                 "--k", "1", "--t-final", "0.005", "--limiter", "none",
                 "--out-dir", str(tmp_path)])
    assert code == 0
    assert "max |drift mass|" in capsys.readouterr().out

import numpy as np
import pytest

from nskdg.cli import (ConfigError, DIAG_HEADER, PRESETS, SNAP_HEADER,
                       build_run_config, main, resolve_config)

TINY = ["--set", "run.n_elems=8", "--set", "run.T=5e-3",
        "--set", "scheme.dt=1e-3"]


def test_resolve_precedence(tmp_path):
    cfgfile = tmp_path / "exp.ini"
    cfgfile.write_text("[scheme]\ngamma = 3e-5\n")
    cfg = resolve_config("bench-gamma1e-5", str(cfgfile),
                         ["scheme.gamma=7e-6", "mu=1e-8"])
    assert cfg["scheme"]["gamma"] == "7e-6"  # --set beats the file
    assert cfg["scheme"]["mu"] == "1e-8"     # unique bare key resolves
    assert cfg["run"]["ic"] == "tanh"        # preset survives underneath
    cfg2 = resolve_config("bench-gamma1e-5", str(cfgfile), [])
    assert cfg2["scheme"]["gamma"] == "3e-5"  # file beats the preset


def test_resolve_rejects_unknown_entries(tmp_path):
    with pytest.raises(ConfigError, match="unknown preset"):
        resolve_config("nope", None, [])
    bad = tmp_path / "bad.ini"
    bad.write_text("[scheme]\ngamme = 1e-4\n")
    with pytest.raises(ConfigError, match="scheme.gamme"):
        resolve_config(None, str(bad), [])
    badsec = tmp_path / "badsec.ini"
    badsec.write_text("[solver]\ntol = 1e-10\n")
    with pytest.raises(ConfigError, match="unknown config section 'solver'"):
        resolve_config(None, str(badsec), [])
    with pytest.raises(ConfigError, match="unknown config key 'gamme'"):
        resolve_config(None, None, ["gamme=1"])
    with pytest.raises(ConfigError, match="key=value"):
        resolve_config(None, None, ["gamma"])
    with pytest.raises(ConfigError, match="not found"):
        resolve_config(None, "/does/not/exist.ini", [])


def test_build_run_config_types():
    run_cfg, extras = build_run_config(resolve_config(None, None, []))
    assert run_cfg.n_elems == 512 and run_cfg.T == 0.5
    assert run_cfg.scheme.sigma == 10.0  # auto resolves to the degree floor
    assert run_cfg.scheme.flux.kind == "conservative"
    assert extras["n_list"] == [] and extras["points_per_elem"] == 10

    cfg = resolve_config("bench-gamma1e-4", None, [])
    run_cfg, extras = build_run_config(cfg)
    assert run_cfg.domain == (-1.0, 1.0)
    assert extras["n_list"] == [32, 64, 128, 256, 512, 1024]


def test_build_run_config_rejections():
    with pytest.raises(ConfigError, match="conservative flux requires"):
        build_run_config(resolve_config(None, None, ["alpha=0.5"]))
    with pytest.raises(ConfigError, match="scheme.flux"):
        build_run_config(resolve_config(None, None, ["flux=upwind"]))
    with pytest.raises(ConfigError, match="run.ic"):
        build_run_config(resolve_config(None, None, ["ic=dam-break"]))
    with pytest.raises(ConfigError, match="scheme.dt"):
        build_run_config(resolve_config(None, None, ["dt=fast"]))
    with pytest.raises(ConfigError, match="snapshot_points_per_elem"):
        build_run_config(resolve_config(None, None,
                                        ["snapshot_points_per_elem=1"]))
    with pytest.raises(ConfigError, match="run.n_list"):
        build_run_config(resolve_config(None, None, ["n_list=8.5"]))
    # scheme validation surfaces as ConfigError too
    with pytest.raises(ConfigError, match="sigma"):
        build_run_config(resolve_config(None, None, ["sigma=1"]))


def test_run_writes_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--out", str(out), *TINY]) == 0
    diag = (out / "diagnostics.csv").read_text().splitlines()
    assert diag[0] == DIAG_HEADER
    assert len(diag) == 7  # t=0 plus 5 steps, plus header
    assert diag[1].startswith("0.000000000000000e+00,")
    resolved = (out / "resolved_config.txt").read_text()
    assert "[run]" in resolved and "n_elems = 8" in resolved


def test_resolved_config_is_reloadable(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--out", str(out), *TINY]) == 0
    again = resolve_config(None, str(out / "resolved_config.txt"), [])
    assert again == resolve_config(None, None, [x for x in TINY if x != "--set"])


def test_runs_are_bit_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--out", str(a), *TINY]) == 0
    assert main(["run", "--out", str(b), *TINY]) == 0
    assert (a / "diagnostics.csv").read_bytes() == (b / "diagnostics.csv").read_bytes()


def test_unknown_key_is_exit_1(tmp_path, capsys):
    code = main(["run", "--out", str(tmp_path), "--set", "run.nelems=8"])
    assert code == 1
    err = capsys.readouterr().err
    assert "config error" in err and "run.nelems" in err


def test_newton_abort_is_exit_2(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["run", "--out", str(out), *TINY,
                 "--set", "newton.max_iters=1", "--set", "newton.tol=1e-15",
                 "--set", "newton.polish=0"])
    assert code == 2
    assert "error:" in capsys.readouterr().err
    diag = (out / "diagnostics.csv").read_text().splitlines()
    assert diag[-1] == "# aborted at step 1"
    assert len(diag) == 3  # header, t=0 row, abort marker


def test_snapshot_default_final_time(tmp_path):
    out = tmp_path / "o"
    assert main(["snapshot", "--out", str(out), *TINY,
                 "--set", "run.snapshot_points_per_elem=3"]) == 0
    snap = out / "snapshot_0.005000.csv"
    lines = snap.read_text().splitlines()
    assert lines[0] == SNAP_HEADER
    assert len(lines) == 1 + 8 * 3
    assert not (out / "diagnostics.csv").exists()
    first = np.array([float(v) for v in lines[1].split(",")])
    assert first[0] == 0.0  # leftmost sample sits on the wall
    assert first[2] == 0.0  # pinned velocity


def test_run_with_requested_snapshots(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--out", str(out), *TINY,
                 "--set", "run.snapshot_times=0, 2e-3"]) == 0
    assert (out / "snapshot_0.000000.csv").exists()
    assert (out / "snapshot_0.002000.csv").exists()
    assert (out / "diagnostics.csv").exists()


def test_snapshot_time_off_grid_is_exit_1(tmp_path, capsys):
    code = main(["run", "--out", str(tmp_path), *TINY,
                 "--set", "run.snapshot_times=2.5e-4"])
    assert code == 1
    assert "snapshot_times" in capsys.readouterr().err


def test_benchmark_small_sweep(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["benchmark", "--out", str(out),
                 "--set", "run.ic=tanh", "--set", "run.domain=-1, 1",
                 "--set", "scheme.gamma=1e-2", "--set", "run.n_list=8, 16"])
    assert code == 0
    csv = (out / "eoc.csv").read_text().splitlines()
    assert csv[0] == "N,err_rho,eoc_rho,err_v,eoc_v"
    assert len(csv) == 3
    assert (out / "eoc.txt").exists()
    assert "err_rho" in capsys.readouterr().out


def test_benchmark_rejects_bad_setups(tmp_path, capsys):
    code = main(["benchmark", "--out", str(tmp_path),
                 "--set", "run.ic=tanh", "--set", "run.n_list=8, 24"])
    assert code == 1
    assert "double" in capsys.readouterr().err
    code = main(["benchmark", "--out", str(tmp_path),
                 "--set", "run.n_list=8, 16"])  # default step IC
    assert code == 1
    code = main(["benchmark", "--out", str(tmp_path), "--set", "run.ic=tanh"])
    assert code == 1  # no n_list


def test_audit_cli(tmp_path, capsys):
    assert main(["audit", "--trials", "2000"]) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("PASS") and "conservative" in out

    assert main(["audit", "--flux", "dissipative", "--trials", "2000"]) == 0
    assert "alpha=1.0" in capsys.readouterr().out

    assert main(["audit", "--trials", "2000", "--corrupt"]) == 1
    assert capsys.readouterr().out.strip().endswith("FAIL")

    assert main(["audit", "--flux", "conservative", "--alpha", "0.5"]) == 1
    assert "dissipative" in capsys.readouterr().err
    assert main(["audit", "--trials", "0"]) == 1


def test_every_preset_builds_and_runs_tiny(tmp_path):
    for name in PRESETS:
        run_cfg, extras = build_run_config(resolve_config(name, None, []))
        assert run_cfg.T > 0
        if name.startswith("bench"):
            code = main(["benchmark", "--preset", name,
                         "--out", str(tmp_path / name),
                         "--set", "run.n_list=8"])
            assert code == 0, name
            assert (tmp_path / name / "eoc.csv").exists()
        else:
            code = main(["run", "--preset", name, "--out", str(tmp_path / name),
                         *TINY])
            assert code == 0, name
            assert (tmp_path / name / "diagnostics.csv").exists()

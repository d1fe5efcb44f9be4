import json
import math
import os
import subprocess

import numpy as np
import pytest

import fraclab


def test_parameter_checks():
    m = fraclab.ModelParams()
    m.n, m.d, m.alpha, m.beta = 2, 1, 0.85, 0.5
    m.sigma = [1.0, 1.0]
    m.a = [0.5, -0.3, 0.2, 0.4]
    assert fraclab.validate_model(m) == []
    m.alpha = 0.6
    assert [v[0] for v in fraclab.validate_model(m)] == ["self_diffusion_dominance"]

    s = fraclab.ScalingParams()
    s.N = 1024
    kN, khN, dN = fraclab.derived_scales(s)
    assert kN == pytest.approx(1024 ** 0.23)
    assert khN == pytest.approx(1024 ** 0.03)
    assert dN == pytest.approx(1024 ** -0.2)


def test_spectral_operators():
    g = fraclab.Grid(1, 2 * math.pi, 64)
    x = g.nodes()
    assert np.allclose(fraclab.frac_laplacian(g, np.sin(x), 0.85), np.sin(x), atol=1e-13)
    (grad,) = fraclab.frac_gradient(g, np.sin(x), 0.3)
    assert np.allclose(grad, np.cos(x), atol=1e-13)
    assert fraclab.h_alpha_seminorm(g, np.sin(x), 0.85) == pytest.approx(math.sqrt(math.pi))
    assert fraclab.l2_norm(g, np.sin(x)) == pytest.approx(math.sqrt(math.pi))
    v = fraclab.pv_frac_laplacian(math.sin, 0.7, 0.85, tail_R=1e3)
    assert v == pytest.approx(math.sin(0.7), abs=1e-4)
    with pytest.raises(ValueError):
        fraclab.frac_laplacian(g, np.zeros(10), 0.5)


def test_kernels_and_sampler():
    s = fraclab.ScalingParams()
    s.N = 256
    fam = fraclab.MollifierFamily(s)
    assert fam.std_dev(fraclab.KernelKind.V_hat) ** 2 == pytest.approx(0.794998283314264436)
    force = fraclab.InteractionForce(fam, 0.5, 16 * math.pi)
    assert force(0.5) == pytest.approx(-0.20058207696772917, rel=1e-6)
    assert force(-0.5) == -force(0.5)

    inc = fraclab.sample_increments(0.85, 1, 1.0, 0.5, 100000, 7)
    assert inc.shape == (100000, 1)
    vals, errs = fraclab.empirical_char_function(inc[:, 0].tolist(), [1.0])
    assert abs(vals[0] - math.exp(-0.5)) < 4 * errs[0]


def test_bl_metric():
    d = fraclab.bl_metric(1, 50.0, [0.0], [1.0], [1.0], [1.0])
    assert 0.9 * 2 / 3 <= d <= 2 / 3 + 1e-12


SMALL = """
[scaling]
N_list = 200, 400
[grid]
M = 1024
[solver]
dt = 0.005
T = 0.1
snapshots = 3
[particles]
dt = 0.005
[seeds]
count = 2
"""


def test_config_and_solver():
    cfg = fraclab.Config.parse(SMALL)
    assert cfg.N_list == [200, 400]
    assert cfg.violations() == []
    assert len(cfg.hash()) == 16
    u0 = cfg.initial_field()
    assert u0.shape == (2, 1024)
    times, snaps, mass = fraclab.solve_pde(cfg, "regularized", 400)
    assert times == pytest.approx([0.0, 0.05, 0.1])
    assert len(snaps) == 3 and snaps[0].shape == (2, 1024)
    assert np.allclose(mass[-1], mass[0], rtol=1e-10)
    with pytest.raises(fraclab.ConfigError):
        fraclab.Config.parse("[grid]\nbogus = 1\n")


def test_experiment_roundtrip(tmp_path):
    cfg = fraclab.Config.parse(SMALL)
    r1 = fraclab.run_experiment("converge-reg", cfg, str(tmp_path))
    r2 = fraclab.run_experiment("converge-reg", cfg)
    assert r1["csv"] == r2["csv"]
    assert (tmp_path / "results.csv").read_text() == r1["csv"]
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["verdict"] in ("PASS", "FAIL")
    assert set(fraclab.experiment_names()) >= {"converge-n", "solve-pde", "validate-sampler"}


@pytest.mark.skipif("FRACLAB_CLI" not in os.environ, reason="command line tool path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["FRACLAB_CLI"]
    good = tmp_path / "small.ini"
    good.write_text(SMALL)
    out = tmp_path / "out"
    r = subprocess.run([cli, "solve-pde", "--config", str(good), "--out", str(out), "--threads", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    for name in ("results.csv", "verdict.json", "monitors.csv", "metadata.json"):
        assert (out / name).exists()

    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\nalpha = 0.6\n")
    r = subprocess.run([cli, "solve-pde", "--config", str(bad)], capture_output=True, text=True)
    assert r.returncode == 2

    junk = tmp_path / "junk.ini"
    junk.write_text("[grid]\nM = many\n")
    assert subprocess.run([cli, "converge-n", "--config", str(junk)], capture_output=True).returncode == 2
    assert subprocess.run([cli, "converge-n", "--no-such-flag"], capture_output=True).returncode == 64

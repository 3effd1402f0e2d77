import json
import math

import numpy as np
import pytest

import kgloc

kgloc.set_verbosity(0)


@pytest.fixture(scope="module")
def line():
    return kgloc.MomentumGrid(1, 512, 8.0, 1.0)


@pytest.fixture(scope="module")
def cube():
    return kgloc.MomentumGrid(3, 32, 8.0, 1.0)


def test_grid(line):
    assert line.dim == 1
    assert line.size == 512
    assert line.dp == pytest.approx(16.0 / 512)


def test_gaussian_norm_and_amplitudes(line):
    psi = kgloc.gaussian([0.3, 0, 0], 0.5, line, [1.0, 0, 0])
    assert psi.norm2() == pytest.approx(1.0, abs=1e-12)
    a = psi.amplitudes
    assert a.shape == (512,)
    assert np.iscomplexobj(a)
    other = kgloc.State(line)
    other.amplitudes = 2.0 * a
    assert other.norm2() == pytest.approx(4.0, rel=1e-12)
    assert kgloc.inner_product(psi, psi).real == pytest.approx(1.0, abs=1e-12)


def test_probabilities(cube):
    psi = kgloc.gaussian([0.2, -0.1, 0.0], 0.5, cube)
    s = kgloc.Slice(kgloc.Frame(), 0.3)
    whole = kgloc.Region.whole()
    assert kgloc.nw_probability(psi, s, whole)["value"] == pytest.approx(1.0, abs=1e-9)
    assert kgloc.terno_probability(psi, s, whole)["value"] == pytest.approx(1.0, abs=1e-9)
    ball = kgloc.Region.ball(kgloc.nw_centroid(psi, 0.3), 1.0)
    a = kgloc.terno_probability(psi, s, ball)
    b = kgloc.terno_probability_energy_form(psi, s, ball)
    assert abs(a["value"] - b["value"]) <= 3 * (a["err"] + b["err"])
    assert a["observable"] == "A"
    q_in = kgloc.nw_probability(psi, s, ball)["value"]
    q_out = kgloc.nw_probability(psi, s, ball.complement())["value"]
    assert q_in + q_out == pytest.approx(1.0, abs=1e-9)
    m = kgloc.m_probability(psi, kgloc.Frame(), s, ball)
    assert m["current_form"]["value"] == pytest.approx(a["value"], abs=1e-9)


def test_subluminal_velocity(line):
    for p in (-5.0, -1.0, 0.0, 2.0, 5.0):
        psi = kgloc.gaussian([p, 0, 0], 0.4, line)
        v = kgloc.velocity(psi)
        assert abs(v[0]) < 1.0
        assert math.copysign(1, v[0]) == math.copysign(1, p) or p == 0.0


def test_moments(line):
    psi = kgloc.gaussian([0.5, 0, 0], 0.5, line)
    r = kgloc.moments(psi, kgloc.Slice())
    assert len(r["first"]) == 1
    assert r["correction"][0] > 0
    assert r["heisenberg_lhs"][0] >= r["heisenberg_rhs"][0] - 3 * r["heisenberg_err"][0]


def test_cone_and_boost():
    s0 = kgloc.Slice(kgloc.Frame(), 0.0)
    s1 = kgloc.Slice(kgloc.Frame(), 2.0)
    grown = kgloc.cone_expand(kgloc.Region.ball([0, 0, 0], 1.0), s0, s1)
    assert grown.contains([2.9, 0, 0])
    assert not grown.contains([3.1, 0, 0])
    f = kgloc.Frame.from_velocity([0.6, 0, 0])
    assert f.n[0] == pytest.approx(1.25)


def test_run_suite_and_errors():
    cfg = "[run]\nseed = 3\nthreads = 1\n[suite.normalization]\ncases = 2\nn = 16\np_max = 6\n"
    v = kgloc.run_suite("normalization", cfg)
    assert v["name"] == "normalization"
    assert v["cases"] == 2
    assert v == kgloc.run_suite("normalization", cfg)
    with pytest.raises(ValueError, match="bogus"):
        kgloc.run_suite("normalization", "[run]\nbogus = 1\n")
    with pytest.raises(ValueError):
        kgloc.run_suite("nope")
    assert "moments" in kgloc.suite_names()
    assert "[run]" in kgloc.default_config()


def test_cli_exit_codes(tmp_path):
    assert kgloc.cli(["suite", "normalization", "-c", str(tmp_path / "missing.cfg")]) == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("[run]\nseed = x\n")
    assert kgloc.cli(["suite", "normalization", "-c", str(bad)]) == 2

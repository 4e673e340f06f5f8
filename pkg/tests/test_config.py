from fractions import Fraction

import pytest

from zkcyl.config import (
    SimConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    parse_power,
)
from zkcyl.errors import ConfigurationError
from zkcyl.scenarios import apply_overrides, preset_config


def test_defaults_validate():
    cfg = SimConfig().validate()
    assert cfg.grid.N == 512 and cfg.grid.L == 5.0
    assert cfg.layout.N_I == 20 and cfg.layout.N_II == 100
    assert cfg.physics.p == Fraction(7, 3)


def test_paper_soliton_config_loads(tmp_path):
    text = """
grid: {L: 5.0, N: 512}
layout: {rho0: 1.0, rho1: 20.0, N_I: 20, N_II: 100}
physics: {p: "7/3", c: 1.0}
integrator:
  legs:
    - {t_end: 1.0, N_t: 400}
initial: {kind: ground-state}
"""
    path = tmp_path / "cfg.yaml"
    path.write_text(text)
    cfg = load_config(path)
    assert cfg.physics.p == Fraction(7, 3)
    assert cfg.integrator.legs[0].N_t == 400


def test_rho_ordering_rejected(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("layout: {rho0: 20.0, rho1: 1.0}\n")
    with pytest.raises(ConfigurationError):
        load_config(path)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigurationError, match="unknown"):
        config_from_dict({"grid": {"L": 5.0, "M": 3}})
    with pytest.raises(ConfigurationError, match="unknown section"):
        config_from_dict({"grids": {}})


def test_rational_power_parsing():
    assert parse_power("7/3") == Fraction(7, 3)
    assert parse_power(2) == Fraction(2)
    assert parse_power(3.0) == Fraction(3)
    with pytest.raises(ConfigurationError):
        parse_power(2.3333333)
    with pytest.raises(ConfigurationError):
        parse_power("seven thirds")


def test_even_denominator_rejected():
    with pytest.raises(ConfigurationError, match="odd"):
        config_from_dict({"physics": {"p": "3/2"}})


def test_bad_legs_rejected():
    with pytest.raises(ConfigurationError, match="N_t"):
        config_from_dict({"integrator": {"legs": [{"t_end": 1.0, "N_t": 0}]}})
    with pytest.raises(ConfigurationError, match="t_end"):
        config_from_dict(
            {"integrator": {"legs": [{"t_end": 2.0, "N_t": 5}, {"t_end": 1.0, "N_t": 5}]}}
        )


def test_round_trip_dict():
    cfg = SimConfig().validate()
    data = config_to_dict(cfg)
    assert data["physics"]["p"] == "7/3"
    cfg2 = config_from_dict(data)
    assert config_to_dict(cfg2) == data


def test_overrides_beat_config():
    cfg = SimConfig().validate()
    out = apply_overrides(cfg, {"grid.N": 1024, "physics.p": "2"})
    assert out.grid.N == 1024
    assert out.physics.p == Fraction(2)
    with pytest.raises(ConfigurationError):
        apply_overrides(cfg, {"grid.bogus": 1})


def test_scenario_presets_pin_reference_parameters():
    """Every preset must reproduce the published run parameters exactly."""
    sol = preset_config("soliton-validate")
    assert (sol.grid.L, sol.grid.N) == (5.0, 2**9)
    assert (sol.layout.rho0, sol.layout.rho1) == (1.0, 20.0)
    assert (sol.layout.N_I, sol.layout.N_II) == (20, 100)
    assert [(leg.t_end, leg.N_t) for leg in sol.integrator.legs] == [(1.0, 400)]
    assert sol.initial.kind == "ground-state"

    p99 = preset_config("perturb-0.99")
    assert p99.initial.lam == 0.99
    assert [(leg.t_end, leg.N_t) for leg in p99.integrator.legs] == [(10.0, 1000)]
    assert p99.grid.N == 2**9

    p101 = preset_config("perturb-1.01")
    assert p101.initial.lam == 1.01
    assert p101.integrator.legs[-1].t_end == 50.0

    p110 = preset_config("perturb-1.1")
    assert p110.initial.lam == 1.1
    assert p110.grid.N == 2**12
    assert [(leg.t_end, leg.N_t) for leg in p110.integrator.legs] == [
        (4.0, 1000),
        (4.5, 1000),
    ]

    g5 = preset_config("gauss-5")
    assert (g5.initial.lam, g5.initial.alpha) == (5.0, 1.0)
    assert g5.grid.N == 2**10
    assert [(leg.t_end, leg.N_t) for leg in g5.integrator.legs] == [(10.0, 1000)]

    g65 = preset_config("gauss-6.5")
    assert g65.initial.lam == 6.5
    assert g65.grid.N == 2**12
    assert [(leg.t_end, leg.N_t) for leg in g65.integrator.legs] == [
        (0.75, 1000),
        (0.85, 1000),
    ]

    with pytest.raises(ConfigurationError):
        preset_config("nope")

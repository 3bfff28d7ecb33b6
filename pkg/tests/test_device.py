import math

import pytest
import yaml

from complementarity.device import (
    MHZ,
    NS,
    PRESETS,
    US,
    DeviceParams,
    load_config,
    params_from_mapping,
    params_to_mapping,
)
from complementarity.errors import ConfigurationError


def test_defaults_are_characterization_values():
    p = DeviceParams()
    assert p.g1 == pytest.approx(2 * math.pi * 19.2e6)
    assert p.g2 == pytest.approx(2 * math.pi * 19.9e6)
    assert p.omega_r == pytest.approx(2 * math.pi * 5.582e9)
    assert (p.t1_q1, p.t2star_q1, p.t1_q2, p.t2star_q2) == pytest.approx((17.1 * US, 3.0 * US, 23.4 * US, 2.4 * US))
    assert p.t_r == pytest.approx(10 * US)
    assert p.readout_q1[:2] == (0.9930, 0.8917)
    assert p.dims == (3, 2, 3)


def test_headline_preset():
    p = PRESETS["headline"]
    assert (p.t2star_q1, p.t2star_q2) == pytest.approx((3.6 * US, 2.7 * US))


def test_swap_duration():
    assert DeviceParams().swap_duration() / NS == pytest.approx(12.56, abs=1e-2)


@pytest.mark.parametrize(
    "changes",
    [
        {"t1_q1": 0.0},
        {"g2": -1.0},
        {"n_max": 0},
        {"dephasing": "other"},
        {"t1_q1": 1 * US, "t2star_q1": 3 * US},
        {"readout_q1": (0.5, 0.5)},
        {"readout_q2": (1.2, 0.9)},
    ],
)
def test_invalid_params(changes):
    with pytest.raises(ConfigurationError):
        DeviceParams(**changes)


def test_dephasing_rates():
    p = DeviceParams()
    assert p.pure_dephasing_rate_literal(1) == pytest.approx(1 / p.t2star_q1 - 1 / (2 * p.t1_q1))
    assert p.dephasing_channel_rate(1) == pytest.approx(2 / p.t2star_q1)
    m = p.with_(dephasing="master_equation")
    assert m.dephasing_channel_rate(2) == pytest.approx(m.pure_dephasing_rate_literal(2))


def test_mapping_roundtrip():
    p = PRESETS["headline"].with_(g1=20 * MHZ, n_max=3)
    assert params_from_mapping(params_to_mapping(p)) == p


def test_params_are_hashable():
    assert hash(DeviceParams()) == hash(DeviceParams())


def _write(tmp_path, doc):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(doc) if not isinstance(doc, str) else doc)
    return path


def test_load_config(tmp_path):
    path = _write(
        tmp_path,
        {"schema_version": 1, "preset": "headline", "device": {"g1_mhz": 18.0, "dephasing": "additive"}, "scenario": {"seed": 4}},
    )
    cfg = load_config(path)
    assert cfg["device"].g1 == pytest.approx(18 * MHZ)
    assert cfg["device"].t2star_q1 == pytest.approx(3.6 * US)
    assert cfg["scenario"] == {"seed": 4}


@pytest.mark.parametrize(
    "doc",
    [
        {"schema_version": 2},
        {"device": {}},
        {"schema_version": 1, "extra": 1},
        {"schema_version": 1, "device": {"g3_mhz": 1}},
        {"schema_version": 1, "device": {"g1_mhz": "fast"}},
        {"schema_version": 1, "preset": "lab"},
        "schema_version: [1",
        "- 1\n- 2\n",
    ],
)
def test_bad_configs(tmp_path, doc):
    with pytest.raises(ConfigurationError):
        load_config(_write(tmp_path, doc))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.yaml")

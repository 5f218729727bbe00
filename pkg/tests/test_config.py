import json
import math

import pytest

from magnon_metrology.config import load_params, params_from_mapping, parse_text, parse_value
from magnon_metrology.errors import ConfigError
from magnon_metrology.model import PhysicalParams

MHZ = 2 * math.pi * 1e6


@pytest.mark.parametrize("key,text,expected", [
    ("g_mc", "41 MHz", 41 * MHZ),
    ("g_mc", "0.041 GHz", 41 * MHZ),
    ("gamma_c", "5e6 Hz", 5 * MHZ),
    ("gamma_c", "3.1e7", 3.1e7),
    ("gamma_c", "3.1e7 rad/s", 3.1e7),
    ("theta", "1.65 pi", 1.65 * math.pi),
    ("theta", "90 deg", math.pi / 2),
    ("power", "500 mW", 0.5),
    ("temperature", "10 mK", 0.01),
    ("temperature", 0.2, 0.2),
])
def test_parse_value(key, text, expected):
    assert parse_value(key, text) == pytest.approx(expected)


@pytest.mark.parametrize("key,text", [("g_mc", "41 parsecs"), ("foo", "1"), ("power", "lots"),
                                      ("power", "2 gamma_c")])
def test_parse_value_errors(key, text):
    with pytest.raises(ConfigError):
        parse_value(key, text)


def test_relative_values_and_defaults():
    p = params_from_mapping({"lambda_opa": "0.65 gamma_c", "gamma_c": "15 MHz"})
    assert p.gamma_c == pytest.approx(15 * MHZ)
    assert p.lambda_opa == pytest.approx(0.65 * 15 * MHZ)
    assert p.g_mc == PhysicalParams.baseline().g_mc


def test_unknown_key_and_cycles():
    with pytest.raises(ConfigError):
        params_from_mapping({"gamma": "1 MHz"})
    with pytest.raises(ConfigError):
        params_from_mapping({"gamma_c": "2 gamma_m", "gamma_m": "2 gamma_c"})
    with pytest.raises(ConfigError):
        parse_text("gamma_c 5 MHz")
    with pytest.raises(ConfigError):
        parse_text("gamma_c = 5 MHz\ngamma_c = 6 MHz")


def test_invalid_values_become_config_errors():
    with pytest.raises(ConfigError):
        params_from_mapping({"gamma_c": "-5 MHz"})


def test_load_text_and_json(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("# operating point\ng_mc = 31 MHz   # weaker coupling\ntemperature = 50 mK\n")
    p = load_params(f)
    assert p.g_mc == pytest.approx(31 * MHZ) and p.temperature == pytest.approx(0.05)
    j = tmp_path / "p.json"
    j.write_text(json.dumps({"g_mc": "31 MHz", "temperature": 0.05}))
    assert load_params(j) == p
    j.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_params(j)

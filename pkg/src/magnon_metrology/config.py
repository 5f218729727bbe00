"""Parameter files and unit parsing.

A parameter file is flat ``key = value [unit]`` text (``#`` comments) or a JSON
object of the same keys. Missing keys fall back to the baseline operating point.
Values may carry units, or be given relative to another parameter of the same
kind, e.g. ``lambda_opa = 0.65 gamma_c`` or ``theta = 1.65 pi``.
"""
import json
import math
from pathlib import Path
import re

from .constants import TWO_PI
from .errors import ConfigError
from .model import PhysicalParams

RATES = ("delta_c", "delta_m", "gamma_c", "gamma_m", "g_mc", "lambda_opa", "omega_laser", "omega_c", "omega_m")
KIND = {**{k: "rate" for k in RATES}, "theta": "angle", "power": "power", "temperature": "temperature"}

UNITS = {
    "rate": {"rad/s": 1.0, "hz": TWO_PI, "khz": TWO_PI * 1e3, "mhz": TWO_PI * 1e6, "ghz": TWO_PI * 1e9,
             # explicit "2pi" aliases for readability in files
             "hz_2pi": TWO_PI, "khz_2pi": TWO_PI * 1e3, "mhz_2pi": TWO_PI * 1e6, "ghz_2pi": TWO_PI * 1e9},
    "angle": {"rad": 1.0, "pi": math.pi, "deg": math.pi / 180},
    "power": {"w": 1.0, "mw": 1e-3, "uw": 1e-6},
    "temperature": {"k": 1.0, "mk": 1e-3, "uk": 1e-6},
}
DEFAULT_UNIT = {"rate": "rad/s", "angle": "rad", "power": "w", "temperature": "k"}

_VALUE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def parse_value(key: str, text, resolved: dict | None = None) -> float:
    """Convert ``text`` for parameter ``key`` to SI / rad/s.

    Rate units (Hz, kHz, MHz, GHz) denote ordinary frequencies and are multiplied
    by 2 pi. A unit naming another parameter of the same kind is a ratio.
    """
    if key not in KIND:
        raise ConfigError(f"unknown parameter {key!r}")
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    m = _VALUE.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse {key} = {text!r}")
    number, unit = float(m.group(1)), m.group(2).strip()
    kind = KIND[key]
    if not unit:
        return number
    if unit in KIND:
        if KIND[unit] != kind:
            raise ConfigError(f"{key} cannot be given relative to {unit} (different kinds)")
        if resolved is None or unit not in resolved:
            raise ConfigError(f"{key} refers to {unit!r}, which is not available")
        return number * resolved[unit]
    table = UNITS[kind]
    if unit.lower() not in table:
        raise ConfigError(f"unknown unit {unit!r} for {key} (expected one of {sorted(table)})")
    return number * table[unit.lower()]


def parse_text(text: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if k in raw:
            raise ConfigError(f"line {lineno}: duplicate key {k!r}")
        raw[k] = v
    return raw


def params_from_mapping(raw: dict, base: PhysicalParams | None = None) -> PhysicalParams:
    """Build params from a mapping of (possibly unit-carrying) values on top of ``base``."""
    base = PhysicalParams.baseline() if base is None else base
    unknown = sorted(set(raw) - set(KIND))
    if unknown:
        raise ConfigError(f"unknown parameter(s): {', '.join(unknown)}")
    resolved = {k: v for k, v in base.as_dict().items() if v is not None}
    pending = dict(raw)
    # relative values may refer to keys given in the same file; resolve absolutes first
    for _ in range(len(pending) + 1):
        progressed = False
        for k in list(pending):
            v = pending[k]
            unit = _VALUE.match(str(v)).group(2).strip() if isinstance(v, str) and _VALUE.match(v) else ""
            if unit in pending and unit != k:
                continue
            resolved[k] = parse_value(k, v, resolved)
            del pending[k]
            progressed = True
        if not pending or not progressed:
            break
    if pending:
        raise ConfigError(f"circular relative definitions: {', '.join(sorted(pending))}")
    changes = {k: resolved[k] for k in raw}
    try:
        return base.replace(**changes)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_params(path) -> PhysicalParams:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a JSON object")
    else:
        raw = parse_text(text)
    return params_from_mapping(raw)

"""Parameter sweeps: specification, parallel evaluation and CSV/JSON output.

Axis and family ids name a parameter and how the numbers are read:

    gamma_c               native units (rad/s, W, K, rad)
    gamma_c_MHz           with a unit suffix (rates in Hz units are multiplied by 2 pi)
    lambda_opa_over_gamma_c, lambda_over_gamma_c
                          ratio to another parameter of the same kind
    theta_over_pi         angle in units of pi
    t_us                  evolution time in microseconds (dynamics regime only)
"""
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
import io
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .config import KIND, UNITS, params_from_mapping
from .errors import ConfigError, MagnonMetrologyError
from .model import PhysicalParams, build_model
from .dynamics import integrate
from .pipeline import QUANTITIES, Conventions, point_quantities, state_and_sensitivities
from .stability import routh_hurwitz

TIME_AXIS = "t_us"
ALIASES = {"lambda": "lambda_opa", "g": "g_mc", "T": "temperature", "P": "power"}
SIG_DIGITS = 12
STATUS_COLUMNS = ("chosen", "stable", "status")


def _resolve_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in KIND:
        raise ConfigError(f"unknown parameter id {name!r}")
    return name


@dataclass(frozen=True)
class ParamAxis:
    """A parsed axis/family id: value v sets ``target`` to v * factor (* params[ref])."""
    id: str
    target: str
    factor: float = 1.0
    ref: str | None = None

    @classmethod
    def parse(cls, axis_id: str) -> "ParamAxis":
        if axis_id == TIME_AXIS:
            return cls(axis_id, TIME_AXIS, 1e-6)
        if "_over_" in axis_id:
            left, right = axis_id.split("_over_", 1)
            target = _resolve_name(left)
            if right == "pi":
                if KIND[target] != "angle":
                    raise ConfigError(f"{axis_id}: only angles can be given in units of pi")
                return cls(axis_id, target, math.pi)
            ref = _resolve_name(right)
            if KIND[ref] != KIND[target]:
                raise ConfigError(f"{axis_id}: {target} and {ref} are of different kinds")
            return cls(axis_id, target, 1.0, ref)
        if axis_id in KIND or axis_id in ALIASES:
            return cls(axis_id, _resolve_name(axis_id))
        head, _, unit = axis_id.rpartition("_")
        if head:
            target = _resolve_name(head)
            table = UNITS[KIND[target]]
            if unit.lower() in table:
                return cls(axis_id, target, table[unit.lower()])
        raise ConfigError(f"unknown axis id {axis_id!r}")

    def apply(self, p: PhysicalParams, value: float) -> PhysicalParams:
        if self.target == TIME_AXIS:
            return p
        v = value * self.factor
        if self.ref is not None:
            v *= getattr(p, self.ref)
        return p.replace(**{self.target: v})


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ConfigError("grid count must be an integer >= 2")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.max <= self.min:
            raise ConfigError("grid needs finite min < max")
        if self.scale not in ("linear", "log"):
            raise ConfigError("grid scale must be 'linear' or 'log'")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError("log grid needs min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, int(self.count))
        return np.linspace(self.min, self.max, int(self.count))


@dataclass(frozen=True)
class SweepSpec:
    """One figure panel: an axis grid, an optional family of curves and the quantities to emit.

    regime "steady" uses the Lyapunov steady state; "dynamics" starts from the vacuum and
    either sweeps time (axis ``t_us``) or evaluates every point at ``t_us``.
    ``lambda_ratio`` ties lambda_opa = ratio * gamma_c after the axis/family are applied.
    ``subsystem`` overrides the convention for single-parameter QFIs and heterodyne CFIs.
    """
    name: str
    base: PhysicalParams
    axis: str
    grid: Grid
    family: str | None = None
    family_values: tuple = ()
    quantities: tuple = ("BMI",)
    regime: str = "steady"
    t_us: float | None = None
    lambda_ratio: float | None = None
    subsystem: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        axis = ParamAxis.parse(self.axis)
        if self.family is not None:
            if ParamAxis.parse(self.family).target == TIME_AXIS:
                raise ConfigError("time cannot be a family parameter")
            if not self.family_values:
                raise ConfigError("family needs at least one value")
        elif self.family_values:
            raise ConfigError("family_values given without a family id")
        bad = [q for q in self.quantities if q not in QUANTITIES]
        if bad or not self.quantities:
            raise ConfigError(f"unknown quantities {bad}; choose from {QUANTITIES}")
        if self.regime not in ("steady", "dynamics"):
            raise ConfigError("regime must be 'steady' or 'dynamics'")
        if axis.target == TIME_AXIS:
            if self.regime != "dynamics":
                raise ConfigError("a time axis needs the dynamics regime")
            if self.grid.min < 0:
                raise ConfigError("time grid must be non-negative")
        elif self.regime == "dynamics" and (self.t_us is None or self.t_us < 0):
            raise ConfigError("dynamics regime without a time axis needs t_us >= 0")
        if self.subsystem not in (None, "full", "cavity"):
            raise ConfigError("subsystem must be 'full' or 'cavity'")
        # every point must produce valid parameters
        for fv in self.families():
            for av in self.grid.values():
                self.point_params(fv, av)

    def families(self):
        return list(self.family_values) if self.family is not None else [None]

    def point_params(self, family_value, axis_value) -> PhysicalParams:
        p = self.base
        if self.family is not None:
            p = ParamAxis.parse(self.family).apply(p, family_value)
        p = ParamAxis.parse(self.axis).apply(p, axis_value)
        if self.lambda_ratio is not None:
            p = p.replace(lambda_opa=self.lambda_ratio * p.gamma_c)
        return p

    def columns(self) -> list[str]:
        cols = [self.axis] + ([self.family] if self.family is not None else [])
        return cols + list(self.quantities) + list(STATUS_COLUMNS)

    def n_points(self) -> int:
        return len(self.families()) * int(self.grid.count)

    def with_(self, **changes) -> "SweepSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return SweepSpec(**d)

    def to_dict(self) -> dict:
        return {
            "name": self.name, "base": self.base.as_dict(), "axis": self.axis, "grid": asdict(self.grid),
            "family": self.family, "family_values": list(self.family_values),
            "quantities": list(self.quantities), "regime": self.regime, "t_us": self.t_us,
            "lambda_ratio": self.lambda_ratio, "subsystem": self.subsystem, "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        known = {"name", "base", "axis", "grid", "family", "family_values", "quantities", "regime",
                 "t_us", "lambda_ratio", "subsystem", "meta"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown sweep spec keys: {sorted(unknown)}")
        try:
            grid = d["grid"]
            grid = Grid(float(grid["min"]), float(grid["max"]), int(grid["count"]), grid.get("scale", "linear"))
            base = {k: v for k, v in (d.get("base") or {}).items() if v is not None}
            return cls(
                name=d.get("name", "custom"), base=params_from_mapping(base), axis=d["axis"], grid=grid,
                family=d.get("family"), family_values=tuple(float(v) for v in d.get("family_values", ())),
                quantities=tuple(d.get("quantities", ("BMI",))), regime=d.get("regime", "steady"),
                t_us=d.get("t_us"), lambda_ratio=d.get("lambda_ratio"), subsystem=d.get("subsystem"),
                meta=d.get("meta", {}),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed sweep spec: {exc!r}") from exc


@dataclass
class SweepResult:
    spec: SweepSpec
    conventions: Conventions
    columns: list
    rows: list

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows], dtype=float if name not in ("chosen", "status") else object)

    def curves(self, quantity: str) -> dict:
        """{family value: (axis values, quantity values)} in grid order."""
        fam = self.spec.family
        out = {}
        x, y = self.column(self.spec.axis), self.column(quantity)
        keys = self.column(fam) if fam is not None else [None] * len(x)
        for k, xi, yi in zip(keys, x, y):
            out.setdefault(k, ([], []))
            out[k][0].append(xi)
            out[k][1].append(yi)
        return {k: (np.array(a), np.array(b)) for k, (a, b) in out.items()}

    def metadata(self) -> dict:
        return {"version": __version__, "spec": self.spec.to_dict(), "conventions": self.conventions.as_dict(),
                "columns": list(self.columns)}


def _nan_row(spec, fv, av, stable, status):
    head = [av] + ([fv] if spec.family is not None else [])
    return head + [math.nan] * len(spec.quantities) + ["", stable, status]


def _row(spec, fv, av, values, chosen, stable, status):
    head = [av] + ([fv] if spec.family is not None else [])
    return head + [values[q] for q in spec.quantities] + [chosen, stable, status]


def _status_of(exc: Exception) -> str:
    return type(exc).__name__


def _evaluate_steady(spec: SweepSpec, conv: Conventions, fi: int, ai: int, fv, av):
    p = spec.point_params(fv, av)
    try:
        verdict = routh_hurwitz(build_model(p).drift)
    except MagnonMetrologyError as exc:
        return _nan_row(spec, fv, av, False, _status_of(exc))
    if not verdict.stable:
        return _nan_row(spec, fv, av, False, "unstable")
    try:
        state, sens = state_and_sensitivities(p, None, conv)
        values, chosen, status = point_quantities(state, sens, conv, spec.quantities)
    except MagnonMetrologyError as exc:
        return _nan_row(spec, fv, av, True, _status_of(exc))
    return _row(spec, fv, av, values, chosen, True, status)


def _evaluate_time_curve(spec: SweepSpec, conv: Conventions, fi: int, fv, axis_values):
    p = spec.point_params(fv, axis_values[0])
    model = build_model(p, drive_couples_gamma=conv.drive_couples_gamma)
    stable = bool(routh_hurwitz(model.drift, check=False).stable)
    t = np.asarray(axis_values, dtype=float) * 1e-6
    prepend = t[0] > 0
    grid = np.concatenate([[0.0], t]) if prepend else t
    try:
        traj = integrate(model, grid, with_sensitivities=True)
    except MagnonMetrologyError as exc:
        return [_nan_row(spec, fv, av, stable, _status_of(exc)) for av in axis_values]
    rows = []
    for i, av in enumerate(axis_values):
        k = i + 1 if prepend else i
        try:
            values, chosen, status = point_quantities(traj.state(k), traj.sensitivity(k), conv, spec.quantities)
            rows.append(_row(spec, fv, av, values, chosen, stable, status))
        except MagnonMetrologyError as exc:
            rows.append(_nan_row(spec, fv, av, stable, _status_of(exc)))
    return rows


def _evaluate_dynamic_point(spec: SweepSpec, conv: Conventions, fv, av):
    p = spec.point_params(fv, av)
    stable = bool(routh_hurwitz(build_model(p).drift, check=False).stable)
    try:
        state, sens = state_and_sensitivities(p, spec.t_us * 1e-6, conv)
        values, chosen, status = point_quantities(state, sens, conv, spec.quantities)
    except MagnonMetrologyError as exc:
        return _nan_row(spec, fv, av, stable, _status_of(exc))
    return _row(spec, fv, av, values, chosen, stable, status)


def _run_task(task):
    """Evaluate one task; returns [(family index, axis index, row), ...]."""
    spec, conv, kind, fi, ais = task
    fv = spec.families()[fi]
    avs = spec.grid.values()
    if kind == "curve":
        rows = _evaluate_time_curve(spec, conv, fi, fv, [avs[i] for i in ais])
        return [(fi, ai, r) for ai, r in zip(ais, rows)]
    if kind == "steady":
        return [(fi, ai, _evaluate_steady(spec, conv, fi, ai, fv, avs[ai])) for ai in ais]
    return [(fi, ai, _evaluate_dynamic_point(spec, conv, fv, avs[ai])) for ai in ais]


def _tasks(spec: SweepSpec, conv: Conventions, chunk: int):
    n_axis = int(spec.grid.count)
    time_axis = ParamAxis.parse(spec.axis).target == TIME_AXIS
    for fi in range(len(spec.families())):
        if time_axis:
            yield (spec, conv, "curve", fi, list(range(n_axis)))
        else:
            kind = "steady" if spec.regime == "steady" else "point"
            for s in range(0, n_axis, chunk):
                yield (spec, conv, kind, fi, list(range(s, min(s + chunk, n_axis))))


def effective_conventions(spec: SweepSpec, conv: Conventions) -> Conventions:
    if spec.subsystem is None or spec.subsystem == conv.subsystem:
        return conv
    return Conventions(conv.het_noise, conv.drive_couples_gamma, conv.bmi_rule, spec.subsystem)


def run_sweep(spec: SweepSpec, workers: int = 1, conventions: Conventions = Conventions(),
              chunk: int = 25) -> SweepResult:
    """Evaluate the spec on every grid point; rows come back in (family, axis) grid order."""
    conv = effective_conventions(spec, conventions)
    tasks = list(_tasks(spec, conv, chunk))
    if workers <= 1 or len(tasks) == 1:
        parts = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_task, tasks))
    flat = sorted((item for part in parts for item in part), key=lambda x: (x[0], x[1]))
    return SweepResult(spec, conv, spec.columns(), [r for _, _, r in flat])


def format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.{SIG_DIGITS}g}"


def to_csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for r in result.rows:
        w.writerow([format_cell(x) for x in r])
    return buf.getvalue()


def to_json_obj(result: SweepResult) -> dict:
    def cell(x):
        s = format_cell(x)
        if isinstance(x, (bool, np.bool_)):
            return bool(x)
        if isinstance(x, str):
            return x
        return None if s == "nan" else float(s)
    return {"metadata": result.metadata(), "rows": [[cell(x) for x in r] for r in result.rows]}


def emit(result: SweepResult, path=None, fmt: str = "csv") -> str:
    """Write the result as CSV (header + 12 significant digits) or JSON (rows + metadata).

    Returns the text; writes it to ``path`` unless path is None or "-".
    """
    if fmt == "csv":
        text = to_csv_text(result)
    elif fmt == "json":
        text = json.dumps(to_json_obj(result), indent=1, sort_keys=False) + "\n"
    else:
        raise ConfigError("format must be 'csv' or 'json'")
    if path is not None and str(path) != "-":
        Path(path).write_text(text)
    return text


def read_csv(path_or_text) -> tuple[list, list]:
    """Parse an emitted CSV back into (columns, rows) with numeric cells as floats."""
    text = str(path_or_text)
    if "\n" not in text:
        text = Path(text).read_text()
    reader = csv.reader(io.StringIO(text))
    columns = next(reader, [])
    rows = []
    for r in reader:
        row = []
        for name, s in zip(columns, r):
            row.append(s if name in ("chosen", "status") else float(s))
        rows.append(row)
    return columns, rows

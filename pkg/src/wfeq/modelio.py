"""Model file schema and the trajectory/path output formats.

A model file is JSON with an integer "M" and exactly one of:

  "W"   -- (M+1) x (M+1) survival parameters in [0, 1]
  "V"   -- (M+1) x (M+1) direction parameters in [0, 1]
  "rho" -- M+1 positive frequencies summing to 1 (the diagonal subclass
           realizing that equilibrium)

Schema violations report the offending entry by index.  CSV output carries
floats at 17 significant digits so values round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ModelFormatError
from .model import DirectionMatrix, SimplexVector, SurvivalMatrix


def format_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ModelSpec:
    """A parsed model file: exactly one of the three parameterizations."""

    kind: str  # "W" | "V" | "rho"
    survival: SurvivalMatrix | None = None
    direction: DirectionMatrix | None = None
    rho: SimplexVector | None = None

    @property
    def n_states(self) -> int:
        obj = self.survival or self.direction or self.rho
        return obj.n_states


def _check_matrix_entries(rows, m_value: int, key: str) -> np.ndarray:
    dim = m_value + 1
    if not isinstance(rows, list) or len(rows) != dim:
        raise ModelFormatError(f'"{key}" must be a list of {dim} rows')
    arr = np.empty((dim, dim), dtype=float)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ModelFormatError(f'"{key}" row {i} must have {dim} entries')
        for j, value in enumerate(row):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ModelFormatError(f'"{key}" entry ({i}, {j}) is not a number')
            if not 0.0 <= float(value) <= 1.0:
                raise ModelFormatError(
                    f'"{key}" entry ({i}, {j}) = {value!r} outside [0, 1]'
                )
            arr[i, j] = float(value)
    return arr


def model_from_dict(doc: dict) -> ModelSpec:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    if "M" not in doc:
        raise ModelFormatError('missing required key "M"')
    m_value = doc["M"]
    if not isinstance(m_value, int) or isinstance(m_value, bool) or m_value < 1:
        raise ModelFormatError('"M" must be an integer >= 1')
    present = [key for key in ("W", "V", "rho") if key in doc]
    if len(present) != 1:
        raise ModelFormatError(
            'exactly one of "W", "V", "rho" must be present, '
            f"found {present or 'none'}"
        )
    unknown = set(doc) - {"M", "W", "V", "rho"}
    if unknown:
        raise ModelFormatError(f"unknown keys in model document: {sorted(unknown)}")
    key = present[0]
    if key == "rho":
        values = doc["rho"]
        dim = m_value + 1
        if not isinstance(values, list) or len(values) != dim:
            raise ModelFormatError(f'"rho" must be a list of {dim} numbers')
        for i, value in enumerate(values):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ModelFormatError(f'"rho" entry {i} is not a number')
            if not 0.0 < float(value) < 1.0:
                raise ModelFormatError(
                    f'"rho" entry {i} = {value!r} outside (0, 1)'
                )
        try:
            rho = SimplexVector(values)
        except ValueError as exc:
            raise ModelFormatError(f'invalid "rho": {exc}') from None
        return ModelSpec(kind="rho", rho=rho)
    arr = _check_matrix_entries(doc[key], m_value, key)
    if key == "W":
        return ModelSpec(kind="W", survival=SurvivalMatrix(arr))
    return ModelSpec(kind="V", direction=DirectionMatrix(arr))


def load_model(path: str) -> ModelSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return model_from_dict(doc)


def dump_model(spec: ModelSpec) -> str:
    doc: dict = {"M": spec.n_states - 1}
    if spec.kind == "W":
        doc["W"] = spec.survival.entries.tolist()
    elif spec.kind == "V":
        doc["V"] = spec.direction.entries.tolist()
    else:
        doc["rho"] = spec.rho.values.tolist()
    return json.dumps(doc, indent=2)


# ----------------------------------------------------------------------
# CSV / JSON writers
# ----------------------------------------------------------------------

def trajectory_csv_lines(states: np.ndarray, column_names=None):
    """Rows of `k,p_0,...,p_M` (or custom column names) as text lines."""
    states = np.asarray(states)
    dim = states.shape[1]
    if column_names is None:
        column_names = [f"p_{m}" for m in range(dim)]
    yield "k," + ",".join(column_names)
    for k, row in enumerate(states):
        yield f"{k}," + ",".join(format_float(x) for x in row)


def paths_csv_lines(counts: np.ndarray):
    """Rows of `replica,k,count_0,...,count_M` for stacked replica paths."""
    counts = np.asarray(counts)
    dim = counts.shape[2]
    yield "replica,k," + ",".join(f"count_{m}" for m in range(dim))
    for replica in range(counts.shape[0]):
        for k in range(counts.shape[1]):
            row = ",".join(str(int(c)) for c in counts[replica, k])
            yield f"{replica},{k},{row}"


def trajectory_json_lines(states: np.ndarray, column_names=None):
    """The trajectory table as a single JSON document (same data as the CSV)."""
    states = np.asarray(states)
    dim = states.shape[1]
    if column_names is None:
        column_names = [f"p_{m}" for m in range(dim)]
    doc = {
        "columns": ["k", *column_names],
        "rows": [[k, *map(float, row)] for k, row in enumerate(states)],
    }
    yield from json_text(doc).splitlines()


def paths_json_lines(counts: np.ndarray):
    """The replica-path table as a single JSON document."""
    counts = np.asarray(counts)
    dim = counts.shape[2]
    doc = {
        "columns": ["replica", "k", *(f"count_{m}" for m in range(dim))],
        "rows": [
            [replica, k, *map(int, counts[replica, k])]
            for replica in range(counts.shape[0])
            for k in range(counts.shape[1])
        ],
    }
    yield from json_text(doc).splitlines()


def write_lines(lines, fh) -> None:
    for line in lines:
        fh.write(line)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=False, default=_jsonable)

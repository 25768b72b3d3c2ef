"""Model files and CSV data exchange.

A model file is JSON with fields ``dim``, ``intercepts``, ``coefficients``
and optional ``price`` and ``region``. The region is a list of records:

    {"type": "lower_bound", "index": 0, "value": 1.25}
    {"type": "ball", "center": [0.0, 0.0], "radius": 10.0}
    {"type": "marginal_cutoff", "epsilon": 1e-6}

where the cutoff implicitly binds to the file's own system. Sample CSVs
have a header ``y,x1,...,xn`` with optional ``label`` and ``segment``
columns. All writers go through a temp-then-rename so a failed run never
leaves a partial output file.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from effode.efficiency import Observation, Sample, ScoreBreakdown
from effode.errors import SchemaError
from effode.model import InputSystem, require_valid
from effode.region import Ball, FeasibleRegion, LowerBound, MarginalCutoff

STDOUT_SENTINEL = "-"


@dataclass(frozen=True)
class ModelFile:
    system: InputSystem
    price: Optional[float] = None
    region: Optional[FeasibleRegion] = None


def _require_number(obj, name):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(f"model file: field {name!r} must be a number, got {obj!r}")
    return float(obj)


def _require_vector(obj, name, n):
    if not isinstance(obj, list) or len(obj) != n:
        raise SchemaError(f"model file: field {name!r} must be an array of {n} numbers")
    return [_require_number(v, f"{name}[{i}]") for i, v in enumerate(obj)]


def _parse_region(records, system) -> FeasibleRegion:
    if not isinstance(records, list) or not records:
        raise SchemaError("model file: 'region' must be a non-empty array of records")
    constraints = []
    for i, rec in enumerate(records):
        where = f"region[{i}]"
        if not isinstance(rec, dict) or "type" not in rec:
            raise SchemaError(f"model file: {where} must be an object with a 'type'")
        kind = rec["type"]
        if kind == "lower_bound":
            idx = rec.get("index")
            if not isinstance(idx, int) or isinstance(idx, bool) or not 0 <= idx < system.dim:
                raise SchemaError(
                    f"model file: {where}.index must be an integer in [0, {system.dim})"
                )
            constraints.append(LowerBound(idx, _require_number(rec.get("value"), f"{where}.value")))
        elif kind == "ball":
            center = _require_vector(rec.get("center"), f"{where}.center", system.dim)
            radius = _require_number(rec.get("radius"), f"{where}.radius")
            if radius <= 0:
                raise SchemaError(f"model file: {where}.radius must be positive")
            constraints.append(Ball(np.array(center), radius))
        elif kind == "marginal_cutoff":
            eps = _require_number(rec.get("epsilon"), f"{where}.epsilon")
            if eps <= 0:
                raise SchemaError(f"model file: {where}.epsilon must be positive")
            constraints.append(MarginalCutoff(system, eps))
        else:
            raise SchemaError(f"model file: {where}.type {kind!r} is not recognized")
    return FeasibleRegion(tuple(constraints))


def parse_model(text: str) -> ModelFile:
    """Parse model-file JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError("model file: top level must be a JSON object")
    for key in ("dim", "intercepts", "coefficients"):
        if key not in doc:
            raise SchemaError(f"model file: missing required field {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError(f"model file: 'dim' must be a positive integer, got {dim!r}")
    intercepts = _require_vector(doc["intercepts"], "intercepts", dim)
    coeffs = doc["coefficients"]
    if not isinstance(coeffs, list) or len(coeffs) != dim:
        raise SchemaError(f"model file: 'coefficients' must be an array of {dim} rows")
    rows = [_require_vector(row, f"coefficients[{i}]", dim) for i, row in enumerate(coeffs)]
    system = require_valid(InputSystem(dim=dim, intercepts=intercepts, coefficients=rows))

    price = None
    if doc.get("price") is not None:
        price = _require_number(doc["price"], "price")
        if price <= 0:
            raise SchemaError("model file: 'price' must be positive")
    region = None
    if doc.get("region") is not None:
        region = _parse_region(doc["region"], system)
    return ModelFile(system=system, price=price, region=region)


def load_model(path: str) -> ModelFile:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_model(handle.read())


def _region_records(region: FeasibleRegion) -> list[dict]:
    records = []
    for c in region.constraints:
        if isinstance(c, LowerBound):
            records.append({"type": "lower_bound", "index": c.index, "value": c.bound})
        elif isinstance(c, Ball):
            records.append(
                {"type": "ball", "center": [float(v) for v in c.center], "radius": c.radius}
            )
        else:
            records.append({"type": "marginal_cutoff", "epsilon": c.epsilon})
    return records


def format_model(
    system: InputSystem,
    price: Optional[float] = None,
    region: Optional[FeasibleRegion] = None,
) -> str:
    """Model-file JSON text (deterministic layout)."""
    doc = {
        "dim": int(system.dim),
        "intercepts": [float(v) for v in system.intercepts],
        "coefficients": [[float(v) for v in row] for row in system.coefficients],
    }
    if price is not None:
        doc["price"] = float(price)
    if region is not None:
        doc["region"] = _region_records(region)
    return json.dumps(doc, indent=2) + "\n"


def parse_sample_csv(text: str) -> tuple[list[Sample], bool]:
    """Parse sample CSV text into segments.

    Returns (segments, had_segment_column). Without a ``segment`` column
    there is exactly one segment. Rows keep file order within a segment;
    segments appear in order of first occurrence.
    """
    reader = csv.reader(_stdio.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("data file: empty, expected a header row") from None
    header = [h.strip() for h in header]
    cols = {name: i for i, name in enumerate(header)}
    if "y" not in cols:
        raise SchemaError("data file: header must contain a 'y' column")
    input_names = []
    i = 1
    while f"x{i}" in cols:
        input_names.append(f"x{i}")
        i += 1
    if not input_names:
        raise SchemaError("data file: header must contain columns x1..xn")
    known = {"y", "label", "segment", *input_names}
    unknown = [h for h in header if h not in known]
    if unknown:
        raise SchemaError(f"data file: unrecognized columns {unknown}")

    groups: dict[str, list[Observation]] = {}
    order: list[str] = []
    for row_num, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise SchemaError(
                f"data file row {row_num}: {len(row)} cells, expected {len(header)}"
            )

        def cell(name):
            return row[cols[name]].strip()

        try:
            y = float(cell("y"))
            inputs = [float(cell(name)) for name in input_names]
        except ValueError as exc:
            raise SchemaError(f"data file row {row_num}: non-numeric value ({exc})") from exc
        label = cell("label") if "label" in cols and cell("label") else None
        segment = cell("segment") if "segment" in cols else ""
        try:
            obs = Observation(output=y, inputs=inputs, label=label)
        except Exception as exc:
            raise SchemaError(f"data file row {row_num}: {exc}") from exc
        if segment not in groups:
            groups[segment] = []
            order.append(segment)
        groups[segment].append(obs)

    if not order:
        raise SchemaError("data file: no data rows")
    segments = [Sample(tuple(groups[name])) for name in order]
    return segments, "segment" in cols


def load_sample_csv(path: str) -> tuple[list[Sample], bool]:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_sample_csv(handle.read())


def flatten_segments(segments: list[Sample]) -> Sample:
    observations = []
    for seg in segments:
        observations.extend(seg.observations)
    return Sample(tuple(observations))


def format_score_csv(results: list[tuple[str, ScoreBreakdown]], outputs: list[float]) -> str:
    """Score report CSV: 6 significant digits for distances, 4 for efficiency."""
    lines = ["label,y,d_j,d_w,efficiency,clamped"]
    for (label, br), y in zip(results, outputs):
        lines.append(
            f"{label},{y:.6g},{br.d_j:.6g},{br.d_w:.6g},"
            f"{br.efficiency:.4g},{'true' if br.clamped else 'false'}"
        )
    return "\n".join(lines) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write the whole text, temp-then-rename; '-' streams to stdout."""
    if path == STDOUT_SENTINEL:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".effode-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise

"""File formats: domain-spec JSON and CSV value tables.

Domain specs are JSON objects with the common fields

    {"kind": "box" | "points" | "cylinder", "mesh_denominator": int, "dimension": int, ...}

plus kind-specific fields: "side_lengths" (box, whole units), "interior"
(points, list of integer coordinate tuples), and "base" + "half_length_lattice"
(cylinder; the half-length is stored in lattice steps so the round trip is
lossless).  Grid functions and point-value maps travel as CSV with columns
coord_1..coord_m,value; integer lattice coordinates, shortest round-trip float
text.  All writers go through an atomic rename.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cylinder import CylinderSpec, make_cylinder_spec
from .lattice import GridDomain, Mesh, Point, build_box_domain, points_domain
from .operators import GridFunction


class FormatError(ValueError):
    """Malformed input file; the message names file and field/line."""


def atomic_write_text(path, text: str) -> None:
    """Write text to `path` via a temp file and rename, so readers never see partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------- domains


def box_spec(denominator: int, side_lengths: Sequence[int]) -> dict:
    return {
        "kind": "box",
        "mesh_denominator": int(denominator),
        "dimension": len(side_lengths),
        "side_lengths": [int(s) for s in side_lengths],
    }


def points_spec(denominator: int, dimension: int, interior: Iterable[Point]) -> dict:
    pts = sorted(tuple(int(c) for c in p) for p in interior)
    return {
        "kind": "points",
        "mesh_denominator": int(denominator),
        "dimension": int(dimension),
        "interior": [list(p) for p in pts],
    }


def cylinder_spec_dict(base: dict, half_length_lattice: int) -> dict:
    return {
        "kind": "cylinder",
        "mesh_denominator": base["mesh_denominator"],
        "dimension": base["dimension"] + 1,
        "base": base,
        "half_length_lattice": int(half_length_lattice),
    }


def _require(spec: Mapping, field: str, source: str):
    if field not in spec:
        raise FormatError(f"{source}: missing field '{field}'")
    return spec[field]


def validate_domain_spec(spec: Mapping, source: str = "<domain spec>") -> dict:
    """Structural validation with diagnostics naming the offending field."""
    if not isinstance(spec, Mapping):
        raise FormatError(f"{source}: domain spec must be a JSON object")
    kind = _require(spec, "kind", source)
    denom = _require(spec, "mesh_denominator", source)
    dim = _require(spec, "dimension", source)
    if not isinstance(denom, int) or denom < 2:
        raise FormatError(f"{source}: field 'mesh_denominator' must be an integer >= 2")
    if not isinstance(dim, int) or dim < 1:
        raise FormatError(f"{source}: field 'dimension' must be a positive integer")
    if kind == "box":
        sides = _require(spec, "side_lengths", source)
        if not isinstance(sides, list) or len(sides) != dim or not all(
            isinstance(s, int) and s >= 1 for s in sides
        ):
            raise FormatError(f"{source}: field 'side_lengths' must be {dim} positive integers")
    elif kind == "points":
        pts = _require(spec, "interior", source)
        if not isinstance(pts, list) or not pts:
            raise FormatError(f"{source}: field 'interior' must be a nonempty list")
        for p in pts:
            if not isinstance(p, list) or len(p) != dim or not all(isinstance(c, int) for c in p):
                raise FormatError(f"{source}: field 'interior' entry {p!r} is not {dim} integers")
    elif kind == "cylinder":
        hl = _require(spec, "half_length_lattice", source)
        if not isinstance(hl, int) or hl < 1:
            raise FormatError(f"{source}: field 'half_length_lattice' must be a positive integer")
        base = _require(spec, "base", source)
        base = validate_domain_spec(base, f"{source}: field 'base'")
        if base["mesh_denominator"] != denom or base["dimension"] != dim - 1:
            raise FormatError(f"{source}: field 'base' mesh/dimension inconsistent with cylinder")
        if base["kind"] == "cylinder":
            raise FormatError(f"{source}: field 'base' must be a box or points spec")
    else:
        raise FormatError(f"{source}: field 'kind' must be 'box', 'points' or 'cylinder', got {kind!r}")
    return dict(spec)


def read_domain_spec(path) -> dict:
    path = os.fspath(path)
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    return validate_domain_spec(raw, path)


def write_domain_spec(path, spec: Mapping) -> None:
    validate_domain_spec(spec, os.fspath(path))
    atomic_write_text(path, json.dumps(spec, indent=2, sort_keys=True) + "\n")


def realize_domain(spec: Mapping, source: str = "<domain spec>") -> GridDomain:
    spec = validate_domain_spec(spec, source)
    kind = spec["kind"]
    if kind == "box":
        mesh = Mesh(spec["mesh_denominator"], spec["dimension"])
        return build_box_domain(mesh, spec["side_lengths"])
    if kind == "points":
        mesh = Mesh(spec["mesh_denominator"], spec["dimension"])
        return points_domain(mesh, (tuple(p) for p in spec["interior"]))
    base = realize_domain(spec["base"], f"{source}: field 'base'")
    return make_cylinder_spec(base, spec["half_length_lattice"]).domain


def realize_cylinder(spec: Mapping, source: str = "<domain spec>") -> CylinderSpec:
    spec = validate_domain_spec(spec, source)
    if spec["kind"] != "cylinder":
        raise FormatError(f"{source}: expected a cylinder spec, got kind {spec['kind']!r}")
    base = realize_domain(spec["base"], f"{source}: field 'base'")
    return make_cylinder_spec(base, spec["half_length_lattice"])


# ------------------------------------------------------------------ CSV tables


def _format_row(values) -> list[str]:
    out = []
    for v in values:
        if isinstance(v, (bool, np.bool_)):
            out.append("PASS" if v else "FAIL")
        elif isinstance(v, (int, np.integer)):
            out.append(str(int(v)))
        elif isinstance(v, (float, np.floating)):
            out.append(repr(float(v)))
        else:
            out.append(str(v))
    return out


def write_table_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Generic CSV writer; floats use shortest round-trip text."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(_format_row(row))
    atomic_write_text(path, buf.getvalue())


def write_grid_function_csv(path, u: GridFunction) -> None:
    m = u.domain.mesh.dimension
    header = [f"coord_{a + 1}" for a in range(m)] + ["value"]
    rows = (list(p) + [float(v)] for p, v in zip(u.domain.points, u.values))
    write_table_csv(path, header, rows)


def read_point_values_csv(path) -> dict[Point, float]:
    """CSV with columns coord_1..coord_m,value -> mapping from points to values."""
    path = os.fspath(path)
    out: dict[Point, float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: line 1: empty file") from None
        if len(header) < 2 or header[-1] != "value":
            raise FormatError(f"{path}: line 1: expected header coord_1..coord_m,value")
        m = len(header) - 1
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != m + 1:
                raise FormatError(f"{path}: line {lineno}: expected {m + 1} fields, got {len(row)}")
            try:
                pt = tuple(int(c) for c in row[:m])
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: non-integer coordinate") from None
            try:
                val = float(row[m])
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: field 'value' is not a number") from None
            if pt in out:
                raise FormatError(f"{path}: line {lineno}: duplicate point {pt}")
            out[pt] = val
    return out


def read_grid_function_csv(path, domain: GridDomain) -> GridFunction:
    mapping = read_point_values_csv(path)
    missing = [p for p in domain.points if p not in mapping]
    if missing:
        raise FormatError(f"{os.fspath(path)}: missing value for domain point {missing[0]}")
    extra = set(mapping) - set(domain.points)
    if extra:
        raise FormatError(f"{os.fspath(path)}: value for non-domain point {next(iter(extra))}")
    return GridFunction.from_map(domain, mapping)


def write_point_values_csv(path, mapping: Mapping[Point, float], dimension: int) -> None:
    header = [f"coord_{a + 1}" for a in range(dimension)] + ["value"]
    rows = (list(p) + [float(v)] for p, v in sorted(mapping.items()))
    write_table_csv(path, header, rows)

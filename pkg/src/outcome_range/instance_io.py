"""JSON instance files.

Schema: ``m``, ``n``, ``A`` (row-major list of rows), ``b_lower``,
``b_upper``, ``c``, ``r`` and an optional ``name``.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, InputError, ParseError
from .intervals import IntervalVector
from .lp import IlpInstance

BUNDLED = ("example1", "example2", "example3", "transportation")
REQUIRED = ("m", "n", "A", "b_lower", "b_upper", "c", "r")


def instance_to_dict(inst: IlpInstance, r) -> dict:
    data = {
        "m": inst.m,
        "n": inst.n,
        "A": [[float(v) for v in row] for row in inst.A],
        "b_lower": [float(v) for v in inst.b.lower],
        "b_upper": [float(v) for v in inst.b.upper],
        "c": [float(v) for v in inst.c],
        "r": [float(v) for v in np.asarray(r, dtype=float)],
    }
    if inst.name is not None:
        data["name"] = inst.name
    return data


def instance_from_dict(data) -> tuple[IlpInstance, np.ndarray]:
    if not isinstance(data, dict):
        raise ParseError("instance file must contain a JSON object")
    missing = [key for key in REQUIRED if key not in data]
    if missing:
        raise ParseError(f"missing fields: {', '.join(missing)}")
    try:
        m, n = int(data["m"]), int(data["n"])
        A = np.array(data["A"], dtype=float)
        lo = np.array(data["b_lower"], dtype=float)
        up = np.array(data["b_upper"], dtype=float)
        c = np.array(data["c"], dtype=float)
        r = np.array(data["r"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric entry: {exc}") from exc
    if A.size == 0:
        A = A.reshape(m, n)
    if A.shape != (m, n):
        raise DimensionMismatch(f"A has shape {A.shape}, expected ({m}, {n})")
    for key, vec, size in (("b_lower", lo, m), ("b_upper", up, m), ("c", c, n), ("r", r, n)):
        if vec.shape != (size,):
            raise DimensionMismatch(f"{key} has {vec.size} entries, expected {size}")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string")
    return IlpInstance(A, c, IntervalVector(lo, up), name), r


def dumps(inst: IlpInstance, r) -> str:
    return json.dumps(instance_to_dict(inst, r), indent=2) + "\n"


def write_instance(path: Union[str, Path], inst: IlpInstance, r) -> None:
    Path(path).write_text(dumps(inst, r), encoding="utf-8")


def read_instance(path: Union[str, Path]) -> tuple[IlpInstance, np.ndarray]:
    """Load an instance file; bundled example names are accepted as well."""
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        return bundled(str(path))
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return instance_from_dict(data)


def bundled(name: str) -> tuple[IlpInstance, np.ndarray]:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise InputError(f"unknown bundled instance {name!r}; choose from {', '.join(BUNDLED)}")
    text = resources.files("outcome_range").joinpath("data", f"{stem}.json").read_text("utf-8")
    return instance_from_dict(json.loads(text))


def bundled_path(name: str) -> Optional[Path]:
    ref = resources.files("outcome_range").joinpath("data", f"{name}.json")
    return Path(str(ref)) if ref.is_file() else None

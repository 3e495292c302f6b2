"""JSON/CSV artifacts: floats at 17 significant digits, atomic writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .groups import Ball
from .kernels import Kernel

KERNEL_SCHEMA = "ubrep.kernel/1"
BALL_SCHEMA = "ubrep.ball/1"
CERTIFICATE_SCHEMA = "ubrep.certificate/1"
REP_SCHEMA = "ubrep.representation/1"
SCHUR_SCHEMA = "ubrep.schur/1"
COCYCLE_SCHEMA = "ubrep.cocycle/1"

SCHEMAS = (KERNEL_SCHEMA, BALL_SCHEMA, CERTIFICATE_SCHEMA, REP_SCHEMA, SCHUR_SCHEMA, COCYCLE_SCHEMA)


def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj, 2, 0) + "\n"


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj) -> Path:
    return write_atomic(path, dumps(obj))


def load_json(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    schema = data.get("schema")
    if schema not in SCHEMAS:
        raise SchemaError(f"{path}: unknown schema {schema!r}")
    return data


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def ball_to_json(ball: Ball) -> dict:
    fmt = ball.group.format_element
    return {
        "schema": BALL_SCHEMA,
        "group": ball.group.spec(),
        "radius": ball.radius,
        "size": len(ball),
        "elements": [fmt(g) for g in ball.elements],
        "distances": ball.distances.tolist(),
    }


def kernel_to_json(kernel: Kernel, group_spec: str | None = None) -> dict:
    S = kernel.support
    return {
        "schema": KERNEL_SCHEMA,
        "group": group_spec or kernel.ball.group.spec(),
        "radius": kernel.ball.radius,
        "provenance": kernel.provenance,
        "parameters": kernel.params,
        "S": None if math.isinf(S) else int(S),
        "seed": kernel.seed,
        "size": len(kernel.values),
        "values": kernel.values.ravel().tolist(),
    }


def kernel_from_json(data: dict) -> Kernel:
    from .groups import ball_enumerate, full_ball, parse_group

    if data.get("schema") != KERNEL_SCHEMA:
        raise SchemaError(f"expected {KERNEL_SCHEMA}, got {data.get('schema')!r}")
    for key in ("group", "radius", "provenance", "parameters", "S", "values"):
        if key not in data:
            raise SchemaError(f"kernel file missing field {key!r}")
    group = parse_group(data["group"])
    ball = ball_enumerate(group, int(data["radius"]))
    n = len(ball)
    values = np.asarray(data["values"], dtype=float)
    if values.size != n * n:
        raise SchemaError(f"field 'values' has {values.size} entries, expected {n * n}")
    S = math.inf if data["S"] is None else data["S"]
    return Kernel(ball, values.reshape(n, n), S, data["provenance"], dict(data["parameters"]),
                  seed=data.get("seed"))


def certificate_to_json(cert) -> dict:
    return {
        "schema": CERTIFICATE_SCHEMA,
        "direction": cert.direction,
        "group": cert.group,
        "window": cert.window,
        "epsilon_target": cert.epsilon_target,
        "epsilon_measured": cert.epsilon_measured,
        "S_declared": None if math.isinf(cert.S_declared) else cert.S_declared,
        "S_measured": cert.S_measured,
        "verdicts": dict(cert.verdicts),
        "witnesses": list(cert.witnesses),
        "pass": cert.passed,
        "details": dict(cert.details),
    }

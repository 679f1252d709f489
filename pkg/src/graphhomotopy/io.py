"""File formats: headerless CSV matrices and datasets, JSON partitions and reports, DOT graphs."""
from __future__ import annotations

import hashlib
import json
import os
import platform
import tempfile
import time
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError
from .graphs import Partition
from .linalg import SymMatrix

TIMESTAMP_KEY = "wall_clock"


def _fmt(v: float) -> str:
    return repr(float(v))


def parse_csv(text: str, path=None) -> np.ndarray:
    """Comma-separated decimal literals, one row per line, no header.

    Blank lines are skipped. Every row must have the same number of fields.
    """
    rows, width, first = [], None, None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        row = []
        for col, field in enumerate(fields, start=1):
            tok = field.strip()
            try:
                val = float(tok)
            except ValueError:
                raise ParseError(f"not a number: {tok!r}", path=path, line=lineno, column=col) from None
            if not np.isfinite(val):
                raise ParseError(f"non-finite value {tok!r}", path=path, line=lineno, column=col)
            row.append(val)
        if width is None:
            width, first = len(row), lineno
        elif len(row) != width:
            raise ParseError(f"expected {width} fields as on line {first}, found {len(row)}",
                             path=path, line=lineno, column=min(len(row), width) + 1)
        rows.append(row)
    if not rows:
        raise ParseError("no data rows", path=path, line=1, column=1)
    return np.array(rows, dtype=np.float64)


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc}", path=path) from None


def read_matrix(path) -> SymMatrix:
    a = parse_csv(_read_text(path), path)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{path}: matrix is {a.shape[0]} x {a.shape[1]}, not square")
    return SymMatrix(a)


def read_dataset(path) -> np.ndarray:
    return parse_csv(_read_text(path), path)


def format_csv(m) -> str:
    a = np.atleast_2d(np.asarray(m, dtype=np.float64))
    return "".join(",".join(_fmt(v) for v in row) + "\n" for row in a)


def format_rows(rows) -> str:
    """CSV text from rows of already formatted or numeric cells."""
    out = []
    for row in rows:
        out.append(",".join(c if isinstance(c, str) else _fmt(c) if isinstance(c, float) else str(c)
                            for c in row))
    return "\n".join(out) + "\n"


def parse_partition(text: str, path=None) -> Partition:
    """JSON array of arrays of 1-based indices, e.g. ``[[1], [2, 3], [4]]``."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from None
    if not isinstance(obj, list) or not all(isinstance(c, list) for c in obj):
        raise ParseError("partition must be an array of arrays", path=path, line=1, column=1)
    for c in obj:
        for i in c:
            if isinstance(i, bool) or not isinstance(i, int):
                raise ParseError(f"cluster entries must be integers, got {i!r}", path=path, line=1, column=1)
    try:
        return Partition(obj)
    except ValueError as exc:
        raise ParseError(str(exc), path=path, line=1, column=1) from None


def read_partition(path) -> Partition:
    return parse_partition(_read_text(path), path)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def atomic_write(path, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest(command: str, inputs: dict | None = None, config: dict | None = None,
             seed: int | None = None) -> dict:
    """Run record embedded in every report; only ``wall_clock`` varies between identical runs."""
    from . import __version__
    return {
        "command": command,
        "inputs": {k: {"path": str(v), "sha256": sha256_file(v)} for k, v in sorted((inputs or {}).items())},
        "config": config or {},
        "seed": seed,
        "tool_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        TIMESTAMP_KEY: time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def strip_timestamp(report: dict) -> dict:
    out = json.loads(json.dumps(report, default=_json_default))
    out.get("manifest", {}).pop(TIMESTAMP_KEY, None)
    return out

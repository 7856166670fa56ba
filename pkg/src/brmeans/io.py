"""CSV / JSON serialization with provenance headers.

Every file starts with a comment line ``# config_hash=<hash> seed=<seed>``
(JSON files carry the same fields under ``"_meta"``). Floats are printed with
12 significant digits through ``repr``-free formatting, independent of locale.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .spectral import GridFunction, SpectralPolynomial

DIGITS = 12


def fmt(x) -> str:
    """Format a scalar for CSV output."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0:
            return "0"
        return f"{x:.{DIGITS}g}"
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt(x)
        return float(fmt(x))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def config_hash(config: dict) -> str:
    """Short SHA-256 of the canonical JSON form of a config."""
    blob = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header_line(chash: str, seed) -> str:
    return f"# config_hash={chash} seed={seed}"


def parse_header(line: str) -> dict:
    out = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k] = v
    return out


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], chash: str = "none", seed=None,
              extra: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        head = header_line(chash, seed)
        if extra:
            head += " " + json.dumps(_jsonable(extra), sort_keys=True, separators=(",", ":"))
        fh.write(head + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Header fields, column names and raw string rows."""
    with open(path, newline="") as fh:
        first = fh.readline()
        meta = parse_header(first.split("{", 1)[0])
        if "{" in first:
            meta.update(json.loads("{" + first.split("{", 1)[1]))
        r = csv.reader(fh)
        cols = next(r)
        rows = [row for row in r if row]
    return meta, cols, rows


def write_json(path, obj: dict, chash: str = "none", seed=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = dict(_jsonable(obj))
    body["_meta"] = {"config_hash": chash, "seed": seed}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return path


def save_grid_function(path, f: GridFunction, chash: str = "none", seed=None) -> Path:
    """Row-major values, one per line, under a JSON header {dims, resolution}."""
    return write_csv(path, ["value"], ([v] for v in f.values.ravel()), chash, seed,
                     extra={"dims": f.dims, "resolution": f.resolution})


def load_grid_function(path) -> GridFunction:
    meta, _, rows = read_csv(path)
    d, N = int(meta["dims"]), int(meta["resolution"])
    return GridFunction(np.array([float(r[0]) for r in rows]).reshape((N,) * d))


def save_polynomial(path, T: SpectralPolynomial, chash: str = "none", seed=None) -> Path:
    d = T.dims
    cols = [f"k{i + 1}" for i in range(d)] + ["re", "im"]
    rows = [list(k) + [c.real, c.imag] for k, c in T.items()]
    return write_csv(path, cols, rows, chash, seed, extra={"dims": d, "degree": T.degree})


def load_polynomial(path) -> SpectralPolynomial:
    meta, cols, rows = read_csv(path)
    d, n = int(meta["dims"]), int(meta["degree"])
    coeffs = {tuple(int(v) for v in r[:d]): complex(float(r[d]), float(r[d + 1])) for r in rows}
    return SpectralPolynomial.from_dict(coeffs, d, n)


def save_expansion(path, e, chash: str = "none", seed=None) -> Path:
    """Rows (nu, a_nu) of an ExpansionCoefficients table."""
    return write_csv(path, ["nu", "a_nu"], enumerate(e.a), chash, seed,
                     extra={"beta": e.beta, "delta": e.delta})


def save_transform(path, y, values, chash: str = "none", seed=None) -> Path:
    return write_csv(path, ["y", "value"], zip(np.asarray(y, float), np.asarray(values, float)), chash, seed)

"""File formats: pattern files, CSV datasets, JSON reports (9 significant digits)."""

from __future__ import annotations

import csv
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SIG_DIGITS = 9


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{SIG_DIGITS}g}"
    return str(x)


def rounded(obj):
    """Recursively round floats to SIG_DIGITS significant digits for JSON output."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else float(f"{float(obj):.{SIG_DIGITS}g}")
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if not math.isfinite(v) else float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(obj, Enum):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(rounded(obj), indent=2) + "\n"


def write_json(path: Path, obj) -> None:
    Path(path).write_text(dumps(obj))


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence], fmt_name: str = "csv") -> None:
    """Write a dataset as CSV (with header) or as a JSON array of records."""
    rows = list(rows)
    if fmt_name == "json":
        write_json(path, [dict(zip(header, r)) for r in rows])
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def write_jsonl(path: Path, records: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rounded(rec)) + "\n")


def read_pattern_file(path: Path) -> list[np.ndarray]:
    """One 0/1 bit string per non-blank line; line order gives the register index."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if set(s) - {"0", "1"}:
            raise ValueError(f"{path}:{lineno}: pattern lines may contain only 0 and 1")
        out.append(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))
    if not out:
        raise ValueError(f"{path}: no patterns found")
    return out


def write_pattern_file(path: Path, patterns: Iterable) -> None:
    lines = ["".join("1" if b else "0" for b in p) for p in patterns]
    Path(path).write_text("\n".join(lines) + "\n")

"""File formats: curve JSON, report JSON/CSV, atomic writes, config files.

Floats are serialized with Python's shortest round-trip repr, so parsing
a written file reproduces the exact doubles; files are written to a
temp path and renamed into place.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import GeometryError
from .metric import Curve, make_curve
from .spaces import space_from_json
from .spaces.base import Space

SCHEMA_VERSION = 1

BOUND_CSV_COLUMNS = [
    "schema_version", "bound", "space", "length", "diam", "width",
    "bound_value", "ratio", "passed", "seed", "constants",
]


def curve_to_json(curve: Curve) -> dict:
    space = curve.space
    return {
        "schema_version": SCHEMA_VERSION,
        "space": space._to_json(),
        "mode": curve.mode,
        "domain_end": "inf" if curve.domain_end == float("inf") else curve.domain_end,
        "samples": [
            {"t": t, "p": space._point_json(p.data)} for t, p in curve.samples
        ],
    }


def curve_from_json(obj: dict) -> Curve:
    if not isinstance(obj, dict) or "space" not in obj or "samples" not in obj:
        raise GeometryError("malformed curve document")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise GeometryError(f"unsupported curve schema_version {version!r}")
    space = space_from_json(obj["space"])
    samples = obj["samples"]
    if not samples:
        raise GeometryError("curve document has no samples")
    times = [float(s["t"]) for s in samples]
    points = [space.point(space._point_from_json(s["p"])) for s in samples]
    end = obj.get("domain_end", "inf")
    domain_end = float("inf") if end == "inf" else float(end)
    return make_curve(points, times, mode=obj.get("mode", "discrete"),
                      domain_end=domain_end)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-",
                               suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: str | Path, obj) -> None:
    write_text_atomic(path, dumps(obj))


def bound_report_csv_rows(reports) -> str:
    lines = [",".join(BOUND_CSV_COLUMNS)]
    for r in reports:
        doc = r.to_json()
        row = [
            str(SCHEMA_VERSION),
            doc["bound"],
            doc["space"],
            repr(doc["length"]),
            repr(doc["diam"]),
            "" if doc["width"] is None else repr(doc["width"]),
            repr(doc["bound_value"]),
            repr(doc["ratio"]),
            "1" if doc["passed"] else "0",
            "" if doc["seed"] is None else str(doc["seed"]),
            json.dumps(doc["constants"], sort_keys=True).replace(",", ";"),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def parse_bound_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return []
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise GeometryError("malformed bound CSV row")
        out.append(dict(zip(header, cells)))
    return out


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value config; '#' starts a comment, blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GeometryError(f"config line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_point_spec(space: Space, text: str):
    """Comma-separated payload coordinates, per-space layout."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise GeometryError("empty point spec")
    values = [float(p) for p in parts]
    return space.point(space._point_from_json(values))

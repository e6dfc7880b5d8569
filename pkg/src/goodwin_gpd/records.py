"""Serialization of run manifests, fit records and tables."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .exceptions import DataError
from .gpd import GpdParams

FIT_RECORD_GLOB = "fit_*.json"


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    inputs: tuple[str, ...] = ()
    config: str | None = None
    outdir: str | None = None
    seed: int | None = None
    options: dict = field(default_factory=dict)
    tool: str = "goodwin-gpd"
    version: str = __version__

    def as_dict(self) -> dict:
        d = asdict(self)
        d["inputs"] = list(self.inputs)
        return d

    def header_line(self) -> str:
        return "manifest: " + json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def dumps(record: dict) -> str:
    return json.dumps(_clean(record), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, record: dict):
    Path(path).write_text(dumps(record), encoding="utf-8")


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    if hasattr(v, "item"):
        return _cell(v.item())
    return str(v)


def write_table(path, columns: Sequence[str], rows, header_lines: Sequence[str] = ()):
    """CSV with leading ``#`` comment lines, then a header row."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def params_from_record(rec: dict) -> GpdParams:
    p = rec.get("params")
    if not p:
        raise DataError(f"year {rec.get('year')}: record has no fitted parameters")
    return GpdParams(p["x_t"], p["eta"], p["b"], p["alpha"])


def load_fit_records(directory) -> list[dict]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"{directory}: not a directory")
    records = [read_json(p) for p in sorted(directory.glob(FIT_RECORD_GLOB))]
    if not records:
        raise DataError(f"{directory}: no fit records ({FIT_RECORD_GLOB})")
    return sorted(records, key=lambda r: r["year"])

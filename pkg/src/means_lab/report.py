"""CSV and JSON serialization of margins, sign maps, hunts and profiles.

Floats are written with 17 significant digits so every binary64 value
round-trips exactly. Output is UTF-8 with ``\\n`` line endings and depends
only on its input.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, List, Optional, Sequence

from . import __version__
from .explorer import Bracket, CriticalProfile, HuntResult, SignMap
from .inequalities import MarginRecord

SCHEMA_VERSION = 1

SIGNMAP_COLUMNS = ("id", "t", "n", "margin", "rel_margin", "sign", "digits", "certified")
REPORT_COLUMNS = ("id", "x", "y", "t", "n", "margin", "rel_margin", "sign", "digits", "certified")
HUNT_COLUMNS = (
    "id", "found", "t", "n", "margin", "sign", "digits", "certified",
    "min_margin", "t_at_min", "n_at_min", "evaluations", "seed", "complete",
)
PROFILE_COLUMNS = ("n", "t_at_min", "min_margin", "classification", "sign", "digits")
BRACKET_COLUMNS = ("id", "n", "t_minus", "t_plus", "sign_minus", "sign_plus", "log_width")


def fmt_float(value: Optional[float]) -> str:
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def _json_float(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else fmt_float(value)


def _flag(value: bool) -> str:
    return "true" if value else "false"


def write_csv(columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_json(metadata: dict, records: List[dict]) -> str:
    meta = {"version": __version__, "schema": SCHEMA_VERSION}
    meta.update(metadata)
    doc = {"metadata": meta, "records": records}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _signmap_record(rec: MarginRecord) -> dict:
    return {
        "id": rec.id.value,
        "t": rec.pair.hi / rec.pair.lo,
        "n": rec.exponent,
        "margin": rec.margin,
        "rel_margin": rec.rel_margin,
        "sign": rec.sign,
        "digits": rec.precision,
        "certified": rec.certified,
    }


def emit_signmap(smap: SignMap, fmt: str = "csv") -> bytes:
    records = [_signmap_record(rec) for rec in smap.cells]
    if fmt == "csv":
        rows = (
            (
                r["id"], fmt_float(r["t"]), fmt_float(r["n"]), fmt_float(r["margin"]),
                fmt_float(r["rel_margin"]), r["sign"], str(r["digits"]), _flag(r["certified"]),
            )
            for r in records
        )
        return write_csv(SIGNMAP_COLUMNS, rows).encode("utf-8")
    for r in records:
        for key in ("t", "n", "margin", "rel_margin"):
            r[key] = _json_float(r[key])
    meta = {"config": smap.config.to_dict(), "seed": smap.config.seed, "complete": smap.complete}
    return write_json(meta, records).encode("utf-8")


def report_row(rec: MarginRecord) -> dict:
    return {
        "id": rec.id.value,
        "x": rec.pair.x,
        "y": rec.pair.y,
        "t": rec.pair.hi / rec.pair.lo,
        "n": rec.exponent,
        "margin": rec.margin,
        "rel_margin": rec.rel_margin,
        "sign": rec.sign,
        "digits": rec.precision,
        "certified": rec.certified,
    }


def emit_margin_rows(records: Sequence[MarginRecord], fmt: str = "csv") -> bytes:
    rows = [report_row(rec) for rec in records]
    if fmt == "csv":
        out = (
            [r["id"]] + [fmt_float(r[k]) for k in ("x", "y", "t", "n", "margin", "rel_margin")]
            + [r["sign"], str(r["digits"]), _flag(r["certified"])]
            for r in rows
        )
        return write_csv(REPORT_COLUMNS, out).encode("utf-8")
    for r in rows:
        for k in ("x", "y", "t", "n", "margin", "rel_margin"):
            r[k] = _json_float(r[k])
    return write_json({}, rows).encode("utf-8")


def emit_named_values(pairs: Sequence[tuple], fmt: str = "csv", metadata: Optional[dict] = None) -> bytes:
    if fmt == "csv":
        return write_csv(("name", "value"), ((k, fmt_float(v)) for k, v in pairs)).encode("utf-8")
    records = [{"name": k, "value": _json_float(v)} for k, v in pairs]
    return write_json(metadata or {}, records).encode("utf-8")


def emit_hunt(result: HuntResult, ineq: str, fmt: str = "csv", config: Optional[dict] = None) -> bytes:
    w = result.witness
    rec = {
        "id": ineq,
        "found": w is not None,
        "t": None if w is None else w.t,
        "n": None if w is None else w.exponent,
        "margin": None if w is None else w.margin,
        "sign": "" if w is None else w.certified.outcome.symbol,
        "digits": None if w is None else w.digits,
        "certified": w is not None,
        "min_margin": result.min_margin,
        "t_at_min": result.t_at_min,
        "n_at_min": result.exponent_at_min,
        "evaluations": result.evaluations,
        "seed": result.seed,
        "complete": result.complete,
    }
    if fmt == "csv":
        row = []
        for col in HUNT_COLUMNS:
            v = rec[col]
            if isinstance(v, bool):
                row.append(_flag(v))
            elif isinstance(v, float) or col in ("t", "n", "margin", "n_at_min"):
                row.append(fmt_float(v))
            else:
                row.append("" if v is None else str(v))
        return write_csv(HUNT_COLUMNS, [row]).encode("utf-8")
    for k in ("t", "n", "margin", "min_margin", "t_at_min", "n_at_min"):
        rec[k] = _json_float(rec[k])
    meta = {"config": config or {}, "seed": result.seed}
    return write_json(meta, [rec]).encode("utf-8")


def emit_profile(profile: CriticalProfile, fmt: str = "csv") -> bytes:
    recs = [
        {
            "n": r.n,
            "t_at_min": r.t_at_min,
            "min_margin": r.min_margin,
            "classification": r.classification,
            "sign": r.certified.outcome.symbol,
            "digits": r.certified.digits,
        }
        for r in profile.rows
    ]
    if fmt == "csv":
        rows = (
            (fmt_float(r["n"]), fmt_float(r["t_at_min"]), fmt_float(r["min_margin"]),
             r["classification"], r["sign"], str(r["digits"]))
            for r in recs
        )
        return write_csv(PROFILE_COLUMNS, rows).encode("utf-8")
    for r in recs:
        for k in ("n", "t_at_min", "min_margin"):
            r[k] = _json_float(r[k])
    meta = {"t_range": list(profile.t_range), "open_lower": profile.open_lower}
    return write_json(meta, recs).encode("utf-8")


def emit_bracket(b: Bracket, ineq: str, n: Optional[float], fmt: str = "csv") -> bytes:
    rec = {
        "id": ineq,
        "n": n,
        "t_minus": b.t_minus,
        "t_plus": b.t_plus,
        "sign_minus": b.sign_minus.outcome.symbol,
        "sign_plus": b.sign_plus.outcome.symbol,
        "log_width": b.log_width,
    }
    if fmt == "csv":
        row = [rec["id"], fmt_float(n), fmt_float(b.t_minus), fmt_float(b.t_plus),
               rec["sign_minus"], rec["sign_plus"], fmt_float(b.log_width)]
        return write_csv(BRACKET_COLUMNS, [row]).encode("utf-8")
    for k in ("n", "t_minus", "t_plus", "log_width"):
        rec[k] = _json_float(rec[k])
    return write_json({}, [rec]).encode("utf-8")

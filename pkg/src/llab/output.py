"""Deterministic file output: atomic writes, typed CSV tables and SVG."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

__all__ = ["SCHEMAS", "atomic_write", "csv_text", "read_csv", "write_csv", "json_text", "emit_svg"]


def _flag(text: str) -> bool:
    if text not in ("0", "1"):
        raise ValueError(f"bad flag {text!r}")
    return text == "1"


def _opt_int(text: str):
    return int(text) if text else None


# column name -> parser; the header row must match exactly
SCHEMAS = {
    "count": {"n": int, "value_lo": float, "value_hi": float},
    "orbit": {"s": float, "t": float, "systole_lo": float, "systole_hi": float,
              "n": int, "m1": int, "m2": int},
    "excursions": {"n": int, "m1": int, "m2": int, "r1": float, "r2": float, "leg": float,
                   "proj_lo": float, "proj_hi": float, "in_Xi": _flag, "class_id": _opt_int},
    "measure": {"quantity": str, "value": float},
    "average": {"bin": str, "mass": float, "delta": float},
    "bowen": {"N": int, "count": int, "rate": float, "envelope": float, "ok": _flag},
    "coding": {"n": int, "symbols": str, "rate": float, "flagged": _flag},
}

# the count table ends with a footer "total,<strict>,<closed>" row
COUNT_FOOTER = "total"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(schema: str, rows, footer=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCHEMAS[schema])
    for r in rows:
        w.writerow([_cell(v) for v in r])
    if footer is not None:
        w.writerow([_cell(v) for v in footer])
    return buf.getvalue()


def read_csv(text: str, schema: str) -> tuple[list[tuple], tuple | None]:
    """Parse a table written by :func:`csv_text`; returns rows and footer."""
    cols = SCHEMAS[schema]
    rows, footer = [], None
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != list(cols):
        raise ValueError(f"header {header} does not match schema {schema!r}")
    for rec in reader:
        if schema == "count" and rec and rec[0] == COUNT_FOOTER:
            footer = (rec[0], int(rec[1]), int(rec[2]))
            continue
        if len(rec) != len(cols):
            raise ValueError(f"row has {len(rec)} fields, expected {len(cols)}")
        rows.append(tuple(parse(v) for parse, v in zip(cols.values(), rec)))
    return rows, footer


def atomic_write(path, text: str) -> None:
    """Write UTF-8 text with LF endings via a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, schema: str, rows, footer=None) -> None:
    atomic_write(path, csv_text(schema, rows, footer))


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"


def _fmt(v: float) -> str:
    v = round(v, 4) + 0.0  # drops negative zero
    return f"{v:.4f}".rstrip("0").rstrip(".")


def emit_svg(excursions, T: float, size: float = 600.0) -> str:
    """The square ``[0, T]^2`` with every clipped triangle, labelled by ``n``.

    ``s`` runs to the right and ``t`` upwards; coordinates are canvas units
    rounded to four decimals, so equal input yields identical bytes.
    """
    from .excursions import clipped_polygon

    if T <= 0 or size <= 0:
        raise ValueError("empty canvas")
    k = size / T

    def xy(s, t):
        return _fmt(s * k), _fmt(size - t * k)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(size)} {_fmt(size)}" '
        f'width="{_fmt(size)}" height="{_fmt(size)}">',
        f'<rect x="0" y="0" width="{_fmt(size)}" height="{_fmt(size)}" fill="none" stroke="black"/>',
    ]
    for e in excursions:
        poly = clipped_polygon(e, T)
        if len(poly) < 3:
            continue
        pts = " ".join(",".join(xy(s, t)) for s, t in poly)
        cs = sum(s for s, _ in poly) / len(poly)
        ct = sum(t for _, t in poly) / len(poly)
        x, y = xy(cs, ct)
        out.append(f'<polygon points="{pts}" fill="#9ecae1" stroke="#08519c"/>')
        out.append(f'<text x="{x}" y="{y}" font-size="10" text-anchor="middle">{e.n}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

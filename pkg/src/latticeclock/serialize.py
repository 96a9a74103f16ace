"""Canonical CSV/JSON output.

Numbers in CSV are serialized with 17 significant digits so a parse and
re-emit round trip is byte-identical. Every CSV starts with a versioned
schema comment line and a header row. JSON is emitted with sorted keys and
a fixed indent; no timestamps enter any output.
"""

from __future__ import annotations

import json
import os
import tempfile

from .exceptions import ConfigError

CSV_PREFIX = "# latticeclock-csv"


def format_number(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def render_csv(schema: str, header: list[str], rows: list[list]) -> str:
    lines = [f"{CSV_PREFIX} schema={schema}", ",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ConfigError("row width does not match header")
        lines.append(",".join(format_number(v) if not isinstance(v, str) else v
                              for v in row))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> tuple[str, list[str], list[list[str]]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(CSV_PREFIX):
        raise ConfigError("not a latticeclock CSV (missing schema line)")
    schema = lines[0].split("schema=", 1)[1]
    header = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:] if ln]
    return schema, header, rows


def render_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file + rename; no partial files on failure."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-latticeclock-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise

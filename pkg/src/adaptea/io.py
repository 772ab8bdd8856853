"""CSV files with a ``#`` comment header, and flat ``key=value`` config files."""
from __future__ import annotations

import csv
import io
from pathlib import Path

FORMAT_VERSION = "1"


def header_lines(config: dict, seed=None) -> list[str]:
    """Comment header: format version, resolved config, base seed."""
    resolved = " ".join(f"{k}={_fmt(v)}" for k, v in config.items())
    lines = [f"adaptea format-version {FORMAT_VERSION}", f"config: {resolved}"]
    if seed is not None:
        lines.append(f"seed: {seed}")
    return lines


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    if v is None:
        return ""
    return str(v)


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(columns, rows, header=()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(c) for c in columns]
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows, header=()) -> None:
    Path(path).write_text(render_csv(columns, rows, header))


def read_csv(path) -> tuple[list[str], list[str], list[dict[str, str]]]:
    """Return ``(header comment lines, columns, rows)``; cells stay strings."""
    header, body = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            header.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    if not body:
        return header, [], []
    reader = csv.reader(body)
    columns = next(reader)
    return header, columns, [dict(zip(columns, cells)) for cells in reader]


def read_config(path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out

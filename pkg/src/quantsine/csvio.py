"""CSV output with a `#` metadata block, and the flat key=value config format."""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

__all__ = [
    "MAGIC",
    "ConfigError",
    "format_value",
    "write_csv",
    "render_csv",
    "read_csv",
    "parse_config_text",
    "load_config",
]

MAGIC = "# quantsine-csv 1"
PARAM_PREFIX = "param."


class ConfigError(ValueError):
    """Bad configuration; the CLI maps it to exit code 2."""


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return "%.17g" % v
    if isinstance(v, (list, tuple)):
        return ",".join(format_value(x) for x in v)
    return str(v)


def render_csv(
    meta: Mapping[str, object],
    params: Mapping[str, object],
    columns: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> str:
    buf = io.StringIO(newline="")
    buf.write(MAGIC + "\n")
    for k, v in meta.items():
        buf.write(f"# {k}={format_value(v)}\n")
    for k, v in params.items():
        buf.write(f"# {PARAM_PREFIX}{k}={format_value(v)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match the header")
        buf.write(",".join(format_value(x) for x in row) + "\n")
    return buf.getvalue()


def write_csv(path, meta, params, columns, rows) -> str:
    text = render_csv(meta, params, columns, rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path) -> tuple[dict[str, str], dict[str, str], list[str], list[list[float]]]:
    """Parse a file written by :func:`write_csv` into (meta, params, header, rows)."""
    meta: dict[str, str] = {}
    params: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                if k.startswith(PARAM_PREFIX):
                    params[k[len(PARAM_PREFIX):]] = v
                else:
                    meta[k] = v
            continue
        if header is None:
            header = line.split(",")
        elif line:
            rows.append([float(x) for x in line.split(",")])
    return meta, params, header or [], rows


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat key=value lines, `#` starts a comment.

    A CSV produced by this package is also accepted: its `# param.key=value`
    lines are read back, which lets a run be repeated from its own output.
    """
    out: dict[str, str] = {}
    lines = text.splitlines()
    if lines and lines[0].strip() == MAGIC:
        for line in lines:
            body = line[1:].strip() if line.startswith("#") else ""
            if body.startswith(PARAM_PREFIX) and "=" in body:
                k, v = body[len(PARAM_PREFIX):].split("=", 1)
                out[k.strip()] = v.strip()
        return out
    for n, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected key=value, got {raw!r}")
        k, v = line.split("=", 1)
        k = k.strip().replace("-", "_")
        if not k:
            raise ConfigError(f"{source}:{n}: empty key")
        if k in out:
            raise ConfigError(f"{source}:{n}: duplicate key {k!r}")
        out[k] = v.strip()
    return out


def load_config(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, str(path))

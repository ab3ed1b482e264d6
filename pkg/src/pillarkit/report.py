"""Delimited text output with provenance headers.

Every output file starts with `#` comment lines carrying the tool version,
the configuration digest, and a parameter echo. No timestamps: re-running a
command with the same configuration must reproduce the file byte for byte.
Numeric columns carry 13 significant digits.
"""

from __future__ import annotations

import math
from pathlib import Path

from . import __version__


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12e}"
    return str(value)


def provenance_lines(command: str, digest: str, params: dict) -> list[str]:
    lines = [
        f"# pillarkit {__version__} :: {command}",
        f"# config digest: {digest}",
    ]
    for key in sorted(params):
        lines.append(f"# {key} = {fmt(params[key])}")
    return lines


def write_table(path, header_cols, rows, preamble: list[str]):
    """Write one delimited table (comma-separated, `#` comments)."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for line in preamble:
            fh.write(line + "\n")
        fh.write(",".join(header_cols) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_blocks(path, header_cols, blocks, preamble: list[str]):
    """Write several tables into one file, each introduced by comment lines.

    ``blocks`` is a sequence of (block_comment_lines, rows).
    """
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for line in preamble:
            fh.write(line + "\n")
        for comments, rows in blocks:
            for line in comments:
                fh.write(line + "\n")
            fh.write(",".join(header_cols) + "\n")
            for row in rows:
                fh.write(",".join(fmt(v) for v in row) + "\n")

"""Plain-text matrix files.

Grammar::

    # comment
    @name
    - + 0
    0 - 1.5

A block starts with ``@name``; each following nonblank line is a row of
whitespace-separated tokens. ``+ - 0 ?`` (and ``⊕ ⊖ ⊙``) are signs, anything
else must be a finite decimal literal. A bare ``-`` is the sign ⊖ while
``-0`` is the real zero. Blocks end at a blank line or the next ``@``.
"""

from __future__ import annotations

import math
from typing import Mapping, Union

from .errors import MetzsignError
from .qualcore import MixedMatrix, QualMatrix, Sign

_SIGN_TOKENS = {"+": Sign.POS, "-": Sign.NEG, "0": Sign.ZERO, "?": Sign.INDEF,
                "⊕": Sign.POS, "⊖": Sign.NEG, "⊙": Sign.INDEF}


class MatrixFileError(MetzsignError, ValueError):
    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_token(tok: str) -> Union[Sign, float]:
    if tok in _SIGN_TOKENS:
        return _SIGN_TOKENS[tok]
    try:
        x = float(tok)
    except ValueError:
        raise ValueError(f"unknown token {tok!r}") from None
    if not math.isfinite(x) or tok.lower().lstrip("+-") in ("nan", "inf", "infinity"):
        raise ValueError(f"non-finite literal {tok!r}")
    return x


def parse_matrix_file(text: str) -> dict[str, MixedMatrix]:
    out: dict[str, MixedMatrix] = {}
    name: str | None = None
    rows: list[list[Union[Sign, float]]] = []
    start = 0

    def close() -> None:
        nonlocal name, rows
        if name is not None:
            if not rows:
                raise MatrixFileError(start, f"block @{name} has no rows")
            out[name] = MixedMatrix.of(rows)
        name, rows = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            close()
            continue
        if line.startswith("@"):
            close()
            label = line[1:].strip()
            if not label or len(label.split()) != 1:
                raise MatrixFileError(lineno, f"invalid block name {label!r}")
            if label in out:
                raise MatrixFileError(lineno, f"duplicate name {label!r}")
            name, start = label, lineno
            continue
        if name is None:
            raise MatrixFileError(lineno, "row outside of a named block")
        try:
            row = [parse_token(t) for t in line.split()]
        except ValueError as exc:
            raise MatrixFileError(lineno, str(exc)) from None
        if rows and len(row) != len(rows[0]):
            raise MatrixFileError(lineno, f"ragged row: {len(row)} entries, expected {len(rows[0])}")
        rows.append(row)
    close()
    return out


def format_entry(x: Union[Sign, float]) -> str:
    if isinstance(x, Sign):
        return x.symbol
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("cannot format a non-finite entry")
    return repr(x)


def format_matrix_file(mats: Mapping[str, Union[MixedMatrix, QualMatrix]]) -> str:
    blocks = []
    for name, M in mats.items():
        if isinstance(M, QualMatrix):
            M = MixedMatrix.of([[M[i, j] for j in range(M.cols)] for i in range(M.rows)])
        lines = [f"@{name}"] + [" ".join(format_entry(x) for x in row) for row in M.entries]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"

"""Matrix CSV ingestion and bit-stable report rendering.

Matrix CSV convention: comma-separated, one observation per row, optional
single header row auto-detected by a non-numeric first row. Floats are
written with 17 significant digits, which round-trips IEEE doubles exactly,
so a matrix written by the tool re-ingests to the identical matrix.

JSON reports are rendered by a small emitter rather than ``json.dumps`` so
that float formatting (17 significant digits) and key order (insertion
order) are pinned down; identical inputs produce byte-identical files.
"""

import json
import math

import numpy as np

from .errors import CsvFormatError, NumericalError


def format_float(x: float) -> str:
    """17-significant-digit decimal rendering; exact double round-trip."""
    if not math.isfinite(x):
        raise NumericalError(f"non-finite value {x!r} cannot appear in a report")
    return format(float(x), ".17g")


def _parse_cell(cell: str, line_no: int, col_no: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise CsvFormatError(
            f"non-numeric cell {cell!r} at line {line_no}, column {col_no}"
        ) from None


def parse_matrix_csv(text: str) -> np.ndarray:
    """Parse matrix CSV text; raises CsvFormatError with line/column context."""
    rows: list[list[float]] = []
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise CsvFormatError("empty CSV: no rows found")
    start = 0
    first_cells = [c.strip() for c in lines[0].split(",")]
    try:
        [float(c) for c in first_cells]
    except ValueError:
        start = 1  # header row
    if start == len(lines):
        raise CsvFormatError("CSV contains only a header row")
    width = None
    for idx in range(start, len(lines)):
        cells = [c.strip() for c in lines[idx].split(",")]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise CsvFormatError(
                f"row at line {idx + 1} has {len(cells)} cells, expected {width}"
            )
        rows.append([_parse_cell(c, idx + 1, j + 1) for j, c in enumerate(cells)])
    return np.array(rows, dtype=float)


def read_matrix_csv(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_csv(fh.read())


def read_vector_csv(path) -> np.ndarray:
    """Read a vector stored as a single CSV row or column."""
    m = read_matrix_csv(path)
    if 1 not in m.shape:
        raise CsvFormatError(f"expected a single row or column vector, got shape {m.shape}")
    return m.reshape(-1)


def matrix_to_csv(matrix: np.ndarray) -> str:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [",".join(format_float(x) for x in row) for row in matrix]
    return "\n".join(lines) + "\n"


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(matrix_to_csv(matrix))


def _render(node, indent: int, parts: list[str]) -> None:
    pad = "  " * indent
    if isinstance(node, dict):
        if not node:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, (key, value) in enumerate(node.items()):
            parts.append(f'{pad}  {json.dumps(str(key))}: ')
            _render(value, indent + 1, parts)
            parts.append(",\n" if i < len(node) - 1 else "\n")
        parts.append(pad + "}")
    elif isinstance(node, (list, tuple)):
        seq = list(node)
        if not seq:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, value in enumerate(seq):
            parts.append(pad + "  ")
            _render(value, indent + 1, parts)
            parts.append(",\n" if i < len(seq) - 1 else "\n")
        parts.append(pad + "]")
    elif isinstance(node, bool) or isinstance(node, np.bool_):
        parts.append("true" if node else "false")
    elif node is None:
        parts.append("null")
    elif isinstance(node, (int, np.integer)):
        parts.append(str(int(node)))
    elif isinstance(node, (float, np.floating)):
        parts.append(format_float(float(node)))
    elif isinstance(node, str):
        parts.append(json.dumps(node))
    else:
        raise TypeError(f"cannot render {type(node).__name__} in a report")


def render_report(report: dict) -> str:
    """Deterministic JSON text for a report dict (insertion-ordered keys)."""
    parts: list[str] = []
    _render(report, 0, parts)
    parts.append("\n")
    return "".join(parts)


def tagged(value, path: str):
    """Wrap a numeric result with its computation-path tag.

    ``path`` is one of "closed-form", "mc", or "bound".
    """
    if path not in ("closed-form", "mc", "bound"):
        raise ValueError(f"unknown computation path {path!r}")
    if isinstance(value, np.ndarray):
        value = [float(v) for v in value]
    return {"value": value, "path": path}


def tagged_mc(est) -> dict:
    """Tagged rendering of a Monte Carlo estimate with its uncertainty."""
    out = {
        "value": est.estimate,
        "path": "mc",
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "seed": est.seed,
    }
    if est.inner_samples is not None:
        out["inner_samples"] = est.inner_samples
    return out

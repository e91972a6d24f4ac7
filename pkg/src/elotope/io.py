"""File formats: matrix JSON documents and CSV tables, all written atomically.

Matrix JSON::

    {"dim": m, "kind": "payoff" | "advantage" | "selection", "rows": [[...], ...]}

Match log CSV has the header ``sequence,i,j,winner`` with 0-based player indices
and strictly increasing sequence numbers.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .game import AdvantageMatrix, MatchRecord, PayoffMatrix, SelectionMatrix, ValidationError

MATRIX_KINDS = {"payoff": PayoffMatrix, "advantage": AdvantageMatrix, "selection": SelectionMatrix}
MATCH_HEADER = ("sequence", "i", "j", "winner")


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_document(kind: str, values) -> dict:
    values = np.asarray(values, dtype=float)
    return {"dim": int(values.shape[0]), "kind": kind, "rows": values.tolist()}


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def save_matrix(path, matrix) -> None:
    if isinstance(matrix, PayoffMatrix):
        doc = matrix_document("payoff", matrix.probs)
    elif isinstance(matrix, AdvantageMatrix):
        doc = matrix_document("advantage", matrix.values)
    elif isinstance(matrix, SelectionMatrix):
        doc = matrix_document("selection", matrix.weights)
    else:
        raise TypeError(f"cannot save {type(matrix).__name__}")
    atomic_write(path, dumps_json(doc))


def parse_matrix(doc, expect: str | Sequence[str] | None = None):
    """Validate a decoded matrix document and build the matching matrix type."""
    if not isinstance(doc, dict):
        raise ValidationError("matrix file: top level must be a JSON object")
    for key in ("dim", "kind", "rows"):
        if key not in doc:
            raise ValidationError(f"matrix file: missing field {key!r}")
    kind = doc["kind"]
    if kind not in MATRIX_KINDS:
        raise ValidationError(f"matrix file: unknown kind {kind!r}")
    if expect is not None:
        allowed = (expect,) if isinstance(expect, str) else tuple(expect)
        if kind not in allowed:
            raise ValidationError(f"matrix file: expected kind {' or '.join(allowed)}, got {kind!r}")
    dim, rows = doc["dim"], doc["rows"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError("matrix file: dim must be a positive integer")
    if (not isinstance(rows, list) or len(rows) != dim
            or any(not isinstance(row, list) or len(row) != dim for row in rows)):
        raise ValidationError(f"matrix file: rows must be a {dim}x{dim} list of lists")
    try:
        values = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("matrix file: rows must contain numbers only") from None
    return MATRIX_KINDS[kind](values)


def load_matrix(path, expect: str | Sequence[str] | None = None):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from None
    return parse_matrix(doc, expect)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Render a CSV; write it atomically to ``path`` unless ``path`` is None. Returns the text."""
    text = _csv_text(header, rows)
    if path is not None:
        atomic_write(path, text)
    return text


def trajectory_rows(traj):
    for t, r in zip(traj.steps, traj.ratings):
        yield [int(t), *(float(x) for x in r)]


def trajectory_header(m: int) -> list[str]:
    return ["step", *(f"r_{k}" for k in range(m))]


def match_rows(pair_i, pair_j, winners):
    for seq, (i, j, w) in enumerate(zip(pair_i, pair_j, winners)):
        yield [seq, int(i), int(j), int(w)]


def read_match_log(path) -> list[MatchRecord]:
    """Parse a match log, checking the header, index sanity and sequence ordering."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != MATCH_HEADER:
            raise ValidationError(f"{path}: header must be {','.join(MATCH_HEADER)}")
        last = -1
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 fields")
            try:
                seq, i, j, w = (int(x) for x in row)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: fields must be integers") from None
            if seq <= last:
                raise ValidationError(f"{path}:{lineno}: sequence numbers must strictly increase")
            last = seq
            records.append(MatchRecord(i, j, w, seq))
    return records


def write_match_log(path, records: Iterable[MatchRecord]) -> str:
    return write_csv(path, MATCH_HEADER,
                     ([r.sequence_number, r.player_i, r.player_j, r.winner] for r in records))

"""Snapshot and diagnostics-CSV serialization.

Snapshot format: one ASCII header line

    NLCHNS1 name=<field> n=<n> l=<l> t=<t> count=<n*n> endian=little

followed by count raw little-endian float64 samples in row-major order.
The round trip is bit exact; readers reject wrong magic strings and payload
size mismatches.

The diagnostics CSV has a fixed column order (see diagnostics.COLUMNS), a
single header row, and values printed with 17 significant digits so a
re-parse reproduces every float64 exactly.
"""

from __future__ import annotations

import os

import numpy as np

from .diagnostics import COLUMNS, DiagnosticsRecord
from .spectral import Grid, ScalarField

MAGIC = "NLCHNS1"
CSV_NAME = "diagnostics.csv"


class SnapshotFormatError(ValueError):
    pass


def write_snapshot(field: ScalarField, name: str, t: float, path: str) -> None:
    if any(ch.isspace() for ch in name) or not name:
        raise ValueError("snapshot field name must be non-empty without whitespace")
    g = field.grid
    count = g.n * g.n
    header = (
        f"{MAGIC} name={name} n={g.n} l={g.l:.17g} t={t:.17g} "
        f"count={count} endian=little\n"
    )
    data = np.ascontiguousarray(field.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(data.tobytes())


def read_snapshot(path: str) -> tuple[ScalarField, str, float]:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").strip()
        payload = fh.read()
    parts = header.split()
    if not parts or parts[0] != MAGIC:
        raise SnapshotFormatError(f"bad magic in {path!r}: {header[:40]!r}")
    kv = {}
    for p in parts[1:]:
        if "=" not in p:
            raise SnapshotFormatError(f"malformed header token {p!r}")
        k, v = p.split("=", 1)
        kv[k] = v
    try:
        name = kv["name"]
        n = int(kv["n"])
        l = float(kv["l"])
        t = float(kv["t"])
        count = int(kv["count"])
        endian = kv["endian"]
    except (KeyError, ValueError) as err:
        raise SnapshotFormatError(f"incomplete snapshot header: {header!r}") from err
    if endian != "little":
        raise SnapshotFormatError(f"unsupported byte order {endian!r}")
    if count != n * n:
        raise SnapshotFormatError(f"count {count} does not match n^2 = {n * n}")
    if len(payload) != 8 * count:
        raise SnapshotFormatError(
            f"payload size mismatch: expected {8 * count} bytes, got {len(payload)}"
        )
    values = np.frombuffer(payload, dtype="<f8").astype(float).reshape(n, n)
    return ScalarField(Grid(n, l), values), name, t


def write_state_snapshots(out_dir: str, state, step_index: int) -> None:
    tag = f"{step_index:08d}"
    write_snapshot(state.phi, "phi", state.t, os.path.join(out_dir, f"phi_{tag}.f64"))
    write_snapshot(state.u.x, "ux", state.t, os.path.join(out_dir, f"ux_{tag}.f64"))
    write_snapshot(state.u.y, "uy", state.t, os.path.join(out_dir, f"uy_{tag}.f64"))


def format_value(x: float) -> str:
    return f"{x:.17g}"


class DiagnosticsWriter:
    """Appends records to <out_dir>/diagnostics.csv, header written once."""

    def __init__(self, out_dir: str):
        os.makedirs(out_dir, exist_ok=True)
        self.path = os.path.join(out_dir, CSV_NAME)
        self._fh = open(self.path, "w", newline="\n")
        self._fh.write(",".join(COLUMNS) + "\n")

    def append(self, rec: DiagnosticsRecord) -> None:
        self._fh.write(",".join(format_value(v) for v in rec.as_row()) + "\n")

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def append_diagnostics(record: DiagnosticsRecord, csv_path: str) -> None:
    """Single-record append; writes the header if the file does not exist."""
    new = not os.path.exists(csv_path)
    with open(csv_path, "a", newline="\n") as fh:
        if new:
            fh.write(",".join(COLUMNS) + "\n")
        fh.write(",".join(format_value(v) for v in record.as_row()) + "\n")


def read_diagnostics_csv(path: str) -> list[DiagnosticsRecord]:
    records = []
    with open(path, "r") as fh:
        header = fh.readline().strip()
        if header.split(",") != list(COLUMNS):
            raise ValueError(f"unexpected diagnostics header in {path !r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            vals = [float(v) for v in line.split(",")]
            if len(vals) != len(COLUMNS):
                raise ValueError(f"malformed diagnostics row: {line!r}")
            records.append(DiagnosticsRecord(**dict(zip(COLUMNS, vals))))
    return records

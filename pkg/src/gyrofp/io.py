"""Binary snapshots and CSV time series.

Snapshot layout (all little-endian)::

    offset  size  content
    0       8     magic b"GYROFP1\\0"
    8       8     uint64 K
    16      8     uint64 N_u
    24      8     float64 u_max
    32      8     float64 T
    40      8     float64 nu
    48      8     float64 beta
    56      8     float64 t
    64      ...   complex128 modal array, shape (2K+1, 2K+1, N_u), C order

Each complex entry is two float64 values (real, imaginary).
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .diagnostics import RECORD_FIELDS, DiagnosticsRecord
from .fields import GyroDistribution
from .solver import PhysicalParams, SolverState

__all__ = [
    "SNAPSHOT_MAGIC",
    "HEADER_SIZE",
    "SnapshotError",
    "SnapshotVersionError",
    "write_snapshot",
    "read_snapshot",
    "CSV_HEADER",
    "write_series",
    "read_series",
]

SNAPSHOT_MAGIC = b"GYROFP1\x00"
_HEADER = struct.Struct("<8sQQddddd")
HEADER_SIZE = _HEADER.size
CSV_HEADER = ",".join(RECORD_FIELDS)


class SnapshotError(ValueError):
    """Malformed or truncated snapshot."""


class SnapshotVersionError(SnapshotError):
    """Magic string does not identify a supported snapshot version."""


def write_snapshot(state: SolverState, path) -> None:
    p = state.params
    header = _HEADER.pack(SNAPSHOT_MAGIC, p.K, p.N_u, p.u_max, p.T, p.nu, p.beta, state.time)
    body = np.ascontiguousarray(state.f.modal, dtype="<c16").tobytes(order="C")
    Path(path).write_bytes(header + body)


def read_snapshot(path, expect: PhysicalParams | None = None) -> SolverState:
    """Read a snapshot; with ``expect`` the dimensions (K, N_u, u_max) must agree."""
    data = Path(path).read_bytes()
    if len(data) < len(SNAPSHOT_MAGIC) or data[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise SnapshotVersionError(f"{path}: not a GYROFP1 snapshot")
    if len(data) < HEADER_SIZE:
        raise SnapshotError(f"{path}: truncated header")
    _, K, N_u, u_max, T, nu, beta, t = _HEADER.unpack_from(data)
    params = PhysicalParams(nu=nu, beta=beta, T=T, K=int(K), N_u=int(N_u), u_max=u_max)
    if expect is not None and (expect.K, expect.N_u, expect.u_max) != (params.K, params.N_u, params.u_max):
        raise SnapshotError(
            f"{path}: dimensions (K={params.K}, N_u={params.N_u}, u_max={params.u_max}) "
            f"do not match expected (K={expect.K}, N_u={expect.N_u}, u_max={expect.u_max})"
        )
    shape = (2 * params.K + 1, 2 * params.K + 1, params.N_u)
    expected = HEADER_SIZE + 16 * int(np.prod(shape))
    if len(data) < expected:
        raise SnapshotError(f"{path}: truncated body ({len(data)} of {expected} bytes)")
    if len(data) > expected:
        raise SnapshotError(f"{path}: {len(data) - expected} trailing bytes")
    modal = np.frombuffer(data, dtype="<c16", offset=HEADER_SIZE).reshape(shape).astype(complex)
    f = GyroDistribution(modal, params.grid(), params.K)
    return SolverState(f, t, params)


def write_series(series, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for rec in series:
            writer.writerow([repr(float(v)) for v in rec.as_tuple()])


def read_series(path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise ValueError(f"{path}: empty series file") from exc
        if tuple(header) != RECORD_FIELDS:
            raise ValueError(f"{path}: unexpected header {','.join(header)}")
        return [DiagnosticsRecord(*(float(v) for v in row)) for row in reader if row]

"""Readers for zkcyl run directories.

The file formats are the contract with the solver; nothing here imports
it. A run directory contains::

    config.yaml      effective configuration echo (unused here)
    series.csv       diagnostics: t, mass, energy, linf, fourier_tail,
                     cheb_tail_I, cheb_tail_II, newton_iters
    summary.json     stop reason and headline numbers
    snapshots/*.zks  binary field snapshots

Snapshot layout: 8-byte magic ``ZKSNAP01``, an unsigned little-endian
64-bit header length, a canonical-JSON header (schema version, time,
config echo, grid/layout arrays, payload shape/dtype, SHA-256 of the
payload), then the raw little-endian float64 payload in C order.
"""

import csv
import hashlib
import json
import os

import numpy as np

MAGIC = b"ZKSNAP01"
SCHEMA_VERSION = 1

SERIES_COLUMNS = (
    "t",
    "mass",
    "energy",
    "linf",
    "fourier_tail",
    "cheb_tail_I",
    "cheb_tail_II",
    "newton_iters",
)


class SchemaError(ValueError):
    """Run-directory contents do not match the documented formats."""


class SnapshotData:
    def __init__(self, header, values, path):
        self.header = header
        self.values = values
        self.path = path

    @property
    def t(self):
        return self.header["t"]

    @property
    def x_nodes(self):
        return np.asarray(self.header["grid"]["nodes"], dtype=float)

    @property
    def rho(self):
        return np.asarray(self.header["layout"]["physical_rho"], dtype=float)

    @property
    def n_inner(self):
        return int(self.header["layout"]["N_I"])

    @property
    def n_outer(self):
        return int(self.header["layout"]["N_II"])

    @property
    def rho0(self):
        return float(self.header["layout"]["rho0"])


def read_snapshot(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    if raw[:8] != MAGIC:
        raise SchemaError(f"{path}: bad magic {raw[:8]!r}, expected {MAGIC!r}")
    hlen = int.from_bytes(raw[8:16], "little")
    if len(raw) < 16 + hlen:
        raise SchemaError(f"{path}: truncated header")
    try:
        header = json.loads(raw[16 : 16 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: malformed header: {exc}") from exc
    if header.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schema {header.get('schema')!r}")
    payload = raw[16 + hlen :]
    digest = hashlib.sha256(payload).hexdigest()
    stored = header.get("payload_sha256")
    if digest != stored:
        raise SchemaError(
            f"{path}: checksum mismatch: header says {stored!r}, payload is {digest!r}"
        )
    if header.get("dtype") != "<f8":
        raise SchemaError(f"{path}: unsupported dtype {header.get('dtype')!r}")
    shape = tuple(header["shape"])
    values = np.frombuffer(payload, dtype="<f8").reshape(shape)
    return SnapshotData(header, values, path)


def list_snapshots(run_dir):
    snap_dir = os.path.join(run_dir, "snapshots")
    if not os.path.isdir(snap_dir):
        raise SchemaError(f"{run_dir}: no snapshots directory")
    names = sorted(n for n in os.listdir(snap_dir) if n.endswith(".zks"))
    if not names:
        raise SchemaError(f"{run_dir}: snapshots directory is empty")
    return [os.path.join(snap_dir, n) for n in names]


def select_snapshot(run_dir, time=None, index=None):
    """Pick a snapshot: by nearest time, by index, or the final state."""
    paths = list_snapshots(run_dir)
    final = [p for p in paths if os.path.basename(p) == "final.zks"]
    numbered = [p for p in paths if os.path.basename(p) != "final.zks"]
    if time is None and index is None:
        return read_snapshot(final[0] if final else paths[-1])
    ordered = numbered + final
    if index is not None:
        try:
            return read_snapshot(ordered[index])
        except IndexError:
            raise SchemaError(
                f"{run_dir}: snapshot index {index} out of range ({len(ordered)} available)"
            ) from None
    snaps = [read_snapshot(p) for p in ordered]
    best = min(snaps, key=lambda s: abs(s.t - time))
    return best


def read_series(run_dir):
    path = os.path.join(run_dir, "series.csv")
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != SERIES_COLUMNS:
                raise SchemaError(f"{path}: unexpected header {header}")
            rows = [[float(v) for v in row] for row in reader]
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows)
    return {name: data[:, i] for i, name in enumerate(SERIES_COLUMNS)}


def read_summary(run_dir):
    path = os.path.join(run_dir, "summary.json")
    if not os.path.exists(path):
        return {}
    with open(path) as fh:
        return json.load(fh)

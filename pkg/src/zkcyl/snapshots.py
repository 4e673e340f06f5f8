"""Self-describing binary snapshots of a field at one instant.

Layout of a snapshot file::

    bytes 0..7    magic  b"ZKSNAP01"
    bytes 8..15   header length H, unsigned 64-bit little-endian
    bytes 16..16+H  header: canonical JSON (UTF-8, sorted keys, no spaces)
    remainder     payload: field values, little-endian float64, C order

The header carries the schema version, the time stamp, the full run
configuration echo, the grid and layout arrays, the payload shape/dtype,
and the SHA-256 of the payload bytes. Canonical JSON plus explicit
byte order makes save(load(x)) reproduce x byte for byte.
"""

import hashlib
import json

import numpy as np

from .errors import SnapshotError

__all__ = ["MAGIC", "save_snapshot", "load_snapshot", "Snapshot"]

MAGIC = b"ZKSNAP01"
SCHEMA_VERSION = 1


class Snapshot:
    """In-memory view of a snapshot file."""

    def __init__(self, header, values):
        self.header = header
        self.values = values

    @property
    def t(self):
        return self.header["t"]

    @property
    def config(self):
        return self.header["config"]


def _canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def build_header(t, values, config_echo, grid_meta, layout_meta, extra=None):
    payload = np.ascontiguousarray(values, dtype="<f8").tobytes()
    header = {
        "schema": SCHEMA_VERSION,
        "t": float(t),
        "config": config_echo,
        "grid": grid_meta,
        "layout": layout_meta,
        "shape": list(values.shape),
        "dtype": "<f8",
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    if extra:
        header.update(extra)
    return header, payload


def save_snapshot(path, t, values, config_echo, grid_meta, layout_meta, extra=None):
    header, payload = build_header(t, values, config_echo, grid_meta, layout_meta, extra)
    write_snapshot(path, header, payload)
    return header


def write_snapshot(path, header, payload):
    blob = _canonical_json(header)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(len(blob).to_bytes(8, "little"))
        fh.write(blob)
        fh.write(payload)


def load_snapshot(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != MAGIC:
        raise SnapshotError(f"{path}: bad magic {raw[:8]!r}")
    hlen = int.from_bytes(raw[8:16], "little")
    if len(raw) < 16 + hlen:
        raise SnapshotError(f"{path}: truncated header")
    try:
        header = json.loads(raw[16 : 16 + hlen].decode())
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"{path}: malformed header: {exc}") from exc
    if header.get("schema") != SCHEMA_VERSION:
        raise SnapshotError(
            f"{path}: unsupported schema {header.get('schema')!r}"
        )
    payload = raw[16 + hlen :]
    digest = hashlib.sha256(payload).hexdigest()
    if digest != header["payload_sha256"]:
        raise SnapshotError(
            f"{path}: payload checksum mismatch "
            f"(stored {header['payload_sha256'][:12]}.., computed {digest[:12]}..)"
        )
    shape = tuple(header["shape"])
    values = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()
    return Snapshot(header, values)

"""Bit-exact file formats: embedding streams, class banks, and metric reports.

Stream file layout (all integers little-endian):

    header (28 bytes): magic "EMBS" | version u32 = 1 | C u32 | N u32
                       | record_count u64 | flags u32 (bit 0: truths present)
    per record:        truth i32 (-1 = unknown) | view_count u16
                       | (1 + view_count) * C little-endian f32 (original first)

Vectors are written pre-normalized; the reader keeps stored values untouched
when they are unit-norm within 1e-4 and re-normalizes with a warning beyond
that, so a read-then-rewrite of a valid file is byte-identical.

A class bank is a JSON manifest {"names": [...], "C": int} next to a raw file
of N x C little-endian f32 values, row-major; the raw file shares the
manifest's path with the extension replaced by ".f32".
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ClassBank
from .errors import DimError, FormatError, IoError, TruncationError, VersionError
from .pipeline import MetricsReport, StreamRecord

MAGIC = b"EMBS"
VERSION = 1
FLAG_TRUTHS = 1

_HEADER = struct.Struct("<4sIIIQI")
_REC_PREFIX = struct.Struct("<iH")

HEADER_SIZE = _HEADER.size  # 28 bytes

NORM_TOL = 1e-4


@dataclass(frozen=True)
class StreamHeader:
    """Decoded stream-file header."""

    c_dim: int
    n_classes: int
    record_count: int
    flags: int

    @property
    def has_truths(self) -> bool:
        return bool(self.flags & FLAG_TRUTHS)


def _renormalize(vec: np.ndarray, where: str) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise FormatError(f"{where}: stored vector has zero norm")
    if abs(norm - 1.0) > NORM_TOL:
        warnings.warn(f"{where}: vector norm {norm:.6f} off unit by more than {NORM_TOL}; re-normalizing")
        return vec / norm
    return vec


def read_header(path) -> StreamHeader:
    """Decode and validate just the 28-byte header."""
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_SIZE)
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"file too short for a header: {len(raw)} bytes")
    magic, version, c_dim, n_classes, record_count, flags = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise VersionError(f"unsupported version {version}, expected {VERSION}")
    if c_dim < 1 or n_classes < 1:
        raise FormatError(f"header declares C={c_dim}, N={n_classes}; both must be >= 1")
    return StreamHeader(c_dim, n_classes, record_count, flags)


def read_stream(path):
    """Open a stream file and return (header, lazy record iterator).

    Records are yielded in file order with ids 0..record_count-1; only one
    record's payload is held in memory at a time. Truncation raises
    TruncationError naming the record index; trailing bytes after the last
    record raise FormatError.
    """
    header = read_header(path)

    def _records():
        with open(path, "rb") as fh:
            fh.seek(HEADER_SIZE)
            vec_bytes = 4 * header.c_dim
            for idx in range(header.record_count):
                prefix = fh.read(_REC_PREFIX.size)
                if len(prefix) < _REC_PREFIX.size:
                    raise TruncationError(idx, "record prefix cut short")
                truth, view_count = _REC_PREFIX.unpack(prefix)
                payload = fh.read(vec_bytes * (1 + view_count))
                if len(payload) < vec_bytes * (1 + view_count):
                    raise TruncationError(idx, "embedding payload cut short")
                mat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
                mat = mat.reshape(1 + view_count, header.c_dim)
                original = _renormalize(mat[0], f"record {idx} original")
                views = np.stack([_renormalize(mat[1 + j], f"record {idx} view {j}")
                                  for j in range(view_count)]) if view_count else mat[1:]
                yield StreamRecord(
                    original=original,
                    views=views,
                    truth=None if truth < 0 else int(truth),
                    id=idx,
                )
            if fh.read(1):
                raise FormatError(f"trailing bytes after {header.record_count} records")

    return header, _records()


def write_stream(path, c_dim: int, n_classes: int, records) -> int:
    """Write records to a stream file; returns the byte count written.

    Vectors are normalized before storage unless already unit within 1e-4;
    a truth of None is stored as the -1 sentinel.
    """
    records = list(records)
    flags = FLAG_TRUTHS if any(r.truth is not None for r in records) else 0
    written = 0
    with open(path, "wb") as fh:
        written += fh.write(_HEADER.pack(MAGIC, VERSION, c_dim, n_classes, len(records), flags))
        for rec in records:
            if rec.original.shape[0] != c_dim or rec.views.shape[1] != c_dim:
                raise DimError(f"record {rec.id}: embedding dim does not match header C={c_dim}")
            if rec.truth is not None and rec.truth >= n_classes:
                raise DimError(f"record {rec.id}: truth {rec.truth} outside [0, {n_classes})")
            view_count = rec.views.shape[0]
            if view_count > 0xFFFF:
                raise DimError(f"record {rec.id}: {view_count} views exceed the u16 field")
            written += fh.write(_REC_PREFIX.pack(-1 if rec.truth is None else rec.truth, view_count))
            block = np.concatenate([rec.original[None, :], rec.views], axis=0)
            norms = np.linalg.norm(block, axis=1)
            if np.any(norms == 0.0):
                raise DimError(f"record {rec.id}: zero-norm embedding")
            off = np.abs(norms - 1.0) > NORM_TOL
            if np.any(off):
                block = block.copy()
                block[off] /= norms[off, None]
            written += fh.write(block.astype("<f4").tobytes())
    return written


def _bank_raw_path(manifest_path) -> Path:
    return Path(manifest_path).with_suffix(".f32")


def read_class_bank(path) -> ClassBank:
    """Load a bank manifest and its sibling raw f32 matrix; rows are normalized."""
    path = Path(path)
    try:
        manifest = json.loads(path.read_text())
    except OSError as err:
        raise IoError(f"cannot read bank manifest {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise FormatError(f"bank manifest {path} is not valid JSON: {err}") from err
    if not isinstance(manifest, dict) or "names" not in manifest or "C" not in manifest:
        raise FormatError(f"bank manifest {path} must contain 'names' and 'C'")
    names = manifest["names"]
    c_dim = manifest["C"]
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise FormatError("bank manifest 'names' must be a list of strings")
    if not isinstance(c_dim, int) or c_dim < 1:
        raise FormatError(f"bank manifest 'C' must be a positive integer, got {c_dim!r}")
    raw_path = _bank_raw_path(path)
    try:
        raw = raw_path.read_bytes()
    except OSError as err:
        raise IoError(f"cannot read bank data {raw_path}: {err}") from err
    values = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    if values.size != len(names) * c_dim:
        raise FormatError(
            f"bank data holds {values.size} floats, expected {len(names)} x {c_dim}")
    rows = values.reshape(len(names), c_dim)
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0.0):
        raise FormatError("bank contains a zero-norm row")
    if np.any(np.abs(norms - 1.0) > NORM_TOL):
        warnings.warn(f"bank {path}: rows off unit norm by more than {NORM_TOL}; re-normalizing")
    return ClassBank(rows / norms[:, None], tuple(names))


def write_class_bank(path, bank: ClassBank) -> None:
    """Write the manifest JSON and the sibling raw f32 matrix."""
    path = Path(path)
    manifest = {"names": list(bank.names), "C": bank.c_dim}
    try:
        path.write_text(json.dumps(manifest, indent=2) + "\n")
        _bank_raw_path(path).write_bytes(bank.weights.astype("<f4").tobytes())
    except OSError as err:
        raise IoError(f"cannot write bank {path}: {err}") from err


def write_report(path, report: MetricsReport) -> None:
    """Serialize a MetricsReport as JSON with a stable key order."""
    try:
        with open(path, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
            fh.write("\n")
    except OSError as err:
        raise IoError(f"cannot write report {path}: {err}") from err

"""FSF field files, PGM rasters, and CSV export.

FSF layout (bit-exact contract):
  bytes ``FSF1\n``, then ASCII header lines ``key=value\n`` (canonical keys
  d, shape, spacing, gamma, p, seed, jmin, jmax, basis; unknown keys are
  preserved), then one empty line, then the payload: float64 little-endian,
  row-major, last axis fastest.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from fracfield.errors import FracfieldError
from fracfield.grid import SampledField

MAGIC = b"FSF1\n"
CANONICAL_KEYS = ("d", "shape", "spacing", "gamma", "p", "seed",
                  "jmin", "jmax", "basis")


class FieldFileError(FracfieldError):
    """Malformed FSF file."""


class BadMagicError(FieldFileError):
    pass


class HeaderError(FieldFileError):
    pass


class ShortPayloadError(FieldFileError):
    pass


def _atomic_write(path: str, data: bytes):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fsf-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_field(field: SampledField, metadata: dict | None = None) -> bytes:
    """Serialize to FSF bytes; derived keys override metadata duplicates."""
    meta = dict(metadata or {})
    meta["d"] = str(field.d)
    meta["shape"] = ",".join(str(s) for s in field.values.shape)
    meta["spacing"] = repr(field.spacing)
    lines = [MAGIC.decode()]
    for key in CANONICAL_KEYS:
        if key in meta:
            lines.append(f"{key}={meta.pop(key)}\n")
    for key in meta:  # unknown keys, original order
        lines.append(f"{key}={meta[key]}\n")
    lines.append("\n")
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    return "".join(lines).encode() + payload


def write_field(field: SampledField, metadata: dict | None, path: str):
    """Write an FSF file atomically (temp file + rename)."""
    _atomic_write(path, encode_field(field, metadata))


def decode_field(data: bytes) -> tuple[SampledField, dict]:
    if data[:len(MAGIC)] != MAGIC:
        raise BadMagicError(
            f"bad magic: expected {MAGIC!r}, got {data[:len(MAGIC)]!r}")
    pos = len(MAGIC)
    meta: dict[str, str] = {}
    while True:
        end = data.find(b"\n", pos)
        if end < 0:
            raise HeaderError("unterminated header: no blank line before payload")
        line = data[pos:end]
        pos = end + 1
        if line == b"":
            break
        if b"=" not in line:
            raise HeaderError(f"malformed header line {line!r}: missing '='")
        key, _, value = line.partition(b"=")
        meta[key.decode()] = value.decode()
    for required in ("d", "shape"):
        if required not in meta:
            raise HeaderError(f"missing required header key '{required}='")
    try:
        d = int(meta["d"])
        shape = tuple(int(s) for s in meta["shape"].split(","))
    except ValueError as exc:
        raise HeaderError(f"unparseable d/shape header: {exc}") from None
    if len(shape) != d:
        raise HeaderError(f"shape {shape} does not match d={d}")
    expected = int(np.prod(shape)) * 8
    payload = data[pos:]
    if len(payload) < expected:
        raise ShortPayloadError(
            f"short payload: expected {expected} bytes, got {len(payload)}")
    values = np.frombuffer(payload[:expected], dtype="<f8").reshape(shape)
    spacing = float(meta.get("spacing", 1.0 / shape[0]))
    return SampledField(values.copy(), length=spacing * shape[0]), meta


def read_field(path: str) -> tuple[SampledField, dict]:
    with open(path, "rb") as fh:
        return decode_field(fh.read())


def export_pgm(field: SampledField, path: str):
    """16-bit binary PGM, min-max normalized; constant fields map to mid-gray."""
    if field.d != 2:
        raise ValueError(f"PGM export needs a d=2 field, got d={field.d}")
    v = field.values
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        pixels = np.rint((v - lo) / (hi - lo) * 65535.0).astype(np.uint16)
    else:
        pixels = np.full(v.shape, 32768, dtype=np.uint16)
    h, w = v.shape
    header = f"P5\n{w} {h}\n65535\n".encode()
    _atomic_write(path, header + pixels.astype(">u2").tobytes())


def export_csv(field: SampledField, path: str):
    """d=1: one sample per line; d=2: lines of x,y,value."""
    if field.d == 1:
        body = "".join(f"{float(v)!r}\n" for v in field.values)
    elif field.d == 2:
        h = field.spacing
        rows = []
        for i in range(field.n):
            for j in range(field.n):
                rows.append(f"{float(i * h)!r},{float(j * h)!r},"
                            f"{float(field.values[i, j])!r}\n")
        body = "".join(rows)
    else:
        raise ValueError("CSV export supports d = 1 or 2")
    _atomic_write(path, body.encode())


def export_samples_csv(samples: np.ndarray, path: str):
    _atomic_write(path, "".join(f"{float(v)!r}\n" for v in samples).encode())

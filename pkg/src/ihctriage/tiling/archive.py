"""Patch archives: one length-prefixed binary file of patches per WSI.

Layout (all integers little-endian):

  magic            4 bytes  b"PTAR"
  version          u16      currently 1
  slide_id_len     u16      followed by that many UTF-8 bytes
  patch_px         u32
  target_um_per_px f64
  record_count     u64
  records          record_count entries of:
      payload_len  u32      must equal 16 + 3 * patch_px**2
      x, y         i32, i32 anchor at target resolution
      tissue_frac  f64
      pixels       3 * patch_px**2 raw RGB bytes

Any deviation (bad magic, wrong prefix, count mismatch, trailing bytes)
raises ArchiveFormatError. Writing the same records twice produces
byte-identical files.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from ..errors import ArchiveFormatError, InvalidInputError

MAGIC = b"PTAR"
VERSION = 1
_FIXED_HEADER = struct.Struct("<4sHH")
_HEADER_TAIL = struct.Struct("<IdQ")
_RECORD_PREFIX = struct.Struct("<I")
_RECORD_FIXED = struct.Struct("<iid")


@dataclass(frozen=True)
class ArchiveHeader:
    slide_id: str
    patch_px: int
    target_um_per_px: float
    record_count: int

    @property
    def payload_len(self) -> int:
        return _RECORD_FIXED.size + 3 * self.patch_px * self.patch_px


@dataclass(frozen=True)
class PatchRecord:
    slide_id: str
    anchor: tuple[int, int]
    patch_px: int
    target_um_per_px: float
    tissue_fraction: float
    pixels: bytes

    def __post_init__(self):
        expected = 3 * self.patch_px * self.patch_px
        if len(self.pixels) != expected:
            raise InvalidInputError(
                f"pixel buffer is {len(self.pixels)} bytes, expected {expected}"
            )
        f = self.tissue_fraction
        if not (math.isfinite(f) and 0.0 <= f <= 1.0):
            raise InvalidInputError(f"tissue_fraction out of [0,1]: {f!r}")


class PatchArchiveWriter:
    """Streams records to disk; the header count is patched on close."""

    def __init__(self, path, slide_id: str, patch_px: int, target_um_per_px: float):
        self._path = path
        self._slide_id = slide_id
        self._patch_px = patch_px
        self._mpp = float(target_um_per_px)
        self._count = 0
        self._fh = open(path, "wb")
        sid = slide_id.encode("utf-8")
        self._fh.write(_FIXED_HEADER.pack(MAGIC, VERSION, len(sid)))
        self._fh.write(sid)
        self._count_offset = self._fh.tell() + 4 + 8
        self._fh.write(_HEADER_TAIL.pack(patch_px, self._mpp, 0))

    def append(self, anchor, tissue_fraction: float, pixels: bytes) -> None:
        record = PatchRecord(
            slide_id=self._slide_id,
            anchor=(int(anchor[0]), int(anchor[1])),
            patch_px=self._patch_px,
            target_um_per_px=self._mpp,
            tissue_fraction=float(tissue_fraction),
            pixels=pixels,
        )
        self._fh.write(_RECORD_PREFIX.pack(_RECORD_FIXED.size + len(pixels)))
        self._fh.write(
            _RECORD_FIXED.pack(record.anchor[0], record.anchor[1], record.tissue_fraction)
        )
        self._fh.write(record.pixels)
        self._count += 1

    def close(self) -> ArchiveHeader:
        self._fh.seek(self._count_offset)
        self._fh.write(struct.pack("<Q", self._count))
        self._fh.close()
        return ArchiveHeader(
            slide_id=self._slide_id,
            patch_px=self._patch_px,
            target_um_per_px=self._mpp,
            record_count=self._count,
        )

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.close()
        else:
            self._fh.close()
        return False


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ArchiveFormatError(f"truncated archive while reading {what}")
    return data


def read_header(fh) -> ArchiveHeader:
    magic, version, sid_len = _FIXED_HEADER.unpack(_read_exact(fh, _FIXED_HEADER.size, "header"))
    if magic != MAGIC:
        raise ArchiveFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ArchiveFormatError(f"unsupported archive version {version}")
    slide_id = _read_exact(fh, sid_len, "slide id").decode("utf-8")
    patch_px, mpp, count = _HEADER_TAIL.unpack(_read_exact(fh, _HEADER_TAIL.size, "header"))
    if patch_px <= 0 or not (math.isfinite(mpp) and mpp > 0):
        raise ArchiveFormatError(f"invalid header fields patch_px={patch_px} mpp={mpp}")
    return ArchiveHeader(
        slide_id=slide_id, patch_px=patch_px, target_um_per_px=mpp, record_count=count
    )


def iter_archive(path):
    """Returns (header, record iterator); the iterator validates the format."""
    fh = open(path, "rb")
    try:
        header = read_header(fh)
    except Exception:
        fh.close()
        raise

    def records():
        try:
            for i in range(header.record_count):
                prefix = _read_exact(fh, _RECORD_PREFIX.size, f"record {i} prefix")
                (payload_len,) = _RECORD_PREFIX.unpack(prefix)
                if payload_len != header.payload_len:
                    raise ArchiveFormatError(
                        f"record {i}: length prefix {payload_len} != expected {header.payload_len}"
                    )
                x, y, fraction = _RECORD_FIXED.unpack(
                    _read_exact(fh, _RECORD_FIXED.size, f"record {i}")
                )
                pixels = _read_exact(fh, 3 * header.patch_px**2, f"record {i} pixels")
                if not (math.isfinite(fraction) and 0.0 <= fraction <= 1.0):
                    raise ArchiveFormatError(f"record {i}: tissue fraction {fraction} out of range")
                yield PatchRecord(
                    slide_id=header.slide_id,
                    anchor=(x, y),
                    patch_px=header.patch_px,
                    target_um_per_px=header.target_um_per_px,
                    tissue_fraction=fraction,
                    pixels=pixels,
                )
            if fh.read(1) != b"":
                raise ArchiveFormatError("trailing bytes after the declared records")
        finally:
            fh.close()

    return header, records()


def read_archive(path):
    """Materialize (header, [records]) - convenient for small archives."""
    header, records = iter_archive(path)
    return header, list(records)


def write_archive(path, slide_id: str, patch_px: int, target_um_per_px: float, records) -> ArchiveHeader:
    writer = PatchArchiveWriter(path, slide_id, patch_px, target_um_per_px)
    try:
        for record in records:
            writer.append(record.anchor, record.tissue_fraction, record.pixels)
    except Exception:
        writer._fh.close()
        raise
    return writer.close()

"""Framed binary protocol for external tile translators.

All integers are little-endian; frames travel over the translator
subprocess's standard input/output.

Request frame (client -> server)::

    magic "CCWT" | version u8=1 | msg_type u8 | tile_id u32 | width u16 |
    height u16 | channels u8=3 | hist_flag u8 |
    [bins u16 + 3*bins^2 float32, when hist_flag=1] |
    payload width*height*3 raw bytes, row-major RGB

Response frame (server -> client)::

    magic "CCWT" | version u8=1 | msg_type u8 | tile_id u32 | width u16 |
    height u16 | channels u8=3 | payload raw bytes

msg_type 0 is the handshake (sent with zero dims and no payload; the server
echoes msg_type 0 before anything else), 1 is a translate request, 2 is a
translate response.  Any other sequence is a protocol violation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import ProtocolError

MAGIC = b"CCWT"
VERSION = 1
MSG_HANDSHAKE = 0
MSG_REQUEST = 1
MSG_RESPONSE = 2

_REQ_HEADER = struct.Struct("<4sBBIHHBB")
_RESP_HEADER = struct.Struct("<4sBBIHHB")
_BINS = struct.Struct("<H")


@dataclass(frozen=True)
class RequestFrame:
    msg_type: int
    tile_id: int
    pixels: np.ndarray | None  # (h, w, 3) uint8, None for handshake
    histogram: np.ndarray | None  # (3, bins, bins) float32, None when absent


@dataclass(frozen=True)
class ResponseFrame:
    msg_type: int
    tile_id: int
    pixels: np.ndarray | None


def _read_exact(stream: BinaryIO, n: int) -> bytes:
    """Read exactly n bytes or raise EOFError (stream closed mid-frame)."""
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = stream.read(remaining)
        if not chunk:
            raise EOFError(f"stream closed with {remaining} of {n} bytes unread")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def write_request(
    stream: BinaryIO,
    msg_type: int,
    tile_id: int,
    pixels: np.ndarray | None = None,
    histogram: np.ndarray | None = None,
) -> None:
    if pixels is None:
        width = height = 0
        payload = b""
    else:
        height, width = pixels.shape[:2]
        payload = np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()
    hist_flag = 1 if histogram is not None else 0
    stream.write(_REQ_HEADER.pack(MAGIC, VERSION, msg_type, tile_id, width, height, 3, hist_flag))
    if histogram is not None:
        bins = histogram.shape[1]
        stream.write(_BINS.pack(bins))
        stream.write(np.ascontiguousarray(histogram, dtype="<f4").tobytes())
    stream.write(payload)
    stream.flush()


def read_request(stream: BinaryIO) -> RequestFrame:
    header = _read_exact(stream, _REQ_HEADER.size)
    magic, version, msg_type, tile_id, width, height, channels, hist_flag = _REQ_HEADER.unpack(
        header
    )
    if magic != MAGIC:
        raise ProtocolError(f"protocol violation: bad magic {magic!r}")
    if version != VERSION:
        raise ProtocolError(f"protocol violation: unsupported version {version}")
    if channels != 3:
        raise ProtocolError(f"protocol violation: channels must be 3, got {channels}")
    histogram = None
    if hist_flag == 1:
        (bins,) = _BINS.unpack(_read_exact(stream, _BINS.size))
        raw = _read_exact(stream, 3 * bins * bins * 4)
        histogram = np.frombuffer(raw, dtype="<f4").reshape(3, bins, bins).copy()
    elif hist_flag != 0:
        raise ProtocolError(f"protocol violation: hist_flag must be 0/1, got {hist_flag}")
    pixels = None
    if width > 0 and height > 0:
        raw = _read_exact(stream, width * height * 3)
        pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3).copy()
    return RequestFrame(msg_type=msg_type, tile_id=tile_id, pixels=pixels, histogram=histogram)


def write_response(
    stream: BinaryIO, msg_type: int, tile_id: int, pixels: np.ndarray | None = None
) -> None:
    if pixels is None:
        width = height = 0
        payload = b""
    else:
        height, width = pixels.shape[:2]
        payload = np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()
    stream.write(_RESP_HEADER.pack(MAGIC, VERSION, msg_type, tile_id, width, height, 3))
    stream.write(payload)
    stream.flush()


def read_response(stream: BinaryIO) -> ResponseFrame:
    header = _read_exact(stream, _RESP_HEADER.size)
    magic, version, msg_type, tile_id, width, height, channels = _RESP_HEADER.unpack(header)
    if magic != MAGIC:
        raise ProtocolError(f"protocol violation: bad magic {magic!r}")
    if version != VERSION:
        raise ProtocolError(f"protocol violation: unsupported version {version}")
    if channels != 3:
        raise ProtocolError(f"protocol violation: channels must be 3, got {channels}")
    pixels = None
    if width > 0 and height > 0:
        raw = _read_exact(stream, width * height * 3)
        pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3).copy()
    return ResponseFrame(msg_type=msg_type, tile_id=tile_id, pixels=pixels)

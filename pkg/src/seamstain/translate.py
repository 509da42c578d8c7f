"""Pluggable patch translators sharing one interface.

A translator maps a :class:`TranslationRequest` (tile + color condition +
noise seed) to a :class:`TranslationResult` with identical dimensions and an
echoed tile_id.  Three implementations:

* :func:`translate_identity` - pipeline baseline, returns the tile as-is.
* :func:`translate_chroma_match` - deterministic log-chroma statistics
  matching against the condition histogram; exercises the same interface a
  learned recoloring model would.
* :class:`ExternalTranslator` - a learned model hosted in a subprocess
  behind the framed wire protocol (see :mod:`seamstain.wire`).

The noise seed is carried for stochastic translators; the deterministic ones
ignore it, and the wire protocol does not transmit it.
"""

from __future__ import annotations

import subprocess
import threading
from dataclasses import dataclass, field

import numpy as np

from . import wire
from .chroma import ChromaHistogram, chroma_stats
from .errors import (
    ProtocolError,
    TranslationTimeout,
    TranslatorExited,
    ValidationError,
)
from .image import (
    DEFAULT_LUM_MAX,
    DEFAULT_SAT_MIN,
    RasterImage,
    compute_tissue_mask,
    quantize_u8,
)

_ANCHOR_PARTNERS = ((1, 2), (0, 2), (0, 1))


@dataclass(frozen=True)
class TranslationRequest:
    tile_id: int
    tile: RasterImage
    condition: ChromaHistogram | None = None
    noise_seed: int = 0


@dataclass(frozen=True)
class TranslationResult:
    tile_id: int
    tile: RasterImage


@dataclass(frozen=True)
class ChromaMatchConfig:
    """Tissue criterion and chroma anchor for the deterministic recoloring."""

    sat_min: float = DEFAULT_SAT_MIN
    lum_max: float = DEFAULT_LUM_MAX
    anchor: int = 0  # 0=R, 1=G, 2=B
    sigma_floor: float = 1e-6


def translate_identity(req: TranslationRequest) -> TranslationResult:
    """Return the input tile unchanged (baseline and roundtrip oracle)."""
    return TranslationResult(tile_id=req.tile_id, tile=req.tile)


def translate_chroma_match(
    req: TranslationRequest, config: ChromaMatchConfig = ChromaMatchConfig()
) -> TranslationResult:
    """Shift the tile's tissue chroma distribution onto the condition's.

    Per tissue pixel the anchored log-chroma pair (u, v) is standardized by
    the tile's own tissue statistics and re-expressed in the condition's
    (mean, sd) from the matching anchor plane, then RGB is reconstructed with
    the original intensity preserved.  Background pixels pass through
    unchanged.
    """
    if req.condition is None:
        raise ValidationError("empty histogram condition")
    cond_total = req.condition.total()
    if cond_total <= 0.0:
        raise ValidationError("empty histogram condition")
    anchor = config.anchor
    if anchor not in (0, 1, 2):
        raise ValidationError(f"anchor must be 0, 1 or 2, got {anchor}")
    target = chroma_stats(req.condition)[anchor]
    if target.mass <= 0.0:
        raise ValidationError("empty histogram condition")

    tile = req.tile
    tissue = compute_tissue_mask(tile, config.sat_min, config.lum_max).bits
    if not tissue.any():
        return TranslationResult(tile_id=req.tile_id, tile=tile)

    eps = req.condition.epsilon
    rgb = tile.array.astype(np.float64) / 255.0
    intensity = np.sqrt(np.sum(rgb * rgb, axis=2))
    p1, p2 = _ANCHOR_PARTNERS[anchor]
    log_ch = np.log(rgb + eps)
    u = log_ch[:, :, anchor] - log_ch[:, :, p1]
    v = log_ch[:, :, anchor] - log_ch[:, :, p2]

    mu_u, sd_u = float(u[tissue].mean()), float(u[tissue].std())
    mu_v, sd_v = float(v[tissue].mean()), float(v[tissue].std())
    floor = config.sigma_floor
    u2 = (u - mu_u) * (target.sd_u / max(sd_u, floor)) + target.mean_u
    v2 = (v - mu_v) * (target.sd_v / max(sd_v, floor)) + target.mean_v

    channels = np.empty_like(rgb)
    channels[:, :, anchor] = 1.0
    channels[:, :, p1] = np.exp(-u2)
    channels[:, :, p2] = np.exp(-v2)
    norm = np.sqrt(np.sum(channels * channels, axis=2))
    scaled = channels * (intensity / norm)[:, :, None]
    recolored = quantize_u8(np.clip(scaled, 0.0, 1.0) * 255.0)

    out = tile.array.copy()
    out[tissue] = recolored[tissue]
    return TranslationResult(tile_id=req.tile_id, tile=RasterImage(out))


class _Slot:
    __slots__ = ("event", "frame", "error")

    def __init__(self) -> None:
        self.event = threading.Event()
        self.frame: wire.ResponseFrame | None = None
        self.error: Exception | None = None


class ExternalTranslator:
    """Client for a translator subprocess speaking the framed wire protocol.

    Requests may be pipelined from multiple threads; responses are matched
    back to callers by tile_id, so out-of-order replies are fine.  Once the
    process misbehaves or exits, every pending and future request fails with
    the same terminal error.
    """

    def __init__(
        self,
        command: list[str],
        timeout: float = 60.0,
        send_histogram: bool = True,
    ) -> None:
        self.timeout = timeout
        self.send_histogram = send_histogram
        self._proc = subprocess.Popen(
            command, stdin=subprocess.PIPE, stdout=subprocess.PIPE
        )
        self._write_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._pending: dict[int, _Slot] = {}
        self._terminal: Exception | None = None
        self._handshake = _Slot()
        self._handshaken = False
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        try:
            wire.write_request(self._proc.stdin, wire.MSG_HANDSHAKE, 0)
        except (OSError, ValueError) as exc:
            self._fail(TranslatorExited(f"process exit during handshake: {exc}"))
        if not self._handshake.event.wait(self.timeout):
            self._fail(TranslationTimeout(f"handshake timeout after {self.timeout}s"))
            raise self._terminal  # type: ignore[misc]
        if self._handshake.error is not None:
            raise self._handshake.error

    def _read_loop(self) -> None:
        try:
            while True:
                frame = wire.read_response(self._proc.stdout)
                if frame.msg_type == wire.MSG_HANDSHAKE:
                    if self._handshaken:
                        raise ProtocolError("protocol violation: repeated handshake")
                    self._handshaken = True
                    self._handshake.frame = frame
                    self._handshake.event.set()
                    continue
                if not self._handshaken:
                    raise ProtocolError(
                        "protocol violation: server reply before handshake"
                    )
                if frame.msg_type != wire.MSG_RESPONSE:
                    raise ProtocolError(
                        f"protocol violation: unexpected msg_type {frame.msg_type}"
                    )
                with self._state_lock:
                    slot = self._pending.pop(frame.tile_id, None)
                if slot is None:
                    raise ProtocolError(
                        f"tile_id mismatch: unexpected reply for tile {frame.tile_id}"
                    )
                slot.frame = frame
                slot.event.set()
        except EOFError:
            code = self._proc.poll()
            self._fail(TranslatorExited(f"process exit (return code {code})"))
        except ProtocolError as exc:
            self._fail(exc)
        except Exception as exc:  # stream torn down mid-read
            self._fail(TranslatorExited(f"process exit: {exc}"))

    def _fail(self, error: Exception) -> None:
        with self._state_lock:
            if self._terminal is None:
                self._terminal = error
            pending = list(self._pending.values())
            self._pending.clear()
        for slot in pending:
            slot.error = error
            slot.event.set()
        if not self._handshake.event.is_set():
            self._handshake.error = error
            self._handshake.event.set()

    def translate(self, req: TranslationRequest) -> TranslationResult:
        slot = _Slot()
        with self._state_lock:
            if self._terminal is not None:
                raise self._terminal
            if req.tile_id in self._pending:
                raise ValidationError(f"tile_id {req.tile_id} already in flight")
            self._pending[req.tile_id] = slot
        histogram = None
        if self.send_histogram and req.condition is not None:
            histogram = req.condition.values
        try:
            with self._write_lock:
                wire.write_request(
                    self._proc.stdin, wire.MSG_REQUEST, req.tile_id, req.tile.array, histogram
                )
        except (OSError, ValueError) as exc:
            self._fail(TranslatorExited(f"process exit during send: {exc}"))
        if not slot.event.wait(self.timeout):
            with self._state_lock:
                self._pending.pop(req.tile_id, None)
            raise TranslationTimeout(
                f"no reply for tile {req.tile_id} within {self.timeout}s"
            )
        if slot.error is not None:
            raise slot.error
        frame = slot.frame
        assert frame is not None
        if frame.pixels is None or frame.pixels.shape != req.tile.array.shape:
            got = None if frame.pixels is None else frame.pixels.shape
            raise ProtocolError(
                f"dimension mismatch: reply {got} for request {req.tile.array.shape}"
            )
        return TranslationResult(tile_id=frame.tile_id, tile=RasterImage(frame.pixels))

    __call__ = translate

    def close(self) -> None:
        if self._proc.stdin is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()
        self._reader.join(timeout=5)

    def __enter__(self) -> "ExternalTranslator":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

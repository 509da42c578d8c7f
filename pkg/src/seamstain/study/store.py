"""Append-only newline-delimited JSON response log.

Each response is one JSON line, fsynced before the caller gets its
acknowledgment, so a crash between append and ack leaves the response either
durably present or absent.  On replay a truncated final line (torn write) is
ignored; corruption anywhere else is an error.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from ..errors import ValidationError

IDENTIFICATION_CHOICES = ("synthetic", "traditional", "cannot_tell")
RATING_RANGE = (1, 2, 3, 4)


class DuplicateResponseError(ValidationError):
    """A (reviewer, position) pair already has a recorded response."""


@dataclass(frozen=True)
class ReviewResponse:
    reviewer_id: str
    position: int
    effectiveness: int
    quality: int
    identification: str
    timestamp: int  # UTC seconds

    def __post_init__(self) -> None:
        if self.effectiveness not in RATING_RANGE:
            raise ValidationError(f"effectiveness must be 1-4, got {self.effectiveness}")
        if self.quality not in RATING_RANGE:
            raise ValidationError(f"quality must be 1-4, got {self.quality}")
        if self.identification not in IDENTIFICATION_CHOICES:
            raise ValidationError(f"identification must be one of {IDENTIFICATION_CHOICES}")
        if self.position < 0:
            raise ValidationError(f"position must be >= 0, got {self.position}")


def response_from_dict(data: dict) -> ReviewResponse:
    try:
        return ReviewResponse(
            reviewer_id=str(data["reviewer_id"]),
            position=int(data["position"]),
            effectiveness=int(data["effectiveness"]),
            quality=int(data["quality"]),
            identification=str(data["identification"]),
            timestamp=int(data.get("timestamp", time.time())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad response payload: {exc}") from exc


class ResponseLog:
    """Durable, replayable store of review responses keyed by (reviewer, position)."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._by_key: dict[tuple[str, int], ReviewResponse] = {}
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        raw = self.path.read_bytes()
        if not raw:
            return
        lines = raw.split(b"\n")
        # A file that does not end with a newline has a torn final line.
        torn_tail = lines.pop() if lines[-1] != b"" else lines.pop()
        if torn_tail:
            pass  # ignored: the writer crashed mid-append
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                resp = response_from_dict(json.loads(line))
            except (json.JSONDecodeError, ValidationError) as exc:
                raise ValidationError(
                    f"corrupt response log {self.path} line {lineno}: {exc}"
                ) from exc
            key = (resp.reviewer_id, resp.position)
            if key in self._by_key:
                raise ValidationError(
                    f"corrupt response log {self.path}: duplicate {key} at line {lineno}"
                )
            self._by_key[key] = resp

    def append(self, resp: ReviewResponse) -> None:
        """Durably record one response; raises on duplicates before writing."""
        key = (resp.reviewer_id, resp.position)
        with self._lock:
            if key in self._by_key:
                raise DuplicateResponseError(
                    f"duplicate response for reviewer {resp.reviewer_id!r} position {resp.position}"
                )
            line = json.dumps(asdict(resp), sort_keys=True) + "\n"
            with open(self.path, "ab") as fh:
                fh.write(line.encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())
            self._by_key[key] = resp

    def has(self, reviewer_id: str, position: int) -> bool:
        with self._lock:
            return (reviewer_id, position) in self._by_key

    def for_reviewer(self, reviewer_id: str) -> list[ReviewResponse]:
        with self._lock:
            return sorted(
                (r for (rid, _), r in self._by_key.items() if rid == reviewer_id),
                key=lambda r: r.position,
            )

    def all_responses(self) -> list[ReviewResponse]:
        with self._lock:
            return sorted(self._by_key.values(), key=lambda r: (r.reviewer_id, r.position))

    def __len__(self) -> int:
        with self._lock:
            return len(self._by_key)

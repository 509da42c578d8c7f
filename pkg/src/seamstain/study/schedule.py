"""Randomized two-block review schedule.

Block 1 presents every case once in a seeded random order, each case
assigned a staining method by a seeded fair coin.  Block 2 presents the same
cases in an independent random order with the alternate method, so every
case is reviewed twice, once per method.  The same schedule serves every
reviewer, and items sent to reviewers carry only an opaque label - never the
method or the block boundary.

All randomness comes from one splitmix64 stream seeded by the study seed
(see :mod:`seamstain.rng`), drawn in a fixed documented order: block-1
shuffle, block-1 coins (in presentation order), block-2 shuffle, then one
label draw per position.  Any implementation of that recipe reproduces the
schedule bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ValidationError
from ..rng import SplitMix64

METHOD_TRADITIONAL = "traditional"
METHOD_SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class StudyCase:
    case_id: str
    he_image: str
    traditional_sox10: str
    synthetic_sox10: str


@dataclass(frozen=True)
class StudyDefinition:
    cases: tuple[StudyCase, ...]
    seed: int
    reviewers: tuple[str, ...]

    def __post_init__(self) -> None:
        ids = [c.case_id for c in self.cases]
        if len(set(ids)) != len(ids):
            raise ValidationError("case_ids must be unique")
        if not self.reviewers:
            raise ValidationError("at least one reviewer required")
        if len(set(self.reviewers)) != len(self.reviewers):
            raise ValidationError("reviewer ids must be unique")


@dataclass(frozen=True)
class ReviewItem:
    position: int  # 0-based index in the 2N sequence
    block: int  # 1 or 2
    case_id: str
    method: str  # traditional | synthetic; never serialized to reviewers
    blinded_label: str


def load_definition(path: str | Path, check_paths: bool = True) -> StudyDefinition:
    """Read a study definition JSON file; image paths resolve relative to it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"unreadable study definition {path}: {exc}") from exc
    base = path.parent
    cases = []
    for i, entry in enumerate(raw.get("cases", [])):
        try:
            case = StudyCase(
                case_id=str(entry["case_id"]),
                he_image=str(base / entry["he_image"]),
                traditional_sox10=str(base / entry["traditional_sox10"]),
                synthetic_sox10=str(base / entry["synthetic_sox10"]),
            )
        except KeyError as exc:
            raise ValidationError(f"case {i} missing field {exc}") from exc
        cases.append(case)
    if not cases:
        raise ValidationError(f"study definition {path} has no cases")
    definition = StudyDefinition(
        cases=tuple(cases),
        seed=int(raw.get("seed", 0)),
        reviewers=tuple(str(r) for r in raw.get("reviewers", [])),
    )
    if check_paths:
        for case in definition.cases:
            for p in (case.he_image, case.traditional_sox10, case.synthetic_sox10):
                if not Path(p).is_file():
                    raise ValidationError(f"case {case.case_id}: missing image {p}")
    return definition


def generate_schedule(definition: StudyDefinition) -> list[ReviewItem]:
    """Build the 2N-item blinded sequence for a study definition."""
    n = len(definition.cases)
    if n < 1:
        raise ValidationError("empty case list")
    rng = SplitMix64(definition.seed)

    block1 = list(range(n))
    rng.shuffle(block1)
    method_by_case: dict[int, str] = {}
    for idx in block1:
        method_by_case[idx] = METHOD_SYNTHETIC if rng.next_bit() else METHOD_TRADITIONAL

    block2 = list(range(n))
    rng.shuffle(block2)

    items: list[ReviewItem] = []
    used_labels: set[str] = set()

    def next_label() -> str:
        while True:
            label = f"{rng.next_u64():016x}"
            if label not in used_labels:
                used_labels.add(label)
                return label

    alternate = {METHOD_SYNTHETIC: METHOD_TRADITIONAL, METHOD_TRADITIONAL: METHOD_SYNTHETIC}
    for position, idx in enumerate(block1):
        items.append(
            ReviewItem(
                position=position,
                block=1,
                case_id=definition.cases[idx].case_id,
                method=method_by_case[idx],
                blinded_label=next_label(),
            )
        )
    for offset, idx in enumerate(block2):
        items.append(
            ReviewItem(
                position=n + offset,
                block=2,
                case_id=definition.cases[idx].case_id,
                method=alternate[method_by_case[idx]],
                blinded_label=next_label(),
            )
        )
    return items


def schedule_to_json(items: list[ReviewItem]) -> str:
    """Canonical server-side serialization (includes methods; never sent to clients)."""
    return json.dumps(
        [
            {
                "position": it.position,
                "block": it.block,
                "case_id": it.case_id,
                "method": it.method,
                "blinded_label": it.blinded_label,
            }
            for it in items
        ],
        sort_keys=True,
    )


def wire_item(item: ReviewItem, total: int) -> dict:
    """The reviewer-facing payload: opaque label and progress only.

    Deliberately omits method, block, and case_id so nothing about the
    staining method or block boundaries can leak to the client.
    """
    return {
        "position": item.position,
        "blinded_label": item.blinded_label,
        "total": total,
        "complete": False,
    }

#!/usr/bin/env python3
"""Simulate reviewers completing a study and print the descriptive statistics.

Builds (or reuses) a fixture directory, runs every reviewer through the full
2N sequence with seeded pseudo-random answers, and prints the same tables
the stats endpoint serves.

    python scripts/simulate_study.py --study /tmp/demo-study
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from seamstain.rng import SplitMix64
from seamstain.study.schedule import generate_schedule, load_definition
from seamstain.study.stats import compute_stats
from seamstain.study.store import ResponseLog, ReviewResponse

from make_study_fixture import build


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--study", type=Path, required=True,
                        help="study directory (created if missing)")
    parser.add_argument("--cases", type=int, default=25)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    definition_path = args.study / "study.json"
    if not definition_path.exists():
        definition_path = build(
            args.study, args.cases, size=128, seed=args.seed,
            reviewers=["alice", "bob", "carol"],
        )
    definition = load_definition(definition_path)
    schedule = generate_schedule(definition)
    log = ResponseLog(args.study / "responses.ndjson")

    rng = SplitMix64(args.seed)
    guesses = ("synthetic", "traditional", "cannot_tell", "cannot_tell")
    now = int(time.time())
    for reviewer in definition.reviewers:
        for item in schedule:
            if log.has(reviewer, item.position):
                continue
            log.append(
                ReviewResponse(
                    reviewer_id=reviewer,
                    position=item.position,
                    effectiveness=1 + rng.next_below(4),
                    quality=1 + rng.next_below(4),
                    identification=guesses[rng.next_below(4)],
                    timestamp=now,
                )
            )
    stats = compute_stats(log.all_responses(), schedule)
    print(json.dumps(stats.to_dict(), indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

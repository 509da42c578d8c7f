"""Descriptive statistics over collected review responses.

Counts are exact; means use exact rational arithmetic before display
rounding; standard deviations are sample (n-1) values.  Display strings
round half up - integers for percentages, one decimal for means and sds -
matching how study tables conventionally report them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from ..errors import ValidationError
from .schedule import METHOD_SYNTHETIC, METHOD_TRADITIONAL, ReviewItem
from .store import RATING_RANGE, ReviewResponse


def percent_display(count: int, total: int) -> int:
    """count/total as a percentage, rounded half up to an integer."""
    if total == 0:
        return 0
    return int((Decimal(count) * 100 / Decimal(total)).quantize(Decimal(1), ROUND_HALF_UP))


def one_decimal_display(value: float | Fraction) -> str:
    """Round half up to one decimal, as a display string (e.g. '3.0')."""
    if isinstance(value, Fraction):
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        dec = Decimal(repr(value))
    return str(dec.quantize(Decimal("0.1"), ROUND_HALF_UP))


@dataclass(frozen=True)
class RatingSummary:
    """Distribution of one 1-4 rating for one staining method."""

    counts: dict[int, int]
    percentages: dict[int, int]
    n: int
    mean: float
    sd: float
    mean_display: str
    sd_display: str


@dataclass(frozen=True)
class IdentificationCell:
    count: int
    percent: int


@dataclass(frozen=True)
class IdentificationTable:
    """Reviewer guesses versus actual method, as counts of all reviews."""

    incorrect: IdentificationCell
    identified_traditional_when_synthetic: IdentificationCell
    identified_synthetic_when_traditional: IdentificationCell
    correct: IdentificationCell
    correctly_identified_synthetic: IdentificationCell
    correctly_identified_traditional: IdentificationCell
    cannot_tell: IdentificationCell


@dataclass(frozen=True)
class StudyStats:
    total_reviews: int
    effectiveness: dict[str, RatingSummary]  # keyed by method
    quality: dict[str, RatingSummary]
    identification: IdentificationTable

    def to_dict(self) -> dict:
        def summary(s: RatingSummary) -> dict:
            return {
                "counts": {str(k): v for k, v in s.counts.items()},
                "percentages": {str(k): v for k, v in s.percentages.items()},
                "n": s.n,
                "mean": s.mean,
                "sd": s.sd,
                "mean_display": s.mean_display,
                "sd_display": s.sd_display,
            }

        def cell(c: IdentificationCell) -> dict:
            return {"count": c.count, "percent": c.percent}

        ident = self.identification
        return {
            "total_reviews": self.total_reviews,
            "effectiveness": {m: summary(s) for m, s in self.effectiveness.items()},
            "quality": {m: summary(s) for m, s in self.quality.items()},
            "identification": {
                "incorrect": cell(ident.incorrect),
                "identified_traditional_when_synthetic": cell(
                    ident.identified_traditional_when_synthetic
                ),
                "identified_synthetic_when_traditional": cell(
                    ident.identified_synthetic_when_traditional
                ),
                "correct": cell(ident.correct),
                "correctly_identified_synthetic": cell(ident.correctly_identified_synthetic),
                "correctly_identified_traditional": cell(ident.correctly_identified_traditional),
                "cannot_tell": cell(ident.cannot_tell),
            },
        }


def _summarize(ratings: list[int]) -> RatingSummary:
    counts = {r: 0 for r in RATING_RANGE}
    for r in ratings:
        counts[r] += 1
    n = len(ratings)
    if n == 0:
        return RatingSummary(counts, {r: 0 for r in RATING_RANGE}, 0, 0.0, 0.0, "0.0", "0.0")
    mean_frac = Fraction(sum(ratings), n)
    mean = float(mean_frac)
    if n > 1:
        ss = sum((Fraction(r) - mean_frac) ** 2 for r in ratings)
        sd = math.sqrt(float(ss / (n - 1)))
    else:
        sd = 0.0
    return RatingSummary(
        counts=counts,
        percentages={r: percent_display(c, n) for r, c in counts.items()},
        n=n,
        mean=mean,
        sd=sd,
        mean_display=one_decimal_display(mean_frac),
        sd_display=one_decimal_display(sd),
    )


def compute_stats(responses: list[ReviewResponse], schedule: list[ReviewItem]) -> StudyStats:
    """Aggregate responses against the schedule's position->method mapping."""
    method_by_position = {item.position: item.method for item in schedule}
    eff: dict[str, list[int]] = {METHOD_TRADITIONAL: [], METHOD_SYNTHETIC: []}
    qual: dict[str, list[int]] = {METHOD_TRADITIONAL: [], METHOD_SYNTHETIC: []}
    ident_counts = {
        "trad_when_synth": 0,
        "synth_when_trad": 0,
        "correct_synth": 0,
        "correct_trad": 0,
        "cannot_tell": 0,
    }
    for resp in responses:
        method = method_by_position.get(resp.position)
        if method is None:
            raise ValidationError(
                f"orphan response: position {resp.position} not in the schedule"
            )
        eff[method].append(resp.effectiveness)
        qual[method].append(resp.quality)
        if resp.identification == "cannot_tell":
            ident_counts["cannot_tell"] += 1
        elif resp.identification == METHOD_SYNTHETIC:
            if method == METHOD_SYNTHETIC:
                ident_counts["correct_synth"] += 1
            else:
                ident_counts["synth_when_trad"] += 1
        else:
            if method == METHOD_TRADITIONAL:
                ident_counts["correct_trad"] += 1
            else:
                ident_counts["trad_when_synth"] += 1

    total = len(responses)

    def cell(count: int) -> IdentificationCell:
        return IdentificationCell(count=count, percent=percent_display(count, total))

    incorrect = ident_counts["trad_when_synth"] + ident_counts["synth_when_trad"]
    correct = ident_counts["correct_synth"] + ident_counts["correct_trad"]
    return StudyStats(
        total_reviews=total,
        effectiveness={m: _summarize(v) for m, v in eff.items()},
        quality={m: _summarize(v) for m, v in qual.items()},
        identification=IdentificationTable(
            incorrect=cell(incorrect),
            identified_traditional_when_synthetic=cell(ident_counts["trad_when_synth"]),
            identified_synthetic_when_traditional=cell(ident_counts["synth_when_trad"]),
            correct=cell(correct),
            correctly_identified_synthetic=cell(ident_counts["correct_synth"]),
            correctly_identified_traditional=cell(ident_counts["correct_trad"]),
            cannot_tell=cell(ident_counts["cannot_tell"]),
        ),
    )

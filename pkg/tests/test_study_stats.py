import math
from fractions import Fraction

import pytest

from seamstain.errors import ValidationError
from seamstain.study.schedule import METHOD_SYNTHETIC, METHOD_TRADITIONAL, generate_schedule
from seamstain.study.stats import compute_stats, one_decimal_display, percent_display
from seamstain.study.store import ReviewResponse

from test_study_schedule import make_definition

REVIEWERS = ("r1", "r2", "r3")

# Marginal counts of the published review tables (ratings 1-4 per method,
# and reviewer identifications per actual method).
EFFECTIVENESS = {METHOD_TRADITIONAL: (13, 11, 29, 22), METHOD_SYNTHETIC: (6, 14, 32, 23)}
QUALITY = {METHOD_TRADITIONAL: (2, 1, 21, 51), METHOD_SYNTHETIC: (0, 0, 5, 70)}
IDENTIFICATION = {
    # actual synthetic: 19 guessed traditional, 8 guessed synthetic, 48 cannot tell
    METHOD_SYNTHETIC: ("traditional",) * 19 + ("synthetic",) * 8 + ("cannot_tell",) * 48,
    # actual traditional: 18 guessed synthetic, 4 guessed traditional, 53 cannot tell
    METHOD_TRADITIONAL: ("synthetic",) * 18 + ("traditional",) * 4 + ("cannot_tell",) * 53,
}


def expand_ratings(counts):
    return [rating for rating, count in zip((1, 2, 3, 4), counts) for _ in range(count)]


def build_golden_responses(schedule):
    """Deterministic assignment realizing the marginal counts above."""
    slots = {METHOD_SYNTHETIC: [], METHOD_TRADITIONAL: []}
    for item in sorted(schedule, key=lambda it: it.position):
        for reviewer in REVIEWERS:
            slots[item.method].append((reviewer, item.position))
    responses = []
    for method, pairs in slots.items():
        eff = expand_ratings(EFFECTIVENESS[method])
        qual = expand_ratings(QUALITY[method])
        ident = IDENTIFICATION[method]
        assert len(pairs) == len(eff) == len(qual) == len(ident) == 75
        for (reviewer, position), e, q, ide in zip(pairs, eff, qual, ident):
            responses.append(
                ReviewResponse(
                    reviewer_id=reviewer,
                    position=position,
                    effectiveness=e,
                    quality=q,
                    identification=ide,
                    timestamp=1_700_000_000,
                )
            )
    return responses


class TestGoldenTables:
    def test_reproduces_published_statistics(self):
        schedule = generate_schedule(make_definition(n_cases=25, seed=99))
        stats = compute_stats(build_golden_responses(schedule), schedule)

        assert stats.total_reviews == 150

        eff_s = stats.effectiveness[METHOD_SYNTHETIC]
        eff_t = stats.effectiveness[METHOD_TRADITIONAL]
        qual_s = stats.quality[METHOD_SYNTHETIC]
        qual_t = stats.quality[METHOD_TRADITIONAL]

        assert eff_s.counts == {1: 6, 2: 14, 3: 32, 4: 23}
        assert eff_t.counts == {1: 13, 2: 11, 3: 29, 4: 22}
        assert qual_s.counts == {1: 0, 2: 0, 3: 5, 4: 70}
        assert qual_t.counts == {1: 2, 2: 1, 3: 21, 4: 51}

        assert eff_s.mean == pytest.approx(2.96, abs=1e-12)
        assert eff_t.mean == pytest.approx(2.80, abs=1e-12)
        assert qual_s.mean == pytest.approx(3.933333333333333, abs=1e-12)
        assert qual_t.mean == pytest.approx(3.613333333333333, abs=1e-12)

        assert (eff_s.mean_display, eff_t.mean_display) == ("3.0", "2.8")
        assert (qual_s.mean_display, qual_t.mean_display) == ("3.9", "3.6")

        # Sample (n-1) standard deviations, displayed at one decimal.
        assert eff_s.sd == pytest.approx(0.9070296040938811, abs=1e-12)
        assert (eff_s.sd_display, eff_t.sd_display) == ("0.9", "1.1")
        assert (qual_s.sd_display, qual_t.sd_display) == ("0.3", "0.7")

        # Per-cell percentages of each method's 75 reviews.
        assert eff_t.percentages == {1: 17, 2: 15, 3: 39, 4: 29}
        assert eff_s.percentages == {1: 8, 2: 19, 3: 43, 4: 31}
        assert qual_t.percentages == {1: 3, 2: 1, 3: 28, 4: 68}
        assert qual_s.percentages == {1: 0, 2: 0, 3: 7, 4: 93}

        ident = stats.identification
        assert (ident.incorrect.count, ident.incorrect.percent) == (37, 25)
        assert (ident.correct.count, ident.correct.percent) == (12, 8)
        assert (ident.cannot_tell.count, ident.cannot_tell.percent) == (101, 67)
        assert ident.identified_traditional_when_synthetic.count == 19
        assert ident.identified_traditional_when_synthetic.percent == 13
        assert ident.identified_synthetic_when_traditional.count == 18
        assert ident.identified_synthetic_when_traditional.percent == 12
        assert ident.correctly_identified_synthetic.count == 8
        assert ident.correctly_identified_synthetic.percent == 5
        assert ident.correctly_identified_traditional.count == 4
        assert ident.correctly_identified_traditional.percent == 3

    def test_to_dict_shape(self):
        schedule = generate_schedule(make_definition(n_cases=25, seed=99))
        data = compute_stats(build_golden_responses(schedule), schedule).to_dict()
        assert data["total_reviews"] == 150
        assert data["effectiveness"][METHOD_SYNTHETIC]["mean_display"] == "3.0"
        assert data["identification"]["cannot_tell"] == {"count": 101, "percent": 67}


class TestEdgeBehaviour:
    def test_orphan_response_rejected(self):
        schedule = generate_schedule(make_definition(n_cases=2, seed=1))
        orphan = ReviewResponse("r1", 999, 3, 3, "cannot_tell", 0)
        with pytest.raises(ValidationError, match="orphan response"):
            compute_stats([orphan], schedule)

    def test_empty_responses(self):
        schedule = generate_schedule(make_definition(n_cases=2, seed=1))
        stats = compute_stats([], schedule)
        assert stats.total_reviews == 0
        assert stats.effectiveness[METHOD_SYNTHETIC].n == 0
        assert stats.identification.cannot_tell.percent == 0

    def test_single_response_sd_zero(self):
        schedule = generate_schedule(make_definition(n_cases=1, seed=1))
        first = next(it for it in schedule if it.position == 0)
        resp = ReviewResponse("r1", 0, 4, 4, first.method, 0)
        stats = compute_stats([resp], schedule)
        assert stats.effectiveness[first.method].sd == 0.0


class TestDisplayRounding:
    def test_percent_half_up(self):
        assert percent_display(19, 150) == 13  # 12.67
        assert percent_display(18, 150) == 12  # 12.0
        assert percent_display(1, 8) == 13  # 12.5 rounds up
        assert percent_display(0, 0) == 0

    def test_one_decimal_half_up(self):
        assert one_decimal_display(Fraction(222, 75)) == "3.0"
        assert one_decimal_display(Fraction(295, 75)) == "3.9"
        assert one_decimal_display(0.25) == "0.3"
        assert one_decimal_display(0.9070296040938811) == "0.9"
        assert one_decimal_display(1.0526671402243484) == "1.1"

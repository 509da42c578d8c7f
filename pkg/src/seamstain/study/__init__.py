"""Blinded two-block reviewer study: schedule, storage, statistics, HTTP API."""

from .schedule import (
    METHOD_SYNTHETIC,
    METHOD_TRADITIONAL,
    ReviewItem,
    StudyCase,
    StudyDefinition,
    generate_schedule,
    schedule_to_json,
)
from .store import DuplicateResponseError, ResponseLog, ReviewResponse
from .stats import StudyStats, compute_stats

__all__ = [
    "METHOD_SYNTHETIC",
    "METHOD_TRADITIONAL",
    "ReviewItem",
    "StudyCase",
    "StudyDefinition",
    "generate_schedule",
    "schedule_to_json",
    "DuplicateResponseError",
    "ResponseLog",
    "ReviewResponse",
    "StudyStats",
    "compute_stats",
]

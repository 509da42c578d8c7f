"""HTTP/JSON API for running the blinded review study.

Reviewers fetch their next item (an opaque blinded label plus progress),
pull the H&E and Sox10 images for that label, and post survey responses; an
admin endpoint exposes the descriptive statistics.  The staining method
never appears in any reviewer-facing payload.

Run with ``python -m seamstain.study.server --definition study.json``.
"""

from __future__ import annotations

import argparse
import logging
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from ..errors import ValidationError
from .schedule import (
    ReviewItem,
    StudyDefinition,
    generate_schedule,
    load_definition,
    wire_item,
)
from .stats import compute_stats
from .store import DuplicateResponseError, ResponseLog, response_from_dict

log = logging.getLogger("seamstain.study")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class StudyState:
    """Immutable schedule plus the durable response log."""

    def __init__(self, definition: StudyDefinition, log_path: str | Path) -> None:
        self.definition = definition
        self.schedule = generate_schedule(definition)
        self.by_label: dict[str, ReviewItem] = {i.blinded_label: i for i in self.schedule}
        self.by_position: dict[int, ReviewItem] = {i.position: i for i in self.schedule}
        self.case_by_id = {c.case_id: c for c in definition.cases}
        self.responses = ResponseLog(log_path)
        self.total = len(self.schedule)
        # Serializes next-item reads against response appends per reviewer.
        self.lock = threading.Lock()

    def next_item(self, reviewer_id: str) -> ReviewItem | None:
        if reviewer_id not in self.definition.reviewers:
            raise ApiError(404, "unknown_reviewer", f"unknown reviewer {reviewer_id!r}")
        with self.lock:
            for item in self.schedule:
                if not self.responses.has(reviewer_id, item.position):
                    return item
        return None

    def completed(self, reviewer_id: str) -> int:
        if reviewer_id not in self.definition.reviewers:
            raise ApiError(404, "unknown_reviewer", f"unknown reviewer {reviewer_id!r}")
        return len(self.responses.for_reviewer(reviewer_id))


def create_app(
    definition: StudyDefinition,
    log_path: str | Path,
    admin_token: str = "change-me",
    static_dir: str | Path | None = None,
) -> FastAPI:
    state = StudyState(definition, log_path)
    app = FastAPI(title="blinded review study")
    app.state.study = state

    @app.exception_handler(ApiError)
    async def handle_api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"code": "bad_request", "message": str(exc)})

    @app.get("/api/health")
    async def health() -> dict:
        return {"status": "ok", "cases": len(state.definition.cases), "total": state.total}

    @app.get("/api/reviewers/{reviewer_id}/next")
    async def next_item(reviewer_id: str) -> dict:
        item = state.next_item(reviewer_id)
        if item is None:
            return {"complete": True, "total": state.total}
        return wire_item(item, state.total)

    def _image_bytes(label: str, kind: str) -> bytes:
        item = state.by_label.get(label)
        if item is None:
            raise ApiError(404, "unknown_item", f"unknown item label {label!r}")
        case = state.case_by_id[item.case_id]
        if kind == "he":
            path = case.he_image
        else:
            path = (
                case.synthetic_sox10 if item.method == "synthetic" else case.traditional_sox10
            )
        try:
            return Path(path).read_bytes()
        except OSError as exc:
            raise ApiError(404, "missing_image", f"image unavailable: {exc}") from exc

    @app.get("/api/items/{label}/he")
    async def item_he(label: str) -> Response:
        return Response(content=_image_bytes(label, "he"), media_type="image/png")

    @app.get("/api/items/{label}/sox10")
    async def item_sox10(label: str) -> Response:
        return Response(content=_image_bytes(label, "sox10"), media_type="image/png")

    @app.post("/api/responses", status_code=201)
    async def record_response(payload: dict) -> dict:
        try:
            resp = response_from_dict({"timestamp": int(time.time()), **payload})
        except ValidationError as exc:
            raise ApiError(400, "invalid_response", str(exc)) from exc
        if resp.reviewer_id not in state.definition.reviewers:
            raise ApiError(404, "unknown_reviewer", f"unknown reviewer {resp.reviewer_id!r}")
        if resp.position not in state.by_position:
            raise ApiError(400, "unknown_position", f"position {resp.position} not in schedule")
        try:
            state.responses.append(resp)
        except DuplicateResponseError as exc:
            raise ApiError(409, "duplicate_response", str(exc)) from exc
        return {"status": "recorded", "position": resp.position}

    @app.get("/api/progress/{reviewer_id}")
    async def progress(reviewer_id: str) -> dict:
        done = state.completed(reviewer_id)
        return {
            "reviewer_id": reviewer_id,
            "completed": done,
            "total": state.total,
            "fraction": done / state.total if state.total else 0.0,
        }

    @app.get("/api/stats")
    async def stats(request: Request) -> dict:
        token = request.headers.get("x-admin-token")
        if token != admin_token:
            raise ApiError(401, "unauthorized", "missing or wrong admin token")
        return compute_stats(state.responses.all_responses(), state.schedule).to_dict()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--definition", required=True, help="study definition JSON")
    parser.add_argument("--log", default="responses.ndjson", help="response log path")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--admin-token", default="change-me")
    parser.add_argument("--static-dir", help="serve the review UI from this directory")
    args = parser.parse_args(argv)

    import uvicorn

    logging.basicConfig(level=logging.INFO)
    definition = load_definition(args.definition)
    app = create_app(
        definition,
        args.log,
        admin_token=args.admin_token,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

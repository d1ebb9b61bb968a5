"""HTTP surface over the review service (FastAPI + JSON)."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Header, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import (
    CannotBalanceError,
    ConflictError,
    InvalidEventError,
    InvalidInputError,
    NotFoundError,
)
from .service import ReviewService

_STATUS = {
    NotFoundError: 404,
    ConflictError: 409,
    CannotBalanceError: 400,
    InvalidEventError: 400,
    InvalidInputError: 400,
}


class SessionRequest(BaseModel):
    case_ids: list[str]
    n_decoys: int = 0
    seed: int = 0
    blinded: bool = True
    decoy_pool_ids: list[str] | None = None


class DecisionRequest(BaseModel):
    case_id: str
    diagnosis: str
    ihc_required: bool
    note: str = ""


class TrustEventRequest(BaseModel):
    slide_id: str
    ihc_outcome: str = Field(pattern="^(confirmed_benign|ihc_showed_cancer)$")


def create_app(service: ReviewService) -> FastAPI:
    app = FastAPI(title="ihctriage review service")

    for exc_type, status in _STATUS.items():
        def handler(request, exc, status=status):
            return JSONResponse(status_code=status, content={"detail": str(exc)})

        app.add_exception_handler(exc_type, handler)

    @app.get("/slides/{slide_id}/recommendation")
    def recommendation(slide_id: str):
        rec = service.recommend(slide_id)
        return {
            "slide_id": rec.slide_id,
            "cancer_probability": rec.cancer_probability,
            "operating_threshold": rec.operating_threshold,
            "verdict": rec.verdict,
            "heatmap_ref": f"/slides/{slide_id}/heatmap" if rec.heatmap_ref else None,
            "final_isup": rec.final_isup if isinstance(rec.final_isup, int) else (
                str(rec.final_isup) if rec.final_isup is not None else None
            ),
        }

    @app.get("/slides/{slide_id}/heatmap")
    def heatmap(slide_id: str):
        info = service.slide(slide_id)
        if not info.heatmap_path or not Path(info.heatmap_path).exists():
            raise NotFoundError(f"no heatmap for slide {slide_id!r}")
        return Response(content=Path(info.heatmap_path).read_bytes(), media_type="image/png")

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionRequest, x_reviewer_id: str = Header(default="anonymous")):
        session = service.create_session(
            case_ids=body.case_ids,
            reviewer_id=x_reviewer_id,
            n_decoys=body.n_decoys,
            seed=body.seed,
            blinded=body.blinded,
            decoy_pool_ids=body.decoy_pool_ids,
        )
        return {
            "session_id": session.session_id,
            "reviewer_id": session.reviewer_id,
            "n_cases": len(session.cases),
            "blinded": session.blinded,
            "state": session.state,
        }

    @app.get("/sessions/{session_id}/next")
    def next_case(session_id: str):
        view = service.next_case(session_id)
        if view is None:
            return {"done": True, "case": None}
        return {"done": False, "case": view}

    @app.post("/sessions/{session_id}/decisions", status_code=201)
    def record_decision(
        session_id: str, body: DecisionRequest, x_reviewer_id: str = Header(default="anonymous")
    ):
        decision = service.record_decision(
            session_id,
            case_id=body.case_id,
            reviewer_id=x_reviewer_id,
            diagnosis=body.diagnosis,
            ihc_required=body.ihc_required,
            note=body.note,
        )
        return {
            "case_id": decision.case_id,
            "reviewer_id": decision.reviewer_id,
            "diagnosis": decision.diagnosis,
            "ihc_required": decision.ihc_required,
            "timestamp": decision.timestamp,
            "note": decision.note,
        }

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str):
        return service.finalize(session_id)

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        session = service.session(session_id)
        return {
            "session_id": session.session_id,
            "reviewer_id": session.reviewer_id,
            "state": session.state,
            "blinded": session.blinded,
            "n_cases": len(session.cases),
            "n_decided": len(session.decisions),
        }

    @app.get("/cohorts/{cohort_id}/report")
    def cohort_report(cohort_id: str):
        return service.cohort_report(cohort_id)

    @app.get("/trust")
    def trust():
        return service.trust_snapshot()

    @app.post("/trust/events")
    def trust_event(body: TrustEventRequest):
        monitor = service.trust_update(body.slide_id, body.ihc_outcome)
        return {
            "confirmed_benign": monitor.confirmed_benign,
            "ihc_showed_cancer": monitor.ihc_showed_cancer,
            "npv": monitor.npv,
        }

    return app

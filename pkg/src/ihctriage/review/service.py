"""The review service: recommendations, blinded sessions, decisions, trust.

State changes append to a line-delimited JSON journal so a crashed service
replays to exactly the decisions that were acknowledged. Blinding is
enforced here, not in clients: while a session is open, reviewer-facing
case payloads never contain AI-derived fields, reference labels, or decoy
flags; finalizing reveals them in the concordance report.
"""

from __future__ import annotations

import datetime as _dt
import json
import random
import threading
from pathlib import Path

from ..errors import (
    CannotBalanceError,
    ConflictError,
    InvalidEventError,
    InvalidInputError,
    NotFoundError,
)
from ..mil.gleason import BENIGN
from .types import (
    DECOY_CLASSES,
    OUTCOME_SHOWED_CANCER,
    Decision,
    Recommendation,
    ReviewCase,
    ReviewSession,
    SlideInfo,
    TrustMonitor,
    verdict_for,
)

DEFAULT_THRESHOLD = 0.01


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


class ReviewService:
    def __init__(self, operating_threshold: float = DEFAULT_THRESHOLD, journal_path=None):
        if not (0.0 < operating_threshold <= 1.0):
            raise InvalidInputError(f"threshold {operating_threshold!r} outside (0, 1]")
        self.operating_threshold = operating_threshold
        self._cohort_thresholds: dict[str, float] = {}
        self._slides: dict[str, SlideInfo] = {}
        self._sessions: dict[str, ReviewSession] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._trust = TrustMonitor()
        self._trust_alerts: list[dict] = []
        self._trust_lock = threading.Lock()
        self._cohort_reports: dict[str, dict] = {}
        self._journal_path = Path(journal_path) if journal_path else None
        self._journal_lock = threading.Lock()
        if self._journal_path and self._journal_path.exists():
            self._replay()

    # -- configuration ----------------------------------------------------

    def register_slide(self, info: SlideInfo) -> None:
        self._slides[info.slide_id] = info

    def set_cohort_report(self, cohort_id: str, payload: dict) -> None:
        self._cohort_reports[cohort_id] = payload

    def set_cohort_threshold(self, cohort_id: str, threshold: float) -> None:
        """Per-cohort override of the service-wide operating point."""
        if not (0.0 < threshold <= 1.0):
            raise InvalidInputError(f"threshold {threshold!r} outside (0, 1]")
        self._cohort_thresholds[cohort_id] = threshold

    def threshold_for(self, info: SlideInfo) -> float:
        return self._cohort_thresholds.get(info.cohort_id, self.operating_threshold)

    def slide(self, slide_id: str) -> SlideInfo:
        try:
            return self._slides[slide_id]
        except KeyError:
            raise NotFoundError(f"unknown slide {slide_id!r}") from None

    def cohort_report(self, cohort_id: str) -> dict:
        try:
            return self._cohort_reports[cohort_id]
        except KeyError:
            raise NotFoundError(f"no report for cohort {cohort_id!r}") from None

    # -- recommendations ---------------------------------------------------

    def recommend(self, slide_id: str) -> Recommendation:
        info = self.slide(slide_id)
        threshold = self.threshold_for(info)
        verdict = verdict_for(info.cancer_probability, threshold)
        return Recommendation(
            slide_id=slide_id,
            cancer_probability=info.cancer_probability,
            operating_threshold=threshold,
            verdict=verdict,
            heatmap_ref=info.heatmap_path,
            final_isup=info.final_isup,
        )

    # -- sessions ----------------------------------------------------------

    def pick_decoys(self, pool, n_decoys: int, rng: random.Random):
        """n_decoys slides with per-class counts differing by at most one."""
        by_class: dict[object, list[SlideInfo]] = {c: [] for c in DECOY_CLASSES}
        for info in pool:
            cls = info.reference_class
            key = BENIGN if cls == BENIGN else cls
            if key in by_class:
                by_class[key].append(info)
        base, extra = divmod(n_decoys, len(DECOY_CLASSES))
        eligible = [c for c in DECOY_CLASSES if len(by_class[c]) >= base + 1]
        if extra > len(eligible) or any(len(by_class[c]) < base for c in DECOY_CLASSES):
            raise CannotBalanceError(
                f"decoy pool cannot supply {n_decoys} slides balanced over {DECOY_CLASSES}"
            )
        extra_classes = set(rng.sample(eligible, extra))
        chosen: list[SlideInfo] = []
        for cls in DECOY_CLASSES:
            need = base + (1 if cls in extra_classes else 0)
            candidates = sorted(by_class[cls], key=lambda s: s.slide_id)
            chosen.extend(rng.sample(candidates, need))
        return chosen

    def create_session(
        self,
        case_ids,
        reviewer_id: str,
        n_decoys: int = 0,
        seed: int = 0,
        blinded: bool = True,
        decoy_pool_ids=None,
    ) -> ReviewSession:
        case_ids = list(case_ids)
        for slide_id in case_ids:
            self.slide(slide_id)
        if n_decoys < 0:
            raise InvalidInputError("n_decoys must be non-negative")
        rng = random.Random(seed)
        if decoy_pool_ids is None:
            pool = [
                info
                for slide_id, info in sorted(self._slides.items())
                if slide_id not in case_ids and info.reference_class is not None
            ]
        else:
            pool = [self.slide(slide_id) for slide_id in decoy_pool_ids]
        decoys = self.pick_decoys(pool, n_decoys, rng) if n_decoys else []

        session_id = f"session-{len(self._sessions) + 1:04d}-{seed}"
        cases = [
            ReviewCase(
                case_id=slide_id,
                slide_id=slide_id,
                blinded=blinded,
                is_decoy=False,
                image_ref=self.slide(slide_id).image_ref,
            )
            for slide_id in case_ids
        ]
        cases += [
            ReviewCase(
                case_id=info.slide_id,
                slide_id=info.slide_id,
                blinded=blinded,
                is_decoy=True,
                image_ref=info.image_ref,
            )
            for info in decoys
        ]
        rng.shuffle(cases)
        session = ReviewSession(
            session_id=session_id,
            reviewer_id=reviewer_id,
            cases=tuple(cases),
            seed=seed,
            blinded=blinded,
        )
        self._sessions[session_id] = session
        self._session_locks[session_id] = threading.Lock()
        self._append_journal(
            {
                "event": "session_created",
                "session_id": session_id,
                "reviewer_id": reviewer_id,
                "case_ids": case_ids,
                "decoy_ids": [d.slide_id for d in decoys],
                "order": [c.case_id for c in cases],
                "seed": seed,
                "blinded": blinded,
            }
        )
        return session

    def session(self, session_id: str) -> ReviewSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def case_view(self, session: ReviewSession, case: ReviewCase, position: int) -> dict:
        """Reviewer-facing payload for one case; blinding enforced here."""
        view = {
            "case_id": case.case_id,
            "position": position,
            "total": len(session.cases),
            "image_ref": case.image_ref,
        }
        if not session.blinded:
            info = self.slide(case.slide_id)
            view["ai"] = {
                "cancer_probability": info.cancer_probability,
                "verdict": verdict_for(info.cancer_probability, self.threshold_for(info)),
                "final_isup": info.final_isup,
                "heatmap_ref": info.heatmap_path,
            }
        return view

    def next_case(self, session_id: str) -> dict | None:
        session = self.session(session_id)
        if not session.is_open:
            raise ConflictError(f"session {session_id} is finalized")
        for i, case in enumerate(session.cases):
            if case.case_id not in session.decisions:
                return self.case_view(session, case, i + 1)
        return None

    def record_decision(
        self,
        session_id: str,
        case_id: str,
        reviewer_id: str,
        diagnosis: str,
        ihc_required: bool,
        note: str = "",
    ) -> Decision:
        session = self.session(session_id)
        with self._session_locks[session_id]:
            if not session.is_open:
                raise ConflictError(f"session {session_id} is finalized")
            if reviewer_id != session.reviewer_id:
                raise ConflictError(
                    f"session belongs to reviewer {session.reviewer_id!r}, not {reviewer_id!r}"
                )
            if all(case.case_id != case_id for case in session.cases):
                raise NotFoundError(f"case {case_id!r} is not part of session {session_id}")
            if case_id in session.decisions:
                raise ConflictError(f"case {case_id!r} already has a decision in this session")
            decision = Decision(
                case_id=case_id,
                reviewer_id=reviewer_id,
                diagnosis=diagnosis,
                ihc_required=bool(ihc_required),
                timestamp=_now(),
                note=note,
            )
            session.decisions[case_id] = decision
            self._append_journal(
                {
                    "event": "decision",
                    "session_id": session_id,
                    "case_id": case_id,
                    "reviewer_id": reviewer_id,
                    "diagnosis": diagnosis,
                    "ihc_required": bool(ihc_required),
                    "note": note,
                    "timestamp": decision.timestamp,
                }
            )
            return decision

    def finalize(self, session_id: str) -> dict:
        session = self.session(session_id)
        with self._session_locks[session_id]:
            if not session.is_open:
                raise ConflictError(f"session {session_id} is already finalized")
            session.state = "finalized"
            self._append_journal({"event": "finalized", "session_id": session_id})
        return self.concordance_report(session_id)

    def concordance_report(self, session_id: str) -> dict:
        """Reviewer diagnosis vs reference label vs AI verdict, after the reveal."""
        session = self.session(session_id)
        if session.is_open:
            raise ConflictError("concordance is available only after finalization")
        rows = []
        ihc_requested = 0
        for case in session.cases:
            info = self.slide(case.slide_id)
            decision = session.decisions.get(case.case_id)
            if decision and decision.ihc_required:
                ihc_requested += 1
            rows.append(
                {
                    "case_id": case.case_id,
                    "is_decoy": case.is_decoy,
                    "reference_class": _jsonable_class(info.reference_class),
                    "ai_probability": info.cancer_probability,
                    "ai_verdict": verdict_for(info.cancer_probability, self.threshold_for(info)),
                    "ai_isup": _jsonable_class(info.final_isup),
                    "diagnosis": decision.diagnosis if decision else None,
                    "ihc_required": decision.ihc_required if decision else None,
                    "note": decision.note if decision else None,
                }
            )
        return {
            "session_id": session_id,
            "reviewer_id": session.reviewer_id,
            "n_cases": len(session.cases),
            "n_decided": len(session.decisions),
            "n_ihc_required": ihc_requested,
            "cases": rows,
        }

    # -- trust monitor -----------------------------------------------------

    def trust_update(self, slide_id: str, ihc_outcome: str) -> TrustMonitor:
        info = self.slide(slide_id)
        threshold = self.threshold_for(info)
        if info.cancer_probability >= threshold:
            raise InvalidEventError(
                f"slide {slide_id} was AI-positive at threshold {threshold}"
            )
        with self._trust_lock:
            self._trust = self._trust.updated(ihc_outcome)
            if ihc_outcome == OUTCOME_SHOWED_CANCER:
                self._trust_alerts.append(
                    {"slide_id": slide_id, "outcome": ihc_outcome, "timestamp": _now()}
                )
            self._append_journal(
                {"event": "trust", "slide_id": slide_id, "ihc_outcome": ihc_outcome}
            )
            return self._trust

    def trust_snapshot(self) -> dict:
        with self._trust_lock:
            return {
                "confirmed_benign": self._trust.confirmed_benign,
                "ihc_showed_cancer": self._trust.ihc_showed_cancer,
                "npv": self._trust.npv,
                "alerts": list(self._trust_alerts),
            }

    # -- persistence ---------------------------------------------------------

    def _append_journal(self, event: dict) -> None:
        if self._journal_path is None:
            return
        with self._journal_lock:
            with open(self._journal_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
                fh.flush()

    def _replay(self) -> None:
        journal_path = self._journal_path
        self._journal_path = None  # do not re-append while replaying
        try:
            with open(journal_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._apply(json.loads(line))
        finally:
            self._journal_path = journal_path

    def _apply(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "session_created":
            decoy_ids = set(event["decoy_ids"])
            cases = tuple(
                ReviewCase(
                    case_id=case_id,
                    slide_id=case_id,
                    blinded=event["blinded"],
                    is_decoy=case_id in decoy_ids,
                    image_ref=(
                        self._slides[case_id].image_ref if case_id in self._slides else None
                    ),
                )
                for case_id in event["order"]
            )
            session = ReviewSession(
                session_id=event["session_id"],
                reviewer_id=event["reviewer_id"],
                cases=cases,
                seed=event["seed"],
                blinded=event["blinded"],
            )
            self._sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.Lock()
        elif kind == "decision":
            session = self._sessions[event["session_id"]]
            session.decisions[event["case_id"]] = Decision(
                case_id=event["case_id"],
                reviewer_id=event["reviewer_id"],
                diagnosis=event["diagnosis"],
                ihc_required=event["ihc_required"],
                timestamp=event["timestamp"],
                note=event.get("note", ""),
            )
        elif kind == "finalized":
            self._sessions[event["session_id"]].state = "finalized"
        elif kind == "trust":
            self._trust = self._trust.updated(event["ihc_outcome"])
            if event["ihc_outcome"] == OUTCOME_SHOWED_CANCER:
                self._trust_alerts.append(
                    {"slide_id": event["slide_id"], "outcome": event["ihc_outcome"]}
                )

    def snapshot(self, path) -> None:
        """Full-state export for audit; the journal remains the recovery log."""
        state = {
            "operating_threshold": self.operating_threshold,
            "trust": self.trust_snapshot(),
            "sessions": [
                {
                    "session_id": s.session_id,
                    "reviewer_id": s.reviewer_id,
                    "state": s.state,
                    "seed": s.seed,
                    "blinded": s.blinded,
                    "order": [c.case_id for c in s.cases],
                    "decisions": {
                        case_id: {
                            "diagnosis": d.diagnosis,
                            "ihc_required": d.ihc_required,
                            "timestamp": d.timestamp,
                            "note": d.note,
                        }
                        for case_id, d in s.decisions.items()
                    },
                }
                for s in self._sessions.values()
            ],
        }
        Path(path).write_text(json.dumps(state, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _jsonable_class(value):
    return value if value is None or isinstance(value, int) else str(value)

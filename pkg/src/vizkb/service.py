"""HTTP labeling service for the companion UI.

Endpoints:

    GET  /api/session          session state, iteration, progress
    GET  /api/session/next     next queued pair (or retraining/complete status)
    POST /api/session/label    {"pair_id", "label": -1|0|1|"illegible"}
    GET  /api/pairs/{id}       one pair payload
    GET  /api/report/accuracy  compliance table under the loaded weights

Label-store mutations are serialized under a lock and appended to a JSONL
log before the response returns; replaying the log reconstructs the state.
Active-learning retraining runs as a background task; while it runs,
/api/session/next answers with a "retraining" status.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .augment import flag_illegible
from .evaluate import accuracy
from .features import FeatureCatalog, builtin_catalog
from .labeling import (
    ClassifierConfig,
    DegenerateLabelsError,
    LabelRecord,
    LabelSession,
    LabelStore,
    PreferenceClassifier,
    active_learning_step,
    record_to_dict,
    removal_to_dict,
    train_classifier_labeler,
    vocabulary_for_pairs,
)
from .pairs import DesignPair, pair_to_dict
from .vegalite import export_vegalite
from .weights import WeightTable, builtin_weights

SNAPSHOT_EVERY = 25


class LabelRequest(BaseModel):
    pair_id: str
    label: Any  # -1 | 0 | 1 | "illegible"


@dataclass
class RetrainEvent:
    iteration: int
    outcome: str  # "trained" | "skipped"
    cv_accuracy: Optional[float] = None


@dataclass
class ServiceState:
    pairs: dict[str, DesignPair]
    store: LabelStore
    session: LabelSession
    weights: WeightTable = field(default_factory=builtin_weights)
    catalog: FeatureCatalog = field(default_factory=builtin_catalog)
    log_path: Optional[str] = None
    snapshot_path: Optional[str] = None
    classifier_config: ClassifierConfig = ClassifierConfig()
    retrain_async: bool = True
    render_seed: int = 0

    model: Optional[PreferenceClassifier] = None
    current_batch: list[str] = field(default_factory=list)
    batch_progress: int = 0
    retraining: bool = False
    retrain_events: list[RetrainEvent] = field(default_factory=list)
    mutations: int = 0
    # reentrant: a synchronous retrain runs inside the label handler's hold
    lock: threading.RLock = field(default_factory=threading.RLock)

    # -- construction -----------------------------------------------------

    @staticmethod
    def create(
        pairs: list[DesignPair],
        strategy: str = "manual",
        batch_size: int = 20,
        max_iterations: int = 20,
        weights: Optional[WeightTable] = None,
        log_path: Optional[str] = None,
        snapshot_path: Optional[str] = None,
        retrain_async: bool = True,
        classifier_config: ClassifierConfig = ClassifierConfig(),
        session_id: str = "session-1",
    ) -> "ServiceState":
        store = LabelStore()
        if log_path and os.path.exists(log_path):
            store.import_jsonl(log_path)
        by_id = {p.id: p for p in pairs}
        queue = [
            p.id
            for p in pairs
            if not p.labeled
            and store.effective(p.id) is None
            and not store.is_removed(p.id)
        ]
        session = LabelSession(
            session_id=session_id,
            strategy=strategy,
            batch_size=batch_size,
            max_iterations=max_iterations,
            queue=queue,
        )
        state = ServiceState(
            pairs=by_id,
            store=store,
            session=session,
            weights=weights or builtin_weights(),
            log_path=log_path,
            snapshot_path=snapshot_path,
            retrain_async=retrain_async,
            classifier_config=classifier_config,
        )
        if strategy == "active_ml":
            state.model = state._try_train()
        state._refill_batch()
        return state

    # -- labeled data -----------------------------------------------------

    def _labeled_pairs(self) -> list[tuple[DesignPair, int]]:
        out = []
        for pair in self.pairs.values():
            if self.store.is_removed(pair.id):
                continue
            record = self.store.effective(pair.id)
            label = record.label if record is not None else pair.label
            if label in (-1, 1):
                out.append((pair, label))
        return out

    def _try_train(self) -> Optional[PreferenceClassifier]:
        labeled = self._labeled_pairs()
        if len(labeled) < 2:
            return None
        vocabulary = vocabulary_for_pairs(self.pairs.values())
        try:
            return train_classifier_labeler(
                labeled, self.classifier_config, vocabulary=vocabulary
            )
        except DegenerateLabelsError:
            return None

    def _refill_batch(self) -> None:
        unlabeled = [self.pairs[pid] for pid in self.session.queue]
        if self.session.strategy == "active_ml":
            queries = active_learning_step(self.session, self.model, unlabeled)
            self.current_batch = [q.pair_id for q in queries]
        else:
            self.current_batch = list(self.session.queue[: self.session.batch_size])
        self.batch_progress = 0

    # -- persistence --------------------------------------------------------

    def _persist(self, entry: dict[str, Any]) -> None:
        if self.log_path:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        self.mutations += 1
        if self.snapshot_path and self.mutations % SNAPSHOT_EVERY == 0:
            self.store.export_jsonl(self.snapshot_path)

    # -- retraining ---------------------------------------------------------

    def _retrain(self) -> None:
        model = self._try_train()
        with self.lock:
            self.model = model
            self.session.iteration += 1
            self.retrain_events.append(
                RetrainEvent(
                    iteration=self.session.iteration,
                    outcome="trained" if model is not None else "skipped",
                    cv_accuracy=model.cv_accuracy_ if model is not None else None,
                )
            )
            self._refill_batch()
            self.retraining = False

    def trigger_retrain(self) -> None:
        self.retraining = True
        if self.retrain_async:
            threading.Thread(target=self._retrain, daemon=True).start()
        else:
            self._retrain()

    # -- payloads -----------------------------------------------------------

    def session_payload(self) -> dict[str, Any]:
        return {
            "session_id": self.session.session_id,
            "strategy": self.session.strategy,
            "iteration": self.session.iteration,
            "max_iterations": self.session.max_iterations,
            "batch_size": self.session.batch_size,
            "total_pairs": len(self.pairs),
            "labeled_manual": self.store.manual_count(),
            "removed": len(self.store.removed()),
            "queued": len(self.session.queue),
            "retraining": self.retraining,
            "complete": not self.session.queue or self.session.exhausted,
            "retrain_events": [
                {
                    "iteration": e.iteration,
                    "outcome": e.outcome,
                    "cv_accuracy": e.cv_accuracy,
                }
                for e in self.retrain_events
            ],
        }

    def pair_payload(self, pair: DesignPair) -> dict[str, Any]:
        left_flag = flag_illegible(pair.left)
        right_flag = flag_illegible(pair.right)
        flagged = pair.illegible or left_flag.illegible or right_flag.illegible
        reason = left_flag.reason or right_flag.reason
        d = pair_to_dict(pair)
        return {
            "pair_id": pair.id,
            "left_spec": d["left"],
            "right_spec": d["right"],
            "left_render": export_vegalite(pair.left, seed=self.render_seed),
            "right_render": export_vegalite(pair.right, seed=self.render_seed),
            "label": pair.label,
            "source": pair.source,
            "group": pair.group,
            "lineage": d["lineage"],
            "illegible": flagged,
            "illegible_reason": reason,
            "progress": {
                "iteration": self.session.iteration,
                "max_iterations": self.session.max_iterations,
                "labeled": self.store.manual_count() + len(self.store.removed()),
                "queued": len(self.session.queue),
                "total": len(self.pairs),
            },
        }


def create_app(state: ServiceState, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="vizkb labeling service")
    app.state.vizkb = state

    @app.get("/api/session")
    def get_session() -> JSONResponse:
        with state.lock:
            return JSONResponse(state.session_payload())

    @app.get("/api/session/next")
    def get_next() -> JSONResponse:
        with state.lock:
            if state.retraining:
                return JSONResponse({"status": "retraining"})
            if not state.session.queue or state.session.exhausted:
                return JSONResponse(
                    {"status": "complete", "session": state.session_payload()}
                )
            if not state.current_batch:
                state._refill_batch()
            pair = state.pairs[state.current_batch[0]]
            return JSONResponse(
                {"status": "ok", "pair": state.pair_payload(pair)}
            )

    @app.post("/api/session/label")
    def post_label(req: LabelRequest) -> JSONResponse:
        with state.lock:
            pair = state.pairs.get(req.pair_id)
            if pair is None:
                raise HTTPException(status_code=404, detail="unknown pair id")
            if state.store.has_manual(req.pair_id) or state.store.is_removed(req.pair_id):
                raise HTTPException(
                    status_code=409, detail="pair already manually labeled"
                )
            if req.label == "illegible":
                state.store.remove_pair(req.pair_id, reason="illegible")
                removal = state.store.removed()[req.pair_id]
                state._persist(removal_to_dict(removal))
            else:
                try:
                    label = int(req.label)
                except (TypeError, ValueError):
                    raise HTTPException(status_code=422, detail="bad label value")
                if label not in (-1, 0, 1):
                    raise HTTPException(status_code=422, detail="bad label value")
                record = LabelRecord(
                    pair_id=req.pair_id,
                    label=label,
                    provenance="manual",
                    confidence=1.0,
                )
                state.store.put(record)
                state._persist(record_to_dict(record))

            if req.pair_id in state.session.queue:
                state.session.queue.remove(req.pair_id)
            if req.pair_id in state.current_batch:
                state.current_batch.remove(req.pair_id)
            retrain = False
            if state.session.strategy == "active_ml":
                state.batch_progress += 1
                if (
                    state.batch_progress >= state.session.batch_size
                    and state.session.queue
                ) or (not state.session.queue and state.batch_progress > 0):
                    retrain = True
            if retrain:
                state.trigger_retrain()
            return JSONResponse(
                {
                    "status": "ok",
                    "retraining": state.retraining,
                    "session": state.session_payload(),
                }
            )

    @app.get("/api/pairs/{pair_id}")
    def get_pair(pair_id: str) -> JSONResponse:
        with state.lock:
            pair = state.pairs.get(pair_id)
            if pair is None:
                raise HTTPException(status_code=404, detail="unknown pair id")
            return JSONResponse(state.pair_payload(pair))

    @app.get("/api/report/accuracy")
    def get_accuracy() -> JSONResponse:
        with state.lock:
            labeled = [
                p
                for p in state.store.apply(state.pairs.values())
                if p.labeled
            ]
            if not labeled:
                return JSONResponse({"rows": []})
            table = accuracy(labeled, state.weights, state.catalog)
            return JSONResponse({"rows": table.to_dict()})

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

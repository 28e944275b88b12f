"""FastAPI application exposing the streaming engine and the off-line phase.

Sessions hold live engines (single writer each, guarded by a lock); the
off-line endpoints are stateless and work either on a session's snapshot
catalog or on snapshot documents shipped in the request.
"""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..core import (ConfigurationError, Curve, DataError, FbpStreamError,
                    InconsistencyError, QueryError, TimeGrid, Window)
from ..engine import EngineConfig, StreamEngine
from ..fboxplot import FenceConfig, FunctionalBoxplot
from ..macrocluster import macro_cluster
from ..smoothing import SmoothingConfig
from ..snapshot import dumps, loads, recover_slot, select_snapshots
from ..svg import SvgStyle, render_fbp_svg
from . import schemas as sm


@dataclass
class _Session:
    engine: StreamEngine
    lock: threading.Lock


def _engine_config(cfg: sm.SessionConfigModel) -> EngineConfig:
    return EngineConfig(
        window_size=cfg.window_size,
        k_max=cfg.k_max,
        t_star=cfg.t_star,
        snapshot_every=cfg.snapshot_every,
        depth_kind=cfg.depth,
        fence=FenceConfig(fence_factor=cfg.fence_factor,
                          outlier_removal=cfg.outlier_removal),
        smoothing=SmoothingConfig(basis_size=cfg.basis_size,
                                  penalty_lambda=cfg.penalty_lambda,
                                  enabled=cfg.smoothing_enabled),
    )


def _fbp_to_model(fbp: FunctionalBoxplot) -> sm.FbpModel:
    return sm.FbpModel(
        window_index=fbp.window.index_j,
        window_size=fbp.width,
        n_source_curves=fbp.n_source_curves,
        envelope_min=fbp.envelope_min.values.tolist(),
        box_lower=fbp.box_lower.values.tolist(),
        median=fbp.median.values.tolist(),
        box_upper=fbp.box_upper.values.tolist(),
        envelope_max=fbp.envelope_max.values.tolist(),
    )


def _fbp_from_model(model: sm.FbpModel) -> FunctionalBoxplot:
    grid = TimeGrid(model.window_size)
    return FunctionalBoxplot(
        envelope_min=Curve(grid, np.asarray(model.envelope_min)),
        box_lower=Curve(grid, np.asarray(model.box_lower)),
        median=Curve(grid, np.asarray(model.median)),
        box_upper=Curve(grid, np.asarray(model.box_upper)),
        envelope_max=Curve(grid, np.asarray(model.envelope_max)),
        window=Window(model.window_index, model.window_size),
        n_source_curves=model.n_source_curves,
    )


def _style(model: sm.SvgStyleModel | None) -> SvgStyle:
    if model is None:
        return SvgStyle()
    return SvgStyle(width=model.width, height=model.height,
                    color_envelope=model.color_envelope,
                    color_region=model.color_region,
                    color_median=model.color_median,
                    title=model.title)


def _event_model(event) -> sm.EventModel:
    return sm.EventModel(t=event.t, kind=event.kind, ids=list(event.ids), n=event.n)


class _NotFound(FbpStreamError):
    pass


_ERROR_CODES = (
    (_NotFound, 404, "not_found"),
    (ConfigurationError, 400, "configuration_error"),
    (DataError, 400, "data_error"),
    (InconsistencyError, 409, "inconsistency_error"),
    (QueryError, 409, "query_error"),
    (ValueError, 400, "argument_error"),
)


def create_app() -> FastAPI:
    app = FastAPI(title="fbpstream", version=__version__)
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> _Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise _NotFound(f"unknown session {session_id!r}")
        return session

    for exc_type, status, code in _ERROR_CODES:
        def handler(request: Request, exc: Exception, _status=status, _code=code):
            return JSONResponse(
                status_code=_status,
                content={"detail": {"code": _code, "message": str(exc)}})
        app.add_exception_handler(exc_type, handler)

    def validation_handler(request: Request, exc: RequestValidationError):
        # stringify: the default body would embed offending values, which may
        # not be JSON-encodable (e.g. Infinity)
        return JSONResponse(
            status_code=422,
            content={"detail": {"code": "validation_error", "message": str(exc)}})

    app.add_exception_handler(RequestValidationError, validation_handler)

    @app.get("/", response_model=sm.ServiceInfo)
    def info() -> sm.ServiceInfo:
        return sm.ServiceInfo(service="fbpstream", version=__version__)

    @app.post("/sessions", response_model=sm.CreateSessionResponse)
    def create_session(cfg: sm.SessionConfigModel) -> sm.CreateSessionResponse:
        engine = StreamEngine(_engine_config(cfg))
        session_id = uuid.uuid4().hex[:12]
        with registry_lock:
            sessions[session_id] = _Session(engine, threading.Lock())
        return sm.CreateSessionResponse(session_id=session_id)

    @app.get("/sessions/{session_id}/state", response_model=sm.SessionStateResponse)
    def session_state(session_id: str) -> sm.SessionStateResponse:
        session = get_session(session_id)
        with session.lock:
            engine = session.engine
            return sm.SessionStateResponse(
                session_id=session_id,
                windows_processed=engine.windows_processed,
                n_streams=engine.n_streams,
                k=len(engine.store),
                threshold=engine.store.threshold,
                snapshot_times=[s.taken_at for s in engine.snapshots],
            )

    @app.post("/sessions/{session_id}/windows", response_model=sm.WindowResponse)
    def push_window(session_id: str, request: sm.WindowRequest) -> sm.WindowResponse:
        session = get_session(session_id)
        with session.lock:
            engine = session.engine
            index = engine.windows_processed
            outcome, snap = engine.process_rows(np.asarray(request.rows, dtype=np.float64))
            return sm.WindowResponse(
                window_index=index,
                outcome=sm.AllocationOutcomeModel(
                    kind=outcome.kind,
                    cluster_id=outcome.cluster_id,
                    evicted=_event_model(outcome.evicted) if outcome.evicted else None),
                k=len(engine.store),
                threshold=engine.store.threshold,
                snapshot_taken_at=snap.taken_at if snap is not None else None,
            )

    @app.get("/sessions/{session_id}/snapshots", response_model=sm.SnapshotListResponse)
    def list_snapshots(session_id: str) -> sm.SnapshotListResponse:
        session = get_session(session_id)
        with session.lock:
            return sm.SnapshotListResponse(
                taken_at=[s.taken_at for s in session.engine.snapshots])

    @app.post("/sessions/{session_id}/snapshots", response_model=sm.SnapshotResponse)
    def force_snapshot(session_id: str) -> sm.SnapshotResponse:
        session = get_session(session_id)
        with session.lock:
            snap = session.engine.take_snapshot_now()
            return sm.SnapshotResponse(taken_at=snap.taken_at, text=dumps(snap))

    @app.get("/sessions/{session_id}/snapshots/{taken_at}",
             response_model=sm.SnapshotResponse)
    def get_snapshot(session_id: str, taken_at: int) -> sm.SnapshotResponse:
        session = get_session(session_id)
        with session.lock:
            for snap in session.engine.snapshots:
                if snap.taken_at == taken_at:
                    return sm.SnapshotResponse(taken_at=taken_at, text=dumps(snap))
        raise _NotFound(f"no snapshot taken at {taken_at}")

    @app.get("/sessions/{session_id}/report", response_model=sm.ReportResponse)
    def report(session_id: str) -> sm.ReportResponse:
        session = get_session(session_id)
        with session.lock:
            rep = session.engine.report()
        return sm.ReportResponse(
            windows_processed=rep.windows_processed,
            k=rep.final_k,
            allocations=[sm.AllocationRow(cluster_id=cid, n_allocated=n, last_update=tl)
                         for cid, n, tl in rep.allocations],
            creates=rep.creates,
            merges=rep.merges,
            discards=rep.discards,
            discarded_weight=rep.discarded_weight,
        )

    @app.get("/sessions/{session_id}/events", response_model=sm.EventsResponse)
    def events(session_id: str) -> sm.EventsResponse:
        from ..stream import events_to_text
        session = get_session(session_id)
        with session.lock:
            log = list(session.engine.store.event_log)
        return sm.EventsResponse(events=[_event_model(e) for e in log],
                                 text=events_to_text(log))

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str) -> dict:
        with registry_lock:
            if sessions.pop(session_id, None) is None:
                raise _NotFound(f"unknown session {session_id!r}")
        return {"deleted": True}

    @app.post("/summarize", response_model=sm.SummarizeResponse)
    def summarize(request: sm.SummarizeRequest) -> sm.SummarizeResponse:
        if (request.session_id is None) == (request.snapshots is None):
            raise ValueError("provide exactly one of session_id or snapshots")
        if request.session_id is not None:
            session = get_session(request.session_id)
            with session.lock:
                catalog = list(session.engine.snapshots)
        else:
            catalog = [loads(text) for text in request.snapshots]
        lower, upper = select_snapshots(catalog, request.t_lo, request.t_hi)
        slot = recover_slot(lower, upper)
        if not slot.entries:
            return sm.SummarizeResponse(slot=slot.slot, centroids=[], weights=[],
                                        labels=[], delta=0.0, iterations=0,
                                        svgs=[] if request.render_svg else None)
        summary = macro_cluster(slot, request.clusters, seed=request.seed,
                                max_iter=request.max_iter, tol=request.tol)
        svgs = None
        if request.render_svg:
            style = _style(request.style)
            svgs = [render_fbp_svg(c, style) for c in summary.centroids]
        return sm.SummarizeResponse(
            slot=slot.slot,
            centroids=[_fbp_to_model(c) for c in summary.centroids],
            weights=[c.n_source_curves for c in summary.centroids],
            labels=[sm.MacroLabelModel(cluster_id=cid, weight=wt, macro_index=lab)
                    for cid, wt, lab in zip(summary.input_ids, summary.input_weights,
                                            summary.labels)],
            delta=summary.delta,
            iterations=summary.iterations,
            svgs=svgs,
        )

    @app.post("/render/svg", response_model=sm.RenderResponse)
    def render(request: sm.RenderRequest) -> sm.RenderResponse:
        fbp = _fbp_from_model(request.fbp)
        return sm.RenderResponse(svg=render_fbp_svg(fbp, _style(request.style)))

    return app


app = create_app()

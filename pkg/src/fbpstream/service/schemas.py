"""Request/response models of the HTTP service."""
from __future__ import annotations

import math

from pydantic import BaseModel, Field, field_validator

from ..fboxplot import COMPONENT_NAMES


class SessionConfigModel(BaseModel):
    window_size: int = 30
    k_max: int = 50
    t_star: int = 50
    snapshot_every: int = 10
    depth: str = "mbd"
    fence_factor: float = 1.5
    outlier_removal: bool = True
    basis_size: int | None = None
    penalty_lambda: float = 0.0
    smoothing_enabled: bool = True


class CreateSessionResponse(BaseModel):
    session_id: str


class SessionStateResponse(BaseModel):
    session_id: str
    windows_processed: int
    n_streams: int | None
    k: int
    threshold: float | None
    snapshot_times: list[int]


class WindowRequest(BaseModel):
    rows: list[list[float]] = Field(min_length=1)

    @field_validator("rows")
    @classmethod
    def _finite(cls, rows: list[list[float]]) -> list[list[float]]:
        for row in rows:
            for v in row:
                if not math.isfinite(v):
                    raise ValueError("window values must be finite")
        return rows


class EventModel(BaseModel):
    t: int
    kind: str
    ids: list[int]
    n: int


class AllocationOutcomeModel(BaseModel):
    kind: str
    cluster_id: int
    evicted: EventModel | None = None


class WindowResponse(BaseModel):
    window_index: int
    outcome: AllocationOutcomeModel
    k: int
    threshold: float | None
    snapshot_taken_at: int | None


class AllocationRow(BaseModel):
    cluster_id: int
    n_allocated: int
    last_update: int


class ReportResponse(BaseModel):
    windows_processed: int
    k: int
    allocations: list[AllocationRow]
    creates: int
    merges: int
    discards: int
    discarded_weight: int


class EventsResponse(BaseModel):
    events: list[EventModel]
    text: str


class SnapshotListResponse(BaseModel):
    taken_at: list[int]


class SnapshotResponse(BaseModel):
    taken_at: int
    text: str


class FbpModel(BaseModel):
    """Wire form of a functional boxplot: the five component value rows."""

    window_index: int
    window_size: int
    n_source_curves: int
    envelope_min: list[float]
    box_lower: list[float]
    median: list[float]
    box_upper: list[float]
    envelope_max: list[float]

    @classmethod
    def component_names(cls) -> tuple[str, ...]:
        return COMPONENT_NAMES


class SvgStyleModel(BaseModel):
    width: int = 720
    height: int = 480
    color_envelope: str = "blue"
    color_region: str = "magenta"
    color_median: str = "yellow"
    title: str = ""


class SummarizeRequest(BaseModel):
    """Slot query against a live session or an uploaded snapshot catalog."""

    session_id: str | None = None
    snapshots: list[str] | None = None
    t_lo: int
    t_hi: int
    clusters: int = Field(ge=1)
    seed: int = 0
    max_iter: int = 100
    tol: float = 1e-6
    render_svg: bool = False
    style: SvgStyleModel | None = None


class MacroLabelModel(BaseModel):
    cluster_id: int
    weight: int
    macro_index: int


class SummarizeResponse(BaseModel):
    slot: tuple[int, int] | None
    centroids: list[FbpModel]
    weights: list[int]
    labels: list[MacroLabelModel]
    delta: float
    iterations: int
    svgs: list[str] | None = None


class RenderRequest(BaseModel):
    fbp: FbpModel
    style: SvgStyleModel | None = None


class RenderResponse(BaseModel):
    svg: str


class ServiceInfo(BaseModel):
    service: str
    version: str

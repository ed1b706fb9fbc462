"""Request/response models for the service endpoints."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Family = Literal["bernstein", "szasz", "baskakov"]


class IntegrateRequest(BaseModel):
    expression: str
    distortion: str = "identity"
    interval: tuple[float, float] = (0.0, 1.0)
    grid_size: int = Field(default=1000, ge=1, le=2_000_000)
    level_grid: int = Field(default=4096, ge=16, le=2_000_000)


class IntegrateResponse(BaseModel):
    value: float
    oracle: float
    difference: float


class TruncationInfo(BaseModel):
    terms: int
    retained_mass: float
    tail_bound: float


class OperatorPoint(BaseModel):
    x: float
    value: float


class OperatorRequest(BaseModel):
    family: Family = "bernstein"
    expression: str
    distortion: str = "identity"
    degree: int = Field(default=10, ge=1, le=100_000)
    grid_size: int = Field(default=11, ge=1, le=100_000)
    window: Optional[tuple[float, float]] = None
    eval_range: Optional[tuple[float, float]] = None
    tail_tol: float = Field(default=1e-12, gt=0.0, le=1e-3)
    samples_per_cell: int = Field(default=64, ge=32, le=4096)


class OperatorResponse(BaseModel):
    family: Family
    degree: int
    distortion: str
    points: list[OperatorPoint]
    truncation: Optional[TruncationInfo] = None


class KorovkinRow(BaseModel):
    n: int
    x: float
    fx: float
    knfx: float
    abs_error: float
    delta: float
    bound: float
    holds: bool


class KorovkinSummary(BaseModel):
    schema_version: int
    family: str
    distortion: str
    c: float
    rows: int
    violations: int
    max_slack_utilization: float


class ConvergenceInfo(BaseModel):
    ns: list[int]
    sup_errors: list[float]
    decreasing: bool


class KorovkinRequest(BaseModel):
    expression: str
    distortion: str = "moebius"
    family: Family = "bernstein"
    c: Optional[float] = Field(default=None, ge=1.0)
    ns: list[int] = Field(default=[1, 2, 4, 8, 16, 32, 64])
    grid_size: int = Field(default=51, ge=2, le=100_000)
    window: Optional[tuple[float, float]] = None
    eval_range: Optional[tuple[float, float]] = None
    omega_grid: int = Field(default=1024, ge=16, le=2_000_000)
    samples_per_cell: int = Field(default=64, ge=32, le=4096)
    tail_tol: float = Field(default=1e-12, gt=0.0, le=1e-3)


class KorovkinResponse(BaseModel):
    c_used: float
    c_source: Literal["given", "estimated"]
    summary: KorovkinSummary
    rows: list[KorovkinRow]
    convergence: ConvergenceInfo
    all_hold: bool


class PropertiesRequest(BaseModel):
    distortion: str = "moebius"
    seed: int = 0
    trials: int = Field(default=100, ge=1, le=1_000_000)
    grid_size: int = Field(default=256, ge=8, le=100_000)
    workers: int = Field(default=1, ge=1, le=256)


class PropertyCheckInfo(BaseModel):
    name: str
    status: str
    trials: int
    failures: int
    tolerance: float
    max_violation: float
    first_counterexample: Optional[dict] = None
    reason: str = ""


class SuiteReport(BaseModel):
    schema_version: int
    suite: str
    capacity: str
    seed: int
    trials: int
    failures: int
    all_passed: bool
    checks: list[PropertyCheckInfo]


class PropertiesResponse(BaseModel):
    failures: int
    all_passed: bool
    suites: list[SuiteReport]


class CapacityRequest(BaseModel):
    distortion: str = "moebius"
    grid_size: int = Field(default=10_000, ge=2, le=10_000_000)
    table_points: int = Field(default=11, ge=2, le=10_001)
    ratio_cap: float = Field(default=1e6, gt=1.0)


class CapacityPoint(BaseModel):
    x: float
    nu: float
    nu_dual: float


class CapacityResponse(BaseModel):
    distortion: str
    points: list[CapacityPoint]
    submodular: bool
    submodular_witness: Optional[tuple[float, float]] = None
    c: Optional[float] = None
    unbounded: bool = False
    max_ratio: float = 0.0

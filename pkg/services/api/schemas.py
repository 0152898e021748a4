from datetime import datetime
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

Integrator = Literal["euler", "euler-renorm", "midpoint"]
GramMode = Literal["explicit", "implicit", "auto"]
Subcommand = Literal["decompose", "oracle", "gap", "series", "image", "gen-testimage"]


def _check_scale(value: Union[str, float]) -> Union[str, float]:
    if value in ("rowsum", "none"):
        return value
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValueError("scale must be 'rowsum', 'none' or a positive number")
    if not number > 0:
        raise ValueError("scale must be positive")
    return number


# ---------- ANNEAL PARAMETERS ----------

class AnnealParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = Field(1, ge=1)
    T: Optional[float] = Field(None, gt=0)
    steps: Optional[int] = Field(None, ge=1)
    integrator: Integrator = "midpoint"
    scale: Union[str, float] = "rowsum"
    gram_mode: GramMode = "auto"
    normalize: bool = False
    tol: Optional[float] = Field(None, gt=0)
    lambda0: float = Field(1.0, gt=0)
    lambda_exc: float = Field(1.0, gt=0)
    ground_index: int = Field(0, ge=0)
    seed: int = Field(0, ge=0)
    max_restarts: Optional[int] = Field(None, ge=0)
    compare_oracle: bool = False

    @field_validator("scale")
    @classmethod
    def scale_mode(cls, value):
        return _check_scale(value)


class RunConfig(AnnealParams):
    """Everything one CLI invocation needs."""

    subcommand: Subcommand = "decompose"
    input: Optional[str] = None
    output: Optional[str] = None
    out_dir: Optional[str] = None
    trace: Optional[str] = None
    trace_stride: int = Field(0, ge=0)
    threshold: Optional[int] = Field(None, ge=0)
    binary: bool = True
    size: int = Field(64, ge=64)
    K: Optional[float] = Field(None, gt=0)
    alpha: Optional[float] = Field(None, ge=-1, le=1)
    grid: int = Field(1001, ge=3)
    oracle_grid: int = Field(10001, ge=3)
    prefactor: Optional[float] = Field(None, gt=0)
    max_order: int = Field(400, ge=2)
    tail_tol: float = Field(1e-14, gt=0)
    use_oracle: bool = False
    verbose: bool = False


# ---------- REQUESTS ----------

class DecomposeRequest(AnnealParams):
    matrix: List[List[float]] = Field(..., min_length=1)


class SeriesRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: List[List[float]] = Field(..., min_length=1)
    T: float = Field(..., gt=0)
    scale: Union[str, float] = "rowsum"
    lambda0: float = Field(1.0, gt=0)
    lambda_exc: float = Field(1.0, gt=0)
    ground_index: int = Field(0, ge=0)
    max_order: int = Field(400, ge=2)
    tail_tol: float = Field(1e-14, gt=0)

    @field_validator("scale")
    @classmethod
    def scale_mode(cls, value):
        return _check_scale(value)


# ---------- RESPONSES ----------

class SpectrumResponse(BaseModel):
    method: str
    lambda_: List[float] = Field(..., alias="lambda")
    singular_values: List[float]
    v: List[List[float]]
    u: List[Optional[List[float]]]
    residuals: List[float]
    restarts: int
    fidelity_vs_oracle: Optional[List[float]] = None
    run_id: Optional[int] = None
    cached: bool = False

    model_config = ConfigDict(populate_by_name=True)


class GapSummary(BaseModel):
    min_gap: float
    argmin_x: float
    time_scale: float
    oracle_min_gap: float
    oracle_argmin_x: float
    discrepancy: float


class SeriesResponse(BaseModel):
    order_used: int
    tail_norm: float
    prenorm_norm: float
    state: List[List[float]]
    fidelity_vs_stepper: float


class RunRead(BaseModel):
    id: int
    method: str
    rows: int
    cols: int
    k: int
    anneal_time: Optional[float]
    tol: Optional[float]
    restarts: int
    singular_values: List[float]
    matrix_digest: str
    created_at: datetime

    model_config = ConfigDict(from_attributes=True)


class RunDetail(RunRead):
    result: dict


class JobSubmitted(BaseModel):
    task_id: str
    status: str


class JobStatus(BaseModel):
    task_id: str
    status: str
    result: Optional[dict] = None
    error: Optional[str] = None

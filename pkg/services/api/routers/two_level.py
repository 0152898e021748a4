from fastapi import APIRouter, Query

from services.api.schemas import GapSummary
from services.svd import runs
from services.svd.two_level import TwoLevelParams

router = APIRouter(
    prefix="/two-level",
    tags=["two-level"],
)


@router.get("/gap", response_model=GapSummary)
def gap(
    K: float = Query(..., gt=0),
    alpha: float = Query(..., ge=-1, le=1),
    lambda0: float = Query(1.0, gt=0),
    grid: int = Query(1001, ge=3, le=100001),
    oracle_grid: int = Query(10001, ge=3, le=1000001),
    prefactor: float = Query(1.0, gt=0),
):
    """Closed-form minimum gap and time scale, checked against the 2x2 oracle."""
    summary, _ = runs.gap_report(TwoLevelParams(K=K, alpha=alpha, lambda0=lambda0),
                                 grid, oracle_grid, prefactor)
    return summary

from fastapi import APIRouter

from services.api.schemas import SeriesRequest, SeriesResponse
from services.svd import runs

router = APIRouter(
    tags=["series"],
)


@router.post("/series", response_model=SeriesResponse)
def series(payload: SeriesRequest):
    a = runs.matrix_from_rows(payload.matrix)
    return runs.run_series(a, payload.T, runs.initial_hamiltonian(payload),
                           scale=payload.scale, max_order=payload.max_order,
                           tail_tol=payload.tail_tol)

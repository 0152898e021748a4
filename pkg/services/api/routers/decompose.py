from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session

from services.api.cache import get_cache
from services.api.db import get_db
from services.api.history import record_run
from services.api.schemas import DecomposeRequest, SpectrumResponse
from services.config import get_settings
from services.svd import runs

router = APIRouter(
    tags=["decomposition"],
)


def _run(method: str, payload: DecomposeRequest, db: Session) -> dict:
    a = runs.matrix_from_rows(payload.matrix)
    digest = runs.matrix_digest(a, payload, method)
    cache = get_cache()
    cached = cache.get(digest)
    if cached:
        return dict(cached, cached=True)

    settings = get_settings()
    if method == "oracle":
        result = runs.run_oracle(a, payload)
        tol = None
    else:
        result = runs.run_decompose(a, payload, settings)
        tol = payload.tol if payload.tol is not None else settings.default_tol
    run = record_run(db, a, result, digest, tol=tol)
    body = dict(result.to_dict(), run_id=run.id)
    cache.put(digest, body)
    return dict(body, cached=False)


@router.post("/decompose", response_model=SpectrumResponse)
def decompose(payload: DecomposeRequest, db: Session = Depends(get_db)):
    """Top-k singular triplets by annealing with deflation."""
    return _run("annealing", payload, db)


@router.post("/oracle", response_model=SpectrumResponse)
def oracle(payload: DecomposeRequest, db: Session = Depends(get_db)):
    return _run("oracle", payload, db)

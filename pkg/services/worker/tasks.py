from celery import shared_task
from celery.utils.log import get_task_logger

from services.api.db import SessionLocal
from services.api.history import record_run
from services.api.schemas import DecomposeRequest
from services.config import get_settings
from services.svd import runs
from services.svd.errors import ConvergenceError
from services.svd.spectrum import default_anneal_time

logger = get_task_logger(__name__)

MAX_RETRIES = 3


def next_attempt(payload: dict, n: int, prefactor: float) -> dict:
    """Same request with the anneal time doubled."""
    T = payload.get("T") or default_anneal_time(n, payload.get("lambda0", 1.0), prefactor)
    return dict(payload, T=2.0 * T)


@shared_task(name="services.worker.tasks.decompose_matrix",
             bind=True, acks_late=True, max_retries=MAX_RETRIES, default_retry_delay=0)
def decompose_matrix(self, payload: dict):
    request = DecomposeRequest(**payload)
    a = runs.matrix_from_rows(request.matrix)
    settings = get_settings()
    try:
        result = runs.run_decompose(a, request, settings)
    except ConvergenceError as exc:
        logger.warning("[WORKER] %s; retrying with a longer anneal", exc)
        retry_payload = next_attempt(payload, a.cols, settings.time_prefactor)
        raise self.retry(exc=exc, args=(retry_payload,))

    db = SessionLocal()
    try:
        tol = request.tol if request.tol is not None else settings.default_tol
        run = record_run(db, a, result, runs.matrix_digest(a, request), tol=tol)
        run_id = run.id
    finally:
        db.close()
    logger.info("[WORKER] run %d stored (k=%d, restarts=%d)", run_id, result.k,
                result.restarts)
    return dict(result.to_dict(), run_id=run_id)

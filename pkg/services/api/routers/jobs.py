from celery.result import AsyncResult
from fastapi import APIRouter, status

from services.api.schemas import DecomposeRequest, JobStatus, JobSubmitted
from services.worker.celery_app import app as celery_app
from services.worker.tasks import decompose_matrix

router = APIRouter(
    prefix="/jobs",
    tags=["jobs"],
)


@router.post("/decompose", response_model=JobSubmitted,
             status_code=status.HTTP_202_ACCEPTED)
def submit_decomposition(payload: DecomposeRequest):
    task = decompose_matrix.delay(payload.model_dump())
    return JobSubmitted(task_id=task.id, status="queued")


@router.get("/{task_id}", response_model=JobStatus)
def job_status(task_id: str):
    res = AsyncResult(task_id, app=celery_app)
    if res.successful():
        return JobStatus(task_id=task_id, status=res.status, result=res.result)
    if res.failed():
        return JobStatus(task_id=task_id, status=res.status, error=str(res.result))
    return JobStatus(task_id=task_id, status=res.status)

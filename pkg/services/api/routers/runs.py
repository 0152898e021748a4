from typing import List

from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.orm import Session

from services.api.db import get_db
from services.api import models
from services.api.schemas import RunDetail, RunRead

router = APIRouter(
    prefix="/runs",
    tags=["runs"],
)


@router.get("/", response_model=List[RunRead])
def list_runs(limit: int = Query(50, ge=1, le=500), db: Session = Depends(get_db)):
    runs = (
        db.query(models.DecompositionRun)
        .order_by(models.DecompositionRun.id.desc())
        .limit(limit)
        .all()
    )
    return runs


@router.get("/{run_id}", response_model=RunDetail)
def get_run(run_id: int, db: Session = Depends(get_db)):
    run = db.query(models.DecompositionRun).filter(
        models.DecompositionRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run

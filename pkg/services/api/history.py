from sqlalchemy.orm import Session

from services.api import models
from services.svd.matrix_core import DataMatrix
from services.svd.spectrum import SpectrumResult


def record_run(db: Session, a: DataMatrix, result: SpectrumResult, digest: str,
               tol=None) -> models.DecompositionRun:
    run = models.DecompositionRun(
        method=result.method,
        rows=a.rows,
        cols=a.cols,
        k=result.k,
        anneal_time=result.anneal_times[0] if result.anneal_times else None,
        tol=tol,
        restarts=result.restarts,
        singular_values=result.singular_values,
        result=result.to_dict(),
        matrix_digest=digest,
    )
    db.add(run)
    db.commit()
    db.refresh(run)
    return run

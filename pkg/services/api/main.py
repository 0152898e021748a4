import logging
from typing import List

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .db import check_db_connection, init_db
from services.api.routers.decompose import router as decompose_router
from services.api.routers.jobs import router as jobs_router
from services.api.routers.runs import router as runs_router
from services.api.routers.series import router as series_router
from services.api.routers.two_level import router as two_level_router
from services.svd.errors import ConvergenceError, InputError

logger = logging.getLogger(__name__)

app = FastAPI(
    title="Annealing SVD API",
    version="0.4.0",
    description="Singular value decomposition and PCA by simulated quantum annealing.",
)


class HealthResponse(BaseModel):
    status: str
    services: List[str]


class DBHealthResponse(BaseModel):
    status: str


@app.on_event("startup")
def create_tables():
    init_db()


@app.exception_handler(InputError)
async def input_error_handler(request: Request, exc: InputError):
    logger.info("[API] rejected %s: %s", request.url.path, exc)
    return JSONResponse(status_code=422,
                        content={"detail": str(exc), "error": type(exc).__name__})


@app.exception_handler(ConvergenceError)
async def convergence_error_handler(request: Request, exc: ConvergenceError):
    logger.warning("[API] %s did not converge: %s", request.url.path, exc)
    return JSONResponse(status_code=409,
                        content={"detail": str(exc), "error": type(exc).__name__})


@app.get("/health", response_model=HealthResponse)
async def health_check():
    """Health check endpoint"""
    return HealthResponse(
        status="ok",
        services=["api", "worker"],
    )


@app.get("/db-health", response_model=DBHealthResponse)
async def db_health_check():
    """Database health check"""
    ok = check_db_connection()
    return DBHealthResponse(status="ok" if ok else "error")


# Register routers
app.include_router(decompose_router)
app.include_router(two_level_router)
app.include_router(series_router)
app.include_router(runs_router)
app.include_router(jobs_router)

from datetime import datetime

from sqlalchemy import (
    Column,
    Integer,
    String,
    Float,
    DateTime,
    JSON,
)

from .db import Base


class DecompositionRun(Base):
    __tablename__ = "decomposition_runs"

    id = Column(Integer, primary_key=True, index=True)
    method = Column(String(20), nullable=False)  # annealing | oracle
    rows = Column(Integer, nullable=False)
    cols = Column(Integer, nullable=False)
    k = Column(Integer, nullable=False)

    anneal_time = Column(Float, nullable=True)
    tol = Column(Float, nullable=True)
    restarts = Column(Integer, nullable=False, default=0)

    singular_values = Column(JSON, nullable=False)
    result = Column(JSON, nullable=False)
    matrix_digest = Column(String(32), nullable=False, index=True)

    created_at = Column(
        DateTime(timezone=True),
        nullable=False,
        default=datetime.utcnow,
        index=True,
    )

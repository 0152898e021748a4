# services/api/db.py
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, declarative_base

from services.config import get_settings

Base = declarative_base()

DATABASE_URL = get_settings().database_url


def make_engine(url: str):
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    return create_engine(url, pool_pre_ping=True, connect_args=connect_args)


engine = make_engine(DATABASE_URL)
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db():
    """Create missing tables; deployments run the Alembic revisions instead."""
    from services.api import models  # noqa: F401  registers the tables

    Base.metadata.create_all(bind=engine)


def check_db_connection():
    try:
        with engine.connect():
            return True
    except Exception:
        return False

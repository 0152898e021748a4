import os
import tempfile

# must precede any services.* import: db.py binds its engine at import time
_DB_DIR = tempfile.mkdtemp(prefix="svd-tests-")
os.environ["DATABASE_URL"] = "sqlite:///" + os.path.join(_DB_DIR, "runs.db")
os.environ["RESULT_CACHE"] = "off"
os.environ.setdefault("CELERY_BROKER_URL", "memory://")
os.environ.setdefault("CELERY_RESULT_BACKEND", "cache+memory://")

import numpy as np
import pytest

from services.svd.matrix_core import DataMatrix, GramOperator

# data matrix of the two-dimensional demonstration, as printed (two digits)
PRINTED_A = [[-0.69, -0.68], [-0.023, 0.73], [0.72, -0.043]]
# its Gram matrix as printed
PRINTED_G = [[1.0, 0.43], [0.43, 1.0]]


@pytest.fixture
def demo_a():
    return DataMatrix(np.array(PRINTED_A))


@pytest.fixture
def demo_g():
    return GramOperator.from_dense(np.array(PRINTED_G))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def demo_file(tmp_path):
    path = tmp_path / "demo2d.txt"
    lines = ["3 2"] + [" ".join(str(x) for x in row) for row in PRINTED_A]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture(scope="session")
def client():
    from fastapi.testclient import TestClient

    from services.api.main import app

    with TestClient(app) as c:
        yield c

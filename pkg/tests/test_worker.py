import pytest

from services.api import models
from services.api.db import SessionLocal, init_db
from services.svd.spectrum import default_anneal_time
from services.worker.celery_app import app
from services.worker.tasks import MAX_RETRIES, decompose_matrix, next_attempt
from tests.conftest import PRINTED_A


@pytest.fixture(autouse=True)
def tables():
    init_db()


def test_task_is_registered_under_its_name():
    assert decompose_matrix.name == "services.worker.tasks.decompose_matrix"
    assert decompose_matrix.max_retries == MAX_RETRIES == 3
    assert app.conf.task_serializer == "json"


def test_next_attempt_doubles_anneal_time():
    payload = {"matrix": PRINTED_A, "T": 250.0, "k": 1}
    assert next_attempt(payload, 2, 50.0)["T"] == 500.0
    assert payload["T"] == 250.0


def test_next_attempt_starts_from_default_time():
    doubled = next_attempt({"matrix": PRINTED_A}, 2, 50.0)
    assert doubled["T"] == 2 * default_anneal_time(2, 1.0, 50.0)


def test_decompose_task_records_run():
    result = decompose_matrix.apply(args=({"matrix": PRINTED_A, "k": 2, "T": 1000.0},))
    assert result.successful()
    body = result.get()
    assert body["lambda"][0] == pytest.approx(1.43, abs=2e-2)
    assert len(body["singular_values"]) == 2

    db = SessionLocal()
    try:
        run = db.get(models.DecompositionRun, body["run_id"])
        assert run.method == "annealing"
        assert run.k == 2
        assert run.tol == pytest.approx(1e-4)
    finally:
        db.close()


def test_decompose_task_rejects_bad_payload():
    result = decompose_matrix.apply(args=({"matrix": PRINTED_A, "k": 0},))
    assert result.failed()

from celery import Celery

from services.config import get_settings

settings = get_settings()

app = Celery("svd_worker", broker=settings.broker_url, backend=settings.result_backend,
             include=["services.worker.tasks"])

app.conf.task_serializer = "json"
app.conf.result_serializer = "json"
app.conf.accept_content = ["json"]

# CLI compatibility
celery = app

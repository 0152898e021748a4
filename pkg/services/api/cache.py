import json
import logging
from typing import Optional

from services.config import get_settings

logger = logging.getLogger(__name__)


class ResultCache:
    """Decomposition results in Redis, keyed by matrix + parameter digest.

    Any Redis failure is logged and treated as a miss.
    """

    PREFIX = "svd:"

    def __init__(self, url: Optional[str] = None, ttl: Optional[int] = None,
                 enabled: Optional[bool] = None):
        settings = get_settings()
        self.url = url or settings.redis_url
        self.cache_ttl = ttl if ttl is not None else settings.result_cache_ttl
        self.use_cache = settings.result_cache if enabled is None else enabled
        self._client = None

    def _get_cache_key(self, digest: str) -> str:
        return "{0}{1}".format(self.PREFIX, digest)

    def _redis(self):
        if self._client is None:
            import redis
            self._client = redis.Redis.from_url(self.url, decode_responses=True,
                                                socket_connect_timeout=1)
        return self._client

    def get(self, digest: str) -> Optional[dict]:
        if not self.use_cache:
            return None
        try:
            cached = self._redis().get(self._get_cache_key(digest))
            if cached:
                logger.info("[CACHE] Hit for %s", digest)
                return json.loads(cached)
        except Exception as e:
            logger.warning("[CACHE] Error: %s", e)
        return None

    def put(self, digest: str, payload: dict) -> None:
        if not self.use_cache:
            return
        try:
            self._redis().setex(self._get_cache_key(digest), self.cache_ttl,
                                json.dumps(payload))
            logger.info("[CACHE] Stored %s", digest)
        except Exception as e:
            logger.warning("[CACHE] Error: %s", e)


_cache: Optional[ResultCache] = None


def get_cache() -> ResultCache:
    global _cache
    if _cache is None:
        _cache = ResultCache()
    return _cache

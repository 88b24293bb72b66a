import diskcache
import hashlib
import json
import logging
from functools import wraps
from typing import Any, Callable, Optional
from singkit.core.config import settings
from singkit.core.metrics import MetricsManager

logger = logging.getLogger(__name__)


class CacheManager:
    """Process-wide artifact store keyed by sha256 of the computation's inputs.

    Entries are JSON text. Artifacts never expire: a key fully determines
    its value.
    """

    _store: Optional[diskcache.Cache] = None
    _store_dir: Optional[str] = None

    @classmethod
    def store(cls) -> diskcache.Cache:
        # reopen when tests or the CLI point cache_dir somewhere else
        if cls._store is None or cls._store_dir != settings.cache_dir:
            if cls._store is not None:
                cls._store.close()
            cls._store = diskcache.Cache(settings.cache_dir)
            cls._store_dir = settings.cache_dir
        return cls._store

    @classmethod
    def generate_key(cls, domain: str, task: str, payload: Any) -> str:
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
        digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
        return f"{domain}:{task}:{digest}"

    @classmethod
    def get(cls, key: str) -> Optional[Any]:
        if not settings.enable_caching:
            return None
        text = cls.store().get(key)
        return None if text is None else json.loads(text)

    @classmethod
    def set(cls, key: str, document: Any):
        if not settings.enable_caching:
            return
        cls.store().set(key, json.dumps(document, sort_keys=True))


def cached_artifact(domain: str, dump: Callable[[Any], Any], load: Callable[[Any], Any]):
    """Cache a pure computation by its arguments.

    ``dump`` turns the result into a JSON-able document and ``load`` rebuilds
    the result from it, so a hit goes through exactly the same parser as a
    file read from disk.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            if not settings.enable_caching:
                return func(*args, **kwargs)

            key = CacheManager.generate_key(domain, func.__name__,
                                           {"args": args, "kwargs": kwargs, "version": settings.version})
            document = CacheManager.get(key)
            if document is not None:
                logger.debug("Artifact cache hit", extra={"domain": domain, "task": func.__name__})
                MetricsManager.record_cache(domain, hit=True)
                return load(document)

            logger.debug("Artifact cache miss", extra={"domain": domain, "task": func.__name__})
            MetricsManager.record_cache(domain, hit=False)
            result = func(*args, **kwargs)
            CacheManager.set(key, dump(result))
            return result
        return wrapper
    return decorator

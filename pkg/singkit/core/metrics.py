from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile
import logging
import time
from contextlib import contextmanager

logger = logging.getLogger(__name__)

REGISTRY = CollectorRegistry()

PRIMES_USED = Counter(
    "singkit_primes_used_total",
    "Primes consumed by multi-modular computations",
    ["task"],
    registry=REGISTRY,
)

UNLUCKY_PRIMES = Counter(
    "singkit_unlucky_primes_total",
    "Primes discarded because a denominator or leading coefficient vanished",
    ["task"],
    registry=REGISTRY,
)

FIT_COUNT = Counter(
    "singkit_fits_total",
    "Operator fits attempted",
    ["outcome"],
    registry=REGISTRY,
)

RESULTANT_COUNT = Counter(
    "singkit_resultants_total",
    "Resultants computed",
    ["method"],
    registry=REGISTRY,
)

FACTORIZATION_COUNT = Counter(
    "singkit_factorizations_total",
    "Univariate factorizations",
    ["domain"],
    registry=REGISTRY,
)

CACHE_LOOKUPS = Counter(
    "singkit_cache_lookups_total",
    "Artifact cache lookups",
    ["domain", "result"],
    registry=REGISTRY,
)

STAGE_LATENCY = Histogram(
    "singkit_stage_duration_seconds",
    "Wall time of engine stages",
    ["stage"],
    buckets=(0.01, 0.1, 1.0, 10.0, 60.0, 600.0, float("inf")),
    registry=REGISTRY,
)


class MetricsManager:
    @staticmethod
    def record_prime(task: str, unlucky: bool = False):
        PRIMES_USED.labels(task=task).inc()
        if unlucky:
            UNLUCKY_PRIMES.labels(task=task).inc()

    @staticmethod
    def record_fit(outcome: str):
        FIT_COUNT.labels(outcome=outcome).inc()

    @staticmethod
    def record_resultant(method: str):
        RESULTANT_COUNT.labels(method=method).inc()

    @staticmethod
    def record_factorization(domain: str):
        FACTORIZATION_COUNT.labels(domain=domain).inc()

    @staticmethod
    def record_cache(domain: str, hit: bool):
        CACHE_LOOKUPS.labels(domain=domain, result="hit" if hit else "miss").inc()

    @staticmethod
    @contextmanager
    def timed(stage: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            STAGE_LATENCY.labels(stage=stage).observe(time.perf_counter() - start)

    @staticmethod
    def export(path: str):
        write_to_textfile(path, REGISTRY)
        logger.info("Metrics written", extra={"path": path})

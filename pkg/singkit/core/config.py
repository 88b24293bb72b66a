import os
import logging
from pydantic import BaseModel, Field
from typing import Optional
from dotenv import load_dotenv

load_dotenv()

_logger = logging.getLogger(__name__)


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


def _default_threads() -> int:
    raw = os.getenv("ISING_SINGKIT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        _logger.warning(
            "Ignoring invalid ISING_SINGKIT_THREADS value; using hardware parallelism.",
            extra={"value": raw},
        )
        return os.cpu_count() or 1
    return value


class ArithmeticSettings(BaseModel):
    prime_offset: int = Field(default=int(os.getenv("SINGKIT_PRIME_OFFSET", "0")), ge=0, lt=50)
    max_prime_retries: int = int(os.getenv("SINGKIT_MAX_PRIME_RETRIES", "8"))
    factor_degree_cap: int = int(os.getenv("SINGKIT_FACTOR_DEGREE_CAP", "128"))
    check_factorizations: bool = _env_bool("SINGKIT_CHECK_FACTORIZATIONS", "true")
    resultant_method: str = os.getenv("SINGKIT_RESULTANT_METHOD", "subresultant")


class FitSettings(BaseModel):
    guard: int = int(os.getenv("SINGKIT_FIT_GUARD", "10"))
    enable_stretch_fits: bool = _env_bool("SINGKIT_ENABLE_STRETCH_FITS", "false")


class Config(BaseModel):
    app_name: str = "ising-singkit"
    environment: str = os.getenv("SINGKIT_ENV", "development")
    version: str = "0.4.1"

    # Execution
    threads: int = Field(default_factory=_default_threads)

    # Exact arithmetic
    arithmetic: ArithmeticSettings = ArithmeticSettings()
    fit: FitSettings = FitSettings()

    # Series models
    enable_cyclotomic: bool = _env_bool("SINGKIT_ENABLE_CYCLOTOMIC", "false")
    phik_prefactor: str = os.getenv("SINGKIT_PHIK_PREFACTOR", "direct")

    # Numerics
    aberth_max_iter: int = int(os.getenv("SINGKIT_ABERTH_MAX_ITER", "500"))
    root_precision_warning_degree: int = 60

    # Caching & observability
    enable_caching: bool = _env_bool("SINGKIT_ENABLE_CACHING", "true")
    cache_dir: str = os.getenv("SINGKIT_CACHE_DIR", ".cache")
    metrics_file: Optional[str] = os.getenv("SINGKIT_METRICS_FILE")
    log_level: str = os.getenv("SINGKIT_LOG_LEVEL", "INFO")


settings = Config()

# --- Startup validation ---
if settings.phik_prefactor not in ("direct", "printed"):
    _logger.warning("Unknown SINGKIT_PHIK_PREFACTOR; falling back to 'direct'.")
    settings.phik_prefactor = "direct"
if settings.arithmetic.resultant_method not in ("subresultant", "collins"):
    _logger.warning("Unknown SINGKIT_RESULTANT_METHOD; falling back to 'subresultant'.")
    settings.arithmetic.resultant_method = "subresultant"

import pytest
import os

# Set env before importing singkit components
os.environ["SINGKIT_ENV"] = "testing"
os.environ["SINGKIT_ENABLE_CACHING"] = "false"
os.environ["SINGKIT_PRIME_OFFSET"] = "0"
os.environ["SINGKIT_LOG_LEVEL"] = "WARNING"
os.environ["SINGKIT_ENABLE_STRETCH_FITS"] = "false"
os.environ.setdefault("ISING_SINGKIT_THREADS", "2")

from singkit.core.config import settings
from singkit.data import load_golden
from singkit.services.exactalg import RATIONALS, Field, prime_pool


@pytest.fixture(scope="session")
def rationals():
    """The rational coefficient field."""
    return RATIONALS


@pytest.fixture(scope="session")
def prime():
    """First prime of the pool at the test offset."""
    return prime_pool()[settings.arithmetic.prime_offset]


@pytest.fixture(scope="session")
def prime_field(prime):
    return Field.mod(prime)


@pytest.fixture(scope="session")
def golden():
    """Loader for the shipped reference data (singkit/data/golden/*.json)."""
    return load_golden


@pytest.fixture(scope="function")
def cache_dir(tmp_path):
    """Enable the artifact cache in a throwaway directory for one test."""
    saved = (settings.enable_caching, settings.cache_dir)
    settings.enable_caching = True
    settings.cache_dir = str(tmp_path / "cache")
    yield settings.cache_dir
    settings.enable_caching, settings.cache_dir = saved

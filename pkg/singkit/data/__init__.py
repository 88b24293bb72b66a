import json
from functools import lru_cache
from pathlib import Path

from singkit.core.exceptions import InvalidInputError

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@lru_cache(maxsize=None)
def load_golden(name: str) -> dict:
    """Reference data shipped with the package (``singkit/data/golden/<name>.json``)."""
    path = GOLDEN_DIR / f"{name}.json"
    if not path.exists():
        raise InvalidInputError(f"No golden file named {name!r}",
                                details={"known": sorted(p.stem for p in GOLDEN_DIR.glob("*.json"))})
    with path.open(encoding="utf-8") as fh:
        return json.load(fh)

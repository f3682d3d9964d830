"""Bundled synthetic sample data (see scripts/make_sample_data.py)."""

from importlib import resources
from pathlib import Path


def sample_path(name: str) -> Path:
    """Filesystem path of a bundled sample CSV, e.g. ``sp500_sample.csv``."""
    ref = resources.files(__package__) / name
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled sample named {name!r}")
    return Path(str(ref))

"""On-disk cache for perturbation-series coefficients.

One JSON document per (p, level), holding coefficients as exact
"num/den" strings so round-trips never lose precision. Reads are safe
against concurrent writers because writes go through an atomic rename;
writers serialize on a lock file next to the cache entry.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from filelock import FileLock

from .series_core import BWSeries, generate_bw_coefficients, rational_str

# Bump when the recursion or the file layout changes: stale tables must
# never be served after a coefficient-generation fix.
FORMAT_VERSION = 1

CACHE_DIR_ENV = "VPTOSC_CACHE_DIR"


class CacheError(Exception):
    """Cache entry is unreadable or fails validation."""


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "vptosc"


def _entry_path(directory: Path, p: int, level: int) -> Path:
    return directory / f"bw_p{p}_level{level}.json"


def _load_entry(path: Path, p: int, level: int) -> BWSeries | None:
    """Return the cached series, None if absent/stale, or raise CacheError."""
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("format_version") != FORMAT_VERSION:
            return None  # stale format: regenerate
        if doc["p"] != p or doc["level"] != level:
            raise CacheError(f"{path}: key mismatch in cache document")
        coeffs = tuple(Fraction(s) for s in doc["coefficients"])
        return BWSeries(p=p, level=level, order=int(doc["order"]), coeffs=coeffs)
    except CacheError:
        raise
    except (OSError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise CacheError(f"{path}: corrupted cache entry ({exc})") from exc


def _write_entry(path: Path, series: BWSeries) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "p": series.p,
        "level": series.level,
        "order": series.order,
        "coefficients": [rational_str(c) for c in series.coeffs],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def get_bw_series(
    p: int,
    order: int,
    directory: str | os.PathLike | None = None,
    strict: bool = False,
) -> BWSeries:
    """Fetch coefficients through the cache, generating and storing on miss.

    With strict=True a corrupted cache entry raises CacheError instead of
    being regenerated, and cached values are returned as-is (tamper
    detection is left to the identity verifiers downstream).
    """
    directory = cache_dir(directory)
    path = _entry_path(directory, p, 0)
    try:
        cached = _load_entry(path, p, 0)
    except CacheError:
        if strict:
            raise
        cached = None
    if cached is not None and cached.order >= order:
        return cached.truncated(order)

    series = generate_bw_coefficients(p, max(order, cached.order if cached else 0))
    directory.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        # Re-check under the lock: another writer may have extended the entry.
        try:
            current = _load_entry(path, p, 0)
        except CacheError:
            current = None
        if current is None or current.order < series.order:
            _write_entry(path, series)
    return series.truncated(order)

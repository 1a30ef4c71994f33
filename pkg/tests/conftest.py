import pytest


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep the on-disk coefficient cache away from the user's home."""
    monkeypatch.setenv("VPTOSC_CACHE_DIR", str(tmp_path / "bwcache"))

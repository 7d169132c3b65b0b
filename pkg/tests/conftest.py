from __future__ import annotations

import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # keep every test away from the user's real cache directory
    root = tmp_path_factory.getbasetemp() / "cache"
    monkeypatch.setenv("DERANGEMENT_CLIQUES_CACHE", str(root))

from __future__ import annotations

import json

import numpy as np

from derangement_cliques.cache import ENV_VAR, FORMAT_VERSION, Cache, default_cache_dir


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "x"))
    assert default_cache_dir() == tmp_path / "x"


def test_round_trip(tmp_path):
    cache = Cache(tmp_path)
    cache.store("k", b"payload")
    assert cache.load("k") == b"payload"
    cache.store_json("j", {"a": [1, 2]})
    assert cache.load_json("j") == {"a": [1, 2]}
    arr = np.arange(12, dtype=np.int8).reshape(3, 4)
    cache.store_array("m", arr)
    assert np.array_equal(cache.load_array("m"), arr)


def test_missing_is_none(tmp_path):
    assert Cache(tmp_path).load("absent") is None


def test_header_carries_version_and_checksum(tmp_path):
    cache = Cache(tmp_path)
    cache.store("k", b"abc")
    header = json.loads(cache.path("k").read_bytes().split(b"\n", 1)[0])
    assert header["format_version"] == FORMAT_VERSION and header["key"] == "k"
    assert len(header["sha256"]) == 64


def test_corrupt_payload_recomputes(tmp_path):
    cache = Cache(tmp_path)
    calls = []

    def compute():
        calls.append(1)
        return np.ones((2, 2), dtype=np.int8)

    cache.array("a", compute)
    path = cache.path("a")
    raw = bytearray(path.read_bytes())
    raw[-1] ^= 0xFF
    path.write_bytes(bytes(raw))
    assert cache.load("a") is None
    out = cache.array("a", compute)
    assert len(calls) == 2 and np.array_equal(out, np.ones((2, 2)))
    assert cache.load("a") is not None


def test_version_mismatch_is_miss(tmp_path):
    cache = Cache(tmp_path)
    cache.store("k", b"abc")
    path = cache.path("k")
    head, payload = path.read_bytes().split(b"\n", 1)
    header = json.loads(head)
    header["format_version"] = FORMAT_VERSION + 1
    path.write_bytes(json.dumps(header).encode() + b"\n" + payload)
    assert cache.load("k") is None


def test_garbage_header_is_miss(tmp_path):
    cache = Cache(tmp_path)
    cache.root.mkdir(parents=True, exist_ok=True)
    cache.path("k").write_bytes(b"not json\nabc")
    assert cache.load("k") is None
    cache.discard("k")
    assert not cache.path("k").exists()

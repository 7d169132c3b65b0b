"""On-disk cache with a versioned, checksummed header.

Each entry is one file: a single JSON header line followed by the raw payload.
A header with the wrong format version, key or checksum is treated as a miss,
so corrupt entries are recomputed and overwritten rather than reused.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import re
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

FORMAT_VERSION = 1
ENV_VAR = "DERANGEMENT_CLIQUES_CACHE"

log = logging.getLogger(__name__)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "derangement-cliques"


class Cache:
    def __init__(self, root: str | os.PathLike[str] | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, key: str) -> Path:
        safe = re.sub(r"[^A-Za-z0-9_.-]+", "_", key)
        return self.root / f"{safe}.v{FORMAT_VERSION}.cache"

    def load(self, key: str) -> bytes | None:
        path = self.path(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            return None
        head, sep, payload = raw.partition(b"\n")
        try:
            header = json.loads(head)
        except ValueError:
            header = None
        if (
            not sep
            or not isinstance(header, dict)
            or header.get("format_version") != FORMAT_VERSION
            or header.get("key") != key
            or header.get("sha256") != hashlib.sha256(payload).hexdigest()
        ):
            log.warning("discarding invalid cache entry %s", path)
            return None
        return payload

    def store(self, key: str, payload: bytes) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        header = {
            "format_version": FORMAT_VERSION,
            "key": key,
            "sha256": hashlib.sha256(payload).hexdigest(),
        }
        path = self.path(key)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(json.dumps(header, sort_keys=True).encode() + b"\n" + payload)
        tmp.replace(path)

    def discard(self, key: str) -> None:
        self.path(key).unlink(missing_ok=True)

    def load_json(self, key: str) -> Any:
        payload = self.load(key)
        return None if payload is None else json.loads(payload)

    def store_json(self, key: str, value: Any) -> None:
        self.store(key, json.dumps(value, sort_keys=True).encode())

    def load_array(self, key: str) -> np.ndarray | None:
        payload = self.load(key)
        if payload is None:
            return None
        return np.load(io.BytesIO(payload), allow_pickle=False)

    def store_array(self, key: str, arr: np.ndarray) -> None:
        buf = io.BytesIO()
        np.save(buf, arr, allow_pickle=False)
        self.store(key, buf.getvalue())

    def array(self, key: str, compute: Callable[[], np.ndarray]) -> np.ndarray:
        arr = self.load_array(key)
        if arr is None:
            arr = compute()
            self.store_array(key, arr)
        return arr

"""Hash-addressed on-disk cache for kernel artifacts.

Keys are content hashes of (law hash, operation, parameters); values are
npz archives.  Reruns with equal keys return byte-identical arrays, which is
what makes report regeneration reproducible.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

_ENV = "STABLEWALK_CACHE"


def cache_dir() -> Path | None:
    root = os.environ.get(_ENV)
    if not root:
        return None
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def content_key(law_hash: str, op: str, **params) -> str:
    payload = json.dumps({"law": law_hash, "op": op, "params": params}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def load(key: str) -> dict | None:
    root = cache_dir()
    if root is None:
        return None
    path = root / f"{key}.npz"
    if not path.exists():
        return None
    with np.load(path, allow_pickle=False) as z:
        return {k: z[k] for k in z.files}


def store(key: str, **arrays) -> None:
    root = cache_dir()
    if root is None:
        return
    path = root / f"{key}.npz"
    tmp = path.with_suffix(".tmp.npz")
    np.savez_compressed(tmp, **arrays)
    os.replace(tmp, path)

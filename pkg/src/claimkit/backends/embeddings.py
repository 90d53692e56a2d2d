"""Embedding backends with per-text caching and cosine similarity.

Vectors are L2-normalized on receipt, so cosine is a plain dot product.
Cache entries are keyed by text hash + backend id; repeated texts in one
batch coalesce into a single backend call.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .cache import DiskCache, cache_key
from .judges import TransportError, ProtocolError


class EmbeddingBackend(Protocol):
    backend_id: str

    def embed_texts(self, texts: list[str]) -> list[list[float]]: ...


class HttpEmbeddingBackend:
    """POST {texts: [str]} -> {vectors: [[f64]]}."""

    def __init__(self, endpoint: str, backend_id: str | None = None, timeout: float = 120.0):
        self.endpoint = endpoint
        self.backend_id = backend_id or f"http:{endpoint}"
        self.timeout = timeout

    def embed_texts(self, texts: list[str]) -> list[list[float]]:
        import requests

        try:
            resp = requests.post(self.endpoint, json={"texts": texts}, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"embedding endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProtocolError(f"unexpected status {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProtocolError("non-JSON reply body") from exc
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProtocolError("reply missing aligned 'vectors' field")
        return vectors


class FixtureEmbeddingBackend:
    """Replays vectors from a JSONL file of {digest, vector} rows (digest = sha256 of text)."""

    def __init__(self, path: str | Path, backend_id: str | None = None):
        from .cache import prompt_digest  # same digest convention as judge fixtures

        self.backend_id = backend_id or f"fixture:{Path(path).name}"
        self._digest = prompt_digest
        self._vectors: dict[str, list[float]] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                self._vectors[obj["digest"]] = obj["vector"]

    def embed_texts(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            digest = self._digest(text)
            if digest not in self._vectors:
                raise TransportError(f"no fixture vector for text digest {digest}")
            out.append(self._vectors[digest])
        return out


def _normalize(vector: Sequence[float]) -> np.ndarray:
    arr = np.asarray(vector, dtype=np.float64)
    norm = np.linalg.norm(arr)
    if norm == 0:
        return arr
    return arr / norm


def embed(texts: list[str], backend: EmbeddingBackend, cache: DiskCache) -> np.ndarray:
    """Embed a batch, returning an (n, d) array of unit-norm rows in input order."""
    keys = [cache_key("embedding", text, backend.backend_id) for text in texts]
    vectors: dict[str, list[float]] = {}
    missing_texts: list[str] = []
    missing_keys: list[str] = []
    for text, key in zip(texts, keys):
        hit = cache.get(key)
        if hit is not None:
            vectors[key] = hit["vector"]
        elif key not in missing_keys:
            missing_keys.append(key)
            missing_texts.append(text)
    if missing_texts:
        fresh = backend.embed_texts(missing_texts)
        for key, text, vec in zip(missing_keys, missing_texts, fresh):
            stored = cache.put(key, {"backend_id": backend.backend_id, "vector": list(vec)})
            vectors[key] = stored["vector"]
    rows = [_normalize(vectors[key]) for key in keys]
    dims = {row.shape[0] for row in rows}
    if len(dims) > 1:
        raise ValueError(f"dimension mismatch within batch: {sorted(dims)}")
    if not rows:
        return np.zeros((0, 0))
    return np.vstack(rows)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.dot(u, v))

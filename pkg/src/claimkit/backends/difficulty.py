"""Difficulty verifier handle: label-aligned confidence for the curation band."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Protocol

from ..corpus import ClaimRecord, Label
from .cache import DiskCache, cache_key
from .judges import TransportError, ProtocolError


class VerifierBackend(Protocol):
    backend_id: str

    def probability_supported(self, claim: str, evidence: list[str]) -> float: ...


class HttpVerifierBackend:
    """POST {claim, evidence} -> {p_supported}."""

    def __init__(self, endpoint: str, backend_id: str | None = None, timeout: float = 120.0):
        self.endpoint = endpoint
        self.backend_id = backend_id or f"http:{endpoint}"
        self.timeout = timeout

    def probability_supported(self, claim: str, evidence: list[str]) -> float:
        import requests

        try:
            resp = requests.post(
                self.endpoint, json={"claim": claim, "evidence": evidence},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"verifier endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProtocolError(f"unexpected status {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProtocolError("non-JSON reply body") from exc
        if "p_supported" not in payload:
            raise ProtocolError("reply missing 'p_supported' field")
        return float(payload["p_supported"])


class FixtureVerifierBackend:
    """Replays P(Supported) by claim digest from a JSONL of {digest, p_supported}."""

    def __init__(self, path: str | Path, backend_id: str | None = None):
        from .cache import prompt_digest

        self.backend_id = backend_id or f"fixture:{Path(path).name}"
        self._digest = prompt_digest
        self._probs: dict[str, float] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                self._probs[obj["digest"]] = float(obj["p_supported"])

    def probability_supported(self, claim: str, evidence: list[str]) -> float:
        digest = self._digest(claim)
        if digest not in self._probs:
            raise TransportError(f"no fixture probability for claim digest {digest}")
        return self._probs[digest]


def difficulty_score(
    record: ClaimRecord,
    verifier: VerifierBackend,
    cache: DiskCache | None = None,
) -> float:
    """Label-aligned confidence: the verifier's probability on the gold label."""
    if record.label is None:
        raise ValueError(f"record {record.id!r} has no gold label; difficulty needs one")
    p_supported: float
    key = None
    if cache is not None:
        key = cache_key("difficulty", record.claim + "\x00" + record.evidence_text(),
                        verifier.backend_id)
        hit = cache.get(key)
        if hit is not None:
            p_supported = hit["p_supported"]
        else:
            p_supported = verifier.probability_supported(record.claim, record.evidence)
            p_supported = cache.put(key, {"p_supported": p_supported})["p_supported"]
    else:
        p_supported = verifier.probability_supported(record.claim, record.evidence)
    if not 0.0 <= p_supported <= 1.0:
        raise ValueError(f"verifier probability out of range: {p_supported}")
    return p_supported if record.label is Label.SUPPORTED else 1.0 - p_supported

"""Embedding providers and the sentence-vector cache.

A provider maps sentence text to fixed-dimension vectors. Three
implementations ship: a file provider over precomputed vectors, an HTTP
provider speaking the sidecar protocol, and a deterministic stub for tests.
Vectors are cached keyed by (provider_id, sentence hash) so a sentence is
embedded once per provider no matter how many samples it appears in.
"""

from __future__ import annotations

import hashlib
import logging
import struct
import time
from pathlib import Path
from typing import Sequence

import numpy as np
import requests

from .errors import ProviderError

log = logging.getLogger(__name__)

BINARY_MAGIC = b"LEXEMB01"


def sentence_hash(text: str) -> str:
    """64-bit sentence key: first 8 bytes of sha256(utf-8 text), hex."""
    return hashlib.sha256(text.encode("utf-8")).digest()[:8].hex()


def sentence_hash_int(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


class StubEmbeddingProvider:
    """Deterministic hash-projection embeddings, for tests only.

    Recipe, reproducible independently: h = first 8 bytes of
    sha256(sentence utf-8) as a big-endian unsigned int; the vector is
    Generator(PCG64(SeedSequence((seed, h)))).standard_normal(dim).
    """

    normalizes = False
    max_batch = 0  # unlimited

    def __init__(self, dim: int = 16, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self.provider_id = f"stub-gauss-d{dim}-s{seed}"

    def encode(self, sentences: Sequence[str]) -> np.ndarray:
        out = np.empty((len(sentences), self.dim))
        for i, s in enumerate(sentences):
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence((self.seed, sentence_hash_int(s))))
            )
            out[i] = rng.standard_normal(self.dim)
        return out


class FileEmbeddingProvider:
    """Serves precomputed vectors keyed by sentence hash.

    CSV layout: first line `provider_id=<id>,dim=<D>`, then one row per
    sentence, `<16-hex-hash>,v1,...,vD`. Binary layout: magic LEXEMB01,
    u16 provider_id length + utf-8 provider_id, u32 dim, u64 row count,
    then rows of (u64 hash, dim float64), all big-endian except the
    little-endian float payload.
    """

    normalizes = False
    max_batch = 0

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.vectors: dict[str, np.ndarray] = {}
        with open(self.path, "rb") as fh:
            head = fh.read(len(BINARY_MAGIC))
        if head == BINARY_MAGIC:
            self._load_binary()
        else:
            self._load_csv()

    def _load_csv(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            fields = dict(part.split("=", 1) for part in header.split(","))
            try:
                self.provider_id = fields["provider_id"]
                self.dim = int(fields["dim"])
            except (KeyError, ValueError) as exc:
                raise ProviderError(f"{self.path.name}: bad embedding-file header") from exc
            for lineno, line in enumerate(fh, 2):
                if not line.strip():
                    continue
                cells = line.rstrip("\n").split(",")
                if len(cells) != self.dim + 1:
                    raise ProviderError(
                        f"{self.path.name}:{lineno}: expected {self.dim + 1} fields"
                    )
                self.vectors[cells[0]] = np.array([float(x) for x in cells[1:]])

    def _load_binary(self) -> None:
        with open(self.path, "rb") as fh:
            fh.read(len(BINARY_MAGIC))
            (id_len,) = struct.unpack(">H", fh.read(2))
            self.provider_id = fh.read(id_len).decode("utf-8")
            (self.dim,) = struct.unpack(">I", fh.read(4))
            (count,) = struct.unpack(">Q", fh.read(8))
            for _ in range(count):
                (h,) = struct.unpack(">Q", fh.read(8))
                vec = np.frombuffer(fh.read(8 * self.dim), dtype="<f8").copy()
                self.vectors[f"{h:016x}"] = vec

    def encode(self, sentences: Sequence[str]) -> np.ndarray:
        out = np.empty((len(sentences), self.dim))
        for i, s in enumerate(sentences):
            key = sentence_hash(s)
            if key not in self.vectors:
                raise ProviderError(
                    f"no precomputed vector for sentence hash {key} ({s[:60]!r})"
                )
            out[i] = self.vectors[key]
        return out


class HttpEmbeddingProvider:
    """Calls a sidecar-protocol embedding service (POST /embed)."""

    def __init__(self, base_url: str, max_batch: int = 64, timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.max_batch = max_batch
        self.timeout = timeout
        self._session = requests.Session()
        health = self._session.get(f"{self.base_url}/healthz", timeout=timeout)
        health.raise_for_status()
        info = health.json()
        self.provider_id = info["provider_id"]
        self.dim = int(info["dim"])
        self.normalizes = bool(info.get("normalizes", False))

    def encode(self, sentences: Sequence[str]) -> np.ndarray:
        resp = self._session.post(
            f"{self.base_url}/embed", json={"sentences": list(sentences)}, timeout=self.timeout
        )
        resp.raise_for_status()
        payload = resp.json()
        if payload["provider_id"] != self.provider_id:
            raise ProviderError(
                f"provider identity changed mid-run: {payload['provider_id']!r} "
                f"!= {self.provider_id!r}"
            )
        vectors = np.asarray(payload["vectors"], dtype=float)
        if vectors.shape != (len(sentences), self.dim):
            raise ProviderError(f"embed response shape {vectors.shape} mismatches request")
        return vectors


def _sanitize(provider_id: str) -> str:
    return "".join(c if (c.isalnum() or c in "-_.") else "_" for c in provider_id)


class EmbeddingSession:
    """Order-preserving embed() with per-provider caching and retries.

    Disk cache layout (when cache_dir given):
    <cache_dir>/<provider_id>/<first two hash hex chars>/<hash>.npy, written
    atomically; reads are concurrent-safe, writes serialized per process.
    """

    def __init__(self, provider, cache_dir: str | Path | None = None, retries: int = 3):
        self.provider = provider
        self.retries = retries
        self._memory: dict[str, np.ndarray] = {}
        self._cache_root = None
        if cache_dir is not None:
            self._cache_root = Path(cache_dir) / _sanitize(provider.provider_id)
            self._cache_root.mkdir(parents=True, exist_ok=True)

    def _disk_path(self, key: str) -> Path:
        assert self._cache_root is not None
        return self._cache_root / key[:2] / f"{key}.npy"

    def _cache_get(self, key: str) -> np.ndarray | None:
        if key in self._memory:
            return self._memory[key]
        if self._cache_root is not None:
            path = self._disk_path(key)
            if path.is_file():
                vec = np.load(path)
                self._memory[key] = vec
                return vec
        return None

    def _cache_put(self, key: str, vec: np.ndarray) -> None:
        self._memory[key] = vec
        if self._cache_root is not None:
            path = self._disk_path(key)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".npy.tmp")
            with open(tmp, "wb") as fh:
                np.save(fh, vec)
            tmp.replace(path)

    def _encode_with_retries(self, batch: list[str]) -> np.ndarray:
        last: Exception | None = None
        for attempt in range(1, self.retries + 1):
            try:
                return self.provider.encode(batch)
            except Exception as exc:  # provider/transport failure
                last = exc
                log.warning("embed attempt %d/%d failed: %s", attempt, self.retries, exc)
                if attempt < self.retries:
                    time.sleep(min(2.0 ** (attempt - 1) * 0.1, 2.0))
        raise ProviderError(
            f"embedding failed after {self.retries} attempts: {last}"
        ) from last

    def embed(self, sentences: Sequence[str]) -> np.ndarray:
        """One vector per sentence, order-preserving; empty in, empty out."""
        keys = [sentence_hash(s) for s in sentences]
        missing: dict[str, str] = {}
        for key, s in zip(keys, sentences):
            if key not in missing and self._cache_get(key) is None:
                missing[key] = s
        if missing:
            todo = list(missing.items())
            limit = getattr(self.provider, "max_batch", 0) or len(todo)
            for start in range(0, len(todo), limit):
                chunk = todo[start : start + limit]
                vectors = self._encode_with_retries([s for _, s in chunk])
                for (key, _), vec in zip(chunk, vectors):
                    self._cache_put(key, np.asarray(vec, dtype=float))
        if not sentences:
            dim = getattr(self.provider, "dim", 0)
            return np.empty((0, dim))
        return np.stack([self._memory[k] for k in keys])


def write_embedding_csv(
    path: str | Path, provider_id: str, vectors: dict[str, np.ndarray]
) -> None:
    """Write the precomputed-embedding CSV format FileEmbeddingProvider reads."""
    dims = {len(v) for v in vectors.values()}
    if len(dims) > 1:
        raise ValueError(f"inconsistent vector dimensions: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"provider_id={provider_id},dim={dim}\n")
        for key in sorted(vectors):
            fh.write(key + "," + ",".join(repr(float(x)) for x in vectors[key]) + "\n")


def write_embedding_binary(
    path: str | Path, provider_id: str, vectors: dict[str, np.ndarray]
) -> None:
    """Write the binary embedding format FileEmbeddingProvider reads."""
    dims = {len(v) for v in vectors.values()}
    if len(dims) > 1:
        raise ValueError(f"inconsistent vector dimensions: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    pid = provider_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack(">H", len(pid)))
        fh.write(pid)
        fh.write(struct.pack(">I", dim))
        fh.write(struct.pack(">Q", len(vectors)))
        for key in sorted(vectors):
            fh.write(struct.pack(">Q", int(key, 16)))
            fh.write(np.asarray(vectors[key], dtype="<f8").tobytes())

"""Sentence-embedding similarity search and combined prompt-example selection.

The built-in embedding provider is a deterministic lexical embedder (hashed
term frequencies weighted by inverse document frequency over the corpus,
L2-normalized) so the whole pipeline runs offline; an HTTP provider can be
configured for real sentence-embedding services.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .corpus import Corpus, DeclRecord
from .keywords import KeywordIndex, extract_keywords

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")


class RetrievalError(ValueError):
    """Dimension mismatch, zero-norm vector, or provider/index mismatch."""


class RetryableProviderError(RuntimeError):
    """Transient transport failure of an external embedding provider."""


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    norm: float

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if not np.all(np.isfinite(vals)):
            raise RetrievalError("embedding contains non-finite entries")
        actual = float(np.linalg.norm(vals))
        if abs(actual - self.norm) > 1e-9:
            raise RetrievalError(f"cached norm {self.norm} does not match values (|v| = {actual})")

    @classmethod
    def of(cls, values: Sequence[float] | np.ndarray) -> "EmbeddingVector":
        vals = np.asarray(values, dtype=np.float64)
        return cls(values=vals, norm=float(np.linalg.norm(vals)))

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])


class EmbeddingProvider(Protocol):
    provider_tag: str

    def embed(self, text: str) -> EmbeddingVector: ...


def _bucket(token: str, dimension: int) -> int:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dimension


def _embed_tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass
class LexicalEmbeddingProvider:
    """Hashed TF-IDF embedder; deterministic given (corpus, dimension)."""

    dimension: int = 1024
    idf: dict[str, float] = field(default_factory=dict)
    n_docs: int = 0
    provider_tag: str = ""

    @classmethod
    def fit(cls, corpus: Corpus, dimension: int = 1024) -> "LexicalEmbeddingProvider":
        df: dict[str, int] = {}
        for rec in corpus.records:
            for tok in set(_embed_tokens(rec.docstring)):
                df[tok] = df.get(tok, 0) + 1
        n = len(corpus.records)
        idf = {tok: np.log((1.0 + n) / (1.0 + d)) + 1.0 for tok, d in df.items()}
        digest = hashlib.sha256()
        for rec in corpus.records:
            digest.update(f"{rec.id}\x1f{rec.docstring}\x1e".encode("utf-8"))
        tag = f"lexical-tfidf/1:dim={dimension}:corpus={digest.hexdigest()[:12]}"
        return cls(dimension=dimension, idf=idf, n_docs=n, provider_tag=tag)

    def _weight(self, token: str) -> float:
        default = np.log(1.0 + self.n_docs) + 1.0
        return float(self.idf.get(token, default))

    def embed(self, text: str) -> EmbeddingVector:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for tok in _embed_tokens(text):
            vec[_bucket(tok, self.dimension)] += self._weight(tok)
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec = vec / norm
        return EmbeddingVector.of(vec)


@dataclass
class HttpEmbeddingProvider:
    """POSTs {"texts": [...]} to a sentence-embedding service, expects {"vectors": [[...]]}."""

    url: str
    provider_tag: str
    auth_token: str | None = None
    timeout: float = 30.0

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        try:
            resp = requests.post(self.url, json={"texts": texts}, headers=headers, timeout=self.timeout)
        except requests.RequestException as exc:
            raise RetryableProviderError(str(exc)) from exc
        if resp.status_code >= 500 or resp.status_code == 429:
            raise RetryableProviderError(f"embedding service returned {resp.status_code}")
        resp.raise_for_status()
        return [EmbeddingVector.of(v) for v in resp.json()["vectors"]]


def embed(text: str, provider: EmbeddingProvider) -> EmbeddingVector:
    return provider.embed(text)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dimension != b.dimension:
        raise RetrievalError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if a.norm == 0.0 or b.norm == 0.0:
        raise RetrievalError("cosine undefined for zero-norm vector")
    value = float(np.dot(a.values, b.values)) / (a.norm * b.norm)
    return max(-1.0, min(1.0, value))


@dataclass(frozen=True)
class SimilarityHit:
    record_id: int
    score: float


@dataclass(frozen=True)
class EmbeddingIndex:
    record_ids: tuple[int, ...]
    matrix: np.ndarray            # one row per record, same order as record_ids
    provider_tag: str

    def __post_init__(self) -> None:
        if not self.provider_tag:
            raise RetrievalError("provider_tag must be nonempty")
        if self.matrix.shape[0] != len(self.record_ids):
            raise RetrievalError("one vector per indexed record required")

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.record_ids)


def build_embedding_index(corpus: Corpus, provider: EmbeddingProvider) -> EmbeddingIndex:
    rows = []
    ids = []
    for rec in corpus.records:
        vec = provider.embed(rec.docstring)
        rows.append(vec.values)
        ids.append(rec.id)
    dim = rows[0].shape[0] if rows else getattr(provider, "dimension", 0)
    matrix = np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.float64)
    return EmbeddingIndex(record_ids=tuple(ids), matrix=matrix, provider_tag=provider.provider_tag)


def save_embedding_index(index: EmbeddingIndex, path: str | Path) -> None:
    """Binary store: one JSON header line, then little-endian f32 rows."""
    header = {
        "dimension": index.dimension,
        "provider_tag": index.provider_tag,
        "record_ids": list(index.record_ids),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        fh.write(index.matrix.astype("<f4").tobytes())


def load_embedding_index(path: str | Path) -> EmbeddingIndex:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        raw = fh.read()
    dim = int(header["dimension"])
    ids = tuple(int(i) for i in header["record_ids"])
    expected = len(ids) * dim * 4
    if len(raw) != expected:
        raise RetrievalError(f"index payload has {len(raw)} bytes, expected {expected}")
    matrix = np.frombuffer(raw, dtype="<f4").reshape(len(ids), dim).astype(np.float64)
    return EmbeddingIndex(record_ids=ids, matrix=matrix, provider_tag=header["provider_tag"])


def top_k_similar(
    query_text: str, index: EmbeddingIndex, k: int, provider: EmbeddingProvider
) -> list[SimilarityHit]:
    """Exact scan: k highest-cosine records, ties broken by ascending record id."""
    if provider.provider_tag != index.provider_tag:
        raise RetrievalError(
            f"provider {provider.provider_tag!r} does not match index {index.provider_tag!r}"
        )
    if k <= 0 or len(index) == 0:
        return []
    query = provider.embed(query_text)
    if query.dimension != index.dimension:
        raise RetrievalError(f"dimension mismatch: {query.dimension} vs {index.dimension}")
    if query.norm == 0.0:
        raise RetrievalError("cosine undefined for zero-norm query")
    hits = []
    for row, rec_id in zip(index.matrix, index.record_ids):
        hits.append(SimilarityHit(record_id=rec_id, score=cosine(EmbeddingVector.of(row), query)))
    hits.sort(key=lambda h: (-h.score, h.record_id))
    return hits[:k]


@dataclass(frozen=True)
class RetrievalConfig:
    k_sim: int = 10
    k_kw: int = 4
    per_keyword_cap: int = 2

    def __post_init__(self) -> None:
        if self.k_sim < 0 or self.k_kw < 0:
            raise RetrievalError("k_sim and k_kw must be >= 0")
        if self.per_keyword_cap < 1:
            raise RetrievalError("per_keyword_cap must be >= 1")


_QUERY_KEYWORDS = 10   # keywords extracted from the query before round-robin


def select_examples(
    query_text: str,
    corpus: Corpus,
    index: EmbeddingIndex,
    keyword_index: KeywordIndex,
    cfg: RetrievalConfig,
    provider: EmbeddingProvider,
) -> list[DeclRecord]:
    """Keyword-sourced examples first, then similarity examples with the most
    similar record last; duplicates keep the similarity copy."""
    if len(corpus) == 0:
        return []

    sim_hits = top_k_similar(query_text, index, cfg.k_sim, provider) if cfg.k_sim else []
    sim_ids = [h.record_id for h in sim_hits]          # descending similarity
    sim_id_set = set(sim_ids)

    kw_ids: list[int] = []
    if cfg.k_kw:
        phrases = [kw.phrase for kw in extract_keywords(query_text, top_n=_QUERY_KEYWORDS)]
        postings = [list(keyword_index.lookup(p)[: cfg.per_keyword_cap]) for p in phrases]
        for round_idx in range(cfg.per_keyword_cap):
            if len(kw_ids) >= cfg.k_kw:
                break
            for posting in postings:
                if round_idx < len(posting) and posting[round_idx] not in kw_ids:
                    kw_ids.append(posting[round_idx])
                    if len(kw_ids) >= cfg.k_kw:
                        break

    kw_ids = [rid for rid in kw_ids if rid not in sim_id_set]
    ordered = kw_ids + list(reversed(sim_ids))         # most similar last
    return [corpus.record(rid) for rid in ordered]

"""Deterministic hashed-n-gram text embeddings with exact cosine top-k search,
plus token-overlap precision/recall/F-measure scoring.

The embedder lowercases, collapses whitespace, slides a character n-gram
window (default length 3) over the text, hashes each gram with FNV-1a 64
into one of `dimension` buckets, and L2-normalizes the bucket counts.
It is a stand-in with the same retrieval mechanics as a neural encoder:
any embedder honoring the same interface (and fingerprint discipline) can
be plugged in behind :class:`VectorIndex`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np


class RetrievalError(ValueError):
    pass


class BadConfig(RetrievalError):
    pass


class DimensionMismatch(RetrievalError):
    pass


class EmptyIndex(RetrievalError):
    pass


class EmbedderMismatch(RetrievalError):
    pass


class DuplicateDocId(RetrievalError):
    pass


@dataclass(frozen=True)
class DocRecord:
    id: str
    text: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.text:
            raise RetrievalError(f"document {self.id!r} has empty text")


@dataclass(frozen=True)
class EvalScores:
    precision: float
    recall: float
    f_measure: float


@dataclass(frozen=True)
class EmbedderConfig:
    dimension: int = 256
    ngram: int = 3

    def __post_init__(self):
        if self.dimension < 8:
            raise BadConfig(f"dimension {self.dimension} < 8")
        if self.ngram < 1:
            raise BadConfig(f"ngram length {self.ngram} < 1")

    @property
    def fingerprint(self):
        return f"fnv1a64/ngram={self.ngram}/dim={self.dimension}"


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _normalize_text(text: str) -> str:
    return " ".join(text.lower().split())


def embed(text: str, config: EmbedderConfig = EmbedderConfig()) -> np.ndarray:
    """Unit-norm bucket-count vector of the text's character n-grams.

    Empty or whitespace-only text embeds to the zero vector. Texts shorter
    than the n-gram length contribute themselves as a single gram.
    """
    normalized = _normalize_text(text)
    vec = np.zeros(config.dimension)
    if not normalized:
        return vec
    n = config.ngram
    if len(normalized) < n:
        grams = [normalized]
    else:
        grams = [normalized[i:i + n] for i in range(len(normalized) - n + 1)]
    for gram in grams:
        vec[_fnv1a64(gram.encode("utf-8")) % config.dimension] += 1.0
    return vec / np.linalg.norm(vec)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| |b|); zero when either vector is zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class VectorIndex:
    """Exact-scan cosine index over a document list.

    Corpora here are hundreds of documents, so a brute-force scan is both
    fast enough and trivially correct; vectors are stored unit-norm so the
    scan is one matrix-vector product.
    """

    def __init__(self, config: EmbedderConfig = EmbedderConfig()):
        self.config = config
        self.docs = []
        self._vectors = []
        self._ids = set()

    def __len__(self):
        return len(self.docs)

    @property
    def fingerprint(self):
        return self.config.fingerprint

    def add(self, docs):
        for doc in docs:
            if doc.id in self._ids:
                raise DuplicateDocId(doc.id)
            self._ids.add(doc.id)
            self.docs.append(doc)
            self._vectors.append(embed(doc.text, self.config))

    def search(self, query_text, k=2, query_fingerprint=None):
        """Top-k (DocRecord, score) by descending cosine, ties broken by
        ascending document id. k defaults to two-document retrieval."""
        if k < 1:
            raise RetrievalError(f"k must be >= 1, got {k}")
        if not self.docs:
            raise EmptyIndex("search over an empty index")
        if query_fingerprint is not None and query_fingerprint != self.fingerprint:
            raise EmbedderMismatch(
                f"query embedded under {query_fingerprint!r}, "
                f"index built under {self.fingerprint!r}")
        q = embed(query_text, self.config)
        matrix = np.vstack(self._vectors)
        scores = matrix @ q  # all vectors unit-norm or zero
        order = sorted(range(len(self.docs)),
                       key=lambda i: (-scores[i], self.docs[i].id))
        return [(self.docs[i], float(scores[i])) for i in order[:k]]


def load_corpus(text: str, config: EmbedderConfig = EmbedderConfig()) -> VectorIndex:
    """Build an index from JSON-lines of {id, text, metadata}."""
    docs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            docs.append(DocRecord(str(obj["id"]), str(obj["text"]),
                                  dict(obj.get("metadata", {}))))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise RetrievalError(f"corpus line {lineno}: {exc}") from None
    index = VectorIndex(config)
    index.add(docs)
    return index


def dump_corpus(docs) -> str:
    lines = [json.dumps({"id": d.id, "text": d.text, "metadata": d.metadata},
                        sort_keys=True)
             for d in docs]
    return "\n".join(lines) + ("\n" if lines else "")


_KIND_WORDS = {
    "FFMC_IGNITION": "ffmc ignition potential",
    "DMC": "duff moisture dmc",
    "DC_MOPUP": "drought code dc mop up",
    "ISI_SPREAD": "isi rate of spread",
    "BUI": "buildup bui",
    "FWI": "fire weather index fwi",
}


def advisor_query(kind: str, severity: str) -> str:
    """Query string used to map an alert (kind + severity) onto precaution
    documents."""
    kind_words = _KIND_WORDS.get(kind, kind.replace("_", " ").lower())
    return f"{kind_words} {severity} precaution action"


def eval_report(index: VectorIndex, items, k=2):
    """Retrieval evaluation report.

    items are {"query": ..., "reference": ...} dicts; each entry of the
    report carries the top hit's cosine, the retrieved ids, and the
    P/R/F of the top hit's text against the reference.
    """
    report = []
    for item in items:
        hits = index.search(item["query"], k=k)
        top_doc, top_score = hits[0]
        scores = prf_scores(top_doc.text, item["reference"])
        report.append({
            "query": item["query"],
            "top_id": top_doc.id,
            "cosine": top_score,
            "retrieved": [d.id for d, _ in hits],
            "precision": scores.precision,
            "recall": scores.recall,
            "f": scores.f_measure,
        })
    return report


_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def _tokens(text: str):
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def prf_scores(response: str, reference: str) -> EvalScores:
    """Unigram multiset-overlap precision/recall/F against a reference text.

    Both empty -> (1, 1, 1); exactly one empty -> (0, 0, 0).
    """
    resp = _tokens(response)
    ref = _tokens(reference)
    if not resp and not ref:
        return EvalScores(1.0, 1.0, 1.0)
    if not resp or not ref:
        return EvalScores(0.0, 0.0, 0.0)
    counts = {}
    for t in ref:
        counts[t] = counts.get(t, 0) + 1
    overlap = 0
    for t in resp:
        if counts.get(t, 0) > 0:
            counts[t] -= 1
            overlap += 1
    precision = overlap / len(resp)
    recall = overlap / len(ref)
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvalScores(precision, recall, f)

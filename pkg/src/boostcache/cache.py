"""Per-class, capacity-bounded, entropy-prioritized key-value store and retrieval kernels.

The cache keeps at most ``capacity_k`` entries per class. A new entry evicts
the worst incumbent of its class only when its entropy is strictly lower;
ties keep the incumbent, and among equally-bad incumbents the newest one is
evicted, so the surviving contents of each class are exactly the k smallest
offers by (entropy, arrival order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import scale_affinity
from .errors import ConfigError, DimError, EmptyCache, LabelError

HISTORICAL = "historical"
BOOSTING = "boosting"

CLASS_BALANCE = "class_balance"
NORMALIZED = "normalized"


@dataclass(frozen=True)
class CacheEntry:
    """One cached (embedding, pseudo-label) pair with its selection metadata.

    ``seq`` is a monotone event counter assigned at offer time; retrieval sums
    entries in ascending seq order so floating-point output is reproducible.
    """

    embedding: np.ndarray
    pseudo_label: int
    entropy: float
    provenance: str
    seq: int

    def __post_init__(self):
        emb = np.array(self.embedding, dtype=np.float64)  # private copy, never mutated
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)
        if self.provenance not in (HISTORICAL, BOOSTING):
            raise ConfigError(f"unknown provenance {self.provenance!r}")
        if self.entropy < 0:
            raise ConfigError(f"entropy must be nonnegative, got {self.entropy}")


@dataclass(frozen=True)
class InsertOutcome:
    """Result of offering an entry: inserted, replaced (with evicted seq), or rejected."""

    kind: str
    evicted_seq: int | None = None

    INSERTED = "inserted"
    REPLACED = "replaced"
    REJECTED = "rejected"


class BoostCache:
    """Per-class store of the lowest-entropy entries seen so far."""

    def __init__(self, n_classes: int, capacity_k: int):
        if n_classes < 1:
            raise ConfigError(f"need at least one class, got {n_classes}")
        if capacity_k < 1:
            raise ConfigError(f"capacity must be >= 1, got {capacity_k}")
        self.n_classes = n_classes
        self.capacity_k = capacity_k
        self.per_class: list[list[CacheEntry]] = [[] for _ in range(n_classes)]
        self.k_t = 0  # stored historical entries
        self.k_b = 0  # stored boosting entries
        self._next_seq = 0

    def __len__(self) -> int:
        return self.k_t + self.k_b

    def stamp(self) -> int:
        """Allocate the next monotone sequence number."""
        seq = self._next_seq
        self._next_seq += 1
        return seq

    def insert(self, entry: CacheEntry) -> InsertOutcome:
        """Offer an entry to its class bucket under the entropy-priority policy."""
        if not 0 <= entry.pseudo_label < self.n_classes:
            raise LabelError(f"label {entry.pseudo_label} outside [0, {self.n_classes})")
        self._next_seq = max(self._next_seq, entry.seq + 1)
        bucket = self.per_class[entry.pseudo_label]
        if len(bucket) < self.capacity_k:
            bucket.append(entry)
            self._count(entry.provenance, +1)
            return InsertOutcome(InsertOutcome.INSERTED)
        # Full bucket: evict the worst incumbent, newest among equals, only on
        # a strict entropy improvement.
        worst = max(range(len(bucket)), key=lambda i: (bucket[i].entropy, bucket[i].seq))
        if entry.entropy < bucket[worst].entropy:
            evicted = bucket[worst]
            bucket[worst] = entry
            self._count(evicted.provenance, -1)
            self._count(entry.provenance, +1)
            return InsertOutcome(InsertOutcome.REPLACED, evicted.seq)
        return InsertOutcome(InsertOutcome.REJECTED)

    def _count(self, provenance: str, delta: int) -> None:
        if provenance == HISTORICAL:
            self.k_t += delta
        else:
            self.k_b += delta

    def entries(self) -> list[CacheEntry]:
        """All stored entries in ascending seq order (the canonical summation order)."""
        flat = [e for bucket in self.per_class for e in bucket]
        flat.sort(key=lambda e: e.seq)
        return flat

    def snapshot(self) -> "BoostCache":
        """Independent copy: mutations of the copy never affect the original.

        Entries are immutable (frozen, read-only arrays), so copying the bucket
        lists is as deep as a copy needs to be.
        """
        dup = BoostCache(self.n_classes, self.capacity_k)
        dup.per_class = [list(bucket) for bucket in self.per_class]
        dup.k_t = self.k_t
        dup.k_b = self.k_b
        dup._next_seq = self._next_seq
        return dup


def affinity_logits(entries: list[CacheEntry], query: np.ndarray, alpha: float,
                    beta: float, n_classes: int) -> np.ndarray:
    """Sum of A(dot(entry, query)) one-hot contributions over the given entries.

    Entries must already be in ascending seq order. An empty list yields the
    zero vector.
    """
    logits = np.zeros(n_classes, dtype=np.float64)
    if not entries:
        # validate the scaling parameters even when there is nothing to sum
        scale_affinity(0.0, alpha, beta)
        return logits
    query = np.asarray(query, dtype=np.float64)
    mat = np.stack([e.embedding for e in entries])
    if mat.shape[1] != query.shape[0]:
        raise DimError(f"cache entries have dim {mat.shape[1]}, query has dim {query.shape[0]}")
    sims = mat @ query
    weights = scale_affinity(sims, alpha, beta)
    labels = np.fromiter((e.pseudo_label for e in entries), dtype=np.int64, count=len(entries))
    for c in range(n_classes):
        mask = labels == c
        if mask.any():
            logits[c] = weights[mask].sum()
    return logits


def cache_logits(cache: BoostCache, query: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Cache-classifier logits for one query: scaled-affinity vote of all stored entries."""
    return affinity_logits(cache.entries(), query, alpha, beta, cache.n_classes)


def weighted_cache_logits(entries: list[CacheEntry], query: np.ndarray, mode: str,
                          n_classes: int | None = None) -> np.ndarray:
    """Instance-wise weighted vote: sum_i a_i * dot(x_i, query) * onehot(y_i).

    ``class_balance`` sets a_i = 1 / (count of entries sharing y_i);
    ``normalized`` sets a common a_i = 1 / (sum of all dots to the query).
    When n_classes is omitted it is inferred as max label + 1.
    """
    if not entries:
        raise EmptyCache("weighted retrieval needs at least one entry")
    if mode not in (CLASS_BALANCE, NORMALIZED):
        raise ConfigError(f"unknown weighting mode {mode!r}")
    query = np.asarray(query, dtype=np.float64)
    mat = np.stack([e.embedding for e in entries])
    if mat.shape[1] != query.shape[0]:
        raise DimError(f"cache entries have dim {mat.shape[1]}, query has dim {query.shape[0]}")
    sims = mat @ query
    labels = np.fromiter((e.pseudo_label for e in entries), dtype=np.int64, count=len(entries))
    if n_classes is None:
        n_classes = int(labels.max()) + 1
    elif int(labels.max()) >= n_classes:
        raise LabelError(f"entry label {int(labels.max())} outside [0, {n_classes})")
    logits = np.zeros(n_classes, dtype=np.float64)
    if mode == CLASS_BALANCE:
        counts = np.bincount(labels, minlength=n_classes)
        for c in range(n_classes):
            mask = labels == c
            if mask.any():
                logits[c] = sims[mask].sum() / counts[c]
    else:
        denom = float(sims.sum())
        if denom == 0.0:
            raise ConfigError("normalized mode is undefined when similarities sum to zero")
        for c in range(n_classes):
            mask = labels == c
            if mask.any():
                logits[c] = sims[mask].sum() / denom
    return logits

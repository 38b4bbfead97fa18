"""Per-sample adaptation algorithm and the streaming evaluation loop.

The online protocol is batch size 1: records are processed strictly in order
against a single persistent cache of confident historical samples. Each
record may additionally contribute short-lived "boosting" entries, built from
its lowest-entropy augmented views; those enter a throwaway copy of the cache,
influence only this record's prediction, and are then discarded.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .cache import BOOSTING, HISTORICAL, BoostCache, CacheEntry, InsertOutcome, affinity_logits, cache_logits
from .core import ClassBank, clip_logits, entropy, softmax
from .errors import BoostError, ConfigError, DimError, EmptyStream, LabelError

MODE_BOOSTADAPTER = "boostadapter"
MODE_HISTORICAL = "historical-only"
MODE_BOOSTING = "boosting-only"
MODE_CLIP = "clip-only"
MODES = (MODE_BOOSTADAPTER, MODE_HISTORICAL, MODE_BOOSTING, MODE_CLIP)

CACHE_JOINT = "joint"
CACHE_INDEPENDENT = "independent"
CACHE_MODES = (CACHE_JOINT, CACHE_INDEPENDENT)


@dataclass(frozen=True)
class StreamRecord:
    """One test event: the original embedding, V augmented-view embeddings, optional truth."""

    original: np.ndarray
    views: np.ndarray
    truth: int | None
    id: int

    def __post_init__(self):
        orig = np.asarray(self.original, dtype=np.float64)
        views = np.asarray(self.views, dtype=np.float64)
        if views.size == 0:
            views = views.reshape(0, orig.shape[0])
        object.__setattr__(self, "original", orig)
        object.__setattr__(self, "views", views)
        if orig.ndim != 1:
            raise DimError(f"original embedding must be 1-D, got shape {orig.shape}")
        if views.ndim != 2 or views.shape[1] != orig.shape[0]:
            raise DimError(f"views must be (V, {orig.shape[0]}), got shape {views.shape}")


@dataclass(frozen=True)
class RunConfig:
    """Tunable knobs of one evaluation run.

    alpha/beta shape the affinity scaling; temperature divides logits before
    the softmax used for entropies; percentile_p is the fraction of views kept
    by the entropy filter; clip_scale is the weight of the zero-shot term in
    the final blend; entropy_gate_rho gates historical inserts at
    rho * ln(N) (1.0 disables the gate).
    """

    alpha: float = 2.0
    beta: float = 5.0
    temperature: float = 0.01
    percentile_p: float = 0.1
    capacity_k: int = 3
    clip_scale: float = 100.0
    mode: str = MODE_BOOSTADAPTER
    cache_mode: str = CACHE_JOINT
    consistency_filter: bool = False
    entropy_gate_rho: float = 1.0
    insert_after: bool = False
    per_sample: bool = False

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0:
            raise ConfigError(f"beta must be nonnegative, got {self.beta}")
        if self.temperature <= 0:
            raise ConfigError(f"temperature must be positive, got {self.temperature}")
        if not 0 < self.percentile_p <= 1:
            raise ConfigError(f"percentile must lie in (0, 1], got {self.percentile_p}")
        if self.capacity_k < 1:
            raise ConfigError(f"capacity must be >= 1, got {self.capacity_k}")
        if not 0 < self.entropy_gate_rho <= 1:
            raise ConfigError(f"entropy gate must lie in (0, 1], got {self.entropy_gate_rho}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.cache_mode not in CACHE_MODES:
            raise ConfigError(f"unknown cache mode {self.cache_mode!r}, expected one of {CACHE_MODES}")

    @property
    def uses_historical(self) -> bool:
        return self.mode in (MODE_BOOSTADAPTER, MODE_HISTORICAL)

    @property
    def uses_boosting(self) -> bool:
        return self.mode in (MODE_BOOSTADAPTER, MODE_BOOSTING)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "temperature": self.temperature,
            "percentile_p": self.percentile_p,
            "capacity_k": self.capacity_k,
            "clip_scale": self.clip_scale,
            "mode": self.mode,
            "cache_mode": self.cache_mode,
            "consistency_filter": self.consistency_filter,
            "entropy_gate_rho": self.entropy_gate_rho,
            "insert_after": self.insert_after,
        }


@dataclass(frozen=True)
class SamplePrediction:
    """Outcome of one record: blended logits, argmax class, and bookkeeping."""

    final_logits: np.ndarray
    predicted: int
    clip_entropy: float
    n_boosting_used: int
    cache_outcome: InsertOutcome | None


@dataclass
class MetricsReport:
    """Aggregate results of a stream run.

    top1 is None when no record carried a truth label; per-class slots are
    None for classes never seen with truth.
    """

    top1: float | None
    n: int
    per_class: list[float | None]
    config: dict
    wall_time_s: float
    per_sample: list[dict] | None = None

    def to_json_dict(self) -> dict:
        out = {
            "top1": self.top1,
            "n": self.n,
            "per_class": self.per_class,
            "config": self.config,
            "wall_time_s": self.wall_time_s,
        }
        if self.per_sample is not None:
            out["per_sample"] = self.per_sample
        return out


def filter_views(view_entropies, p: float) -> list[int]:
    """Indices of the m = max(1, floor(p * V)) lowest-entropy views.

    Returned in ascending entropy order, ties by ascending index; empty input
    yields an empty list.
    """
    if not 0 < p <= 1:
        raise ConfigError(f"percentile must lie in (0, 1], got {p}")
    ent = np.asarray(view_entropies, dtype=np.float64)
    v = ent.shape[0]
    if v == 0:
        return []
    m = max(1, math.floor(p * v))
    order = np.argsort(ent, kind="stable")
    return [int(i) for i in order[:m]]


def pseudo_label(z) -> int:
    """Argmax class of a logit vector, ties broken by lowest index."""
    return int(np.argmax(np.asarray(z)))


def consistency_keep(view_clip_label: int, view_cache_label: int | None) -> bool:
    """True when the zero-shot and cache predictions agree.

    A None cache label means the cache was empty, in which case the filter is
    vacuous and everything is kept.
    """
    if view_cache_label is None:
        return True
    return view_clip_label == view_cache_label


def predict_sample(state: BoostCache, bank: ClassBank, rec: StreamRecord,
                   cfg: RunConfig) -> SamplePrediction:
    """Process one record: update the persistent cache, blend zero-shot and cache logits.

    Order of operations: zero-shot logits and entropy of the original come
    first; the historical insert (entropy gated) happens before the prediction
    unless cfg.insert_after; boosting views are filtered, pseudo-labeled, and
    inserted into a throwaway copy of the cache; the final logits blend
    clip_scale * zero-shot with the cache vote on the original embedding.
    """
    n = bank.n_classes
    z0 = clip_logits(rec.original, bank)
    e0 = entropy(softmax(z0, cfg.temperature))
    y0 = pseudo_label(z0)

    outcome: InsertOutcome | None = None

    def offer_historical() -> InsertOutcome | None:
        if not cfg.uses_historical:
            return None
        if e0 > cfg.entropy_gate_rho * math.log(n):
            return None
        entry = CacheEntry(rec.original, y0, e0, HISTORICAL, state.stamp())
        return state.insert(entry)

    if not cfg.insert_after:
        outcome = offer_historical()

    # (view index, pseudo-label, entropy) triples that survived both filters
    boost_views: list[tuple[int, int, float]] = []
    if cfg.uses_boosting and rec.views.shape[0] > 0:
        if rec.views.shape[1] != bank.c_dim:
            raise DimError(f"views have dim {rec.views.shape[1]}, bank expects {bank.c_dim}")
        view_logits = rec.views @ bank.weights.T
        view_entropies = [entropy(softmax(view_logits[j], cfg.temperature))
                          for j in range(rec.views.shape[0])]
        kept = filter_views(view_entropies, cfg.percentile_p)
        if cfg.consistency_filter:
            cache_nonempty = len(state) > 0
            filtered = []
            for j in kept:
                if cache_nonempty:
                    cache_label = pseudo_label(cache_logits(state, rec.views[j], cfg.alpha, cfg.beta))
                else:
                    cache_label = None
                if consistency_keep(pseudo_label(view_logits[j]), cache_label):
                    filtered.append(j)
            kept = filtered
        boost_views = [(j, pseudo_label(view_logits[j]), view_entropies[j]) for j in kept]

    # Build the prediction-time entry set. Boosting entries live only here.
    n_used = 0
    if not boost_views:
        pred_entries = state.entries()
    else:
        if cfg.cache_mode == CACHE_JOINT:
            scratch = state.snapshot()
        else:
            scratch = BoostCache(n, cfg.capacity_k)
            scratch._next_seq = state._next_seq
        for j, label, ent in boost_views:
            result = scratch.insert(CacheEntry(rec.views[j], label, ent, BOOSTING, scratch.stamp()))
            if result.kind != InsertOutcome.REJECTED:
                n_used += 1
        if cfg.cache_mode == CACHE_JOINT:
            pred_entries = scratch.entries()
        else:
            pred_entries = state.entries() + scratch.entries()
            pred_entries.sort(key=lambda e: e.seq)

    if cfg.mode == MODE_CLIP:
        cache_term = np.zeros(n, dtype=np.float64)
    else:
        cache_term = affinity_logits(pred_entries, rec.original, cfg.alpha, cfg.beta, n)
    final_logits = cfg.clip_scale * z0 + cache_term
    predicted = pseudo_label(final_logits)

    if cfg.insert_after:
        outcome = offer_historical()

    return SamplePrediction(final_logits, predicted, e0, n_used, outcome)


def run_stream(records, bank: ClassBank, cfg: RunConfig) -> MetricsReport:
    """Evaluate a record sequence online with a single persistent cache.

    Accumulates top-1 accuracy over records carrying truth labels. Any record
    error aborts the run, naming the offending record id.
    """
    start = time.perf_counter()
    state = BoostCache(bank.n_classes, cfg.capacity_k)
    n_total = 0
    n_labeled = 0
    n_correct = 0
    class_seen = np.zeros(bank.n_classes, dtype=np.int64)
    class_correct = np.zeros(bank.n_classes, dtype=np.int64)
    rows: list[dict] | None = [] if cfg.per_sample else None

    for rec in records:
        try:
            pred = predict_sample(state, bank, rec, cfg)
        except BoostError as err:
            raise type(err)(f"record {rec.id}: {err}") from err
        n_total += 1
        if rec.truth is not None:
            if not 0 <= rec.truth < bank.n_classes:
                raise LabelError(f"record {rec.id}: truth label {rec.truth} outside [0, {bank.n_classes})")
            n_labeled += 1
            class_seen[rec.truth] += 1
            if pred.predicted == rec.truth:
                n_correct += 1
                class_correct[rec.truth] += 1
        if rows is not None:
            rows.append({
                "id": rec.id,
                "pred": pred.predicted,
                "truth": rec.truth,
                "clip_entropy": pred.clip_entropy,
                "n_boost": pred.n_boosting_used,
                "outcome": pred.cache_outcome.kind if pred.cache_outcome else None,
            })

    if n_total == 0:
        raise EmptyStream("stream contains no records")

    top1 = n_correct / n_labeled if n_labeled else None
    per_class = [
        (class_correct[c] / class_seen[c]) if class_seen[c] else None
        for c in range(bank.n_classes)
    ]
    return MetricsReport(
        top1=top1,
        n=n_total,
        per_class=per_class,
        config=cfg.to_dict(),
        wall_time_s=time.perf_counter() - start,
        per_sample=rows,
    )

"""Pure numerical kernels: normalization, cosine logits, tempered softmax, entropy, affinity scaling.

Everything here is a stateless function of its inputs, safe to call from any
number of threads. Embeddings are 1-D float64 arrays of shared dimension C;
logit vectors have one slot per class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimError, InvalidVector

# Probabilities at or below this floor contribute zero to the entropy sum,
# so saturated softmax outputs never produce 0 * log(0) = NaN.
ENTROPY_FLOOR = 1e-12

# Tolerance for the unit-norm invariant on bank rows and embeddings.
UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class ClassBank:
    """Per-class reference embeddings: an (N, C) matrix of unit rows plus display names."""

    weights: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "names", tuple(self.names))
        if w.ndim != 2:
            raise ConfigError(f"bank weights must be 2-D, got shape {w.shape}")
        n, c = w.shape
        if n < 2:
            raise ConfigError(f"bank needs at least 2 classes, got {n}")
        if c < 1:
            raise ConfigError("bank feature dimension must be >= 1")
        if len(self.names) != n:
            raise ConfigError(f"bank has {n} rows but {len(self.names)} names")
        if not np.all(np.isfinite(w)):
            raise InvalidVector("bank weights contain non-finite values")
        norms = np.linalg.norm(w, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise InvalidVector(f"bank rows must be unit-norm within {UNIT_NORM_TOL}, worst deviation {worst:.3e}")

    @classmethod
    def from_rows(cls, rows, names) -> "ClassBank":
        """Build a bank from arbitrary finite rows, normalizing each to unit length."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ConfigError(f"bank rows must be 2-D, got shape {rows.shape}")
        return cls(np.stack([normalize(r) for r in rows]), tuple(names))

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def c_dim(self) -> int:
        return self.weights.shape[1]


def normalize(v) -> np.ndarray:
    """Project a raw vector onto the unit sphere.

    Idempotent on vectors that are already unit-norm. Raises InvalidVector for
    zero-norm or non-finite input.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise InvalidVector(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidVector("vector contains non-finite values")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise InvalidVector("cannot normalize a zero vector")
    return v / norm


def clip_logits(e: np.ndarray, bank: ClassBank) -> np.ndarray:
    """Cosine similarity of one embedding against every bank row.

    For unit inputs every output lies in [-1, 1] up to float fuzz.
    """
    e = np.asarray(e, dtype=np.float64)
    if e.ndim != 1 or e.shape[0] != bank.c_dim:
        raise DimError(f"embedding has shape {e.shape}, bank expects ({bank.c_dim},)")
    return bank.weights @ e


def softmax(z, T: float) -> np.ndarray:
    """Tempered softmax with max-subtraction for stability.

    p_i = exp(z_i / T) / sum_j exp(z_j / T). T must be positive; the default
    elsewhere in the package is 0.01, matching a logit scale of 100.
    """
    if T <= 0:
        raise ConfigError(f"temperature must be positive, got {T}")
    z = np.asarray(z, dtype=np.float64) / T
    z = z - np.max(z)
    e = np.exp(z)
    return e / e.sum()


def entropy(p) -> float:
    """Shannon entropy in nats, with p <= 1e-12 contributing zero.

    Expects a probability vector (nonnegative, summing to 1 within 1e-6);
    output lies in [0, ln N].
    """
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < -1e-9):
        raise InvalidVector("probability vector has a negative entry")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise InvalidVector(f"probability vector sums to {total}, not 1")
    safe = np.maximum(p, ENTROPY_FLOOR)
    terms = np.where(p > ENTROPY_FLOOR, -p * np.log(safe), 0.0)
    return float(terms.sum())


def scale_affinity(z, alpha: float, beta: float):
    """Affinity scaling A(z) = alpha * exp(-beta * (1 - z)).

    Strictly increasing in z for beta > 0, with A(1) = alpha. Accepts a scalar
    or an array of similarities; returns the matching shape.
    """
    if alpha <= 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    if beta < 0:
        raise ConfigError(f"beta must be nonnegative, got {beta}")
    z = np.asarray(z, dtype=np.float64)
    out = alpha * np.exp(-beta * (1.0 - z))
    if out.ndim == 0:
        return float(out)
    return out

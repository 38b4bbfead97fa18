"""Training-free test-time adaptation with an entropy-prioritized boosting cache.

The package blends zero-shot cosine logits with a key-value cache vote built
from two entry kinds: persistent low-entropy historical samples from the test
stream and per-sample boosting entries distilled from confident augmented
views. File formats, a CLI, and synthetic experiments that validate the
mechanism are included.
"""

from .cache import (BOOSTING, CLASS_BALANCE, HISTORICAL, NORMALIZED, BoostCache, CacheEntry,
                    InsertOutcome, affinity_logits, cache_logits, weighted_cache_logits)
from .core import ClassBank, clip_logits, entropy, normalize, scale_affinity, softmax
from .errors import (BoostError, ConfigError, DimError, DivergenceError, EmptyCache,
                     EmptyStream, FormatError, InvalidVector, IoError, LabelError,
                     TruncationError, VersionError)
from .pipeline import (MODE_BOOSTADAPTER, MODE_BOOSTING, MODE_CLIP, MODE_HISTORICAL,
                       MetricsReport, RunConfig, SamplePrediction, StreamRecord,
                       consistency_keep, filter_views, predict_sample, pseudo_label,
                       run_stream)
from .stream_io import (StreamHeader, read_class_bank, read_header, read_stream,
                        write_class_bank, write_report, write_stream)
from .theory import (ClusterSpec, LinearClassifier, ShiftStream, ShiftStreamSpec,
                     bound_experiment, ce_loss_grad, cluster_centers, default_shift_spec,
                     excess_error, gen_clusters, make_shift_stream, prop1_agreement,
                     train_linear_ce)

__version__ = "0.1.0"

__all__ = [
    "BOOSTING", "CLASS_BALANCE", "HISTORICAL", "NORMALIZED",
    "BoostCache", "CacheEntry", "InsertOutcome", "affinity_logits", "cache_logits",
    "weighted_cache_logits",
    "ClassBank", "clip_logits", "entropy", "normalize", "scale_affinity", "softmax",
    "BoostError", "ConfigError", "DimError", "DivergenceError", "EmptyCache",
    "EmptyStream", "FormatError", "InvalidVector", "IoError", "LabelError",
    "TruncationError", "VersionError",
    "MODE_BOOSTADAPTER", "MODE_BOOSTING", "MODE_CLIP", "MODE_HISTORICAL",
    "MetricsReport", "RunConfig", "SamplePrediction", "StreamRecord",
    "consistency_keep", "filter_views", "predict_sample", "pseudo_label", "run_stream",
    "StreamHeader", "read_class_bank", "read_header", "read_stream",
    "write_class_bank", "write_report", "write_stream",
    "ClusterSpec", "LinearClassifier", "ShiftStream", "ShiftStreamSpec",
    "bound_experiment", "ce_loss_grad", "cluster_centers", "default_shift_spec",
    "excess_error", "gen_clusters", "make_shift_stream", "prop1_agreement",
    "train_linear_ce",
    "__version__",
]

"""Cache vote vs gradient descent on well-clustered data.

On near-orthogonal clusters, a class-balanced weighted cache vote over the
training set predicts the same argmax as a linear classifier trained with
full-batch gradient descent on cross-entropy. With zero noise both collapse
to nearest-center and must agree on every point.
"""

import numpy as np

from boostcache import (CLASS_BALANCE, HISTORICAL, CacheEntry, ClusterSpec,
                        cluster_centers, gen_clusters, prop1_agreement,
                        train_linear_ce, weighted_cache_logits)

spec = ClusterSpec()  # 3 classes, 16 dims, sigma 0.05
x_train, y_train = gen_clusters(spec, 100)
clf = train_linear_ce(x_train, y_train, steps=500, lr=0.5, n_classes=spec.n_classes)
print(f"GD training: {len(clf.loss_history)} steps, "
      f"loss {clf.loss_history[0]:.4f} -> {clf.loss_history[-1]:.4f}")
print(f"train accuracy: {np.mean(clf.predict(x_train) == y_train):.4f}")

# The cache side: every training point becomes an entry; the vote averages
# per-class dot products.
entries = [CacheEntry(x_train[i], int(y_train[i]), 0.0, HISTORICAL, i)
           for i in range(len(y_train))]
probe = cluster_centers(spec)[1] + 0.03  # near class 1's center
probe /= np.linalg.norm(probe)
vote = weighted_cache_logits(entries, probe, CLASS_BALANCE, n_classes=spec.n_classes)
print(f"\nprobe vote per class: {np.round(vote, 4)}")
print(f"cache argmax {int(np.argmax(vote))}, GD argmax {int(clf.predict(probe)[0])}")

print(f"\nagreement on 1000 fresh draws:     {prop1_agreement(spec):.4f}")
print(f"agreement with sigma = 0 (exact):  "
      f"{prop1_agreement(ClusterSpec(sigma=0.0)):.4f}")

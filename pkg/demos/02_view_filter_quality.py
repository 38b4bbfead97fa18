"""Why the entropy filter works: kept views sit closer to the class center.

Each record's augmented views redraw part of its noise at a per-view radius.
Low-entropy views are usually the small-radius ones, so filtering by entropy
concentrates the kept population near the clean class point. This script
measures that directly: cosine to the true class center and pseudo-label
accuracy, for all views vs the kept 10%.
"""

from dataclasses import replace

import numpy as np

from boostcache import (ClusterSpec, cluster_centers, default_shift_spec, entropy,
                        filter_views, make_shift_stream, pseudo_label, softmax)

spec = default_shift_spec()
stream = make_shift_stream(spec)
centers = cluster_centers(replace(spec.base, seed=spec.seed))

stats = {"all_cos": [], "kept_cos": [], "all_acc": [], "kept_acc": []}
for rec, z in zip(stream.records, stream.bayes_labels):
    view_logits = rec.views @ stream.bank.weights.T
    ents = [entropy(softmax(row, 0.01)) for row in view_logits]
    kept = filter_views(ents, 0.1)
    cos = rec.views @ centers[z]
    labels = [pseudo_label(row) for row in view_logits]
    stats["all_cos"].append(float(np.mean(cos)))
    stats["kept_cos"].append(float(np.mean(cos[kept])))
    stats["all_acc"].append(float(np.mean([lab == z for lab in labels])))
    stats["kept_acc"].append(float(np.mean([labels[j] == z for j in kept])))

print(f"{len(stream.records)} records, {spec.views} views each, keep top "
      f"{int(0.1 * spec.views)} by entropy")
print()
print(f"{'population':<12} {'cos to center':>14} {'label accuracy':>15}")
print(f"{'all views':<12} {np.mean(stats['all_cos']):>14.4f} {np.mean(stats['all_acc']):>15.4f}")
print(f"{'kept views':<12} {np.mean(stats['kept_cos']):>14.4f} {np.mean(stats['kept_acc']):>15.4f}")

# The same filter on the no-advantage control (r_b = r_t) has nothing to find:
control = make_shift_stream(replace(spec, r_b=spec.r_t))
acc_all, acc_kept = [], []
for rec, z in zip(control.records, control.bayes_labels):
    view_logits = rec.views @ control.bank.weights.T
    ents = [entropy(softmax(row, 0.01)) for row in view_logits]
    kept = filter_views(ents, 0.1)
    labels = [pseudo_label(row) for row in view_logits]
    acc_all.append(float(np.mean([lab == z for lab in labels])))
    acc_kept.append(float(np.mean([labels[j] == z for j in kept])))
print()
print("control with r_b = r_t (views no cleaner than the sample):")
print(f"{'all views':<12} {'':>14} {np.mean(acc_all):>15.4f}")
print(f"{'kept views':<12} {'':>14} {np.mean(acc_kept):>15.4f}")

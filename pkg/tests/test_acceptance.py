"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line on the real stdout (visible under
pytest capture) with the measured quantity and its runtime against the budget.
The tolerances and budgets here are the package's acceptance contract; do not
loosen them to make a failure go away.
"""

import json
import math
import time
from dataclasses import replace

import numpy as np

from boostcache import (MODE_BOOSTADAPTER, MODE_CLIP, MODE_HISTORICAL, BoostCache,
                        CacheEntry, ClassBank, ClusterSpec, RunConfig, ShiftStreamSpec,
                        StreamRecord, affinity_logits, bound_experiment, ce_loss_grad,
                        cluster_centers, default_shift_spec, filter_views, gen_clusters,
                        make_shift_stream, normalize, predict_sample, prop1_agreement,
                        read_stream, run_stream, write_stream)
from boostcache.cache import HISTORICAL
from boostcache.cli import main as cli_main

import pytest


@pytest.fixture
def verdict(capfd):
    """Print one PASS/FAIL line on the real terminal, bypassing pytest capture."""

    def announce(tag: str, ok: bool, detail: str, elapsed: float, budget: float) -> None:
        status = "PASS" if ok else "FAIL"
        line = f"[{tag}] {status}: {detail} ({elapsed:.2f}s / budget {budget:.0f}s)"
        with capfd.disabled():
            print(line, flush=True)

    return announce


def test_p01_zero_boost_reduction_is_bitwise(verdict):
    """Adaptation with zero boosting views must equal the historical-only rule bit for bit."""
    budget = 5.0
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    identical = 0
    trials = 1000
    for _ in range(trials):
        n = int(rng.integers(2, 17))
        c = int(rng.integers(2, 33))
        k = int(rng.integers(1, 5))
        bank = ClassBank.from_rows(rng.standard_normal((n, c)),
                                   [f"c{i}" for i in range(n)])
        base = BoostCache(n, k)
        for _ in range(int(rng.integers(0, 49))):
            base.insert(CacheEntry(normalize(rng.standard_normal(c)),
                                   int(rng.integers(0, n)), float(rng.random()),
                                   HISTORICAL, base.stamp()))
        rec = StreamRecord(original=normalize(rng.standard_normal(c)),
                           views=np.zeros((0, c)), truth=None, id=0)
        temp = float(rng.choice([0.01, 0.5, 1.0]))
        preds = []
        for mode in (MODE_BOOSTADAPTER, MODE_HISTORICAL):
            cfg = RunConfig(mode=mode, temperature=temp, capacity_k=k)
            preds.append(predict_sample(base.snapshot(), bank, rec, cfg))
        if (np.array_equal(preds[0].final_logits, preds[1].final_logits)
                and preds[0].predicted == preds[1].predicted):
            identical += 1
    elapsed = time.perf_counter() - start
    ok = identical == trials and elapsed < budget
    verdict("P01 zero-boost == historical, bitwise", ok,
             f"{identical}/{trials} identical", elapsed, budget)
    assert identical == trials
    assert elapsed < budget


def test_p02_retrieval_matches_scalar_loop(verdict):
    """Vectorized cache readout must match a scalar-loop reimplementation within 1e-5."""
    budget = 5.0
    start = time.perf_counter()
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(1000):
        c = int(rng.integers(2, 24))
        n = int(rng.integers(2, 9))
        size = int(rng.integers(0, 49))
        entries = [CacheEntry(normalize(rng.standard_normal(c)), int(rng.integers(0, n)),
                              float(rng.random()), HISTORICAL, i)
                   for i in range(size)]
        q = normalize(rng.standard_normal(c))
        alpha = float(rng.random() * 3 + 0.05)
        beta = float(rng.random() * 9)
        got = affinity_logits(entries, q, alpha, beta, n_classes=n)
        expect = [0.0] * n
        for e in entries:
            dot = sum(float(a) * float(b) for a, b in zip(e.embedding, q))
            expect[e.pseudo_label] += alpha * math.exp(-beta * (1.0 - dot))
        worst = max(worst, float(np.max(np.abs(got - np.asarray(expect)))) if n else 0.0)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and elapsed < budget
    verdict("P02 retrieval vs scalar loop", ok, f"worst |diff| {worst:.3e} <= 1e-5",
             elapsed, budget)
    assert worst <= 1e-5
    assert elapsed < budget


def test_p03_eviction_keeps_k_smallest(verdict):
    """Cache survivors must equal the k lexicographically smallest (entropy, arrival) offers."""
    budget = 10.0
    start = time.perf_counter()
    rng = np.random.default_rng(103)
    failures = 0
    trials = 1000
    for trial in range(trials):
        n_classes = int(rng.integers(1, 7))
        k = int(rng.choice([1, 3, 8]))
        cache = BoostCache(n_classes, k)
        offered = []
        for _ in range(int(rng.integers(0, 201))):
            label = int(rng.integers(0, n_classes))
            # half the entropies land on a coarse grid so exact ties are common
            if rng.random() < 0.5:
                ent = float(rng.integers(0, 4)) / 4.0
            else:
                ent = float(rng.random())
            entry = CacheEntry(np.array([1.0, 0.0]), label, ent, HISTORICAL, cache.stamp())
            cache.insert(entry)
            offered.append(entry)
        for label in range(n_classes):
            pool = sorted(((e.entropy, e.seq) for e in offered if e.pseudo_label == label))
            expect = sorted(seq for _, seq in pool[:k])
            got = sorted(e.seq for e in cache.entries() if e.pseudo_label == label)
            if got != expect:
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < budget
    verdict("P03 eviction == k-smallest oracle", ok,
             f"{trials - failures}/{trials} sequences exact", elapsed, budget)
    assert failures == 0
    assert elapsed < budget


def test_p04_view_filter_contract(verdict):
    """The entropy filter must keep exactly max(1, floor(p*V)) lowest-entropy views."""
    budget = 2.0
    start = time.perf_counter()
    rng = np.random.default_rng(104)
    ok64 = len(filter_views(list(rng.random(64)), 0.1)) == 6
    bad = 0
    for v in range(1, 257):
        ent = list(rng.random(v))
        ranked = sorted(range(v), key=lambda j: (ent[j], j))
        for p in (0.05, 0.1, 0.5, 1.0):
            kept = filter_views(ent, p)
            m = max(1, math.floor(p * v))
            if len(kept) != m or kept != ranked[:m]:
                bad += 1
    elapsed = time.perf_counter() - start
    ok = ok64 and bad == 0 and elapsed < budget
    verdict("P04 view-filter count and order", ok,
             f"V=64,p=0.1 -> 6: {ok64}; {bad} mismatches over 1024 grids", elapsed, budget)
    assert ok64 and bad == 0
    assert elapsed < budget


def test_p05_cache_vote_agrees_with_gradient_descent(verdict):
    """Class-balanced cache vote and GD cross-entropy agree on >= 99% of fresh draws."""
    budget = 15.0
    start = time.perf_counter()
    noisy = prop1_agreement()
    exact = prop1_agreement(ClusterSpec(sigma=0.0))
    elapsed = time.perf_counter() - start
    ok = noisy >= 0.99 and exact == 1.0 and elapsed < budget
    verdict("P05 cache-vote vs GD agreement", ok,
             f"sigma=0.05: {noisy:.4f} >= 0.99; sigma=0: {exact:.4f} == 1.0",
             elapsed, budget)
    assert noisy >= 0.99
    assert exact == 1.0
    assert elapsed < budget


def test_p06_gradient_matches_finite_differences(verdict):
    """Analytic cross-entropy gradient within 1e-4 mixed error of central differences."""
    budget = 5.0
    start = time.perf_counter()
    rng = np.random.default_rng(106)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(6, 20))
        c = int(rng.integers(2, 7))
        classes = int(rng.integers(2, 5))
        x = rng.standard_normal((n, c))
        y = rng.integers(0, classes, n)
        w = rng.standard_normal((classes, c)) * 0.7
        _, grad = ce_loss_grad(w, x, y)
        eps = 1e-6
        for i in range(classes):
            for j in range(c):
                wp = w.copy()
                wp[i, j] += eps
                wm = w.copy()
                wm[i, j] -= eps
                fd = (ce_loss_grad(wp, x, y)[0] - ce_loss_grad(wm, x, y)[0]) / (2 * eps)
                err = abs(fd - grad[i, j]) / max(1.0, abs(grad[i, j]))
                worst = max(worst, err)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < budget
    verdict("P06 gradient vs finite differences", ok, f"worst error {worst:.3e} <= 1e-4",
             elapsed, budget)
    assert worst <= 1e-4
    assert elapsed < budget


def test_p07_risk_shrinks_with_stream_length(verdict):
    """Historical-only mean excess error must not increase over n in (50, 200, 800)."""
    budget = 60.0
    start = time.perf_counter()
    rows = bound_experiment(default_shift_spec(), n_grid=(50, 200, 800), k=3,
                            modes=(MODE_HISTORICAL,), n_seeds=20)
    means = []
    for n_t in (50, 200, 800):
        vals = [r["excess_error"] for r in rows if r["n_t"] == n_t]
        means.append(float(np.mean(vals)))
    inversions = [means[i + 1] - means[i] for i in range(2) if means[i + 1] > means[i]]
    elapsed = time.perf_counter() - start
    ok = (len(inversions) <= 1 and all(d <= 0.002 for d in inversions)
          and elapsed < budget)
    detail = "means " + " -> ".join(f"{m:.4f}" for m in means)
    verdict("P07 risk vs stream length", ok, detail, elapsed, budget)
    assert len(inversions) <= 1, detail
    assert all(d <= 0.002 for d in inversions), detail
    assert elapsed < budget


def test_p08_boosting_improves_on_historical(verdict):
    """With clean small-radius views, boosting must beat historical-only at every grid point."""
    budget = 90.0
    start = time.perf_counter()
    spec = replace(default_shift_spec(), r_b=default_shift_spec().r_t / 4, views=16)
    rows = bound_experiment(spec, n_grid=(50, 200, 800), k=3,
                            modes=(MODE_HISTORICAL, MODE_BOOSTADAPTER), n_seeds=20,
                            percentile_p=0.25)
    point_ok = True
    deltas = []
    for n_t in (50, 200, 800):
        hist = float(np.mean([r["excess_error"] for r in rows
                              if r["n_t"] == n_t and r["mode"] == MODE_HISTORICAL]))
        boost = float(np.mean([r["excess_error"] for r in rows
                               if r["n_t"] == n_t and r["mode"] == MODE_BOOSTADAPTER]))
        deltas.append(hist - boost)
        if boost > hist:
            point_ok = False
    hist_avg = float(np.mean([r["excess_error"] for r in rows
                              if r["mode"] == MODE_HISTORICAL]))
    boost_avg = float(np.mean([r["excess_error"] for r in rows
                               if r["mode"] == MODE_BOOSTADAPTER]))
    elapsed = time.perf_counter() - start
    ok = point_ok and boost_avg < hist_avg and elapsed < budget
    detail = ("deltas " + ", ".join(f"{d:+.4f}" for d in deltas)
              + f"; grid avg {boost_avg:.4f} < {hist_avg:.4f}")
    verdict("P08 boosting vs historical", ok, detail, elapsed, budget)
    assert point_ok, detail
    assert boost_avg < hist_avg, detail
    assert elapsed < budget


def test_p09_end_to_end_beats_zero_shot(verdict):
    """On the pinned default stream both cache modes must reach zero-shot accuracy or better."""
    budget = 10.0
    start = time.perf_counter()
    stream = make_shift_stream(default_shift_spec())
    top1 = {}
    for mode in (MODE_CLIP, MODE_HISTORICAL, MODE_BOOSTADAPTER):
        report = run_stream(stream.records, stream.bank, RunConfig(mode=mode))
        top1[mode] = report.top1
    elapsed = time.perf_counter() - start
    ok = (top1[MODE_HISTORICAL] >= top1[MODE_CLIP]
          and top1[MODE_BOOSTADAPTER] >= top1[MODE_CLIP] and elapsed < budget)
    detail = (f"clip {top1[MODE_CLIP]:.4f}, historical {top1[MODE_HISTORICAL]:.4f}, "
              f"boost {top1[MODE_BOOSTADAPTER]:.4f}")
    verdict("P09 end-to-end vs zero-shot", ok, detail, elapsed, budget)
    assert top1[MODE_HISTORICAL] >= top1[MODE_CLIP], detail
    assert top1[MODE_BOOSTADAPTER] >= top1[MODE_CLIP], detail
    assert elapsed < budget


def test_p10_cli_determinism_and_format_roundtrip(tmp_path, verdict):
    """Identical CLI invocations agree apart from wall time; stream files rewrite bit-exactly."""
    budget = 10.0
    start = time.perf_counter()

    gen_args = ["gen", "--records", "60", "--views", "8", "--seed", "7"]
    a = tmp_path / "a.embs"
    b = tmp_path / "b.embs"
    assert cli_main(gen_args + ["--out", str(a)]) == 0
    assert cli_main(gen_args + ["--out", str(b)]) == 0
    gen_same = a.read_bytes() == b.read_bytes()

    reports = []
    for name in ("r1.json", "r2.json"):
        path = tmp_path / name
        code = cli_main(["run", "--stream", str(a),
                         "--bank", str(a.with_suffix(".bank.json")),
                         "--out", str(path), "--per-sample"])
        assert code == 0
        data = json.loads(path.read_text())
        data.pop("wall_time_s")
        reports.append(data)
    run_same = reports[0] == reports[1]

    rng = np.random.default_rng(110)
    roundtrips = 0
    trials = 200
    for t in range(trials):
        c = int(rng.integers(2, 17))
        n = int(rng.integers(2, 9))
        recs = []
        for i in range(int(rng.integers(1, 12))):
            v = int(rng.integers(0, 5))
            views = (np.stack([normalize(rng.standard_normal(c)) for _ in range(v)])
                     if v else np.zeros((0, c)))
            truth = int(rng.integers(0, n)) if rng.random() < 0.5 else None
            recs.append(StreamRecord(normalize(rng.standard_normal(c)), views, truth, i))
        first = tmp_path / "rt_a.embs"
        second = tmp_path / "rt_b.embs"
        write_stream(first, c, n, recs)
        header, records = read_stream(first)
        write_stream(second, header.c_dim, header.n_classes, records)
        if first.read_bytes() == second.read_bytes():
            roundtrips += 1
    elapsed = time.perf_counter() - start
    ok = gen_same and run_same and roundtrips == trials and elapsed < budget
    detail = (f"gen bitwise: {gen_same}; run reports equal: {run_same}; "
              f"roundtrips {roundtrips}/{trials}")
    verdict("P10 CLI determinism + roundtrip", ok, detail, elapsed, budget)
    assert gen_same and run_same
    assert roundtrips == trials
    assert elapsed < budget

"""Acceptance checks, one test per criterion.

Each test records a single ``criterion N: PASS|FAIL ...`` line. The lines are
printed as the tests run and repeated in the pytest terminal summary (see
``conftest.py``), so ``pytest tests/test_acceptance.py`` shows them even with
output capture on. Running this file directly as a script also works.
"""

import statistics
import sys
import time

import numpy as np
import pytest

from crossmap.cli import main as cli_main
from crossmap.graph import load_graph, save_graph
from crossmap.greedy import greedy_partition
from crossmap.harness import REFERENCE_WORKLOADS, Workload, run_experiment
from crossmap.hill_climb import LOCAL_MINIMUM, climb, neighborhood
from crossmap.oracle import exhaustive_contiguous, recount_cost
from crossmap.partition import HardwareConfig, Partition, load_mapping, max_cost, save_mapping, validate
from crossmap.pso import PsoConfig, pso_partition

from helpers import random_contiguous, random_graph

RESULTS = {}


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line, flush=True)
    return ok


def _instance(rng, n_hi, k_lo=4, k_hi=64):
    n = int(rng.integers(1, n_hi + 1))
    density = float(rng.uniform(0.002, 0.05)) if n > 50 else float(rng.uniform(0.05, 0.4))
    g = random_graph(rng, n, density=density, max_spikes=int(rng.integers(1, 200)), n_layers=int(rng.integers(1, 6)))
    k = int(rng.integers(k_lo, k_hi + 1))
    s_min = -(-n // k)
    return g, HardwareConfig(k, s_min + int(rng.integers(0, 4)))


def test_criterion_1_validity():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    bad = []
    for i in range(1000):
        g, hw = _instance(rng, 500)
        greedy = greedy_partition(g, hw)
        hco, _ = climb(g, greedy, hw)
        pso, _ = pso_partition(g, hw, PsoConfig(swarm_size=8, iterations=10, seed=i))
        for name, p in (("greedy", greedy), ("hco", hco), ("pso", pso)):
            v = validate(g, p, hw)
            if v:
                bad.append((i, name, v[0].kind))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    report(1, ok, f"1000 instances, {len(bad)} invalid outputs, {elapsed:.1f}s (limit 120s)")
    assert not bad, bad[:5]
    assert elapsed < 120


def test_criterion_2_cost_equivalence():
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    mismatches = 0
    checked = 0

    def on_move(partition, loads):
        nonlocal mismatches, checked
        checked += 1
        ref = recount_cost(g, partition.labels, partition.n_clusters)
        mismatches += tuple(loads.tolist()) != ref.cluster_loads
        mismatches += max_cost(g, partition) != ref

    for i in range(1000):
        g, hw = _instance(rng, 120, k_lo=2, k_hi=24)
        candidates = [greedy_partition(g, hw), random_contiguous(rng, g, hw)]
        for p in candidates:
            checked += 1
            mismatches += max_cost(g, p) != recount_cost(g, p.labels, p.n_clusters)
        climb(g, candidates[1], hw, callback=on_move)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 120
    report(2, ok, f"{checked} cost evaluations over 1000 instances, {mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 120


def test_criterion_3_monotone_descent_to_local_minimum():
    rng = np.random.default_rng(303)
    failures = []
    for i in range(200):
        g, hw = _instance(rng, 80, k_lo=2, k_hi=16)
        start = greedy_partition(g, hw) if i % 2 else random_contiguous(rng, g, hw)
        out, trace = climb(g, start, hw)
        seq = [trace.initial] + trace.cost_sequence
        if any(a <= b for a, b in zip(seq, seq[1:])) or not trace.final <= trace.initial:
            failures.append((i, "not strictly decreasing"))
        if trace.terminated_by != LOCAL_MINIMUM:
            failures.append((i, trace.terminated_by))
        here = max_cost(g, out).objective
        if here != trace.final:
            failures.append((i, "trace disagrees with recount"))
        if any(max_cost(g, m.apply(out)).objective < here for m in neighborhood(out, hw)):
            failures.append((i, "improving move left"))
    report(3, not failures, f"200 instances, {len(failures)} failures")
    assert not failures, failures[:5]


def test_criterion_4_sandwich():
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    failures = []
    for i in range(200):
        n = int(rng.integers(1, 15))
        s = int(rng.integers(1, 5))
        k = int(rng.integers(-(-n // s), n + 1))
        g = random_graph(rng, n, density=float(rng.uniform(0.1, 0.5)), max_spikes=40)
        hw = HardwareConfig(k, s)
        greedy = greedy_partition(g, hw)
        hco, _ = climb(g, greedy, hw)
        _, best = exhaustive_contiguous(g, hw)
        if not best.objective <= max_cost(g, hco).objective <= max_cost(g, greedy).objective:
            failures.append(i)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    report(4, ok, f"200 instances, {len(failures)} violations, {elapsed:.1f}s (limit 300s)")
    assert not failures
    assert elapsed < 300


def test_criterion_5_runtime_gap():
    g = Workload("S_1000", layers=(400, 400, 100)).build(0)
    hw = HardwareConfig.with_headroom(g.n_neurons, 256)
    pso_partition(g, HardwareConfig(256, hw.crossbar_count), PsoConfig(swarm_size=2, iterations=2))  # jit warm-up
    hco = run_experiment(g, "hco", hw=hw, repetitions=3, name="S_1000")
    pso = run_experiment(g, "pso", hw=hw, repetitions=3, pso=PsoConfig(swarm_size=50, iterations=2000), name="S_1000")
    hco_ms = statistics.median(r.wall_ms for r in hco)
    pso_ms = statistics.median(r.wall_ms for r in pso)
    ratio = pso_ms / hco_ms
    ok = max(r.wall_ms for r in hco) < 60_000 and ratio >= 10
    report(5, ok, f"hco median {hco_ms:.1f} ms, pso median {pso_ms:.0f} ms, ratio {ratio:.0f}x (need >= 10x)")
    assert max(r.wall_ms for r in hco) < 60_000
    assert ratio >= 10


def test_criterion_6_quality_gap():
    ratios = {}
    for name in REFERENCE_WORKLOADS:
        wl = Workload.reference(name)
        hco, pso = [], []
        for seed in (0, 1, 2):
            g = wl.build(seed)
            hw = HardwareConfig.with_headroom(g.n_neurons, 256)
            hco += run_experiment(g, "hco", hw=hw, seed=seed, repetitions=1, name=name)
            pso += run_experiment(g, "pso", hw=hw, seed=seed, repetitions=1, name=name)
        ratios[name] = statistics.fmean(r.inter_cluster_spikes for r in hco) / statistics.fmean(
            r.inter_cluster_spikes for r in pso
        )
    worst = max(ratios, key=ratios.get)
    ok = all(r <= 1.25 for r in ratios.values())
    detail = ", ".join(f"{k} {v:.3f}" for k, v in ratios.items())
    report(6, ok, f"hco/pso mean spikes: {detail} (limit 1.25, worst {worst})")
    assert ok, ratios


def test_criterion_7_determinism(tmp_path):
    graph = tmp_path / "g.sng"
    assert cli_main(["gen", "--layers", "30,25,20", "--seed", "7", "-o", str(graph)]) == 0
    differing = []
    for algo in ("greedy", "hco", "pso", "oracle-contiguous"):
        k, s = ("64", "2") if algo == "oracle-contiguous" else ("16", "7")
        outputs = []
        for run in (1, 2):
            m, c, t = (tmp_path / f"{algo}.{run}.{ext}" for ext in ("snm", "csv", "trace"))
            argv = ["map", "--graph", str(graph), "--k", k, "--s", s, "--algo", algo, "--seed", "5",
                    "-o", str(m), "--metrics", str(c), "--trace", str(t)]
            if algo == "pso":
                argv += ["--swarm", "20", "--iters", "100"]
            assert cli_main(argv) == 0
            outputs.append([p.read_bytes() for p in (m, c, t) if p.exists()])
        if outputs[0] != outputs[1]:
            differing.append(algo)
    report(7, not differing, f"4 algorithms run twice, differing outputs: {differing or 'none'}")
    assert not differing


def test_criterion_8_round_trip(tmp_path):
    rng = np.random.default_rng(808)
    broken = 0
    for i in range(100):
        n = int(rng.integers(1, 60))
        g = random_graph(rng, n, density=float(rng.uniform(0, 0.3)), max_spikes=int(rng.integers(0, 10_000)))
        hw = HardwareConfig(int(rng.integers(1, n + 1)), 1)
        hw = HardwareConfig(hw.crossbar_size, -(-n // hw.crossbar_size) + int(rng.integers(0, 3)))
        p = random_contiguous(rng, g, hw) if i % 2 else Partition.from_assignment(
            rng.integers(0, hw.crossbar_count, size=n), hw.crossbar_count
        )
        a, b = tmp_path / "a.sng", tmp_path / "b.sng"
        save_graph(g, a)
        g2 = load_graph(a)
        save_graph(g2, b)
        ma, mb = tmp_path / "a.snm", tmp_path / "b.snm"
        save_mapping(p, ma)
        save_mapping(load_mapping(ma, order=g2.order), mb)
        same = a.read_bytes() == b.read_bytes() and ma.read_bytes() == mb.read_bytes()
        same = same and g2 == g and np.array_equal(load_mapping(mb).labels, p.labels)
        broken += not same
    report(8, broken == 0, f"100 graph and mapping pairs, {broken} round-trip mismatches")
    assert broken == 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

import csv
import hashlib
import math

import pytest

from crossmap.exceptions import InfeasibleError
from crossmap.graph import SpikeGraph, TopologySpec, generate_feedforward, save_graph
from crossmap.harness import (
    ALGORITHMS,
    CSV_HEADER,
    REFERENCE_WORKLOADS,
    Suite,
    Workload,
    bench_suite,
    run_algorithm,
    run_experiment,
    summarize,
)
from crossmap.partition import HardwareConfig
from crossmap.pso import PsoConfig

SMALL_PSO = PsoConfig(swarm_size=8, iterations=20)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_header_is_fixed():
    assert ",".join(CSV_HEADER) == (
        "workload,n,synapses,total_spikes,algo,k,s,seed,wall_ms,"
        "max_load,inter_cluster_spikes,normalized_inter_cluster"
    )


def test_reference_shapes():
    assert REFERENCE_WORKLOADS["MLP-MNIST"][0] == (784, 100, 10)
    wl = Workload.reference("S_1000")
    assert wl.layers == (400, 400, 100) and wl.total_spikes == 5_948_200


def test_workload_needs_one_source():
    with pytest.raises(ValueError):
        Workload("x")
    with pytest.raises(ValueError):
        Workload("x", path="g.sng", layers=(2, 2))


def test_run_experiment_records_and_csv(tmp_path):
    out = tmp_path / "r.csv"
    wl = Workload("tiny", layers=(12, 10, 6))
    recs = run_experiment(wl, "hco", crossbar_size=8, seed=4, csv_path=out)
    assert len(recs) == 3
    rows = read_rows(out)
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 4
    for r in recs:
        assert r.wall_ms >= 0
        assert 0.0 <= r.normalized_inter_cluster <= 1.0
        assert r.s == math.ceil(28 / 8) + 2
    # metrics are identical across repetitions; only timing moves
    assert len({(r.max_load, r.inter_cluster_spikes) for r in recs}) == 1
    run_experiment(wl, "greedy", crossbar_size=8, seed=4, repetitions=1, csv_path=out)
    assert len(read_rows(out)) == 5  # appended, header not repeated


def test_hco_never_worse_than_greedy_on_s1000_shape():
    wl = Workload("S_1000", layers=(400, 400, 100))
    g = wl.build(0)
    hw = HardwareConfig(256, 2 * math.ceil(g.n_neurons / 256))
    greedy = run_experiment(g, "greedy", hw=hw, repetitions=1)[0]
    hco = run_experiment(g, "hco", hw=hw, repetitions=1)[0]
    assert hco.inter_cluster_spikes <= greedy.inter_cluster_spikes


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_trivial_workload_has_no_traffic(algo):
    g = SpikeGraph([0, 0, 1, 1, 1])
    rec = run_experiment(g, algo, hw=HardwareConfig(2, 3), repetitions=1, pso=SMALL_PSO)[0]
    assert rec.inter_cluster_spikes == 0
    assert rec.normalized_inter_cluster == 0.0


def test_same_seed_same_metrics():
    wl = Workload("w", layers=(20, 15, 10))
    for algo in ("greedy", "hco", "pso"):
        a = run_experiment(wl, algo, crossbar_size=16, seed=2, repetitions=1, pso=SMALL_PSO)[0]
        b = run_experiment(wl, algo, crossbar_size=16, seed=2, repetitions=1, pso=SMALL_PSO)[0]
        assert a.row()[:8] == b.row()[:8] and a.row()[9:] == b.row()[9:]


def test_run_algorithm_errors():
    g = SpikeGraph([0, 0, 0])
    with pytest.raises(ValueError):
        run_algorithm(g, HardwareConfig(2, 2), "annealing")
    with pytest.raises(InfeasibleError):
        run_algorithm(g, HardwareConfig(1, 2), "greedy")


def test_errors_propagate_after_flushing(tmp_path):
    out = tmp_path / "r.csv"
    g = SpikeGraph([0, 0, 0])
    with pytest.raises(InfeasibleError):
        run_experiment(g, "hco", hw=HardwareConfig(1, 2), csv_path=out)
    assert read_rows(out) == [list(CSV_HEADER)]


SUITE = """
k = 16
seeds = [0, 1, 2]
algos = ["greedy", "hco", "pso"]
repetitions = 1

[pso]
swarm = 6
iters = 10

[[workload]]
name = "A"
layers = [10, 10, 5]

[[workload]]
name = "B"
layers = [8, 12]
total_spikes = 500

[[workload]]
name = "C"
graph = "c.sng"
s = 4

[[workload]]
name = "MLP-MNIST"
layers = [784, 100, 10]
"""


def test_bench_suite_cross_product(tmp_path):
    g = generate_feedforward(TopologySpec((6, 6, 4), seed=9))
    save_graph(g, tmp_path / "c.sng")
    digest = hashlib.sha256((tmp_path / "c.sng").read_bytes()).digest()
    (tmp_path / "suite.toml").write_text(SUITE)
    records, summary = bench_suite(tmp_path / "suite.toml", tmp_path / "out.csv")
    assert len(records) == 36
    assert all(r.error is None for r in records)
    assert len(read_rows(tmp_path / "out.csv")) == 37
    assert [row["workload"] for row in summary] == ["A", "B", "C", "MLP-MNIST"]
    for row in summary:
        assert math.isfinite(row["pso_over_hco_time"])
        assert math.isfinite(row["hco_over_pso_spikes"])
    mlp = [r for r in records if r.workload == "MLP-MNIST"]
    assert {r.n for r in mlp} == {894}
    assert {r.total_spikes for r in records if r.workload == "B"} == {500}
    assert {r.s for r in records if r.workload == "C"} == {4}
    # the harness never touches workload files
    assert hashlib.sha256((tmp_path / "c.sng").read_bytes()).digest() == digest


def test_bench_suite_keeps_going_after_a_bad_cell(tmp_path):
    (tmp_path / "bad.sng").write_text("not a graph\n")
    suite = Suite.from_dict(
        {
            "k": 4,
            "seeds": [0],
            "algos": ["greedy", "oracle-contiguous"],
            "repetitions": 1,
            "workload": [
                {"name": "missing", "graph": "bad.sng"},
                {"name": "big", "layers": [30, 30]},
                {"name": "ok", "layers": [3, 3]},
            ],
        },
        base_dir=str(tmp_path),
    )
    records, summary = bench_suite(suite, tmp_path / "out.csv")
    errors = [(r.workload, r.algo) for r in records if r.error]
    assert ("missing", "greedy") in errors and ("big", "oracle-contiguous") in errors
    ok = [r for r in records if r.workload == "ok"]
    assert len(ok) == 2 and all(r.error is None for r in ok)
    rows = read_rows(tmp_path / "out.csv")
    assert len(rows) == 1 + len(records)
    assert summary[-1]["workload"] == "ok"


def test_suite_rejects_unknown_algorithm():
    with pytest.raises(ValueError):
        Suite.from_dict({"algos": ["sa"], "workload": [{"name": "a", "layers": [2]}]})
    with pytest.raises(ValueError):
        Suite.from_dict({})


def test_summary_ratios_handle_zero_time():
    from crossmap.harness import ExperimentRecord

    recs = [
        ExperimentRecord("w", 2, 0, 0, "hco", 2, 1, 0, 0.0, 0, 0, 0.0),
        ExperimentRecord("w", 2, 0, 0, "pso", 2, 1, 0, 0.0, 0, 0, 0.0),
    ]
    row = summarize(recs)[0]
    assert row["pso_over_hco_time"] == 1.0 and row["hco_over_pso_spikes"] == 1.0

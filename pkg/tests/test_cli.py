"""End-to-end tests of the command-line front end"""

import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli import COMMAND_REGISTRY, build_parser, main

NODES = [("a", 0.0), ("b", 0.1), ("c", 0.2), ("d", 5.0), ("e", 5.1), ("f", 5.2)]
EDGES = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f"), ("c", "d")]


@pytest.fixture
def graph_files(tmp_path):
    nodes = tmp_path / "g.nodes.tsv"
    edges = tmp_path / "g.edges.tsv"
    nodes.write_text("id\tvalue\n" + "".join(f"{i}\t{v}\n" for i, v in NODES))
    edges.write_text("src\tdst\n" + "".join(f"{u}\t{v}\n" for u, v in EDGES))
    return ["--nodes", str(nodes), "--edges", str(edges)]


def read_json(path: Path):
    with open(path) as f:
        return json.load(f)


def error_of(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_registry_covers_every_subcommand():
    assert set(COMMAND_REGISTRY) == {"scan", "detect", "bench", "eval", "score-partition"}
    with pytest.raises(SystemExit):
        build_parser().parse_args(["unknown"])


def test_scan_writes_curves_and_reports(tmp_path, graph_files):
    out = tmp_path / "out"
    code = main(["scan", *graph_files, "--out", str(out), "--t-min", "0.5", "--t-max", "5",
                 "--t-count", "4", "--runs", "4"])
    assert code == 0
    for name in ("vi_within.csv", "vi_cross.csv", "selection.json", "summary.json",
                 "index.json", "outlier_tracks.json", "hierarchy.json"):
        assert (out / name).exists(), name
    curve = pd.read_csv(out / "vi_within.csv")
    assert list(curve.columns) == ["t", "K", "vi", "vi_std", "stability"]
    assert len(curve) == 4
    assert len(list((out / "partitions").glob("t_*.tsv"))) == 4
    assert len(list((out / "concentration").glob("t_*.csv"))) == 4

    summary = read_json(out / "summary.json")
    assert summary["command"] == "scan"
    assert summary["summary"]["nodes"] == 6
    index = read_json(out / "index.json")["artifacts"]
    assert index["selection.json"]["kind"] == "selection"


def test_scan_at_explicit_time_reports_once(tmp_path, graph_files):
    out = tmp_path / "out"
    assert main(["scan", *graph_files, "--out", str(out), "--at-times", "1.5", "--runs", "3"]) == 0
    reports = sorted(p.name for p in (out / "reports").iterdir())
    assert reports == ["anomalies_t_1.5.csv", "anomalies_t_1.5.json"]
    report = read_json(out / "reports" / "anomalies_t_1.5.json")
    assert report["time"] == 1.5
    assert len(report["nodes"]) == 6
    assert all(node["context"] is not None for node in report["nodes"])


def test_scan_kernel_dump_and_literal_scores(tmp_path, graph_files):
    out = tmp_path / "out"
    code = main(["scan", *graph_files, "--out", str(out), "--at-times", "1,2", "--runs", "2",
                 "--dump-kernel", "--literal-null-term"])
    assert code == 0
    assert (out / "kernels" / "kernel_t_1.0.csv").exists()
    literal = pd.read_csv(out / "literal_stability.csv")
    assert list(literal["t"]) == [1.0, 2.0]


def test_detect_at_time_zero_flags_nothing(tmp_path, graph_files):
    out = tmp_path / "out"
    assert main(["detect", *graph_files, "--out", str(out), "--t", "0"]) == 0
    report = read_json(out / "anomalies.json")
    assert report["num_flagged"] == 0
    assert all(node["score"] == 1.0 for node in report["nodes"])


def test_detect_with_contexts(tmp_path, graph_files):
    out = tmp_path / "out"
    assert main(["detect", *graph_files, "--out", str(out), "--t", "1", "--contexts",
                 "--runs", "3"]) == 0
    frame = pd.read_csv(out / "anomalies.csv")
    assert list(frame.columns) == ["id", "score", "rank", "flagged", "context"]
    assert frame["context"].notna().all()


def test_negative_time_is_a_usage_error(tmp_path, graph_files, capsys):
    code = main(["detect", *graph_files, "--out", str(tmp_path / "out"), "--t", "-1"])
    assert code == 2
    error = error_of(capsys)
    assert error["error"] == "ParameterError"
    assert error["exit_code"] == 2


def test_missing_input_is_a_data_error(tmp_path, capsys):
    code = main(["detect", "--nodes", str(tmp_path / "none.tsv"), "--edges",
                 str(tmp_path / "none.tsv"), "--t", "1", "--out", str(tmp_path / "out")])
    assert code == 3
    assert error_of(capsys)["exit_code"] == 3


def test_disconnected_graph_needs_largest_component(tmp_path, capsys):
    nodes = tmp_path / "n.tsv"
    edges = tmp_path / "e.tsv"
    nodes.write_text("id\tx\na\t1\nb\t2\nc\t3\nd\t4\ne\t9\n")
    edges.write_text("src\tdst\na\tb\nb\tc\nc\ta\nd\te\n")
    args = ["detect", "--nodes", str(nodes), "--edges", str(edges), "--t", "1",
            "--out", str(tmp_path / "out")]
    assert main(args) == 3
    assert error_of(capsys)["error"] == "ConnectivityError"
    assert main(args + ["--largest-component"]) == 0
    assert read_json(tmp_path / "out" / "summary.json")["summary"]["nodes"] == 3


def test_score_partition(tmp_path, graph_files):
    partition = tmp_path / "p.tsv"
    partition.write_text("id\tcontext\n" + "".join(
        f"{i}\t{0 if i in 'abc' else 1}\n" for i, _ in NODES))
    out = tmp_path / "out"
    assert main(["score-partition", *graph_files, "--out", str(out), "--t", "1",
                 "--partition", str(partition), "--literal-null-term"]) == 0
    payload = read_json(out / "partition_score.json")
    assert payload["num_contexts"] == 2
    assert payload["stability"] > 0
    assert "literal" in payload


def test_eval_perfect_and_inverted(tmp_path):
    labels = tmp_path / "labels.tsv"
    labels.write_text("id\tlabel\na\t1\nb\t0\nc\t1\nd\t0\n")
    perfect = tmp_path / "perfect.csv"
    perfect.write_text("id,score\na,0.9\nb,0.1\nc,0.8\nd,0.2\n")
    inverted = tmp_path / "inverted.csv"
    inverted.write_text("id,score\na,0.1\nb,0.9\nc,0.2\nd,0.8\n")

    out = tmp_path / "out"
    assert main(["eval", "--scores", str(perfect), "--labels", str(labels), "--out", str(out)]) == 0
    assert read_json(out / "metrics.json")["roc_auc"] == 1.0
    assert main(["eval", "--scores", str(inverted), "--labels", str(labels), "--out", str(out)]) == 0
    assert read_json(out / "metrics.json")["roc_auc"] == 0.0


def test_eval_hand_example_with_flags(tmp_path):
    labels = tmp_path / "labels.tsv"
    labels.write_text("id\tlabel\nw\t1\nx\t0\ny\t1\nz\t0\n")
    scores = tmp_path / "scores.csv"
    scores.write_text("id,score,flagged\nw,0.8,true\nx,0.7,false\ny,0.6,false\nz,0.5,false\n")
    out = tmp_path / "out"
    assert main(["eval", "--scores", str(scores), "--labels", str(labels), "--out", str(out)]) == 0
    metrics = read_json(out / "metrics.json")
    assert metrics["roc_auc"] == pytest.approx(0.75)
    assert (metrics["tp"], metrics["fn"]) == (1, 1)


def test_eval_mismatched_ids(tmp_path, capsys):
    labels = tmp_path / "labels.tsv"
    labels.write_text("id\tlabel\na\t1\nb\t0\n")
    scores = tmp_path / "scores.csv"
    scores.write_text("id,score\na,0.9\nq,0.1\n")
    assert main(["eval", "--scores", str(scores), "--labels", str(labels),
                 "--out", str(tmp_path / "out")]) == 3
    assert error_of(capsys)["error"] == "UnknownNodeError"


def test_config_file_and_flag_precedence(tmp_path, graph_files):
    config = tmp_path / "run.conf"
    config.write_text("# scan settings\nruns = 2\nt_count = 3\nt_min = 0.5\nt_max = 2\n")
    out = tmp_path / "out"
    assert main(["scan", *graph_files, "--config", str(config), "--t-count", "2",
                 "--out", str(out)]) == 0
    assert len(pd.read_csv(out / "vi_within.csv")) == 2


def test_unknown_config_key_is_a_usage_error(tmp_path, graph_files, capsys):
    config = tmp_path / "run.conf"
    config.write_text("louvain_passes = 3\n")
    assert main(["scan", *graph_files, "--config", str(config), "--out", str(tmp_path / "o")]) == 2
    assert error_of(capsys)["error"] == "ConfigError"


def test_bench_toy_reports_detector_and_random(tmp_path):
    out = tmp_path / "out"
    code = main(["bench", "--toy", "--out", str(out), "--t-min", "0.1", "--t-max", "10",
                 "--t-count", "5"])
    assert code == 0
    metrics = read_json(out / "metrics.json")
    for method in ("detector", "random"):
        assert set(metrics[method]) == {"roc_auc", "pr_auc", "precision", "recall", "f1_weighted"}
    assert len(metrics["best_times"]) == 1
    assert (out / "labels.tsv").exists() and (out / "nodes.tsv").exists()
    assert len(pd.read_csv(out / "auc_curve.csv")) == 5


def test_bench_threshold_metrics_come_from_a_flagging_scale(tmp_path):
    """Precision and recall are read where the two-sigma rule flags planted outliers"""
    out = tmp_path / "out"
    assert main(["bench", "--toy", "--out", str(out), "--t-min", "0.01", "--t-max", "100",
                 "--t-count", "9"]) == 0
    metrics = read_json(out / "metrics.json")
    assert metrics["flagged"][0] > 0
    assert metrics["flag_times"][0] in pd.read_csv(out / "auc_curve.csv")["t"].tolist()
    assert metrics["detector"]["precision"] > 0
    assert metrics["detector"]["recall"] > 0
    sweep = pd.read_csv(out / "sweep.csv")
    detector = sweep[sweep["method"] == "detector"].iloc[0]
    assert detector["tp"] > 0
    assert detector["tp"] + detector["fp"] == detector["flagged"]


def test_scan_same_output_for_any_worker_count(tmp_path, graph_files):
    """Every artifact is byte-identical with one or two workers"""
    common = [*graph_files, "--t-min", "0.1", "--t-max", "10", "--t-count", "4", "--runs", "5",
              "--seed", "7"]
    serial, pooled = tmp_path / "serial", tmp_path / "pooled"
    assert main(["scan", *common, "--workers", "1", "--out", str(serial)]) == 0
    assert main(["scan", *common, "--workers", "2", "--out", str(pooled)]) == 0
    files = sorted(p.relative_to(serial) for p in serial.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(pooled) for p in pooled.rglob("*") if p.is_file())
    for name in files:
        assert (serial / name).read_bytes() == (pooled / name).read_bytes(), name


def test_bundled_dataset_by_name(tmp_path):
    datasets = Path(__file__).resolve().parent.parent / "datasets"
    out = tmp_path / "out"
    assert main(["detect", "--dataset", "two_triangles", "--datasets-dir", str(datasets),
                 "--t", "1", "--out", str(out)]) == 0
    assert read_json(out / "summary.json")["summary"]["edges"] == 7


def _has_required(payload, schema):
    return set(schema.get("required", [])) <= set(payload)


def test_artifacts_carry_schema_fields(tmp_path, graph_files):
    schemas = Path(__file__).resolve().parent.parent / "docs" / "schemas"
    out = tmp_path / "out"
    assert main(["scan", *graph_files, "--out", str(out), "--at-times", "1", "--runs", "2"]) == 0
    report = read_json(out / "reports" / "anomalies_t_1.0.json")
    report_schema = read_json(schemas / "anomaly_report.schema.json")
    assert _has_required(report, report_schema)
    assert all(_has_required(node, report_schema["properties"]["nodes"]["items"])
               for node in report["nodes"])
    assert _has_required(read_json(out / "selection.json"), read_json(schemas / "selection.schema.json"))
    assert _has_required(read_json(out / "summary.json"), read_json(schemas / "summary.schema.json"))


def test_scan_plot(tmp_path, graph_files):
    out = tmp_path / "out"
    assert main(["scan", *graph_files, "--out", str(out), "--t-min", "0.1", "--t-max", "10",
                 "--t-count", "3", "--runs", "2", "--plot"]) == 0
    assert (out / "scan.png").stat().st_size > 0
    assert read_json(out / "index.json")["artifacts"]["scan.png"]["kind"] == "figure"


def test_literal_eq5_spelling(tmp_path, graph_files):
    """The literal score is enabled by either flag spelling or the config key"""
    partition = tmp_path / "p.tsv"
    partition.write_text("id\tcontext\n" + "".join(
        f"{i}\t{0 if i in 'abc' else 1}\n" for i, _ in NODES))
    base = ["score-partition", *graph_files, "--t", "1", "--partition", str(partition)]

    assert main([*base, "--out", str(tmp_path / "flag"), "--literal-eq5"]) == 0
    flagged = read_json(tmp_path / "flag" / "partition_score.json")
    assert "literal" in flagged

    config = tmp_path / "run.conf"
    config.write_text("literal_eq5 = true\n")
    assert main([*base, "--out", str(tmp_path / "conf"), "--config", str(config)]) == 0
    assert read_json(tmp_path / "conf" / "partition_score.json")["literal"] == flagged["literal"]

    assert main([*base, "--out", str(tmp_path / "plain")]) == 0
    assert "literal" not in read_json(tmp_path / "plain" / "partition_score.json")


def _write_eval_inputs(tmp_path):
    scores = tmp_path / "scores.csv"
    labels = tmp_path / "labels.tsv"
    scores.write_text("id,score,flagged\n" + "".join(
        f"{i},{v},{str(v > 4).lower()}\n" for i, v in NODES))
    labels.write_text("id\tlabel\n" + "".join(f"{i}\t{int(i in 'df')}\n" for i, _ in NODES))
    return ["--scores", str(scores), "--labels", str(labels)]


@pytest.mark.parametrize("command", ["scan", "detect", "score-partition", "bench", "eval"])
def test_every_command_same_output_with_one_or_eight_workers(tmp_path, graph_files, command):
    """Artifacts are byte-identical whatever the pool size"""
    partition = tmp_path / "p.tsv"
    partition.write_text("id\tcontext\n" + "".join(
        f"{i}\t{0 if i in 'abc' else 1}\n" for i, _ in NODES))
    args = {
        "scan": [*graph_files, "--t-min", "0.1", "--t-max", "10", "--t-count", "4",
                 "--runs", "6", "--method", "chebyshev", "--literal-null-term", "--dump-kernel"],
        "detect": [*graph_files, "--t", "1.5", "--contexts", "--runs", "6",
                   "--method", "chebyshev"],
        "score-partition": [*graph_files, "--t", "2", "--partition", str(partition),
                            "--method", "chebyshev", "--literal-null-term"],
        "bench": ["--n", "200", "--anomaly-fraction", "0.05", "--seeds", "2", "--t-min", "0.1",
                  "--t-max", "10", "--t-count", "3", "--method", "chebyshev",
                  "--attribute-dim", "5"],
        "eval": _write_eval_inputs(tmp_path),
    }[command]
    serial, pooled = tmp_path / "serial", tmp_path / "pooled"
    assert main([command, *args, "--seed", "11", "--workers", "1", "--out", str(serial)]) == 0
    assert main([command, *args, "--seed", "11", "--workers", "8", "--out", str(pooled)]) == 0
    files = sorted(p.relative_to(serial) for p in serial.rglob("*") if p.is_file())
    assert files
    assert files == sorted(p.relative_to(pooled) for p in pooled.rglob("*") if p.is_file())
    for name in files:
        assert (serial / name).read_bytes() == (pooled / name).read_bytes(), name

"""
Command-line front end: multi-scale contextual anomaly detection on
attributed networks.

Subcommands: scan, detect, bench, eval, score-partition.
Exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.anomaly.concentration import (
    ConcentrationProfile,
    concentration_from_spectrum,
    concentration_profile,
)
from src.anomaly.detection import AnomalyReport, detect, track_outliers
from src.bench.metrics import EvalResult, evaluate, prf1, random_baseline, roc_auc
from src.bench.scalability import run_scalability
from src.bench.synthetic import SyntheticConfig, generate_synthetic, toy_income_network
from src.core.artifacts import ArtifactWriter
from src.core.base_command import BaseCommand, CommandType
from src.core.config import RunConfig
from src.core.errors import AnalysisError
from src.core.log import configure_logging
from src.core.seeding import derive_seed
from src.datasets.loader import (
    DatasetLoader,
    align_scores_labels,
    load_attributed_graph,
    load_labels,
    load_partition,
    load_scores,
    write_attributed_graph,
    write_labels,
)
from src.graph.attributed import (
    AttributedGraph,
    LaplacianMatrix,
    WeightedGraph,
    largest_component,
    laplacian,
    resolve_sigma,
    select_attributes,
    standardize_attributes,
    weight_edges,
)
from src.kernel.base import EXACT
from src.kernel.heat import choose_method, dump_kernel_csv, heat_kernel
from src.kernel.exact import spectral_decomposition
from src.scales.scan import (
    ScaleScan,
    context_hierarchy,
    scan,
    select_scales,
    time_grid,
    time_label,
)
from src.stability.contexts import best_partition, merge_singletons
from src.stability.quality import literal_stability_score, quality_matrix, stability_score

logger = logging.getLogger(__name__)

# largest tolerated gap between kernel-column and spectral concentrations
SPECTRAL_CHECK_TOL = 1e-6


@dataclass
class PreparedGraph:
    graph: AttributedGraph
    sigma: float
    weighted: WeightedGraph
    L: LaplacianMatrix


def prepare_graph(config: RunConfig) -> PreparedGraph:
    """Load, optionally reduce, weight and build the Laplacian"""
    logger.info("loading graph")
    if config.dataset is not None:
        graph = DatasetLoader(config.datasets_dir).load_dataset(config.dataset)
    else:
        graph = load_attributed_graph(config.nodes, config.edges)
    if config.attributes:
        graph = select_attributes(graph, config.attributes)
    if config.standardize:
        graph = standardize_attributes(graph)
    if config.largest_component:
        graph = largest_component(graph)

    logger.info("weighting %d edges", graph.edge_count)
    sigma = resolve_sigma(graph, config.sigma_value(), pair_budget=config.pair_budget,
                          rng_seed=derive_seed(config.seed, "sigma"), pairs=config.sigma_pairs)
    weighted = weight_edges(graph, sigma)
    logger.info("building Laplacian (N=%d, sigma=%g)", graph.node_count, sigma)
    return PreparedGraph(graph=graph, sigma=sigma, weighted=weighted, L=laplacian(weighted))


def _kernel_options(config: RunConfig) -> Dict[str, Any]:
    return {"method": config.method, "dense_limit": config.dense_limit,
            "degree": config.degree, "refine_bound": config.refine_bound}


def _graph_summary(prepared: PreparedGraph) -> Dict[str, Any]:
    graph = prepared.graph
    return {"nodes": graph.node_count, "edges": graph.edge_count,
            "attributes": list(graph.attribute_names), "sigma": prepared.sigma,
            "dropped_edges": graph.dropped_edges}


def _write_report(writer: ArtifactWriter, name: str, report: AnomalyReport,
                  graph: AttributedGraph) -> None:
    writer.write_json(f"{name}.json", report.to_dict(graph.node_ids), kind="anomaly_report")
    writer.write_frame(f"{name}.csv", report.to_frame(graph.node_ids), kind="anomaly_report")


def _labelled_metrics(report: AnomalyReport, graph: AttributedGraph) -> Optional[Dict[str, Any]]:
    if graph.labels is None or len(np.unique(graph.labels)) < 2:
        return None
    return evaluate(report.scores, graph.labels, report.flagged).to_dict()


class ScanCommand(BaseCommand):
    """Scan a time grid, select scales, report anomalies at each selected scale"""

    def command_type(self) -> CommandType:
        return CommandType.SCAN

    def execute(self, writer: ArtifactWriter) -> Dict[str, Any]:
        config = self.config
        prepared = prepare_graph(config)
        graph, L = prepared.graph, prepared.L

        if config.at_times:
            times = np.array(sorted(config.at_times), dtype=float)
        else:
            times = time_grid(config.t_min, config.t_max, config.t_count)
        result = scan(L, times, runs=config.runs, rng_seed=config.seed, workers=config.workers,
                      merge=config.merge_singletons, sparsify_eps=config.sparsify_eps,
                      **_kernel_options(config))

        logger.info("selecting scales")
        selection = select_scales(result, dip_quantile=config.dip_quantile,
                                  plateau_eps=config.plateau_eps, min_plateau=config.min_plateau)
        report_times = [float(t) for t in times] if config.at_times else selection.selected_times
        if config.at_times is None and not selection.selected_times:
            self.warn("no scale selected; inspect vi_within.csv and vi_cross.csv or use --at-times")

        self._write_scan(writer, result, graph)
        writer.write_json("selection.json", selection.to_dict(), kind="selection")

        reports = []
        for t in report_times:
            index = result.index_of(t)
            report = detect(result.concentration[index]).with_contexts(result.best_partitions[index])
            reports.append(report)
            _write_report(writer, f"reports/anomalies_{time_label(t)}", report, graph)

        tracks = track_outliers(reports, graph.node_ids)
        writer.write_json("outlier_tracks.json", [t.to_dict() for t in tracks], kind="tracks")
        partitions = [result.best_partitions[result.index_of(t)] for t in report_times]
        writer.write_json("hierarchy.json", context_hierarchy(partitions, report_times),
                          kind="hierarchy")

        if config.literal_null_term or config.dump_kernel:
            self._kernel_extras(writer, prepared, result, report_times)
        if config.plot:
            import matplotlib.pyplot as plt

            from src.utils.plotting import plot_scan

            figure = plot_scan(result, selection)
            writer.write_figure("scan.png", figure)
            plt.close(figure)

        summary = _graph_summary(prepared)
        summary.update({
            "times": len(times),
            "selected_times": selection.selected_times,
            "reported_times": report_times,
            "num_contexts": [int(result.num_clusters[result.index_of(t)]) for t in report_times],
            "flagged": {time_label(r.time): [graph.node_ids[u] for u in r.flagged] for r in reports},
        })
        return summary

    def _write_scan(self, writer: ArtifactWriter, result: ScaleScan, graph: AttributedGraph) -> None:
        writer.write_frame("vi_within.csv", result.vi_within_frame(), kind="curve")
        writer.write_frame("vi_cross.csv", result.vi_cross_frame(), kind="matrix", index=True)
        for t, partition, profile in zip(result.times, result.best_partitions, result.concentration):
            label = time_label(t)
            writer.write_frame(f"partitions/{label}.tsv",
                               pd.DataFrame({"id": list(graph.node_ids),
                                             "context": partition.assignment}),
                               kind="partition")
            if profile is not None:
                writer.write_frame(f"concentration/{label}.csv",
                                   pd.DataFrame({"id": list(graph.node_ids),
                                                 "concentration": profile.values}),
                                   kind="concentration")

    def _kernel_extras(self, writer: ArtifactWriter, prepared: PreparedGraph, result: ScaleScan,
                       report_times: List[float]) -> None:
        """Kernel dumps at the reported times and the literal-formula scores on the grid"""
        config, L = self.config, prepared.L
        decomposition = None
        if choose_method(L.order, config.method, config.dense_limit) == EXACT:
            decomposition = spectral_decomposition(L, dense_limit=config.dense_limit)
        literal = []
        for t, partition in zip(result.times, result.best_partitions):
            wanted_dump = config.dump_kernel and float(t) in report_times
            if not (config.literal_null_term or wanted_dump):
                continue
            kernel = heat_kernel(L, float(t), workers=config.workers,
                                 decomposition=decomposition, **_kernel_options(config))
            if config.literal_null_term:
                literal.append({"t": float(t), "K": partition.num_contexts,
                                "stability": partition.score,
                                "literal": literal_stability_score(kernel, partition)})
            if wanted_dump:
                name = f"kernels/kernel_{time_label(t)}.csv"
                dump_kernel_csv(kernel, writer.path(name))
                writer.register(name, "kernel")
        if literal:
            writer.write_frame("literal_stability.csv", pd.DataFrame(literal), kind="curve")


class DetectCommand(BaseCommand):
    """Anomaly report at a single time"""

    def command_type(self) -> CommandType:
        return CommandType.DETECT

    def execute(self, writer: ArtifactWriter) -> Dict[str, Any]:
        config = self.config
        prepared = prepare_graph(config)
        graph, L = prepared.graph, prepared.L
        t = float(config.t)

        logger.info("heat kernel at t=%g", t)
        kernel = heat_kernel(L, t, workers=config.workers, **_kernel_options(config))
        report = detect(concentration_profile(kernel))
        if config.contexts and t > 0:
            partition, _ = best_partition(L, t, runs=config.runs, rng_seed=config.seed,
                                          workers=config.workers, kernel=kernel,
                                          merge=config.merge_singletons,
                                          sparsify_eps=config.sparsify_eps)
            report = report.with_contexts(partition)
        _write_report(writer, "anomalies", report, graph)
        if config.dump_kernel:
            dump_kernel_csv(kernel, writer.path("kernel.csv"))
            writer.register("kernel.csv", "kernel")

        summary = _graph_summary(prepared)
        summary.update({"t": t, "threshold": report.threshold,
                        "flagged": [graph.node_ids[u] for u in report.flagged]})
        metrics = _labelled_metrics(report, graph)
        if metrics is not None:
            writer.write_json("metrics.json", metrics, kind="metrics")
            summary["metrics"] = metrics
        return summary


class ScorePartitionCommand(BaseCommand):
    """Stability of a given partition at one time"""

    def command_type(self) -> CommandType:
        return CommandType.SCORE_PARTITION

    def execute(self, writer: ArtifactWriter) -> Dict[str, Any]:
        config = self.config
        prepared = prepare_graph(config)
        t = float(config.t)
        partition = load_partition(config.partition, prepared.graph)
        kernel = heat_kernel(prepared.L, t, workers=config.workers, **_kernel_options(config))
        Q = quality_matrix(kernel, sparsify_eps=config.sparsify_eps)

        payload: Dict[str, Any] = {
            "t": t,
            "num_contexts": partition.num_contexts,
            "stability": stability_score(Q, partition),
        }
        if config.merge_singletons:
            merged = merge_singletons(partition, prepared.weighted)
            if not merged.same_as(partition):
                payload["merged"] = {"num_contexts": merged.num_contexts,
                                     "stability": stability_score(Q, merged)}
        if config.literal_null_term:
            payload["literal"] = literal_stability_score(kernel, partition)
        writer.write_json("partition_score.json", payload, kind="partition_score")
        return payload


def _anomaly_f1(result: EvalResult) -> float:
    """F1 of the anomaly class from the confusion counts; 0 when nothing is flagged or positive"""
    denominator = 2 * result.tp + result.fp + result.fn
    return 2.0 * result.tp / denominator if denominator else 0.0


def _metric_summary(rows: List[Dict[str, Any]]) -> Dict[str, Dict[str, float]]:
    frame = pd.DataFrame(rows)
    out = {}
    for name in ("roc_auc", "pr_auc", "precision", "recall", "f1_weighted"):
        values = frame[name].astype(float)
        out[name] = {"mean": float(values.mean()), "std": float(values.std(ddof=0))}
    return out


class BenchCommand(BaseCommand):
    """Synthetic benchmark: generate, inject, detect at the best scale, evaluate"""

    def command_type(self) -> CommandType:
        return CommandType.BENCH

    def execute(self, writer: ArtifactWriter) -> Dict[str, Any]:
        config = self.config
        if config.scalability:
            report = run_scalability(config.scalability, workers=config.scalability_workers,
                                     degree=config.degree, rng_seed=config.seed)
            writer.write_json("scalability.json", report.to_dict(), kind="scalability")
            return report.to_dict()

        fractions = config.fractions or [config.anomaly_fraction]
        times = time_grid(config.t_min, config.t_max, config.t_count)
        rows: List[Dict[str, Any]] = []
        curves = []
        for fi, fraction in enumerate(fractions):
            for s in range(config.seeds):
                run_seed = derive_seed(config.seed, "bench", fi, s)
                graph, labels = self._generate(fraction, run_seed)
                if fi == 0 and s == 0:
                    write_attributed_graph(graph, writer.path("nodes.tsv"), writer.path("edges.tsv"))
                    writer.register("nodes.tsv", "graph")
                    writer.register("edges.tsv", "graph")
                    write_labels(graph.node_ids, labels, writer.path("labels.tsv"))
                    writer.register("labels.tsv", "labels")
                detector, baseline, curve = self._evaluate(graph, labels, times, run_seed)
                common = {"fraction": fraction, "seed": s, "nodes": graph.node_count,
                          "prevalence": float(labels.mean())}
                rows.append({**common, "method": "detector", **detector})
                rows.append({**common, "method": "random", **baseline})
                curves.extend({"fraction": fraction, "seed": s, "t": t, "roc_auc": v}
                              for t, v in curve)

        writer.write_frame("sweep.csv", pd.DataFrame(rows), kind="sweep")
        writer.write_frame("auc_curve.csv", pd.DataFrame(curves), kind="curve")
        per_fraction = []
        for fraction in fractions:
            subset = [r for r in rows if r["fraction"] == fraction]
            per_fraction.append({
                "fraction": fraction,
                "detector": _metric_summary([r for r in subset if r["method"] == "detector"]),
                "random": _metric_summary([r for r in subset if r["method"] == "random"]),
            })
        detector_rows = [r for r in rows if r["method"] == "detector"]
        metrics = {
            "detector": {k: v["mean"] for k, v in _metric_summary(detector_rows).items()},
            "random": {k: v["mean"] for k, v in
                       _metric_summary([r for r in rows if r["method"] == "random"]).items()},
            "best_times": [r["best_time"] for r in detector_rows],
            "flag_times": [r["flag_time"] for r in detector_rows],
            "flagged": [r["flagged"] for r in detector_rows],
            "per_fraction": per_fraction,
        }
        writer.write_json("metrics.json", metrics, kind="metrics")
        return {"runs": len(detector_rows), "detector": metrics["detector"],
                "random": metrics["random"]}

    def _generate(self, fraction: float, run_seed: int):
        config = self.config
        if config.toy:
            graph, _, labels = toy_income_network(rng_seed=run_seed)
            return graph, labels
        synthetic = SyntheticConfig(n=config.n, mixing=config.mixing,
                                    attribute_dim=config.attribute_dim,
                                    anomaly_fraction=fraction,
                                    perturbed_attr_fraction=config.perturbed_attr_fraction,
                                    rng_seed=run_seed)
        graph, _, labels = generate_synthetic(synthetic)
        return graph, labels

    def _evaluate(self, graph: AttributedGraph, labels: np.ndarray, times: np.ndarray,
                  run_seed: int):
        """
        Concentrations on the grid. Ranking metrics come from the time with the
        highest ROC-AUC, threshold metrics from the time whose flags reach the
        highest anomaly-class F1 (ties: smallest t in both cases).
        """
        config = self.config
        sigma = resolve_sigma(graph, config.sigma_value(), pair_budget=config.pair_budget,
                              rng_seed=derive_seed(run_seed, "sigma"), pairs=config.sigma_pairs)
        L = laplacian(weight_edges(graph, sigma))
        decomposition = None
        if choose_method(L.order, config.method, config.dense_limit) == EXACT:
            decomposition = spectral_decomposition(L, dense_limit=config.dense_limit)

        profiles: List[ConcentrationProfile] = []
        for t in times:
            kernel = heat_kernel(L, float(t), workers=config.workers, decomposition=decomposition,
                                 **_kernel_options(config))
            profiles.append(concentration_profile(kernel))
        aucs = [roc_auc(p.values, labels) for p in profiles]
        best = int(np.argmax(aucs))
        if decomposition is not None:
            self._cross_check(profiles[best], decomposition)

        reports = [detect(p) for p in profiles]
        thresholded = [prf1(r.flagged, labels) for r in reports]
        flag_best = int(np.argmax([_anomaly_f1(r) for r in thresholded]))

        detector = evaluate(profiles[best].values, labels).to_dict()
        detector.update({k: v for k, v in thresholded[flag_best].to_dict().items()
                         if k not in ("roc_auc", "pr_auc")})
        detector["best_time"] = float(times[best])
        detector["flag_time"] = float(times[flag_best])
        detector["flagged"] = int(len(reports[flag_best].flagged))

        scores = random_baseline(graph.node_count, derive_seed(run_seed, "random"))
        random_report = detect(ConcentrationProfile.from_values(0.0, scores))
        baseline = evaluate(scores, labels, random_report.flagged).to_dict()
        baseline.update({"best_time": None, "flag_time": None,
                         "flagged": int(len(random_report.flagged))})
        return detector, baseline, list(zip(times.tolist(), aucs))

    def _cross_check(self, profile: ConcentrationProfile, decomposition) -> None:
        """Kernel-column concentrations against the diagonal of exp(-2tL)"""
        check = concentration_from_spectrum(decomposition, profile.time)
        gap = float(np.max(np.abs(check.values - profile.values)))
        if gap > SPECTRAL_CHECK_TOL:
            self.warn(f"kernel and spectral concentrations differ by {gap:.2e} at t={profile.time:g}")


class EvalCommand(BaseCommand):
    """Metrics for externally produced scores"""

    def command_type(self) -> CommandType:
        return CommandType.EVAL

    def execute(self, writer: ArtifactWriter) -> Dict[str, Any]:
        scores = load_scores(self.config.scores)
        labels = load_labels(self.config.labels)
        ordered, y = align_scores_labels(scores, labels)
        flagged = None
        if "flagged" in ordered.columns:
            flagged = np.flatnonzero(ordered["flagged"].to_numpy())
        result: EvalResult = evaluate(ordered["score"].to_numpy(), y, flagged)
        writer.write_json("metrics.json", result.to_dict(), kind="metrics")
        return result.to_dict()


# Registry of available subcommands
COMMAND_REGISTRY = {
    CommandType.SCAN.value: ScanCommand,
    CommandType.DETECT.value: DetectCommand,
    CommandType.BENCH.value: BenchCommand,
    CommandType.EVAL.value: EvalCommand,
    CommandType.SCORE_PARTITION.value: ScorePartitionCommand,
}


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _flag(parser: argparse.ArgumentParser, name: str, help_text: str) -> None:
    parser.add_argument(name, action="store_true", default=None, help=help_text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--workers", type=int, help="worker pool size (default: 1)")
    parser.add_argument("--seed", type=int, help="master random seed (default: 0)")
    parser.add_argument("-v", "--verbose", action="count", default=None,
                        help="-v for one line per stage, -vv for debug output")


def _add_graph(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nodes", help="nodes TSV (id, attributes..., optional label)")
    parser.add_argument("--edges", help="edges TSV (src, dst)")
    parser.add_argument("--dataset", help="dataset name under --datasets-dir")
    parser.add_argument("--datasets-dir", dest="datasets_dir")
    parser.add_argument("--attributes", type=_str_list,
                        help="comma-separated attribute names or 1-based positions")
    _flag(parser, "--standardize", "z-score every attribute column")
    _flag(parser, "--largest-component", "restrict to the largest connected component")


def _add_weighting(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma", help="'auto' or a positive number")
    parser.add_argument("--sigma-pairs", dest="sigma_pairs", choices=("all", "edges"))
    parser.add_argument("--pair-budget", dest="pair_budget", type=int)


def _add_kernel(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", choices=("auto", "exact", "chebyshev"))
    parser.add_argument("--degree", type=int, help="Chebyshev degree m (default: 30)")
    parser.add_argument("--dense-limit", dest="dense_limit", type=int,
                        help="largest N for the exact kernel (default: 8000)")
    _flag(parser, "--refine-bound", "tighten lambda_max by power iteration")


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-min", dest="t_min", type=float)
    parser.add_argument("--t-max", dest="t_max", type=float)
    parser.add_argument("--t-count", dest="t_count", type=int)


def _add_stability(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--runs", type=int, help="Louvain runs per time (default: 100)")
    parser.add_argument("--sparsify-eps", dest="sparsify_eps", type=float)
    parser.add_argument("--no-merge-singletons", dest="merge_singletons", action="store_false",
                        default=None, help="keep one-node contexts")
    parser.add_argument("--literal-eq5", "--literal-null-term", dest="literal_null_term",
                        action="store_true", default=None,
                        help="also score partitions with the uncorrected null term")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="context-anomaly",
        description="Multi-scale contextual anomaly detection in attributed networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="scan diffusion times, select scales, report anomalies")
    _add_common(p)
    _add_graph(p)
    _add_weighting(p)
    _add_kernel(p)
    _add_grid(p)
    _add_stability(p)
    p.add_argument("--at-times", dest="at_times", type=_float_list,
                   help="explicit comma-separated times (reports at every one)")
    p.add_argument("--dip-quantile", dest="dip_quantile", type=float)
    p.add_argument("--plateau-eps", dest="plateau_eps", type=float)
    p.add_argument("--min-plateau", dest="min_plateau", type=int)
    _flag(p, "--dump-kernel", "write the kernel at every reported time")
    _flag(p, "--plot", "render scan.png")

    p = sub.add_parser("detect", help="anomaly report at a single time")
    _add_common(p)
    _add_graph(p)
    _add_weighting(p)
    _add_kernel(p)
    _add_stability(p)
    p.add_argument("--t", type=float, help="diffusion time")
    _flag(p, "--contexts", "also find the contexts at t")
    _flag(p, "--dump-kernel", "write the kernel as kernel.csv")

    p = sub.add_parser("score-partition", help="stability of a given partition at time t")
    _add_common(p)
    _add_graph(p)
    _add_weighting(p)
    _add_kernel(p)
    _add_stability(p)
    p.add_argument("--t", type=float, help="diffusion time")
    p.add_argument("--partition", help="partition TSV (id, context) or JSON")

    p = sub.add_parser("bench", help="synthetic benchmark with injected anomalies")
    _add_common(p)
    _add_weighting(p)
    _add_kernel(p)
    _add_grid(p)
    p.add_argument("--n", type=int, help="number of nodes (default: 1000)")
    p.add_argument("--mixing", type=float, help="mixing parameter mu (default: 0.1)")
    p.add_argument("--attribute-dim", dest="attribute_dim", type=int)
    p.add_argument("--anomaly-fraction", dest="anomaly_fraction", type=float)
    p.add_argument("--perturbed-attr-fraction", dest="perturbed_attr_fraction", type=float)
    p.add_argument("--fractions", type=_float_list, help="comma-separated anomaly fractions")
    p.add_argument("--seeds", type=int, help="seeds per fraction (default: 1)")
    _flag(p, "--toy", "use the 160-node toy income network instead")
    p.add_argument("--scalability", type=_int_list,
                   help="comma-separated node counts for the kernel timing run")
    p.add_argument("--scalability-workers", dest="scalability_workers", type=_int_list)

    p = sub.add_parser("eval", help="metrics for externally produced scores")
    _add_common(p)
    p.add_argument("--scores", help="scores file (id, score[, flagged]); CSV or TSV")
    p.add_argument("--labels", help="labels TSV (id, label)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    configure_logging(args.verbose or 0)

    try:
        config = RunConfig.from_sources(flags, args.config)
        configure_logging(config.verbose)
        command = COMMAND_REGISTRY[args.command](config)
        result = command.run()
    except AnalysisError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return exc.exit_code

    print(json.dumps({"command": result.command, "artifacts": len(result.artifacts),
                      "out": config.out}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Generate the bundled example networks in the loader's TSV format.
Every graph is seeded, so reruns reproduce the files exactly.
"""

import argparse
from pathlib import Path

from src.bench.synthetic import SyntheticConfig, generate_synthetic, toy_income_network
from src.datasets.loader import write_attributed_graph, write_partition


def create_toy_income(datasets_dir: Path, seed: int) -> str:
    """
    160 employees in four income communities (rich, medium, poor, very poor)
    with three planted outliers:
        O1 rich_00      medium income among the rich
        O2 medium_00    very poor income, linked into the very poor office
        O3 very_poor_00 rich income among the very poor
    """
    graph, truth, _ = toy_income_network(rng_seed=seed)
    write_attributed_graph(graph, datasets_dir / "toy_income.nodes.tsv",
                           datasets_dir / "toy_income.edges.tsv")
    write_partition(truth, graph.node_ids, datasets_dir / "toy_income.truth.tsv")
    return f"toy_income: {graph.node_count} nodes, {graph.edge_count} edges, 3 outliers"


def create_synthetic(datasets_dir: Path, seed: int, n: int, fraction: float) -> str:
    """Planted-partition benchmark graph with injected contextual anomalies"""
    config = SyntheticConfig(n=n, anomaly_fraction=fraction, rng_seed=seed)
    graph, truth, labels = generate_synthetic(config)
    name = f"synthetic_{n}"
    write_attributed_graph(graph, datasets_dir / f"{name}.nodes.tsv",
                           datasets_dir / f"{name}.edges.tsv")
    write_partition(truth, graph.node_ids, datasets_dir / f"{name}.truth.tsv")
    return (f"{name}: {graph.node_count} nodes, {graph.edge_count} edges, "
            f"{truth.num_contexts} communities, {int(labels.sum())} anomalies")


def main():
    """Generate all datasets"""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="datasets", help="target directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=1000, help="synthetic network size")
    parser.add_argument("--anomaly-fraction", type=float, default=0.05)
    args = parser.parse_args()

    datasets_dir = Path(args.out)
    datasets_dir.mkdir(exist_ok=True)

    created = [
        create_toy_income(datasets_dir, args.seed),
        create_synthetic(datasets_dir, args.seed, args.n, args.anomaly_fraction),
    ]
    for line in created:
        print(f"✓ {line}")
    print(f"\nGenerated {len(created)} datasets in {datasets_dir}/")


if __name__ == "__main__":
    main()

"""Command-line entry point for reproducible experiment runs.

Subcommands: generate, maximize, simulate, credits, experiment, report.
Each run resolves its configuration (defaults, then a TOML or JSON config
file, then flag overrides), validates it fully before touching any data,
and writes a ``manifest.json`` echoing the resolved configuration. Feeding
a manifest back through ``--config`` reproduces every output byte for
byte, with one deliberate exception: ``runtimes.csv`` records wall-clock
measurements and is therefore volatile.

Exit codes: 0 success, 1 computation error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import random
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import baselines, datagen, evaluation
from .errors import ConfigError, EvimaxError
from .graph import InfluenceGraph, load_action_log, load_graph, save_graph
from .maximize import SeedResult, maximize
from .measures import MeasureKind

VOLATILE_FILES = ("runtimes.csv",)


# -- config plumbing ---------------------------------------------------------


def _load_config_file(path: Path, command: str) -> dict:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_bytes()
    if path.suffix == ".json":
        data = json.loads(text)
    else:
        data = tomllib.loads(text.decode("utf-8"))
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a table/object: {path}")
    # Accept a manifest written by a previous run.
    if set(data) == {"command", "config"}:
        if data["command"] != command:
            raise ConfigError(
                f"manifest is for command {data['command']!r}, not {command!r}"
            )
        data = data["config"]
    return data


def _resolve_config(command: str, defaults: dict, args: argparse.Namespace) -> dict:
    config = dict(defaults)
    if getattr(args, "config", None):
        file_cfg = _load_config_file(Path(args.config), command)
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        config.update(file_cfg)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def _require(config: dict, key: str) -> object:
    if config.get(key) in (None, ""):
        raise ConfigError(f"missing required config key {key!r}")
    return config[key]


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_bytes(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _write_json(path: Path, obj) -> None:
    _write_bytes(path, (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8"))


def _write_csv(path: Path, rows: Sequence[Sequence[object]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    _write_bytes(path, buf.getvalue().encode("utf-8"))


def _write_manifest(out: Path, command: str, config: dict) -> None:
    _write_json(out / "manifest.json", {"command": command, "config": config})


def _write_runtimes(out: Path, rows: Sequence[Tuple[str, str, object, float]]) -> None:
    table: List[Sequence[object]] = [["command", "label", "k", "elapsed_seconds"]]
    table.extend(rows)
    _write_csv(out / "runtimes.csv", table)


def _load_graph_from_config(config: dict) -> InfluenceGraph:
    return load_graph(
        _require(config, "edges"),
        node_file=config.get("nodes") or None,
        messages_file=config.get("messages") or None,
        lexicon_file=config.get("lexicon") or None,
        discount=float(config.get("discount", 0.1)),
        literal_alpha=bool(config.get("literal_alpha", False)),
    )


def _derived_seed(root: int, *parts: int) -> int:
    return random.Random((root, *parts)).randrange(2**32)


# -- generate ----------------------------------------------------------------

GENERATE_DEFAULTS = {
    "nodes": 1000,
    "edges": 7000,
    "hub_count": 45,
    "hub_out_low": 15,
    "hub_out_high": 40,
    "threshold": 15,
    "min_influence": 0.5,
    "min_pos_opinion": 0.8,
    "min_neighbor_pos": 0.3,
    "min_neighbor_neg": 0.8,
    "positive_fraction": 0.5,
    "seed": 0,
}


def _generator_params(config: dict, seed: int) -> datagen.GeneratorParams:
    topology = datagen.TopologySpec(
        n_nodes=int(config["nodes"]),
        n_edges=int(config["edges"]),
        hub_count=int(config["hub_count"]),
        hub_out_low=int(config["hub_out_low"]),
        hub_out_high=int(config["hub_out_high"]),
    )
    return datagen.GeneratorParams(
        topology=topology,
        influencer_outdegree_threshold=int(config["threshold"]),
        min_influence=float(config["min_influence"]),
        min_pos_opinion=float(config["min_pos_opinion"]),
        min_neighbor_pos=float(config["min_neighbor_pos"]),
        min_neighbor_neg=float(config["min_neighbor_neg"]),
        positive_fraction=float(config["positive_fraction"]),
        rng_seed=seed,
    )


def cmd_generate(args: argparse.Namespace) -> int:
    config = _resolve_config("generate", GENERATE_DEFAULTS, args)
    params = _generator_params(config, int(config["seed"]))
    out = _out_dir(args)
    graph, truth = datagen.generate_network(params)
    save_graph(graph, out / "edges.csv", out / "nodes.csv")
    _write_bytes(out / "ground_truth.json", (truth.to_json() + "\n").encode("utf-8"))
    _write_manifest(out, "generate", config)
    print(
        f"generated {graph.n} nodes / {graph.edge_count} edges; "
        f"{len(truth.influencers)} influencers "
        f"({len(truth.positive_influencers)} positive) -> {out}"
    )
    return 0


# -- maximize ----------------------------------------------------------------

MAXIMIZE_DEFAULTS = {
    "edges": None,
    "nodes": None,
    "messages": None,
    "lexicon": None,
    "model": "evidential",
    "measure": "plain",
    "k": 50,
    "dedupe_direct": False,
    "literal_alpha": False,
    "discount": 0.1,
    "log": None,
    "tau": None,
    "prune_fraction": 0.5,
    "seed": 0,
}


def cmd_maximize(args: argparse.Namespace) -> int:
    config = _resolve_config("maximize", MAXIMIZE_DEFAULTS, args)
    model = config["model"]
    if model not in ("evidential", "cd", "oc"):
        raise ConfigError(f"unknown model {model!r}; expected evidential, cd, or oc")
    k = int(config["k"])
    if k < 0:
        raise ConfigError("k must be >= 0")
    if model == "evidential":
        kind = MeasureKind.from_name(str(config["measure"]))
        label = kind.value
    else:
        label = model
        if model == "cd":
            _require(config, "log")
    graph = _load_graph_from_config(config)

    if model == "evidential":
        result = maximize(graph, k, kind, dedupe_direct=bool(config["dedupe_direct"]))
    elif model == "cd":
        records = load_action_log(config["log"])
        tau = config["tau"]
        table = baselines.cd_assign_credits(
            graph, records, tau=None if tau in (None, "") else float(tau)
        )
        result = baselines.cd_maximize(table, k)
    else:
        result = baselines.oc_maximize(
            graph,
            k,
            rng_seed=int(config["seed"]),
            prune_fraction=float(config["prune_fraction"]),
        )

    out = _out_dir(args)
    _write_bytes(
        out / f"seeds_{label}.json",
        (result.to_json(include_elapsed=False) + "\n").encode("utf-8"),
    )
    _write_manifest(out, "maximize", config)
    _write_runtimes(out, [("maximize", label, len(result.seeds), result.elapsed)])
    sigma_final = result.sigma_values[-1] if result.sigma_values else 0.0
    print(
        f"{label}: {len(result.seeds)} seeds, objective {sigma_final:.4f}, "
        f"{result.elapsed:.3f}s -> {out / f'seeds_{label}.json'}"
    )
    return 0


# -- simulate ----------------------------------------------------------------

SIMULATE_DEFAULTS = {
    "edges": None,
    "nodes": None,
    "messages": None,
    "lexicon": None,
    "discount": 0.1,
    "literal_alpha": False,
    "seeds_file": None,
    "seeds": None,
    "model": "ICM",
    "p": None,
    "weight": None,
    "runs": 100,
    "wc_target_indegree": False,
    "seed": 0,
}


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _resolve_config("simulate", SIMULATE_DEFAULTS, args)
    graph = _load_graph_from_config(config)
    if config.get("seeds_file"):
        seeds = SeedResult.from_json(Path(config["seeds_file"]).read_text()).seeds
    elif config.get("seeds"):
        raw = config["seeds"]
        seeds = [s.strip() for s in raw.split(",")] if isinstance(raw, str) else list(raw)
    else:
        raise ConfigError("simulate needs seeds_file or seeds")
    cfg = baselines.CascadeConfig(
        model=str(config["model"]).upper(),
        edge_prob=None if config["p"] is None else float(config["p"]),
        edge_weight=None if config["weight"] is None else float(config["weight"]),
        monte_carlo_runs=int(config["runs"]),
        rng_seed=int(config["seed"]),
        wc_target_indegree=bool(config["wc_target_indegree"]),
    )
    start = time.perf_counter()
    spread = baselines.cascade_spread(graph, seeds, cfg)
    elapsed = time.perf_counter() - start
    out = _out_dir(args)
    _write_json(
        out / "spread.json",
        {
            "model": cfg.model,
            "runs": cfg.monte_carlo_runs,
            "seed": cfg.rng_seed,
            "n_seeds": len(seeds),
            "seeds": sorted(seeds),
            "mean_spread": spread,
        },
    )
    _write_manifest(out, "simulate", config)
    _write_runtimes(out, [("simulate", cfg.model, len(seeds), elapsed)])
    print(f"{cfg.model}: mean spread {spread:.4f} over {cfg.monte_carlo_runs} runs")
    return 0


# -- credits -----------------------------------------------------------------

CREDITS_DEFAULTS = {
    "edges": None,
    "nodes": None,
    "messages": None,
    "lexicon": None,
    "discount": 0.1,
    "literal_alpha": False,
    "log": None,
    "tau": None,
}


def cmd_credits(args: argparse.Namespace) -> int:
    config = _resolve_config("credits", CREDITS_DEFAULTS, args)
    graph = _load_graph_from_config(config)
    records = load_action_log(_require(config, "log"))
    tau = config["tau"]
    table = baselines.cd_assign_credits(
        graph, records, tau=None if tau in (None, "") else float(tau)
    )
    event_rows: List[Sequence[object]] = [["user", "action", "influencer", "direct", "total"]]
    for user, action in table.events():
        credits = table.total[(user, action)]
        direct = table.direct.get((user, action), {})
        for v in sorted(credits):
            event_rows.append(
                [user, action, v, repr(direct.get(v, 0.0)), repr(credits[v])]
            )
    node_rows: List[Sequence[object]] = [["node", "total_credit"]]
    for node in table.nodes:
        node_rows.append([node, repr(table.node_credit[node])])
    out = _out_dir(args)
    _write_csv(out / "credits.csv", event_rows)
    _write_csv(out / "node_credits.csv", node_rows)
    _write_manifest(out, "credits", config)
    print(f"assigned credits for {len(table.events())} credited events -> {out}")
    return 0


# -- experiment --------------------------------------------------------------

EXPERIMENT_DEFAULTS = {
    **{k: v for k, v in GENERATE_DEFAULTS.items()},
    "parameter": "min_influence",
    "grid": (0.1, 0.3, 0.5, 0.7, 0.9),
    "repetitions": 20,
    "k": 50,
    "measures": ("plain", "s1-prob", "s2-prob", "s3-prob"),
    "category": "influencers",
    "dedupe_direct": False,
}

_SWEEPABLE = ("min_influence", "min_pos_opinion", "min_neighbor_pos", "min_neighbor_neg")


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _resolve_config("experiment", EXPERIMENT_DEFAULTS, args)
    parameter = config["parameter"]
    if parameter not in _SWEEPABLE:
        raise ConfigError(f"parameter must be one of {_SWEEPABLE}, got {parameter!r}")
    if config["category"] not in datagen.CATEGORIES:
        raise ConfigError(f"category must be one of {datagen.CATEGORIES}")
    reps = int(config["repetitions"])
    if reps < 1:
        raise ConfigError("repetitions must be >= 1")
    grid = [float(v) for v in config["grid"]]
    if not grid:
        raise ConfigError("grid must be non-empty")
    kinds = [MeasureKind.from_name(str(m)) for m in config["measures"]]
    if not kinds:
        raise ConfigError("measures must be non-empty")
    k = int(config["k"])
    root_seed = int(config["seed"])
    dedupe = bool(config["dedupe_direct"])

    rows: List[Sequence[object]] = [
        ["parameter", "value", "measure", "category", "repetitions", "failed", "mean_accuracy"]
    ]
    start = time.perf_counter()
    for vi, value in enumerate(grid):
        scores: Dict[str, List[float]] = {kind.value: [] for kind in kinds}
        failed = 0
        for rep in range(reps):
            overrides = dict(config)
            overrides[parameter] = value
            params = _generator_params(overrides, _derived_seed(root_seed, vi, rep))
            try:
                graph, truth = datagen.generate_network(params)
            except EvimaxError:
                failed += 1
                continue
            labels = truth.category(config["category"])
            for kind in kinds:
                result = maximize(graph, k, kind, dedupe_direct=dedupe)
                scores[kind.value].append(evaluation.accuracy(result.seeds, labels))
        for kind in kinds:
            values = scores[kind.value]
            mean = repr(sum(values) / len(values)) if values else ""
            rows.append(
                [parameter, repr(value), kind.value, config["category"], reps, failed, mean]
            )
    elapsed = time.perf_counter() - start

    out = _out_dir(args)
    _write_csv(out / "accuracy.csv", rows)
    _write_manifest(out, "experiment", config)
    _write_runtimes(out, [("experiment", parameter, k, elapsed)])
    print(
        f"swept {parameter} over {len(grid)} values x {reps} reps "
        f"({elapsed:.1f}s) -> {out / 'accuracy.csv'}"
    )
    return 0


# -- report ------------------------------------------------------------------

REPORT_DEFAULTS = {
    "seed_files": None,
    "edges": None,
    "nodes": None,
    "messages": None,
    "lexicon": None,
    "discount": 0.1,
    "literal_alpha": False,
    "metrics": None,
    "confidence": 0.95,
}


def _stat_cells(stats: Optional[evaluation.OpinionStats]) -> List[object]:
    if stats is None:
        return ["", "", "", "", ""]
    return [
        stats.n,
        repr(stats.mean_pos),
        repr(stats.halfwidth_pos),
        repr(stats.mean_neg),
        repr(stats.halfwidth_neg),
    ]


def cmd_report(args: argparse.Namespace) -> int:
    config = _resolve_config("report", REPORT_DEFAULTS, args)
    raw_files = _require(config, "seed_files")
    if isinstance(raw_files, str):
        raw_files = [p.strip() for p in raw_files.split(",")]
    paths = [Path(p) for p in raw_files]
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise EvimaxError("missing seed files: " + ", ".join(missing))
    results = [(p.stem, SeedResult.from_json(p.read_text())) for p in paths]

    out = _out_dir(args)
    _write_csv(out / "intersections.csv", evaluation.intersection_matrix(results))

    if config.get("edges"):
        graph = _load_graph_from_config(config)
        rows: List[Sequence[object]] = [
            [
                "model", "n_seeds", "mean_pos", "ci_pos", "mean_neg", "ci_neg",
                "n_neighbors", "nb_mean_pos", "nb_ci_pos", "nb_mean_neg", "nb_ci_neg",
            ]
        ]
        for label, result in results:
            report = evaluation.opinion_report(
                graph, result.seeds, confidence=float(config["confidence"])
            )
            rows.append([label] + _stat_cells(report.seeds) + _stat_cells(report.neighbors))
        _write_csv(out / "opinions.csv", rows)

    if config.get("metrics"):
        metrics = evaluation.load_node_metrics(config["metrics"])
        for label, result in results:
            curve_rows, _ = evaluation.accumulated_curves(result, metrics)
            table: List[Sequence[object]] = [
                ["rank", "node", "follow", "mention", "retweet", "tweet"]
            ]
            for row in curve_rows:
                table.append(
                    [row["rank"], row["node"]]
                    + [repr(row[c]) for c in evaluation.METRIC_COLUMNS]
                )
            _write_csv(out / f"curves_{label}.csv", table)

    _write_manifest(out, "report", config)
    print(f"report over {len(results)} seed sets -> {out}")
    return 0


# -- parser ------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, with_measure: bool = False) -> None:
    sub.add_argument("--config", help="TOML or JSON config file (or a manifest.json)")
    sub.add_argument("--out", help="output directory (default: current directory)")
    sub.add_argument("--seed", type=int, help="root RNG seed")
    if with_measure:
        sub.add_argument("--measure", help="influence measure name")
        sub.add_argument("--k", type=int, help="number of seeds to select")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evimax",
        description="Opinion-aware evidential influence maximization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a labeled synthetic network")
    _add_common(p)
    for key in ("nodes", "edges", "hub_count", "threshold"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    for key in ("min_influence", "min_pos_opinion", "min_neighbor_pos",
                "min_neighbor_neg", "positive_fraction"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("maximize", help="select a seed set")
    _add_common(p, with_measure=True)
    p.add_argument("--edges", help="edge CSV file")
    p.add_argument("--nodes", help="node CSV file")
    p.add_argument("--messages", help="tagged message file")
    p.add_argument("--lexicon", help="polarity lexicon TSV")
    p.add_argument("--model", choices=("evidential", "cd", "oc"))
    p.add_argument("--log", help="action log CSV (cd model)")
    p.add_argument("--tau", type=float, help="credit time window (cd model)")
    p.add_argument("--dedupe-direct", dest="dedupe_direct", action="store_const", const=True)
    p.add_argument("--literal-alpha", dest="literal_alpha", action="store_const", const=True)
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("simulate", help="Monte-Carlo cascade spread of a seed set")
    _add_common(p)
    p.add_argument("--edges")
    p.add_argument("--nodes")
    p.add_argument("--seeds-file", dest="seeds_file", help="seed-result JSON")
    p.add_argument("--seeds", help="comma-separated node ids")
    p.add_argument("--model", choices=("ICM", "WC", "LTM", "icm", "wc", "ltm"))
    p.add_argument("--p", type=float, help="constant edge probability (ICM)")
    p.add_argument("--weight", type=float, help="constant edge weight (LTM)")
    p.add_argument("--runs", type=int)
    p.add_argument(
        "--wc-target-indegree", dest="wc_target_indegree", action="store_const", const=True
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("credits", help="scan an action log into influence credits")
    _add_common(p)
    p.add_argument("--edges")
    p.add_argument("--nodes")
    p.add_argument("--log")
    p.add_argument("--tau", type=float)
    p.set_defaults(func=cmd_credits)

    p = sub.add_parser("experiment", help="accuracy sweep over a generator parameter")
    _add_common(p, with_measure=True)
    p.add_argument("--parameter", choices=_SWEEPABLE)
    p.add_argument("--grid", type=lambda s: [float(v) for v in s.split(",")])
    p.add_argument("--repetitions", type=int)
    p.add_argument("--measures", type=lambda s: [m.strip() for m in s.split(",")])
    p.add_argument("--category", choices=datagen.CATEGORIES)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="intersections, opinion tables, metric curves")
    _add_common(p)
    p.add_argument(
        "--seed-files", dest="seed_files",
        type=lambda s: [f.strip() for f in s.split(",")],
        help="comma-separated seed-result JSON files",
    )
    p.add_argument("--edges")
    p.add_argument("--nodes")
    p.add_argument("--metrics", help="node metrics CSV for accumulated curves")
    p.add_argument("--confidence", type=float)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (EvimaxError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Detection accuracy, seed-set comparisons, and report rows.

Accuracy normalizes by the size of the ground-truth category. Confidence
intervals use the normal approximation z * s / sqrt(n) with the population
standard deviation.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import EmptySeedSetError, ParseError, UndefinedMetricError
from .graph import InfluenceGraph
from .maximize import SeedResult

log = logging.getLogger(__name__)

METRIC_COLUMNS = ("follow", "mention", "retweet", "tweet")


def accuracy(detected: Iterable[str], truth: Iterable[str]) -> float:
    """Share of the labeled set that was detected: |detected & truth| / |truth|."""
    truth_set = set(truth)
    if not truth_set:
        raise UndefinedMetricError("accuracy is undefined for an empty truth set")
    return len(set(detected) & truth_set) / len(truth_set)


def seed_intersection(a: SeedResult, b: SeedResult) -> int:
    """Number of seeds the two results share."""
    return len(set(a.seeds) & set(b.seeds))


def intersection_matrix(results: Sequence[Tuple[str, SeedResult]]) -> List[List[object]]:
    """Symmetric table of pairwise seed intersections, labels included."""
    labels = [name for name, _ in results]
    rows: List[List[object]] = [["model"] + labels]
    for name_a, res_a in results:
        row: List[object] = [name_a]
        for _, res_b in results:
            row.append(seed_intersection(res_a, res_b))
        rows.append(row)
    return rows


@dataclass(frozen=True)
class OpinionStats:
    """Mean positive/negative opinion with CI half-widths over a node set."""

    n: int
    mean_pos: float
    halfwidth_pos: float
    mean_neg: float
    halfwidth_neg: float


@dataclass(frozen=True)
class OpinionReport:
    seeds: OpinionStats
    neighbors: Optional[OpinionStats]  # None when the seeds have no out-neighbors


def _stats(values_pos: Sequence[float], values_neg: Sequence[float], z: float) -> OpinionStats:
    n = len(values_pos)
    mean_pos = sum(values_pos) / n
    mean_neg = sum(values_neg) / n
    var_pos = sum((x - mean_pos) ** 2 for x in values_pos) / n
    var_neg = sum((x - mean_neg) ** 2 for x in values_neg) / n
    return OpinionStats(
        n=n,
        mean_pos=mean_pos,
        halfwidth_pos=z * var_pos ** 0.5 / n ** 0.5,
        mean_neg=mean_neg,
        halfwidth_neg=z * var_neg ** 0.5 / n ** 0.5,
    )


def opinion_report(
    g: InfluenceGraph, seeds: Iterable[str], confidence: float = 0.95
) -> OpinionReport:
    """Opinion means over the seeds and over the union of their out-neighbors."""
    seed_list = list(dict.fromkeys(seeds))
    if not seed_list:
        raise EmptySeedSetError("opinion report needs at least one seed")
    if not 0.0 < confidence < 1.0:
        raise UndefinedMetricError(f"confidence {confidence} outside (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)

    seed_pos = [g.opinion(s).pos for s in seed_list]
    seed_neg = [g.opinion(s).neg for s in seed_list]

    neighbor_ids: Dict[str, None] = {}
    for s in seed_list:
        for v in g.out_neighbors(s):
            neighbor_ids.setdefault(v)
    if neighbor_ids:
        nb_pos = [g.opinion(v).pos for v in neighbor_ids]
        nb_neg = [g.opinion(v).neg for v in neighbor_ids]
        neighbors = _stats(nb_pos, nb_neg, z)
    else:
        neighbors = None
    return OpinionReport(seeds=_stats(seed_pos, seed_neg, z), neighbors=neighbors)


def accumulated_curves(
    result: SeedResult, node_metrics: Mapping[str, Tuple[float, float, float, float]]
) -> Tuple[List[dict], Tuple[str, ...]]:
    """Cumulative follow/mention/retweet/tweet counts along the seed ranking.

    Nodes missing from the metrics map count as zero; their ids come back
    alongside the rows so callers can surface the gap.
    """
    rows: List[dict] = []
    missing: List[str] = []
    running = [0.0, 0.0, 0.0, 0.0]
    for rank, node in enumerate(result.seeds, start=1):
        values = node_metrics.get(node)
        if values is None:
            missing.append(node)
            values = (0.0, 0.0, 0.0, 0.0)
        running = [r + v for r, v in zip(running, values)]
        row = {"rank": rank, "node": node}
        row.update(dict(zip(METRIC_COLUMNS, running)))
        rows.append(row)
    if missing:
        log.warning("no metrics for %d seeds; counted as zero", len(missing))
    return rows, tuple(missing)


def load_node_metrics(path) -> Dict[str, Tuple[float, float, float, float]]:
    """Read the per-node metric CSV: node, follow, mention, retweet, tweet."""
    path = Path(path)
    metrics: Dict[str, Tuple[float, float, float, float]] = {}
    header = None
    with path.open(encoding="utf-8", newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if header is None:
                header = [c.lower() for c in cells]
                if header != ["node"] + list(METRIC_COLUMNS):
                    raise ParseError(path, line_no, f"bad metrics header {row!r}")
                continue
            if len(cells) != 5:
                raise ParseError(path, line_no, f"expected 5 columns, got {len(cells)}")
            try:
                metrics[cells[0]] = tuple(float(c) for c in cells[1:5])
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
    if header is None:
        raise ParseError(path, 1, "missing header row")
    return metrics

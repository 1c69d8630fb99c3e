"""Ground-truth-labeled synthetic networks.

The default topology is a directed preferential-attachment graph with an
explicit hub population: hubs get heavy out-degrees (at or above the
influencer threshold), everyone else stays safely below it, and targets
are drawn with in-degree bias so the usual social-graph in-hubs emerge.
Influence and opinion values are then layered on top: the varied quantity
of each sub-population is drawn uniform on [min, 1], its complement on
[0, min).

Everything is driven by one seeded RNG, so a (params, seed) pair pins the
graph and its labels bit for bit.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import ConfigError, GenerationError
from .graph import InfluenceGraph, edge_bba_from_influence
from .opinion import OpinionDistribution


@dataclass(frozen=True)
class TopologySpec:
    """Shape of the synthetic base topology."""

    n_nodes: int = 1000
    n_edges: int = 7000
    hub_count: int = 45
    hub_out_low: int = 15
    hub_out_high: int = 40
    uniform_target_share: float = 0.2

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ConfigError("topology needs at least 2 nodes")
        if self.hub_count < 0 or self.hub_count > self.n_nodes:
            raise ConfigError("hub_count outside [0, n_nodes]")
        if self.hub_out_low > self.hub_out_high:
            raise ConfigError("hub_out_low exceeds hub_out_high")
        if self.hub_out_high >= self.n_nodes:
            raise ConfigError("hub out-degree cannot reach the node count")
        if self.n_edges < self.hub_count * self.hub_out_low:
            raise ConfigError("n_edges too small for the requested hubs")


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of the ground-truth generator."""

    topology: TopologySpec = field(default_factory=TopologySpec)
    edges: Optional[Tuple[Tuple[str, str], ...]] = None
    influencer_outdegree_threshold: int = 15
    min_influence: float = 0.5
    min_pos_opinion: float = 0.8
    min_neighbor_pos: float = 0.3
    min_neighbor_neg: float = 0.8
    positive_fraction: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.influencer_outdegree_threshold < 1:
            raise ConfigError("influencer threshold must be >= 1")
        for name in ("min_influence", "min_pos_opinion", "min_neighbor_pos",
                     "min_neighbor_neg", "positive_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class GroundTruth:
    """Influencer label sets attached to a generated network."""

    influencers: FrozenSet[str]
    positive_influencers: FrozenSet[str]
    pos_influencing_pos: FrozenSet[str]
    pos_influencing_neg: FrozenSet[str]

    def __post_init__(self):
        if not self.positive_influencers <= self.influencers:
            raise ValueError("positive influencers must be influencers")
        if self.pos_influencing_pos & self.pos_influencing_neg:
            raise ValueError("the two positive subsets must be disjoint")
        if self.pos_influencing_pos | self.pos_influencing_neg != self.positive_influencers:
            raise ValueError("the two subsets must cover the positive influencers")

    def category(self, name: str) -> FrozenSet[str]:
        try:
            return getattr(self, name)
        except AttributeError:
            raise ConfigError(f"unknown ground-truth category {name!r}") from None

    def to_dict(self) -> dict:
        return {
            "influencers": sorted(self.influencers),
            "positive_influencers": sorted(self.positive_influencers),
            "pos_influencing_pos": sorted(self.pos_influencing_pos),
            "pos_influencing_neg": sorted(self.pos_influencing_neg),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruth":
        return cls(
            influencers=frozenset(data["influencers"]),
            positive_influencers=frozenset(data["positive_influencers"]),
            pos_influencing_pos=frozenset(data["pos_influencing_pos"]),
            pos_influencing_neg=frozenset(data["pos_influencing_neg"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        return cls.from_dict(json.loads(text))


CATEGORIES = (
    "influencers",
    "positive_influencers",
    "pos_influencing_pos",
    "pos_influencing_neg",
)


def _out_degree_sequence(spec: TopologySpec, rng: random.Random) -> List[int]:
    """Hub degrees in [low, high], the rest below low with the exact edge total."""
    n, hubs = spec.n_nodes, spec.hub_count
    degrees = [0] * n
    for i in range(hubs):
        degrees[i] = rng.randint(spec.hub_out_low, spec.hub_out_high)
    rest = spec.n_edges - sum(degrees[:hubs])
    others = n - hubs
    if others == 0:
        if rest != 0:
            raise GenerationError("edge total unreachable with hubs only")
        return degrees
    cap = max(1, spec.hub_out_low - 3)
    if rest < 0 or rest > others * cap:
        raise GenerationError(
            f"cannot place {rest} non-hub edges over {others} nodes (cap {cap})"
        )
    base = rest // others
    if base >= cap:
        base = cap - 1
    for i in range(hubs, n):
        degrees[i] = base
    short = rest - base * others
    # Sprinkle the remainder one edge at a time, staying under the cap.
    while short > 0:
        i = rng.randrange(hubs, n)
        if degrees[i] < cap:
            degrees[i] += 1
            short -= 1
    return degrees


def synthetic_topology(spec: TopologySpec, rng: random.Random) -> List[Tuple[int, int]]:
    """Directed edge list; targets drawn with in-degree preference."""
    degrees = _out_degree_sequence(spec, rng)
    n = spec.n_nodes
    pool = list(range(n))  # one base entry per node, grows with in-degree
    edges: List[Tuple[int, int]] = []
    for u in range(n):
        chosen: Set[int] = set()
        tries = 0
        while len(chosen) < degrees[u]:
            tries += 1
            if tries > 200 * degrees[u] + 1000:
                raise GenerationError(f"could not find {degrees[u]} targets for node {u}")
            if rng.random() < spec.uniform_target_share:
                v = rng.randrange(n)
            else:
                v = pool[rng.randrange(len(pool))]
            if v == u or v in chosen:
                continue
            chosen.add(v)
        for v in sorted(chosen):
            edges.append((u, v))
            pool.append(v)
    return edges


def _bounded_uniform(rng: random.Random, low: float, high: float) -> float:
    if high <= low:
        return low
    return rng.uniform(low, high)


def generate_network(params: GeneratorParams) -> Tuple[InfluenceGraph, GroundTruth]:
    """Build a labeled network: influence values plus opinion populations.

    Influencers are the nodes whose out-degree reaches the threshold; their
    out-edges carry influence drawn from [min_influence, 1], all other
    edges from [0, min_influence). A random slice of the influencers turns
    positive (opinion from [min_pos_opinion, 1]) and is split evenly in
    two; out-neighbors of the first half lean positive, of the second half
    negative. Positive influencers are never overridden by the neighbor
    rules, so their labels stay truthful.
    """
    rng = random.Random(params.rng_seed)

    if params.edges is not None:
        ids = list(dict.fromkeys([n for e in params.edges for n in e]))
        index = {v: i for i, v in enumerate(ids)}
        edge_list = [(index[s], index[d]) for s, d in params.edges]
        n = len(ids)
    else:
        edge_list = synthetic_topology(params.topology, rng)
        n = params.topology.n_nodes
        ids = [f"n{i}" for i in range(n)]

    out_deg = [0] * n
    out_nbrs: List[List[int]] = [[] for _ in range(n)]
    for u, v in edge_list:
        out_deg[u] += 1
        out_nbrs[u].append(v)

    threshold = params.influencer_outdegree_threshold
    influencer_idx = [u for u in range(n) if out_deg[u] >= threshold]
    if not influencer_idx:
        raise GenerationError(
            f"no node reaches out-degree {threshold}; lower the threshold or densify"
        )
    influencer_set = set(influencer_idx)

    # Influence values: hot out-edges for influencers, background elsewhere.
    edge_bbas = {}
    for u, v in sorted(edge_list):
        if u in influencer_set:
            x = _bounded_uniform(rng, params.min_influence, 1.0)
        else:
            x = _bounded_uniform(rng, 0.0, params.min_influence)
        edge_bbas[(ids[u], ids[v])] = edge_bba_from_influence(x)

    # Positive influencers and their even random split.
    n_positive = round(len(influencer_idx) * params.positive_fraction)
    positive_idx = sorted(rng.sample(influencer_idx, n_positive))
    shuffled = list(positive_idx)
    rng.shuffle(shuffled)
    half = len(shuffled) // 2
    pos_pos_idx = sorted(shuffled[:half])
    pos_neg_idx = sorted(shuffled[half:])
    positive_set = set(positive_idx)

    # Opinions: background first, then the special populations.
    opinions: Dict[int, Tuple[float, float]] = {}
    for v in range(n):
        pos = _bounded_uniform(rng, 0.0, params.min_pos_opinion)
        neg = _bounded_uniform(rng, 0.0, min(params.min_neighbor_neg, 1.0 - pos))
        opinions[v] = (pos, neg)
    for v in positive_idx:
        pos = _bounded_uniform(rng, params.min_pos_opinion, 1.0)
        neg = _bounded_uniform(rng, 0.0, 1.0 - pos)
        opinions[v] = (pos, neg)
    for u in pos_pos_idx:
        for v in sorted(out_nbrs[u]):
            if v in positive_set:
                continue
            pos = _bounded_uniform(rng, params.min_neighbor_pos, 1.0)
            neg = _bounded_uniform(rng, 0.0, 1.0 - pos)
            opinions[v] = (pos, neg)
    for u in pos_neg_idx:
        for v in sorted(out_nbrs[u]):
            if v in positive_set:
                continue
            neg = _bounded_uniform(rng, params.min_neighbor_neg, 1.0)
            pos = _bounded_uniform(rng, 0.0, 1.0 - neg)
            opinions[v] = (pos, neg)

    node_opinions = {
        ids[v]: OpinionDistribution(pos, neg, max(0.0, 1.0 - pos - neg))
        for v, (pos, neg) in opinions.items()
    }
    graph = InfluenceGraph(ids, node_opinions, edge_bbas)
    truth = GroundTruth(
        influencers=frozenset(ids[v] for v in influencer_idx),
        positive_influencers=frozenset(ids[v] for v in positive_idx),
        pos_influencing_pos=frozenset(ids[v] for v in pos_pos_idx),
        pos_influencing_neg=frozenset(ids[v] for v in pos_neg_idx),
    )
    return graph, truth

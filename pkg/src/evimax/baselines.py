"""Comparison models: cascade simulators, credit distribution, and the
opinion-based cascading baseline.

Cascade runs draw from per-run RNG streams derived from the config seed,
so estimates are bit-reproducible and runs could be farmed out in any
order. The credit scan is sequential over the time-sorted log; the
opinion-cascading picker is sequential by construction.
"""

from __future__ import annotations

import heapq
import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .errors import ConfigError
from .graph import ActionRecord, InfluenceGraph
from .maximize import SeedResult

log = logging.getLogger(__name__)

CASCADE_MODELS = ("ICM", "WC", "LTM")

EdgeValues = Union[float, Mapping[Tuple[str, str], float], None]

# Guard for the inactive-neighbor term when a threshold draw is zero.
THETA_EPS = 1e-6


@dataclass(frozen=True)
class CascadeConfig:
    """Parameters for one Monte-Carlo spread estimation.

    ``edge_prob`` (ICM) and ``edge_weight`` (LTM) accept a constant, a per-
    edge map keyed by (src, dst) ids, or None to fall back on each edge's
    influence mass m({I}). WC ignores both and uses 1/degree of the
    attempting node, or 1/in-degree of the target when
    ``wc_target_indegree`` is set.
    """

    model: str = "ICM"
    edge_prob: EdgeValues = None
    edge_weight: EdgeValues = None
    monte_carlo_runs: int = 100
    rng_seed: int = 0
    wc_target_indegree: bool = False

    def __post_init__(self):
        if self.model not in CASCADE_MODELS:
            raise ConfigError(f"unknown cascade model {self.model!r}; expected {CASCADE_MODELS}")
        if self.monte_carlo_runs < 1:
            raise ConfigError("monte_carlo_runs must be >= 1")


def _resolve_edge_value(g: InfluenceGraph, u: int, v: int, spec: EdgeValues) -> float:
    if spec is None:
        return g.influence_mass(u, v)
    if isinstance(spec, (int, float)):
        return float(spec)
    return float(spec.get((g.node_id(u), g.node_id(v)), 0.0))


def resolve_probabilities(g: InfluenceGraph, cfg: CascadeConfig) -> List[List[Tuple[int, float]]]:
    """Per-node activation probability lists for ICM/WC attempts."""
    out: List[List[Tuple[int, float]]] = []
    for u in range(g.n):
        row = []
        for v, _ in g.out_adj(u):
            if cfg.model == "WC":
                denom = len(g.in_adj(v)) if cfg.wc_target_indegree else len(g.out_adj(u))
                p = 1.0 / denom if denom else 0.0
            else:
                p = _resolve_edge_value(g, u, v, cfg.edge_prob)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"probability {p} outside [0, 1] on edge {u}->{v}")
            row.append((v, p))
        out.append(row)
    return out


def resolve_weights(g: InfluenceGraph, cfg: CascadeConfig) -> List[List[Tuple[int, float]]]:
    """Per-node in-neighbor weight lists for LTM, feasibility-checked."""
    in_w: List[List[Tuple[int, float]]] = []
    for v in range(g.n):
        row = []
        total = 0.0
        for u, _ in g.in_adj(v):
            if cfg.edge_weight is None:
                w = 1.0 / len(g.in_adj(v))
            else:
                w = _resolve_edge_value(g, u, v, cfg.edge_weight)
            if w < 0.0:
                raise ConfigError(f"negative weight on edge {u}->{v}")
            total += w
            row.append((u, w))
        if total > 1.0 + 1e-9:
            raise ConfigError(f"LTM in-weights of node {g.node_id(v)} sum to {total} > 1")
        in_w.append(row)
    return in_w


def _icm_run(out_p, seed_idx: Set[int], rng: random.Random) -> int:
    active = set(seed_idx)
    frontier = sorted(seed_idx)
    while frontier:
        next_frontier = []
        for u in frontier:
            for v, p in out_p[u]:
                if v in active:
                    continue
                if p > 0.0 and rng.random() <= p:
                    active.add(v)
                    next_frontier.append(v)
        frontier = sorted(set(next_frontier))
    return len(active)


def _ltm_run(in_w, n: int, seed_idx: Set[int], rng: random.Random) -> int:
    thresholds = [rng.random() for _ in range(n)]
    active = set(seed_idx)
    changed = True
    while changed:
        changed = False
        for v in range(n):
            if v in active:
                continue
            mass = sum(w for u, w in in_w[v] if u in active)
            if mass >= thresholds[v]:
                active.add(v)
                changed = True
    return len(active)


def cascade_spread(g: InfluenceGraph, seeds: Iterable[str], cfg: CascadeConfig) -> float:
    """Mean final active-set size over the configured Monte-Carlo runs."""
    seed_idx = {g.index_of(s) for s in seeds}
    if cfg.model in ("ICM", "WC"):
        out_p = resolve_probabilities(g, cfg)
        runner = lambda rng: _icm_run(out_p, seed_idx, rng)
    else:
        in_w = resolve_weights(g, cfg)
        runner = lambda rng: _ltm_run(in_w, g.n, seed_idx, rng)
    total = 0
    for run in range(cfg.monte_carlo_runs):
        rng = random.Random((cfg.rng_seed, run))
        total += runner(rng)
    return total / cfg.monte_carlo_runs


def reachable_set(g: InfluenceGraph, seeds: Iterable[str]) -> Set[str]:
    """Nodes reachable from the seeds along directed edges (seeds included)."""
    stack = [g.index_of(s) for s in seeds]
    seen = set(stack)
    while stack:
        u = stack.pop()
        for v, _ in g.out_adj(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return {g.node_id(v) for v in seen}


# -- credit distribution ------------------------------------------------------


@dataclass
class CreditTable:
    """Influence credits scanned from an action log.

    ``direct`` holds the per-event uniform split over candidate influencers;
    ``total`` additionally carries credit backward through influencer chains
    (pure product along each hop, no depth decay). ``node_credit`` sums
    each node's total credit over all events.
    """

    nodes: Tuple[str, ...]
    direct: Dict[Tuple[str, str], Dict[str, float]] = field(default_factory=dict)
    total: Dict[Tuple[str, str], Dict[str, float]] = field(default_factory=dict)
    node_credit: Dict[str, float] = field(default_factory=dict)

    def events(self) -> List[Tuple[str, str]]:
        return sorted(self.total)


def cd_assign_credits(
    g: InfluenceGraph, records: Sequence[ActionRecord], tau: Optional[float] = None
) -> CreditTable:
    """Scan the action log and assign direct plus chained influence credits.

    For each performance of an action, the candidates are in-neighbors that
    performed the same action within the ``tau`` time window; each gets an
    equal share of one unit of direct credit, and their own influencers
    receive that share scaled by the chain products already accumulated.
    ``tau=None`` means no window.
    """
    window = math.inf if tau is None else float(tau)
    if window <= 0:
        raise ConfigError(f"time window must be positive, got {window}")
    table = CreditTable(nodes=g.node_ids, node_credit={v: 0.0 for v in g.node_ids})
    ordered = sorted(records, key=lambda r: (r.action, r.time, g.index_of(r.user)))

    last_time: Dict[Tuple[str, str], int] = {}
    chain: Dict[Tuple[str, str], Dict[str, float]] = {}
    for rec in ordered:
        key = (rec.user, rec.action)
        candidates = [
            w
            for w in g.in_neighbors(rec.user)
            if (w, rec.action) in last_time
            and last_time[(w, rec.action)] < rec.time
            and rec.time - last_time[(w, rec.action)] <= window
        ]
        last_time[key] = rec.time
        if not candidates:
            chain.setdefault(key, {})
            table.total.setdefault(key, {})
            continue
        gamma = 1.0 / len(candidates)
        direct = {w: gamma for w in candidates}
        total: Dict[str, float] = {}
        for w in candidates:
            total[w] = total.get(w, 0.0) + gamma
            for up, credit in chain.get((w, rec.action), {}).items():
                if up != rec.user:
                    total[up] = total.get(up, 0.0) + credit * gamma
        table.direct[key] = direct
        table.total[key] = total
        chain[key] = total
        for v, credit in total.items():
            table.node_credit[v] += credit
    return table


def cd_objective(table: CreditTable, seeds: Iterable[str]) -> float:
    """Total credit captured by a seed set, each event counted at most once."""
    chosen = set(seeds)
    value = 0.0
    for (user, _action), credits in table.total.items():
        if user in chosen:
            value += 1.0
            continue
        got = sum(c for v, c in credits.items() if v in chosen)
        value += min(1.0, got)
    return value


def cd_maximize(table: CreditTable, k: int) -> SeedResult:
    """CELF greedy over the event-coverage credit objective."""
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    start = time.perf_counter()
    n = len(table.nodes)
    if k > n:
        log.warning("k=%d exceeds node count %d; truncating", k, n)
        k = n
    index = {v: i for i, v in enumerate(table.nodes)}

    # Per event: residual credit capacity and per-node contributions.
    events = table.events()
    residual = {e: 1.0 for e in events}
    contrib: Dict[str, List[Tuple[Tuple[str, str], float]]] = {v: [] for v in table.nodes}
    own_events: Dict[str, List[Tuple[str, str]]] = {v: [] for v in table.nodes}
    for event in events:
        user = event[0]
        if user in own_events:
            own_events[user].append(event)
        for v, c in table.total[event].items():
            if v in contrib:
                contrib[v].append((event, c))

    def gain_of(v: str) -> float:
        value = sum(residual[e] for e in own_events[v])
        for e, c in contrib[v]:
            value += min(residual[e], c)
        return value

    last_eval = {v: 0 for v in table.nodes}
    heap = [(-gain_of(v), index[v], v) for v in table.nodes]
    heapq.heapify(heap)

    seeds: List[str] = []
    gains: List[float] = []
    totals: List[float] = []
    running = 0.0
    for step in range(k):
        while True:
            neg_gain, _, v = heapq.heappop(heap)
            if last_eval[v] == step:
                break
            last_eval[v] = step
            heapq.heappush(heap, (-gain_of(v), index[v], v))
        gain = -neg_gain
        running += gain
        seeds.append(v)
        gains.append(gain)
        totals.append(running)
        for e in own_events[v]:
            residual[e] = 0.0
        for e, c in contrib[v]:
            residual[e] -= min(residual[e], c)

    result = SeedResult(seeds, gains, totals, measure="cd", elapsed=time.perf_counter() - start)
    result.check_invariants()
    return result


# -- opinion-based cascading --------------------------------------------------


@dataclass
class OcState:
    """Mutable state of the opinion-cascading process."""

    opinions: List[float]
    active: List[bool]
    thresholds: List[float]

    @classmethod
    def from_graph(cls, g: InfluenceGraph, rng_seed: int = 0) -> "OcState":
        """Signed opinions pos - neg, all inactive, uniform thresholds."""
        rng = random.Random(rng_seed)
        opinions = [g.opinion_at(v).pos - g.opinion_at(v).neg for v in range(g.n)]
        thresholds = [rng.random() for _ in range(g.n)]
        return cls(opinions=opinions, active=[False] * g.n, thresholds=thresholds)


def oc_pmg(state: OcState, g: InfluenceGraph, v: str) -> float:
    """Potential marginal gain of node v under the current state."""
    vi = g.index_of(v)
    op_v = state.opinions[vi]
    value = op_v
    for u, w in g.out_adj(vi):
        op_u = state.opinions[u]
        term = op_u + op_v * w
        if state.active[u]:
            value += term
        else:
            theta = max(state.thresholds[u], THETA_EPS)
            value += (w / theta) * term
    return value


def oc_step(state: OcState, g: InfluenceGraph) -> OcState:
    """One synchronous round: activate over-threshold nodes, then update opinions."""
    active = list(state.active)
    for v in range(g.n):
        if active[v]:
            continue
        mass = sum(w for u, w in g.in_adj(v) if state.active[u])
        if mass >= state.thresholds[v]:
            active[v] = True
    opinions = list(state.opinions)
    for v in range(g.n):
        boost = sum(state.opinions[u] * w for u, w in g.in_adj(v) if active[u])
        opinions[v] = state.opinions[v] + boost
    return OcState(opinions=opinions, active=active, thresholds=state.thresholds)


def oc_maximize(
    g: InfluenceGraph,
    k: int,
    rng_seed: int = 0,
    prune_fraction: float = 0.5,
) -> SeedResult:
    """Opinion-cascading seed selection.

    Candidates in the bottom ``prune_fraction`` of initial potential gains
    are dropped outright; the rest are kept in a lazily re-scored potential
    list. After each pick the chosen node is activated and one cascade
    round updates activations and opinions.
    """
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    if not 0.0 <= prune_fraction < 1.0:
        raise ConfigError("prune_fraction must be in [0, 1)")
    start = time.perf_counter()
    n = g.n
    if k > n:
        log.warning("k=%d exceeds node count %d; truncating", k, n)
        k = n

    state = OcState.from_graph(g, rng_seed=rng_seed)
    scored = sorted(
        ((oc_pmg(state, g, g.node_id(v)), v) for v in range(n)),
        key=lambda t: (-t[0], t[1]),
    )
    kept = scored[: max(k, math.ceil(n * (1.0 - prune_fraction)))]

    heap = [(-pmg, v) for pmg, v in kept]
    heapq.heapify(heap)
    stamp = {v: 0 for _, v in kept}

    seeds: List[str] = []
    gains: List[float] = []
    totals: List[float] = []
    running = 0.0
    for step in range(min(k, len(stamp))):
        while True:
            neg_pmg, v = heapq.heappop(heap)
            if stamp[v] == step:
                break
            stamp[v] = step
            heapq.heappush(heap, (-oc_pmg(state, g, g.node_id(v)), v))
        gain = -neg_pmg
        running += gain
        seeds.append(g.node_id(v))
        gains.append(gain)
        totals.append(running)
        state.active[v] = True
        state = oc_step(state, g)

    result = SeedResult(seeds, gains, totals, measure="oc", elapsed=time.perf_counter() - start)
    result.check_invariants(strict_gains=False)
    return result

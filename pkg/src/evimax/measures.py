"""The seven per-edge influence values.

Every measure scales the edge's influence mass b = m({I}) by opinion
factors of the endpoints, so each value lies in [0, b]:

  plain      b
  s1-prob    Pr_u(Pos) * b
  s1-belief  m_u(Pos) * b
  s2-prob    Pr_u(Pos) * b * (1 - Pr_v(Neg))
  s2-belief  m_u(Pos) * b * (1 - m_v(Neg))
  s3-prob    Pr_u(Pos) * b * (1 - Pr_v(Pos))
  s3-belief  m_u(Pos) * b * (1 - m_v(Pos))

The scenario-2/3 neighbor factor uses the opinion of the influenced node
v, never any influence mass. All functions are pure over the immutable
graph snapshot.
"""

from __future__ import annotations

import enum
from typing import List, Tuple

from .errors import ConfigError
from .graph import InfluenceGraph


class MeasureKind(enum.Enum):
    """Which influence measure weighs an edge."""

    PLAIN = "plain"
    S1_PROB = "s1-prob"
    S1_BELIEF = "s1-belief"
    S2_PROB = "s2-prob"
    S2_BELIEF = "s2-belief"
    S3_PROB = "s3-prob"
    S3_BELIEF = "s3-belief"

    @classmethod
    def from_name(cls, name: str) -> "MeasureKind":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ConfigError(f"unknown measure {name!r}; expected one of: {valid}") from None


ALL_MEASURES = tuple(MeasureKind)


def _source_factor(g: InfluenceGraph, u: int, kind: MeasureKind) -> float:
    if kind is MeasureKind.PLAIN:
        return 1.0
    if kind in (MeasureKind.S1_PROB, MeasureKind.S2_PROB, MeasureKind.S3_PROB):
        return g.opinion_at(u).pos
    return g.pos_belief_at(u)


def _target_factor(g: InfluenceGraph, v: int, kind: MeasureKind) -> float:
    if kind is MeasureKind.S2_PROB:
        return 1.0 - g.opinion_at(v).neg
    if kind is MeasureKind.S2_BELIEF:
        return 1.0 - g.neg_belief_at(v)
    if kind is MeasureKind.S3_PROB:
        return 1.0 - g.opinion_at(v).pos
    if kind is MeasureKind.S3_BELIEF:
        return 1.0 - g.pos_belief_at(v)
    return 1.0


def influence(g: InfluenceGraph, u: str, v: str, kind: MeasureKind) -> float:
    """Measure value for the ordered pair (u, v); 0 for non-edges."""
    ui, vi = g.index_of(u), g.index_of(v)
    b = g.influence_mass(ui, vi)
    if b == 0.0:
        return 0.0
    return _source_factor(g, ui, kind) * b * _target_factor(g, vi, kind)


def weighted_adjacency(
    g: InfluenceGraph, kind: MeasureKind
) -> Tuple[List[List[Tuple[int, float]]], List[List[Tuple[int, float]]]]:
    """Out- and in-adjacency lists with edges weighted by the measure.

    Built once per (graph, kind); the maximizer works off these instead of
    recomputing opinion factors per edge visit.
    """
    src = [_source_factor(g, u, kind) for u in range(g.n)]
    dst = [_target_factor(g, v, kind) for v in range(g.n)]
    out: List[List[Tuple[int, float]]] = [[] for _ in range(g.n)]
    in_: List[List[Tuple[int, float]]] = [[] for _ in range(g.n)]
    for u in range(g.n):
        for v, b in g.out_adj(u):
            w = src[u] * b * dst[v]
            out[u].append((v, w))
            in_[v].append((u, w))
    return out, in_

"""Directed social graph with per-edge influence BBAs and per-node opinions.

Node ids are opaque strings mapped to dense integer indexes at load time;
the dense index doubles as the deterministic tie-break order everywhere
downstream. The assembled graph is an immutable snapshot: build a new one
instead of mutating.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .belief import OMEGA, MassFunction, dempster_combine
from .errors import (
    FrameError,
    NoIndicatorsError,
    ParseError,
    ReferentialError,
    UnknownNodeError,
)
from .opinion import (
    NEUTRAL,
    OpinionDistribution,
    load_lexicon,
    load_messages,
    pos_neg_beliefs,
    user_opinions_from_messages,
)

log = logging.getLogger(__name__)

_I = OMEGA.subset(("I",))
_P = OMEGA.subset(("P",))
_IP = OMEGA.full_set

# Default ignorance discount when building indicator BBAs from raw values.
DEFAULT_DISCOUNT = 0.1


@dataclass(frozen=True)
class ActionRecord:
    """One action-log tuple: user performed action at a given time."""

    user: str
    action: str
    time: int

    def __post_init__(self):
        if self.time < 0:
            raise ValueError(f"action time must be >= 0, got {self.time}")


@dataclass(frozen=True)
class IndicatorBBA:
    """A named influence-indicator mass function on the {I, P} frame."""

    name: str
    bba: MassFunction

    def __post_init__(self):
        if self.bba.frame != OMEGA:
            raise FrameError(f"indicator {self.name!r} not on the influence frame")


def indicator_from_value(x: float, discount: float = DEFAULT_DISCOUNT, name: str = "ind") -> IndicatorBBA:
    """Linear mapping from a unit-interval indicator to a BBA on {I, P}.

    m({I}) = x * (1 - discount), m({P}) = (1 - x) * (1 - discount), and the
    discount itself stays on the frame as ignorance.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"indicator value {x} outside [0, 1]")
    if not 0.0 <= discount <= 1.0:
        raise ValueError(f"discount {discount} outside [0, 1]")
    masses = {
        _I: x * (1.0 - discount),
        _P: (1.0 - x) * (1.0 - discount),
        _IP: discount,
    }
    return IndicatorBBA(name, MassFunction(OMEGA, masses))


def edge_influence_bba(indicators: Sequence[IndicatorBBA]) -> MassFunction:
    """Fuse indicator BBAs into one edge BBA with Dempster's rule."""
    if not indicators:
        raise NoIndicatorsError("edge BBA fusion needs at least one indicator")
    combined = indicators[0].bba
    for ind in indicators[1:]:
        combined = dempster_combine(combined, ind.bba)
    return combined


def edge_bba_from_influence(x: float) -> MassFunction:
    """Simple edge BBA with m({I}) = x and the rest on ignorance."""
    return MassFunction(OMEGA, {_I: x, _IP: 1.0 - x})


class InfluenceGraph:
    """Immutable directed graph snapshot used by measures and maximizers."""

    def __init__(
        self,
        node_ids: Sequence[str],
        opinions: Mapping[str, OpinionDistribution],
        edge_bbas: Mapping[Tuple[str, str], MassFunction],
        literal_alpha: bool = False,
        neutral_defaulted: Tuple[str, ...] = (),
    ):
        self._ids: Tuple[str, ...] = tuple(node_ids)
        if len(set(self._ids)) != len(self._ids):
            raise ReferentialError("duplicate node ids")
        self._index: Dict[str, int] = {v: i for i, v in enumerate(self._ids)}
        n = len(self._ids)

        self._pr: List[OpinionDistribution] = []
        self._m_pos: List[float] = []
        self._m_neg: List[float] = []
        for node in self._ids:
            pr = opinions.get(node, NEUTRAL)
            self._pr.append(pr)
            m_pos, m_neg = pos_neg_beliefs(pr, literal_alpha=literal_alpha)
            self._m_pos.append(m_pos)
            self._m_neg.append(m_neg)

        self._edges: Dict[Tuple[int, int], MassFunction] = {}
        self._out: List[List[Tuple[int, float]]] = [[] for _ in range(n)]
        self._in: List[List[Tuple[int, float]]] = [[] for _ in range(n)]
        for (src, dst), bba in edge_bbas.items():
            if src not in self._index:
                raise ReferentialError(f"edge source {src!r} is not a node")
            if dst not in self._index:
                raise ReferentialError(f"edge target {dst!r} is not a node")
            if src == dst:
                raise ReferentialError(f"self-loop on {src!r} (self-influence is implicit)")
            if bba.frame != OMEGA:
                raise FrameError(f"edge ({src},{dst}) BBA not on the influence frame")
            u, v = self._index[src], self._index[dst]
            if (u, v) in self._edges:
                raise ReferentialError(f"duplicate edge ({src!r}, {dst!r})")
            self._edges[(u, v)] = bba
            b = bba.mass(_I)
            self._out[u].append((v, b))
            self._in[v].append((u, b))
        for adj in self._out:
            adj.sort()
        for adj in self._in:
            adj.sort()
        self.neutral_defaulted = tuple(neutral_defaulted)

    # -- basic access ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._ids)

    @property
    def node_ids(self) -> Tuple[str, ...]:
        return self._ids

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def index_of(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node!r}") from None

    def node_id(self, index: int) -> str:
        return self._ids[index]

    def has_node(self, node: str) -> bool:
        return node in self._index

    def has_edge(self, src: str, dst: str) -> bool:
        return (self._index.get(src, -1), self._index.get(dst, -2)) in self._edges

    def edge_bba(self, src: str, dst: str) -> MassFunction:
        key = (self.index_of(src), self.index_of(dst))
        try:
            return self._edges[key]
        except KeyError:
            raise ReferentialError(f"no edge ({src!r}, {dst!r})") from None

    def edge_items(self) -> Iterable[Tuple[int, int, MassFunction]]:
        for (u, v), bba in sorted(self._edges.items()):
            yield u, v, bba

    # Dense-index views used by the numerical modules.

    def out_adj(self, u: int) -> List[Tuple[int, float]]:
        """Out-neighbors of dense index u as (index, m({I})) pairs."""
        return self._out[u]

    def in_adj(self, v: int) -> List[Tuple[int, float]]:
        """In-neighbors of dense index v as (index, m({I})) pairs."""
        return self._in[v]

    def out_neighbors(self, node: str) -> Tuple[str, ...]:
        return tuple(self._ids[v] for v, _ in self._out[self.index_of(node)])

    def in_neighbors(self, node: str) -> Tuple[str, ...]:
        return tuple(self._ids[u] for u, _ in self._in[self.index_of(node)])

    def opinion(self, node: str) -> OpinionDistribution:
        return self._pr[self.index_of(node)]

    def opinion_at(self, index: int) -> OpinionDistribution:
        return self._pr[index]

    def pos_belief_at(self, index: int) -> float:
        """m_u({Pos}) of the node's fused opinion BBA."""
        return self._m_pos[index]

    def neg_belief_at(self, index: int) -> float:
        """m_u({Neg}) of the node's fused opinion BBA."""
        return self._m_neg[index]

    def influence_mass(self, u: int, v: int) -> float:
        """m({I}) of the edge (u, v) by dense index, 0 when absent."""
        bba = self._edges.get((u, v))
        return bba.mass(_I) if bba is not None else 0.0


# -- file ingestion ---------------------------------------------------------


def _read_csv_rows(path: Path):
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            yield line_no, [c.strip() for c in row]


def _parse_unit(path: Path, line_no: int, text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise ParseError(path, line_no, f"bad {what} {text!r}") from exc
    if not 0.0 <= value <= 1.0:
        raise ParseError(path, line_no, f"{what} {value} outside [0, 1]")
    return value


def load_edge_file(path, discount: float = DEFAULT_DISCOUNT) -> Dict[Tuple[str, str], MassFunction]:
    """Read edges from CSV.

    Two layouts, told apart by the header: ``src,dst,m_I,m_P,m_IP`` carries
    pre-estimated BBAs; ``src,dst,ind_1,...,ind_k`` carries raw indicator
    values that are mapped through :func:`indicator_from_value` and fused.
    """
    path = Path(path)
    edges: Dict[Tuple[str, str], MassFunction] = {}
    header: Optional[List[str]] = None
    direct = False
    indicator_names: List[str] = []
    for line_no, row in _read_csv_rows(path):
        if header is None:
            header = [c.lower() for c in row]
            if len(header) < 3 or header[:2] != ["src", "dst"]:
                raise ParseError(path, line_no, f"bad edge header {row!r}")
            if header[2:] == ["m_i", "m_p", "m_ip"]:
                direct = True
            else:
                indicator_names = header[2:]
            continue
        if len(row) != len(header):
            raise ParseError(path, line_no, f"expected {len(header)} columns, got {len(row)}")
        src, dst = row[0], row[1]
        if not src or not dst:
            raise ParseError(path, line_no, "empty endpoint id")
        if (src, dst) in edges:
            raise ParseError(path, line_no, f"duplicate edge ({src}, {dst})")
        if direct:
            m_i = _parse_unit(path, line_no, row[2], "m_I")
            m_p = _parse_unit(path, line_no, row[3], "m_P")
            m_ip = _parse_unit(path, line_no, row[4], "m_IP")
            try:
                bba = MassFunction(OMEGA, {_I: m_i, _P: m_p, _IP: m_ip})
            except FrameError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
        else:
            indicators = [
                indicator_from_value(
                    _parse_unit(path, line_no, cell, name), discount, name=name
                )
                for name, cell in zip(indicator_names, row[2:])
            ]
            bba = edge_influence_bba(indicators)
        edges[(src, dst)] = bba
    if header is None:
        raise ParseError(path, 1, "missing header row")
    return edges


def load_node_file(path) -> Tuple[List[str], Dict[str, OpinionDistribution]]:
    """Read node ids and optional explicit opinions from CSV."""
    path = Path(path)
    ids: List[str] = []
    opinions: Dict[str, OpinionDistribution] = {}
    header: Optional[List[str]] = None
    with_opinions = False
    for line_no, row in _read_csv_rows(path):
        if header is None:
            header = [c.lower() for c in row]
            if header == ["node_id"]:
                with_opinions = False
            elif header == ["node_id", "pos", "neg", "neut"]:
                with_opinions = True
            else:
                raise ParseError(path, line_no, f"bad node header {row!r}")
            continue
        node = row[0]
        if not node:
            raise ParseError(path, line_no, "empty node id")
        if node in opinions or node in ids:
            raise ParseError(path, line_no, f"duplicate node {node!r}")
        ids.append(node)
        if with_opinions and len(row) >= 4 and any(row[1:4]):
            try:
                opinions[node] = OpinionDistribution(
                    _parse_unit(path, line_no, row[1], "pos"),
                    _parse_unit(path, line_no, row[2], "neg"),
                    _parse_unit(path, line_no, row[3], "neut"),
                )
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
    if header is None:
        raise ParseError(path, 1, "missing header row")
    return ids, opinions


def load_action_log(path) -> List[ActionRecord]:
    """Read a (user, action, time) CSV action log."""
    path = Path(path)
    records: List[ActionRecord] = []
    header: Optional[List[str]] = None
    for line_no, row in _read_csv_rows(path):
        if header is None:
            header = [c.lower() for c in row]
            if header != ["user", "action", "time"]:
                raise ParseError(path, line_no, f"bad action-log header {row!r}")
            continue
        if len(row) != 3:
            raise ParseError(path, line_no, f"expected 3 columns, got {len(row)}")
        try:
            record = ActionRecord(row[0], row[1], int(row[2]))
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc)) from exc
        records.append(record)
    if header is None:
        raise ParseError(path, 1, "missing header row")
    return records


def load_graph(
    edge_file,
    node_file=None,
    messages_file=None,
    lexicon_file=None,
    discount: float = DEFAULT_DISCOUNT,
    literal_alpha: bool = False,
) -> InfluenceGraph:
    """Assemble a graph from files.

    Explicit per-node opinions (node file) win over message-derived ones;
    nodes with neither get the neutral default and are counted in
    ``graph.neutral_defaulted``. Without a node file the node set is
    inferred from edge endpoints and message authors.
    """
    edges = load_edge_file(edge_file, discount=discount)

    explicit: Dict[str, OpinionDistribution] = {}
    ids: List[str] = []
    if node_file is not None:
        ids, explicit = load_node_file(node_file)

    derived: Dict[str, OpinionDistribution] = {}
    if messages_file is not None:
        if lexicon_file is None:
            raise ReferentialError("a messages file needs a lexicon file")
        lexicon = load_lexicon(lexicon_file)
        messages, skipped = load_messages(messages_file)
        if skipped:
            log.warning("skipped %d token-less message records", skipped)
        derived = user_opinions_from_messages(messages, lexicon)

    if node_file is None:
        seen = dict.fromkeys(
            [n for pair in sorted(edges) for n in pair] + sorted(derived)
        )
        ids = list(seen)
    else:
        known = set(ids)
        for src, dst in edges:
            if src not in known:
                raise ReferentialError(f"edge source {src!r} missing from node file")
            if dst not in known:
                raise ReferentialError(f"edge target {dst!r} missing from node file")

    opinions: Dict[str, OpinionDistribution] = {}
    defaulted: List[str] = []
    for node in ids:
        if node in explicit:
            opinions[node] = explicit[node]
        elif node in derived:
            opinions[node] = derived[node]
        else:
            opinions[node] = NEUTRAL
            defaulted.append(node)
    if defaulted:
        log.warning("%d nodes had no opinion source; defaulted to neutral", len(defaulted))

    return InfluenceGraph(
        ids, opinions, edges, literal_alpha=literal_alpha, neutral_defaulted=tuple(defaulted)
    )


def save_graph(graph: InfluenceGraph, edge_file, node_file) -> None:
    """Write a graph as the pre-estimated edge CSV plus explicit node CSV.

    Floats are written with repr, so a load/save/load round-trip is exact.
    """
    edge_file, node_file = Path(edge_file), Path(node_file)
    with edge_file.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "m_I", "m_P", "m_IP"])
        for u, v, bba in graph.edge_items():
            writer.writerow(
                [
                    graph.node_id(u),
                    graph.node_id(v),
                    repr(bba.mass(_I)),
                    repr(bba.mass(_P)),
                    repr(bba.mass(_IP)),
                ]
            )
    with node_file.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "pos", "neg", "neut"])
        for node in graph.node_ids:
            pr = graph.opinion(node)
            writer.writerow([node, repr(pr.pos), repr(pr.neg), repr(pr.neut)])

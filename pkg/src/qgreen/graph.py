"""Metric graph data model.

A :class:`MetricGraph` is an undirected, connected graph whose finite edges
carry positive lengths and whose vertices carry point interactions.  Leads
are semi-infinite channels anchored at a vertex.  Multi-edges and loops are
allowed; a loop contributes two channels to its vertex.

Channel numbering at a vertex is fixed once and for all: edge ends come
first, in edge declaration order (the origin end of a loop precedes its
terminus end), followed by leads in declaration order.  Vertex S-matrices
are always indexed in this order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Mapping

import numpy as np

from .errors import (
    DanglingReference,
    DegreeMismatch,
    Disconnected,
    GraphError,
    InvalidPosition,
    NonPositiveLength,
    UnknownEdge,
    UnknownLead,
    UnknownVertex,
    VariantDegreeMismatch,
)
from .vertex import CustomMatrix, PointInteraction, interaction_from_descriptor

VertexId = Hashable


@dataclass(frozen=True)
class Edge:
    id: Hashable
    origin: VertexId
    terminus: VertexId
    length: float

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus


@dataclass(frozen=True)
class Lead:
    id: Hashable
    anchor: VertexId


@dataclass(frozen=True)
class Position:
    """A point on an edge (``0 <= x <= length``) or on a lead (``x >= 0``).

    ``x`` is measured from the edge origin or from the lead anchor.
    """

    kind: str
    id: Hashable
    x: float = 0.0

    def __post_init__(self):
        if self.kind not in ("edge", "lead"):
            raise InvalidPosition(f"position kind must be 'edge' or 'lead', got {self.kind!r}")
        if not math.isfinite(self.x) or self.x < 0:
            raise InvalidPosition(f"coordinate must be finite and non-negative, got {self.x!r}")

    @classmethod
    def on_edge(cls, edge_id, x: float) -> "Position":
        return cls("edge", edge_id, float(x))

    @classmethod
    def on_lead(cls, lead_id, x: float = 0.0) -> "Position":
        return cls("lead", lead_id, float(x))

    @property
    def is_lead(self) -> bool:
        return self.kind == "lead"


@dataclass(frozen=True)
class Layout:
    """Integer bookkeeping shared by the solvers.

    Attributes
    ----------
    degree : ndarray of int, shape (V,)
    end_channel : ndarray of int, shape (E, 2)
        Channel index of each edge end at its vertex (column 0 origin, 1 terminus).
    lead_channel : ndarray of int, shape (L,)
    edge_vertex : ndarray of int, shape (E, 2)
        Vertex index of origin and terminus.
    lead_vertex : ndarray of int, shape (L,)
    lengths : ndarray of float, shape (E,)

    Directed edge ``d = 2 e + s`` runs from end ``s`` of edge ``e`` to end
    ``1 - s``; ``s = 0`` is the stored orientation.
    """

    degree: np.ndarray
    end_channel: np.ndarray
    lead_channel: np.ndarray
    edge_vertex: np.ndarray
    lead_vertex: np.ndarray
    lengths: np.ndarray

    @property
    def n_directed(self) -> int:
        return 2 * len(self.lengths)

    def tail(self, d):
        return self.edge_vertex[d // 2, d % 2]

    def head(self, d):
        return self.edge_vertex[d // 2, 1 - d % 2]

    def tail_channel(self, d):
        return self.end_channel[d // 2, d % 2]

    def head_channel(self, d):
        return self.end_channel[d // 2, 1 - d % 2]

    def outgoing(self, v: int):
        """Directed edges leaving vertex ``v`` as ``(channel, d)`` pairs."""
        out = []
        for e in range(len(self.lengths)):
            for s in (0, 1):
                if self.edge_vertex[e, s] == v:
                    out.append((int(self.end_channel[e, s]), 2 * e + s))
        return out

    def incoming(self, v: int):
        """Directed edges arriving at vertex ``v``."""
        return [d for d in range(self.n_directed) if self.head(d) == v]


@dataclass(frozen=True, eq=False)
class MetricGraph:
    """Immutable, validated metric graph.  Build it with :func:`build_graph`."""

    vertices: tuple
    edges: tuple
    leads: tuple
    interactions: Mapping[VertexId, PointInteraction] = field(repr=False)

    # lookups ---------------------------------------------------------------
    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def lead_index(self) -> dict:
        return {l.id: i for i, l in enumerate(self.leads)}

    def edge(self, edge_id) -> Edge:
        try:
            return self.edges[self.edge_index[edge_id]]
        except KeyError:
            raise UnknownEdge(edge_id) from None

    def lead(self, lead_id) -> Lead:
        try:
            return self.leads[self.lead_index[lead_id]]
        except KeyError:
            raise UnknownLead(lead_id) from None

    def interaction(self, v) -> PointInteraction:
        if v not in self.vertex_index:
            raise UnknownVertex(v)
        return self.interactions[v]

    @property
    def is_closed(self) -> bool:
        return not self.leads

    @property
    def flux_conserving(self) -> bool:
        return all(pi.flux_conserving for pi in self.interactions.values())

    # structure -------------------------------------------------------------
    @cached_property
    def layout(self) -> Layout:
        nv = len(self.vertices)
        vi = self.vertex_index
        count = np.zeros(nv, dtype=int)
        end_channel = np.zeros((len(self.edges), 2), dtype=int)
        edge_vertex = np.zeros((len(self.edges), 2), dtype=int)
        for e, edge in enumerate(self.edges):
            for s, v in enumerate((edge.origin, edge.terminus)):
                j = vi[v]
                edge_vertex[e, s] = j
                end_channel[e, s] = count[j]
                count[j] += 1
        lead_channel = np.zeros(len(self.leads), dtype=int)
        lead_vertex = np.zeros(len(self.leads), dtype=int)
        for a, lead in enumerate(self.leads):
            j = vi[lead.anchor]
            lead_vertex[a] = j
            lead_channel[a] = count[j]
            count[j] += 1
        lengths = np.array([e.length for e in self.edges], dtype=float)
        return Layout(count, end_channel, lead_channel, edge_vertex, lead_vertex, lengths)

    def degree(self, v) -> int:
        return degree(self, v)

    def check_position(self, p: Position) -> Position:
        """Validate ``p`` against this graph and return it."""
        if p.kind == "edge":
            e = self.edge(p.id)
            if p.x > e.length * (1 + 1e-14):
                raise InvalidPosition(f"x={p.x} outside edge {p.id!r} of length {e.length}")
        else:
            self.lead(p.id)
        return p

    def with_interactions(self, updates: Mapping) -> "MetricGraph":
        """Copy of the graph with some vertex interactions replaced."""
        inter = dict(self.interactions)
        for v, pi in updates.items():
            if v not in self.vertex_index:
                raise UnknownVertex(v)
            inter[v] = interaction_from_descriptor(pi)
        return build_graph({"vertices": list(self.vertices),
                            "edges": list(self.edges),
                            "leads": list(self.leads),
                            "interactions": inter})


def degree(g: MetricGraph, v) -> int:
    """Number of edge ends plus leads at ``v``; a loop counts twice."""
    try:
        return int(g.layout.degree[g.vertex_index[v]])
    except KeyError:
        raise UnknownVertex(v) from None


# ---------------------------------------------------------------------------

def _get(obj, *names, default=None):
    for n in names:
        if isinstance(obj, Mapping) and n in obj:
            return obj[n]
        if not isinstance(obj, Mapping) and hasattr(obj, n):
            return getattr(obj, n)
    return default


def build_graph(spec: Mapping[str, Any]) -> MetricGraph:
    """Validate a graph description and return a :class:`MetricGraph`.

    Parameters
    ----------
    spec : mapping
        ``vertices``: ids, or mappings with ``id`` and ``interaction``.
        ``edges``: mappings with ``id`` (optional), ``from``, ``to``, ``length``,
        or :class:`Edge` objects.
        ``leads``: mappings with ``id`` and ``anchor``, or :class:`Lead` objects.
        ``interactions`` (optional): mapping vertex id -> interaction, used for
        vertices whose entry does not carry one.  Interactions may be
        :class:`~qgreen.vertex.PointInteraction` instances or JSON descriptors.

    Raises
    ------
    NonPositiveLength, Disconnected, DegreeMismatch, DanglingReference, GraphError
    """
    extra = dict(spec.get("interactions") or {})
    vertices, inter = [], {}
    for item in spec.get("vertices", ()):
        if isinstance(item, Mapping):
            vid = item["id"]
            desc = item.get("interaction", extra.get(vid))
        else:
            vid = item
            desc = extra.get(vid)
        if vid in inter or vid in vertices:
            raise GraphError(f"duplicate vertex id {vid!r}")
        vertices.append(vid)
        inter[vid] = desc
    if not vertices:
        raise GraphError("graph has no vertices")
    known = set(vertices)
    for vid in extra:
        if vid not in known:
            raise DanglingReference(f"interaction given for unknown vertex {vid!r}")

    edges = []
    for i, item in enumerate(spec.get("edges", ())):
        eid = _get(item, "id", default=None)
        eid = f"e{i + 1}" if eid is None else eid
        origin = _get(item, "origin", "from")
        terminus = _get(item, "terminus", "to")
        length = _get(item, "length")
        for v in (origin, terminus):
            if v not in known:
                raise DanglingReference(f"edge {eid!r} references unknown vertex {v!r}")
        try:
            length = float(length)
        except (TypeError, ValueError):
            raise GraphError(f"edge {eid!r} has invalid length {length!r}") from None
        if not (math.isfinite(length) and length > 0):
            raise NonPositiveLength(f"edge {eid!r} has length {length!r}")
        edges.append(Edge(eid, origin, terminus, length))
    if len({e.id for e in edges}) != len(edges):
        raise GraphError("duplicate edge id")

    leads = []
    for i, item in enumerate(spec.get("leads", ())):
        lid = _get(item, "id", default=None)
        lid = f"l{i + 1}" if lid is None else lid
        anchor = _get(item, "anchor")
        if anchor not in known:
            raise DanglingReference(f"lead {lid!r} references unknown vertex {anchor!r}")
        leads.append(Lead(lid, anchor))
    if len({l.id for l in leads}) != len(leads):
        raise GraphError("duplicate lead id")

    # connectivity via union-find on edges
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        parent[find(e.origin)] = find(e.terminus)
    if len({find(v) for v in vertices}) > 1:
        raise Disconnected("graph has more than one connected component")

    interactions = {}
    for vid in vertices:
        desc = inter[vid]
        if desc is None:
            raise DanglingReference(f"vertex {vid!r} has no interaction")
        interactions[vid] = interaction_from_descriptor(desc)

    g = MetricGraph(tuple(vertices), tuple(edges), tuple(leads), interactions)
    for vid in vertices:
        n = degree(g, vid)
        pi = interactions[vid]
        try:
            pi.check_degree(n)
            if isinstance(pi, CustomMatrix):
                pi.smatrix(1.0, n)
        except VariantDegreeMismatch as exc:
            raise DegreeMismatch(f"vertex {vid!r}: {exc}") from None
    return g

"""Generators for frequently used graph topologies.

Every generator returns a validated :class:`~qgreen.graph.MetricGraph`.
Vertices carry generalised delta interactions of a common strength unless
stated otherwise.
"""
from __future__ import annotations

from .graph import MetricGraph, build_graph
from .vertex import (DeadEnd, Dirichlet, GeneralizedDelta, LineABCD, NeumannKirchhoff,
                     PointInteraction)


def _end(bc: str, lam: float = 0.0) -> PointInteraction:
    if bc == "dirichlet":
        return Dirichlet()
    if bc == "neumann":
        return DeadEnd(0.0)
    if bc == "robin":
        return DeadEnd(lam)
    raise ValueError(f"unknown end condition {bc!r}")


def single_edge(length: float = 1.0, left: PointInteraction = Dirichlet(),
                right: PointInteraction = Dirichlet()) -> MetricGraph:
    """One edge between two degree-1 vertices (an infinite well for Dirichlet ends)."""
    return build_graph({"vertices": ["A", "B"],
                        "edges": [{"id": 1, "from": "A", "to": "B", "length": length}],
                        "interactions": {"A": left, "B": right}})


def star(n: int, interaction: PointInteraction = NeumannKirchhoff()) -> MetricGraph:
    """A single vertex with ``n`` leads numbered ``1..n``."""
    return build_graph({"vertices": ["O"], "leads": [{"id": i, "anchor": "O"} for i in range(1, n + 1)],
                        "interactions": {"O": interaction}})


def line_delta(gamma: float) -> MetricGraph:
    """Delta barrier of strength ``gamma`` on the line, written as a general
    two-channel point interaction (``a = d = 1``, ``b = 0``, ``c = 2 gamma``)."""
    return build_graph({"vertices": ["O"], "leads": [{"id": "i", "anchor": "O"}, {"id": "f", "anchor": "O"}],
                        "interactions": {"O": LineABCD(1.0, 0.0, 2.0 * gamma, 1.0)}})


def two_vertex(a: PointInteraction = GeneralizedDelta(0.0), b: PointInteraction = GeneralizedDelta(0.0),
               length: float = 1.0, lead_b: bool = True) -> MetricGraph:
    """Vertices ``A`` and ``B`` joined by edge ``1``; lead ``i`` at ``A`` and
    optionally lead ``f`` at ``B``."""
    leads = [{"id": "i", "anchor": "A"}]
    if lead_b:
        leads.append({"id": "f", "anchor": "B"})
    return build_graph({"vertices": ["A", "B"],
                        "edges": [{"id": 1, "from": "A", "to": "B", "length": length}],
                        "leads": leads, "interactions": {"A": a, "B": b}})


def two_delta(gamma_a: float = 0.0, gamma_b: float = 0.0, length: float = 1.0) -> MetricGraph:
    return two_vertex(GeneralizedDelta(gamma_a), GeneralizedDelta(gamma_b), length)


def tadpole(gamma: float = -1.5, lam: float = -2.0, length: float = 1.0) -> MetricGraph:
    """Vertex ``O`` with leads ``i`` and ``f`` and an edge ``1`` to the dead end ``A``."""
    return build_graph({"vertices": ["O", "A"],
                        "edges": [{"id": 1, "from": "O", "to": "A", "length": length}],
                        "leads": [{"id": "i", "anchor": "O"}, {"id": "f", "anchor": "O"}],
                        "interactions": {"O": GeneralizedDelta(gamma), "A": DeadEnd(lam)}})


def cross(gamma: float = 1.0, lam1: float = 0.0, lam2: float = 0.0,
          l1: float = 1.0, l2: float = 1.37) -> MetricGraph:
    """Vertex ``O`` with leads ``i``, ``f`` and two dead-end edges ``1`` (to ``A``) and ``2`` (to ``B``)."""
    return build_graph({"vertices": ["O", "A", "B"],
                        "edges": [{"id": 1, "from": "O", "to": "A", "length": l1},
                                  {"id": 2, "from": "O", "to": "B", "length": l2}],
                        "leads": [{"id": "i", "anchor": "O"}, {"id": "f", "anchor": "O"}],
                        "interactions": {"O": GeneralizedDelta(gamma), "A": DeadEnd(lam1),
                                         "B": DeadEnd(lam2)}})


def parallel_edges(gamma: float = 0.0, lengths=(1.0, 1.3, 1.7)) -> MetricGraph:
    """Vertices ``A`` and ``B`` joined by several edges, lead ``i`` at ``A`` and ``f`` at ``B``."""
    return build_graph({"vertices": ["A", "B"],
                        "edges": [{"id": j + 1, "from": "A", "to": "B", "length": ell}
                                  for j, ell in enumerate(lengths)],
                        "leads": [{"id": "i", "anchor": "A"}, {"id": "f", "anchor": "B"}],
                        "interactions": {"A": GeneralizedDelta(gamma), "B": GeneralizedDelta(gamma)}})


CUBE_EDGES = [("A", "B"), ("C", "B"), ("C", "D"), ("A", "D"), ("A", "E"), ("F", "B"),
              ("C", "G"), ("H", "D"), ("F", "E"), ("F", "G"), ("H", "G"), ("H", "E")]


def cube(gamma: float = 0.0, length: float = 1.0, open_leads: bool = False) -> MetricGraph:
    """Cube with twelve edges of common length.

    With ``open_leads`` a lead ``i`` is attached at ``A`` and a lead ``f`` at
    the opposite corner ``G``.
    """
    leads = [{"id": "i", "anchor": "A"}, {"id": "f", "anchor": "G"}] if open_leads else []
    return build_graph({"vertices": list("ABCDEFGH"),
                        "edges": [{"id": j + 1, "from": o, "to": t, "length": length}
                                  for j, (o, t) in enumerate(CUBE_EDGES)],
                        "leads": leads,
                        "interactions": {v: GeneralizedDelta(gamma) for v in "ABCDEFGH"}})


def chain(n: int = 6, gamma: float = 2.0, end: str = "dirichlet", length: float = 1.0,
          lam: float = 0.0) -> MetricGraph:
    """Linear graph of vertices ``1..n`` with a lead ``i`` at vertex 1.

    Edge ``l`` joins vertex ``l`` to ``l + 1``.  Vertices ``1..n-1`` are
    delta interactions of strength ``gamma``; vertex ``n`` is a dead end with
    the condition ``end`` (``dirichlet``, ``neumann`` or ``robin`` with ``lam``).
    """
    if n < 2:
        raise ValueError("a chain needs at least two vertices")
    inter = {v: GeneralizedDelta(gamma) for v in range(1, n)}
    inter[n] = _end(end, lam)
    return build_graph({"vertices": list(range(1, n + 1)),
                        "edges": [{"id": l, "from": l, "to": l + 1, "length": length} for l in range(1, n)],
                        "leads": [{"id": "i", "anchor": 1}],
                        "interactions": inter})


def open_chain(interactions, lengths) -> MetricGraph:
    """Linear graph with leads ``i`` at the first and ``f`` at the last vertex.

    Vertices are numbered ``1..n`` and edge ``l`` joins ``l`` to ``l + 1``.
    Two-sided interactions are oriented with their ``0-`` side towards lead ``i``.
    """
    interactions = list(interactions)
    if len(interactions) > 1 and isinstance(interactions[0], LineABCD):
        # at vertex 1 the edge comes first in channel order
        interactions[0] = interactions[0].mirrored()
    n = len(interactions)
    if len(lengths) != n - 1:
        raise ValueError("need n - 1 lengths")
    return build_graph({"vertices": list(range(1, n + 1)),
                        "edges": [{"id": l, "from": l, "to": l + 1, "length": lengths[l - 1]}
                                  for l in range(1, n)],
                        "leads": [{"id": "i", "anchor": 1}, {"id": "f", "anchor": n}],
                        "interactions": dict(zip(range(1, n + 1), interactions))})


def square_tail(gamma: float = 1.0, end: str = "neumann", length: float = 1.0) -> MetricGraph:
    """Square ``A B D C`` with lead ``i`` at ``A`` and a tail edge ``5`` from ``D`` to dead end ``E``.

    Edges: ``1`` A-B, ``2`` B-D, ``3`` C-D, ``4`` A-C, ``5`` D-E.
    """
    edges = [(1, "A", "B"), (2, "B", "D"), (3, "C", "D"), (4, "A", "C"), (5, "D", "E")]
    inter = {v: GeneralizedDelta(gamma) for v in "ABCD"}
    inter["E"] = _end(end)
    return build_graph({"vertices": list("ABCDE"),
                        "edges": [{"id": i, "from": o, "to": t, "length": length} for i, o, t in edges],
                        "leads": [{"id": "i", "anchor": "A"}],
                        "interactions": inter})


def binary_tree(level: int, gamma: float = 0.0, length: float = 1.0) -> MetricGraph:
    """Explicit diamond binary tree of the given level with leads ``i`` and ``f``."""
    verts, edges = [], []

    def block(lvl, tag):
        if lvl < 0:
            verts.append(tag)
            return tag, tag
        a, d = tag + "A", tag + "D"
        verts.extend([a, d])
        for arm in "BC":
            entry, exit_ = block(lvl - 1, tag + arm)
            edges.append((a, entry))
            edges.append((exit_, d))
        return a, d

    a, d = block(level, "")
    return build_graph({"vertices": verts,
                        "edges": [{"id": j + 1, "from": o, "to": t, "length": length}
                                  for j, (o, t) in enumerate(edges)],
                        "leads": [{"id": "i", "anchor": a}, {"id": "f", "anchor": d}],
                        "interactions": {v: GeneralizedDelta(gamma) for v in verts}})


def sierpinski(stage: int, gamma: float = 0.0, size: float = 1.0) -> MetricGraph:
    """Explicit Sierpinski gasket with a lead at each of its three corners.

    Stage 1 is a triangle of side ``size``.  Stage ``n`` places three
    stage ``n - 1`` gaskets of size ``size / 3`` at the corners and joins
    corner ``j`` of copy ``i`` to corner ``i`` of copy ``j`` by an edge of
    length ``size / 3``.
    """
    edges = []

    def build(n, s, tag):
        if n == 1:
            corners = [tag + c for c in "abc"]
            for i in range(3):
                for j in range(i + 1, 3):
                    edges.append((corners[i], corners[j], s))
            return corners
        copies = [build(n - 1, s / 3.0, tag + str(i)) for i in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                edges.append((copies[i][j], copies[j][i], s / 3.0))
        return [copies[i][i] for i in range(3)]

    corners = build(stage, size, "")
    verts = sorted({v for e in edges for v in e[:2]})
    return build_graph({"vertices": verts,
                        "edges": [{"id": j + 1, "from": o, "to": t, "length": ell}
                                  for j, (o, t, ell) in enumerate(edges)],
                        "leads": [{"id": i + 1, "anchor": c} for i, c in enumerate(corners)],
                        "interactions": {v: GeneralizedDelta(gamma) for v in verts}})


PRESETS = {
    "cube": lambda gamma=0.0, **kw: cube(gamma),
    "cube-open": lambda gamma=0.0, **kw: cube(gamma, open_leads=True),
    "two-delta": lambda gamma=0.0, **kw: two_delta(gamma, gamma),
    "tadpole": lambda gamma=-1.5, lam=-2.0, **kw: tadpole(gamma, lam),
    "parallel": lambda gamma=0.0, **kw: parallel_edges(gamma),
    "cross": lambda gamma=1.0, lam=0.0, **kw: cross(gamma, lam, lam),
    "square-tail": lambda gamma=1.0, bc="neumann", **kw: square_tail(gamma, bc),
    "well": lambda **kw: single_edge(),
    "line-delta": lambda gamma=-1.0, **kw: line_delta(gamma),
}
# short names kept for the command line
PRESETS["fig6a"] = PRESETS["tadpole"]
PRESETS["fig23"] = PRESETS["square-tail"]


def preset(name: str, **params) -> MetricGraph:
    """Build a named preset.

    ``name`` is one of :data:`PRESETS` or a parametrised family
    ``chain:N``, ``binary-tree:L`` or ``sierpinski:N``.  Keyword arguments
    ``gamma``, ``lam`` and ``bc`` are forwarded where meaningful; ``None``
    values select the preset default.
    """
    params = {k: v for k, v in params.items() if v is not None}
    if ":" in name:
        fam, _, arg = name.partition(":")
        try:
            n = int(arg)
        except ValueError:
            raise ValueError(f"bad preset parameter in {name!r}") from None
        gamma = params.get("gamma", 2.0 if fam == "chain" else 0.0)
        if fam == "chain":
            return chain(n, gamma, params.get("bc", "dirichlet"), lam=params.get("lam", 0.0))
        if fam == "binary-tree":
            return binary_tree(n, gamma)
        if fam == "sierpinski":
            return sierpinski(n, gamma)
        raise ValueError(f"unknown preset family {fam!r}")
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}") from None
    return factory(**params)

"""Reading and writing graph specification files.

A graph file is a JSON object::

    {
      "vertices": [{"id": "A", "interaction": {"type": "delta", "gamma": 1.0}},
                   {"id": "B", "interaction": {"type": "dead_end", "lambda": 0.0}}],
      "edges":    [{"id": 1, "from": "A", "to": "B", "length": 1.0}],
      "leads":    [{"id": "i", "anchor": "A"}]
    }

Interaction descriptors are ``delta`` (``gamma``), ``neumann_kirchhoff``,
``dirichlet``, ``dead_end`` (``lambda``) and ``abcd`` (``a``, ``b``, ``c``,
``d`` and optional ``omega_phase``).  Vertices may also be bare ids with a
top-level ``interactions`` object keyed by vertex id.  Since JSON object
keys are strings, such keys are matched against ``str(id)``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError
from .graph import MetricGraph, build_graph


def _rekey(doc: dict) -> dict:
    inter = doc.get("interactions")
    if not inter:
        return doc
    if not isinstance(inter, dict):
        raise ParseError("'interactions' must be an object")
    ids = [v["id"] if isinstance(v, dict) else v for v in doc.get("vertices", ())]
    by_str = {str(v): v for v in ids}
    doc = dict(doc)
    doc["interactions"] = {by_str.get(str(k), k): d for k, d in inter.items()}
    return doc


def loads(text: str) -> MetricGraph:
    """Parse a JSON graph description.

    Raises
    ------
    ParseError
        Malformed JSON (with line and column) or a document of the wrong shape.
    GraphError
        The description is well formed but does not define a valid graph.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("graph file must contain a JSON object", 1, 1)
    for key in ("vertices", "edges", "leads"):
        if key in doc and not isinstance(doc[key], list):
            raise ParseError(f"'{key}' must be a list")
    try:
        return build_graph(_rekey(doc))
    except KeyError as exc:
        if type(exc) is KeyError:
            raise ParseError(f"missing field {exc.args[0]!r}") from None
        raise


def load(path) -> MetricGraph:
    """Read a graph file from ``path``."""
    return loads(Path(path).read_text(encoding="utf-8"))


def to_dict(g: MetricGraph) -> dict:
    """Canonical JSON-compatible description of ``g``."""
    return {
        "vertices": [{"id": v, "interaction": g.interactions[v].descriptor()} for v in g.vertices],
        "edges": [{"id": e.id, "from": e.origin, "to": e.terminus, "length": e.length} for e in g.edges],
        "leads": [{"id": l.id, "anchor": l.anchor} for l in g.leads],
    }


def dumps(g: MetricGraph) -> str:
    """Canonical text form: fixed key order, two-space indent, trailing newline."""
    return json.dumps(to_dict(g), indent=2, sort_keys=True) + "\n"


def canonicalize(text: str) -> str:
    """Parse ``text`` and re-emit it in canonical form."""
    return dumps(loads(text))

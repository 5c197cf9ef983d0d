"""Command-line front end.

Subcommands
-----------
scatter       |T|^2, |R|^2 and the unitarity defect of the lead S-matrix on a k grid
spectrum      eigenvalues of a closed graph, or bound states (``--kappa``)
quasibound    resonance table from transition-amplitude peaks
canonicalize  re-emit a graph file in canonical form

The graph comes from a JSON file (see :mod:`qgreen.io`) or from ``--preset``.
All tables are CSV with a header row, ``.`` as decimal separator and
numbers printed with ``%.15g``.

Exit status: 0 success, 2 parse or validation error, 3 numerical failure
(pole or degenerate wavenumber), 4 empty result with ``--require``.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io
from .errors import (DegenerateK, GraphError, GraphHasLeads, NoLeads, NonConservingVertex, ParseError,
                     QGraphError, SolverError, ZeroWavenumber)
from .pathsum import family_matrix, lead_smatrix, unitarity_defect
from .presets import preset
from .quasibound import find_quasibound, scan_transition
from .spectral import find_bound_states, find_eigenvalues

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_EMPTY = 0, 2, 3, 4
OUTPUTS = ("transmission", "reflection", "transition", "phase", "secular")


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".15g")


def _write(rows, header, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])


def _lead_id(g, text):
    """Match a command-line lead name against lead ids of any type."""
    for lead in g.leads:
        if str(lead.id) == text:
            return lead.id
    return g.lead(text).id  # raises UnknownLead


def _edge_id(g, text):
    for edge in g.edges:
        if str(edge.id) == text:
            return edge.id
    return g.edge(text).id


def _graph(args):
    if args.preset and args.graph:
        raise UsageError("give either a graph file or --preset, not both")
    if args.preset:
        try:
            return preset(args.preset, gamma=args.gamma, lam=args.lam, bc=args.bc)
        except TypeError as exc:
            raise UsageError(str(exc)) from None
    if not args.graph:
        raise UsageError("a graph file or --preset is required")
    try:
        return io.load(args.graph)
    except OSError as exc:
        raise UsageError(f"cannot read {args.graph}: {exc.strerror}") from None


def _grid(args):
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    if not 0 < args.kmin < args.kmax:
        raise UsageError("need 0 < kmin < kmax")
    return np.linspace(args.kmin, args.kmax, args.samples)


def _parallel(fn, ks, threads):
    """Evaluate ``fn`` on contiguous chunks of ``ks``; output order is that of ``ks``."""
    threads = max(1, threads or os.cpu_count() or 1)
    chunks = np.array_split(ks, min(threads * 4, len(ks)))
    if threads == 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(fn, chunks))
    return parts


def cmd_scatter(args, out) -> int:
    g = _graph(args)
    if not g.leads:
        raise UsageError("scatter needs an open graph")
    src = _lead_id(g, args.src) if args.src else g.leads[0].id
    if args.dst:
        dst = _lead_id(g, args.dst)
    else:
        dst = g.leads[1].id if len(g.leads) > 1 else src
    a, b = g.lead_index[src], g.lead_index[dst]
    ks = _grid(args)
    wanted = args.outputs.split(",") if args.outputs else ["transmission", "reflection"]
    bad = [w for w in wanted if w not in OUTPUTS]
    if bad:
        raise UsageError(f"unknown outputs {bad}; choose from {', '.join(OUTPUTS)}")
    edges = [e.id for e in g.edges]

    def work(kc):
        S = lead_smatrix(g, kc)
        cols = [kc]
        if "transmission" in wanted:
            cols.append(np.abs(S[:, b, a]) ** 2)
        if "reflection" in wanted:
            cols.append(np.abs(S[:, a, a]) ** 2)
        if "phase" in wanted:
            cols.append(np.angle(S[:, a, a]))
        if "secular" in wanted:
            cols.append(np.abs(np.linalg.det(family_matrix(g, kc))))
        if "transition" in wanted:
            sc = scan_transition(g, src, edges, kc)
            cols.extend(sc[e] for e in edges)
        cols.append(unitarity_defect(S))
        return np.column_stack(cols)

    header = ["k"]
    header += [name for key, name in (("transmission", "abs_T2"), ("reflection", "abs_R2"),
                                      ("phase", "phase_R"), ("secular", "abs_det"))
               if key in wanted]
    if "transition" in wanted:
        header += [f"abs_A2_{e}" for e in edges]
    header.append("unitarity_defect")
    rows = np.vstack(_parallel(work, ks, args.threads))
    _write(rows, header, out)
    return EXIT_OK


def cmd_spectrum(args, out) -> int:
    g = _graph(args)
    if args.kmax is None:
        raise UsageError("--kmax is required")
    lo = args.kmin if args.kmin is not None else 0.0
    if not 0 <= lo < args.kmax:
        raise UsageError("need 0 <= kmin < kmax")
    if args.kappa:
        roots = find_bound_states(g, (lo, args.kmax), tol=args.tol).roots
        rows = [(r.kappa, r.residual, r.multiplicity) for r in roots]
        header = ["kappa", "residual", "multiplicity"]
    else:
        roots = find_eigenvalues(g, (lo, args.kmax), tol=args.tol).roots
        rows = [(r.k.real, r.residual, r.multiplicity) for r in roots]
        header = ["k", "residual", "multiplicity"]
    _write(rows, header, out)
    if not rows:
        print("note: no roots in range", file=sys.stderr)
        return EXIT_EMPTY if args.require else EXIT_OK
    return EXIT_OK


def cmd_quasibound(args, out) -> int:
    g = _graph(args)
    if not g.leads:
        raise UsageError("quasibound needs an open graph")
    src = _lead_id(g, args.src) if args.src else g.leads[0].id
    edges = [_edge_id(g, e) for e in args.edges.split(",")] if args.edges else [e.id for e in g.edges]
    ks = _grid(args)
    res = find_quasibound(g, src, edges, (args.kmin, args.kmax), samples=args.samples)
    header = ["k_qb", "E_qb", "gamma", "lifetime", "edge"] + [f"abs_A2_{e}" for e in edges]
    rows = [[r.k_qb, r.energy, r.gamma, r.lifetime, str(r.edge)] + [r.localization[e] for e in edges]
            for r in res]
    _write(rows, header, out)
    if args.sweep:
        parts = _parallel(lambda kc: np.column_stack([kc] + list(scan_transition(g, src, edges, kc).values())),
                          ks, args.threads)
        with open(args.sweep, "w", newline="", encoding="utf-8") as fh:
            _write(np.vstack(parts), ["k"] + [f"abs_A2_{e}" for e in edges], fh)
    if not rows:
        print("note: no resonances in range", file=sys.stderr)
        return EXIT_EMPTY if args.require else EXIT_OK
    return EXIT_OK


def cmd_canonicalize(args, out) -> int:
    out.write(io.dumps(_graph(args)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgreen", description="Green's functions and spectra of quantum graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, k_defaults=(0.1, 10.0)):
        sp.add_argument("graph", nargs="?", help="graph JSON file")
        sp.add_argument("--preset", help="cube, cube-open, two-delta, tadpole (fig6a), parallel, cross, square-tail (fig23), well, "
                                         "line-delta, chain:N, binary-tree:L or sierpinski:N")
        sp.add_argument("--gamma", type=float, help="delta strength for presets")
        sp.add_argument("--lambda", dest="lam", type=float, help="Robin parameter for presets")
        sp.add_argument("--bc", choices=["dirichlet", "neumann", "robin"], help="dead-end condition for presets")
        sp.add_argument("--kmin", type=float, default=k_defaults[0])
        sp.add_argument("--kmax", type=float, default=k_defaults[1])
        sp.add_argument("--output", "-o", help="write CSV here instead of stdout")
        sp.add_argument("--threads", type=int, default=0, help="worker threads (default: all cores)")
        sp.add_argument("--require", action="store_true", help="exit with status 4 on an empty result")

    sp = sub.add_parser("scatter", help="transmission and reflection sweep")
    common(sp)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--src", help="incoming lead (default: first lead)")
    sp.add_argument("--dst", help="outgoing lead (default: second lead)")
    sp.add_argument("--outputs", help="comma separated subset of " + ",".join(OUTPUTS))
    sp.set_defaults(func=cmd_scatter)

    sp = sub.add_parser("spectrum", help="eigenvalues or bound states")
    common(sp, (None, None))
    sp.add_argument("--kappa", action="store_true", help="search bound states k = i kappa on [kmin, kmax]")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("quasibound", help="resonances from transition-amplitude peaks")
    common(sp)
    sp.add_argument("--samples", type=int, default=4000)
    sp.add_argument("--src", help="incoming lead (default: first lead)")
    sp.add_argument("--edges", help="comma separated target edges (default: all)")
    sp.add_argument("--sweep", help="also write the full |A|^2 sweep to this CSV file")
    sp.set_defaults(func=cmd_quasibound)

    sp = sub.add_parser("canonicalize", help="print a graph in canonical JSON form")
    sp.add_argument("graph", nargs="?")
    sp.add_argument("--preset")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--bc", choices=["dirichlet", "neumann", "robin"])
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_canonicalize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.output:
            with open(args.output, "w", newline="", encoding="utf-8") as fh:
                return args.func(args, fh)
        return args.func(args, sys.stdout)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qgreen: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GraphHasLeads, NoLeads, NonConservingVertex, ZeroWavenumber) as exc:
        print(f"qgreen: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, DegenerateK) as exc:
        print(f"qgreen: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParseError, GraphError, QGraphError, ValueError) as exc:
        print(f"qgreen: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

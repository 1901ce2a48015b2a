"""Command line front end: ``cliquedyn <command> ...``.

Every JSON report echoes the configuration it was produced with. Outputs are
deterministic for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from collections import Counter
from typing import Any, Sequence

from . import __version__
from .actions import GroupAction
from .cliques import DEFAULT_VERTEX_BUDGET, iterate_clique_graph
from .covers import DEFAULT_REDUCE_BUDGET, develop_universal_cover, quotient_graph, reduce_walk
from .graph import Graph, GraphError, complete_graph, cycle_graph, graph_from_json, icosahedron, octahedron
from .hexgeo import TorusSpec, WindowSpec, cone_lattice, hex_window, torus_graph
from .isomorphism import explicit_C, structure_check, verify_C
from .cliques import clique_graph
from .trishapes import (
    DEFAULT_MARGIN,
    deg26_census,
    geo_clique_graph,
    grid_census,
    invariant_D,
    is_grid_graph,
    neighbour_type_profile,
    rim_distances,
    shape_rim_distance,
)

CSV_VERSION = "1"


class CliError(Exception):
    pass


def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from None


def _load_host(path: str) -> Graph:
    data = _read_json(path)
    try:
        return graph_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path} is not a graph file: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _config(args: argparse.Namespace) -> dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _nonneg(name: str, value: int) -> None:
    if value < 0:
        raise CliError(f"--{name} must be non-negative")


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind == "torus":
        if not args.basis or len(args.basis) != 4:
            raise CliError("torus needs --basis a b c d")
        b = args.basis
        g = torus_graph(TorusSpec(((b[0], b[1]), (b[2], b[3])))).graph
    elif kind == "window":
        _nonneg("radius", args.radius)
        g = hex_window(WindowSpec(tuple(args.center), args.radius))  # type: ignore[arg-type]
    elif kind == "cone":
        g = cone_lattice(args.apex_degree, args.radius)
    elif kind == "octahedron":
        g = octahedron()
    elif kind == "icosahedron":
        g = icosahedron()
    elif kind == "complete":
        g = complete_graph(args.k)
    else:
        g = cycle_graph(args.k)
    _emit(json.dumps(g.to_json(), sort_keys=True) + "\n", args.out)
    return 0


def cmd_iterate(args: argparse.Namespace) -> int:
    _nonneg("n", args.n)
    host = _load_host(args.host)
    res = iterate_clique_graph(host, args.n, args.vertex_budget)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"# cliquedyn iterate csv v{CSV_VERSION}"])
    w.writerow(["level", "n_vertices", "n_edges", "max_degree", "budget_hit"])
    graphs = [host] + [lvl.graph for lvl in res.levels]
    for i, g in enumerate(graphs):
        w.writerow([i, g.vertex_count, g.edge_count, max(g.degrees(), default=0), 0])
    if res.budget_hit:
        w.writerow([len(graphs), "", "", "", 1])
    _emit(buf.getvalue(), args.out)
    return 0


def _geoclique(args: argparse.Namespace):
    _nonneg("level", args.level)
    _nonneg("margin", args.margin)
    host = _load_host(args.host)
    gcg = geo_clique_graph(host, args.level)
    return host, gcg, deg26_census(gcg, args.margin)


def cmd_geoclique(args: argparse.Namespace) -> int:
    host, gcg, census = _geoclique(args)
    g = gcg.graph
    profiles: dict[int, Counter] = {}
    for i in sorted(census.classifiable()):
        prof = neighbour_type_profile(gcg, i)
        key = " ".join(f"{t:+d}:{c}" for t, c in prof.items())
        profiles.setdefault(gcg.shapes[i].side, Counter())[key] += 1
    report = {
        "config": _config(args),
        "version": __version__,
        "host": {"vertices": host.vertex_count, "edges": host.edge_count},
        "shapes_per_side": {str(k): v for k, v in sorted(gcg.sides().items())},
        "edges": g.edge_count,
        "degree_histogram": {str(k): v for k, v in sorted(Counter(g.degrees()).items())},
        "census": {
            "deg26": len(census.deg26),
            "not26": len(census.not26),
            "excluded": len(census.excluded),
            "margin": census.boundary_margin,
        },
        "type_profiles": {str(s): dict(sorted(c.items())) for s, c in sorted(profiles.items())},
    }
    _emit(_dump(report), args.report)
    return 0


def cmd_census(args: argparse.Namespace) -> int:
    _, gcg, census = _geoclique(args)
    by_side: dict[int, dict[str, int]] = {}
    for name, ids in (("deg26", census.deg26), ("not26", census.not26), ("excluded", census.excluded)):
        for i in ids:
            row = by_side.setdefault(gcg.shapes[i].side, {"deg26": 0, "not26": 0, "excluded": 0})
            row[name] += 1
    report = {
        "config": _config(args),
        "by_side": {str(s): by_side[s] for s in sorted(by_side)},
        "totals": {"deg26": len(census.deg26), "not26": len(census.not26), "excluded": len(census.excluded)},
    }
    _emit(_dump(report), args.out)
    return 0


def cmd_invariant_d(args: argparse.Namespace) -> int:
    host, gcg, census = _geoclique(args)
    pool = sorted(census.classifiable())
    if args.probes == "all":
        probes = pool
    elif args.probes == "central":
        dist = rim_distances(host)
        depth = {i: shape_rim_distance(gcg.shapes[i], dist) for i in pool}
        best = max(depth.values(), default=0)
        probes = [i for i in pool if depth[i] == best]
    else:
        _nonneg("samples", args.samples)
        rng = random.Random(args.seed)
        probes = sorted(rng.sample(pool, min(args.samples, len(pool))))
    targets = args.targets
    if targets == "auto":
        targets = "grid" if is_grid_graph(host) else "window"
    if targets == "grid":
        if not is_grid_graph(host):
            raise CliError("--targets grid needs a grid window host")
        census = grid_census(gcg, args.margin)
    rep = invariant_D(gcg, probes, census)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([
        f"# cliquedyn invariant-D csv v{CSV_VERSION} level={args.level} margin={args.margin} "
        f"targets={targets} seed={args.seed}"
    ])
    w.writerow(["probe", "side", "vertices", "distance"])
    for p in probes:
        s = gcg.shapes[p]
        d = rep.distances[p]
        w.writerow([p, s.side, " ".join(map(str, s.vertex_set)), "inf" if math.isinf(d) else int(d)])
    mx = rep.maximum
    w.writerow(["max", "", "", "inf" if math.isinf(mx) else int(mx)])
    if rep.not26_empty:
        w.writerow(["# not-26 set is empty"])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_cover(args: argparse.Namespace) -> int:
    host = _load_host(args.host)
    dev = develop_universal_cover(host, args.radius, args.base)
    report = {
        "config": _config(args),
        "cover": dev.graph.to_json(),
        "projection": list(dev.cover.vertex_map),
        "base": dev.base,
        "closed": dev.closed,
        "interior": None if dev.cover.interior is None else sorted(dev.cover.interior),
    }
    _emit(_dump(report), args.out)
    return 0


def cmd_quotient(args: argparse.Namespace) -> int:
    host = _load_host(args.host)
    try:
        action = GroupAction.from_json(_read_json(args.action))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{args.action} is not an action file: {exc}") from None
    if action.degree != host.vertex_count:
        raise CliError("action degree does not match the host")
    bad = action.check_automorphisms(host)
    if bad is not None:
        raise CliError(f"generator {bad} is not an automorphism of the host")
    q = quotient_graph(host, action)
    report = {
        "config": _config(args),
        "quotient": q.quotient.to_json(),
        "projection": list(q.projection),
        "loops": q.loops,
    }
    _emit(_dump(report), args.out)
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    host = _load_host(args.host)
    data = _read_json(args.walk)
    walk = data["walk"] if isinstance(data, dict) else data
    res = reduce_walk(host, [int(x) for x in walk], args.budget)
    report = {
        "config": _config(args),
        "trivial": res.trivial,
        "final": list(res.final),
        "moves": [m.to_json() for m in res.moves],
        "expanded": res.expanded,
    }
    _emit(_dump(report), args.out)
    return 0


def cmd_verify_structure(args: argparse.Namespace) -> int:
    if args.torus:
        spec = TorusSpec.from_json(_read_json(args.torus))
    elif args.basis and len(args.basis) == 4:
        b = args.basis
        spec = TorusSpec(((b[0], b[1]), (b[2], b[3])))
    else:
        raise CliError("verify-structure needs --torus spec.json or --basis a b c d")
    rep = structure_check(torus_graph(spec), args.level)
    sys.stdout.write(
        f"{'PASS' if rep.ok else 'FAIL'} level={rep.level} iterate={rep.iterate_size} quotient={rep.quotient_size}\n"
    )
    if args.witness:
        _emit(_dump({
            "config": _config(args),
            "ok": rep.ok,
            "bijection": None if rep.witness is None else list(rep.witness.bijection),
        }), args.witness)
    return 0 if rep.ok else 1


def cmd_verify_c(args: argparse.Namespace) -> int:
    if args.level < 1:
        raise CliError("--level must be >= 1")
    host = _load_host(args.host)
    upper = geo_clique_graph(host, args.level)
    lower = geo_clique_graph(host, args.level - 1)
    cmap = explicit_C(upper, lower, host, args.margin)
    rep = verify_C(cmap, clique_graph(lower.graph))
    report = {
        "config": _config(args),
        "ok": rep.ok,
        "checks": {"maximal": rep.maximal, "injective": rep.injective, "adjacency": rep.adjacency, "sizes": rep.sizes},
        "checked": rep.checked,
        "excluded": rep.excluded,
        "bijective": rep.bijective,
        "failures": [[c, i, d] for c, i, d in rep.failures],
    }
    _emit(_dump(report), args.out)
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cliquedyn", description="Clique graph dynamics on triangulated surfaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a host graph as JSON")
    p.add_argument("kind", choices=["torus", "window", "cone", "octahedron", "icosahedron", "complete", "cycle"])
    p.add_argument("--basis", type=int, nargs=4, metavar=("A", "B", "C", "D"))
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--center", type=int, nargs=3, default=[0, 0, 0])
    p.add_argument("--apex-degree", type=int, default=7)
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("iterate", help="iterate the clique graph operator, CSV per level")
    p.add_argument("--host", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--vertex-budget", type=int, default=DEFAULT_VERTEX_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_iterate)

    for name, func, help_ in (
        ("geoclique", cmd_geoclique, "build G_n and report counts, degrees and type profiles"),
        ("census", cmd_census, "degree-26 census of G_n per side"),
        ("invariant-D", cmd_invariant_d, "G_n distance of probes to the not-26 set, CSV"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--host", required=True)
        p.add_argument("--level", type=int, required=True)
        p.add_argument("--margin", type=int, default=DEFAULT_MARGIN)
        if name == "geoclique":
            p.add_argument("--report")
        else:
            p.add_argument("--out")
        if name == "invariant-D":
            p.add_argument("--probes", choices=["central", "all", "sample"], default="central")
            p.add_argument("--samples", type=int, default=20)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument(
                "--targets", choices=["auto", "window", "grid"], default="auto",
                help="classify not-26 targets by window degree or by degree in the whole grid",
            )
        p.set_defaults(func=func)

    p = sub.add_parser("cover", help="develop a ball of the universal triangular cover")
    p.add_argument("--host", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("quotient", help="quotient a graph by a permutation group")
    p.add_argument("--host", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("reduce", help="search for a null-homotopy of a closed walk")
    p.add_argument("--host", required=True)
    p.add_argument("--walk", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_REDUCE_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify-structure", help="compare k^n T with the quotient of the lifted G_n")
    p.add_argument("--torus")
    p.add_argument("--basis", type=int, nargs=4, metavar=("A", "B", "C", "D"))
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--witness")
    p.set_defaults(func=cmd_verify_structure)

    p = sub.add_parser("verify-C", help="check the explicit map G_n -> kG_{n-1}")
    p.add_argument("--host", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--margin", type=int, default=DEFAULT_MARGIN)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_c)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GraphError, ValueError) as exc:
        print(f"cliquedyn {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

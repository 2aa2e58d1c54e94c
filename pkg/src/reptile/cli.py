"""Command-line interface: verify, search, export, report, enumerate.

Exit codes: 0 success / verified rep-tile, 1 verified not a rep-tile,
2 inconclusive (node budget), 3 usage or input error, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    DimensionError,
    InconclusiveError,
    ParseError,
    ResourceError,
    ValidationError,
)
from .export import mesh_export, patch_export, supertile_patch, svg_export
from .isometry import enumerate_matrices
from .neighbors import (
    DEFAULT_NODE_BUDGET,
    boundary_dimension,
    build_graph,
    decide_rep_tile,
    hata_connected,
    neighbor_count,
)
from .search import SEARCH_NODE_BUDGET, FilterSpec, SearchConfig, run_search
from .system import load_system
from .topology import voxelize

EXIT_OK = 0
EXIT_NOT_REP_TILE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_INTERNAL = 4


def _analysis_fields(graph, is_tile: bool) -> dict:
    connected, _ = hata_connected(graph)
    return {
        "is_rep_tile": is_tile,
        "neighbor_count": neighbor_count(graph),
        "boundary_dimension": boundary_dimension(graph) if is_tile else None,
        "connected": connected,
        "node_budget_exceeded": False,
    }


def _print_fields(fields: dict, fmt: str) -> None:
    if fmt == "records":
        print(json.dumps(fields, sort_keys=True))
        return
    for key, value in fields.items():
        if isinstance(value, float):
            print(f"{key}: {value:.6f}")
        elif isinstance(value, bool):
            print(f"{key}: {'true' if value else 'false'}")
        else:
            print(f"{key}: {value}")


def cmd_verify(args) -> int:
    system = load_system(args.input)
    graph = build_graph(system, node_budget=args.node_budget)
    try:
        is_tile = decide_rep_tile(graph)
    except InconclusiveError:
        _print_fields(
            {
                "is_rep_tile": None,
                "neighbor_count": None,
                "boundary_dimension": None,
                "connected": None,
                "node_budget_exceeded": True,
            },
            args.format,
        )
        return EXIT_INCONCLUSIVE
    _print_fields(_analysis_fields(graph, is_tile), args.format)
    return EXIT_OK if is_tile else EXIT_NOT_REP_TILE


def cmd_enumerate(args) -> int:
    for k, m in enumerate(enumerate_matrices(args.dim)):
        if args.format == "records":
            print(json.dumps({"index": k, "perm": list(m.perm), "signs": list(m.signs)}))
        else:
            perm = ",".join(str(p) for p in m.perm)
            signs = ",".join(str(s) for s in m.signs)
            print(f"{k}\tperm=({perm})\tsigns=({signs})")
    return EXIT_OK


def cmd_search(args) -> int:
    neighbor_range = None
    if args.filter_neighbors_min is not None or args.filter_neighbors_max is not None:
        lo = args.filter_neighbors_min if args.filter_neighbors_min is not None else 0
        hi = (
            args.filter_neighbors_max
            if args.filter_neighbors_max is not None
            else 10**9
        )
        neighbor_range = (lo, hi)
    filters = FilterSpec(
        require_connected=args.filter_connected,
        boundary_dim_target=args.filter_boundary_dim,
        neighbor_count_range=neighbor_range,
    )
    config = SearchConfig(
        dim=args.dim,
        mode=args.mode,
        translation_range=args.range,
        seed=args.seed,
        trials=args.trials,
        time_limit=args.time_limit,
        filters=filters,
        node_budget=args.node_budget,
        output_path=args.output,
    )
    on_record = None
    if args.format == "records":
        on_record = lambda record: print(record.to_json_line())
    summary = run_search(config, workers=args.workers, on_record=on_record)
    fields = {
        "trials": summary.trials,
        "rep_tiles": summary.rep_tiles,
        "not_rep_tiles": summary.not_rep_tiles,
        "inconclusive": summary.inconclusive,
        "filtered_out": summary.filtered_out,
        "duplicates": summary.duplicates,
        "stored": summary.stored,
        "elapsed_seconds": round(summary.elapsed, 3),
        "trials_per_second": round(summary.rate, 3),
    }
    if args.format == "records":
        print(json.dumps({"summary": fields}, sort_keys=True))
    else:
        for key, value in fields.items():
            print(f"{key}: {value}")
    return EXIT_OK


def cmd_export(args) -> int:
    system = load_system(args.input)
    out = Path(args.output)
    if args.kind == "mesh":
        data = mesh_export(voxelize(system, args.level))
    else:
        graph = build_graph(system, node_budget=args.node_budget)
        if not decide_rep_tile(graph):  # may raise InconclusiveError -> exit 2
            print("error: not a rep-tile; nothing to tile with", file=sys.stderr)
            return EXIT_NOT_REP_TILE
        patch = supertile_patch(system, args.level)
        if args.kind == "svg":
            data = svg_export(voxelize(system, args.level), patch)
        else:
            data = patch_export(system, patch)
    out.write_bytes(data)
    print(f"wrote {out} ({len(data)} bytes)")
    return EXIT_OK


def cmd_report(args) -> int:
    from .figures import render_tile_figure  # deferred: pulls in matplotlib

    system = load_system(args.input)
    graph = build_graph(system, node_budget=args.node_budget)
    exceeded = graph.node_budget_exceeded
    if exceeded:
        fields = {
            "is_rep_tile": None,
            "neighbor_count": None,
            "boundary_dimension": None,
            "connected": None,
            "node_budget_exceeded": True,
        }
        is_tile = False
    else:
        is_tile = decide_rep_tile(graph)
        fields = _analysis_fields(graph, is_tile)

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    records_path = out_dir / f"{stem}.report.jsonl"
    with records_path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"input": str(args.input), **fields}, sort_keys=True) + "\n")
    written = [records_path]
    if not exceeded:
        figure_path = out_dir / f"{stem}.png"
        render_tile_figure(
            system,
            figure_path,
            is_rep_tile=is_tile,
            level=args.level,
            title=stem,
        )
        written.append(figure_path)

    _print_fields(fields, args.format)
    for path in written:
        print(f"wrote {path}")
    if exceeded:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if is_tile else EXIT_NOT_REP_TILE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reptile",
        description="Verify, search for, analyze, and export lattice rep-tiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument(
            "--format", choices=("human", "records"), default="human",
            help="human-readable lines or machine-readable JSON lines",
        )

    p = sub.add_parser("enumerate", help="list all signed permutation matrices")
    p.add_argument("--dim", type=int, choices=(2, 3), required=True)
    add_format(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="decide the rep-tile property for a system file")
    p.add_argument("--input", required=True)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    add_format(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="random search for rep-tiles")
    p.add_argument("--dim", type=int, choices=(2, 3), required=True)
    p.add_argument("--mode", choices=("free", "block"), default="free")
    p.add_argument("--range", type=int, default=1, help="translation coordinate range")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--node-budget", type=int, default=SEARCH_NODE_BUDGET)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", default=None, help="result store path (JSON lines)")
    p.add_argument("--filter-connected", action="store_true")
    p.add_argument("--filter-boundary-dim", type=float, default=None)
    p.add_argument("--filter-neighbors-min", type=int, default=None)
    p.add_argument("--filter-neighbors-max", type=int, default=None)
    add_format(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("export", help="write mesh/svg/patch files for a system")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("mesh", "svg", "patch"), required=True)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser(
        "report", help="analyze a system and render figures next to the records"
    )
    p.add_argument("--input", required=True)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--output-dir", default=".")
    add_format(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return EXIT_USAGE if exc.code == 2 else (exc.code or 0)
    try:
        return args.func(args)
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (
        ParseError,
        ValidationError,
        DimensionError,
        ResourceError,
        FileNotFoundError,
        IsADirectoryError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

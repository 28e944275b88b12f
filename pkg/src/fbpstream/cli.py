"""Command-line client for the fbpstream service.

Subcommands: ``run`` streams an input file through the on-line phase and
collects snapshots, ``summarize`` queries a snapshot catalog for a time
slot, ``synth`` materializes a synthetic stream, ``serve`` starts the HTTP
service.  All computation happens behind the service API; by default the
service is mounted in-process, ``--server`` points at a remote one.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 query or
inconsistency error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .client import ServiceClient, ServiceError
from .core import ConfigurationError, DataError, FbpStreamError, QueryError
from .engine import RunReport, format_report, report_to_tsv
from .ingest import IngestConfig, generate_synth, parse_synth_spec, read_batches
from .snapshot import snapshot_filename

EXIT_CONFIG, EXIT_DATA, EXIT_QUERY = 2, 3, 4


def _session_config(args: argparse.Namespace) -> dict:
    return {
        "window_size": args.window_size,
        "k_max": args.k_max,
        "t_star": args.t_star,
        "snapshot_every": args.snapshot_every,
        "depth": args.depth,
        "fence_factor": args.fence_factor,
        "outlier_removal": not args.raw_envelope,
        "basis_size": args.basis_size,
        "penalty_lambda": args.penalty_lambda,
        "smoothing_enabled": not args.no_smooth,
    }


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def cmd_run(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out)
    cfg = IngestConfig(path=None if args.input == "-" else args.input,
                       layout=args.layout, window_size=args.window_size,
                       delimiter=args.delimiter, has_header=args.has_header)
    with ServiceClient(args.server) as client:
        session = client.create_session(_session_config(args))
        try:
            for batch in read_batches(cfg):
                client.push_window(session, batch.raw.tolist())
            client.force_snapshot(session)
            for taken_at in client.list_snapshots(session):
                snap = client.get_snapshot(session, taken_at)
                _write(out_dir / snapshot_filename(taken_at), snap["text"])
            rep = client.report(session)
            events_text = client.events(session)["text"]
        finally:
            client.close_session(session)

    report = RunReport(
        windows_processed=rep["windows_processed"],
        final_k=rep["k"],
        allocations=tuple((a["cluster_id"], a["n_allocated"], a["last_update"])
                          for a in rep["allocations"]),
        creates=rep["creates"], merges=rep["merges"], discards=rep["discards"],
        discarded_weight=rep["discarded_weight"],
        wall_time_s=time.perf_counter() - started,
    )
    text = format_report(report)
    _write(out_dir / "report.txt", text)
    _write(out_dir / "events.tsv", events_text)
    if args.report_file:
        _write(Path(args.report_file), report_to_tsv(report))
    sys.stdout.write(text)
    print(f"wall time: {report.wall_time_s:.3f} s", file=sys.stderr)
    return 0


def cmd_summarize(args: argparse.Namespace) -> int:
    snap_dir = Path(args.snapshots)
    if not snap_dir.is_dir():
        raise QueryError(f"snapshot directory {snap_dir} does not exist")
    texts = [p.read_text(encoding="utf-8") for p in sorted(snap_dir.glob("*.fbpsnap"))]
    if not texts:
        raise QueryError(f"no snapshots found in {snap_dir}")
    out_dir = Path(args.out)
    with ServiceClient(args.server) as client:
        result = client.summarize(
            snapshots=texts, t_lo=args.t_lo, t_hi=args.t_hi,
            clusters=args.clusters, seed=args.seed, render_svg=True)

    for i, centroid in enumerate(result["centroids"]):
        lines = [f"fbp macro={i} weight={result['weights'][i]} "
                 f"w={centroid['window_size']} window={centroid['window_index']}"]
        for name in ("envelope_min", "box_lower", "median", "box_upper", "envelope_max"):
            lines.append(" ".join(f"{v:.17g}" for v in centroid[name]))
        _write(out_dir / f"summary_c{i}.fbp", "\n".join(lines) + "\n")
        _write(out_dir / f"summary_c{i}.svg", result["svgs"][i])
    label_lines = ["cluster_id\tmacro_index\tweight"]
    for row in result["labels"]:
        label_lines.append(f"{row['cluster_id']}\t{row['macro_index']}\t{row['weight']}")
    _write(out_dir / "labels.tsv", "\n".join(label_lines) + "\n")

    print(f"slot {result['slot']}: {len(result['centroids'])} summaries, "
          f"delta={result['delta']:.6g}, iterations={result['iterations']}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = parse_synth_spec(Path(args.spec).read_text(encoding="utf-8"))
    path = generate_synth(spec, Path(args.output))
    print(f"wrote {spec.n_streams} series x {spec.total_length} samples to {path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn
    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _add_run_parser(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("run", help="stream an input source through the on-line phase")
    p.add_argument("--input", required=True, help="input file, or '-' for stdin")
    p.add_argument("--layout", choices=("wide", "long"), default="wide")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--out", required=True, help="directory for snapshots and reports")
    p.add_argument("--window-size", type=int, default=30)
    p.add_argument("--k-max", type=int, default=50)
    p.add_argument("--t-star", type=int, default=50,
                   help="staleness age, in windows")
    p.add_argument("--snapshot-every", type=int, default=10,
                   help="snapshot interval, in windows")
    p.add_argument("--depth", choices=("mbd", "bd"), default="mbd")
    p.add_argument("--fence-factor", type=float, default=1.5)
    p.add_argument("--raw-envelope", action="store_true",
                   help="whiskers from all curves, no outlier trimming")
    p.add_argument("--basis-size", type=int, default=None)
    p.add_argument("--lambda", dest="penalty_lambda", type=float, default=0.0)
    p.add_argument("--no-smooth", action="store_true")
    p.add_argument("--report-file", default=None, help="also write the report as TSV")
    p.add_argument("--server", default=None, help="service URL (default: in-process)")
    p.set_defaults(func=cmd_run)


def _add_summarize_parser(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("summarize", help="summarize a time slot from snapshots")
    p.add_argument("--snapshots", required=True, help="snapshot catalog directory")
    p.add_argument("--from", dest="t_lo", type=int, required=True,
                   help="slot start, in windows")
    p.add_argument("--to", dest="t_hi", type=int, required=True,
                   help="slot end, in windows")
    p.add_argument("--clusters", type=int, required=True, help="number of summaries")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="directory for summaries and figures")
    p.add_argument("--server", default=None, help="service URL (default: in-process)")
    p.set_defaults(func=cmd_summarize)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbpstream",
        description="Functional-boxplot micro-clustering of streaming time series")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_parser(sub)
    _add_summarize_parser(sub)

    p = sub.add_parser("synth", help="generate a synthetic stream file")
    p.add_argument("--spec", required=True, help="JSON spec of regimes")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ServiceError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except ConfigurationError as exc:
        print(f"error [configuration]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QueryError as exc:
        print(f"error [query]: {exc}", file=sys.stderr)
        return EXIT_QUERY
    except DataError as exc:
        print(f"error [data]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FbpStreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

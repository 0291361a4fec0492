"""`stimkb` command line: ingest, validate, query, eval, sequence, stats.

Exit statuses: 0 success, 2 usage or parse error, 3 data validation error,
4 internal invariant violation.
"""

import argparse
import json
import sys
from pathlib import Path

from . import evaluation, retrieval, sequence as seqmod
from .errors import ParseError, QueryError, StimKbError, ValidationError
from .evaluation import (
    ExperimentConfig,
    ExperimentQuery,
    parse_judgments,
    report_to_tsv,
    run_experiment,
)
from .snapshot import build_workspace, load_snapshot, parse_manifest, save_snapshot

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def _cmd_ingest(args):
    manifest = parse_manifest(args.manifest)
    ws = build_workspace(manifest)
    save_snapshot(ws, args.snapshot)
    mapped = len(ws.mapping) if ws.mapping is not None else 0
    print(
        f"{len(ws.corpus)} records, 0 invalid; "
        f"{len(ws.graph.concepts)} concepts; "
        f"{mapped} mapped keywords, {len(ws.unmapped_keywords)} unmapped"
    )
    for kw in ws.unmapped_keywords:
        print(f"warning: unmapped keyword {kw!r}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args):
    manifest = parse_manifest(args.manifest)
    ws = build_workspace(manifest)
    print(f"ok: {len(ws.corpus)} records, {len(ws.graph.concepts)} concepts")
    return EXIT_OK


def _query_output(ws, q, fmt):
    if q.mode == retrieval.MODE_FILTER:
        keys = sorted(retrieval.filter_query(ws.corpus, ws.graph, q, ws.closure))
        if fmt == "json":
            return json.dumps({"stimuli": keys}, indent=2) + "\n"
        return "".join(k + "\n" for k in keys)
    result = retrieval.ranked_query(ws.corpus, ws.graph, q, ws.closure)
    if fmt == "json":
        return (
            json.dumps(
                {
                    "measure": result.measure.value,
                    "entries": [
                        {"rank": i, "score": s, "stimulus": k}
                        for i, (k, s) in enumerate(result.entries, start=1)
                    ],
                },
                indent=2,
            )
            + "\n"
        )
    lines = []
    for i, (key, score) in enumerate(result.entries, start=1):
        db, _, sid = key.partition("/")
        lines.append(f"{i}\t{score:.6f}\t{key}\t{db}\t{sid}\n")
    return "".join(lines)


def _cmd_query(args):
    ws = load_snapshot(args.snapshot)
    try:
        q = retrieval.parse_query(args.query)
    except QueryError as e:
        caret = ""
        if e.position is not None:
            caret = "\n" + args.query + "\n" + " " * e.position + "^"
        print(f"query error: {e}{caret}", file=sys.stderr)
        return EXIT_USAGE
    if q.mode == retrieval.MODE_RANK and ws.limit is not None and args_limit_unset(q):
        q.limit = ws.limit
    sys.stdout.write(_query_output(ws, q, args.format))
    return EXIT_OK


def args_limit_unset(q):
    # parse_query always fills limit for rank mode; the snapshot default
    # only applies when the query used the grammar default.
    return q.limit == retrieval.DEFAULT_LIMIT


def _parse_eval_queries(text):
    """`qid<TAB>concept<TAB>keyword` lines; NA for an absent term."""
    queries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(
                f"expected `qid<TAB>concept<TAB>keyword`, got {raw!r}", line=lineno
            )
        qid, concept, keyword = (p.strip() for p in parts)
        queries.append(
            ExperimentQuery(
                qid=qid,
                concept=None if concept == "NA" else concept,
                keyword=None if keyword == "NA" else keyword,
            )
        )
    return queries


def _cmd_eval(args):
    ws = load_snapshot(args.snapshot)
    queries = _parse_eval_queries(Path(args.queries).read_text())
    relevant, _ = parse_judgments(Path(args.judgments).read_text())
    config = ExperimentConfig(
        candidate_size=args.candidates,
        seed=args.seed if args.seed is not None else ws.seed,
        max_resamples=args.retries,
    )
    measures = [m.strip() for m in args.measures.split(",")]
    schemes = [s.strip() for s in args.schemes.split(",")]
    report = run_experiment(
        ws.corpus, ws.graph, queries, relevant, measures, schemes, config
    )
    text = report_to_tsv(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_sequence(args):
    ws = load_snapshot(args.snapshot)
    q = retrieval.parse_query(args.query)
    result = retrieval.ranked_query(ws.corpus, ws.graph, q, ws.closure)
    seq = seqmod.build_sequence(
        result,
        count=args.count,
        duration_ms=args.duration,
        isi_ms=args.isi,
        track=args.track,
    )
    events = seqmod.emit_schedule(seq)
    if args.out_prefix:
        Path(args.out_prefix + ".json").write_text(
            seqmod.sequence_to_json(seq) + "\n"
        )
        Path(args.out_prefix + ".schedule.tsv").write_text(
            seqmod.schedule_to_tsv(events)
        )
        print(f"{len(seq.items)} items, {len(events)} events, {seq.total_ms} ms")
    else:
        sys.stdout.write(seqmod.sequence_to_json(seq) + "\n")
        sys.stdout.write(seqmod.schedule_to_tsv(events))
    return EXIT_OK


def _cmd_stats(args):
    ws = load_snapshot(args.snapshot)
    concepts = set()
    keywords = set()
    for rec in ws.corpus:
        concepts.update(rec.concepts())
        keywords.update(rec.keywords())
    print(f"{len(ws.corpus)} records")
    print(f"{len(keywords)} distinct keywords")
    print(f"{len(concepts)} distinct concepts")
    print(f"{len(ws.graph.concepts)} taxonomy concepts, max depth "
          f"{ws.graph.max_depth}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stimkb",
        description="Knowledge-base engine for affectively annotated "
        "multimedia stimulus metadata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a snapshot from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--snapshot", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("validate", help="parse and validate manifest inputs")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("query", help="run a filter or rank query")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("query")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("eval", help="run the retrieval evaluation protocol")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--judgments", required=True)
    p.add_argument("--measures",
                   default="inclusion,levenshtein,pathlen,wupalmer")
    p.add_argument("--schemes", default="keyword,concept")
    p.add_argument("--candidates", type=int, default=100)
    p.add_argument("--retries", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sequence", help="build a presentation sequence")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--duration", type=int, required=True)
    p.add_argument("--isi", type=int, default=0)
    p.add_argument("--track", default="visual")
    p.add_argument("--out-prefix")
    p.add_argument("query")
    p.set_defaults(func=_cmd_sequence)

    p = sub.add_parser("stats", help="print corpus statistics")
    p.add_argument("--snapshot", required=True)
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (QueryError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except StimKbError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

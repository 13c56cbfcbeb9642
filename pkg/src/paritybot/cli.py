"""Operator command line. Thin by design: every subcommand parses arguments,
calls the core package, and prints; no business logic lives here.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import sys
from pathlib import Path

from .analytics import (
    candidate_reports,
    election_report,
    load_lexicon,
    render_candidate_table,
    render_election_table,
    render_lexicon_table,
    report_payload,
)
from .common import dump_json
from .config import AppConfig, load_config, parse_source_spec
from .engine import DryRunPoster
from .errors import ParityError
from .evaluation import (
    AnnotationPlan,
    AnnotationStudy,
    draw_sample,
    fleiss_kappa,
    fp_report,
    load_study,
    majority_label,
    matrix_from_labels,
    read_labels_csv,
    save_study,
)
from .ingest import open_source
from .library import PositivLibrary, State
from .pipeline import run_pipeline
from .roster import load_roster
from .scorer import LexiconProvider, LexiconScorerConfig
from .scorer.http import HttpScorerClient
from .store import StoreRegistry


def _build_provider(config: AppConfig):
    if config.scorer.provider == "http":
        return HttpScorerClient(base_url=config.scorer.base_url)
    entries = {}
    if config.scorer.lexicon_path is not None:
        import json

        entries = json.loads(config.scorer.lexicon_path.read_text(encoding="utf-8"))
    return LexiconProvider(LexiconScorerConfig(entries=entries, floor=config.scorer.floor))


def _open_store(config: AppConfig, create: bool):
    return StoreRegistry(config.store_root).open(config.election.id, create=create)


def _load_library(config: AppConfig) -> PositivLibrary:
    library = PositivLibrary(config.library_snapshot)
    for seed_file in config.seed_files:
        library.import_seed(seed_file)
    return library


def _check_election(config: AppConfig, election_arg: str | None) -> str:
    requested = election_arg or config.election.id
    if requested != config.election.id:
        raise ParityError(
            "UNKNOWN_ELECTION", f"config {config.path} serves {config.election.id!r}, not {requested!r}"
        )
    return requested


# --- subcommands --------------------------------------------------------------


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.source is not None:
        source_spec = parse_source_spec(args.source, Path.cwd())
        source_label = args.source
    elif config.source is not None:
        source_spec = config.source
        source_label = repr(config.source)
    else:
        raise ParityError("CONFIG_INVALID", "no source: pass --source or set [source] spec")
    seed = args.seed if args.seed is not None else config.run_seed
    store = _open_store(config, create=True)
    library = _load_library(config)
    candidates = load_roster(config.roster_path, config.election.id)
    decisions = Path(args.decisions) if args.decisions else (
        config.decisions_path or config.store_root / "decisions.jsonl"
    )
    manifest = Path(args.manifest) if args.manifest else (
        config.manifest_path or config.store_root / "manifest.json"
    )
    result = run_pipeline(
        source=open_source(source_spec),
        election=config.election,
        roster_handles=[c.handle for c in candidates],
        library=library,
        provider=_build_provider(config),
        store=store,
        seed=seed,
        config_path=str(config.path),
        source_label=source_label,
        poster=DryRunPoster(),
        decisions_path=decisions,
        manifest_path=manifest,
    )
    c = result.manifest.counters
    print(
        f"analyzed {c['analyzed']}  flagged {c['flagged']}  posted {c['posted']}  "
        f"suppressed {c['suppressed']}  scoring_failed {c['scoring_failed']}"
    )
    print(f"decisions: {result.decisions_path}")
    print(f"manifest:  {result.manifest_path}")
    return 0


def cmd_report(args) -> int:
    config = load_config(args.config)
    election_id = _check_election(config, args.election)
    threshold = args.threshold if args.threshold is not None else config.election.analysis_threshold_default
    store = _open_store(config, create=False)
    candidates = load_roster(config.roster_path, config.election.id)
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else []
    summary = election_report(store, config.election, threshold, candidates)
    per_candidate = candidate_reports(store, candidates, threshold, lexicon)
    payload = report_payload(summary, per_candidate)
    body = dump_json(payload)
    if args.json:
        sys.stdout.write(body)
    else:
        sys.stdout.write(render_election_table(summary))
        sys.stdout.write("\n")
        sys.stdout.write(render_candidate_table(per_candidate))
    out = Path(args.out) if args.out else config.store_root / f"report-{election_id}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(body, encoding="utf-8")
    if not args.json:
        print(f"\nreport written to {out}")
    return 0


def cmd_lexicon_report(args) -> int:
    config = load_config(args.config)
    threshold = args.threshold if args.threshold is not None else config.election.analysis_threshold_default
    if config.lexicon_path is None:
        raise ParityError("LEXICON_INVALID", "config has no [lexicon] path")
    store = _open_store(config, create=False)
    candidates = load_roster(config.roster_path, config.election.id)
    lexicon = load_lexicon(config.lexicon_path)
    per_candidate = candidate_reports(store, candidates, threshold, lexicon)
    with_rows = [r for r in per_candidate if r.lexicon_rows]
    if args.json:
        payload = [
            {"handle": r.handle, "lexicon_rows": list(r.lexicon_rows)} for r in with_rows
        ]
        sys.stdout.write(dump_json(payload))
    else:
        sys.stdout.write(render_lexicon_table(with_rows))
    return 0


def cmd_library(args) -> int:
    config = load_config(args.config)
    library = PositivLibrary(config.library_snapshot)
    if args.library_command == "import":
        total = 0
        for seed_file in args.seed_files:
            count = library.import_seed(seed_file)
            print(f"{seed_file}: {count} imported")
            total += count
        print(f"total {total} imported, library now {len(library.all_entries())}")
        return 0
    # list
    entries = (
        library.by_state(State(args.state.upper())) if args.state else library.all_entries()
    )
    if args.json:
        from .library import _entry_to_json

        sys.stdout.write(dump_json([_entry_to_json(e) for e in entries]))
    else:
        for e in entries:
            tags = f" [{','.join(e.language_tags)}]" if e.language_tags else ""
            print(f"{e.id:>5}  {e.state.value:<9} {e.origin.value:<12}{tags} {e.effective_text}")
        counts = library.counts()
        print(
            f"\n{counts['APPROVED']} approved, {counts['PENDING']} pending, "
            f"{counts['REJECTED']} rejected"
        )
    return 0


def cmd_annotate(args) -> int:
    if args.annotate_command == "plan":
        config = load_config(args.config)
        threshold = (
            args.threshold if args.threshold is not None else config.election.analysis_threshold_default
        )
        annotators = tuple(a.strip() for a in args.annotators.split(",") if a.strip())
        plan = AnnotationPlan(
            sample_size=len(annotators) * args.unique + args.overlap,
            annotators=annotators,
            per_annotator_unique=args.unique,
            overlap_size=args.overlap,
            source_threshold=threshold,
            seed=args.seed,
        )
        store = _open_store(config, create=False)
        sample = draw_sample(store, threshold, plan.sample_size, plan.seed)
        texts = {r.raw.id: r.clean.scoring_text for r in sample}
        study = AnnotationStudy(plan, texts)
        save_study(study, args.out)
        print(
            f"plan: {len(annotators)} annotators x {args.unique} unique + {args.overlap} overlap "
            f"= {plan.sample_size} tweets"
        )
        print(f"study written to {args.out}")
        return 0
    if args.annotate_command == "assign":
        study = load_study(args.study)
        if args.json:
            payload = {
                a: {"unique": list(asg.unique), "overlap": list(asg.overlap)}
                for a, asg in study.assignments.items()
            }
            sys.stdout.write(dump_json(payload))
        else:
            for annotator, asg in study.assignments.items():
                print(f"{annotator}: {len(asg.unique)} unique + {len(asg.overlap)} overlap")
        return 0
    if args.annotate_command == "kappa":
        labels = read_labels_csv(args.labels)
        kappa = fleiss_kappa(matrix_from_labels(labels))
        print(f"{kappa:.4f}")
        return 0
    # fp
    labels = read_labels_csv(args.labels)
    by_tweet: dict[str, list] = {}
    for label in labels:
        by_tweet.setdefault(label.tweet_id, []).append(label.value)
    report = fp_report(majority_label(vs) for vs in by_tweet.values())
    if args.json:
        sys.stdout.write(
            dump_json(
                {
                    "toxic_count": report.toxic_count,
                    "not_toxic_count": report.not_toxic_count,
                    "undecided_count": report.undecided_count,
                    "toxic_pct": report.toxic_pct,
                    "not_toxic_pct": report.not_toxic_pct,
                }
            )
        )
    else:
        toxic_pct = f"{report.toxic_pct}%" if report.toxic_pct is not None else "—"
        not_toxic_pct = f"{report.not_toxic_pct}%" if report.not_toxic_pct is not None else "—"
        print(f"toxic      {report.toxic_count:>6}  {toxic_pct}")
        print(f"not toxic  {report.not_toxic_count:>6}  {not_toxic_pct}")
        print(f"undecided  {report.undecided_count:>6}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, state_from_config

    config = load_config(args.config)
    state = state_from_config(config)
    host = args.host or config.api.host
    port = args.port if args.port is not None else config.api.port
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parity",
        description="Watch a tweet stream for toxicity aimed at tracked candidates and "
        "answer it with vetted positivtweets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the pipeline over a source")
    run.add_argument("--config", required=True)
    run.add_argument("--source", help="replay:<path> | synthetic:k=v,... | live:<endpoint>")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--decisions", help="decision log path (JSON Lines)")
    run.add_argument("--manifest", help="run manifest path (JSON)")
    run.set_defaults(func=cmd_run)

    report = sub.add_parser("report", help="election and per-candidate report")
    report.add_argument("--config", required=True)
    report.add_argument("--election", help="must match the config's election")
    report.add_argument("--threshold", type=float, default=None)
    report.add_argument("--json", action="store_true", help="print the JSON payload instead")
    report.add_argument("--out", help="where to write the JSON report file")
    report.set_defaults(func=cmd_report)

    lexicon = sub.add_parser("lexicon-report", help="microaggression match and false-negative counts")
    lexicon.add_argument("--config", required=True)
    lexicon.add_argument("--threshold", type=float, default=None)
    lexicon.add_argument("--json", action="store_true")
    lexicon.set_defaults(func=cmd_lexicon_report)

    library = sub.add_parser("library", help="manage the positivtweet library")
    library_sub = library.add_subparsers(dest="library_command", required=True)
    lib_import = library_sub.add_parser("import", help="import seed files")
    lib_import.add_argument("--config", required=True)
    lib_import.add_argument("seed_files", nargs="+")
    lib_list = library_sub.add_parser("list", help="list library entries")
    lib_list.add_argument("--config", required=True)
    lib_list.add_argument("--state", choices=["pending", "approved", "rejected"])
    lib_list.add_argument("--json", action="store_true")
    library.set_defaults(func=cmd_library)

    annotate = sub.add_parser("annotate", help="annotation study workflow")
    annotate_sub = annotate.add_subparsers(dest="annotate_command", required=True)
    plan = annotate_sub.add_parser("plan", help="sample flagged tweets and assign them")
    plan.add_argument("--config", required=True)
    plan.add_argument("--annotators", required=True, help="comma-separated annotator ids")
    plan.add_argument("--unique", type=int, required=True)
    plan.add_argument("--overlap", type=int, required=True)
    plan.add_argument("--threshold", type=float, default=None)
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--out", required=True, help="study file to write")
    assign_p = annotate_sub.add_parser("assign", help="show per-annotator task lists")
    assign_p.add_argument("--study", required=True)
    assign_p.add_argument("--json", action="store_true")
    kappa = annotate_sub.add_parser("kappa", help="Fleiss' kappa over a label CSV")
    kappa.add_argument("--labels", required=True)
    fp = annotate_sub.add_parser("fp", help="false-positive split over a label CSV")
    fp.add_argument("--labels", required=True)
    fp.add_argument("--json", action="store_true")
    annotate.set_defaults(func=cmd_annotate)

    serve = sub.add_parser("serve", help="serve the HTTP API")
    serve.add_argument("--config", required=True)
    serve.add_argument("--host")
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParityError as exc:
        print(f"error {exc.code}: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

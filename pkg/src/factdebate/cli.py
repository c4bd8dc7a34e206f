"""Command-line interface.

Five subcommands cover the pipeline end to end and each stage alone:

* ``verify``    run all three stages on one response sample
* ``evaluate``  run a labeled benchmark and report both metric levels
* ``detect``    extract claims from one response sample
* ``retrieve``  produce ranked evidence for one claim
* ``debate``    run the multi-agent debate on one claim

Exit codes: 0 means success (for ``verify``/``debate``: the content is
factual), 1 means a hallucination was detected, 2 means an operational
error. Machine-readable output goes to stdout or files; logs and
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .claims import NoVerifiableContent, extract_claims, parse_response_sample
from .config import ConfigError, RunConfig, resolve_run_config
from .engine import run_debate
from .evaluation import (
    BenchmarkResult,
    DatasetFormat,
    MetricsReport,
    load_dataset,
    run_benchmark,
    sample_balanced,
)
from .model import Claim, EvidenceSnippet, EvidenceSource, FactDebateError, TaskKind
from .pipeline import verify_response
from .retrieval import gather_evidence
from .transcripts import serialize_claim_verdict, serialize_response_verdict

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_HALLUCINATION = 1
EXIT_ERROR = 2

_CONFIG_FLAGS = (
    ("--backend", "backend", str, "Completion backend kind: http, scripted, or replay"),
    ("--script", "script_file", str, "Script file (JSON array of strings) for the scripted backend"),
    ("--replay-fixtures", "fixtures_dir", str, "Fixture directory for the replay backend"),
    ("--endpoint", "endpoint", str, "Provider endpoint URL for the http backend"),
    ("--api-key", "api_key", str, "Provider API key"),
    ("--model", "model_id", str, "Provider model identifier"),
    ("--cache-dir", "cache_dir", str, "Completion cache directory"),
    ("--budget", "budget", int, "Per-run provider call ceiling"),
    ("--max-retries", "max_retries", int, "Parse-repair retries per agent opinion"),
    ("--policy", "policy", str,
     "Transition policy: true-to-skeptic, true-to-trust, always-skeptic, always-trust"),
    ("--min-rounds", "min_rounds", int, "Minimum debate rounds before consensus may stop"),
    ("--max-rounds", "max_rounds", int, "Hard cap on debate rounds"),
    ("--evidence-k", "evidence_k", int, "Evidence snippet budget per claim"),
    ("--search-fixtures", "search_fixtures", str, "Fixture directory for the search provider"),
    ("--search-endpoint", "search_endpoint", str, "Web search endpoint URL"),
    ("--search-api-key", "search_api_key", str, "Web search API key"),
    ("--parallel", "parallelism", int, "Concurrent claim debates (default 1, reproducible)"),
    ("--seed", "seed", int, "Sampling seed"),
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (flags and env override it)")
    for flag, dest, flag_type, help_text in _CONFIG_FLAGS:
        parser.add_argument(flag, dest=dest, type=flag_type, default=None, help=help_text)


def _resolve(args: argparse.Namespace) -> RunConfig:
    overrides = {dest: getattr(args, dest) for _, dest, _, _ in _CONFIG_FLAGS}
    return resolve_run_config(config_file=args.config, overrides=overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factdebate",
        description="Hallucination detection via evidence-grounded multi-agent debate.",
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Verify one response sample end to end")
    verify.add_argument("input", help="Response sample JSON file")
    verify.add_argument("--out", help="Write the verdict document here instead of stdout")
    _add_config_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    evaluate = sub.add_parser("evaluate", help="Run a labeled benchmark")
    evaluate.add_argument("dataset", help="Line-delimited JSON dataset file")
    evaluate.add_argument(
        "--format",
        required=True,
        choices=[f.value for f in DatasetFormat],
        help="Dataset format",
    )
    evaluate.add_argument("--n", type=int, default=None, help="Balanced subsample size")
    evaluate.add_argument(
        "--p", type=float, default=0.5, help="Positive-draw probability for sampling"
    )
    evaluate.add_argument("--out-dir", help="Directory for the report and transcript archive")
    _add_config_flags(evaluate)
    evaluate.set_defaults(handler=cmd_evaluate)

    detect = sub.add_parser("detect", help="Extract claims from one response sample")
    detect.add_argument("input", help="Response sample JSON file")
    _add_config_flags(detect)
    detect.set_defaults(handler=cmd_detect)

    retrieve = sub.add_parser("retrieve", help="Produce ranked evidence for one claim")
    retrieve.add_argument("--claim", required=True, help="Claim text")
    retrieve.add_argument("--knowledge-file", help="Use this file's text as provided knowledge")
    _add_config_flags(retrieve)
    retrieve.set_defaults(handler=cmd_retrieve)

    debate = sub.add_parser("debate", help="Debate one claim")
    debate.add_argument("--claim", required=True, help="Claim text")
    debate.add_argument("--evidence", help="Evidence JSON file (array of strings or objects)")
    debate.add_argument("--out", help="Write the transcript document here instead of stdout")
    _add_config_flags(debate)
    debate.set_defaults(handler=cmd_debate)

    return parser


def _load_sample(path: str):
    with open(path, encoding="utf-8") as handle:
        return parse_response_sample(json.load(handle))


def load_evidence_file(path: str | Path) -> list[EvidenceSnippet]:
    """Read an evidence file: a JSON array of strings or snippet objects."""
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(entries, list):
        raise ValueError(f"evidence file {path} must hold a JSON array")
    snippets = []
    for i, entry in enumerate(entries):
        if isinstance(entry, str):
            snippets.append(
                EvidenceSnippet(
                    text=entry, source=EvidenceSource.PROVIDED_KNOWLEDGE, rank=i + 1
                )
            )
        else:
            snippets.append(
                EvidenceSnippet(
                    text=entry["text"],
                    source=EvidenceSource(entry.get("source", "provided-knowledge")),
                    rank=int(entry.get("rank", i + 1)),
                    origin_ref=entry.get("origin_ref"),
                )
            )
    return snippets


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_verify(args: argparse.Namespace) -> int:
    run = _resolve(args)
    sample = _load_sample(args.input)
    gateway = run.build_gateway()
    outcome = verify_response(
        sample,
        run.debate_config(),
        gateway,
        provider=run.build_search_provider(),
        parallelism=run.parallelism,
    )
    if outcome.verdict is None:
        print(f"cannot verify {sample.response_id}: {outcome.skipped_reason}", file=sys.stderr)
        return EXIT_ERROR
    _emit(serialize_response_verdict(outcome.verdict), args.out)
    if outcome.unverifiable_claim_ids:
        print(
            f"warning: {len(outcome.unverifiable_claim_ids)} unverifiable claim(s) excluded",
            file=sys.stderr,
        )
    return EXIT_OK if outcome.verdict.factual else EXIT_HALLUCINATION


def _percent(value: float) -> str:
    return f"{value * 100:.2f}%"


def render_metrics_table(result: BenchmarkResult) -> str:
    """Plain-text table of both metric levels, percentages for display."""
    header = (
        f"{'Level':<10} {'Acc.':>8} {'R':>8} {'P':>8} {'F1':>8} "
        f"{'TP':>4} {'FP':>4} {'TN':>4} {'FN':>4} {'Skipped':>8}"
    )
    lines = [header, "-" * len(header)]

    def row(report: MetricsReport) -> str:
        return (
            f"{report.level.value:<10} {_percent(report.accuracy):>8} "
            f"{_percent(report.recall):>8} {_percent(report.precision):>8} "
            f"{_percent(report.f1):>8} {report.tp:>4} {report.fp:>4} "
            f"{report.tn:>4} {report.fn:>4} {report.skipped_unverifiable:>8}"
        )

    if result.claim_metrics is not None:
        lines.append(row(result.claim_metrics))
    else:
        lines.append(f"{'claim':<10} (skipped: {result.claim_level_skipped_reason})")
    lines.append(row(result.response_metrics))
    return "\n".join(lines) + "\n"


def build_benchmark_report(
    result: BenchmarkResult,
    run: RunConfig,
    dataset_path: str,
    dataset_format: str,
    loaded: int,
    sampling: dict[str, Any] | None,
) -> str:
    """The benchmark report document: config echo, seed, both metric levels."""
    claim_level: dict[str, Any]
    if result.claim_metrics is not None:
        claim_level = result.claim_metrics.as_dict()
    else:
        claim_level = {"skipped": result.claim_level_skipped_reason}
    payload = {
        "schema": "benchmark-report/1",
        "dataset": {
            "path": dataset_path,
            "format": dataset_format,
            "loaded": loaded,
        },
        "sampling": sampling,
        "seed": run.seed,
        "config": {
            "policy": run.policy,
            "min_rounds": run.min_rounds,
            "max_rounds": run.max_rounds,
            "evidence_k": run.evidence_k,
            "backend": run.backend,
            "model_id": run.model_id,
            "parallelism": run.parallelism,
        },
        "positive_class": "hallucinated",
        "claim_level": claim_level,
        "response_level": result.response_metrics.as_dict(),
        "skipped": {
            "unverifiable_claims": result.skipped_unverifiable_claims,
            "responses_excluded": result.skipped_responses,
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def cmd_evaluate(args: argparse.Namespace) -> int:
    run = _resolve(args)
    dataset_format = DatasetFormat(args.format)
    dataset = load_dataset(args.dataset, dataset_format)
    sampling = None
    samples = dataset
    if args.n is not None:
        samples = sample_balanced(dataset, args.n, args.p, run.seed)
        sampling = {"n": args.n, "p": args.p}
    gateway = run.build_gateway()
    result = run_benchmark(
        samples,
        run.debate_config(),
        gateway,
        provider=run.build_search_provider(),
        parallelism=run.parallelism,
    )
    sys.stdout.write(render_metrics_table(result))
    report = build_benchmark_report(
        result, run, args.dataset, dataset_format.value, len(dataset), sampling
    )
    if args.out_dir:
        out_dir = Path(args.out_dir)
        transcripts_dir = out_dir / "transcripts"
        transcripts_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(report, encoding="utf-8")
        for response_id, document in result.verdict_documents.items():
            (transcripts_dir / f"{response_id}.json").write_text(document, encoding="utf-8")
        log.info("wrote report and %d transcripts to %s", len(result.verdict_documents), out_dir)
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    run = _resolve(args)
    sample = _load_sample(args.input)
    gateway = run.build_gateway()
    try:
        claims = extract_claims(sample, gateway)
    except NoVerifiableContent:
        print(f"no verifiable content in response {sample.response_id}", file=sys.stderr)
        return EXIT_OK
    for claim in claims:
        record = {
            "id": claim.id,
            "text": claim.text,
            "source_response_id": claim.source_response_id,
            "task_kind": claim.task_kind.value,
            "context": claim.context,
        }
        sys.stdout.write(json.dumps(record, ensure_ascii=False) + "\n")
    return EXIT_OK


def _cli_claim(text: str) -> Claim:
    return Claim(id="cli/c1", text=text, source_response_id="cli", task_kind=TaskKind.QA)


def cmd_retrieve(args: argparse.Namespace) -> int:
    run = _resolve(args)
    claim = _cli_claim(args.claim)
    knowledge = None
    if args.knowledge_file:
        knowledge = Path(args.knowledge_file).read_text(encoding="utf-8")
    gateway = run.build_gateway()
    snippets = gather_evidence(
        claim,
        knowledge,
        run.build_search_provider(),
        gateway,
        k=run.evidence_k,
    )
    for snippet in snippets:
        record = {
            "rank": snippet.rank,
            "text": snippet.text,
            "source": snippet.source.value,
            "origin_ref": snippet.origin_ref,
        }
        sys.stdout.write(json.dumps(record, ensure_ascii=False) + "\n")
    return EXIT_OK


def cmd_debate(args: argparse.Namespace) -> int:
    run = _resolve(args)
    claim = _cli_claim(args.claim)
    evidence = load_evidence_file(args.evidence) if args.evidence else []
    gateway = run.build_gateway()
    verdict = run_debate(
        claim, evidence, run.debate_config(), gateway, max_retries=run.max_retries
    )
    _emit(serialize_claim_verdict(verdict), args.out)
    return EXIT_OK if verdict.factual else EXIT_HALLUCINATION


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (FactDebateError, ConfigError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark harness: dataset loading, balanced sampling, and metrics.

The positive class throughout is "hallucinated" (non-factual): a true
positive is a hallucinated claim or response the pipeline flagged. That
orientation determines recall semantics, so it is fixed here once and echoed
in every report.

Dataset field mappings are frozen per format (see the loader functions and
the README schema section); unknown extra fields are ignored.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Sequence

from .claims import MalformedClaims, ResponseSample
from .gateway import Gateway, TransportError
from .model import Claim, DebateConfig, FactDebateError, TaskKind, aggregate_response_verdict
from .pipeline import VerificationOutcome, debate_claims, verify_response
from .retrieval import MalformedQueries, ProviderError, SearchProvider, gather_evidence
from .transcripts import serialize_response_verdict

log = logging.getLogger(__name__)

# Failures contained per response during a benchmark: the sample is excluded
# with a logged count instead of aborting the run. Budget exhaustion and
# script exhaustion stay fatal since every later sample would fail the same
# way.
CONTAINED_ERRORS = (MalformedClaims, MalformedQueries, ProviderError, TransportError)


class FormatError(FactDebateError):
    """A dataset record does not match its declared format."""

    def __init__(self, message: str, record_index: int):
        super().__init__(f"record {record_index}: {message}")
        self.record_index = record_index


class PoolExhausted(FactDebateError):
    """A label pool ran dry while sampling."""


class LengthMismatch(FactDebateError):
    """Predictions and golds differ in length."""


class EmptyInput(FactDebateError):
    """Metrics were requested for zero pairs."""


class DatasetFormat(str, Enum):
    FACTOOL_QA = "factool-qa"
    HALUEVAL_QA = "halueval-qa"
    HALUEVAL_SUMM = "halueval-summarization"
    HALUEVAL_DIALOGUE = "halueval-dialogue"


class MetricsLevel(str, Enum):
    CLAIM = "claim"
    RESPONSE = "response"


@dataclass(frozen=True)
class GoldClaim:
    text: str
    factual: bool


@dataclass(frozen=True)
class LabeledSample:
    """A response sample plus its response-level gold label.

    ``gold_claims`` is present only for formats that annotate individual
    claims; when set, the annotated claims are verified directly instead of
    re-extracting them.
    """

    sample: ResponseSample
    gold_factual: bool
    gold_claims: tuple[GoldClaim, ...] | None = None

    @property
    def positive(self) -> bool:
        """Positive class membership: the response is hallucinated."""
        return not self.gold_factual


def _require(record: dict, key: str, index: int) -> Any:
    if key not in record or record[key] is None:
        raise FormatError(f"missing required field {key!r}", index)
    return record[key]


def _gold_from_flag(record: dict, index: int) -> bool:
    flag = _require(record, "hallucination", index)
    if flag not in ("yes", "no"):
        raise FormatError(f"hallucination flag must be 'yes' or 'no', got {flag!r}", index)
    return flag == "no"


def _load_factool_qa(record: dict, index: int, response_id: str) -> LabeledSample:
    label = _require(record, "response_label", index)
    if not isinstance(label, bool):
        raise FormatError("response_label must be a boolean", index)
    gold_claims = None
    if record.get("claims"):
        parsed = []
        for j, claim in enumerate(record["claims"]):
            if "claim" not in claim or "label" not in claim:
                raise FormatError(f"claim {j} needs 'claim' and 'label' fields", index)
            parsed.append(GoldClaim(text=claim["claim"], factual=bool(claim["label"])))
        gold_claims = tuple(parsed)
    return LabeledSample(
        sample=ResponseSample(
            response_id=response_id,
            task_kind=TaskKind.QA,
            response_text=_require(record, "response", index),
            question=_require(record, "prompt", index),
        ),
        gold_factual=label,
        gold_claims=gold_claims,
    )


def _load_halueval_qa(record: dict, index: int, response_id: str) -> LabeledSample:
    return LabeledSample(
        sample=ResponseSample(
            response_id=response_id,
            task_kind=TaskKind.QA,
            response_text=_require(record, "answer", index),
            question=_require(record, "question", index),
            provided_knowledge=_require(record, "knowledge", index),
        ),
        gold_factual=_gold_from_flag(record, index),
    )


def _load_halueval_summ(record: dict, index: int, response_id: str) -> LabeledSample:
    return LabeledSample(
        sample=ResponseSample(
            response_id=response_id,
            task_kind=TaskKind.SUMMARIZATION,
            response_text=_require(record, "summary", index),
            provided_knowledge=_require(record, "document", index),
        ),
        gold_factual=_gold_from_flag(record, index),
    )


def _load_halueval_dialogue(record: dict, index: int, response_id: str) -> LabeledSample:
    history = _require(record, "dialogue_history", index)
    knowledge = _require(record, "knowledge", index)
    # Both the supplied knowledge and the dialogue history ground the claims.
    return LabeledSample(
        sample=ResponseSample(
            response_id=response_id,
            task_kind=TaskKind.DIALOGUE,
            response_text=_require(record, "response", index),
            dialogue_history=history,
            provided_knowledge=f"{knowledge}\n{history}",
        ),
        gold_factual=_gold_from_flag(record, index),
    )


_LOADERS: dict[DatasetFormat, Callable[[dict, int, str], LabeledSample]] = {
    DatasetFormat.FACTOOL_QA: _load_factool_qa,
    DatasetFormat.HALUEVAL_QA: _load_halueval_qa,
    DatasetFormat.HALUEVAL_SUMM: _load_halueval_summ,
    DatasetFormat.HALUEVAL_DIALOGUE: _load_halueval_dialogue,
}


def load_dataset(path: str | Path, format: DatasetFormat) -> list[LabeledSample]:
    """Load a line-delimited JSON dataset into labeled samples.

    Raises ``FormatError`` carrying the index of the first malformed record.
    """
    loader = _LOADERS[format]
    samples: list[LabeledSample] = []
    with open(path, encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc}", index) from exc
            if not isinstance(record, dict):
                raise FormatError("record must be a JSON object", index)
            response_id = f"{format.value}-{index:04d}"
            try:
                samples.append(loader(record, index, response_id))
            except ValueError as exc:
                raise FormatError(str(exc), index) from exc
    return samples


def sample_balanced(
    dataset: Sequence[LabeledSample], n: int, p: float, seed: int
) -> list[LabeledSample]:
    """Draw ``n`` samples, choosing the positive pool with probability ``p``.

    Each slot first draws a label from Bernoulli(p), then an element without
    replacement from that label's pool. Deterministic for a fixed seed.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    pools = {
        True: [s for s in dataset if s.positive],
        False: [s for s in dataset if not s.positive],
    }
    drawn: list[LabeledSample] = []
    for _ in range(n):
        want_positive = rng.random() < p
        pool = pools[want_positive]
        if not pool:
            label = "positive" if want_positive else "negative"
            raise PoolExhausted(f"the {label} pool ran dry after {len(drawn)} draws")
        drawn.append(pool.pop(rng.randrange(len(pool))))
    return drawn


@dataclass(frozen=True)
class MetricsReport:
    """Confusion counts and derived ratios, positive class = hallucinated."""

    level: MetricsLevel
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    skipped_unverifiable: int = 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "level": self.level.value,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "skipped_unverifiable": self.skipped_unverifiable,
        }


def compute_metrics(
    predictions: Sequence[bool],
    golds: Sequence[bool],
    level: MetricsLevel = MetricsLevel.CLAIM,
    skipped_unverifiable: int = 0,
) -> MetricsReport:
    """Confusion metrics over parallel "is hallucinated" flags.

    Degenerate denominators yield 0 rather than an error, so an all-negative
    predictor scores zero precision/recall/F1 instead of failing.
    """
    if len(predictions) != len(golds):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(golds)} golds")
    if not predictions:
        raise EmptyInput("cannot compute metrics over zero pairs")
    tp = fp = tn = fn = 0
    for predicted, gold in zip(predictions, golds):
        if predicted and gold:
            tp += 1
        elif predicted and not gold:
            fp += 1
        elif not predicted and gold:
            fn += 1
        else:
            tn += 1
    total = tp + fp + tn + fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(
        level=level,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        accuracy=(tp + tn) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        skipped_unverifiable=skipped_unverifiable,
    )


@dataclass
class BenchmarkResult:
    """Everything one benchmark run produces.

    ``claim_metrics`` is None when the dataset format carries no claim-level
    gold labels. ``verdict_documents`` maps response id to its serialized
    transcript document, in evaluation order.
    """

    response_metrics: MetricsReport
    claim_metrics: MetricsReport | None
    verdict_documents: dict[str, str] = field(default_factory=dict)
    skipped_responses: int = 0
    skipped_unverifiable_claims: int = 0
    claim_level_skipped_reason: str | None = None


def _claims_from_gold(labeled: LabeledSample) -> list[Claim]:
    assert labeled.gold_claims
    rid = labeled.sample.response_id
    return [
        Claim(
            id=f"{rid}/c{i + 1}",
            text=gc.text,
            source_response_id=rid,
            task_kind=labeled.sample.task_kind,
            context=labeled.sample.question,
        )
        for i, gc in enumerate(labeled.gold_claims)
    ]


def run_benchmark(
    samples: Sequence[LabeledSample],
    config: DebateConfig,
    gateway: Gateway,
    provider: SearchProvider | None = None,
    parallelism: int = 1,
) -> BenchmarkResult:
    """Run the full pipeline over labeled samples and score both levels.

    Per-sample failures are contained: a response whose claims all fail to
    verify (or that has no verifiable content) is excluded from response-level
    metrics with a logged count, and unverifiable claims are excluded from
    claim-level metrics likewise.
    """
    response_predictions: list[bool] = []
    response_golds: list[bool] = []
    claim_predictions: list[bool] = []
    claim_golds: list[bool] = []
    documents: dict[str, str] = {}
    skipped_responses = 0
    skipped_claims = 0
    any_gold_claims = any(s.gold_claims for s in samples)

    for labeled in samples:
        rid = labeled.sample.response_id
        claim_pairs: list[tuple[bool, bool]] = []
        try:
            if labeled.gold_claims:
                claims = _claims_from_gold(labeled)
                evidence_sets = [
                    gather_evidence(
                        claim,
                        labeled.sample.provided_knowledge,
                        provider,
                        gateway,
                        k=config.evidence_k,
                    )
                    for claim in claims
                ]
                verdicts, unverifiable = debate_claims(
                    claims, evidence_sets, config, gateway, parallelism
                )
                skipped_claims += len(unverifiable)
                unverifiable_set = set(unverifiable)
                by_id = {v.claim_id: v for v in verdicts}
                for claim, gold in zip(claims, labeled.gold_claims):
                    if claim.id in unverifiable_set:
                        continue
                    claim_pairs.append((not by_id[claim.id].factual, not gold.factual))
                if not verdicts:
                    claim_predictions.extend(p for p, _ in claim_pairs)
                    claim_golds.extend(g for _, g in claim_pairs)
                    skipped_responses += 1
                    log.warning("response %s excluded: all claims unverifiable", rid)
                    continue
                outcome = VerificationOutcome(
                    response_id=rid, verdict=aggregate_response_verdict(verdicts)
                )
            else:
                outcome = verify_response(
                    labeled.sample, config, gateway, provider, parallelism
                )
                skipped_claims += len(outcome.unverifiable_claim_ids)
                if outcome.verdict is None:
                    skipped_responses += 1
                    log.warning("response %s excluded: %s", rid, outcome.skipped_reason)
                    continue
        except CONTAINED_ERRORS as exc:
            skipped_responses += 1
            log.warning("response %s excluded after error: %s", rid, exc)
            continue

        claim_predictions.extend(p for p, _ in claim_pairs)
        claim_golds.extend(g for _, g in claim_pairs)
        verdict = outcome.verdict
        assert verdict is not None
        predicted_hallucinated = not verdict.factual
        # The aggregation law, restated: flagged iff any claim is flagged.
        assert predicted_hallucinated == any(not v.factual for v in verdict.claim_verdicts)
        response_predictions.append(predicted_hallucinated)
        response_golds.append(labeled.positive)
        documents[rid] = serialize_response_verdict(verdict)

    if not response_predictions:
        raise EmptyInput("no response could be evaluated")
    response_metrics = compute_metrics(
        response_predictions,
        response_golds,
        MetricsLevel.RESPONSE,
        skipped_unverifiable=skipped_responses,
    )
    claim_metrics = None
    claim_skip_reason = None
    if any_gold_claims and claim_predictions:
        claim_metrics = compute_metrics(
            claim_predictions,
            claim_golds,
            MetricsLevel.CLAIM,
            skipped_unverifiable=skipped_claims,
        )
    elif any_gold_claims:
        claim_skip_reason = "every annotated claim was unverifiable"
    else:
        claim_skip_reason = "no claim-level gold labels in this dataset format"

    return BenchmarkResult(
        response_metrics=response_metrics,
        claim_metrics=claim_metrics,
        verdict_documents=documents,
        skipped_responses=skipped_responses,
        skipped_unverifiable_claims=skipped_claims,
        claim_level_skipped_reason=claim_skip_reason,
    )

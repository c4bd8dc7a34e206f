"""Canonical transcript documents.

One structured-text (JSON) document per response verdict, with a sibling
single-claim form for the ``debate`` command. Documents are canonical: keys
sorted, two-space indent, UTF-8, trailing newline. ``serialize`` after
``parse`` reproduces a document byte for byte, and ``parse`` after
``serialize`` reproduces the value, so transcripts are a faithful,
replayable audit trail.

Field names are stable: ``claim_id``, ``state``, ``role``, ``opinion``,
``factuality``, ``severity``, ``stop_reason``.
"""

from __future__ import annotations

import json
from typing import Any

from .model import (
    AgentOpinion,
    AgentRole,
    ClaimVerdict,
    DebateStateId,
    DebateTranscript,
    FactDebateError,
    ResponseVerdict,
    StateOutcome,
    StopReason,
)
from .personas import TEMPLATE_VERSION

RESPONSE_SCHEMA = "debate-verdict/1"
CLAIM_SCHEMA = "debate-claim/1"


class DocumentError(FactDebateError):
    """A transcript document is malformed or internally inconsistent."""


def _opinion_record(op: AgentOpinion) -> dict[str, Any]:
    return {
        "role": op.role.value,
        "opinion": op.opinion,
        "factuality": op.factuality,
        "severity": op.severity,
    }


def _outcome_record(outcome: StateOutcome) -> dict[str, Any]:
    return {
        "state": outcome.state.value,
        "opinions": [_opinion_record(op) for op in outcome.opinions],
        "judgment": outcome.judgment,
        "consensus": outcome.consensus,
    }


def _transcript_record(transcript: DebateTranscript) -> dict[str, Any]:
    return {
        "claim_id": transcript.claim_id,
        "initial": _outcome_record(transcript.initial),
        "rounds": [_outcome_record(r) for r in transcript.rounds],
        "stop_reason": transcript.stop_reason.value,
    }


def _claim_record(verdict: ClaimVerdict) -> dict[str, Any]:
    return {
        "claim_id": verdict.claim_id,
        "factual": verdict.factual,
        "severity": verdict.severity,
        "transcript": _transcript_record(verdict.transcript),
    }


def _dump(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def serialize_response_verdict(
    verdict: ResponseVerdict, template_version: str = TEMPLATE_VERSION
) -> str:
    return _dump(
        {
            "schema": RESPONSE_SCHEMA,
            "template_version": template_version,
            "response_id": verdict.response_id,
            "factual": verdict.factual,
            "claims": [_claim_record(v) for v in verdict.claim_verdicts],
        }
    )


def serialize_claim_verdict(
    verdict: ClaimVerdict, template_version: str = TEMPLATE_VERSION
) -> str:
    return _dump(
        {
            "schema": CLAIM_SCHEMA,
            "template_version": template_version,
            "response_id": verdict.response_id,
            "claim": _claim_record(verdict),
        }
    )


def _read_opinion(record: dict[str, Any]) -> AgentOpinion:
    return AgentOpinion(
        role=AgentRole(record["role"]),
        opinion=record["opinion"],
        factuality=record["factuality"],
        severity=record["severity"],
    )


def _read_outcome(record: dict[str, Any]) -> StateOutcome:
    return StateOutcome(
        state=DebateStateId(record["state"]),
        opinions=tuple(_read_opinion(op) for op in record["opinions"]),
        judgment=record["judgment"],
        consensus=record["consensus"],
    )


def _read_transcript(record: dict[str, Any]) -> DebateTranscript:
    return DebateTranscript(
        claim_id=record["claim_id"],
        initial=_read_outcome(record["initial"]),
        rounds=tuple(_read_outcome(r) for r in record["rounds"]),
        stop_reason=StopReason(record["stop_reason"]),
    )


def _read_claim_verdict(record: dict[str, Any], response_id: str) -> ClaimVerdict:
    return ClaimVerdict(
        claim_id=record["claim_id"],
        response_id=response_id,
        factual=record["factual"],
        severity=record["severity"],
        transcript=_read_transcript(record["transcript"]),
    )


def _load(document: str, expected_schema: str) -> dict[str, Any]:
    try:
        payload = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not a JSON document: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("schema") != expected_schema:
        raise DocumentError(f"expected a {expected_schema} document")
    return payload


def parse_response_verdict(document: str) -> tuple[ResponseVerdict, str]:
    """Parse a response verdict document; returns (verdict, template_version).

    Reconstructed values re-validate every structural invariant, so a
    tampered document fails here rather than flowing onward.
    """
    payload = _load(document, RESPONSE_SCHEMA)
    try:
        response_id = payload["response_id"]
        verdict = ResponseVerdict(
            response_id=response_id,
            factual=payload["factual"],
            claim_verdicts=tuple(
                _read_claim_verdict(record, response_id) for record in payload["claims"]
            ),
        )
        return verdict, payload["template_version"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed verdict document: {exc}") from exc


def parse_claim_verdict(document: str) -> tuple[ClaimVerdict, str]:
    payload = _load(document, CLAIM_SCHEMA)
    try:
        verdict = _read_claim_verdict(payload["claim"], payload["response_id"])
        return verdict, payload["template_version"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed claim document: {exc}") from exc

"""End-to-end verification of one response: detect, retrieve, debate, aggregate."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .claims import NoVerifiableContent, ResponseSample, extract_claims
from .engine import run_debate
from .gateway import Gateway
from .model import (
    Claim,
    ClaimVerdict,
    DebateConfig,
    EvidenceSnippet,
    ResponseVerdict,
    aggregate_response_verdict,
)
from .personas import OpinionUnparseable
from .retrieval import SearchProvider, gather_evidence

log = logging.getLogger(__name__)


@dataclass
class VerificationOutcome:
    """What verifying one response produced.

    ``verdict`` is None when nothing could be judged, either because the
    response had no verifiable content or because every claim was
    unverifiable; ``skipped_reason`` says which.
    """

    response_id: str
    verdict: ResponseVerdict | None
    unverifiable_claim_ids: list[str] = field(default_factory=list)
    skipped_reason: str | None = None


def debate_claims(
    claims: Sequence[Claim],
    evidence_sets: Sequence[Sequence[EvidenceSnippet]],
    config: DebateConfig,
    gateway: Gateway,
    parallelism: int = 1,
) -> tuple[list[ClaimVerdict], list[str]]:
    """Debate each claim; unparseable debates become unverifiable claims.

    Results keep claim order regardless of parallelism. A chain itself is
    always sequential; only distinct claims run concurrently.
    """
    if len(claims) != len(evidence_sets):
        raise ValueError("one evidence set per claim is required")

    def one(claim: Claim, evidence: Sequence[EvidenceSnippet]) -> ClaimVerdict | None:
        try:
            return run_debate(claim, evidence, config, gateway)
        except OpinionUnparseable as exc:
            log.warning("claim %s is unverifiable: %s", claim.id, exc)
            return None

    if parallelism > 1 and len(claims) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(one, claims, evidence_sets))
    else:
        results = [one(c, e) for c, e in zip(claims, evidence_sets)]

    verdicts = [v for v in results if v is not None]
    unverifiable = [c.id for c, v in zip(claims, results) if v is None]
    return verdicts, unverifiable


def verify_claims(
    claims: Sequence[Claim],
    response_id: str,
    provided_knowledge: str | None,
    config: DebateConfig,
    gateway: Gateway,
    provider: SearchProvider | None = None,
    parallelism: int = 1,
) -> VerificationOutcome:
    """Retrieve evidence for and debate an already-extracted claim set."""
    evidence_sets = [
        gather_evidence(claim, provided_knowledge, provider, gateway, k=config.evidence_k)
        for claim in claims
    ]
    verdicts, unverifiable = debate_claims(claims, evidence_sets, config, gateway, parallelism)
    if not verdicts:
        return VerificationOutcome(
            response_id=response_id,
            verdict=None,
            unverifiable_claim_ids=unverifiable,
            skipped_reason="all claims unverifiable",
        )
    return VerificationOutcome(
        response_id=response_id,
        verdict=aggregate_response_verdict(verdicts),
        unverifiable_claim_ids=unverifiable,
    )


def verify_response(
    sample: ResponseSample,
    config: DebateConfig,
    gateway: Gateway,
    provider: SearchProvider | None = None,
    parallelism: int = 1,
) -> VerificationOutcome:
    """Run all three stages for one response sample."""
    try:
        claims = extract_claims(sample, gateway)
    except NoVerifiableContent as exc:
        log.info("response %s: %s", sample.response_id, exc)
        return VerificationOutcome(
            response_id=sample.response_id,
            verdict=None,
            skipped_reason="no verifiable content",
        )
    return verify_claims(
        claims,
        sample.response_id,
        sample.provided_knowledge,
        config,
        gateway,
        provider,
        parallelism,
    )

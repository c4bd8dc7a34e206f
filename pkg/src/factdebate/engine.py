"""The debate chain: initial answer, policy-driven transitions, termination.

One chain is strictly sequential; every agent consumes its predecessor's
output. The chain starts from a single-agent initial state, then oscillates
between the two three-agent discussion modes (trust-led S1, skeptic-led S2)
as directed by the transition policy, stopping on within-state consensus
once the minimum round count is reached, or at the hard round cap. The
opinion carried into a new state is the previous state's final opinion only.

Worst case the chain performs ``1 + 3 * max_rounds`` completions per claim,
plus parse-repair retries.
"""

from __future__ import annotations

import logging
from typing import Sequence

from .gateway import Gateway
from .model import (
    STATE_ROLE_ORDER,
    AgentOpinion,
    AgentRole,
    Claim,
    ClaimVerdict,
    DebateConfig,
    DebateStateId,
    DebateTranscript,
    EvidenceSnippet,
    StateOutcome,
    StopReason,
    next_state,
)
from .personas import PromptContext, elicit_opinion

__all__ = [
    "next_state",
    "run_initial_state",
    "run_debate_state",
    "has_consensus",
    "run_debate",
]

log = logging.getLogger(__name__)

DEFAULT_OPINION_RETRIES = 2


def run_initial_state(
    claim: Claim,
    evidence: Sequence[EvidenceSnippet],
    gateway: Gateway,
    max_retries: int = DEFAULT_OPINION_RETRIES,
) -> StateOutcome:
    """Execute S0: the initial agent furnishes the primary answer."""
    if not evidence:
        log.info("claim %s enters debate without evidence", claim.id)
    ctx = PromptContext(claim_text=claim.text, evidence=tuple(evidence))
    opinion = elicit_opinion(AgentRole.INITIAL, ctx, gateway, max_retries)
    return StateOutcome.from_opinions(DebateStateId.S0, (opinion,))


def run_debate_state(
    state_id: DebateStateId,
    claim: Claim,
    evidence: Sequence[EvidenceSnippet],
    carried_opinions: Sequence[AgentOpinion],
    gateway: Gateway,
    max_retries: int = DEFAULT_OPINION_RETRIES,
) -> StateOutcome:
    """Execute one ordinary state in its role order.

    The first agent sees the carried opinion(s) from the previous state, the
    second agent sees the first agent's opinion, and the leader sees both of
    this state's agent opinions.
    """
    if state_id not in STATE_ROLE_ORDER:
        raise ValueError(f"{state_id.value} is not an ordinary debate state")
    if not carried_opinions:
        raise ValueError("a debate state needs at least one carried opinion")

    roles = STATE_ROLE_ORDER[state_id]
    evidence = tuple(evidence)
    opinions: list[AgentOpinion] = []

    first_ctx = PromptContext(claim.text, evidence, tuple(carried_opinions))
    opinions.append(elicit_opinion(roles[0], first_ctx, gateway, max_retries))

    second_ctx = PromptContext(claim.text, evidence, (opinions[0],))
    opinions.append(elicit_opinion(roles[1], second_ctx, gateway, max_retries))

    leader_ctx = PromptContext(claim.text, evidence, (opinions[0], opinions[1]))
    opinions.append(elicit_opinion(AgentRole.LEADER, leader_ctx, gateway, max_retries))

    return StateOutcome.from_opinions(state_id, opinions)


def has_consensus(outcome: StateOutcome) -> bool:
    """Whether the three agents of an ordinary state agree on factuality."""
    if outcome.state == DebateStateId.S0:
        raise ValueError("consensus is undefined for the initial state")
    return outcome.consensus


def run_debate(
    claim: Claim,
    evidence: Sequence[EvidenceSnippet],
    config: DebateConfig,
    gateway: Gateway,
    max_retries: int = DEFAULT_OPINION_RETRIES,
) -> ClaimVerdict:
    """Run the full chain for one claim and return its verdict.

    Stops with ``consensus`` once a state is unanimous and at least
    ``min_rounds`` rounds have run, or with ``max-rounds`` at the cap, in
    which case the verdict is the last leader's factuality. The attached
    transcript validates cleanly against ``config``.
    """
    initial = run_initial_state(claim, evidence, gateway, max_retries)
    rounds: list[StateOutcome] = []
    judgment = initial.judgment
    carried = initial.opinions[-1]
    stop_reason = StopReason.MAX_ROUNDS

    while True:
        state_id = next_state(config.policy, judgment)
        outcome = run_debate_state(state_id, claim, evidence, (carried,), gateway, max_retries)
        rounds.append(outcome)
        judgment = outcome.judgment
        carried = outcome.opinions[-1]
        if outcome.consensus and len(rounds) >= config.min_rounds:
            stop_reason = StopReason.CONSENSUS
            break
        if len(rounds) >= config.max_rounds:
            stop_reason = StopReason.MAX_ROUNDS
            break

    transcript = DebateTranscript(
        claim_id=claim.id,
        initial=initial,
        rounds=tuple(rounds),
        stop_reason=stop_reason,
    )
    return ClaimVerdict(
        claim_id=claim.id,
        response_id=claim.source_response_id,
        factual=judgment,
        severity=carried.severity,
        transcript=transcript,
    )

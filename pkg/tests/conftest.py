import json
from pathlib import Path

import pytest

from factdebate.gateway import Gateway, ScriptedBackend
from factdebate.model import (
    AgentOpinion,
    AgentRole,
    Claim,
    ClaimVerdict,
    DebateStateId,
    DebateTranscript,
    StateOutcome,
    StopReason,
    TaskKind,
)

FIXTURES = Path(__file__).parent / "fixtures"


def opinion_text(factuality: bool, severity: int, text: str = "Scripted analysis.") -> str:
    """A well-formed raw completion carrying one opinion."""
    return json.dumps({"opinion": text, "factuality": factuality, "Error severity": severity})


def make_opinion(
    role: AgentRole,
    factuality: bool,
    severity: int = 0,
    text: str = "A scripted opinion.",
) -> AgentOpinion:
    return AgentOpinion(role=role, opinion=text, factuality=factuality, severity=severity)


def make_state(state: DebateStateId, factualities, severity: int = 0) -> StateOutcome:
    """Build a state outcome with the canonical role order for its state."""
    if state == DebateStateId.S0:
        roles = (AgentRole.INITIAL,)
    elif state == DebateStateId.S1:
        roles = (AgentRole.TRUST, AgentRole.SKEPTIC, AgentRole.LEADER)
    else:
        roles = (AgentRole.SKEPTIC, AgentRole.TRUST, AgentRole.LEADER)
    opinions = tuple(
        make_opinion(role, factuality, severity) for role, factuality in zip(roles, factualities)
    )
    return StateOutcome.from_opinions(state, opinions)


def make_verdict(
    factual: bool, claim_id: str = "c1", response_id: str = "r1", severity: int = 0
) -> ClaimVerdict:
    """A minimal consistent claim verdict: S0 then one unanimous round."""
    initial = make_state(DebateStateId.S0, [True], severity)
    round_state = DebateStateId.S2 if initial.judgment else DebateStateId.S1
    final = make_state(round_state, [factual] * 3, severity)
    transcript = DebateTranscript(
        claim_id=claim_id, initial=initial, rounds=(final,), stop_reason=StopReason.CONSENSUS
    )
    return ClaimVerdict(
        claim_id=claim_id,
        response_id=response_id,
        factual=factual,
        severity=severity,
        transcript=transcript,
    )


def make_claim(text: str = "The sky is blue.", claim_id: str = "c1") -> Claim:
    return Claim(id=claim_id, text=text, source_response_id="r1", task_kind=TaskKind.QA)


def scripted_gateway(script, **kwargs) -> Gateway:
    return Gateway(ScriptedBackend(script), **kwargs)


@pytest.fixture
def landseer_session() -> dict:
    with open(FIXTURES / "landseer_session.json", encoding="utf-8") as handle:
        return json.load(handle)

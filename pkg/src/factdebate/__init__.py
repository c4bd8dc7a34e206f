"""factdebate: hallucination detection via evidence-grounded multi-agent debate.

The pipeline has three stages: claim detection (``claims``), evidence
retrieval (``retrieval``), and debate verification (``engine`` over the
domain types in ``model``). ``gateway`` hosts the provider-agnostic
completion layer with scripted and replay backends for fully offline,
deterministic runs; ``evaluation`` scores labeled benchmarks; ``cli`` wires
it all together.
"""

from .model import (
    AgentOpinion,
    AgentRole,
    Claim,
    ClaimVerdict,
    DebateConfig,
    DebateStateId,
    DebateTranscript,
    EvidenceSnippet,
    EvidenceSource,
    ResponseVerdict,
    StateOutcome,
    StopReason,
    TaskKind,
    TransitionPolicy,
    aggregate_response_verdict,
    next_state,
    validate_transcript,
)

__all__ = [
    "AgentOpinion",
    "AgentRole",
    "Claim",
    "ClaimVerdict",
    "DebateConfig",
    "DebateStateId",
    "DebateTranscript",
    "EvidenceSnippet",
    "EvidenceSource",
    "ResponseVerdict",
    "StateOutcome",
    "StopReason",
    "TaskKind",
    "TransitionPolicy",
    "aggregate_response_verdict",
    "next_state",
    "validate_transcript",
]

__version__ = "0.1.0"

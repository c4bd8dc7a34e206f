"""Shared domain types for the verification pipeline.

Everything here is an immutable value object: claims, evidence snippets,
agent opinions, debate states, transcripts, and verdicts. Instances are safe
to share across threads without coordination. Structural invariants that can
be checked locally (non-empty text, severity range, judgment consistency) are
enforced at construction time; cross-object invariants (transition adjacency,
round bounds, stop-reason consistency) are checked by ``validate_transcript``,
which reports violations as data instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

SEVERITY_MIN = 0
SEVERITY_MAX = 5


class FactDebateError(Exception):
    """Base class for errors raised deliberately by this package."""


class EmptyClaimSet(FactDebateError):
    """Response-level aggregation received zero claim verdicts."""


class TaskKind(str, Enum):
    QA = "qa"
    SUMMARIZATION = "summarization"
    DIALOGUE = "dialogue"


class EvidenceSource(str, Enum):
    WEB_SEARCH = "web-search"
    PROVIDED_KNOWLEDGE = "provided-knowledge"
    LOCAL_RANKED = "local-ranked"


class AgentRole(str, Enum):
    INITIAL = "initial"
    TRUST = "trust"
    SKEPTIC = "skeptic"
    LEADER = "leader"


class DebateStateId(str, Enum):
    S0 = "S0"
    S1 = "S1"
    S2 = "S2"


class TransitionPolicy(str, Enum):
    """Rule mapping a state's judgment to the next state's identity."""

    TRUE_TO_SKEPTIC = "true-to-skeptic"
    TRUE_TO_TRUST = "true-to-trust"
    ALWAYS_SKEPTIC = "always-skeptic"
    ALWAYS_TRUST = "always-trust"


class StopReason(str, Enum):
    CONSENSUS = "consensus"
    MAX_ROUNDS = "max-rounds"


# Role execution order of the two ordinary debate states. S1 is the
# trust-initiated discussion, S2 the skeptic-initiated one.
STATE_ROLE_ORDER: dict[DebateStateId, tuple[AgentRole, ...]] = {
    DebateStateId.S1: (AgentRole.TRUST, AgentRole.SKEPTIC, AgentRole.LEADER),
    DebateStateId.S2: (AgentRole.SKEPTIC, AgentRole.TRUST, AgentRole.LEADER),
}


@dataclass(frozen=True)
class Claim:
    """An atomic verifiable statement with provenance back to its response."""

    id: str
    text: str
    source_response_id: str
    task_kind: TaskKind
    context: str | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("claim text must be non-empty")


@dataclass(frozen=True)
class EvidenceSnippet:
    """One retrieved passage, ranked within its evidence set."""

    text: str
    source: EvidenceSource
    rank: int
    origin_ref: str | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("evidence text must be non-empty")
        if self.rank < 1:
            raise ValueError(f"evidence rank must be >= 1, got {self.rank}")


def check_evidence_ranks(snippets: Sequence[EvidenceSnippet]) -> None:
    """Raise if ranks within one evidence set are not contiguous from 1."""
    ranks = sorted(s.rank for s in snippets)
    if ranks != list(range(1, len(snippets) + 1)):
        raise ValueError(f"evidence ranks must be 1..{len(snippets)}, got {ranks}")


@dataclass(frozen=True)
class AgentOpinion:
    """One agent's structured verdict on a claim."""

    role: AgentRole
    opinion: str
    factuality: bool
    severity: int

    def __post_init__(self) -> None:
        if not self.opinion.strip():
            raise ValueError("opinion text must be non-empty")
        if not SEVERITY_MIN <= self.severity <= SEVERITY_MAX:
            raise ValueError(
                f"severity must be in [{SEVERITY_MIN}, {SEVERITY_MAX}], got {self.severity}"
            )


@dataclass(frozen=True)
class StateOutcome:
    """The executed result of one debate state.

    ``judgment`` is the factuality of the state's final agent (the initial
    agent for S0, the leader for S1/S2); ``consensus`` holds only for an
    ordinary state whose three agents agree on factuality. Both fields are
    derived values and construction rejects inconsistent combinations; use
    ``from_opinions`` to compute them.
    """

    state: DebateStateId
    opinions: tuple[AgentOpinion, ...]
    judgment: bool
    consensus: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "opinions", tuple(self.opinions))
        if not self.opinions:
            raise ValueError("a state outcome must hold at least one opinion")
        if self.judgment != self.opinions[-1].factuality:
            raise ValueError("judgment must equal the final opinion's factuality")
        if self.consensus != _derive_consensus(self.state, self.opinions):
            raise ValueError("consensus flag inconsistent with opinions")

    @classmethod
    def from_opinions(
        cls, state: DebateStateId, opinions: Sequence[AgentOpinion]
    ) -> "StateOutcome":
        opinions = tuple(opinions)
        if not opinions:
            raise ValueError("a state outcome must hold at least one opinion")
        return cls(
            state=state,
            opinions=opinions,
            judgment=opinions[-1].factuality,
            consensus=_derive_consensus(state, opinions),
        )


def _derive_consensus(state: DebateStateId, opinions: tuple[AgentOpinion, ...]) -> bool:
    if state == DebateStateId.S0:
        return False
    return len(opinions) == 3 and len({op.factuality for op in opinions}) == 1


@dataclass(frozen=True)
class DebateConfig:
    """Knobs of one debate chain."""

    policy: TransitionPolicy = TransitionPolicy.TRUE_TO_SKEPTIC
    min_rounds: int = 2
    max_rounds: int = 5
    evidence_k: int = 10

    def __post_init__(self) -> None:
        if self.min_rounds < 0:
            raise ValueError("min_rounds must be non-negative")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        if self.min_rounds > self.max_rounds:
            raise ValueError("min_rounds must not exceed max_rounds")
        if self.evidence_k < 1:
            raise ValueError("evidence_k must be >= 1")


@dataclass(frozen=True)
class DebateTranscript:
    """Ordered record of the initial state and every executed round.

    A "round" is one executed ordinary state (S1 or S2); the initial S0 state
    is not a round.
    """

    claim_id: str
    initial: StateOutcome
    rounds: tuple[StateOutcome, ...]
    stop_reason: StopReason

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if self.initial.state != DebateStateId.S0:
            raise ValueError("the initial outcome must be an S0 state")
        for i, outcome in enumerate(self.rounds, start=1):
            if outcome.state == DebateStateId.S0:
                raise ValueError(f"round {i} must be an ordinary state, got S0")

    @property
    def final_outcome(self) -> StateOutcome:
        return self.rounds[-1] if self.rounds else self.initial

    @property
    def final_judgment(self) -> bool:
        return self.final_outcome.judgment


@dataclass(frozen=True)
class ClaimVerdict:
    """Final factuality judgment for one claim, with its audit trail."""

    claim_id: str
    response_id: str
    factual: bool
    severity: int
    transcript: DebateTranscript

    def __post_init__(self) -> None:
        if not SEVERITY_MIN <= self.severity <= SEVERITY_MAX:
            raise ValueError("severity out of range")
        if self.factual != self.transcript.final_judgment:
            raise ValueError("verdict must equal the transcript's final judgment")


@dataclass(frozen=True)
class ResponseVerdict:
    """Aggregated judgment for an original response."""

    response_id: str
    factual: bool
    claim_verdicts: tuple[ClaimVerdict, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "claim_verdicts", tuple(self.claim_verdicts))
        if not self.claim_verdicts:
            raise ValueError("a response verdict needs at least one claim verdict")
        if self.factual != all(v.factual for v in self.claim_verdicts):
            raise ValueError("response factuality must be the conjunction of claim verdicts")


def aggregate_response_verdict(claim_verdicts: Sequence[ClaimVerdict]) -> ResponseVerdict:
    """Fold claim verdicts into a response verdict.

    The response is factual iff every claim verdict is; one hallucinated claim
    marks the whole response non-factual. Input order is preserved.
    """
    verdicts = tuple(claim_verdicts)
    if not verdicts:
        raise EmptyClaimSet("no claim verdicts to aggregate")
    response_ids = {v.response_id for v in verdicts}
    if len(response_ids) != 1:
        raise ValueError(f"claim verdicts span multiple responses: {sorted(response_ids)}")
    return ResponseVerdict(
        response_id=verdicts[0].response_id,
        factual=all(v.factual for v in verdicts),
        claim_verdicts=verdicts,
    )


def next_state(policy: TransitionPolicy, judgment: bool) -> DebateStateId:
    """The next ordinary state under ``policy`` given the previous judgment.

    Total and deterministic. The default policy moves to the skeptic-led state
    when the previous state found no hallucination, and to the trust-led state
    when it did.
    """
    if policy == TransitionPolicy.TRUE_TO_SKEPTIC:
        return DebateStateId.S2 if judgment else DebateStateId.S1
    if policy == TransitionPolicy.TRUE_TO_TRUST:
        return DebateStateId.S1 if judgment else DebateStateId.S2
    if policy == TransitionPolicy.ALWAYS_SKEPTIC:
        return DebateStateId.S2
    return DebateStateId.S1


def validate_transcript(transcript: DebateTranscript, config: DebateConfig) -> list[str]:
    """Check a transcript's structural invariants against a config.

    Returns one message per violation; an empty list means the transcript is
    valid. Violations are data, not faults: transcripts produced by other
    configurations (or by hand) are legitimate inputs.
    """
    violations: list[str] = []

    initial_roles = tuple(op.role for op in transcript.initial.opinions)
    if initial_roles != (AgentRole.INITIAL,):
        violations.append(
            "initial state must hold exactly one opinion from the initial agent, "
            f"got roles {[r.value for r in initial_roles]}"
        )

    previous_judgment = transcript.initial.judgment
    for i, outcome in enumerate(transcript.rounds, start=1):
        expected_state = next_state(config.policy, previous_judgment)
        if outcome.state != expected_state:
            violations.append(
                f"round {i} must be {expected_state.value} under policy "
                f"{config.policy.value}, got {outcome.state.value}"
            )
        expected_roles = STATE_ROLE_ORDER[outcome.state]
        actual_roles = tuple(op.role for op in outcome.opinions)
        if actual_roles != expected_roles:
            violations.append(
                f"round {i} ({outcome.state.value}) must run roles "
                f"{[r.value for r in expected_roles]}, got {[r.value for r in actual_roles]}"
            )
        previous_judgment = outcome.judgment

    if len(transcript.rounds) > config.max_rounds:
        violations.append(
            f"transcript has {len(transcript.rounds)} rounds, exceeding "
            f"max_rounds={config.max_rounds}"
        )

    if transcript.stop_reason == StopReason.CONSENSUS:
        if not transcript.rounds:
            violations.append("consensus stop requires at least one executed round")
        else:
            if not transcript.rounds[-1].consensus:
                violations.append("consensus stop but the final round has no consensus")
            if len(transcript.rounds) < config.min_rounds:
                violations.append(
                    f"consensus stop after {len(transcript.rounds)} rounds, before "
                    f"min_rounds={config.min_rounds}"
                )
    else:
        if len(transcript.rounds) != config.max_rounds:
            violations.append(
                f"max-rounds stop requires exactly {config.max_rounds} rounds, "
                f"got {len(transcript.rounds)}"
            )

    return violations

import pytest
from hypothesis import given, strategies as st

from factdebate.model import (
    AgentOpinion,
    AgentRole,
    Claim,
    DebateConfig,
    DebateStateId,
    DebateTranscript,
    EmptyClaimSet,
    EvidenceSnippet,
    EvidenceSource,
    StateOutcome,
    StopReason,
    TaskKind,
    TransitionPolicy,
    aggregate_response_verdict,
    check_evidence_ranks,
    next_state,
    validate_transcript,
)

from conftest import make_opinion, make_state, make_verdict


class TestTypeInvariants:
    def test_claim_rejects_blank_text(self):
        with pytest.raises(ValueError):
            Claim(id="c1", text="   ", source_response_id="r1", task_kind=TaskKind.QA)

    def test_evidence_rejects_bad_rank(self):
        with pytest.raises(ValueError):
            EvidenceSnippet(text="x", source=EvidenceSource.WEB_SEARCH, rank=0)

    def test_evidence_ranks_must_be_contiguous(self):
        snippets = [
            EvidenceSnippet(text="a", source=EvidenceSource.WEB_SEARCH, rank=1),
            EvidenceSnippet(text="b", source=EvidenceSource.WEB_SEARCH, rank=3),
        ]
        with pytest.raises(ValueError):
            check_evidence_ranks(snippets)

    @pytest.mark.parametrize("severity", [-1, 6])
    def test_opinion_severity_range(self, severity):
        with pytest.raises(ValueError):
            AgentOpinion(AgentRole.TRUST, "text", True, severity)

    def test_state_outcome_judgment_must_match_final_opinion(self):
        with pytest.raises(ValueError):
            StateOutcome(
                state=DebateStateId.S0,
                opinions=(make_opinion(AgentRole.INITIAL, True),),
                judgment=False,
                consensus=False,
            )

    def test_state_outcome_consensus_is_derived(self):
        outcome = make_state(DebateStateId.S1, [True, False, True])
        assert outcome.consensus is False
        assert make_state(DebateStateId.S2, [False, False, False]).consensus is True
        # S0 never has consensus, even though it is trivially unanimous.
        assert make_state(DebateStateId.S0, [True]).consensus is False

    def test_debate_config_bounds(self):
        with pytest.raises(ValueError):
            DebateConfig(min_rounds=3, max_rounds=2)
        with pytest.raises(ValueError):
            DebateConfig(max_rounds=0)
        with pytest.raises(ValueError):
            DebateConfig(evidence_k=0)

    def test_transcript_initial_must_be_s0(self):
        round1 = make_state(DebateStateId.S1, [True, True, True])
        with pytest.raises(ValueError):
            DebateTranscript("c1", round1, (), StopReason.CONSENSUS)


class TestAggregation:
    def test_all_factual(self):
        verdict = aggregate_response_verdict([make_verdict(True), make_verdict(True)])
        assert verdict.factual is True

    def test_one_hallucinated_claim_flips_the_response(self):
        verdict = aggregate_response_verdict(
            [make_verdict(True), make_verdict(False), make_verdict(True)]
        )
        assert verdict.factual is False

    def test_empty_claim_set(self):
        with pytest.raises(EmptyClaimSet):
            aggregate_response_verdict([])

    def test_mixed_response_ids_rejected(self):
        with pytest.raises(ValueError):
            aggregate_response_verdict(
                [make_verdict(True, response_id="r1"), make_verdict(True, response_id="r2")]
            )

    def test_order_preserved(self):
        verdicts = [make_verdict(True, claim_id=f"c{i}") for i in range(4)]
        result = aggregate_response_verdict(verdicts)
        assert [v.claim_id for v in result.claim_verdicts] == ["c0", "c1", "c2", "c3"]

    @given(st.lists(st.booleans(), min_size=1, max_size=8), st.randoms())
    def test_factual_flag_is_permutation_invariant(self, flags, rng):
        verdicts = [make_verdict(f, claim_id=f"c{i}") for i, f in enumerate(flags)]
        shuffled = list(verdicts)
        rng.shuffle(shuffled)
        assert (
            aggregate_response_verdict(verdicts).factual
            == aggregate_response_verdict(shuffled).factual
            == all(flags)
        )


class TestNextState:
    @pytest.mark.parametrize(
        "policy,judgment,expected",
        [
            (TransitionPolicy.TRUE_TO_SKEPTIC, True, DebateStateId.S2),
            (TransitionPolicy.TRUE_TO_SKEPTIC, False, DebateStateId.S1),
            (TransitionPolicy.TRUE_TO_TRUST, True, DebateStateId.S1),
            (TransitionPolicy.TRUE_TO_TRUST, False, DebateStateId.S2),
            (TransitionPolicy.ALWAYS_SKEPTIC, True, DebateStateId.S2),
            (TransitionPolicy.ALWAYS_SKEPTIC, False, DebateStateId.S2),
            (TransitionPolicy.ALWAYS_TRUST, True, DebateStateId.S1),
            (TransitionPolicy.ALWAYS_TRUST, False, DebateStateId.S1),
        ],
    )
    def test_full_grid(self, policy, judgment, expected):
        assert next_state(policy, judgment) == expected


def recorded_style_transcript() -> DebateTranscript:
    """S0 judged true, then one unanimous non-factual skeptic-led round."""
    initial = make_state(DebateStateId.S0, [True])
    round1 = make_state(DebateStateId.S2, [False, False, False], severity=4)
    return DebateTranscript("c1", initial, (round1,), StopReason.CONSENSUS)


class TestValidateTranscript:
    def test_valid_under_default_policy(self):
        config = DebateConfig(min_rounds=1, max_rounds=5)
        assert validate_transcript(recorded_style_transcript(), config) == []

    def test_always_trust_expects_s1(self):
        config = DebateConfig(
            policy=TransitionPolicy.ALWAYS_TRUST, min_rounds=1, max_rounds=5
        )
        violations = validate_transcript(recorded_style_transcript(), config)
        assert any("round 1" in v and "S1" in v for v in violations)

    def test_round_overflow_reported(self):
        initial = make_state(DebateStateId.S0, [True])
        rounds = (
            make_state(DebateStateId.S2, [True, True, False]),
            make_state(DebateStateId.S1, [False, False, False]),
        )
        transcript = DebateTranscript("c1", initial, rounds, StopReason.CONSENSUS)
        config = DebateConfig(min_rounds=1, max_rounds=1)
        assert any("max_rounds" in v for v in validate_transcript(transcript, config))

    def test_consensus_before_min_rounds_reported(self):
        config = DebateConfig(min_rounds=2, max_rounds=5)
        violations = validate_transcript(recorded_style_transcript(), config)
        assert any("min_rounds" in v for v in violations)

    def test_max_rounds_stop_requires_exact_count(self):
        initial = make_state(DebateStateId.S0, [True])
        round1 = make_state(DebateStateId.S2, [True, False, True])
        transcript = DebateTranscript("c1", initial, (round1,), StopReason.MAX_ROUNDS)
        config = DebateConfig(min_rounds=1, max_rounds=3)
        assert any("max-rounds" in v for v in validate_transcript(transcript, config))

    def test_wrong_role_order_reported(self):
        initial = make_state(DebateStateId.S0, [True])
        # An S2 round wrongly running the trust-first sequence.
        opinions = (
            make_opinion(AgentRole.TRUST, False),
            make_opinion(AgentRole.SKEPTIC, False),
            make_opinion(AgentRole.LEADER, False),
        )
        round1 = StateOutcome.from_opinions(DebateStateId.S2, opinions)
        transcript = DebateTranscript("c1", initial, (round1,), StopReason.CONSENSUS)
        config = DebateConfig(min_rounds=1, max_rounds=5)
        assert any("roles" in v for v in validate_transcript(transcript, config))

    def test_wrong_initial_role_reported(self):
        initial = StateOutcome.from_opinions(
            DebateStateId.S0, (make_opinion(AgentRole.TRUST, True),)
        )
        round1 = make_state(DebateStateId.S2, [False, False, False])
        transcript = DebateTranscript("c1", initial, (round1,), StopReason.CONSENSUS)
        config = DebateConfig(min_rounds=1, max_rounds=5)
        assert any("initial" in v for v in validate_transcript(transcript, config))

import pytest
from hypothesis import given, strategies as st

from factdebate.model import AgentOpinion, AgentRole, EvidenceSnippet, EvidenceSource
from factdebate.personas import (
    ContextMismatch,
    OpinionUnparseable,
    ParseFailure,
    PromptContext,
    elicit_opinion,
    parse_opinion,
    render_prompt,
    serialize_opinion,
)

from conftest import make_opinion, opinion_text, scripted_gateway


def snippet(text, rank=1, source=EvidenceSource.PROVIDED_KNOWLEDGE):
    return EvidenceSnippet(text=text, source=source, rank=rank)


class TestRenderPrompt:
    def test_trust_prompt_carries_its_role_definition(self):
        ctx = PromptContext("claim text", (), (make_opinion(AgentRole.INITIAL, True),))
        prompt = render_prompt(AgentRole.TRUST, ctx)
        assert "trust the previous agent's opinions as much as possible" in prompt

    def test_skeptic_prompt_carries_its_role_definition(self):
        ctx = PromptContext("claim text", (), (make_opinion(AgentRole.INITIAL, True),))
        prompt = render_prompt(AgentRole.SKEPTIC, ctx)
        assert "question the previous agent's opinions" in prompt

    def test_leader_prompt_carries_its_role_definition(self):
        ctx = PromptContext(
            "claim text",
            (),
            (make_opinion(AgentRole.SKEPTIC, False), make_opinion(AgentRole.TRUST, False)),
        )
        prompt = render_prompt(AgentRole.LEADER, ctx)
        assert "synthesize the most accurate and reliable conclusion" in prompt

    def test_leader_rejects_single_prior(self):
        ctx = PromptContext("claim", (), (make_opinion(AgentRole.TRUST, True),))
        with pytest.raises(ContextMismatch):
            render_prompt(AgentRole.LEADER, ctx)

    def test_initial_rejects_priors(self):
        ctx = PromptContext("claim", (), (make_opinion(AgentRole.TRUST, True),))
        with pytest.raises(ContextMismatch):
            render_prompt(AgentRole.INITIAL, ctx)

    def test_trust_requires_a_prior(self):
        with pytest.raises(ContextMismatch):
            render_prompt(AgentRole.TRUST, PromptContext("claim"))

    def test_initial_slots_filled(self):
        ctx = PromptContext("the quick brown fox claim", (snippet("ev one"), snippet("ev two", 2)))
        prompt = render_prompt(AgentRole.INITIAL, ctx)
        assert "[text]: the quick brown fox claim" in prompt
        assert "1. ev one" in prompt and "2. ev two" in prompt
        assert "<<" not in prompt

    def test_claim_and_evidence_appear_exactly_once(self):
        ctx = PromptContext(
            "zq-unique-claim-token",
            (snippet("zq-evidence-alpha"), snippet("zq-evidence-beta", 2)),
            (make_opinion(AgentRole.INITIAL, True),),
        )
        prompt = render_prompt(AgentRole.SKEPTIC, ctx)
        assert prompt.count("zq-unique-claim-token") == 1
        assert prompt.count("zq-evidence-alpha") == 1
        assert prompt.count("zq-evidence-beta") == 1

    def test_format_block_kept_verbatim(self):
        ctx = PromptContext("claim")
        prompt = render_prompt(AgentRole.INITIAL, ctx)
        assert "START YOUR RESPONSE WITH '{{'" in prompt
        assert "Range from 0 to 5" in prompt

    def test_prior_opinions_labeled_by_role(self):
        ctx = PromptContext(
            "claim",
            (),
            (make_opinion(AgentRole.SKEPTIC, False), make_opinion(AgentRole.TRUST, False)),
        )
        prompt = render_prompt(AgentRole.LEADER, ctx)
        assert "Here is the response from the Skeptic agent:" in prompt
        assert "Here is the response from the Trust agent:" in prompt
        assert prompt.index("Skeptic agent:") < prompt.index("Trust agent:")

    def test_no_evidence_renders_placeholder(self):
        prompt = render_prompt(AgentRole.INITIAL, PromptContext("claim"))
        assert "(no evidence available)" in prompt

    def test_long_web_snippet_truncated_but_knowledge_passed_whole(self):
        long_text = "x" * 2500
        web = snippet(long_text, 1, EvidenceSource.WEB_SEARCH)
        knowledge = snippet(long_text, 2, EvidenceSource.PROVIDED_KNOWLEDGE)
        prompt = render_prompt(AgentRole.INITIAL, PromptContext("claim", (web, knowledge)))
        assert f"1. {'x' * 1000}\n" in prompt
        assert f"2. {'x' * 2500}" in prompt


class TestParseOpinion:
    def test_recorded_outputs_parse(self, landseer_session):
        outputs = landseer_session["outputs"]
        initial = parse_opinion(outputs["initial"], AgentRole.INITIAL)
        assert (initial.factuality, initial.severity) == (True, 0)
        for role, key in [
            (AgentRole.SKEPTIC, "skeptic"),
            (AgentRole.TRUST, "trust"),
            (AgentRole.LEADER, "leader"),
        ]:
            opinion = parse_opinion(outputs[key], role)
            assert (opinion.factuality, opinion.severity) == (False, 4)
            assert opinion.role == role

    def test_out_of_range_severity(self):
        raw = 'Sure! {"opinion":"x","factuality":true,"Error severity":9}'
        with pytest.raises(ParseFailure):
            parse_opinion(raw, AgentRole.TRUST)

    def test_prefix_and_suffix_noise_tolerated(self):
        raw = "Of course, here is my verdict:\n" + opinion_text(False, 3) + "\nHope that helps!"
        opinion = parse_opinion(raw, AgentRole.SKEPTIC)
        assert opinion.factuality is False and opinion.severity == 3

    def test_noise_with_stray_braces(self):
        raw = "prelude {not json} " + opinion_text(True, 1) + " {tail}"
        assert parse_opinion(raw, AgentRole.TRUST).severity == 1

    def test_python_literal_booleans_accepted(self):
        raw = "{'opinion': 'fine', 'factuality': True, 'Error severity': 2}"
        assert parse_opinion(raw, AgentRole.TRUST).factuality is True

    def test_doubled_braces_unwrapped(self):
        raw = '{{"opinion": "ok", "factuality": false, "Error severity": 5}}'
        assert parse_opinion(raw, AgentRole.LEADER).severity == 5

    def test_missing_key(self):
        with pytest.raises(ParseFailure):
            parse_opinion('{"opinion":"x","factuality":true}', AgentRole.TRUST)

    def test_non_boolean_factuality(self):
        with pytest.raises(ParseFailure):
            parse_opinion('{"opinion":"x","factuality":"maybe","Error severity":1}', AgentRole.TRUST)

    def test_no_object_at_all(self):
        with pytest.raises(ParseFailure):
            parse_opinion("I simply cannot answer that.", AgentRole.TRUST)

    @given(
        opinion=st.text(
            alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
            min_size=1,
        ).filter(lambda s: s.strip()),
        factuality=st.booleans(),
        severity=st.integers(min_value=0, max_value=5),
        role=st.sampled_from(list(AgentRole)),
    )
    def test_round_trip_identity(self, opinion, factuality, severity, role):
        original = AgentOpinion(role, opinion, factuality, severity)
        assert parse_opinion(serialize_opinion(original), role) == original


class TestElicitOpinion:
    def ctx(self):
        return PromptContext("claim", (), (make_opinion(AgentRole.INITIAL, True),))

    def test_repair_after_malformed_first_reply(self):
        gateway = scripted_gateway(["not parseable", opinion_text(True, 0)])
        opinion = elicit_opinion(AgentRole.TRUST, self.ctx(), gateway)
        assert opinion.factuality is True
        assert gateway.provider_calls == 2
        # The reissued prompt carries the repair instruction.
        assert "repair attempt 1" in gateway.backend.calls[1]

    def test_all_malformed_exhausts_retries(self):
        gateway = scripted_gateway(["bad", "worse", "worst", "never reached"])
        with pytest.raises(OpinionUnparseable):
            elicit_opinion(AgentRole.TRUST, self.ctx(), gateway, max_retries=2)
        assert gateway.provider_calls == 3

    def test_well_formed_first_reply_costs_one_call(self):
        gateway = scripted_gateway([opinion_text(False, 4)])
        elicit_opinion(AgentRole.SKEPTIC, self.ctx(), gateway)
        assert gateway.provider_calls == 1

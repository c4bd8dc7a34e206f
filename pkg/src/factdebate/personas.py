"""Agent persona prompts and structured-opinion parsing.

The four role prompts live as versioned template files under ``templates/``
and are byte-stable across releases; ``TEMPLATE_VERSION`` is stamped into
every serialized transcript. Rendering fills three slots (claim text, a
numbered evidence list, the previous agents' opinions) and leaves every
other byte of the template untouched, including the doubled-brace response
format block.

Parsing is the inverse direction: locate the first balanced brace-delimited
object in the raw completion, read the three keys, and build an
``AgentOpinion``. Keys are matched exactly first ("opinion", "factuality",
"Error severity") with a lenient case-insensitive fallback, since providers
routinely capitalize them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from typing import Any, Sequence

from .gateway import Gateway
from .model import AgentRole, EvidenceSnippet, EvidenceSource, FactDebateError
from .model import SEVERITY_MAX, SEVERITY_MIN, AgentOpinion
from .parsing import first_object

log = logging.getLogger(__name__)

TEMPLATE_VERSION = "1"

# Per-snippet character budget at prompt-assembly time. Knowledge passed
# whole as direct evidence is exempt; truncating it would defeat its purpose.
EVIDENCE_CHAR_LIMIT = 1000

OPINION_KEY = "opinion"
FACTUALITY_KEY = "factuality"
SEVERITY_KEY = "Error severity"

REPAIR_INSTRUCTION = (
    "Your previous reply could not be parsed. Respond with ONLY a dictionary with "
    'three keys - "opinion", "factuality", "Error severity" - where "opinion" is a '
    'string, "factuality" is a Boolean (True or False), and "Error severity" is an '
    "integer from 0 to 5. DO NOT RETURN ANYTHING ELSE. "
    "START YOUR RESPONSE WITH '{'. This is repair attempt <<ATTEMPT>>."
)


class ContextMismatch(FactDebateError):
    """The prompt context does not satisfy the target role's arity rules."""


class ParseFailure(FactDebateError):
    """A completion did not contain a well-formed opinion object."""


class OpinionUnparseable(FactDebateError):
    """No parseable opinion after exhausting repair retries."""


@dataclass(frozen=True)
class PromptContext:
    """Everything an agent sees: the claim, its evidence, and prior opinions."""

    claim_text: str
    evidence: tuple[EvidenceSnippet, ...] = ()
    prior_opinions: tuple[AgentOpinion, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "evidence", tuple(self.evidence))
        object.__setattr__(self, "prior_opinions", tuple(self.prior_opinions))


_TEMPLATE_FILES = {
    AgentRole.INITIAL: "initial.txt",
    AgentRole.TRUST: "trust.txt",
    AgentRole.SKEPTIC: "skeptic.txt",
    AgentRole.LEADER: "leader.txt",
}

_templates_cache: dict[str, str] = {}


def load_template(name: str) -> str:
    """Read a template file from the packaged template set, cached."""
    if name not in _templates_cache:
        text = resources.files("factdebate.templates").joinpath(name).read_text("utf-8")
        if name != "_rubric.txt":
            text = text.replace("<<RUBRIC>>", load_template("_rubric.txt").rstrip("\n"))
        _templates_cache[name] = text
    return _templates_cache[name]


def _check_context(role: AgentRole, ctx: PromptContext) -> None:
    n = len(ctx.prior_opinions)
    if role == AgentRole.INITIAL and n != 0:
        raise ContextMismatch(f"the initial agent takes no prior opinions, got {n}")
    if role in (AgentRole.TRUST, AgentRole.SKEPTIC) and n < 1:
        raise ContextMismatch(f"the {role.value} agent needs at least one prior opinion")
    if role == AgentRole.LEADER:
        roles = {op.role for op in ctx.prior_opinions}
        if n != 2 or roles != {AgentRole.TRUST, AgentRole.SKEPTIC}:
            raise ContextMismatch(
                "the leader needs exactly the trust and skeptic opinions of its state, "
                f"got {[op.role.value for op in ctx.prior_opinions]}"
            )


def format_evidence(evidence: Sequence[EvidenceSnippet]) -> str:
    """Render evidence as a numbered list, truncating oversized snippets."""
    if not evidence:
        return "(no evidence available)"
    lines = []
    for snippet in evidence:
        text = snippet.text
        if snippet.source != EvidenceSource.PROVIDED_KNOWLEDGE and len(text) > EVIDENCE_CHAR_LIMIT:
            text = text[:EVIDENCE_CHAR_LIMIT]
        lines.append(f"{snippet.rank}. {text}")
    return "\n".join(lines)


def serialize_opinion(op: AgentOpinion) -> str:
    """Canonical three-key JSON form of an opinion, as agents are asked to emit."""
    return json.dumps(
        {OPINION_KEY: op.opinion, FACTUALITY_KEY: op.factuality, SEVERITY_KEY: op.severity},
        ensure_ascii=False,
    )


_PRIOR_LABELS = {
    AgentRole.INITIAL: "previous",
    AgentRole.TRUST: "Trust",
    AgentRole.SKEPTIC: "Skeptic",
    AgentRole.LEADER: "Leader",
}


def format_prior_opinions(prior_opinions: Sequence[AgentOpinion]) -> str:
    blocks = []
    for op in prior_opinions:
        label = _PRIOR_LABELS[op.role]
        blocks.append(f"Here is the response from the {label} agent:\n{serialize_opinion(op)}")
    return "\n\n".join(blocks)


def render_prompt(role: AgentRole, ctx: PromptContext) -> str:
    """Fill the role's template with the context's claim, evidence, and priors."""
    _check_context(role, ctx)
    prompt = load_template(_TEMPLATE_FILES[role])
    prompt = prompt.replace("<<CLAIM>>", ctx.claim_text)
    prompt = prompt.replace("<<EVIDENCE>>", format_evidence(ctx.evidence))
    if role != AgentRole.INITIAL:
        prompt = prompt.replace("<<PRIOR_OPINIONS>>", format_prior_opinions(ctx.prior_opinions))
    return prompt


def _coerce_factuality(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        lowered = value.strip().casefold()
        if lowered == "true":
            return True
        if lowered == "false":
            return False
    raise ParseFailure(f"factuality must be a boolean, got {value!r}")


def _coerce_severity(value: Any) -> int:
    if isinstance(value, bool):
        raise ParseFailure(f"severity must be an integer, got {value!r}")
    if isinstance(value, str):
        try:
            value = int(value.strip())
        except ValueError:
            raise ParseFailure(f"severity must be an integer, got {value!r}") from None
    if not isinstance(value, int):
        raise ParseFailure(f"severity must be an integer, got {value!r}")
    if not SEVERITY_MIN <= value <= SEVERITY_MAX:
        raise ParseFailure(f"severity {value} outside [{SEVERITY_MIN}, {SEVERITY_MAX}]")
    return value


def _lookup_key(obj: dict[str, Any], key: str) -> Any:
    if key in obj:
        return obj[key]
    folded = {str(k).casefold(): v for k, v in obj.items()}
    if key.casefold() in folded:
        return folded[key.casefold()]
    raise ParseFailure(f"missing key {key!r} in opinion object")


def parse_opinion(raw: str, role: AgentRole) -> AgentOpinion:
    """Extract an ``AgentOpinion`` from a raw completion.

    Insensitive to prefix/suffix noise around the first balanced object.
    """
    obj = first_object(raw)
    if obj is None:
        raise ParseFailure("no balanced opinion object found in completion")
    opinion = _lookup_key(obj, OPINION_KEY)
    if not isinstance(opinion, str) or not opinion.strip():
        raise ParseFailure("opinion must be a non-empty string")
    factuality = _coerce_factuality(_lookup_key(obj, FACTUALITY_KEY))
    severity = _coerce_severity(_lookup_key(obj, SEVERITY_KEY))
    return AgentOpinion(role=role, opinion=opinion, factuality=factuality, severity=severity)


def elicit_opinion(
    role: AgentRole,
    ctx: PromptContext,
    gateway: Gateway,
    max_retries: int = 2,
) -> AgentOpinion:
    """Render, complete, and parse; on parse failure, repair and retry.

    Each retry reissues the prompt with an appended repair instruction (the
    attempt counter keeps repaired prompts distinct, so a cached malformed
    completion is never replayed). Performs at most ``max_retries + 1``
    completions and raises ``OpinionUnparseable`` when all of them fail.
    """
    if max_retries < 0:
        raise ValueError("max_retries must be >= 0")
    base_prompt = render_prompt(role, ctx)
    last_failure: ParseFailure | None = None
    for attempt in range(max_retries + 1):
        if attempt == 0:
            prompt = base_prompt
        else:
            repair = REPAIR_INSTRUCTION.replace("<<ATTEMPT>>", str(attempt))
            prompt = f"{base_prompt}\n\n{repair}"
        result = gateway.complete_prompt(prompt)
        try:
            return parse_opinion(result.text, role)
        except ParseFailure as exc:
            last_failure = exc
            log.debug("opinion parse failed for %s (attempt %d): %s", role.value, attempt, exc)
    raise OpinionUnparseable(
        f"no parseable {role.value} opinion after {max_retries + 1} attempts: {last_failure}"
    )

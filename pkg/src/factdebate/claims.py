"""Claim detection: decompose a model response into atomic verifiable claims.

Task-specific preprocessing mirrors how each task is evaluated:

* Dialogue responses are first stripped of purely subjective sentences; a
  response that is all pleasantries yields no verifiable content.
* Short question-answering replies (single entities and the like) are not
  decomposed at all: the question and answer are concatenated into one
  claim, with no model call.
* Everything else goes through LLM decomposition into a JSON array of
  atomic claim strings.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .gateway import Gateway
from .model import Claim, FactDebateError, TaskKind
from .parsing import first_array
from .personas import load_template

log = logging.getLogger(__name__)

# Answers at most this many whitespace-separated tokens long, with no
# sentence boundary inside them, are verified as one question+answer claim.
SIMPLE_ANSWER_MAX_TOKENS = 8

# Additional attempts after a malformed structured reply.
STRUCTURED_OUTPUT_RETRIES = 3

ARRAY_REPAIR_INSTRUCTION = (
    "Your previous reply could not be parsed. Respond with ONLY a JSON array of "
    "strings and nothing else. This is repair attempt <<ATTEMPT>>."
)


class NoVerifiableContent(FactDebateError):
    """Preprocessing removed everything; nothing is left to verify."""


class MalformedClaims(FactDebateError):
    """The model never produced a parseable claim array."""


@dataclass(frozen=True)
class ResponseSample:
    """One model response to verify, with whatever the task supplies."""

    response_id: str
    task_kind: TaskKind
    response_text: str
    question: str | None = None
    dialogue_history: str | None = None
    provided_knowledge: str | None = None

    def __post_init__(self) -> None:
        if self.task_kind == TaskKind.QA and not (self.question or "").strip():
            raise ValueError("QA samples must carry a question")
        if self.task_kind == TaskKind.DIALOGUE and not (self.dialogue_history or "").strip():
            raise ValueError("dialogue samples must carry a dialogue history")


def parse_response_sample(data: dict) -> ResponseSample:
    """Build a sample from its JSON object form (the CLI input format)."""
    return ResponseSample(
        response_id=data["response_id"],
        task_kind=TaskKind(data["task_kind"]),
        response_text=data["response_text"],
        question=data.get("question"),
        dialogue_history=data.get("dialogue_history"),
        provided_knowledge=data.get("provided_knowledge"),
    )


def compose_qa_claim(
    question: str,
    answer: str,
    claim_id: str = "qa",
    source_response_id: str = "",
    context: str | None = None,
) -> Claim:
    """Concatenate a question and its short answer into a single claim.

    No model call is involved; the claim text is the question, one space,
    then the answer.
    """
    if not question or not answer:
        raise ValueError("question and answer must both be non-empty")
    return Claim(
        id=claim_id,
        text=f"{question} {answer}",
        source_response_id=source_response_id,
        task_kind=TaskKind.QA,
        context=context,
    )


_MID_TERMINAL = re.compile(r"[.?!]\s+\S")


def is_simple_answer(answer: str) -> bool:
    """Heuristic for answers verified as a QA pair instead of decomposed."""
    tokens = answer.split()
    if len(tokens) > SIMPLE_ANSWER_MAX_TOKENS:
        return False
    return _MID_TERMINAL.search(answer.strip()) is None


def strip_subjective(text: str, gateway: Gateway) -> str | None:
    """Remove purely subjective sentences; None when nothing factual remains."""
    if not text.strip():
        raise ValueError("text must be non-empty")
    prompt = load_template("subjective_filter.txt").replace("<<TEXT>>", text)
    reply = gateway.complete_prompt(prompt).text.strip()
    if not reply or reply.casefold() == "none":
        return None
    return reply


def _decompose(text: str, gateway: Gateway) -> list[str]:
    base_prompt = load_template("claim_extraction.txt").replace("<<TEXT>>", text)
    for attempt in range(STRUCTURED_OUTPUT_RETRIES + 1):
        if attempt == 0:
            prompt = base_prompt
        else:
            repair = ARRAY_REPAIR_INSTRUCTION.replace("<<ATTEMPT>>", str(attempt))
            prompt = f"{base_prompt}\n\n{repair}"
        reply = gateway.complete_prompt(prompt).text
        parsed = first_array(reply)
        if parsed is not None and all(isinstance(c, str) and c.strip() for c in parsed):
            return [c.strip() for c in parsed]
        log.debug("claim array parse failed (attempt %d)", attempt)
    raise MalformedClaims(
        f"no parseable claim array after {STRUCTURED_OUTPUT_RETRIES + 1} attempts"
    )


def extract_claims(sample: ResponseSample, gateway: Gateway) -> list[Claim]:
    """Turn a response into atomic claims, applying task-specific handling."""
    if not sample.response_text.strip():
        raise ValueError("response_text must be non-empty")

    context: str | None = None
    if sample.task_kind == TaskKind.QA:
        context = sample.question
        assert sample.question is not None
        if is_simple_answer(sample.response_text):
            return [
                compose_qa_claim(
                    sample.question,
                    sample.response_text.strip(),
                    claim_id=f"{sample.response_id}/c1",
                    source_response_id=sample.response_id,
                )
            ]
        text = sample.response_text
    elif sample.task_kind == TaskKind.DIALOGUE:
        context = sample.dialogue_history
        retained = strip_subjective(sample.response_text, gateway)
        if retained is None:
            raise NoVerifiableContent(
                f"response {sample.response_id} carries only subjective content"
            )
        text = retained
    else:
        text = sample.response_text

    statements = _decompose(text, gateway)
    if not statements:
        raise NoVerifiableContent(f"response {sample.response_id} yielded no claims")
    return [
        Claim(
            id=f"{sample.response_id}/c{i + 1}",
            text=statement,
            source_response_id=sample.response_id,
            task_kind=sample.task_kind,
            context=context,
        )
        for i, statement in enumerate(statements)
    ]

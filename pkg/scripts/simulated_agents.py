"""A deterministic role-aware judge for offline experiments.

``SimulatedJudge`` is a drop-in completion backend that imitates noisy
debate agents without any provider. It reads the role header and the claim
from each rendered prompt and answers with a stance drawn from
role-dependent probabilities: the trust agent tends to follow its
predecessor, the skeptic tends to challenge, the leader is the most
accurate. Stances are decided by hashing (seed, claim, role, turn, prior),
so identical situations resolve identically across runs and across
transition policies; differences between policies come from the situations
the policies create, not from random drift.
"""

from __future__ import annotations

import hashlib
import json
import re

from factdebate.gateway import CompletionRequest, CompletionResult

_ROLE_HEADER = re.compile(r"You are the \*(Initial|Trust|Skeptic|Leader)\* agent")
_CLAIM_LINE = re.compile(r"^\[text\]: (.*)$", re.MULTILINE)

# P(correct about the gold label) per role, used when a role judges afresh.
ACCURACY = {"Initial": 0.68, "Trust": 0.72, "Skeptic": 0.62, "Leader": 0.76}

# P(the trust agent simply adopts its predecessor's stance).
TRUST_FOLLOW = 0.75

# P(the skeptic states "non-factual"), by (prior stance, gold factual).
SKEPTIC_FLAGS = {
    (True, True): 0.45,   # challenges a factual claim the prior accepted
    (True, False): 0.80,  # catches the hallucination the prior missed
    (False, True): 0.40,
    (False, False): 0.75,
}


class SimulatedJudge:
    """Completion backend producing stateful, role-conditioned opinions."""

    def __init__(self, seed: int, golds: dict[str, bool]):
        self.seed = seed
        self.golds = dict(golds)
        self.calls = 0
        self._turn: dict[str, int] = {}
        self._last_stance: dict[str, bool] = {}

    def _chance(self, *key: object) -> float:
        material = "|".join(str(part) for part in (self.seed, *key))
        digest = hashlib.sha256(material.encode("utf-8")).hexdigest()
        return int(digest[:8], 16) / 0xFFFFFFFF

    def _stance(self, role: str, claim: str, gold: bool, prior: bool | None, turn: int) -> bool:
        draw = self._chance(claim, role, turn, prior)
        if role == "Trust" and prior is not None:
            if draw < TRUST_FOLLOW:
                return prior
            return gold if self._chance(claim, role, turn, "fresh") < ACCURACY[role] else not gold
        if role == "Skeptic" and prior is not None:
            return not (draw < SKEPTIC_FLAGS[(prior, gold)])
        return gold if draw < ACCURACY[role] else not gold

    def complete(self, request: CompletionRequest) -> CompletionResult:
        self.calls += 1
        role_match = _ROLE_HEADER.search(request.prompt)
        claim_match = _CLAIM_LINE.search(request.prompt)
        if not role_match or not claim_match:
            raise ValueError("prompt does not look like a debate prompt")
        role = role_match.group(1)
        claim = claim_match.group(1)
        gold = self.golds[claim]

        turn = self._turn.get(claim, 0)
        self._turn[claim] = turn + 1
        prior = self._last_stance.get(claim)
        stance = self._stance(role, claim, gold, prior, turn)
        self._last_stance[claim] = stance

        severity = 0 if stance else 2 + int(self._chance(claim, role, turn, "sev") * 4)
        text = (
            "The evidence supports the claim as written."
            if stance
            else "The evidence contradicts a checkable detail of the claim."
        )
        return CompletionResult(
            text=json.dumps(
                {"opinion": text, "factuality": stance, "Error severity": severity}
            ),
            provider_meta={"backend": "simulated-judge", "role": role},
        )

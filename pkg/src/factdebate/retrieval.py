"""Evidence retrieval: queries, search providers, and local sentence ranking.

Two routes produce ranked evidence for a claim:

* Web route: the model formulates two search queries, a provider returns
  ranked results per query, and the two result lists are merged rank-by-rank
  (first query first), deduplicated on normalized text, and cut to the
  evidence budget.
* Local route: when the dataset supplies knowledge, short knowledge passes
  whole as a single direct-evidence snippet; long knowledge is split into
  sentences and the top-k most similar sentences are selected.

The default similarity is a deterministic term-frequency cosine so the whole
pipeline runs offline; any ``scorer(query, sentence) -> float`` can be
plugged in instead.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import re
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from .gateway import Gateway
from .model import Claim, EvidenceSnippet, EvidenceSource, FactDebateError
from .parsing import first_array
from .personas import load_template

log = logging.getLogger(__name__)

# Provided knowledge below this many characters is passed whole as a single
# direct-evidence snippet; longer knowledge goes through local ranking.
DIRECT_KNOWLEDGE_LIMIT = 4000

QUERY_RETRIES = 3

QUERY_REPAIR_INSTRUCTION = (
    "Your previous reply could not be parsed. Respond with ONLY a JSON array of "
    "exactly two strings and nothing else. This is repair attempt <<ATTEMPT>>."
)


class MalformedQueries(FactDebateError):
    """The model never produced a well-formed two-query array."""


class ProviderError(FactDebateError):
    """The search provider failed after retries."""


@dataclass(frozen=True)
class QuerySet:
    """Exactly two search queries formulated for one claim."""

    claim_id: str
    queries: tuple[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "queries", tuple(self.queries))
        if len(self.queries) != 2 or not all(q.strip() for q in self.queries):
            raise ValueError("a query set holds exactly two non-empty queries")


@dataclass(frozen=True)
class SearchResult:
    title: str
    snippet: str
    url: str


class SearchProvider(Protocol):
    def search(self, query: str) -> list[SearchResult]: ...


def query_digest(query: str) -> str:
    return hashlib.sha256(query.encode("utf-8")).hexdigest()


class FixtureSearchProvider:
    """Serves canned search results, one JSON file per query digest.

    A missing fixture means the query had no recorded results and yields an
    empty list; zero results is not an error anywhere in retrieval.
    """

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)

    def _path(self, query: str) -> Path:
        return self.fixtures_dir / f"{query_digest(query)}.json"

    def record(self, query: str, results: Sequence[SearchResult]) -> Path:
        self.fixtures_dir.mkdir(parents=True, exist_ok=True)
        path = self._path(query)
        payload = {
            "query": query,
            "results": [
                {"title": r.title, "snippet": r.snippet, "url": r.url} for r in results
            ],
        }
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", "utf-8")
        return path

    def search(self, query: str) -> list[SearchResult]:
        path = self._path(query)
        if not path.exists():
            return []
        payload = json.loads(path.read_text(encoding="utf-8"))
        return [
            SearchResult(
                title=item.get("title", ""),
                snippet=item.get("snippet", ""),
                url=item.get("url", ""),
            )
            for item in payload.get("results", [])
        ]


class WebSearchProvider:
    """JSON-over-HTTP search adapter.

    Wire contract: GET ``endpoint?q=<query>`` (plus an API key header when
    configured) returning ``{"results": [{"title", "snippet", "url"}, ...]}``
    in provider-score order.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        max_retries: int = 3,
        backoff_base: float = 0.25,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._sleep = sleep
        headers = {"X-Api-Key": api_key} if api_key else {}
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def search(self, query: str) -> list[SearchResult]:
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._client.get(self.endpoint, params={"q": query})
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderError(f"search returned {response.status_code}")
                continue
            if response.status_code >= 400:
                raise ProviderError(
                    f"search rejected the request: {response.status_code} {response.text}"
                )
            items = response.json().get("results", [])
            return [
                SearchResult(
                    title=item.get("title", ""),
                    snippet=item.get("snippet", ""),
                    url=item.get("url", item.get("link", "")),
                )
                for item in items
            ]
        raise ProviderError(
            f"search unreachable after {self.max_retries + 1} attempts: {last_error}"
        )


def generate_queries(claim: Claim, gateway: Gateway, max_retries: int = QUERY_RETRIES) -> QuerySet:
    """Ask the model for exactly two search queries for a claim."""
    base_prompt = load_template("query_generation.txt").replace("<<CLAIM>>", claim.text)
    for attempt in range(max_retries + 1):
        if attempt == 0:
            prompt = base_prompt
        else:
            repair = QUERY_REPAIR_INSTRUCTION.replace("<<ATTEMPT>>", str(attempt))
            prompt = f"{base_prompt}\n\n{repair}"
        reply = gateway.complete_prompt(prompt).text
        parsed = first_array(reply)
        if (
            parsed is not None
            and len(parsed) == 2
            and all(isinstance(q, str) and q.strip() for q in parsed)
        ):
            return QuerySet(claim_id=claim.id, queries=(parsed[0].strip(), parsed[1].strip()))
        log.debug("query array parse failed (attempt %d)", attempt)
    raise MalformedQueries(f"no two-query array after {max_retries + 1} attempts")


def _normalize_for_dedup(text: str) -> str:
    return " ".join(text.casefold().split())


def fetch_web_evidence(
    queries: QuerySet, provider: SearchProvider, k: int
) -> list[EvidenceSnippet]:
    """Fetch and merge results for both queries into at most ``k`` snippets.

    The merge interleaves the two result lists by provider rank (first query
    first), drops duplicates by normalized snippet text keeping the first
    occurrence, and assigns contiguous ranks. Zero results is an empty list,
    not an error.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    per_query = [provider.search(q) for q in queries.queries]
    merged: list[SearchResult] = []
    for depth in range(max((len(r) for r in per_query), default=0)):
        for results in per_query:
            if depth < len(results):
                merged.append(results[depth])

    snippets: list[EvidenceSnippet] = []
    seen: set[str] = set()
    for result in merged:
        text = result.snippet or result.title
        if not text.strip():
            continue
        normalized = _normalize_for_dedup(text)
        if normalized in seen:
            continue
        seen.add(normalized)
        snippets.append(
            EvidenceSnippet(
                text=text,
                source=EvidenceSource.WEB_SEARCH,
                rank=len(snippets) + 1,
                origin_ref=result.url or None,
            )
        )
        if len(snippets) == k:
            break
    return snippets


# Tokens whose trailing period does not end a sentence. Honorifics, Latin
# reference abbreviations, and common measured/civic shorthands only; words
# like "etc." that legitimately end sentences are deliberately absent.
ABBREVIATIONS = frozenset(
    {
        "dr.", "mr.", "mrs.", "ms.", "prof.", "rev.", "gen.", "sen.", "rep.",
        "sr.", "jr.", "st.", "mt.", "no.", "fig.", "eq.", "vs.", "cf.",
        "al.", "e.g.", "i.e.", "u.s.", "u.k.", "d.c.", "inc.", "ltd.",
        "co.", "corp.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.",
        "aug.", "sep.", "sept.", "oct.", "nov.", "dec.", "approx.",
        "dept.", "est.",
    }
)

_BOUNDARY = re.compile(r"[.?!]+[\"'\)\]]*(?=\s|$)")


def _is_abbreviation_boundary(document: str, punct_start: int) -> bool:
    if document[punct_start] != ".":
        return False
    word_start = punct_start
    while word_start > 0 and not document[word_start - 1].isspace():
        word_start -= 1
    token = document[word_start : punct_start + 1]
    return token.casefold() in ABBREVIATIONS


def sentence_spans(document: str) -> list[tuple[int, int]]:
    """Character spans of sentences, splitting on terminal punctuation.

    A sentence ends at a run of ``. ? !`` (plus any closing quotes or
    brackets) followed by whitespace or end of text, unless the period
    belongs to a known abbreviation or a single-letter initial. Spans are
    trimmed of surrounding whitespace and cover the document in order.
    """
    spans: list[tuple[int, int]] = []
    start = 0
    for match in _BOUNDARY.finditer(document):
        if _is_abbreviation_boundary(document, match.start()):
            continue
        end = match.end()
        if document[start:end].strip():
            spans.append((start, end))
        start = end
    if document[start:].strip():
        spans.append((start, len(document)))
    trimmed = []
    for s, e in spans:
        while s < e and document[s].isspace():
            s += 1
        while e > s and document[e - 1].isspace():
            e -= 1
        trimmed.append((s, e))
    return trimmed


def split_sentences(document: str) -> list[str]:
    """Deterministic rule-based sentence segmentation, order-preserving."""
    return [document[s:e] for s, e in sentence_spans(document)]


_TOKEN = re.compile(r"\w+")


def _term_counts(text: str) -> Counter[str]:
    return Counter(_TOKEN.findall(text.casefold()))


def lexical_score(query: str, sentence: str) -> float:
    """Cosine similarity of term-frequency vectors in [0, 1].

    Tokens are lowercased and punctuation-stripped; empty inputs score 0.
    Symmetric in its arguments' token multisets and 1.0 exactly when the
    normalized vectors coincide.
    """
    a = _term_counts(query)
    b = _term_counts(sentence)
    if not a or not b:
        return 0.0
    dot = sum(count * b[token] for token, count in a.items())
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return min(1.0, dot / (norm_a * norm_b))


def rank_local_evidence(
    claim: Claim,
    sentences: Sequence[str],
    scorer: Callable[[str, str], float] = lexical_score,
    k: int = 10,
) -> list[EvidenceSnippet]:
    """Top-k sentences by similarity to the claim, ties kept in document order.

    The output is a prefix of the full sorted order: increasing ``k`` never
    reorders previously returned snippets.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = [(scorer(claim.text, sentence), i) for i, sentence in enumerate(sentences)]
    ordered = sorted(scored, key=lambda pair: (-pair[0], pair[1]))
    return [
        EvidenceSnippet(
            text=sentences[i],
            source=EvidenceSource.LOCAL_RANKED,
            rank=rank,
            origin_ref=f"sentence:{i}",
        )
        for rank, (_, i) in enumerate(ordered[:k], start=1)
    ]


def gather_evidence(
    claim: Claim,
    provided_knowledge: str | None,
    provider: SearchProvider | None,
    gateway: Gateway,
    k: int = 10,
    scorer: Callable[[str, str], float] = lexical_score,
) -> list[EvidenceSnippet]:
    """Produce the evidence set for one claim, choosing the route by inputs.

    Provided knowledge wins over web search; without either, the claim is
    debated on model knowledge alone (logged, empty evidence).
    """
    if provided_knowledge and provided_knowledge.strip():
        if len(provided_knowledge) < DIRECT_KNOWLEDGE_LIMIT:
            return [
                EvidenceSnippet(
                    text=provided_knowledge,
                    source=EvidenceSource.PROVIDED_KNOWLEDGE,
                    rank=1,
                )
            ]
        sentences = split_sentences(provided_knowledge)
        return rank_local_evidence(claim, sentences, scorer=scorer, k=k)
    if provider is not None:
        queries = generate_queries(claim, gateway)
        return fetch_web_evidence(queries, provider, k)
    log.info("claim %s has no knowledge source; debating on model knowledge", claim.id)
    return []

"""Attribute scoring of cleaned tweet text.

Two providers share one contract: an HTTP client speaking the comment-analysis
wire format, and a deterministic lexicon scorer for offline runs and tests.
Scores depend on the text alone; author and profile features never enter.
"""

from dataclasses import dataclass, field
from typing import Protocol

from ..errors import ParityError

MAX_ATTRIBUTES = 16

# Attribute set requested from the HTTP provider and emitted by the lexicon
# provider. Only TOXICITY drives decisions; the rest are carried opaquely.
DEFAULT_ATTRIBUTES = (
    "TOXICITY",
    "SEVERE_TOXICITY",
    "IDENTITY_ATTACK",
    "INSULT",
    "PROFANITY",
    "THREAT",
    "SEXUALLY_EXPLICIT",
    "FLIRTATION",
    "INFLAMMATORY",
    "OBSCENE",
    "SPAM",
)

SCORING_FAILED = "SCORING_FAILED"


@dataclass(frozen=True)
class AttributeScores:
    scores: dict[str, float]
    provider_id: str
    model_version: str

    def __post_init__(self):
        if "TOXICITY" not in self.scores:
            raise ParityError("MALFORMED_RESPONSE", "TOXICITY attribute is mandatory")
        if len(self.scores) > MAX_ATTRIBUTES:
            raise ParityError("MALFORMED_RESPONSE", f"more than {MAX_ATTRIBUTES} attributes")
        for name, value in self.scores.items():
            if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                raise ParityError("MALFORMED_RESPONSE", f"attribute {name} outside [0,1]: {value!r}")

    @property
    def toxicity(self) -> float:
        return self.scores["TOXICITY"]


@dataclass(frozen=True)
class LexiconScorerConfig:
    """Deterministic scorer: term -> weight, with a floor for unmatched text."""

    entries: dict[str, float] = field(default_factory=dict)
    floor: float = 0.01
    attributes: tuple[str, ...] = DEFAULT_ATTRIBUTES

    def __post_init__(self):
        if not 0.0 <= self.floor <= 1.0:
            raise ParityError("MALFORMED_RESPONSE", f"floor outside [0,1]: {self.floor}")
        for term, weight in self.entries.items():
            if not term:
                raise ParityError("MALFORMED_RESPONSE", "lexicon term is empty")
            if term != term.lower():
                raise ParityError("MALFORMED_RESPONSE", f"lexicon term not lowercase: {term!r}")
            if not 0.0 < weight <= 1.0:
                raise ParityError("MALFORMED_RESPONSE", f"weight for {term!r} outside (0,1]: {weight}")
        if "TOXICITY" not in self.attributes:
            raise ParityError("MALFORMED_RESPONSE", "attribute list must include TOXICITY")


def lexicon_score(text: str, config: LexiconScorerConfig) -> AttributeScores:
    """TOXICITY = max weight over entries whose term is a substring of the
    lowercased text, or the floor when nothing matches. Max (not sum) so a
    single strong term dominates. All other attributes mirror TOXICITY."""
    lowered = text.lower()
    matched = [w for term, w in config.entries.items() if term in lowered]
    toxicity = max(matched) if matched else config.floor
    return AttributeScores(
        scores={name: toxicity for name in config.attributes},
        provider_id="lexicon",
        model_version="1",
    )


class ScoreProvider(Protocol):
    def score(self, text: str) -> AttributeScores: ...


class LexiconProvider:
    """Pure, stateless provider over a LexiconScorerConfig."""

    def __init__(self, config: LexiconScorerConfig):
        self.config = config

    def score(self, text: str) -> AttributeScores:
        if not text:
            raise ParityError("EMPTY_TEXT", "cannot score empty text")
        return lexicon_score(text, self.config)


class CachingProvider:
    """Caches scores by exact scoring text for the length of a run."""

    def __init__(self, inner: ScoreProvider):
        self.inner = inner
        self._cache: dict[str, AttributeScores] = {}

    def score(self, text: str) -> AttributeScores:
        cached = self._cache.get(text)
        if cached is None:
            cached = self.inner.score(text)
            self._cache[text] = cached
        return cached

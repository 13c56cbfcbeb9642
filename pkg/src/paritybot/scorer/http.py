"""HTTP client for the comment-analysis wire contract.

The request and response bodies are canonical compact JSON so that recorded
fixtures can be compared byte-for-byte. Configuration comes from the
environment: SCORER_API_KEY and SCORER_BASE_URL.
"""

import os
import threading
import time
from typing import Callable

import requests

from ..common import compact_json
from ..errors import ParityError
from . import DEFAULT_ATTRIBUTES, AttributeScores

ANALYZE_PATH = "/v1alpha1/comments:analyze"

MAX_ATTEMPTS = 3
BACKOFF_INITIAL_SECONDS = 0.5


def build_request_body(text: str, attributes: tuple[str, ...] = DEFAULT_ATTRIBUTES) -> bytes:
    return compact_json(
        {
            "comment": {"text": text},
            "languages": ["en"],
            "requestedAttributes": {name: {} for name in attributes},
        }
    )


def build_response_body(scores: dict[str, float]) -> bytes:
    return compact_json(
        {
            "attributeScores": {
                name: {"summaryScore": {"value": value, "type": "PROBABILITY"}}
                for name, value in scores.items()
            },
            "languages": ["en"],
        }
    )


def parse_response_body(payload, attributes: tuple[str, ...]) -> dict[str, float]:
    if not isinstance(payload, dict) or "attributeScores" not in payload:
        raise ParityError("MALFORMED_RESPONSE", "response missing attributeScores")
    raw = payload["attributeScores"]
    if not isinstance(raw, dict):
        raise ParityError("MALFORMED_RESPONSE", "attributeScores is not an object")
    scores: dict[str, float] = {}
    for name in attributes:
        entry = raw.get(name)
        try:
            value = entry["summaryScore"]["value"]
        except (TypeError, KeyError):
            raise ParityError("MALFORMED_RESPONSE", f"attribute {name} missing summaryScore.value")
        if not isinstance(value, (int, float)):
            raise ParityError("MALFORMED_RESPONSE", f"attribute {name} value is not a number")
        scores[name] = float(value)
    return scores


class HttpScorerClient:
    """Client with bounded retries and an in-flight request cap.

    Transport failures and 5xx responses are retried with exponential
    backoff; a malformed body is not transient and fails immediately.
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        attributes: tuple[str, ...] = DEFAULT_ATTRIBUTES,
        max_in_flight: int = 4,
        timeout_seconds: float = 10.0,
        sleeper: Callable[[float], None] = time.sleep,
        session: requests.Session | None = None,
    ):
        self.base_url = (base_url or os.environ.get("SCORER_BASE_URL") or "").rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get("SCORER_API_KEY", "")
        if not self.base_url:
            raise ParityError("PROVIDER_UNAVAILABLE", "SCORER_BASE_URL is not configured")
        if "TOXICITY" not in attributes:
            raise ParityError("MALFORMED_RESPONSE", "attribute list must include TOXICITY")
        self.attributes = attributes
        self.timeout_seconds = timeout_seconds
        self._sleep = sleeper
        self._gate = threading.Semaphore(max_in_flight)
        self._session = session or requests.Session()

    def score(self, text: str) -> AttributeScores:
        if not text:
            raise ParityError("EMPTY_TEXT", "cannot score empty text")
        body = build_request_body(text, self.attributes)
        response = self._post_with_retries(body)
        try:
            payload = response.json()
        except ValueError:
            raise ParityError("MALFORMED_RESPONSE", "response body is not JSON")
        scores = parse_response_body(payload, self.attributes)
        return AttributeScores(scores=scores, provider_id="perspective-http", model_version="v1alpha1")

    def _post_with_retries(self, body: bytes) -> requests.Response:
        url = self.base_url + ANALYZE_PATH
        delay = BACKOFF_INITIAL_SECONDS
        last_error = "no attempt made"
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                with self._gate:
                    response = self._session.post(
                        url,
                        params={"key": self.api_key},
                        data=body,
                        headers={"Content-Type": "application/json"},
                        timeout=self.timeout_seconds,
                    )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code == 200:
                    return response
                if 400 <= response.status_code < 500:
                    raise ParityError(
                        "PROVIDER_UNAVAILABLE",
                        f"provider rejected the request: HTTP {response.status_code}",
                    )
                last_error = f"HTTP {response.status_code}"
            if attempt < MAX_ATTEMPTS:
                self._sleep(delay)
                delay *= 2
        raise ParityError("PROVIDER_UNAVAILABLE", f"scoring failed after {MAX_ATTEMPTS} attempts ({last_error})")

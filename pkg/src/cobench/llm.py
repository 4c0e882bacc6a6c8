"""Chat-completion clients: a provider-agnostic HTTP client and a replay client.

The HTTP client speaks a single chat-completion shape with per-provider
adapters mapping field names (openai-style and anthropic-style bodies are
built in).  API keys are read from the environment at request time and are
never stored on the endpoint or written to logs.  The replay client feeds
canned responses in order and makes campaigns a pure function of
(fixtures, config).
"""

from __future__ import annotations

import json
import logging
import random
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

import requests

logger = logging.getLogger(__name__)

BACKOFF_BASE_S = 1.0
BACKOFF_FACTOR = 2.0


class EndpointError(Exception):
    """The model endpoint failed after exhausting retries."""


class EndpointAuthError(EndpointError):
    """Authentication was rejected; retrying cannot help."""


class ReplayExhaustedError(EndpointError):
    """The replay fixture ran out of canned responses."""


@dataclass(frozen=True)
class ChatTurn:
    role: str       # system | user | assistant
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown chat role {self.role!r}")


def validate_turns(turns: list[ChatTurn]) -> None:
    if not turns:
        raise ValueError("chat needs at least one turn")
    if turns[0].role != "system":
        raise ValueError("first turn must be the system prompt")
    expected = "user"
    for turn in turns[1:]:
        if turn.role != expected:
            raise ValueError("turns after the system prompt must alternate user/assistant")
        expected = "assistant" if expected == "user" else "user"


@dataclass(frozen=True)
class ModelEndpoint:
    base_url: str
    model: str
    provider: str = "openai"
    api_key_env: str = "COBENCH_API_KEY"
    request_timeout_s: float = 120.0
    max_retries: int = 5


@dataclass(frozen=True)
class UsageRecord:
    prompt_tokens: int = 0
    completion_tokens: int = 0


class ChatClient(Protocol):
    def complete(self, turns: list[ChatTurn], temperature: float, n_samples: int = 1) -> list[str]:
        ...


def estimate_cost(
    usages: list[UsageRecord],
    price_in_per_million: Optional[float],
    price_out_per_million: Optional[float],
) -> Optional[float]:
    """Dollar estimate of the recorded usage; None when prices are missing."""
    if price_in_per_million is None or price_out_per_million is None:
        warnings.warn("token prices not configured; cost estimate omitted", stacklevel=2)
        return None
    total_in = sum(u.prompt_tokens for u in usages)
    total_out = sum(u.completion_tokens for u in usages)
    return (total_in * price_in_per_million + total_out * price_out_per_million) / 1e6


class ReplayClient:
    """Deterministic client replaying an ordered list of canned responses.

    Fixture format: a JSON array of response strings, or an object with a
    ``responses`` array, in one file per campaign.
    """

    def __init__(self, responses: list[str]):
        self._responses = list(responses)
        self._cursor = 0
        self.usage: list[UsageRecord] = []

    @staticmethod
    def from_file(path: Path) -> "ReplayClient":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(doc, dict):
            doc = doc["responses"]
        if not isinstance(doc, list) or not all(isinstance(r, str) for r in doc):
            raise ValueError("replay fixture must be a JSON array of response strings")
        return ReplayClient(doc)

    def complete(self, turns: list[ChatTurn], temperature: float, n_samples: int = 1) -> list[str]:
        validate_turns(turns)
        if self._cursor + n_samples > len(self._responses):
            raise ReplayExhaustedError(
                f"replay fixture exhausted at response {self._cursor} "
                f"(requested {n_samples}, have {len(self._responses) - self._cursor})"
            )
        batch = self._responses[self._cursor : self._cursor + n_samples]
        self._cursor += n_samples
        return batch


class HttpChatClient:
    """Minimal chat-completion client with retry/backoff."""

    def __init__(self, endpoint: ModelEndpoint, session: Optional[requests.Session] = None,
                 sleep=time.sleep, rng: Optional[random.Random] = None):
        self.endpoint = endpoint
        self.session = session or requests.Session()
        self.usage: list[UsageRecord] = []
        self._sleep = sleep
        self._rng = rng or random.Random()

    def complete(self, turns: list[ChatTurn], temperature: float, n_samples: int = 1) -> list[str]:
        validate_turns(turns)
        if not 0.0 <= temperature <= 1.0:
            raise ValueError("temperature must lie in [0, 1]")
        if n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.endpoint.provider == "anthropic":
            # The anthropic-style body has no n parameter; issue n requests.
            out = []
            for _ in range(n_samples):
                out.extend(self._request(turns, temperature, 1))
            return out
        return self._request(turns, temperature, n_samples)

    # -- internals -----------------------------------------------------------

    def _api_key(self) -> str:
        import os

        key = os.environ.get(self.endpoint.api_key_env, "")
        if not key:
            raise EndpointAuthError(
                f"environment variable {self.endpoint.api_key_env} is not set"
            )
        return key

    def _build_request(self, turns: list[ChatTurn], temperature: float, n_samples: int):
        provider = self.endpoint.provider
        if provider == "anthropic":
            url = self.endpoint.base_url.rstrip("/") + "/messages"
            headers = {
                "x-api-key": self._api_key(),
                "anthropic-version": "2023-06-01",
                "content-type": "application/json",
            }
            body = {
                "model": self.endpoint.model,
                "system": turns[0].content,
                "messages": [
                    {"role": t.role, "content": t.content} for t in turns[1:]
                ],
                "temperature": temperature,
                "max_tokens": 8192,
            }
        elif provider == "openai":
            url = self.endpoint.base_url.rstrip("/") + "/chat/completions"
            headers = {
                "Authorization": f"Bearer {self._api_key()}",
                "content-type": "application/json",
            }
            body = {
                "model": self.endpoint.model,
                "messages": [{"role": t.role, "content": t.content} for t in turns],
                "temperature": temperature,
                "n": n_samples,
            }
        else:
            raise ValueError(f"unknown provider {provider!r}")
        return url, headers, body

    def _parse_response(self, doc: dict, n_samples: int) -> list[str]:
        if self.endpoint.provider == "anthropic":
            texts = ["".join(part.get("text", "") for part in doc.get("content", []))]
            usage = doc.get("usage", {})
            self.usage.append(
                UsageRecord(
                    prompt_tokens=int(usage.get("input_tokens", 0)),
                    completion_tokens=int(usage.get("output_tokens", 0)),
                )
            )
        else:
            choices = doc.get("choices", [])
            texts = [c.get("message", {}).get("content", "") for c in choices]
            usage = doc.get("usage", {})
            self.usage.append(
                UsageRecord(
                    prompt_tokens=int(usage.get("prompt_tokens", 0)),
                    completion_tokens=int(usage.get("completion_tokens", 0)),
                )
            )
        if len(texts) < n_samples:
            raise EndpointError(
                f"endpoint returned {len(texts)} completions, expected {n_samples}"
            )
        return texts[:n_samples]

    def _request(self, turns: list[ChatTurn], temperature: float, n_samples: int) -> list[str]:
        url, headers, body = self._build_request(turns, temperature, n_samples)
        last_error: Exception | None = None
        for attempt in range(self.endpoint.max_retries):
            try:
                resp = self.session.post(
                    url, headers=headers, json=body, timeout=self.endpoint.request_timeout_s
                )
                if resp.status_code in (401, 403):
                    raise EndpointAuthError(f"authentication rejected ({resp.status_code})")
                if resp.status_code == 429 or resp.status_code >= 500:
                    raise _TransientHttpError(f"HTTP {resp.status_code}")
                resp.raise_for_status()
                return self._parse_response(resp.json(), n_samples)
            except EndpointAuthError:
                raise
            except (_TransientHttpError, requests.ConnectionError, requests.Timeout) as exc:
                last_error = exc
                if attempt + 1 < self.endpoint.max_retries:
                    delay = BACKOFF_BASE_S * (BACKOFF_FACTOR ** attempt)
                    delay += self._rng.uniform(0, BACKOFF_BASE_S)
                    logger.warning("endpoint error (%s); retrying in %.1fs", exc, delay)
                    self._sleep(delay)
            except (requests.RequestException, ValueError, KeyError) as exc:
                raise EndpointError(f"malformed endpoint response: {exc}") from exc
        raise EndpointError(f"endpoint failed after {self.endpoint.max_retries} attempts: {last_error}")


class _TransientHttpError(Exception):
    pass

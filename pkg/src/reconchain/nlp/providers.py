"""Completion providers: an OpenAI-compatible HTTP client and a deterministic stub."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Protocol

from ..errors import ProviderError

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-3.5-turbo-16k"


@dataclass(frozen=True)
class ProviderParams:
    model_name: str = DEFAULT_MODEL
    temperature: float = 0.2
    max_output_tokens: int = 1024
    request_timeout: float = 120.0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be within [0, 2], got {self.temperature}")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")


class CompletionProvider(Protocol):
    def complete(self, context_message: str, user_message: str, params: ProviderParams) -> str: ...


class RemoteProvider:
    """Chat-completion endpoint; each call is a fresh two-message conversation."""

    def __init__(self, api_key: str, endpoint: str = DEFAULT_ENDPOINT, post: Callable | None = None):
        self.api_key = api_key
        self.endpoint = endpoint
        self._post = post

    def complete(self, context_message: str, user_message: str, params: ProviderParams) -> str:
        post = self._post
        if post is None:
            import requests

            post = requests.post
        payload = {
            "model": params.model_name,
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
            "messages": [
                {"role": "system", "content": context_message},
                {"role": "user", "content": user_message},
            ],
        }
        try:
            resp = post(
                self.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=params.request_timeout,
            )
        except Exception as exc:
            raise ProviderError(f"completion request failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(f"completion endpoint returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"].strip()
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected completion payload: {exc}") from exc


class StubProvider:
    """Offline provider whose answer is a pure function of its inputs.

    The reply is the first line of the context message followed by the user
    message echoed as a bullet list.
    """

    model_name = "stub"

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = 0

    def complete(self, context_message: str, user_message: str, params: ProviderParams) -> str:
        with self._lock:
            self.calls += 1
        heading = next((l.strip() for l in context_message.splitlines() if l.strip()), "")
        bullets = [f"- {line.strip()}" for line in user_message.splitlines() if line.strip()]
        return "\n".join([f"[{params.model_name}] {heading}", *bullets])

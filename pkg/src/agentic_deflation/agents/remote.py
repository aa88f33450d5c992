"""Agents backed by a chat-completions-style HTTP endpoint.

Request body::

    {"model": ..., "messages": [{"role": ..., "content": [
        {"type": "text", "text": ...},
        {"type": "image", "base64": ..., "mime": ...}]}]}

The reply is read from ``choices[0].message.content``; either a string or a
list of typed parts (the first ``text`` part wins).
"""
import base64
import logging
import os
import time
from dataclasses import dataclass

import requests

from ..matrix import quantize_u8, render_pgm, render_png
from ..rank1 import reconstruct
from .parsing import VerdictParseError, parse_rank1_response, parse_verdict
from .prompts import RANK1_INSTRUCTION, STOP_INSTRUCTION, build_solver_prompt

__all__ = [
    "DEFAULT_API_KEY_ENV",
    "RemoteError",
    "RemoteConfigError",
    "RemoteTransportError",
    "RemoteProtocolError",
    "RemoteEndpointConfig",
    "user_message",
    "image_part",
    "remote_chat",
    "RemoteSolver",
    "RemoteRank1Evaluator",
    "RemoteStopEvaluator",
]

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "DEFLATE_AGENT_API_KEY"


class RemoteError(RuntimeError):
    pass


class RemoteConfigError(RemoteError):
    pass


class RemoteTransportError(RemoteError):
    pass


class RemoteProtocolError(RemoteError):
    pass


@dataclass(frozen=True)
class RemoteEndpointConfig:
    base_url: str
    model_name: str
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0          # seconds; doubles per retry
    image_format: str = "png"     # "png" or "pgm"
    image_scale: int = 8

    def __post_init__(self):
        if self.max_retries < 0:
            raise RemoteConfigError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise RemoteConfigError("timeout must be > 0")
        if self.image_format not in ("png", "pgm"):
            raise RemoteConfigError(f"unsupported image_format {self.image_format!r}")

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def image_part(matrix, fmt="png", scale=8):
    """(bytes, mime) for a matrix, quantized to 8 bits first."""
    q = quantize_u8(matrix)
    if fmt == "png":
        return render_png(q, scale), "image/png"
    return render_pgm(q, scale), "image/x-portable-graymap"


def user_message(text, images=()):
    return {"role": "user", "text": text, "images": list(images)}


def _content(msg):
    parts = [{"type": "text", "text": msg["text"]}] if msg.get("text") else []
    for data, mime in msg.get("images", ()):
        parts.append({"type": "image", "base64": base64.b64encode(data).decode("ascii"),
                      "mime": mime})
    return parts


def _reply_text(payload):
    try:
        content = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise RemoteProtocolError("response has no choices[0].message.content") from None
    if isinstance(content, str):
        return content
    if isinstance(content, list):
        for part in content:
            if isinstance(part, dict) and part.get("type") == "text":
                return part.get("text", "")
    raise RemoteProtocolError("response content has no text part")


def remote_chat(config, messages, session=None):
    """POST ``messages`` to the endpoint and return the first reply text.

    5xx responses, timeouts and connection failures are retried up to
    ``config.max_retries`` times with exponential backoff.
    """
    key = os.environ.get(config.api_key_env)
    if not key:
        raise RemoteConfigError(f"API key environment variable {config.api_key_env} is not set")
    body = {
        "model": config.model_name,
        "messages": [{"role": m["role"], "content": _content(m)} for m in messages],
    }
    headers = {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}
    post = (session or requests).post

    for attempt in range(config.max_retries + 1):
        try:
            resp = post(config.base_url, json=body, headers=headers, timeout=config.timeout)
        except (requests.Timeout, requests.ConnectionError) as err:
            problem = f"{type(err).__name__}: {err}"
        else:
            if resp.status_code < 400:
                try:
                    payload = resp.json()
                except ValueError:
                    raise RemoteProtocolError(
                        f"non-JSON response from {config.base_url}: {resp.text[:200]!r}"
                    ) from None
                return _reply_text(payload)
            if resp.status_code < 500:
                raise RemoteTransportError(
                    f"HTTP {resp.status_code} from {config.base_url}: {resp.text[:200]}"
                )
            problem = f"HTTP {resp.status_code}"
        if attempt == config.max_retries:
            break
        delay = config.backoff * 2 ** attempt
        log.warning("retry %d/%d after %s (sleeping %.2fs)",
                    attempt + 1, config.max_retries, problem, delay)
        time.sleep(delay)
    raise RemoteTransportError(
        f"{config.base_url}: giving up after {config.max_retries} retries ({problem})"
    )


class _RemoteAgent:
    def __init__(self, config, session=None):
        self.config = config
        self.session = session

    def _chat(self, text, images=()):
        return remote_chat(self.config, [user_message(text, images)], self.session)

    def _image(self, m):
        return image_part(m, self.config.image_format, self.config.image_scale)

    def _verdict(self, text, images, mode):
        for attempt in range(self.config.max_retries + 1):
            try:
                return parse_verdict(self._chat(text, images), mode)
            except VerdictParseError:
                if attempt == self.config.max_retries:
                    raise


class RemoteSolver(_RemoteAgent):
    def __init__(self, config, icl=(), session=None):
        super().__init__(config, session)
        self.icl = list(icl)

    def propose(self, m):
        reply = self._chat(build_solver_prompt(m, self.icl))
        return parse_rank1_response(reply, *m.shape)


class RemoteRank1Evaluator(_RemoteAgent):
    def evaluate(self, m, proposal):
        approx = reconstruct(proposal, *m.shape)
        return self._verdict(RANK1_INSTRUCTION, [self._image(m), self._image(approx)], "rank1")


class RemoteStopEvaluator(_RemoteAgent):
    def evaluate(self, original, current):
        return self._verdict(STOP_INSTRUCTION,
                             [self._image(original), self._image(current)], "stop")

import base64
import logging

import numpy as np
import pytest

from agentic_deflation.agents import (
    RemoteConfigError,
    RemoteEndpointConfig,
    RemoteProtocolError,
    RemoteRank1Evaluator,
    RemoteSolver,
    RemoteStopEvaluator,
    RemoteTransportError,
    Verdict,
    VerdictParseError,
    build_icl_examples,
    build_solver_prompt,
    remote_chat,
)
from agentic_deflation.agents.remote import user_message
from agentic_deflation.matrix import quantize_u8, render_pgm, render_png
from agentic_deflation.rank1 import Rank1Update, reconstruct
from stub_server import StubServer, completion


@pytest.fixture(autouse=True)
def api_key(monkeypatch):
    monkeypatch.setenv("DEFLATE_AGENT_API_KEY", "test-key")


def config(url, **kw):
    kw.setdefault("backoff", 0.01)
    kw.setdefault("timeout", 5)
    return RemoteEndpointConfig(base_url=url, model_name="stub-model", **kw)


def test_echo_verbatim():
    with StubServer([completion("fixed reply {with} braces")]) as srv:
        assert remote_chat(config(srv.url), [user_message("hi")]) == "fixed reply {with} braces"
    req = srv.requests[0]
    assert req["headers"]["Authorization"] == "Bearer test-key"
    assert req["body"] == {"model": "stub-model", "messages": [
        {"role": "user", "content": [{"type": "text", "text": "hi"}]}]}


def test_content_parts_reply():
    body = '{"choices": [{"message": {"content": [{"type": "image"}, {"type": "text", "text": "ok"}]}}]}'
    with StubServer([(200, body)]) as srv:
        assert remote_chat(config(srv.url), [user_message("hi")]) == "ok"


def test_retries_then_success(caplog):
    with StubServer([(500, "boom"), (503, "busy"), completion("done")]) as srv:
        with caplog.at_level(logging.WARNING, logger="agentic_deflation.agents.remote"):
            out = remote_chat(config(srv.url, max_retries=3), [user_message("x")])
    assert out == "done"
    assert len(srv.requests) == 3
    retries = [r for r in caplog.records if "retry" in r.getMessage()]
    assert len(retries) == 2


def test_retries_exhausted():
    with StubServer([(500, "boom")]) as srv:
        with pytest.raises(RemoteTransportError, match="2 retries"):
            remote_chat(config(srv.url, max_retries=2), [user_message("x")])
    assert len(srv.requests) == 3


def test_timeout_is_retried():
    with StubServer([("sleep", 0.5, completion("late")), completion("fast")]) as srv:
        out = remote_chat(config(srv.url, timeout=0.2, max_retries=1), [user_message("x")])
    assert out == "fast"


def test_client_error_not_retried():
    with StubServer([(401, "nope")]) as srv:
        with pytest.raises(RemoteTransportError, match="401"):
            remote_chat(config(srv.url, max_retries=3), [user_message("x")])
    assert len(srv.requests) == 1


def test_non_json_is_protocol_error():
    with StubServer([(200, "<html>not json</html>")]) as srv:
        with pytest.raises(RemoteProtocolError):
            remote_chat(config(srv.url), [user_message("x")])


def test_missing_choices_is_protocol_error():
    with StubServer([(200, '{"id": 1}')]) as srv:
        with pytest.raises(RemoteProtocolError):
            remote_chat(config(srv.url), [user_message("x")])


def test_missing_key(monkeypatch):
    monkeypatch.delenv("DEFLATE_AGENT_API_KEY")
    with pytest.raises(RemoteConfigError, match="DEFLATE_AGENT_API_KEY"):
        remote_chat(config("http://127.0.0.1:9"), [user_message("x")])


def test_custom_key_env(monkeypatch):
    with pytest.raises(RemoteConfigError, match="MY_KEY"):
        remote_chat(config("http://127.0.0.1:9", api_key_env="MY_KEY"), [user_message("x")])


@pytest.mark.parametrize("kw", [dict(max_retries=-1), dict(timeout=0), dict(image_format="jpg")])
def test_config_validation(kw):
    with pytest.raises(RemoteConfigError):
        config("http://x", **kw)


def test_solver_sends_prompt_and_parses():
    m = np.array([[10.0, 0.0], [0.0, 3.0]])
    icl = build_icl_examples(1, (2, 2), seed=0)
    with StubServer([completion('Answer: {"s": 10, "u": [1, 0], "v": [1, 0]}')]) as srv:
        t = RemoteSolver(config(srv.url), icl).propose(m)
    assert t.s == 10
    assert srv.requests[0]["body"]["messages"][0]["content"][0]["text"] == \
        build_solver_prompt(m, icl)


def _images(req):
    parts = req["body"]["messages"][0]["content"]
    return [(base64.b64decode(p["base64"]), p["mime"]) for p in parts if p["type"] == "image"]


@pytest.mark.parametrize("fmt, render, mime", [("png", render_png, "image/png"),
                                               ("pgm", render_pgm, "image/x-portable-graymap")])
def test_rank1_payload_bytes(rng, fmt, render, mime):
    m = np.floor(rng.uniform(0, 256, size=(6, 5)))
    prop = Rank1Update(300.0, np.ones(6) / np.sqrt(6), np.ones(5) / np.sqrt(5))
    with StubServer([completion("ACCEPT looks right")]) as srv:
        v = RemoteRank1Evaluator(config(srv.url, image_format=fmt)).evaluate(m, prop)
    assert v.kind is Verdict.ACCEPT
    imgs = _images(srv.requests[0])
    assert imgs == [(render(m, 8), mime), (render(quantize_u8(reconstruct(prop)), 8), mime)]


def test_stop_payload_and_requery(rng):
    orig = np.floor(rng.uniform(0, 256, size=(4, 4)))
    cur = orig / 4
    with StubServer([completion("hmm, unsure"), completion("STOP, only noise")]) as srv:
        v = RemoteStopEvaluator(config(srv.url, max_retries=2)).evaluate(orig, cur)
    assert v.kind is Verdict.STOP
    assert len(srv.requests) == 2
    assert _images(srv.requests[1]) == [(render_png(orig, 8), "image/png"),
                                        (render_png(quantize_u8(cur), 8), "image/png")]


def test_verdict_requery_exhausted(rng):
    with StubServer([completion("no idea")]) as srv:
        with pytest.raises(VerdictParseError):
            RemoteStopEvaluator(config(srv.url, max_retries=1)).evaluate(
                np.ones((2, 2)), np.ones((2, 2)))
    assert len(srv.requests) == 2

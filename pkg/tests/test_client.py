import json

import httpx
import pytest

from loire.llm.client import (
    CallableClient,
    ClientError,
    CompletionRequest,
    HttpChatClient,
    MissingFixtureError,
    ReplayClient,
    RetryingClient,
    TransientClientError,
    record_fixture,
)


def req(prompt="hello", **kw):
    return CompletionRequest.from_prompt("gpt-4", prompt, **kw)


def test_request_validation():
    with pytest.raises(ValueError):
        CompletionRequest("gpt-4", ())
    with pytest.raises(ValueError):
        CompletionRequest("gpt-4", (("assistant", "hi"),))
    with pytest.raises(ValueError):
        CompletionRequest("gpt-4", (("robot", "hi"),))
    with pytest.raises(ValueError):
        req(temperature=-0.1)
    ok = CompletionRequest("gpt-4", (("system", "be terse"), ("user", "hi")))
    assert ok.prompt == "hi"


def test_payload_and_fingerprint():
    a = req("x", logit_bias={"Person": 5.0})
    payload = a.to_payload()
    assert payload["messages"] == [{"role": "user", "content": "x"}]
    assert payload["logit_bias"] == {"Person": 5.0}
    assert "logit_bias" not in req("x").to_payload()
    assert a.fingerprint() == req("x", logit_bias={"Person": 5.0}).fingerprint()
    assert a.fingerprint() != req("x").fingerprint()
    assert req("x", temperature=0.0).fingerprint() != req("x").fingerprint()


class Flaky:
    supports_logit_bias = False

    def __init__(self, failures, exc=TransientClientError):
        self.failures = failures
        self.exc = exc
        self.calls = 0

    def complete(self, request):
        self.calls += 1
        if self.calls <= self.failures:
            raise self.exc("boom")
        return "ok"


def test_retry_then_success():
    sleeps = []
    inner = Flaky(2)
    client = RetryingClient(inner, max_attempts=5, base_delay=1.0, sleep=sleeps.append)
    assert client.complete(req()) == "ok"
    assert inner.calls == 3
    assert len(sleeps) == 2
    # exponential backoff with jitter in [0, base_delay)
    assert 1.0 <= sleeps[0] < 2.0 and 2.0 <= sleeps[1] < 3.0


def test_retry_gives_up_after_max_attempts():
    inner = Flaky(100)
    client = RetryingClient(inner, max_attempts=5, sleep=lambda s: None)
    with pytest.raises(ClientError):
        client.complete(req())
    assert inner.calls == 5


def test_non_transient_errors_are_not_retried():
    inner = Flaky(1, exc=ClientError)
    client = RetryingClient(inner, sleep=lambda s: None)
    with pytest.raises(ClientError):
        client.complete(req())
    assert inner.calls == 1


def test_retry_jitter_is_seeded():
    def delays(seed):
        out = []
        RetryingClient(Flaky(3), seed=seed, sleep=out.append).complete(req())
        return out

    assert delays(3) == delays(3)


def _http_client(handler, monkeypatch, key="sk-test"):
    if key is None:
        monkeypatch.delenv("TEST_KEY", raising=False)
    else:
        monkeypatch.setenv("TEST_KEY", key)
    return HttpChatClient("https://example.invalid/v1", "TEST_KEY",
                          transport=httpx.MockTransport(handler))


def test_http_client_success(monkeypatch):
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["auth"] = request.headers["Authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "True."}}]})

    client = _http_client(handler, monkeypatch)
    assert client.complete(req("q", max_tokens=7)) == "True."
    assert seen["url"] == "https://example.invalid/v1/chat/completions"
    assert seen["auth"] == "Bearer sk-test"
    assert seen["body"]["max_tokens"] == 7


@pytest.mark.parametrize("status, exc", [(429, TransientClientError), (503, TransientClientError),
                                         (400, ClientError)])
def test_http_client_status_errors(monkeypatch, status, exc):
    client = _http_client(lambda r: httpx.Response(status, text="nope"), monkeypatch)
    with pytest.raises(exc):
        client.complete(req())


def test_http_client_transport_error_is_transient(monkeypatch):
    def handler(request):
        raise httpx.ConnectError("down")

    with pytest.raises(TransientClientError):
        _http_client(handler, monkeypatch).complete(req())


def test_http_client_needs_key(monkeypatch):
    client = _http_client(lambda r: httpx.Response(200), monkeypatch, key=None)
    with pytest.raises(ClientError):
        client.complete(req())


def test_http_client_malformed_body(monkeypatch):
    client = _http_client(lambda r: httpx.Response(200, json={"nope": 1}), monkeypatch)
    with pytest.raises(ClientError):
        client.complete(req())


def test_replay_lookup_order(tmp_path):
    exact = req("exact prompt")
    record_fixture(tmp_path, exact, "from file")
    (tmp_path / "responses.jsonl").write_text(
        json.dumps({"hash": req("hashed").fingerprint(), "response": "from hash"}) + "\n"
        + json.dumps({"contains": ["alpha", "beta"], "response": "both"}) + "\n"
        + json.dumps({"endswith": "tail", "response": "anchored"}) + "\n"
        + json.dumps({"contains": "alpha", "response": "alpha only"}) + "\n"
    )
    client = ReplayClient(tmp_path)
    assert client.complete(exact) == "from file"
    assert client.complete(req("hashed")) == "from hash"
    assert client.complete(req("beta then alpha")) == "both"
    assert client.complete(req("alpha at the tail")) == "anchored"
    assert client.complete(req("alpha")) == "alpha only"
    with pytest.raises(MissingFixtureError):
        client.complete(req("unknown"))
    assert len(client.requests) == 6
    assert ReplayClient(tmp_path, default="dflt").complete(req("unknown")) == "dflt"


def test_callable_client():
    client = CallableClient(lambda r: r.prompt.upper(), supports_logit_bias=False)
    assert client.complete(req("abc")) == "ABC"
    assert client.requests[0].prompt == "abc"

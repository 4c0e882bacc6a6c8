from __future__ import annotations

import json

import pytest

from cobench import llm


def _turns() -> list[llm.ChatTurn]:
    return [llm.ChatTurn("system", "sys"), llm.ChatTurn("user", "hello")]


def test_replay_returns_responses_in_order():
    client = llm.ReplayClient([f"r{i}" for i in range(5)])
    got = [client.complete(_turns(), 0.0)[0] for _ in range(5)]
    assert got == ["r0", "r1", "r2", "r3", "r4"]


def test_replay_exhaustion_is_endpoint_error():
    client = llm.ReplayClient(["only"])
    client.complete(_turns(), 0.0)
    with pytest.raises(llm.EndpointError):
        client.complete(_turns(), 0.0)


def test_replay_n_samples_consumes_consecutive_entries():
    client = llm.ReplayClient(["a", "b", "c"])
    assert client.complete(_turns(), 0.0, n_samples=2) == ["a", "b"]
    assert client.complete(_turns(), 0.0, n_samples=1) == ["c"]


def test_replay_fixture_file_round_trip(tmp_path):
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps(["x", "y"]), encoding="utf-8")
    client = llm.ReplayClient.from_file(path)
    assert client.complete(_turns(), 0.0, 2) == ["x", "y"]
    path.write_text(json.dumps({"responses": ["z"]}), encoding="utf-8")
    assert llm.ReplayClient.from_file(path).complete(_turns(), 0.0) == ["z"]


def test_turn_validation():
    with pytest.raises(ValueError):
        llm.validate_turns([])
    with pytest.raises(ValueError):
        llm.validate_turns([llm.ChatTurn("user", "no system first")])
    with pytest.raises(ValueError):
        llm.validate_turns(
            [llm.ChatTurn("system", "s"), llm.ChatTurn("assistant", "wrong order")]
        )
    llm.validate_turns(
        [
            llm.ChatTurn("system", "s"),
            llm.ChatTurn("user", "u"),
            llm.ChatTurn("assistant", "a"),
            llm.ChatTurn("user", "u2"),
        ]
    )


def test_estimate_cost_closed_form():
    usage = [llm.UsageRecord(prompt_tokens=1_000_000, completion_tokens=1_000_000)]
    assert llm.estimate_cost(usage, 1.1, 4.4) == pytest.approx(5.5)
    assert llm.estimate_cost([], 1.1, 4.4) == 0.0
    two = [
        llm.UsageRecord(prompt_tokens=500_000, completion_tokens=100_000),
        llm.UsageRecord(prompt_tokens=500_000, completion_tokens=900_000),
    ]
    assert llm.estimate_cost(two, 1.1, 4.4) == pytest.approx(5.5)


def test_estimate_cost_without_prices_warns_and_omits():
    with pytest.warns(UserWarning):
        assert llm.estimate_cost([llm.UsageRecord(1, 1)], None, 4.4) is None


class _FakeSession:
    """Scripted HTTP responses for retry/backoff behavior."""

    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = 0

    def post(self, url, headers=None, json=None, timeout=None):
        self.calls += 1
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


class _FakeResponse:
    def __init__(self, status_code, body=None):
        self.status_code = status_code
        self._body = body or {}

    def json(self):
        return self._body

    def raise_for_status(self):
        if self.status_code >= 400:
            import requests

            raise requests.HTTPError(f"{self.status_code}")


def _endpoint(**over) -> llm.ModelEndpoint:
    fields = dict(base_url="http://test", model="m", api_key_env="COBENCH_TEST_KEY")
    fields.update(over)
    return llm.ModelEndpoint(**fields)


def _ok_body(text="done"):
    return {
        "choices": [{"message": {"content": text}}],
        "usage": {"prompt_tokens": 10, "completion_tokens": 5},
    }


def test_http_client_retries_transient_errors(monkeypatch):
    monkeypatch.setenv("COBENCH_TEST_KEY", "sekret")
    session = _FakeSession([_FakeResponse(500), _FakeResponse(429), _FakeResponse(200, _ok_body())])
    sleeps = []
    client = llm.HttpChatClient(_endpoint(), session=session, sleep=sleeps.append)
    out = client.complete(_turns(), 0.0)
    assert out == ["done"]
    assert session.calls == 3
    assert len(sleeps) == 2
    assert sleeps[1] > sleeps[0] >= llm.BACKOFF_BASE_S  # exponential with jitter


def test_http_client_auth_failure_aborts_immediately(monkeypatch):
    monkeypatch.setenv("COBENCH_TEST_KEY", "sekret")
    session = _FakeSession([_FakeResponse(401)])
    client = llm.HttpChatClient(_endpoint(), session=session, sleep=lambda s: None)
    with pytest.raises(llm.EndpointAuthError):
        client.complete(_turns(), 0.0)
    assert session.calls == 1


def test_http_client_exhausts_retries(monkeypatch):
    monkeypatch.setenv("COBENCH_TEST_KEY", "sekret")
    session = _FakeSession([_FakeResponse(500)] * 5)
    client = llm.HttpChatClient(_endpoint(max_retries=5), session=session, sleep=lambda s: None)
    with pytest.raises(llm.EndpointError):
        client.complete(_turns(), 0.0)
    assert session.calls == 5


def test_http_client_records_usage(monkeypatch):
    monkeypatch.setenv("COBENCH_TEST_KEY", "sekret")
    session = _FakeSession([_FakeResponse(200, _ok_body())])
    client = llm.HttpChatClient(_endpoint(), session=session, sleep=lambda s: None)
    client.complete(_turns(), 0.0)
    assert client.usage == [llm.UsageRecord(prompt_tokens=10, completion_tokens=5)]


def test_missing_api_key_is_auth_error(monkeypatch):
    monkeypatch.delenv("COBENCH_TEST_KEY", raising=False)
    client = llm.HttpChatClient(_endpoint(), session=_FakeSession([]), sleep=lambda s: None)
    with pytest.raises(llm.EndpointAuthError):
        client.complete(_turns(), 0.0)

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from autoform.completion import (
    AuthenticationError,
    FinishReason,
    HttpCompletionProvider,
    MockCompletionProvider,
    ProviderError,
    RawCompletion,
    SamplingConfig,
    load_script,
    mock_with_script,
    prompt_fingerprint,
    request_completions,
    script_entry,
)


def test_sampling_config_validation():
    with pytest.raises(ValueError):
        SamplingConfig(temperature=-0.1)
    with pytest.raises(ValueError):
        SamplingConfig(n=0)
    with pytest.raises(ValueError):
        SamplingConfig(max_tokens=0)


def test_raw_completion_empty_text_needs_error_reason():
    with pytest.raises(ValueError):
        RawCompletion(text="", index=0, finish_reason=FinishReason.STOP)
    RawCompletion(text="", index=0, finish_reason=FinishReason.ERROR)


def test_mock_temperature_zero_identical():
    provider = MockCompletionProvider(seed=5)
    out = provider.complete("prompt", SamplingConfig(temperature=0.0, n=3, seed=5))
    assert len(out) == 3
    assert len({c.text for c in out}) == 1
    assert [c.index for c in out] == [0, 1, 2]


def test_mock_seeded_determinism():
    cfg = SamplingConfig(temperature=0.8, n=15, seed=9)
    a = MockCompletionProvider(seed=9).complete("some prompt", cfg)
    b = MockCompletionProvider(seed=9).complete("some prompt", cfg)
    assert [c.text for c in a] == [c.text for c in b]
    assert len(a) == 15


def test_mock_different_seeds_differ():
    cfg = SamplingConfig(temperature=0.8, n=10)
    a = MockCompletionProvider(seed=1).complete("p", cfg)
    b = MockCompletionProvider(seed=2).complete("p", cfg)
    assert [c.text for c in a] != [c.text for c in b]


def test_request_seed_overrides_provider_seed():
    provider = MockCompletionProvider(seed=1)
    with_cfg_seed = provider.complete("p", SamplingConfig(temperature=0.8, n=5, seed=2))
    other_provider = MockCompletionProvider(seed=2)
    assert [c.text for c in with_cfg_seed] == [
        c.text for c in other_provider.complete("p", SamplingConfig(temperature=0.8, n=5, seed=2))
    ]


def test_scripted_mock_replays(reference_completion):
    fp, texts = script_entry("the prompt", [reference_completion])
    provider = mock_with_script({fp: texts})
    out = provider.complete("the prompt", SamplingConfig(temperature=0.8, n=1))
    assert out[0].text == reference_completion


def test_scripted_mock_miss_falls_back_deterministically():
    provider = mock_with_script({prompt_fingerprint("known"): ["x"]}, seed=3)
    a = provider.complete("unknown", SamplingConfig(temperature=0.8, n=4))
    b = provider.complete("unknown", SamplingConfig(temperature=0.8, n=4))
    assert [c.text for c in a] == [c.text for c in b]
    assert all(c.text != "x" for c in a)


def test_scripted_mock_cycles_when_n_exceeds_script():
    fp = prompt_fingerprint("p")
    provider = mock_with_script({fp: ["one", "two"]})
    out = provider.complete("p", SamplingConfig(temperature=0.8, n=5))
    assert [c.text for c in out] == ["one", "two", "one", "two", "one"]
    assert [c.index for c in out] == [0, 1, 2, 3, 4]


def test_mock_concurrent_use_is_per_prompt_deterministic():
    provider = MockCompletionProvider(seed=11)
    cfg = SamplingConfig(temperature=0.8, n=5)
    expected = {p: [c.text for c in provider.complete(p, cfg)] for p in ("a", "b", "c")}
    results: dict[str, list[str]] = {}
    errors: list[Exception] = []

    def work(prompt: str) -> None:
        try:
            results[prompt] = [c.text for c in provider.complete(prompt, cfg)]
        except Exception as exc:   # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=work, args=(p,)) for p in ("a", "b", "c")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert results == expected


def test_load_script_round_trip(tmp_path):
    fp = prompt_fingerprint("p")
    path = tmp_path / "script.json"
    path.write_text(json.dumps({fp: ["alpha", "beta"]}), encoding="utf-8")
    script = load_script(path)
    assert script == {fp: ["alpha", "beta"]}


class _Handler(BaseHTTPRequestHandler):
    calls: list[dict] = []
    fail_first = 0
    auth_required = False

    def do_POST(self):   # noqa: N802  (stdlib naming)
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).calls.append({"body": body, "auth": self.headers.get("Authorization")})
        if type(self).auth_required and not self.headers.get("Authorization"):
            self.send_response(401)
            self.end_headers()
            return
        if type(self).fail_first > 0:
            type(self).fail_first -= 1
            self.send_response(500)
            self.end_headers()
            return
        payload = {
            "choices": [
                {"text": f"completion-{i}", "index": i, "finish_reason": "stop"}
                for i in range(body["n"])
            ]
        }
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):   # silence test output
        pass


@pytest.fixture
def http_server():
    _Handler.calls = []
    _Handler.fail_first = 0
    _Handler.auth_required = False
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1/completions"
    server.shutdown()


def test_http_provider_request_shape(http_server, monkeypatch):
    monkeypatch.setenv("AUTOFORM_API_KEY", "sekrit")
    provider = HttpCompletionProvider(url=http_server, model="test-model", base_delay=0.01)
    cfg = SamplingConfig(temperature=0.8, n=2, max_tokens=2000, stop_sequences=("/--",))
    out = request_completions("the prompt", cfg, provider)
    assert [c.text for c in out] == ["completion-0", "completion-1"]
    call = _Handler.calls[-1]
    assert call["body"] == {
        "model": "test-model",
        "prompt": "the prompt",
        "temperature": 0.8,
        "n": 2,
        "max_tokens": 2000,
        "stop": ["/--"],
    }
    assert call["auth"] == "Bearer sekrit"


def test_http_provider_retries_then_succeeds(http_server):
    _Handler.fail_first = 2
    provider = HttpCompletionProvider(url=http_server, model="m", base_delay=0.01, max_retries=4)
    out = provider.complete("p", SamplingConfig(n=1))
    assert len(out) == 1
    assert len(_Handler.calls) == 3


def test_http_provider_exhausts_retries(http_server):
    _Handler.fail_first = 99
    provider = HttpCompletionProvider(url=http_server, model="m", base_delay=0.001, max_retries=2)
    with pytest.raises(ProviderError):
        provider.complete("p", SamplingConfig(n=1))
    assert len(_Handler.calls) == 3   # initial try + 2 retries


def test_http_provider_auth_failure_not_retried(http_server, monkeypatch):
    monkeypatch.delenv("AUTOFORM_API_KEY", raising=False)
    _Handler.auth_required = True
    provider = HttpCompletionProvider(url=http_server, model="m", base_delay=0.01)
    with pytest.raises(AuthenticationError):
        provider.complete("p", SamplingConfig(n=1))
    assert len(_Handler.calls) == 1

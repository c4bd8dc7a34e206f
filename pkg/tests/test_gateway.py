import json
import random
import string
import threading

import httpx
import pytest

from factdebate.gateway import (
    BackendDescriptor,
    BackendKind,
    BudgetExceeded,
    CacheCorrupt,
    CallBudget,
    CompletionCache,
    CompletionRequest,
    Gateway,
    HttpBackend,
    RecordingBackend,
    ReplayBackend,
    ReplayMiss,
    ScriptExhausted,
    ScriptedBackend,
    TokenBucket,
    TransportError,
    build_backend,
    cached_complete,
    complete,
    request_cache_key,
)


def req(prompt="hello", **kwargs):
    return CompletionRequest(prompt=prompt, **kwargs)


class TestScriptedBackend:
    def test_queue_semantics(self):
        backend = ScriptedBackend(["A", "B"])
        assert complete(req(), backend).text == "A"
        assert complete(req(), backend).text == "B"

    def test_exhaustion(self):
        backend = ScriptedBackend(["A", "B"])
        complete(req(), backend)
        complete(req(), backend)
        with pytest.raises(ScriptExhausted):
            complete(req(), backend)

    def test_records_prompts(self):
        backend = ScriptedBackend(["A"])
        complete(req("what was asked"), backend)
        assert backend.calls == ["what was asked"]

    def test_concurrent_consumption_delivers_each_entry_once(self):
        entries = [f"entry-{i}" for i in range(200)]
        backend = ScriptedBackend(entries)
        seen = []
        lock = threading.Lock()

        def worker():
            while True:
                try:
                    result = backend.complete(req())
                except ScriptExhausted:
                    return
                with lock:
                    seen.append(result.text)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(seen) == sorted(entries)


class TestReplayBackend:
    def test_record_then_replay(self, tmp_path):
        backend = ReplayBackend(tmp_path)
        backend.record("the prompt", "the recorded completion")
        result = complete(req("the prompt"), backend)
        assert result.text == "the recorded completion"

    def test_miss_raises(self, tmp_path):
        backend = ReplayBackend(tmp_path)
        with pytest.raises(ReplayMiss):
            complete(req("never recorded"), backend)

    def test_recording_wrapper_round_trips(self, tmp_path):
        inner = ScriptedBackend(["first", "second"])
        recorder = RecordingBackend(inner, tmp_path)
        complete(req("p1"), recorder)
        complete(req("p2"), recorder)
        replay = ReplayBackend(tmp_path)
        assert complete(req("p2"), replay).text == "second"
        assert complete(req("p1"), replay).text == "first"


def http_backend_returning(handler):
    return HttpBackend(
        "https://provider.test/complete",
        transport=httpx.MockTransport(handler),
        sleep=lambda _: None,
    )


class TestHttpBackend:
    def test_success(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["prompt"] == "hello"
            return httpx.Response(200, json={"text": "world"})

        assert http_backend_returning(handler).complete(req()).text == "world"

    def test_retries_transient_then_succeeds(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            if len(attempts) < 3:
                return httpx.Response(503)
            return httpx.Response(200, json={"text": "late"})

        assert http_backend_returning(handler).complete(req()).text == "late"
        assert len(attempts) == 3

    def test_gives_up_after_retries(self):
        def handler(request):
            raise httpx.ConnectError("down")

        with pytest.raises(TransportError):
            http_backend_returning(handler).complete(req())

    def test_client_error_fails_immediately(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            return httpx.Response(401, text="bad key")

        with pytest.raises(TransportError):
            http_backend_returning(handler).complete(req())
        assert len(attempts) == 1


class TestCache:
    def test_hit_is_idempotent(self, tmp_path):
        backend = ScriptedBackend(["only"])
        cache = CompletionCache(tmp_path)
        first = cached_complete(req(), backend, cache)
        second = cached_complete(req(), backend, cache)
        assert first.text == second.text == "only"
        assert not first.from_cache and second.from_cache

    def test_temperature_changes_the_key(self):
        a = request_cache_key(req(temperature=0.0))
        b = request_cache_key(req(temperature=0.7))
        assert a != b

    def test_corrupt_entry_detected(self, tmp_path):
        cache = CompletionCache(tmp_path)
        key = request_cache_key(req())
        cache.put(key, "stored text")
        path = tmp_path / f"{key}.json"
        payload = json.loads(path.read_text())
        payload["text"] = "stored texX"
        path.write_text(json.dumps(payload))
        with pytest.raises(CacheCorrupt):
            cache.get(key)

    def test_unreadable_entry_detected(self, tmp_path):
        cache = CompletionCache(tmp_path)
        key = request_cache_key(req())
        (tmp_path / f"{key}.json").write_text("not json at all")
        with pytest.raises(CacheCorrupt):
            cache.get(key)

    def test_key_uniqueness_over_many_requests(self):
        rng = random.Random(20240131)
        keys = set()
        n = 100_000
        for i in range(n):
            prompt = "".join(rng.choices(string.ascii_letters, k=12)) + str(i)
            keys.add(request_cache_key(req(prompt, max_tokens=1 + i % 64)))
        assert len(keys) == n


class TestGateway:
    def test_budget_exceeded(self):
        gateway = Gateway(ScriptedBackend(["a", "b", "c"]), budget=CallBudget(2))
        gateway.complete_prompt("p1")
        gateway.complete_prompt("p2")
        with pytest.raises(BudgetExceeded):
            gateway.complete_prompt("p3")

    def test_cache_hits_do_not_consume_budget(self, tmp_path):
        gateway = Gateway(
            ScriptedBackend(["a"]),
            cache=CompletionCache(tmp_path),
            budget=CallBudget(1),
        )
        gateway.complete_prompt("same prompt")
        result = gateway.complete_prompt("same prompt")
        assert result.from_cache
        assert gateway.provider_calls == 1

    def test_request_never_mutated(self):
        gateway = Gateway(ScriptedBackend(["a"]))
        request = gateway.request("p")
        gateway.complete(request)
        assert request == gateway.request("p")


class TestTokenBucket:
    def test_waits_when_bucket_empty(self):
        clock = {"now": 0.0}
        sleeps = []

        def sleep(seconds):
            sleeps.append(seconds)
            clock["now"] += seconds

        bucket = TokenBucket(rate=2.0, capacity=1.0, clock=lambda: clock["now"], sleep=sleep)
        bucket.acquire()
        bucket.acquire()
        assert sleeps and abs(sleeps[0] - 0.5) < 1e-9


class TestDescriptors:
    def test_scripted_requires_script(self):
        with pytest.raises(ValueError):
            BackendDescriptor(BackendKind.SCRIPTED, {})

    def test_replay_requires_fixture_dir(self):
        with pytest.raises(ValueError):
            BackendDescriptor(BackendKind.REPLAY, {})

    def test_build_backend_from_script_file(self, tmp_path):
        script_file = tmp_path / "script.json"
        script_file.write_text(json.dumps(["x", "y"]))
        descriptor = BackendDescriptor(BackendKind.SCRIPTED, {"script": str(script_file)})
        backend = build_backend(descriptor)
        assert backend.complete(req()).text == "x"


class TestCompletionRequest:
    def test_empty_prompt_rejected(self):
        with pytest.raises(ValueError):
            CompletionRequest(prompt="")

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError):
            CompletionRequest(prompt="p", temperature=-0.1)

    def test_nonpositive_max_tokens_rejected(self):
        with pytest.raises(ValueError):
            CompletionRequest(prompt="p", max_tokens=0)

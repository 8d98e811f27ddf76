"""Tests for the simulated and HTTP judge backends."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

import pytest
import requests

from helpers import instance
from swapjudge import (
    BernoulliParams,
    ConfidenceModel,
    HttpJudge,
    JudgeError,
    JudgmentInstance,
    Ordering,
    PromptTemplate,
    SimulatedJudge,
    Verdict,
    parse_response,
    render_prompt,
)
from swapjudge.judges import DEFAULT_TEMPLATE


def sim(q1: float, q2: float, seed: int = 0, confidence=ConfidenceModel()) -> SimulatedJudge:
    return SimulatedJudge(seed=seed, default=BernoulliParams(q1, q2), confidence_model=confidence)


def test_degenerate_bernoulli_is_deterministic():
    judge = sim(1.0, 0.0)
    for repetition in range(1, 30):
        assert judge.judge(instance(), Ordering.AB, repetition).verdict is Verdict.A
        assert judge.judge(instance(), Ordering.BA, repetition).verdict is Verdict.B


def test_repeated_call_returns_identical_judgment():
    judge = sim(0.5, 0.5, seed=9)
    first = judge.judge(instance("id-7"), Ordering.AB, 3)
    second = judge.judge(instance("id-7"), Ordering.AB, 3)
    assert first == second


def test_call_order_and_threads_do_not_change_results():
    judge = sim(0.5, 0.5, seed=42)
    keys = [
        (instance(f"i{k}"), ordering, repetition)
        for k in range(20)
        for ordering in (Ordering.AB, Ordering.BA)
        for repetition in range(1, 4)
    ]
    sequential = {(i.id, o, r): judge.judge(i, o, r) for i, o, r in keys}
    shuffled = list(keys)
    random.Random(1).shuffle(shuffled)
    with ThreadPoolExecutor(max_workers=8) as pool:
        threaded = list(pool.map(lambda key: judge.judge(*key), shuffled))
    for (inst, ordering, repetition), call in zip(shuffled, threaded):
        assert call == sequential[(inst.id, ordering, repetition)]


def test_verdict_frequency_converges():
    judge = SimulatedJudge(
        seed=123, default=BernoulliParams(0.7, 0.7), confidence_model=None
    )
    inst = instance("freq")
    hits = sum(
        judge.judge(inst, Ordering.AB, repetition).verdict is Verdict.A
        for repetition in range(1, 100_001)
    )
    assert abs(hits / 100_000 - 0.7) <= 0.01


def test_per_ordering_frequencies_converge():
    judge = SimulatedJudge(
        seed=7, default=BernoulliParams(0.8, 0.3), confidence_model=None
    )
    inst = instance("both")
    n = 20_000
    for ordering, q in ((Ordering.AB, 0.8), (Ordering.BA, 0.3)):
        hits = sum(
            judge.judge(inst, ordering, repetition).verdict is Verdict.A
            for repetition in range(1, n + 1)
        )
        bound = 3 * (q * (1 - q) / n) ** 0.5
        assert abs(hits / n - q) <= bound


def test_confidence_deterministic_affine_at_zero_noise():
    model = ConfidenceModel(intercept=0.5, slope=0.5, noise_scale=0.0)
    judge = sim(0.9, 0.2, confidence=model)
    ab = judge.judge(instance(), Ordering.AB, 1).confidence
    ba = judge.judge(instance(), Ordering.BA, 1).confidence
    assert ab == pytest.approx(0.5 + 0.5 * abs(2 * 0.9 - 1))
    assert ba == pytest.approx(0.5 + 0.5 * abs(2 * 0.2 - 1))


def test_confidence_always_clamped():
    model = ConfidenceModel(intercept=0.9, slope=0.5, noise_scale=0.6)
    judge = sim(1.0, 0.0, confidence=model)
    values = [
        judge.judge(instance(f"c{k}"), ordering, repetition).confidence
        for k in range(50)
        for ordering in (Ordering.AB, Ordering.BA)
        for repetition in range(1, 4)
    ]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert len(set(values)) > 1  # noise actually varies


def test_confidence_model_disabled():
    judge = sim(0.5, 0.5, confidence=None)
    assert judge.judge(instance(), Ordering.AB, 1).confidence is None


def test_missing_params_raise():
    judge = SimulatedJudge(seed=0, params={"known": BernoulliParams(1, 1)})
    with pytest.raises(JudgeError):
        judge.judge(instance("unknown"), Ordering.AB, 1)


def test_render_prompt_ordering_controls_slots():
    inst = instance("render")
    forward = render_prompt(DEFAULT_TEMPLATE, inst, Ordering.AB)
    assert forward.index(inst.candidate_a) < forward.index(inst.candidate_b)
    backward = render_prompt(DEFAULT_TEMPLATE, inst, Ordering.BA)
    assert backward.index(inst.candidate_b) < backward.index(inst.candidate_a)


def test_render_prompt_swap_symmetry():
    # Swapping the ordering exchanges only the two candidate substrings.
    inst = instance("swap")
    forward = render_prompt(DEFAULT_TEMPLATE, inst, Ordering.AB)
    backward = render_prompt(DEFAULT_TEMPLATE, inst, Ordering.BA)
    marker_a, marker_b = "\x00A\x00", "\x00B\x00"
    rebuilt = (
        forward.replace(inst.candidate_a, marker_a)
        .replace(inst.candidate_b, marker_b)
        .replace(marker_a, inst.candidate_b)
        .replace(marker_b, inst.candidate_a)
    )
    assert rebuilt == backward


def test_render_prompt_does_not_reexpand_placeholders():
    tricky = JudgmentInstance(
        id="tricky",
        context="ctx",
        candidate_a="contains {candidate_2} literally",
        candidate_b="plain",
    )
    rendered = render_prompt(DEFAULT_TEMPLATE, tricky, Ordering.AB)
    assert rendered.count("contains {candidate_2} literally") == 1
    assert rendered.count("plain") == 1


def test_template_requires_both_candidate_slots():
    with pytest.raises(ValueError):
        PromptTemplate("only {candidate_1} and {context}")
    with pytest.raises(ValueError):
        PromptTemplate("{candidate_1} {candidate_2} {candidate_2}")


def test_parse_response_position_maps_through_ordering():
    assert parse_response("Answer: 1, Confidence: 80", Ordering.BA) == (Verdict.B, 0.8)
    assert parse_response("Answer: 2", Ordering.AB) == (Verdict.B, None)
    assert parse_response("I cannot decide", Ordering.AB) == (Verdict.INDETERMINATE, None)


def test_parse_response_round_trip():
    for ordering in (Ordering.AB, Ordering.BA):
        for position, slot_candidate in ((1, "first"), (2, "second")):
            verdict, _ = parse_response(f"Answer: {position}", ordering)
            if ordering is Ordering.AB:
                expected = Verdict.A if position == 1 else Verdict.B
            else:
                expected = Verdict.B if position == 1 else Verdict.A
            assert verdict is expected


def test_parse_response_confidence_scales():
    assert parse_response("Answer: 1, confidence: 0.35", Ordering.AB)[1] == pytest.approx(0.35)
    assert parse_response("Answer: 1, Confidence = 55", Ordering.AB)[1] == pytest.approx(0.55)
    assert parse_response("Answer: 1, confidence: 350", Ordering.AB)[1] is None


class FakeResponse:
    def __init__(self, content: str) -> None:
        self._content = content

    def raise_for_status(self) -> None:
        pass

    def json(self) -> dict:
        return {"choices": [{"message": {"content": self._content}}]}


class FakeSession:
    """Scripted stand-in for requests.Session: strings succeed, exceptions raise."""

    def __init__(self, script) -> None:
        self.script = list(script)
        self.posts = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.posts.append({"url": url, "json": json, "headers": headers})
        step = self.script.pop(0)
        if isinstance(step, Exception):
            raise step
        return FakeResponse(step)


def http_judge(script, **kwargs) -> tuple[HttpJudge, FakeSession]:
    session = FakeSession(script)
    judge = HttpJudge(
        url="https://judge.example/v1/chat/completions",
        model="test-model",
        session=session,
        **kwargs,
    )
    return judge, session


def test_http_judge_success_and_payload(monkeypatch):
    monkeypatch.setenv("SWAPJUDGE_API_TOKEN", "sekrit")
    judge, session = http_judge(["Answer: 2, Confidence: 90"])
    call = judge.judge(instance("h1"), Ordering.BA, 1)
    assert call.verdict is Verdict.A  # position 2 under BA is candidate A
    assert call.confidence == pytest.approx(0.9)
    assert call.raw_response == "Answer: 2, Confidence: 90"
    payload = session.posts[0]["json"]
    assert payload["model"] == "test-model"
    assert payload["temperature"] == pytest.approx(0.1)
    assert payload["messages"][0]["role"] == "user"
    assert session.posts[0]["headers"]["Authorization"] == "Bearer sekrit"


def test_http_judge_retries_transport_errors(monkeypatch):
    monkeypatch.delenv("SWAPJUDGE_API_TOKEN", raising=False)
    judge, session = http_judge(
        [requests.ConnectionError("boom"), "Answer: 1"], max_retries=2
    )
    call = judge.judge(instance("h2"), Ordering.AB, 1)
    assert call.verdict is Verdict.A
    assert len(session.posts) == 2


def test_http_judge_transport_failure_after_retries():
    judge, session = http_judge(
        [requests.ConnectionError("x")] * 3, max_retries=2
    )
    with pytest.raises(JudgeError):
        judge.judge(instance("h3"), Ordering.AB, 1)
    assert len(session.posts) == 3


def test_http_judge_unparseable_consumes_retries_then_indeterminate():
    judge, session = http_judge(["garbage", "more garbage", "still nothing"], max_retries=2)
    call = judge.judge(instance("h4"), Ordering.AB, 1)
    assert call.verdict is Verdict.INDETERMINATE
    assert call.raw_response == "still nothing"
    assert len(session.posts) == 3


def test_http_judge_parse_recovers_on_retry():
    judge, session = http_judge(["garbage", "Answer: 1"], max_retries=2)
    call = judge.judge(instance("h5"), Ordering.AB, 1)
    assert call.verdict is Verdict.A
    assert len(session.posts) == 2

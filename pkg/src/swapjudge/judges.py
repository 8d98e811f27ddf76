"""Judge backends: a seeded Bernoulli simulator and a generic HTTP judge.

Both expose the same single method, ``judge(instance, ordering,
repetition_index) -> JudgmentCall``, and both are safe to call from
multiple threads. The simulator derives every outcome counter-style from
(seed, instance id, ordering, repetition index), so results cannot depend
on call order or concurrency.
"""

from __future__ import annotations

import logging
import os
import re
import threading
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Protocol

import requests

from .model import JudgmentCall, JudgmentInstance, Ordering, Verdict
from .seeding import gaussian, uniform01

logger = logging.getLogger(__name__)


class JudgeError(Exception):
    """Raised when a judge cannot produce a call at all."""


class Judge(Protocol):
    def judge(
        self, instance: JudgmentInstance, ordering: Ordering, repetition_index: int
    ) -> JudgmentCall: ...


@dataclass(frozen=True)
class ConfidenceModel:
    """Self-reported confidence as an affine function of the ordering's gap.

    The emitted value is clamp(intercept + slope * |2q - 1| + noise, 0, 1)
    where q is the Bernoulli parameter of the queried ordering. Zero
    noise_scale makes confidences a deterministic function of q.
    """

    intercept: float = 0.5
    slope: float = 0.5
    noise_scale: float = 0.05


@dataclass(frozen=True)
class BernoulliParams:
    """Per-ordering probabilities of an A verdict."""

    q1: float  # P(verdict = A | ordering AB)
    q2: float  # P(verdict = A | ordering BA)

    def __post_init__(self) -> None:
        if not (0.0 <= self.q1 <= 1.0 and 0.0 <= self.q2 <= 1.0):
            raise ValueError(f"q1={self.q1}, q2={self.q2} must lie in [0, 1]")

    def for_ordering(self, ordering: Ordering) -> float:
        return self.q1 if ordering is Ordering.AB else self.q2


class SimulatedJudge:
    """Stochastic judge with known per-instance verdict probabilities.

    ``params`` maps instance ids to their Bernoulli parameters; ``default``
    applies to any instance without an entry. Pass ``confidence_model=None``
    to skip confidence generation entirely (faster for large Monte Carlo
    sweeps).
    """

    def __init__(
        self,
        seed: int,
        params: Mapping[str, BernoulliParams] | None = None,
        default: BernoulliParams | None = None,
        confidence_model: ConfidenceModel | None = ConfidenceModel(),
    ) -> None:
        self.seed = seed
        self.params = dict(params) if params else {}
        self.default = default
        self.confidence_model = confidence_model

    def params_for(self, instance_id: str) -> BernoulliParams:
        found = self.params.get(instance_id, self.default)
        if found is None:
            raise JudgeError(f"no Bernoulli parameters for instance {instance_id!r}")
        return found

    def judge(
        self, instance: JudgmentInstance, ordering: Ordering, repetition_index: int
    ) -> JudgmentCall:
        if repetition_index < 1:
            raise ValueError("repetition_index must be >= 1")
        q = self.params_for(instance.id).for_ordering(ordering)
        draw = uniform01(self.seed, instance.id, ordering.value, repetition_index, "verdict")
        verdict = Verdict.A if draw < q else Verdict.B
        confidence = None
        if self.confidence_model is not None:
            cm = self.confidence_model
            value = cm.intercept + cm.slope * abs(2.0 * q - 1.0)
            if cm.noise_scale != 0.0:
                value += cm.noise_scale * gaussian(
                    self.seed, instance.id, ordering.value, repetition_index, "confidence"
                )
            confidence = min(1.0, max(0.0, value))
        return JudgmentCall(
            instance_id=instance.id,
            ordering=ordering,
            repetition_index=repetition_index,
            verdict=verdict,
            confidence=confidence,
        )


CANDIDATE_1 = "{candidate_1}"
CANDIDATE_2 = "{candidate_2}"
CONTEXT = "{context}"

DEFAULT_TEMPLATE_TEXT = """You are comparing two candidate responses to the same task.

Task:
{context}

Candidate 1:
{candidate_1}

Candidate 2:
{candidate_2}

Which candidate is better overall? Reply on one line exactly as:
Answer: <1 or 2>, Confidence: <0-100>"""


@dataclass(frozen=True)
class PromptTemplate:
    """Prompt text with slots for the context and the two candidates."""

    text: str

    def __post_init__(self) -> None:
        for placeholder in (CANDIDATE_1, CANDIDATE_2):
            count = self.text.count(placeholder)
            if count != 1:
                raise ValueError(
                    f"template must contain {placeholder} exactly once, found {count}"
                )


DEFAULT_TEMPLATE = PromptTemplate(DEFAULT_TEMPLATE_TEXT)

_PLACEHOLDER_RE = re.compile(r"\{(candidate_1|candidate_2|context)\}")


def render_prompt(
    template: PromptTemplate, instance: JudgmentInstance, ordering: Ordering
) -> str:
    """Fill the template; the ordering decides which candidate goes first."""
    first, second = (
        (instance.candidate_a, instance.candidate_b)
        if ordering is Ordering.AB
        else (instance.candidate_b, instance.candidate_a)
    )
    values = {"candidate_1": first, "candidate_2": second, "context": instance.context}
    # Single-pass substitution so candidate text containing a placeholder
    # string cannot be re-expanded.
    return _PLACEHOLDER_RE.sub(lambda m: values[m.group(1)], template.text)


_POSITION_RE = re.compile(r"\b([12])\b")
_CONFIDENCE_RE = re.compile(r"confidence\s*[:=]?\s*([0-9]+(?:\.[0-9]+)?)", re.IGNORECASE)


def parse_response(raw: str, ordering: Ordering) -> tuple[Verdict, float | None]:
    """Extract (verdict, confidence) from free-form judge text.

    The first standalone 1/2 token names the winning prompt position, which
    the ordering maps back to a candidate. Confidence accepts either a 0-1
    fraction or a 0-100 percentage. Anything unextractable is indeterminate;
    this function never raises.
    """
    position_match = _POSITION_RE.search(raw)
    confidence = None
    confidence_match = _CONFIDENCE_RE.search(raw)
    if confidence_match:
        value = float(confidence_match.group(1))
        if value > 1.0:
            value /= 100.0
        if 0.0 <= value <= 1.0:
            confidence = value
    if position_match is None:
        return Verdict.INDETERMINATE, None
    first_wins = position_match.group(1) == "1"
    if ordering is Ordering.AB:
        verdict = Verdict.A if first_wins else Verdict.B
    else:
        verdict = Verdict.B if first_wins else Verdict.A
    return verdict, confidence


DEFAULT_AUTH_ENV = "SWAPJUDGE_API_TOKEN"


class HttpJudge:
    """Judge backed by a chat-completion style HTTP endpoint.

    Sends {model, temperature, messages} as JSON with bearer-token auth
    read from ``auth_env``. Transport failures are retried and then raised;
    responses that survive transport but cannot be parsed consume the same
    retry budget and finally surface as an indeterminate verdict with the
    raw text retained.
    """

    def __init__(
        self,
        url: str,
        model: str,
        temperature: float = 0.1,
        template: PromptTemplate = DEFAULT_TEMPLATE,
        max_retries: int = 2,
        timeout: float = 60.0,
        auth_env: str = DEFAULT_AUTH_ENV,
        max_in_flight: int = 4,
        session: requests.Session | None = None,
    ) -> None:
        if temperature < 0:
            raise ValueError("temperature must be >= 0")
        if max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        self.url = url
        self.model = model
        self.temperature = temperature
        self.template = template
        self.max_retries = max_retries
        self.timeout = timeout
        self.auth_env = auth_env
        self._session = session or requests.Session()
        self._slots = threading.Semaphore(max_in_flight)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.auth_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        with self._slots:
            response = self._session.post(
                self.url, json=payload, headers=self._headers(), timeout=self.timeout
            )
        response.raise_for_status()
        body = response.json()
        return body["choices"][0]["message"]["content"]

    def judge(
        self, instance: JudgmentInstance, ordering: Ordering, repetition_index: int
    ) -> JudgmentCall:
        if repetition_index < 1:
            raise ValueError("repetition_index must be >= 1")
        prompt = render_prompt(self.template, instance, ordering)
        attempts = self.max_retries + 1
        last_error: Exception | None = None
        raw = None
        for attempt in range(attempts):
            try:
                raw = self._complete(prompt)
            except (requests.RequestException, KeyError, ValueError, IndexError) as exc:
                last_error = exc
                logger.warning(
                    "judge call failed (%s %s rep %d, attempt %d/%d): %s",
                    instance.id, ordering.value, repetition_index, attempt + 1, attempts, exc,
                )
                continue
            verdict, confidence = parse_response(raw, ordering)
            if verdict is not Verdict.INDETERMINATE or attempt == attempts - 1:
                return JudgmentCall(
                    instance_id=instance.id,
                    ordering=ordering,
                    repetition_index=repetition_index,
                    verdict=verdict,
                    confidence=confidence,
                    raw_response=raw,
                )
            logger.info(
                "unparseable judge response (%s %s rep %d), retrying",
                instance.id, ordering.value, repetition_index,
            )
        if raw is not None:
            # Transport failed on the final attempt but an earlier parse
            # attempt produced text: surface it as indeterminate.
            return JudgmentCall(
                instance_id=instance.id,
                ordering=ordering,
                repetition_index=repetition_index,
                verdict=Verdict.INDETERMINATE,
                confidence=None,
                raw_response=raw,
            )
        raise JudgeError(
            f"judge request failed after {attempts} attempts for "
            f"{instance.id!r} {ordering.value} rep {repetition_index}"
        ) from last_error

"""LLM-based pair labeling over an HTTP chat-completion endpoint.

Each pair is queried in BOTH orientations with the charts presented as
identifier-free primitive JSON.  Consistent answers yield a label;
contradictory answers yield label 0 with a "contradictory" flag (the
training pipeline neutralizes label-0 pairs anyway).  Full request and
response transcripts are appended to an audit log when configured.

Prompt version: vizkb-value-task-1.  The prompt frames a value-comparison
reading task and demands a strict one-key JSON answer.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import httpx

from .labeling import LabelRecord, utc_now
from .pairs import DesignPair
from .primitives import abstract_primitives, sorted_tokens
from .spec import ChartSpec

PROMPT_VERSION = "vizkb-value-task-1"

SYSTEM_PROMPT = (
    "You are a visualization design expert judging which of two chart "
    "designs better supports reading and comparing individual values."
)

_TASK_TEMPLATE = """Two chart designs over the same data are described below as lists of \
design primitives (mark types, encoding channels, field types, scale types, \
transforms). Decide which design better supports a reader comparing \
individual values.

Design A:
{a}

Design B:
{b}

Answer with strict JSON on a single line, exactly {{"preferred": "A"}} or \
{{"preferred": "B"}}. Do not add any other text."""


class LLMLabelError(RuntimeError):
    pass


@dataclass(frozen=True)
class LLMEndpointConfig:
    url: str
    model: str
    api_key: Optional[str] = None
    api_key_env: str = "VIZKB_LLM_API_KEY"
    temperature: float = 0.0
    timeout: float = 30.0
    max_retries: int = 2
    audit_log: Optional[str] = None
    max_parallel: int = 4

    def resolve_api_key(self) -> str:
        if self.api_key:
            return self.api_key
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise LLMLabelError(
                f"no API key: set {self.api_key_env} or pass api_key explicitly"
            )
        return key


def primitive_json(spec: ChartSpec) -> str:
    """The identifier-free primitive listing shown to the model."""
    return json.dumps({"primitives": sorted_tokens(abstract_primitives(spec))})


def build_prompt(first: ChartSpec, second: ChartSpec) -> str:
    return _TASK_TEMPLATE.format(a=primitive_json(first), b=primitive_json(second))


_ANSWER_RE = re.compile(r"\{[^{}]*\"preferred\"[^{}]*\}")

_audit_lock = threading.Lock()


def _parse_answer(content: str) -> str:
    match = _ANSWER_RE.search(content)
    if not match:
        raise LLMLabelError(f"unparseable model answer: {content!r}")
    try:
        answer = json.loads(match.group(0))
    except json.JSONDecodeError as err:
        raise LLMLabelError(f"malformed JSON in model answer: {err}") from err
    preferred = answer.get("preferred")
    if preferred not in ("A", "B"):
        raise LLMLabelError(f"model must prefer 'A' or 'B', got {preferred!r}")
    return preferred


def _append_audit(config: LLMEndpointConfig, entry: dict[str, Any]) -> None:
    if not config.audit_log:
        return
    with _audit_lock:
        with open(config.audit_log, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _query_once(
    client: httpx.Client,
    config: LLMEndpointConfig,
    pair_id: str,
    orientation: str,
    first: ChartSpec,
    second: ChartSpec,
) -> str:
    request_body = {
        "model": config.model,
        "temperature": config.temperature,
        "messages": [
            {"role": "system", "content": SYSTEM_PROMPT},
            {"role": "user", "content": build_prompt(first, second)},
        ],
    }
    last_error: Optional[Exception] = None
    for attempt in range(config.max_retries + 1):
        try:
            response = client.post(
                config.url,
                json=request_body,
                headers={"Authorization": f"Bearer {config.resolve_api_key()}"},
                timeout=config.timeout,
            )
            response.raise_for_status()
            body = response.json()
            content = body["choices"][0]["message"]["content"]
            _append_audit(
                config,
                {
                    "pair_id": pair_id,
                    "orientation": orientation,
                    "attempt": attempt,
                    "prompt_version": PROMPT_VERSION,
                    "request": request_body,
                    "response": body,
                    "timestamp": utc_now(),
                },
            )
            return _parse_answer(content)
        except (httpx.HTTPError, KeyError, IndexError, LLMLabelError) as err:
            last_error = err
            _append_audit(
                config,
                {
                    "pair_id": pair_id,
                    "orientation": orientation,
                    "attempt": attempt,
                    "prompt_version": PROMPT_VERSION,
                    "request": request_body,
                    "error": repr(err),
                    "timestamp": utc_now(),
                },
            )
    raise LLMLabelError(
        f"pair {pair_id} ({orientation}): exhausted retries: {last_error!r}"
    )


def llm_label(
    pair: DesignPair,
    config: LLMEndpointConfig,
    client: Optional[httpx.Client] = None,
) -> LabelRecord:
    """Label one pair by dual-orientation querying.

    Orientation 1 presents (left, right) as (A, B); orientation 2 swaps
    them.  Agreement on the same physical chart yields -1/+1; contradictory
    answers yield label 0 flagged "contradictory".
    """
    own_client = client is None
    client = client or httpx.Client()
    try:
        first = _query_once(client, config, pair.id, "original", pair.left, pair.right)
        second = _query_once(client, config, pair.id, "swapped", pair.right, pair.left)
    finally:
        if own_client:
            client.close()
    # Map answers back to physical charts.
    chart_1 = "left" if first == "A" else "right"
    chart_2 = "right" if second == "A" else "left"
    if chart_1 == chart_2:
        label = -1 if chart_1 == "left" else 1
        return LabelRecord(
            pair_id=pair.id, label=label, provenance="llm", confidence=1.0
        )
    return LabelRecord(
        pair_id=pair.id,
        label=0,
        provenance="llm",
        confidence=0.5,
        flag="contradictory",
    )


@dataclass(frozen=True)
class LLMLabelErrorRecord:
    pair_id: str
    error: str
    timestamp: str = field(default_factory=utc_now)


def llm_label_pairs(
    pairs: Sequence[DesignPair],
    config: LLMEndpointConfig,
    client: Optional[httpx.Client] = None,
) -> tuple[list[LabelRecord], list[LLMLabelErrorRecord]]:
    """Label a batch; failures become error records instead of aborting.

    Distinct pairs are labeled with bounded parallelism (config.max_parallel
    worker threads); results are order-independent and returned sorted by
    pair id.
    """
    own_client = client is None
    client = client or httpx.Client()
    records: list[LabelRecord] = []
    errors: list[LLMLabelErrorRecord] = []
    lock = threading.Lock()

    def work(chunk: Sequence[DesignPair]) -> None:
        for pair in chunk:
            try:
                record = llm_label(pair, config, client)
                with lock:
                    records.append(record)
            except LLMLabelError as err:
                with lock:
                    errors.append(LLMLabelErrorRecord(pair.id, str(err)))

    try:
        workers = max(1, min(config.max_parallel, len(pairs)))
        chunks = [list(pairs[i::workers]) for i in range(workers)]
        threads = [
            threading.Thread(target=work, args=(chunk,), daemon=True)
            for chunk in chunks
            if chunk
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    finally:
        if own_client:
            client.close()
    records.sort(key=lambda r: r.pair_id)
    errors.sort(key=lambda e: e.pair_id)
    return records, errors

"""Preference labeling: manual store, classifier, and active learning.

The automated labeler is a bias-free single-hidden-layer network over
signed primitive-difference vectors:

    score(x) = v . tanh(W x),   p(right preferred) = sigmoid(score)

With no bias terms and odd activations the model is antisymmetric by
construction, so swapping a pair's orientation exactly negates its score
and p(a, b) = 1 - p(b, a) holds for any weights.

Manual labels always take precedence over automated ones; the label store
is an idempotent keyed upsert over (pair_id, provenance) plus a removal set
for pairs judged illegible.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .pairs import DesignPair, PROVENANCES
from .primitives import PrimitiveToken, abstract_primitives, build_vocabulary

DEFAULT_HIDDEN = 64
DEFAULT_EPOCHS = 200
DEFAULT_LEARNING_RATE = 0.01
DEFAULT_BATCH_SIZE = 20
DEFAULT_MAX_ITERATIONS = 20

#: Provenance priority when no manual record exists (highest first).
_AUTOMATED_PRIORITY = ("active_ml", "ml", "llm", "seed_weights")


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class LabelRecord:
    pair_id: str
    label: int  # -1, 0, +1
    provenance: str
    confidence: float
    timestamp: str = field(default_factory=utc_now)
    flag: Optional[str] = None  # e.g. "contradictory" for dual-query conflicts

    def __post_init__(self) -> None:
        if self.label not in (-1, 0, 1):
            raise ValueError(f"label must be -1, 0, or +1, got {self.label}")
        if self.provenance not in PROVENANCES or self.provenance == "none":
            raise ValueError(f"bad provenance {self.provenance!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


@dataclass(frozen=True)
class RemovalRecord:
    pair_id: str
    reason: str
    timestamp: str = field(default_factory=utc_now)


class LabelStore:
    """Keyed label records with manual precedence and removal tracking."""

    def __init__(self) -> None:
        self._records: dict[tuple[str, str], LabelRecord] = {}
        self._removed: dict[str, RemovalRecord] = {}

    def put(self, record: LabelRecord) -> None:
        self._records[(record.pair_id, record.provenance)] = record

    def remove_pair(self, pair_id: str, reason: str = "illegible",
                    timestamp: Optional[str] = None) -> None:
        self._removed[pair_id] = RemovalRecord(
            pair_id, reason, timestamp or utc_now()
        )

    def is_removed(self, pair_id: str) -> bool:
        return pair_id in self._removed

    def removed(self) -> dict[str, RemovalRecord]:
        return dict(self._removed)

    def records_for(self, pair_id: str) -> list[LabelRecord]:
        return [r for (pid, _), r in self._records.items() if pid == pair_id]

    def effective(self, pair_id: str) -> Optional[LabelRecord]:
        """The record that wins for a pair: manual first, then the
        freshest automated record (ties broken by provenance priority)."""
        manual = self._records.get((pair_id, "manual"))
        if manual is not None:
            return manual
        candidates = [
            self._records[(pair_id, p)]
            for p in _AUTOMATED_PRIORITY
            if (pair_id, p) in self._records
        ]
        if not candidates:
            return None
        return max(
            candidates,
            key=lambda r: (r.timestamp, -_AUTOMATED_PRIORITY.index(r.provenance)),
        )

    def has_manual(self, pair_id: str) -> bool:
        return (pair_id, "manual") in self._records

    def manual_count(self) -> int:
        return sum(1 for (_, p) in self._records if p == "manual")

    def all_records(self) -> list[LabelRecord]:
        return sorted(
            self._records.values(), key=lambda r: (r.pair_id, r.provenance)
        )

    def __len__(self) -> int:
        return len(self._records)

    # -- pair application -------------------------------------------------

    def apply(self, pairs: Iterable[DesignPair]) -> list[DesignPair]:
        """Labeled copies of the pairs, removed ones dropped; pairs without
        any record keep their existing label."""
        out: list[DesignPair] = []
        for pair in pairs:
            if self.is_removed(pair.id):
                continue
            record = self.effective(pair.id)
            if record is None:
                out.append(pair)
            else:
                out.append(pair.with_label(record.label, record.provenance))
        return out

    # -- persistence -------------------------------------------------------

    def export_jsonl(self, path: str) -> int:
        n = 0
        with open(path, "w", encoding="utf-8") as fh:
            for record in self.all_records():
                fh.write(json.dumps(record_to_dict(record), sort_keys=True) + "\n")
                n += 1
            for removal in sorted(self._removed.values(), key=lambda r: r.pair_id):
                fh.write(json.dumps(removal_to_dict(removal), sort_keys=True) + "\n")
                n += 1
        return n

    def import_jsonl(self, path: str) -> int:
        n = 0
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                self.apply_log_entry(json.loads(line))
                n += 1
        return n

    def apply_log_entry(self, entry: dict) -> None:
        if entry.get("removed"):
            self._removed[entry["pair_id"]] = RemovalRecord(
                pair_id=entry["pair_id"],
                reason=entry.get("reason", "illegible"),
                timestamp=entry.get("timestamp", utc_now()),
            )
        else:
            self.put(
                LabelRecord(
                    pair_id=entry["pair_id"],
                    label=int(entry["label"]),
                    provenance=entry["provenance"],
                    confidence=float(entry.get("confidence", 1.0)),
                    timestamp=entry.get("timestamp", utc_now()),
                    flag=entry.get("flag"),
                )
            )


def record_to_dict(record: LabelRecord) -> dict:
    d = {
        "pair_id": record.pair_id,
        "label": record.label,
        "provenance": record.provenance,
        "confidence": record.confidence,
        "timestamp": record.timestamp,
    }
    if record.flag:
        d["flag"] = record.flag
    return d


def removal_to_dict(removal: RemovalRecord) -> dict:
    return {
        "pair_id": removal.pair_id,
        "removed": True,
        "reason": removal.reason,
        "timestamp": removal.timestamp,
    }


# ---------------------------------------------------------------------------
# primitive difference vectors
# ---------------------------------------------------------------------------

def vocabulary_for_pairs(pairs: Iterable[DesignPair]) -> tuple[PrimitiveToken, ...]:
    specs = []
    for p in pairs:
        specs.append(p.left)
        specs.append(p.right)
    return build_vocabulary(specs)


def primitive_diff_vector(
    pair: DesignPair, vocabulary: Sequence[PrimitiveToken]
) -> np.ndarray:
    """Signed token-count difference v[t] = count_left(t) - count_right(t)
    over the session vocabulary."""
    lt = abstract_primitives(pair.left)
    rt = abstract_primitives(pair.right)
    return np.array([lt[t] - rt[t] for t in vocabulary], dtype=float)


# ---------------------------------------------------------------------------
# classifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassifierConfig:
    hidden: int = DEFAULT_HIDDEN
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0
    cv_folds: int = 5


class DegenerateLabelsError(ValueError):
    """Training labels contain a single class."""


class PreferenceClassifier:
    """Antisymmetric pairwise preference net over diff vectors.

    p is the probability that the right chart is preferred (label +1).
    """

    def __init__(self, vocabulary: Sequence[PrimitiveToken],
                 config: ClassifierConfig = ClassifierConfig()):
        self.vocabulary = tuple(vocabulary)
        self.config = config
        rng = np.random.default_rng(config.seed)
        d, h = len(self.vocabulary), config.hidden
        self.w_in = rng.normal(0.0, 1.0 / np.sqrt(max(d, 1)), size=(d, h))
        self.w_out = rng.normal(0.0, 1.0 / np.sqrt(h), size=h)
        self.cv_accuracy_: Optional[float] = None

    # -- numerics ---------------------------------------------------------

    def _score(self, x: np.ndarray) -> np.ndarray:
        hidden = np.tanh(x @ self.w_in)
        return hidden @ self.w_out

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """p(right preferred); x is (n, d) or (d,)."""
        single = x.ndim == 1
        scores = self._score(np.atleast_2d(x))
        p = 1.0 / (1.0 + np.exp(-scores))
        return p[0] if single else p

    def fit(self, x: np.ndarray, y: np.ndarray) -> "PreferenceClassifier":
        """Full-batch gradient descent on cross-entropy; y in {-1, +1}."""
        classes = set(np.unique(y))
        if not classes >= {-1.0, 1.0} and not classes >= {-1, 1}:
            raise DegenerateLabelsError(
                f"need both classes, got {sorted(classes)}"
            )
        t = (np.asarray(y, dtype=float) + 1.0) / 2.0  # {0, 1} targets
        n = x.shape[0]
        lr = self.config.learning_rate
        for _ in range(self.config.epochs):
            hidden = np.tanh(x @ self.w_in)
            scores = hidden @ self.w_out
            p = 1.0 / (1.0 + np.exp(-scores))
            err = (p - t) / n                      # dL/dscore
            grad_out = hidden.T @ err
            dhidden = np.outer(err, self.w_out) * (1.0 - hidden**2)
            grad_in = x.T @ dhidden
            self.w_out -= lr * grad_out
            self.w_in -= lr * grad_in
        return self

    def accuracy(self, x: np.ndarray, y: np.ndarray) -> float:
        p = self.predict_proba(np.atleast_2d(x))
        pred = np.where(p > 0.5, 1, -1)
        return float(np.mean(pred == np.asarray(y)))

    def clone(self) -> "PreferenceClassifier":
        return PreferenceClassifier(self.vocabulary, self.config)


def train_classifier_labeler(
    labeled: Sequence[tuple[DesignPair, int]],
    config: ClassifierConfig = ClassifierConfig(),
    vocabulary: Optional[Sequence[PrimitiveToken]] = None,
) -> PreferenceClassifier:
    """Fit a classifier on labeled (+1/-1) pairs; 0-labeled pairs are
    skipped (the model is antisymmetric, neutral pairs carry no signal).

    The fitted model reports its own 5-fold cross-validation accuracy as
    cv_accuracy_ (None when there are too few examples to fold).
    """
    usable = [(p, l) for p, l in labeled if l in (-1, 1)]
    if vocabulary is None:
        vocabulary = vocabulary_for_pairs(p for p, _ in usable)
    x = np.array(
        [primitive_diff_vector(p, vocabulary) for p, _ in usable]
    ).reshape(len(usable), len(vocabulary))
    y = np.array([l for _, l in usable], dtype=float)
    if len({*y.tolist()}) < 2:
        raise DegenerateLabelsError("training labels contain a single class")

    model = PreferenceClassifier(vocabulary, config)
    model.fit(x, y)
    model.cv_accuracy_ = _cross_val_accuracy(x, y, vocabulary, config)
    return model


def _cross_val_accuracy(
    x: np.ndarray,
    y: np.ndarray,
    vocabulary: Sequence[PrimitiveToken],
    config: ClassifierConfig,
) -> Optional[float]:
    k = config.cv_folds
    n = x.shape[0]
    if n < k or k < 2:
        return None
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(n)
    folds = np.array_split(order, k)
    scores = []
    for i in range(k):
        test_idx = folds[i]
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        if len({*y[train_idx].tolist()}) < 2:
            continue
        fold_model = PreferenceClassifier(vocabulary, config)
        fold_model.fit(x[train_idx], y[train_idx])
        scores.append(fold_model.accuracy(x[test_idx], y[test_idx]))
    return float(np.mean(scores)) if scores else None


def classify_labels(
    model: PreferenceClassifier, unlabeled: Sequence[DesignPair]
) -> list[LabelRecord]:
    """Sign-decision labels with confidence = max class probability.

    A score of exactly zero (e.g. identical-token pairs) labels 0.
    """
    records = []
    for pair in unlabeled:
        x = primitive_diff_vector(pair, model.vocabulary)
        p = float(model.predict_proba(x))
        if p > 0.5:
            label = 1
        elif p < 0.5:
            label = -1
        else:
            label = 0
        records.append(
            LabelRecord(
                pair_id=pair.id,
                label=label,
                provenance="ml",
                confidence=max(p, 1.0 - p),
            )
        )
    return records


# ---------------------------------------------------------------------------
# active learning
# ---------------------------------------------------------------------------

@dataclass
class LabelSession:
    session_id: str
    strategy: str = "manual"  # "manual" | "active_ml"
    batch_size: int = DEFAULT_BATCH_SIZE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    queue: list[str] = field(default_factory=list)  # unlabeled pair ids
    iteration: int = 0

    def __post_init__(self) -> None:
        if self.strategy not in ("manual", "active_ml"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.batch_size < 1 or self.max_iterations < 1:
            raise ValueError("batch_size and max_iterations must be >= 1")

    @property
    def exhausted(self) -> bool:
        return self.iteration >= self.max_iterations or not self.queue


@dataclass(frozen=True)
class UncertainQuery:
    pair_id: str
    confidence: float


def active_learning_step(
    session: LabelSession,
    model: Optional[PreferenceClassifier],
    unlabeled: Sequence[DesignPair],
) -> list[UncertainQuery]:
    """The batch of queued pairs the model is least sure about, confidence
    closest to 0.5 first, ties by pair id.  Without a model (no labels yet)
    the queue order stands.  An empty batch signals session completion."""
    queued = [p for p in unlabeled if p.id in set(session.queue)]
    if not queued or session.exhausted:
        return []
    if model is None:
        chosen = sorted(queued, key=lambda p: session.queue.index(p.id))
        return [UncertainQuery(p.id, 0.5) for p in chosen[: session.batch_size]]
    scored = []
    for pair in queued:
        x = primitive_diff_vector(pair, model.vocabulary)
        p = float(model.predict_proba(x))
        confidence = max(p, 1.0 - p)
        scored.append((abs(confidence - 0.5), pair.id, confidence))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [
        UncertainQuery(pair_id, conf)
        for _, pair_id, conf in scored[: session.batch_size]
    ]

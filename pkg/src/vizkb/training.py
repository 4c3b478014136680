"""Weight learning from labeled pairs.

Pairs become signed feature-difference examples x = features(left) -
features(right) with y = -1 (left preferred) or +1 (right preferred).
Every pair is duplicated with a rotated twin (-x, -y) to balance the
classes; 0-labeled pairs become a neutralizing quadruple whose gradient
contributions cancel exactly when the intercept sits at zero (where the
antisymmetric data keeps it).  Duplication happens after splitting so all
twins share a split cell.

Fitted coefficients convert to integer weights by x1000 rounding (half away
from zero), without clamping the magnitude; nonzero coefficients whose
scaled value rounds to zero are clamped to +-1 so preferred features keep
their sign.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .features import FeatureCatalog, builtin_catalog, extract_features
from .pairs import DesignPair
from .weights import WeightTable

DEFAULT_HOLDOUT_FRAC = 0.15
DEFAULT_FOLDS = 5
WEIGHT_SCALE = 1000


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainExample:
    x: np.ndarray
    y: int  # -1 or +1
    pair_id: str
    orientation: str  # "original" | "rotated"


def feature_array(
    spec_features: Mapping[str, int], names: Sequence[str]
) -> np.ndarray:
    return np.array([spec_features.get(n, 0) for n in names], dtype=float)


def pair_to_examples(
    pair: DesignPair, catalog: Optional[FeatureCatalog] = None
) -> list[TrainExample]:
    """Difference-vector examples for one labeled pair.

    Labels +-1 give an original plus a rotated twin; label 0 gives the
    four-example neutralizing quadruple (both orientations x both labels).
    """
    if not pair.labeled:
        raise TrainingError(f"pair {pair.id} is unlabeled")
    catalog = catalog or builtin_catalog()
    names = catalog.names
    left = extract_features(pair.left, catalog)
    right = extract_features(pair.right, catalog)
    x = feature_array(dict(left.items()), names) - feature_array(dict(right.items()), names)
    pid = pair.id
    if pair.label == 0:
        return [
            TrainExample(x, 1, pid, "original"),
            TrainExample(x, -1, pid, "original"),
            TrainExample(-x, 1, pid, "rotated"),
            TrainExample(-x, -1, pid, "rotated"),
        ]
    y = int(pair.label)
    return [
        TrainExample(x, y, pid, "original"),
        TrainExample(-x, -y, pid, "rotated"),
    ]


def examples_for_pairs(
    pairs: Iterable[DesignPair], catalog: Optional[FeatureCatalog] = None
) -> list[TrainExample]:
    catalog = catalog or builtin_catalog()
    out: list[TrainExample] = []
    for pair in pairs:
        out.extend(pair_to_examples(pair, catalog))
    return out


# ---------------------------------------------------------------------------
# splits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitPlan:
    holdout: frozenset[str]
    folds: tuple[frozenset[str], ...]
    rng_seed: int

    def fold_of(self, pair_id: str) -> Optional[int]:
        for i, fold in enumerate(self.folds):
            if pair_id in fold:
                return i
        return None


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def make_splits(
    pairs: Sequence[DesignPair],
    holdout_frac: float = DEFAULT_HOLDOUT_FRAC,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
) -> SplitPlan:
    """Deterministic holdout + k disjoint folds over pair ids.

    The holdout takes round(holdout_frac * n) pairs, apportioned across
    source groups when group tags are present (largest remainder); the
    remaining ids fill the folds cyclically so fold sizes stay within one
    of each other.  Twins and neutralization quadruples share the pair id
    and therefore always land in one cell.
    """
    n = len(pairs)
    if n < k + 1:
        raise TrainingError(f"need at least {k + 1} pairs, got {n}")
    ids = [p.id for p in pairs]
    if len(set(ids)) != n:
        raise TrainingError("pair ids must be unique for splitting")

    rng = random.Random(seed)
    groups: dict[str, list[str]] = {}
    for p in pairs:
        groups.setdefault(p.group or "", []).append(p.id)
    group_names = sorted(groups)
    for name in group_names:
        rng.shuffle(groups[name])

    h = _round_half_away(holdout_frac * n)
    # Largest-remainder apportionment of the holdout across groups.
    quotas = {g: h * len(groups[g]) / n for g in group_names}
    base = {g: int(math.floor(quotas[g])) for g in group_names}
    shortfall = h - sum(base.values())
    by_remainder = sorted(
        group_names, key=lambda g: (-(quotas[g] - base[g]), g)
    )
    for g in by_remainder[:shortfall]:
        base[g] += 1

    holdout: set[str] = set()
    remainder: list[str] = []
    for g in group_names:
        take = base[g]
        holdout.update(groups[g][:take])
        remainder.extend(groups[g][take:])

    folds: list[set[str]] = [set() for _ in range(k)]
    cursor = 0
    for pid in remainder:
        folds[cursor % k].add(pid)
        cursor += 1
    if any(not fold for fold in folds):
        raise TrainingError("a fold came out empty; too few pairs for k folds")
    return SplitPlan(
        holdout=frozenset(holdout),
        folds=tuple(frozenset(f) for f in folds),
        rng_seed=seed,
    )


# ---------------------------------------------------------------------------
# linear trainers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    """Trainer knobs.  init_scale 0 means the conventional zero start for
    these convex losses; a positive scale draws a seeded random init."""

    learning_rate: float = 0.5
    epochs: int = 4000
    l2: float = 1e-3
    tol: float = 1e-8
    seed: int = 0
    init_scale: float = 0.0


@dataclass(frozen=True)
class ModelCoefficients:
    coef: Mapping[str, float]
    intercept: float
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "coef": dict(sorted(self.coef.items())),
                "intercept": self.intercept,
                "metadata": dict(self.metadata),
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "ModelCoefficients":
        d = json.loads(text)
        return ModelCoefficients(d["coef"], d["intercept"], d.get("metadata", {}))


def logistic_loss_grad(
    w: np.ndarray,
    b: float,
    x: np.ndarray,
    y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Mean logistic loss with L2 on w (not b), plus analytic gradients."""
    z = x @ w + b
    yz = y * z
    loss = float(np.mean(np.logaddexp(0.0, -yz)) + l2 * float(w @ w))
    s = 1.0 / (1.0 + np.exp(yz))  # sigmoid(-y z)
    coeff = -y * s / x.shape[0]
    grad_w = x.T @ coeff + 2.0 * l2 * w
    grad_b = float(np.sum(coeff))
    return loss, grad_w, grad_b


def hinge_loss_grad(
    w: np.ndarray,
    b: float,
    x: np.ndarray,
    y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, float]:
    """Mean hinge loss with L2 on w, plus a subgradient."""
    z = x @ w + b
    margin = 1.0 - y * z
    active = margin > 0
    loss = float(np.mean(np.maximum(margin, 0.0)) + l2 * float(w @ w))
    coeff = np.where(active, -y, 0.0) / x.shape[0]
    grad_w = x.T @ coeff + 2.0 * l2 * w
    grad_b = float(np.sum(coeff))
    return loss, grad_w, grad_b


LossGrad = Callable[[np.ndarray, float, np.ndarray, np.ndarray, float],
                    tuple[float, np.ndarray, float]]


def _fit(
    examples: Sequence[TrainExample],
    catalog: FeatureCatalog,
    config: TrainConfig,
    loss_grad: LossGrad,
    family: str,
) -> ModelCoefficients:
    if not examples:
        raise TrainingError("no training examples")
    x = np.stack([e.x for e in examples])
    y = np.array([e.y for e in examples], dtype=float)
    if len(set(y.tolist())) < 2:
        raise TrainingError("both classes must be present")

    rng = np.random.default_rng(config.seed)
    if config.init_scale > 0:
        w = rng.normal(0.0, config.init_scale, size=x.shape[1])
    else:
        w = np.zeros(x.shape[1])
    b = 0.0
    prev_loss = math.inf
    epochs_run = 0
    for epoch in range(config.epochs):
        loss, grad_w, grad_b = loss_grad(w, b, x, y, config.l2)
        if not math.isfinite(loss):
            raise TrainingError(
                f"non-finite loss at epoch {epoch}: loss={loss}, "
                f"|w|={float(np.abs(w).max())}, b={b}, lr={config.learning_rate}"
            )
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b
        epochs_run = epoch + 1
        if abs(prev_loss - loss) < config.tol:
            break
        prev_loss = loss

    names = catalog.names
    return ModelCoefficients(
        coef={n: float(c) for n, c in zip(names, w)},
        intercept=float(b),
        metadata={
            "family": family,
            "epochs_run": epochs_run,
            "epochs_cap": config.epochs,
            "learning_rate": config.learning_rate,
            "l2": config.l2,
            "tol": config.tol,
            "seed": config.seed,
            "final_loss": prev_loss if epochs_run == config.epochs else None,
            "n_examples": len(examples),
        },
    )


def train_logistic(
    examples: Sequence[TrainExample],
    config: TrainConfig = TrainConfig(),
    catalog: Optional[FeatureCatalog] = None,
) -> ModelCoefficients:
    """L2-regularized logistic regression by full-batch gradient descent."""
    return _fit(examples, catalog or builtin_catalog(), config, logistic_loss_grad, "logistic")


def train_linear_svm(
    examples: Sequence[TrainExample],
    config: TrainConfig = TrainConfig(learning_rate=0.1),
    catalog: Optional[FeatureCatalog] = None,
) -> ModelCoefficients:
    """Linear SVM (hinge loss) on the same descent machinery."""
    return _fit(examples, catalog or builtin_catalog(), config, hinge_loss_grad, "svm")


MODEL_FAMILIES: dict[str, Callable[..., ModelCoefficients]] = {
    "logistic": train_logistic,
    "svm": train_linear_svm,
}


# ---------------------------------------------------------------------------
# weight conversion
# ---------------------------------------------------------------------------

def coefficients_to_weights(
    coeffs: ModelCoefficients, version: str = "learned-1"
) -> WeightTable:
    """Integer weights: round(1000 * coef) half away from zero, with a
    sign-preserving clamp to +-1 for tiny nonzero coefficients.  The
    intercept cancels in pair cost differences and is discarded."""
    weights: dict[str, int] = {}
    for name, c in coeffs.coef.items():
        if not math.isfinite(c):
            raise TrainingError(f"non-finite coefficient for {name}")
        w = _round_half_away(WEIGHT_SCALE * c)
        if w == 0 and c != 0.0:
            w = 1 if c > 0 else -1
        weights[name] = w
    return WeightTable(weights, version=version, provenance="learned")


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CVResult:
    per_fold: tuple[float, ...]
    mean: float
    family: str


def cross_validate(
    pairs: Sequence[DesignPair],
    plan: SplitPlan,
    model_family: str = "logistic",
    config: TrainConfig = TrainConfig(),
    catalog: Optional[FeatureCatalog] = None,
) -> CVResult:
    """Per-fold compliance accuracy: train on the other folds, convert the
    coefficients to integer weights, and score the held fold."""
    from .evaluate import accuracy  # local import to avoid a cycle

    catalog = catalog or builtin_catalog()
    if model_family not in MODEL_FAMILIES:
        raise ValueError(f"unknown model family {model_family!r}")
    trainer = MODEL_FAMILIES[model_family]
    by_id = {p.id: p for p in pairs}
    scores: list[float] = []
    for i, fold in enumerate(plan.folds):
        if not fold:
            raise TrainingError(f"fold {i} is empty")
        train_ids = [
            pid
            for j, other in enumerate(plan.folds)
            if j != i
            for pid in sorted(other)
        ]
        train_pairs = [by_id[pid] for pid in train_ids if pid in by_id]
        test_pairs = [by_id[pid] for pid in sorted(fold) if pid in by_id]
        if not train_pairs or not test_pairs:
            raise TrainingError(f"fold {i} has no usable pairs")
        examples = examples_for_pairs(train_pairs, catalog)
        coeffs = trainer(examples, config, catalog)
        weights = coefficients_to_weights(coeffs, version=f"cv-fold-{i}")
        table = accuracy(test_pairs, weights, catalog)
        scores.append(table.overall())
    return CVResult(
        per_fold=tuple(scores),
        mean=float(np.mean(scores)),
        family=model_family,
    )

"""Compliance scoring and knowledge-base analysis reports.

A labeled pair is compliant under a weight table when the preferred chart
costs strictly less (labels +-1), or when the costs sit within 2 absolute
integer units of each other (label 0, the near-tie rule, deliberately not
scale-invariant).  Every pair is judged in both orientations; disagreeing
verdicts mark the pair non-compliant as duplicate-inconsistent.  Cost-based
judging is orientation-symmetric by construction, but injected judges (e.g.
trained classifiers with an intercept) can disagree.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .features import FeatureCatalog, FeatureVector, builtin_catalog, extract_features
from .pairs import DesignPair
from .spec import ChartSpec
from .weights import WeightTable, cost

NEAR_TIE_MARGIN = 2

RULE_STRICT = "strict_order"
RULE_NEAR_TIE = "near_tie"
RULE_DUPLICATE_INCONSISTENT = "duplicate_inconsistent"


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ComplianceResult:
    pair_id: str
    compliant: bool
    cost_left: int
    cost_right: int
    rule_applied: str


#: A judge maps (left cost, right cost, label) to a compliance verdict.
Judge = Callable[[int, int, int], bool]


def cost_judge(cost_left: int, cost_right: int, label: int) -> bool:
    if label == 0:
        return abs(cost_left - cost_right) <= NEAR_TIE_MARGIN
    preferred, other = (
        (cost_left, cost_right) if label == -1 else (cost_right, cost_left)
    )
    return preferred < other


def compliance(
    pair: DesignPair,
    w: WeightTable,
    catalog: Optional[FeatureCatalog] = None,
    judge: Judge = cost_judge,
) -> ComplianceResult:
    """Dual-orientation compliance of one labeled pair under a weight table."""
    if not pair.labeled:
        raise EvaluationError(f"pair {pair.id} is unlabeled")
    catalog = catalog or builtin_catalog()
    cost_left = cost(extract_features(pair.left, catalog), w)
    cost_right = cost(extract_features(pair.right, catalog), w)
    label = int(pair.label)  # type: ignore[arg-type]
    verdict = judge(cost_left, cost_right, label)
    swapped_verdict = judge(cost_right, cost_left, -label)
    if verdict != swapped_verdict:
        return ComplianceResult(
            pair.id, False, cost_left, cost_right, RULE_DUPLICATE_INCONSISTENT
        )
    rule = RULE_NEAR_TIE if label == 0 else RULE_STRICT
    return ComplianceResult(pair.id, verdict, cost_left, cost_right, rule)


# ---------------------------------------------------------------------------
# accuracy tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AccuracyRow:
    slice_name: str
    slice_value: str
    n: int
    accuracy: Optional[float]  # None marks an undefined (empty) slice


@dataclass(frozen=True)
class AccuracyTable:
    rows: tuple[AccuracyRow, ...]

    def overall(self) -> float:
        for row in self.rows:
            if row.slice_name == "all":
                return row.accuracy if row.accuracy is not None else math.nan
        return math.nan

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["slice", "value", "n", "accuracy"])
            for row in self.rows:
                writer.writerow(
                    [
                        row.slice_name,
                        row.slice_value,
                        row.n,
                        "" if row.accuracy is None else f"{row.accuracy:.6f}",
                    ]
                )

    def to_dict(self) -> list[dict]:
        return [
            {
                "slice": r.slice_name,
                "value": r.slice_value,
                "n": r.n,
                "accuracy": r.accuracy,
            }
            for r in self.rows
        ]


DEFAULT_SLICES = ("source", "label_provenance", "group")


def accuracy(
    pairs: Sequence[DesignPair],
    w: WeightTable,
    catalog: Optional[FeatureCatalog] = None,
    slices: Sequence[str] = DEFAULT_SLICES,
) -> AccuracyTable:
    """Compliant fraction overall and per slice (source, provenance, group)."""
    catalog = catalog or builtin_catalog()
    results = [(p, compliance(p, w, catalog)) for p in pairs]
    rows: list[AccuracyRow] = [_acc_row("all", "all", [r for _, r in results])]
    for slice_name in slices:
        values: dict[str, list[ComplianceResult]] = {}
        for pair, result in results:
            value = getattr(pair, slice_name, None)
            values.setdefault(str(value) if value is not None else "none", []).append(result)
        for value in sorted(values):
            rows.append(_acc_row(slice_name, value, values[value]))
    return AccuracyTable(tuple(rows))


def _acc_row(name: str, value: str, results: Sequence[ComplianceResult]) -> AccuracyRow:
    n = len(results)
    if n == 0:
        return AccuracyRow(name, value, 0, None)
    return AccuracyRow(name, value, n, sum(r.compliant for r in results) / n)


# ---------------------------------------------------------------------------
# weight-shift report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightShift:
    feature: str
    shift: float  # (w_b - w_a) * relative frequency


def weight_shift_report(
    w_a: WeightTable,
    w_b: WeightTable,
    freq: Mapping[str, float],
) -> list[WeightShift]:
    """Frequency-weighted per-feature weight changes, largest magnitude first."""
    if set(w_a.weights) != set(w_b.weights):
        raise EvaluationError("weight tables must share a feature domain")
    shifts = [
        WeightShift(f, (w_b[f] - w_a[f]) * freq.get(f, 0.0))
        for f in sorted(w_a.weights)
    ]
    shifts.sort(key=lambda s: (-abs(s.shift), s.feature))
    return shifts


def write_shift_csv(shifts: Sequence[WeightShift], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "shift"])
        for s in shifts:
            writer.writerow([s.feature, f"{s.shift:.6f}"])


# ---------------------------------------------------------------------------
# cosine similarity between groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CosineMatrix:
    groups: tuple[str, ...]
    matrix: tuple[tuple[Optional[float], ...], ...]  # None marks undefined cells
    excluded_zero_vectors: Mapping[str, int]

    def cell(self, g: str, h: str) -> Optional[float]:
        i, j = self.groups.index(g), self.groups.index(h)
        return self.matrix[i][j]

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["group"] + list(self.groups))
            for g, row in zip(self.groups, self.matrix):
                writer.writerow(
                    [g] + ["" if v is None else f"{v:.6f}" for v in row]
                )


def _vectors_to_array(
    vectors: Sequence[FeatureVector], axis: Sequence[str]
) -> np.ndarray:
    index = {name: i for i, name in enumerate(axis)}
    arr = np.zeros((len(vectors), len(axis)))
    for r, fv in enumerate(vectors):
        for name, count in fv.items():
            arr[r, index[name]] = count
    return arr


def group_cosine_similarity(
    groups: Mapping[str, Sequence[FeatureVector]],
) -> CosineMatrix:
    """Mean pairwise cosine between (and within) groups of feature vectors.

    Zero vectors are excluded (with counts reported); a diagonal cell needs
    at least two nonzero vectors, otherwise it is undefined.
    """
    axis = sorted({name for vecs in groups.values() for fv in vecs for name in fv})
    names = tuple(sorted(groups))
    cleaned: dict[str, np.ndarray] = {}
    excluded: dict[str, int] = {}
    for g in names:
        arr = _vectors_to_array(groups[g], axis)
        norms = np.linalg.norm(arr, axis=1)
        keep = norms > 0
        excluded[g] = int((~keep).sum())
        arr = arr[keep]
        if arr.shape[0]:
            arr = arr / np.linalg.norm(arr, axis=1, keepdims=True)
        cleaned[g] = arr

    size = len(names)
    matrix: list[list[Optional[float]]] = [[None] * size for _ in range(size)]
    for i, g in enumerate(names):
        for j, h in enumerate(names):
            if j < i:
                continue
            a, b = cleaned[g], cleaned[h]
            if i == j:
                if a.shape[0] < 2:
                    continue
                sims = a @ a.T
                upper = sims[np.triu_indices(a.shape[0], k=1)]
                value = float(np.mean(upper))
            else:
                if a.shape[0] == 0 or b.shape[0] == 0:
                    continue
                value = float(np.mean(a @ b.T))
            matrix[i][j] = value
            matrix[j][i] = value
    return CosineMatrix(
        groups=names,
        matrix=tuple(tuple(row) for row in matrix),
        excluded_zero_vectors=excluded,
    )

"""Compliance rules, accuracy slices, shift and cosine reports."""

from __future__ import annotations

import math

import numpy as np
import pytest

from vizkb.evaluate import (
    AccuracyTable,
    ComplianceResult,
    EvaluationError,
    RULE_DUPLICATE_INCONSISTENT,
    RULE_NEAR_TIE,
    RULE_STRICT,
    accuracy,
    compliance,
    group_cosine_similarity,
    weight_shift_report,
)
from vizkb.features import FeatureVector, builtin_catalog
from vizkb.pairs import DesignPair
from vizkb.spec import Channel
from vizkb.weights import WeightTable

from conftest import build_spec, enc
from planted import hidden_weight_table, make_planted_corpus

CAT = builtin_catalog()

# Two one-encoding charts whose costs are exactly the channel weights, so a
# custom weight table dials in any (cost_left, cost_right) combination.
LEFT = build_spec(enc(Channel.X, "q1"))      # features: channel_x, linear_x, ...
RIGHT = build_spec(enc(Channel.Y, "q1"))     # features: channel_y, linear_y, ...
PURE = CAT.subset(["channel_x", "channel_y"])


def costed(cost_left: int, cost_right: int) -> WeightTable:
    return WeightTable({"channel_x": cost_left, "channel_y": cost_right},
                       provenance="manual")


def pair_with(label: int) -> DesignPair:
    return DesignPair(id="p", left=LEFT, right=RIGHT, label=label,
                      label_provenance="manual")


def check(label: int, cl: int, cr: int):
    return compliance(pair_with(label), costed(cl, cr), PURE)


def test_strict_order_compliant():
    result = check(-1, 5, 9)
    assert result.compliant and result.rule_applied == RULE_STRICT
    assert (result.cost_left, result.cost_right) == (5, 9)


def test_strict_order_wrong_direction():
    assert not check(1, 5, 9).compliant
    assert check(1, 9, 5).compliant


def test_near_tie_boundary():
    assert check(0, 10, 12).compliant          # |d| = 2 compliant
    assert not check(0, 10, 13).compliant      # |d| = 3 not
    assert check(0, 12, 10).compliant
    assert check(0, 10, 10).rule_applied == RULE_NEAR_TIE


def test_equal_costs_fail_strict_labels():
    assert not check(-1, 7, 7).compliant
    assert not check(1, 7, 7).compliant


def test_duplicate_inconsistency_with_asymmetric_judge():
    """A judge whose verdict depends on orientation (e.g. an intercept-bearing
    model) marks the pair duplicate-inconsistent."""

    def biased_judge(cost_left: int, cost_right: int, label: int) -> bool:
        return label == -1  # "yes" in one orientation, "no" in the other

    result = compliance(pair_with(-1), costed(5, 9), PURE, judge=biased_judge)
    assert not result.compliant
    assert result.rule_applied == RULE_DUPLICATE_INCONSISTENT


def test_cost_judge_is_orientation_invariant():
    for label, cl, cr in ((-1, 5, 9), (1, 5, 9), (0, 10, 12), (0, 10, 13)):
        direct = check(label, cl, cr)
        swapped = compliance(pair_with(label).swapped(), costed(cl, cr), PURE)
        assert direct.compliant == swapped.compliant


def test_unlabeled_pair_errors():
    unlabeled = DesignPair(id="p", left=LEFT, right=RIGHT)
    with pytest.raises(EvaluationError):
        compliance(unlabeled, costed(1, 2), PURE)


# -- accuracy ------------------------------------------------------------------

def test_single_compliant_pair_scores_one():
    table = accuracy([pair_with(-1)], costed(5, 9), PURE)
    assert table.overall() == 1.0


def test_accuracy_slices_by_source_and_group():
    hidden = hidden_weight_table(31)
    pairs = make_planted_corpus(30, hidden, seed=20)
    table = accuracy(pairs, hidden, CAT)
    names = {(r.slice_name, r.slice_value) for r in table.rows}
    assert ("all", "all") in names
    assert ("source", "corpus") in names
    assert ("group", "alpha") in names
    assert table.overall() == 1.0  # labels were generated from these weights


def test_flipped_weights_bound():
    hidden = hidden_weight_table(32)
    pairs = make_planted_corpus(40, hidden, seed=21)
    flipped = WeightTable({f: -w for f, w in hidden.weights.items()},
                          provenance="manual")
    acc = accuracy(pairs, hidden, CAT).overall()
    acc_flipped = accuracy(pairs, flipped, CAT).overall()
    # strict-order pairs flip verdicts; ties stay non-compliant on both sides
    assert acc_flipped <= 1.0 - acc + 1e-9


def test_empty_pairs_gives_undefined_marker():
    table = accuracy([], costed(1, 2), PURE)
    assert table.rows[0].n == 0
    assert table.rows[0].accuracy is None


def test_accuracy_csv_round_trip(tmp_path):
    table = accuracy([pair_with(-1)], costed(5, 9), PURE)
    path = tmp_path / "acc.csv"
    table.to_csv(str(path))
    text = path.read_text()
    assert "slice,value,n,accuracy" in text
    assert "all,all,1,1.000000" in text


# -- weight shift ---------------------------------------------------------------

def test_shift_identical_tables_all_zero():
    w = costed(3, 4)
    shifts = weight_shift_report(w, w, {"channel_x": 0.5, "channel_y": 0.1})
    assert all(s.shift == 0.0 for s in shifts)


def test_shift_zero_frequency_masks_change():
    shifts = weight_shift_report(
        costed(3, 4), costed(30, 4), {"channel_x": 0.0, "channel_y": 0.2}
    )
    assert all(s.shift == 0.0 for s in shifts)


def test_shift_hand_case_sorted_by_magnitude():
    w_a = WeightTable({"a": 1, "b": 2, "c": 3}, provenance="manual")
    w_b = WeightTable({"a": 5, "b": 0, "c": 3}, provenance="manual")
    freq = {"a": 0.5, "b": 2.0, "c": 1.0}
    shifts = weight_shift_report(w_a, w_b, freq)
    assert [(s.feature, s.shift) for s in shifts] == [
        ("b", -4.0), ("a", 2.0), ("c", 0.0),
    ]


def test_shift_domain_mismatch_errors():
    with pytest.raises(EvaluationError):
        weight_shift_report(
            costed(1, 2),
            WeightTable({"channel_x": 1}, provenance="manual"),
            {},
        )


# -- cosine similarity ------------------------------------------------------------

def test_orthogonal_groups_have_zero_cosine():
    groups = {
        "g1": [FeatureVector({"a": 1}), FeatureVector({"a": 2})],
        "g2": [FeatureVector({"b": 3}), FeatureVector({"b": 1})],
    }
    matrix = group_cosine_similarity(groups)
    assert matrix.cell("g1", "g2") == pytest.approx(0.0)
    assert matrix.cell("g1", "g1") == pytest.approx(1.0)


def test_identical_vectors_within_group_give_one():
    groups = {"g": [FeatureVector({"a": 2, "b": 1})] * 3}
    matrix = group_cosine_similarity(groups)
    assert matrix.cell("g", "g") == pytest.approx(1.0)


def test_matrix_symmetric_and_bounded():
    hidden = hidden_weight_table(33)
    pairs = make_planted_corpus(20, hidden, seed=22)
    from vizkb.features import extract_features

    groups = {
        "alpha": [extract_features(p.left, CAT) for p in pairs[:10]],
        "beta": [extract_features(p.right, CAT) for p in pairs[10:]],
    }
    matrix = group_cosine_similarity(groups)
    for i, g in enumerate(matrix.groups):
        for j, h in enumerate(matrix.groups):
            v = matrix.matrix[i][j]
            assert v == matrix.matrix[j][i]
            if v is not None:
                assert -1.0 - 1e-9 <= v <= 1.0 + 1e-9


def test_zero_vectors_excluded_and_small_diagonal_undefined():
    groups = {
        "tiny": [FeatureVector({}), FeatureVector({"a": 1})],
        "other": [FeatureVector({"a": 1}), FeatureVector({"b": 1})],
    }
    matrix = group_cosine_similarity(groups)
    assert matrix.excluded_zero_vectors["tiny"] == 1
    assert matrix.cell("tiny", "tiny") is None     # one nonzero vector only
    assert matrix.cell("tiny", "other") is not None


def test_cosine_csv(tmp_path):
    groups = {"g": [FeatureVector({"a": 1})] * 2}
    matrix = group_cosine_similarity(groups)
    path = tmp_path / "cos.csv"
    matrix.to_csv(str(path))
    assert path.read_text().startswith("group,g")

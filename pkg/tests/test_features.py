"""Feature catalog: soundness table, named-feature examples, cost algebra."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vizkb.features import FeatureVector, builtin_catalog, extract_features
from vizkb.hardrules import validate
from vizkb.spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    Coordinates,
    FacetDef,
    FacetDirection,
    MarkType,
    ScaleType,
    Stack,
)
from vizkb.weights import UnknownFeatureError, WeightTable, builtin_weights, cost

from conftest import build_spec, enc

CAT = builtin_catalog()


def spec_scatter(**kw):
    return build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"), **kw)


def spec_bar_cat(mark=MarkType.BAR):
    return build_spec(enc(Channel.X, "cat5"), enc(Channel.Y, "q1"), mark=mark)


def spec_histogram(bins=10):
    return build_spec(
        enc(Channel.X, "q1", bin=bins),
        enc(Channel.Y, COUNT_FIELD, aggregate=Aggregate.COUNT),
        mark=MarkType.BAR,
    )


def spec_agg(aggregate):
    return build_spec(
        enc(Channel.X, "cat5"),
        enc(Channel.Y, "q1", aggregate=aggregate),
        mark=MarkType.BAR,
    )


def spec_color(field):
    return build_spec(
        enc(Channel.X, "q1"), enc(Channel.Y, "q2"), enc(Channel.COLOR, field)
    )


def spec_faceted(direction):
    return build_spec(
        enc(Channel.X, "q1"), enc(Channel.Y, "q2"),
        facet=FacetDef(direction, "cat5"),
    )


def spec_two_layers():
    return build_spec(
        layers=[
            (MarkType.LINE, (enc(Channel.X, "when"), enc(Channel.Y, "q1"))),
            (MarkType.POINT, (enc(Channel.X, "when"), enc(Channel.Y, "q1"))),
        ]
    )


# Positive (count >= 1) and negative (count = 0) witnesses per feature.
SOUNDNESS = {
    "aggregate": (lambda: spec_agg(Aggregate.MEAN), spec_scatter),
    "aggregate_count": (spec_histogram, lambda: spec_agg(Aggregate.MEAN)),
    "aggregate_mean": (lambda: spec_agg(Aggregate.MEAN), spec_histogram),
    "aggregate_sum": (lambda: spec_agg(Aggregate.SUM), lambda: spec_agg(Aggregate.MEAN)),
    "bin": (spec_histogram, spec_scatter),
    "bin_high": (lambda: spec_histogram(12), lambda: spec_histogram(10)),
    "stack_zero": (
        lambda: build_spec(
            enc(Channel.X, "cat5"), enc(Channel.Y, "q1", stack=Stack.ZERO),
            mark=MarkType.BAR,
        ),
        spec_bar_cat,
    ),
    "stack_normalize": (
        lambda: build_spec(
            enc(Channel.X, "cat5"), enc(Channel.Y, "q1", stack=Stack.NORMALIZE),
            mark=MarkType.BAR,
        ),
        spec_bar_cat,
    ),
    "log_x": (
        lambda: spec_scatter(scales={Channel.X: ScaleType.LOG}), spec_scatter,
    ),
    "log_y": (
        lambda: spec_scatter(scales={Channel.Y: ScaleType.LOG}), spec_scatter,
    ),
    "linear_x": (spec_scatter, spec_bar_cat),
    "linear_y": (
        spec_scatter,
        lambda: build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "cat5")),
    ),
    "c_d_no_overlap_bar": (spec_bar_cat, lambda: spec_bar_cat(MarkType.POINT)),
    "c_d_no_overlap_area": (
        lambda: spec_bar_cat(MarkType.AREA), spec_bar_cat,
    ),
    "c_d_overlap_point": (
        lambda: spec_bar_cat(MarkType.POINT), spec_bar_cat,
    ),
    "value_continuous_x": (spec_scatter, spec_bar_cat),
    "value_continuous_y": (
        spec_scatter,
        lambda: build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "cat5")),
    ),
    "value_continuous_color": (
        lambda: spec_color("q1"), lambda: spec_color("cat5"),
    ),
    "interesting_x": (
        lambda: build_spec(enc(Channel.X, "qstar"), enc(Channel.Y, "q1")),
        spec_scatter,
    ),
    "interesting_y": (
        lambda: build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "qstar")),
        spec_scatter,
    ),
    "interesting_color": (
        lambda: spec_color("qstar"), lambda: spec_color("q1"),
    ),
    "x_row": (
        lambda: spec_faceted(FacetDirection.ROW),
        lambda: spec_faceted(FacetDirection.COL),
    ),
    "y_row": (
        lambda: spec_faceted(FacetDirection.ROW),
        lambda: spec_faceted(FacetDirection.COL),
    ),
    "horizontal_scrolling_x": (
        lambda: build_spec(
            enc(Channel.X, "cat30"),
            enc(Channel.Y, COUNT_FIELD, aggregate=Aggregate.COUNT),
            mark=MarkType.BAR,
        ),
        spec_bar_cat,
    ),
    "high_cardinality_shape": (
        lambda: build_spec(
            enc(Channel.X, "q1"), enc(Channel.Y, "q2"), enc(Channel.SHAPE, "cat30")
        ),
        lambda: build_spec(
            enc(Channel.X, "q1"), enc(Channel.Y, "q2"), enc(Channel.SHAPE, "cat5")
        ),
    ),
    "channel_x": (spec_scatter, lambda: build_spec(enc(Channel.COLOR, "cat5"))),
    "channel_y": (spec_scatter, lambda: build_spec(enc(Channel.X, "q1"))),
    "channel_color": (lambda: spec_color("cat5"), spec_scatter),
    "channel_size": (
        lambda: build_spec(
            enc(Channel.X, "q1"), enc(Channel.Y, "q2"), enc(Channel.SIZE, "q2")
        ),
        spec_scatter,
    ),
    "channel_shape": (
        lambda: build_spec(
            enc(Channel.X, "q1"), enc(Channel.Y, "q2"), enc(Channel.SHAPE, "cat5")
        ),
        spec_scatter,
    ),
    "channel_text": (
        lambda: build_spec(
            enc(Channel.X, "q1"), enc(Channel.Y, "q2"), enc(Channel.TEXT, "cat5")
        ),
        spec_scatter,
    ),
    "mark_point": (spec_scatter, spec_bar_cat),
    "mark_bar": (spec_bar_cat, spec_scatter),
    "mark_line": (lambda: spec_bar_cat(MarkType.LINE), spec_scatter),
    "mark_area": (lambda: spec_bar_cat(MarkType.AREA), spec_scatter),
    "mark_tick": (lambda: spec_bar_cat(MarkType.TICK), spec_scatter),
    "mark_rect": (lambda: spec_bar_cat(MarkType.RECT), spec_scatter),
    "facet_row": (
        lambda: spec_faceted(FacetDirection.ROW),
        lambda: spec_faceted(FacetDirection.COL),
    ),
    "facet_col": (
        lambda: spec_faceted(FacetDirection.COL),
        lambda: spec_faceted(FacetDirection.ROW),
    ),
    "polar_coords": (
        lambda: spec_scatter(coordinates=Coordinates.POLAR), spec_scatter,
    ),
    "multi_layer": (spec_two_layers, spec_scatter),
}


def test_catalog_has_at_least_30_features():
    assert len(CAT) >= 30


def test_soundness_table_covers_whole_catalog():
    assert set(SOUNDNESS) == set(CAT.names)


@pytest.mark.parametrize("feature", sorted(SOUNDNESS))
def test_catalog_soundness(feature):
    pos_builder, neg_builder = SOUNDNESS[feature]
    pos, neg = pos_builder(), neg_builder()
    assert validate(pos) == [], f"positive witness for {feature} is invalid"
    assert validate(neg) == [], f"negative witness for {feature} is invalid"
    assert extract_features(pos, CAT).get(feature) >= 1
    assert extract_features(neg, CAT).get(feature) == 0


def test_cd_no_overlap_bar_example():
    fv = extract_features(spec_bar_cat(), CAT)
    assert fv.get("c_d_no_overlap_bar") == 1


def test_log_linear_example():
    spec = spec_scatter(scales={Channel.Y: ScaleType.LOG})
    fv = extract_features(spec, CAT)
    assert fv.get("log_y") == 1
    assert fv.get("linear_x") == 1
    assert fv.get("log_x") == 0


def test_untriggerable_catalog_gives_zero_vector(scatter):
    sub = CAT.subset(["bin", "bin_high", "aggregate", "facet_row"])
    fv = extract_features(scatter, sub)
    assert fv.to_dict() == {}


def test_extraction_is_deterministic(scatter):
    assert extract_features(scatter, CAT) == extract_features(scatter, CAT)


# -- cost ---------------------------------------------------------------------

def test_cost_arithmetic():
    fv = FeatureVector({"a": 1, "b": 3})
    w = WeightTable({"a": 2, "b": -1}, provenance="manual")
    assert cost(fv, w) == -1


def test_cost_empty_vector():
    assert cost(FeatureVector({}), builtin_weights()) == 0


def test_cost_missing_feature_errors():
    with pytest.raises(UnknownFeatureError, match="mystery"):
        cost(FeatureVector({"mystery": 1}), builtin_weights())


@settings(max_examples=50, deadline=None)
@given(
    counts1=st.dictionaries(st.sampled_from(CAT.names[:12]), st.integers(0, 4)),
    counts2=st.dictionaries(st.sampled_from(CAT.names[:12]), st.integers(0, 4)),
)
def test_cost_linearity(counts1, counts2):
    w = builtin_weights()
    fv1, fv2 = FeatureVector(counts1), FeatureVector(counts2)
    assert cost(fv1 + fv2, w) == cost(fv1, w) + cost(fv2, w)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 50))
def test_argmin_invariant_under_positive_scaling(k):
    w = builtin_weights()
    fv_a = extract_features(spec_scatter(), CAT)
    fv_b = extract_features(spec_histogram(), CAT)
    base = cost(fv_a, w) - cost(fv_b, w)
    scaled = cost(fv_a, w.scaled(k)) - cost(fv_b, w.scaled(k))
    assert (base < 0) == (scaled < 0)
    assert (base == 0) == (scaled == 0)


def test_catalog_export_json():
    import json

    rows = json.loads(CAT.to_json())
    assert {r["name"] for r in rows} == set(CAT.names)
    assert all({"name", "weight", "description"} <= set(r) for r in rows)

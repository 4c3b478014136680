"""Identifier-free primitive tokens."""

from __future__ import annotations

from collections import Counter

import pytest

from vizkb.primitives import abstract_primitives, build_vocabulary, token_role
from vizkb.spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    FacetDef,
    FacetDirection,
    MarkType,
    ScaleType,
)

from conftest import build_spec, enc


def test_log_quantitative_color_tokens():
    spec = build_spec(
        enc(Channel.X, "cat5"),
        enc(Channel.Y, "q1"),
        enc(Channel.COLOR, "q2"),
        scales={Channel.COLOR: ScaleType.LOG},
    )
    tokens = abstract_primitives(spec)
    assert tokens["color"] == 1
    assert tokens["color.quantitative"] == 1
    assert tokens["color.log"] == 1


def test_no_entity_identifiers_and_determinism(scatter):
    tokens = abstract_primitives(scatter)
    assert all(not any(ch.isdigit() for ch in t.split(".")[0]) for t in tokens)
    assert abstract_primitives(scatter) == tokens


def test_layer_duplication_multiplies_tokens():
    spec = build_spec(
        layers=[
            (MarkType.LINE, (enc(Channel.X, "when"), enc(Channel.Y, "q1"))),
            (MarkType.LINE, (enc(Channel.X, "when"), enc(Channel.Y, "q1"))),
        ]
    )
    tokens = abstract_primitives(spec)
    assert tokens["mark.line"] == 2
    assert tokens["x"] == 2
    assert tokens["x.temporal"] == 2
    # scales are per view, not per layer
    assert tokens["x.linear"] == 1


def test_line_chart_tokens_cover_mark_scale_facet():
    spec = build_spec(
        enc(Channel.X, "when"),
        enc(Channel.Y, "q1"),
        enc(Channel.COLOR, "cat5"),
        mark=MarkType.LINE,
        scales={Channel.Y: ScaleType.LOG},
    )
    tokens = abstract_primitives(spec)
    for expected in ("mark.line", "y.log", "color", "color.categorical",
                     "color.nominal", "x.temporal", "coordinates.cartesian"):
        assert tokens[expected] == 1, expected


def test_count_bin_aggregate_facet_tokens():
    spec = build_spec(
        enc(Channel.X, "q1", bin=12),
        enc(Channel.Y, COUNT_FIELD, aggregate=Aggregate.COUNT),
        mark=MarkType.BAR,
        facet=FacetDef(FacetDirection.ROW, "cat5"),
    )
    tokens = abstract_primitives(spec)
    assert tokens["x.binned"] == 1
    assert tokens["x.binned.12"] == 1
    assert tokens["y.count"] == 1
    assert tokens["facet.row"] == 1


def test_aggregate_tokens_for_real_fields():
    spec = build_spec(
        enc(Channel.X, "cat5"),
        enc(Channel.Y, "q1", aggregate=Aggregate.MEAN),
        mark=MarkType.BAR,
    )
    tokens = abstract_primitives(spec)
    assert tokens["y.mean"] == 1
    assert tokens["y.quantitative"] == 1


def test_token_roles():
    assert token_role("color.log") == "color"
    assert token_role("mark.line") == "mark"
    assert token_role("facet.row") == "facet"
    assert token_role("coordinates.polar") == "coordinates"
    with pytest.raises(ValueError):
        token_role("bogus.thing")


def test_vocabulary_is_sorted_union(scatter, histogram):
    vocab = build_vocabulary([scatter, histogram])
    assert list(vocab) == sorted(set(vocab))
    assert set(abstract_primitives(scatter)) <= set(vocab)
    assert set(abstract_primitives(histogram)) <= set(vocab)

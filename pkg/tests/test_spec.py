"""Spec model: invariants, JSON round trips, canonical hashing."""

from __future__ import annotations

import pytest

from vizkb.spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    ChartSpec,
    DType,
    EncodingDef,
    FacetDef,
    FacetDirection,
    FieldDef,
    MarkDef,
    MarkType,
    ScaleDef,
    ScaleType,
    StructuralError,
    canonical_sort_key,
    canonicalize,
    spec_from_dict,
    spec_hash,
    spec_to_dict,
)

from conftest import ALL_FIELDS, CAT5, Q1, Q2, build_spec, enc


class TestFieldDef:
    def test_cardinality_must_be_positive(self):
        with pytest.raises(ValueError):
            FieldDef("f", DType.NUMBER, cardinality=0)

    def test_extent_order(self):
        with pytest.raises(ValueError, match="extent"):
            FieldDef("f", DType.NUMBER, extent=(5.0, 1.0))

    def test_entropy_bounded_by_cardinality(self):
        with pytest.raises(ValueError, match="entropy"):
            FieldDef("f", DType.STRING, cardinality=4, entropy=3.0)
        FieldDef("f", DType.STRING, cardinality=4, entropy=2.0)  # exactly log2(4)


class TestEncodingDef:
    def test_count_sentinel_requires_count_aggregate(self):
        with pytest.raises(ValueError):
            EncodingDef(Channel.Y, COUNT_FIELD, aggregate=Aggregate.NONE)
        EncodingDef(Channel.Y, COUNT_FIELD, aggregate=Aggregate.COUNT)

    def test_bin_and_aggregate_are_exclusive(self):
        with pytest.raises(ValueError):
            EncodingDef(Channel.X, "q1", aggregate=Aggregate.MEAN, bin=10)

    def test_bin_minimum(self):
        with pytest.raises(ValueError):
            EncodingDef(Channel.X, "q1", bin=1)


def test_layer_count_bounds():
    mark = MarkDef(MarkType.POINT, (enc(Channel.X, "q1"),))
    with pytest.raises(ValueError):
        ChartSpec(dataset=ALL_FIELDS, marks=(mark,) * 3, scales=())


def test_resolve_unknown_field_is_structural():
    spec = build_spec(enc(Channel.X, "q1"))
    with pytest.raises(StructuralError):
        spec.resolve("nope")
    assert spec.resolve(COUNT_FIELD) is None
    assert spec.resolve("q1") is Q1


def test_json_round_trip(scatter, histogram):
    for spec in (scatter, histogram):
        again = spec_from_dict(spec_to_dict(spec))
        assert again == spec
        assert spec_hash(again) == spec_hash(spec)


def test_json_round_trip_with_facet():
    spec = build_spec(
        enc(Channel.X, "q1"),
        enc(Channel.Y, "q2"),
        facet=FacetDef(FacetDirection.ROW, "cat5"),
    )
    assert spec_from_dict(spec_to_dict(spec)) == spec


def test_hash_ignores_encoding_and_scale_order():
    a = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"))
    b = ChartSpec(
        dataset=a.dataset,
        marks=(MarkDef(MarkType.POINT, (enc(Channel.Y, "q2"), enc(Channel.X, "q1"))),),
        scales=tuple(reversed(a.scales)),
    )
    assert spec_hash(a) == spec_hash(b)
    assert canonicalize(a) == canonicalize(b)


def test_hash_distinguishes_fields_and_marks():
    a = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"))
    b = build_spec(enc(Channel.X, "q2"), enc(Channel.Y, "q1"))
    c = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"), mark=MarkType.TICK)
    assert len({spec_hash(a), spec_hash(b), spec_hash(c)}) == 3


def test_canonical_sort_key_total_on_distinct_specs():
    a = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"))
    b = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"), mark=MarkType.BAR)
    c = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"),
                   scales={Channel.Y: ScaleType.LOG})
    keys = {canonical_sort_key(s) for s in (a, b, c)}
    assert len(keys) == 3
    assert sorted([a, b, c], key=canonical_sort_key) == sorted(
        [c, b, a], key=canonical_sort_key
    )

"""Shared builders for hand-written chart specs."""

from __future__ import annotations

import pytest

from vizkb.spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    ChartSpec,
    Coordinates,
    DType,
    EncodingDef,
    FacetDef,
    FacetDirection,
    FieldDef,
    MarkDef,
    MarkType,
    ScaleDef,
    ScaleType,
    Stack,
)

# -- reusable fields ---------------------------------------------------------

Q1 = FieldDef("q1", DType.NUMBER, cardinality=50, entropy=5.0, extent=(1.0, 100.0))
Q2 = FieldDef("q2", DType.NUMBER, cardinality=60, entropy=5.5, extent=(0.5, 40.0))
QNEG = FieldDef("qneg", DType.NUMBER, cardinality=40, entropy=5.0, extent=(-5.0, 5.0))
QBIG = FieldDef("qbig", DType.NUMBER, cardinality=500, entropy=8.0, extent=(2.0, 900.0))
CAT5 = FieldDef("cat5", DType.STRING, cardinality=5, entropy=2.2)
CAT3 = FieldDef("cat3", DType.STRING, cardinality=3, entropy=1.5)
CAT30 = FieldDef("cat30", DType.STRING, cardinality=30, entropy=4.8)
CAT200 = FieldDef("cat200", DType.STRING, cardinality=200, entropy=7.5)
TIME = FieldDef(
    "when", DType.DATETIME, cardinality=48, entropy=5.0,
    extent=(1577836800.0, 1672531200.0),
)
FLAG = FieldDef("flag", DType.BOOLEAN, cardinality=2, entropy=1.0)
QSTAR = FieldDef(
    "qstar", DType.NUMBER, cardinality=45, entropy=5.0, extent=(3.0, 60.0),
    interesting=True,
)

ALL_FIELDS = (Q1, Q2, QNEG, QBIG, CAT5, CAT3, CAT30, CAT200, TIME, FLAG, QSTAR)


def default_scale(dataset, enc: EncodingDef) -> ScaleType:
    if enc.field == COUNT_FIELD:
        return ScaleType.LINEAR
    fld = next(f for f in dataset if f.name == enc.field)
    if enc.bin is not None:
        return ScaleType.ORDINAL
    if fld.dtype in (DType.STRING, DType.BOOLEAN):
        return ScaleType.CATEGORICAL
    return ScaleType.LINEAR


def build_spec(
    *encodings: EncodingDef,
    mark: MarkType = MarkType.POINT,
    dataset=ALL_FIELDS,
    scales: dict[Channel, ScaleType] | None = None,
    facet: FacetDef | None = None,
    coordinates: Coordinates = Coordinates.CARTESIAN,
    layers: list[tuple[MarkType, tuple[EncodingDef, ...]]] | None = None,
) -> ChartSpec:
    """One-layer spec with auto-derived scales (overridable per channel)."""
    if layers is None:
        layers = [(mark, tuple(encodings))]
    scale_map: dict[Channel, ScaleType] = {}
    for _, encs in layers:
        for enc in encs:
            scale_map.setdefault(enc.channel, default_scale(dataset, enc))
    if scales:
        scale_map.update(scales)
    return ChartSpec(
        dataset=tuple(dataset),
        coordinates=coordinates,
        marks=tuple(MarkDef(mtype=mt, encodings=encs) for mt, encs in layers),
        scales=tuple(ScaleDef(ch, st) for ch, st in scale_map.items()),
        facet=facet,
    )


def enc(channel: Channel, field: str, aggregate=Aggregate.NONE, bin=None,
        stack=Stack.NONE) -> EncodingDef:
    return EncodingDef(channel=channel, field=field, aggregate=aggregate,
                       bin=bin, stack=stack)


@pytest.fixture
def scatter() -> ChartSpec:
    return build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"))


@pytest.fixture
def histogram() -> ChartSpec:
    return build_spec(
        enc(Channel.X, "q1", bin=10),
        enc(Channel.Y, COUNT_FIELD, aggregate=Aggregate.COUNT),
        mark=MarkType.BAR,
    )


@pytest.fixture
def cat_bar() -> ChartSpec:
    return build_spec(
        enc(Channel.X, "cat5"),
        enc(Channel.Y, "q1", aggregate=Aggregate.MEAN),
        mark=MarkType.BAR,
    )

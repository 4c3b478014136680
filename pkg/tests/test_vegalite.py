"""Render-grammar export and preview-data synthesis."""

from __future__ import annotations

import json

from vizkb.spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    Coordinates,
    FacetDef,
    FacetDirection,
    MarkType,
    ScaleType,
)
from vizkb.vegalite import VEGA_LITE_SCHEMA, export_vegalite, synthesize_rows

from conftest import ALL_FIELDS, build_spec, enc


def test_scatter_export(scatter):
    doc = export_vegalite(scatter)
    assert doc["$schema"] == VEGA_LITE_SCHEMA
    assert doc["mark"] == "point"
    assert doc["encoding"]["x"] == {"field": "q1", "type": "quantitative"}
    assert doc["data"]["values"]


def test_histogram_and_log_scale_export(histogram):
    doc = export_vegalite(histogram)
    assert doc["encoding"]["x"]["bin"] == {"maxbins": 10}
    assert doc["encoding"]["y"] == {"aggregate": "count", "type": "quantitative"}

    logspec = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"),
                         scales={Channel.Y: ScaleType.LOG})
    doc = export_vegalite(logspec)
    assert doc["encoding"]["y"]["scale"] == {"type": "log"}


def test_facet_and_layer_export():
    spec = build_spec(
        layers=[
            (MarkType.LINE, (enc(Channel.X, "when"), enc(Channel.Y, "q1"))),
            (MarkType.POINT, (enc(Channel.X, "when"), enc(Channel.Y, "q1"))),
        ],
        facet=FacetDef(FacetDirection.ROW, "cat5"),
    )
    doc = export_vegalite(spec)
    assert doc["facet"]["row"]["field"] == "cat5"
    assert len(doc["spec"]["layer"]) == 2


def test_polar_bar_maps_to_arc():
    spec = build_spec(
        enc(Channel.X, "cat5"),
        enc(Channel.Y, COUNT_FIELD, aggregate=Aggregate.COUNT),
        mark=MarkType.BAR,
        coordinates=Coordinates.POLAR,
    )
    doc = export_vegalite(spec)
    assert doc["mark"] == "arc"
    assert "theta" in doc["encoding"]


def test_rows_match_schema_and_are_deterministic():
    rows_a = synthesize_rows(ALL_FIELDS, seed=3)
    rows_b = synthesize_rows(ALL_FIELDS, seed=3)
    assert rows_a == rows_b
    names = {f.name for f in ALL_FIELDS}
    assert set(rows_a[0]) == names
    cats = {r["cat5"] for r in rows_a}
    assert len(cats) <= 5
    q1 = [r["q1"] for r in rows_a]
    assert all(1.0 <= v <= 100.0 for v in q1)
    flags = {r["flag"] for r in rows_a}
    assert flags <= {True, False}


def test_export_is_json_serializable(scatter):
    json.dumps(export_vegalite(scatter))

"""Render-grammar export (Vega-Lite v5 compatible JSON).

Chart specs carry only a dataset schema, so preview rendering synthesizes
sample rows consistent with each field's dtype, cardinality, and extent
(seeded, deterministic).  The mapping covers every mark/encoding/scale/
facet combination the choice grammar produces; polar bar charts map to arc
marks, other polar combinations fall back to their cartesian rendering with
a note in the document description.
"""

from __future__ import annotations

import datetime as _dt
import random
from typing import Any, Optional, Sequence

from .spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    ChartSpec,
    Coordinates,
    DType,
    EncodingDef,
    FacetDirection,
    FieldDef,
    MarkDef,
    MarkType,
    ScaleType,
    Stack,
)

VEGA_LITE_SCHEMA = "https://vega.github.io/schema/vega-lite/v5.json"

_MARK_MAP = {
    MarkType.POINT: "point",
    MarkType.BAR: "bar",
    MarkType.LINE: "line",
    MarkType.AREA: "area",
    MarkType.TICK: "tick",
    MarkType.RECT: "rect",
}

_FACET_CHANNEL = {FacetDirection.ROW: "row", FacetDirection.COL: "column"}


def synthesize_rows(
    dataset: Sequence[FieldDef], seed: int = 0, max_rows: int = 240
) -> list[dict[str, Any]]:
    """Deterministic sample rows matching each field's schema."""
    rng = random.Random(seed)
    n_rows = min(max_rows, max(30, max((f.cardinality for f in dataset), default=30)))
    columns: dict[str, list[Any]] = {}
    for fld in dataset:
        columns[fld.name] = _synthesize_column(fld, n_rows, rng)
    return [
        {name: columns[name][i] for name in columns} for i in range(n_rows)
    ]


def _synthesize_column(fld: FieldDef, n: int, rng: random.Random) -> list[Any]:
    if fld.dtype is DType.NUMBER:
        lo, hi = fld.extent or (0.0, 1.0)
        levels = [
            lo + (hi - lo) * i / max(fld.cardinality - 1, 1)
            for i in range(fld.cardinality)
        ]
        return [round(rng.choice(levels), 4) for _ in range(n)]
    if fld.dtype is DType.DATETIME:
        lo, hi = fld.extent or (1577836800.0, 1672531200.0)
        levels = [
            lo + (hi - lo) * i / max(fld.cardinality - 1, 1)
            for i in range(fld.cardinality)
        ]
        return [
            _dt.datetime.fromtimestamp(rng.choice(levels), tz=_dt.timezone.utc)
            .date()
            .isoformat()
            for _ in range(n)
        ]
    if fld.dtype is DType.BOOLEAN:
        return [rng.random() < 0.5 for _ in range(n)]
    categories = [f"{fld.name}_{i}" for i in range(fld.cardinality)]
    return [rng.choice(categories) for _ in range(n)]


def _vl_type(spec: ChartSpec, enc: EncodingDef) -> str:
    if enc.is_count:
        return "quantitative"
    fld = spec.resolve(enc.field)
    assert fld is not None
    if fld.dtype is DType.NUMBER:
        return "quantitative"
    if fld.dtype is DType.DATETIME:
        return "temporal"
    return "nominal"


def _vl_encoding(spec: ChartSpec, enc: EncodingDef) -> dict[str, Any]:
    if enc.is_count:
        out: dict[str, Any] = {"aggregate": "count", "type": "quantitative"}
    else:
        out = {"field": enc.field, "type": _vl_type(spec, enc)}
        if enc.aggregate is not Aggregate.NONE:
            out["aggregate"] = enc.aggregate.value
        if enc.bin is not None:
            out["bin"] = {"maxbins": enc.bin}
    scale = spec.scale_for(enc.channel)
    if scale is not None:
        if scale.stype is ScaleType.LOG:
            out["scale"] = {"type": "log"}
        elif scale.stype is ScaleType.ORDINAL and not enc.is_count:
            out["type"] = "ordinal"
    if enc.stack is not Stack.NONE:
        out["stack"] = "zero" if enc.stack is Stack.ZERO else "normalize"
    return out


def _unit_spec(spec: ChartSpec, mark: MarkDef, polar: bool) -> dict[str, Any]:
    encoding: dict[str, Any] = {}
    if polar and mark.mtype is MarkType.BAR:
        # Polar bars render as arcs: positional channels map to theta/color.
        vl_mark = "arc"
        for enc in mark.encodings:
            if enc.channel is Channel.Y:
                encoding["theta"] = _vl_encoding(spec, enc)
            elif enc.channel is Channel.X:
                encoding["color"] = _vl_encoding(spec, enc)
            else:
                encoding[enc.channel.value] = _vl_encoding(spec, enc)
    else:
        vl_mark = _MARK_MAP[mark.mtype]
        for enc in mark.encodings:
            encoding[enc.channel.value] = _vl_encoding(spec, enc)
    return {"mark": vl_mark, "encoding": encoding}


def export_vegalite(
    spec: ChartSpec,
    seed: int = 0,
    rows: Optional[list[dict[str, Any]]] = None,
) -> dict[str, Any]:
    """A self-contained Vega-Lite document for one chart spec."""
    polar = spec.coordinates is Coordinates.POLAR
    data = {"values": rows if rows is not None else synthesize_rows(spec.dataset, seed)}
    units = [_unit_spec(spec, mark, polar) for mark in spec.marks]

    doc: dict[str, Any]
    if len(units) == 1:
        doc = dict(units[0])
    else:
        doc = {"layer": units}

    if spec.facet is not None:
        facet_channel = _FACET_CHANNEL[spec.facet.direction]
        facet_def: dict[str, Any] = {"field": spec.facet.field, "type": "nominal"}
        ffld = spec.resolve(spec.facet.field)
        if ffld is not None and ffld.dtype is DType.NUMBER and spec.facet.bin:
            facet_def = {
                "field": spec.facet.field,
                "type": "quantitative",
                "bin": {"maxbins": spec.facet.bin},
            }
        doc = {"facet": {facet_channel: facet_def}, "spec": doc}

    doc["$schema"] = VEGA_LITE_SCHEMA
    doc["data"] = data
    if polar and not all(m.mtype is MarkType.BAR for m in spec.marks):
        doc["description"] = (
            "polar coordinates approximated with a cartesian rendering"
        )
    return doc

"""Soft-constraint design features.

A design feature is a named counting predicate over a chart; its count is
the number of times the chart "violates" (i.e. exhibits) the feature.  The
built-in catalog ships the well-known feature names plus plumbing features
(per-channel and per-mark usage) so that cost surfaces are non-degenerate.

Thresholds are fixed constants: bin_high fires at 12+ bins and the
high-cardinality features at cardinality > 20.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional

from .spec import (
    Aggregate,
    Channel,
    ChartSpec,
    Coordinates,
    DType,
    EncodingDef,
    FacetDirection,
    MarkType,
    ScaleType,
    Stack,
    encoding_is_continuous,
    encoding_is_discrete,
)

BIN_HIGH_THRESHOLD = 12
HIGH_CARDINALITY_THRESHOLD = 20

Predicate = Callable[[ChartSpec], int]


@dataclass(frozen=True)
class FeatureDef:
    name: str
    predicate: Predicate
    default_weight: int
    description: str


@dataclass(frozen=True)
class FeatureVector:
    """Sparse feature counts; an absent key means count 0."""

    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "counts", {k: int(v) for k, v in self.counts.items() if v != 0}
        )

    def get(self, name: str) -> int:
        return self.counts.get(name, 0)

    def __getitem__(self, name: str) -> int:
        return self.get(name)

    def __iter__(self) -> Iterator[str]:
        return iter(self.counts)

    def items(self) -> Iterable[tuple[str, int]]:
        return self.counts.items()

    def total(self) -> int:
        return sum(self.counts.values())

    def __add__(self, other: "FeatureVector") -> "FeatureVector":
        merged = dict(self.counts)
        for k, v in other.counts.items():
            merged[k] = merged.get(k, 0) + v
        return FeatureVector(merged)

    def to_dict(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))


class UnknownFeatureError(KeyError):
    pass


class FeatureCatalog:
    """Ordered, name-unique collection of FeatureDefs."""

    def __init__(self, features: Iterable[FeatureDef]):
        self._features: dict[str, FeatureDef] = {}
        for f in features:
            if f.name in self._features:
                raise ValueError(f"duplicate feature name {f.name!r}")
            self._features[f.name] = f

    def __len__(self) -> int:
        return len(self._features)

    def __contains__(self, name: str) -> bool:
        return name in self._features

    def __iter__(self) -> Iterator[FeatureDef]:
        return iter(self._features.values())

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._features)

    def get(self, name: str) -> FeatureDef:
        try:
            return self._features[name]
        except KeyError:
            raise UnknownFeatureError(name) from None

    def subset(self, names: Iterable[str]) -> "FeatureCatalog":
        return FeatureCatalog(self.get(n) for n in names)

    def default_weights(self) -> dict[str, int]:
        return {f.name: f.default_weight for f in self}

    def to_json(self) -> str:
        rows = [
            {"name": f.name, "weight": f.default_weight, "description": f.description}
            for f in self
        ]
        return json.dumps(rows, indent=2)


def extract_features(spec: ChartSpec, catalog: FeatureCatalog) -> FeatureVector:
    """Count every catalog feature on a (valid) chart.

    Extraction is pure; results are memoized on the immutable spec.
    """
    cache = spec.__dict__.get("_feature_cache")
    if cache is None:
        cache = {}
        object.__setattr__(spec, "_feature_cache", cache)
    fv = cache.get(catalog)
    if fv is None:
        fv = FeatureVector({f.name: f.predicate(spec) for f in catalog})
        cache[catalog] = fv
    return fv


# ---------------------------------------------------------------------------
# predicate helpers
# ---------------------------------------------------------------------------

def _encodings(spec: ChartSpec) -> tuple[EncodingDef, ...]:
    return spec.all_encodings()


def _count_enc(spec: ChartSpec, test: Callable[[ChartSpec, EncodingDef], bool]) -> int:
    return sum(1 for enc in spec.all_encodings() if test(spec, enc))


def _channel_encs(spec: ChartSpec, channel: Channel) -> list[EncodingDef]:
    return [enc for enc in spec.all_encodings() if enc.channel is channel]


def _scale_is(spec: ChartSpec, channel: Channel, stype: ScaleType) -> int:
    s = spec.scale_for(channel)
    return 1 if s is not None and s.stype is stype else 0


def _field_cardinality(spec: ChartSpec, enc: EncodingDef) -> int:
    if enc.is_count:
        return 1
    fld = spec.resolve(enc.field)
    assert fld is not None
    return fld.cardinality


def _mixed_positions(spec: ChartSpec, mark, mtype: MarkType) -> bool:
    """One continuous and one discrete positional channel on a mark."""
    if mark.mtype is not mtype:
        return False
    pos = [e for e in mark.encodings if e.channel in (Channel.X, Channel.Y)]
    if len(pos) < 2:
        return False
    kinds = {
        "c" if encoding_is_continuous(spec, e) else
        "d" if encoding_is_discrete(spec, e) else "?"
        for e in pos
    }
    return kinds == {"c", "d"}


def _interesting_on(spec: ChartSpec, channel: Channel) -> int:
    n = 0
    for enc in _channel_encs(spec, channel):
        if enc.is_count:
            continue
        fld = spec.resolve(enc.field)
        if fld is not None and fld.interesting:
            n += 1
    return n


def _value_continuous(spec: ChartSpec, channel: Channel) -> int:
    return sum(
        1 for enc in _channel_encs(spec, channel) if encoding_is_continuous(spec, enc)
    )


# ---------------------------------------------------------------------------
# builtin catalog
# ---------------------------------------------------------------------------

def _builtin_defs() -> list[FeatureDef]:
    defs: list[FeatureDef] = []

    def add(name: str, weight: int, description: str, pred: Predicate) -> None:
        defs.append(FeatureDef(name, pred, weight, description))

    # transforms
    add("aggregate", 3, "any aggregated encoding",
        lambda s: _count_enc(s, lambda s, e: e.aggregate is not Aggregate.NONE))
    add("aggregate_count", 1, "count-aggregated encoding",
        lambda s: _count_enc(s, lambda s, e: e.aggregate is Aggregate.COUNT))
    add("aggregate_mean", 1, "mean-aggregated encoding",
        lambda s: _count_enc(s, lambda s, e: e.aggregate is Aggregate.MEAN))
    add("aggregate_sum", 2, "sum-aggregated encoding",
        lambda s: _count_enc(s, lambda s, e: e.aggregate is Aggregate.SUM))
    add("bin", 3, "binned encoding",
        lambda s: _count_enc(s, lambda s, e: e.bin is not None))
    add("bin_high", 17, f"binned encoding with {BIN_HIGH_THRESHOLD}+ bins",
        lambda s: _count_enc(s, lambda s, e: e.bin is not None and e.bin >= BIN_HIGH_THRESHOLD))
    add("stack_zero", 2, "zero-baseline stacked encoding",
        lambda s: _count_enc(s, lambda s, e: e.stack is Stack.ZERO))
    add("stack_normalize", 6, "normalized stacked encoding",
        lambda s: _count_enc(s, lambda s, e: e.stack is Stack.NORMALIZE))

    # scales on positional channels
    add("log_x", 9, "log scale on x", lambda s: _scale_is(s, Channel.X, ScaleType.LOG))
    add("log_y", 9, "log scale on y", lambda s: _scale_is(s, Channel.Y, ScaleType.LOG))
    add("linear_x", -2, "linear scale on x",
        lambda s: _scale_is(s, Channel.X, ScaleType.LINEAR))
    add("linear_y", -2, "linear scale on y",
        lambda s: _scale_is(s, Channel.Y, ScaleType.LINEAR))

    # mark-versus-position interplay
    add("c_d_no_overlap_bar", -8,
        "bar mark with one continuous and one discrete positional channel",
        lambda s: sum(1 for m in s.marks if _mixed_positions(s, m, MarkType.BAR)))
    add("c_d_no_overlap_area", 6,
        "area mark with one continuous and one discrete positional channel",
        lambda s: sum(1 for m in s.marks if _mixed_positions(s, m, MarkType.AREA)))
    add("c_d_overlap_point", 2,
        "point mark with one continuous and one discrete positional channel",
        lambda s: sum(1 for m in s.marks if _mixed_positions(s, m, MarkType.POINT)))

    # continuous values per channel
    add("value_continuous_x", -3, "continuous values on x",
        lambda s: _value_continuous(s, Channel.X))
    add("value_continuous_y", -3, "continuous values on y",
        lambda s: _value_continuous(s, Channel.Y))
    add("value_continuous_color", 5, "continuous values on color",
        lambda s: _value_continuous(s, Channel.COLOR))

    # fields of interest
    add("interesting_x", -9, "field of interest on x",
        lambda s: _interesting_on(s, Channel.X))
    add("interesting_y", -8, "field of interest on y",
        lambda s: _interesting_on(s, Channel.Y))
    add("interesting_color", -2, "field of interest on color",
        lambda s: _interesting_on(s, Channel.COLOR))

    # layout interplay
    add("x_row", 4, "x channel together with row faceting",
        lambda s: 1 if s.facet is not None and s.facet.direction is FacetDirection.ROW
        and any(e.channel is Channel.X for e in _encodings(s)) else 0)
    add("y_row", 6, "y channel together with row faceting",
        lambda s: 1 if s.facet is not None and s.facet.direction is FacetDirection.ROW
        and any(e.channel is Channel.Y for e in _encodings(s)) else 0)
    add("horizontal_scrolling_x", 20,
        f"discrete x axis with more than {HIGH_CARDINALITY_THRESHOLD} values",
        lambda s: _count_enc(
            s,
            lambda s, e: e.channel is Channel.X
            and (
                (not e.is_count and e.bin is None
                 and spec_field(s, e).dtype in (DType.STRING, DType.BOOLEAN)
                 and spec_field(s, e).cardinality > HIGH_CARDINALITY_THRESHOLD)
                or (e.bin is not None and e.bin > HIGH_CARDINALITY_THRESHOLD)
            ),
        ))
    add("high_cardinality_shape", 26,
        f"shape channel over more than {HIGH_CARDINALITY_THRESHOLD} categories",
        lambda s: _count_enc(
            s,
            lambda s, e: e.channel is Channel.SHAPE and not e.is_count
            and _field_cardinality(s, e) > HIGH_CARDINALITY_THRESHOLD,
        ))

    # plumbing: channel usage
    channel_weights = {
        Channel.X: -4, Channel.Y: -4, Channel.COLOR: 4,
        Channel.SIZE: 8, Channel.SHAPE: 10, Channel.TEXT: 12,
    }
    for ch, w in channel_weights.items():
        add(f"channel_{ch.value}", w, f"encoding on the {ch.value} channel",
            lambda s, ch=ch: len(_channel_encs(s, ch)))

    # plumbing: mark usage
    mark_weights = {
        MarkType.POINT: 0, MarkType.TICK: 1, MarkType.BAR: 1,
        MarkType.LINE: 2, MarkType.AREA: 5, MarkType.RECT: 4,
    }
    for mt, w in mark_weights.items():
        add(f"mark_{mt.value}", w, f"layer with {mt.value} mark",
            lambda s, mt=mt: sum(1 for m in s.marks if m.mtype is mt))

    # plumbing: layout
    add("facet_row", 7, "row faceting",
        lambda s: 1 if s.facet is not None and s.facet.direction is FacetDirection.ROW else 0)
    add("facet_col", 7, "column faceting",
        lambda s: 1 if s.facet is not None and s.facet.direction is FacetDirection.COL else 0)
    add("polar_coords", 15, "polar coordinate system",
        lambda s: 1 if s.coordinates is Coordinates.POLAR else 0)
    add("multi_layer", 12, "layers beyond the first",
        lambda s: len(s.marks) - 1)

    return defs


def spec_field(spec: ChartSpec, enc: EncodingDef):
    fld = spec.resolve(enc.field)
    assert fld is not None
    return fld


_BUILTIN: Optional[FeatureCatalog] = None


def builtin_catalog() -> FeatureCatalog:
    """The built-in feature catalog (singleton; catalogs are immutable)."""
    global _BUILTIN
    if _BUILTIN is None:
        _BUILTIN = FeatureCatalog(_builtin_defs())
    return _BUILTIN

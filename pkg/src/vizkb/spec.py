"""Declarative chart specification model.

A ChartSpec describes a complete chart design (marks, encodings, scales,
facet, coordinates) over a dataset schema of FieldDefs.  Specs are immutable
value objects with a canonical JSON form and a stable content hash; all
downstream machinery (validation, feature extraction, enumeration) treats
them as pure data.

Chart-spec JSON format, version 1:

    {
      "dataset": [{"name", "dtype", "cardinality", "entropy", "extent", "interesting"}],
      "coordinates": "cartesian" | "polar",
      "marks": [{"type", "encodings": [{"channel", "field", "aggregate", "bin", "stack"}]}],
      "scales": [{"channel", "type"}],
      "facet": {"direction", "field", "bin"?} | null
    }

The encoding "field" is either a dataset field name or the count sentinel
"__count__" (a count-of-records pseudo-field with no backing column).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Optional, Sequence

SPEC_FORMAT_VERSION = "1"

#: Sentinel encoding field meaning "count of records" (no backing column).
COUNT_FIELD = "__count__"


class DType(str, Enum):
    NUMBER = "number"
    STRING = "string"
    DATETIME = "datetime"
    BOOLEAN = "boolean"


class Channel(str, Enum):
    X = "x"
    Y = "y"
    COLOR = "color"
    SIZE = "size"
    SHAPE = "shape"
    TEXT = "text"


#: Canonical channel ordering used for sorting and enumeration.
CHANNEL_ORDER: tuple[Channel, ...] = (
    Channel.X, Channel.Y, Channel.COLOR, Channel.SIZE, Channel.SHAPE, Channel.TEXT,
)

POSITIONAL_CHANNELS = frozenset({Channel.X, Channel.Y})


class ScaleType(str, Enum):
    LINEAR = "linear"
    LOG = "log"
    ORDINAL = "ordinal"
    CATEGORICAL = "categorical"


class MarkType(str, Enum):
    POINT = "point"
    BAR = "bar"
    LINE = "line"
    AREA = "area"
    TICK = "tick"
    RECT = "rect"


class Aggregate(str, Enum):
    NONE = "none"
    COUNT = "count"
    MEAN = "mean"
    SUM = "sum"


class Stack(str, Enum):
    NONE = "none"
    ZERO = "zero"
    NORMALIZE = "normalize"


class Coordinates(str, Enum):
    CARTESIAN = "cartesian"
    POLAR = "polar"


class FacetDirection(str, Enum):
    ROW = "row"
    COL = "col"


class StructuralError(ValueError):
    """A spec is structurally malformed (unresolved references, missing
    scales) as opposed to merely violating a hard-constraint rule."""


@dataclass(frozen=True)
class FieldDef:
    """One dataset variable and its summary statistics."""

    name: str
    dtype: DType
    cardinality: int = 2
    entropy: float = 0.0
    extent: Optional[tuple[float, float]] = None
    interesting: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("field name must be nonempty")
        if self.cardinality < 1:
            raise ValueError(f"field {self.name}: cardinality must be >= 1")
        if self.entropy < 0:
            raise ValueError(f"field {self.name}: entropy must be >= 0")
        # Allow a little float slack on the information-theoretic bound.
        if self.entropy > math.log2(self.cardinality) + 1e-9:
            raise ValueError(
                f"field {self.name}: entropy {self.entropy} exceeds "
                f"log2(cardinality) = {math.log2(self.cardinality):.4f}"
            )
        if self.extent is not None:
            lo, hi = self.extent
            if lo > hi:
                raise ValueError(f"field {self.name}: extent min {lo} > max {hi}")
            object.__setattr__(self, "extent", (float(lo), float(hi)))


@dataclass(frozen=True)
class EncodingDef:
    """A channel-to-field binding with optional transform."""

    channel: Channel
    field: str  # dataset field name or COUNT_FIELD
    aggregate: Aggregate = Aggregate.NONE
    bin: Optional[int] = None
    stack: Stack = Stack.NONE

    def __post_init__(self) -> None:
        if self.field == COUNT_FIELD and self.aggregate is not Aggregate.COUNT:
            raise ValueError("count-sentinel encoding requires aggregate = count")
        if self.bin is not None and self.bin < 2:
            raise ValueError("bin count must be >= 2")
        if self.bin is not None and self.aggregate is not Aggregate.NONE:
            raise ValueError("an encoding may bin or aggregate, not both")

    @property
    def is_count(self) -> bool:
        return self.field == COUNT_FIELD


@dataclass(frozen=True)
class ScaleDef:
    channel: Channel
    stype: ScaleType


@dataclass(frozen=True)
class MarkDef:
    """One chart layer: a mark type plus its encodings.

    Duplicate channels within a mark are representable (and reported by
    validate() as a hard violation) rather than rejected at construction.
    """

    mtype: MarkType
    encodings: tuple[EncodingDef, ...]

    def __post_init__(self) -> None:
        encs = tuple(self.encodings)
        object.__setattr__(self, "encodings", encs)
        if not 1 <= len(encs) <= 4:
            raise ValueError("a mark needs 1-4 encodings")


@dataclass(frozen=True)
class FacetDef:
    direction: FacetDirection
    field: str
    bin: Optional[int] = None

    def __post_init__(self) -> None:
        if self.bin is not None and self.bin < 2:
            raise ValueError("facet bin count must be >= 2")


@dataclass(frozen=True)
class ChartSpec:
    """A complete chart design over a dataset schema."""

    dataset: tuple[FieldDef, ...]
    marks: tuple[MarkDef, ...]
    scales: tuple[ScaleDef, ...]
    coordinates: Coordinates = Coordinates.CARTESIAN
    facet: Optional[FacetDef] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dataset", tuple(self.dataset))
        object.__setattr__(self, "marks", tuple(self.marks))
        object.__setattr__(self, "scales", tuple(self.scales))
        if not 1 <= len(self.marks) <= 2:
            raise ValueError("a chart has 1-2 mark layers")

    def field_map(self) -> dict[str, FieldDef]:
        cached = self.__dict__.get("_field_map")
        if cached is None:
            cached = {f.name: f for f in self.dataset}
            object.__setattr__(self, "_field_map", cached)
        return cached

    def resolve(self, name: str) -> Optional[FieldDef]:
        """Resolve an encoding field reference; None for the count sentinel.

        Raises StructuralError for names absent from the dataset.
        """
        if name == COUNT_FIELD:
            return None
        fld = self.field_map().get(name)
        if fld is None:
            raise StructuralError(f"unresolved field reference: {name!r}")
        return fld

    def iter_encodings(self) -> Iterator[tuple[MarkDef, EncodingDef]]:
        for mark in self.marks:
            for enc in mark.encodings:
                yield mark, enc

    def all_encodings(self) -> tuple[EncodingDef, ...]:
        cached = self.__dict__.get("_all_encodings")
        if cached is None:
            cached = tuple(e for m in self.marks for e in m.encodings)
            object.__setattr__(self, "_all_encodings", cached)
        return cached

    def scale_for(self, channel: Channel) -> Optional[ScaleDef]:
        cached = self.__dict__.get("_scale_map")
        if cached is None:
            cached = {s.channel: s for s in self.scales}
            object.__setattr__(self, "_scale_map", cached)
        return cached.get(channel)

    def used_channels(self) -> set[Channel]:
        return {enc.channel for enc in self.all_encodings()}


# ---------------------------------------------------------------------------
# continuity helpers shared by features/augmentation/legibility
# ---------------------------------------------------------------------------

def encoding_is_continuous(spec: ChartSpec, enc: EncodingDef) -> bool:
    """Continuous encodings carry unbinned quantitative/temporal values;
    the count sentinel is continuous (counts are quantitative)."""
    if enc.is_count:
        return True
    if enc.bin is not None:
        return False
    fld = spec.resolve(enc.field)
    assert fld is not None
    return fld.dtype in (DType.NUMBER, DType.DATETIME)


def encoding_is_discrete(spec: ChartSpec, enc: EncodingDef) -> bool:
    if enc.is_count:
        return False
    if enc.bin is not None:
        return True
    fld = spec.resolve(enc.field)
    assert fld is not None
    return fld.dtype in (DType.STRING, DType.BOOLEAN)


# ---------------------------------------------------------------------------
# JSON (de)serialization — chart-spec format v1
# ---------------------------------------------------------------------------

def field_to_dict(f: FieldDef) -> dict[str, Any]:
    return {
        "name": f.name,
        "dtype": f.dtype.value,
        "cardinality": f.cardinality,
        "entropy": f.entropy,
        "extent": list(f.extent) if f.extent is not None else None,
        "interesting": f.interesting,
    }


def field_from_dict(d: dict[str, Any]) -> FieldDef:
    extent = d.get("extent")
    return FieldDef(
        name=d["name"],
        dtype=DType(d["dtype"]),
        cardinality=int(d.get("cardinality", 2)),
        entropy=float(d.get("entropy", 0.0)),
        extent=tuple(extent) if extent is not None else None,
        interesting=bool(d.get("interesting", False)),
    )


def spec_to_dict(spec: ChartSpec) -> dict[str, Any]:
    out: dict[str, Any] = {
        "dataset": [field_to_dict(f) for f in spec.dataset],
        "coordinates": spec.coordinates.value,
        "marks": [
            {
                "type": m.mtype.value,
                "encodings": [
                    {
                        "channel": e.channel.value,
                        "field": e.field,
                        "aggregate": e.aggregate.value,
                        "bin": e.bin,
                        "stack": e.stack.value,
                    }
                    for e in m.encodings
                ],
            }
            for m in spec.marks
        ],
        "scales": [{"channel": s.channel.value, "type": s.stype.value} for s in spec.scales],
        "facet": None,
    }
    if spec.facet is not None:
        facet: dict[str, Any] = {
            "direction": spec.facet.direction.value,
            "field": spec.facet.field,
        }
        if spec.facet.bin is not None:
            facet["bin"] = spec.facet.bin
        out["facet"] = facet
    return out


def spec_from_dict(d: dict[str, Any]) -> ChartSpec:
    facet = None
    if d.get("facet"):
        fd = d["facet"]
        facet = FacetDef(
            direction=FacetDirection(fd["direction"]),
            field=fd["field"],
            bin=fd.get("bin"),
        )
    return ChartSpec(
        dataset=tuple(field_from_dict(f) for f in d["dataset"]),
        coordinates=Coordinates(d.get("coordinates", "cartesian")),
        marks=tuple(
            MarkDef(
                mtype=MarkType(m["type"]),
                encodings=tuple(
                    EncodingDef(
                        channel=Channel(e["channel"]),
                        field=e["field"],
                        aggregate=Aggregate(e.get("aggregate", "none")),
                        bin=e.get("bin"),
                        stack=Stack(e.get("stack", "none")),
                    )
                    for e in m["encodings"]
                ),
            )
            for m in d["marks"]
        ),
        scales=tuple(
            ScaleDef(channel=Channel(s["channel"]), stype=ScaleType(s["type"]))
            for s in d.get("scales", ())
        ),
        facet=facet,
    )


# ---------------------------------------------------------------------------
# canonical form, ordering, hashing
# ---------------------------------------------------------------------------

def _channel_index(channel: Channel) -> int:
    return CHANNEL_ORDER.index(channel)


def canonicalize(spec: ChartSpec) -> ChartSpec:
    """Order-normalize a spec: encodings sorted by channel within each mark,
    scales sorted by channel.  Layer order is semantic and preserved."""
    marks = tuple(
        MarkDef(
            mtype=m.mtype,
            encodings=tuple(sorted(m.encodings, key=lambda e: _channel_index(e.channel))),
        )
        for m in spec.marks
    )
    scales = tuple(sorted(spec.scales, key=lambda s: _channel_index(s.channel)))
    return ChartSpec(
        dataset=spec.dataset,
        coordinates=spec.coordinates,
        marks=marks,
        scales=scales,
        facet=spec.facet,
    )


def canonical_json(spec: ChartSpec) -> str:
    return json.dumps(spec_to_dict(canonicalize(spec)), sort_keys=True, separators=(",", ":"))


def spec_hash(spec: ChartSpec) -> str:
    """Stable content hash of the canonical form (hex sha256)."""
    return hashlib.sha256(canonical_json(spec).encode("utf-8")).hexdigest()


def canonical_sort_key(spec: ChartSpec) -> tuple:
    """Total order over same-dataset specs: (mark types, channels, fields,
    transforms, scale types, facet, coordinates)."""
    cached = spec.__dict__.get("_sort_key")
    if cached is not None:
        return cached
    parts: list[str] = []
    for m in spec.marks:
        parts.append(m.mtype.value)
        for e in sorted(m.encodings, key=lambda e: _channel_index(e.channel)):
            parts.extend(
                (e.channel.value, e.field, e.aggregate.value, str(e.bin), e.stack.value)
            )
    for s in sorted(spec.scales, key=lambda s: _channel_index(s.channel)):
        parts.extend((s.channel.value, s.stype.value))
    if spec.facet is not None:
        parts.extend(
            ("facet", spec.facet.direction.value, spec.facet.field, str(spec.facet.bin))
        )
    parts.append(spec.coordinates.value)
    parts.extend(f.name for f in spec.dataset)
    key = tuple(parts)
    object.__setattr__(spec, "_sort_key", key)
    return key


def load_spec(path: str) -> ChartSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def dump_spec(spec: ChartSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")

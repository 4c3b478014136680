"""Design-space enumeration.

complete() expands a partial specification into every valid chart within
bounds, over an explicit choice grammar:

    coordinates x mark type (per layer) x channel subset (per layer)
    x field assignment (dataset fields + count sentinel)
    x transform (aggregate xor bin, bins in {10, 25})
    x scale type per used channel x facet

Scale domains are keyed by what the channel carries: unbinned numbers get
linear (log too, when the field extent allows it), binned numbers get
ordinal, strings/booleans get categorical, datetimes and counts get linear.
Stack is never enumerated.  Hard-rule pruning is exact: the output equals
brute-force generation over the same grammar filtered by validate().

Results are deduplicated by canonical hash and returned in canonical
lexicographic order; max_results keeps the canonical-first prefix, while
exceeding the node budget raises (enumeration never truncates silently).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence

from .features import FeatureCatalog, UnknownFeatureError, builtin_catalog, extract_features
from .hardrules import validate
from .primitives import PrimitiveToken, abstract_primitives
from .spec import (
    Aggregate,
    CHANNEL_ORDER,
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
    POSITIONAL_CHANNELS,
    ScaleDef,
    ScaleType,
    canonical_sort_key,
    spec_hash,
)
from .weights import WeightTable, cost

#: Bin-count choice points; spans the bin_high threshold (12) from both sides.
BIN_CHOICES: tuple[int, ...] = (10, 25)

MARK_DOMAIN: tuple[MarkType, ...] = tuple(MarkType)


class BudgetExceededError(RuntimeError):
    """The enumeration visited more candidates than the node cap allows."""


@dataclass(frozen=True)
class EnumerationBounds:
    max_results: int = 10_000
    max_feature_count: Optional[int] = None
    cost_cap: Optional[int] = None
    node_cap: int = 500_000

    def __post_init__(self) -> None:
        if self.max_results < 1:
            raise ValueError("max_results must be >= 1")


@dataclass(frozen=True)
class SpecFragment:
    """A positive requirement a completed spec must embed.

    Channel-scoped constraints (field/aggregate/bin/scale) must be satisfied
    together by a single encoding on that channel.
    """

    mark_type: Optional[MarkType] = None
    channel: Optional[Channel] = None
    field_name: Optional[str] = None
    field_dtype: Optional[str] = None  # "number"/"string"/"datetime"/"boolean"/"count"
    aggregate: Optional[Aggregate] = None
    binned: Optional[bool] = None
    bin_count: Optional[int] = None
    scale_type: Optional[ScaleType] = None
    facet_direction: Optional[FacetDirection] = None
    facet_field: Optional[str] = None

    def __post_init__(self) -> None:
        channel_scoped = (
            self.field_name, self.field_dtype, self.aggregate,
            self.binned, self.bin_count, self.scale_type,
        )
        if self.channel is None and any(v is not None for v in channel_scoped):
            raise ValueError("channel-scoped fragment constraints require a channel")
        if all(
            v is None
            for v in (self.mark_type, self.channel, self.facet_direction, self.facet_field)
        ):
            raise ValueError("empty fragment")


def _encoding_matches(spec: ChartSpec, enc: EncodingDef, frag: SpecFragment) -> bool:
    if frag.field_name is not None and enc.field != frag.field_name:
        return False
    if frag.field_dtype is not None:
        if frag.field_dtype == "count":
            if not enc.is_count:
                return False
        else:
            if enc.is_count:
                return False
            fld = spec.resolve(enc.field)
            assert fld is not None
            if fld.dtype.value != frag.field_dtype:
                return False
    if frag.aggregate is not None and enc.aggregate is not frag.aggregate:
        return False
    if frag.binned is not None and (enc.bin is not None) != frag.binned:
        return False
    if frag.bin_count is not None and enc.bin != frag.bin_count:
        return False
    if frag.scale_type is not None:
        scale = spec.scale_for(enc.channel)
        if scale is None or scale.stype is not frag.scale_type:
            return False
    return True


def fragment_satisfied(spec: ChartSpec, frag: SpecFragment) -> bool:
    if frag.mark_type is not None:
        if not any(m.mtype is frag.mark_type for m in spec.marks):
            return False
    if frag.channel is not None:
        ok = any(
            enc.channel is frag.channel and _encoding_matches(spec, enc, frag)
            for _, enc in spec.iter_encodings()
        )
        if not ok:
            return False
    if frag.facet_direction is not None:
        if spec.facet is None or spec.facet.direction is not frag.facet_direction:
            return False
    if frag.facet_field is not None:
        if spec.facet is None or spec.facet.field != frag.facet_field:
            return False
    return True


@dataclass(frozen=True)
class PartialSpec:
    """Data schema plus pinned design facts, to be completed by enumeration."""

    dataset: tuple[FieldDef, ...]
    layer_count: int = 1
    encoding_count: int | tuple[int, ...] = 1
    coordinates: Optional[Coordinates] = None
    fixed: tuple[SpecFragment, ...] = ()
    forbid_tokens: tuple[PrimitiveToken, ...] = ()
    name: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dataset", tuple(self.dataset))
        object.__setattr__(self, "fixed", tuple(self.fixed))
        object.__setattr__(self, "forbid_tokens", tuple(self.forbid_tokens))
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        counts = self.encoding_counts()
        if any(c < 1 for c in counts):
            raise ValueError("encoding_count must be >= 1")
        if any(c > len(CHANNEL_ORDER) for c in counts):
            raise ValueError("encoding_count exceeds available channels")
        self._check_fragment_consistency()

    def encoding_counts(self) -> tuple[int, ...]:
        if isinstance(self.encoding_count, int):
            return (self.encoding_count,) * self.layer_count
        counts = tuple(self.encoding_count)
        if len(counts) != self.layer_count:
            raise ValueError("per-layer encoding counts must match layer_count")
        return counts

    def _check_fragment_consistency(self) -> None:
        # No H1-style conflict among the fragments themselves.
        scale_pins: dict[Channel, ScaleType] = {}
        for frag in self.fixed:
            if frag.channel is not None and frag.scale_type is not None:
                prev = scale_pins.get(frag.channel)
                if prev is not None and prev is not frag.scale_type:
                    raise ValueError(
                        f"fragments pin conflicting scales on {frag.channel.value}"
                    )
                scale_pins[frag.channel] = frag.scale_type
        mark_pins = {f.mark_type for f in self.fixed if f.mark_type is not None}
        if len(mark_pins) > self.layer_count:
            raise ValueError("more pinned mark types than layers")
        facet_pins = {
            f.facet_direction for f in self.fixed if f.facet_direction is not None
        }
        if len(facet_pins) > 1:
            raise ValueError("fragments pin conflicting facet directions")


def data_partial(spec: ChartSpec, name: Optional[str] = None) -> PartialSpec:
    """Strip a chart down to its data facts plus layer/encoding counts."""
    return PartialSpec(
        dataset=spec.dataset,
        layer_count=len(spec.marks),
        encoding_count=tuple(len(m.encodings) for m in spec.marks),
        coordinates=spec.coordinates,
        name=name,
    )


# ---------------------------------------------------------------------------
# grammar domains
# ---------------------------------------------------------------------------

def transform_domain(fld: Optional[FieldDef]) -> tuple[tuple[Aggregate, Optional[int]], ...]:
    """(aggregate, bin) choices for a field; None stands for the count sentinel."""
    if fld is None:
        return ((Aggregate.COUNT, None),)
    if fld.dtype is DType.NUMBER:
        return (
            (Aggregate.NONE, None),
            (Aggregate.MEAN, None),
            (Aggregate.SUM, None),
        ) + tuple((Aggregate.NONE, b) for b in BIN_CHOICES)
    return ((Aggregate.NONE, None),)


def scale_domain(fld: Optional[FieldDef], bin_count: Optional[int]) -> tuple[ScaleType, ...]:
    """Scale-type choices for what a channel carries."""
    if fld is None:  # count sentinel
        return (ScaleType.LINEAR,)
    if fld.dtype is DType.NUMBER:
        if bin_count is not None:
            return (ScaleType.ORDINAL,)
        types = [ScaleType.LINEAR]
        if fld.extent is not None and fld.extent[0] > 0:
            types.append(ScaleType.LOG)
        return tuple(types)
    if fld.dtype is DType.DATETIME:
        return (ScaleType.LINEAR,)
    return (ScaleType.CATEGORICAL,)


def facet_domain(dataset: Sequence[FieldDef]) -> tuple[Optional[FacetDef], ...]:
    options: list[Optional[FacetDef]] = [None]
    for direction in (FacetDirection.ROW, FacetDirection.COL):
        for fld in dataset:
            if fld.dtype in (DType.STRING, DType.BOOLEAN):
                options.append(FacetDef(direction=direction, field=fld.name))
    return tuple(options)


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def _encoding_option_ok(
    frag: SpecFragment,
    fname: str,
    fld: Optional[FieldDef],
    agg: Aggregate,
    b: Optional[int],
) -> bool:
    """Encoding-level fragment constraints against one (field, agg, bin)
    choice; exact mirror of _encoding_matches minus the scale clause."""
    if frag.field_name is not None and fname != frag.field_name:
        return False
    if frag.field_dtype is not None:
        if frag.field_dtype == "count":
            if fname != COUNT_FIELD:
                return False
        elif fld is None or fld.dtype.value != frag.field_dtype:
            return False
    if frag.aggregate is not None and agg is not frag.aggregate:
        return False
    if frag.binned is not None and (b is not None) != frag.binned:
        return False
    if frag.bin_count is not None and b != frag.bin_count:
        return False
    return True


def _candidates(partial: PartialSpec, bounds: EnumerationBounds) -> Iterator[ChartSpec]:
    """All grammar assignments with exact layer/encoding counts.

    Pruning is exact: candidates skipped here could never pass the
    post-filters (hard rules H2/H5, fragment satisfaction, forbidden
    tokens); the brute-force equivalence oracle guards this.
    """
    dataset = partial.dataset
    by_name = {f.name: f for f in dataset}
    field_options: list[tuple[str, Optional[FieldDef]]] = [
        (f.name, f) for f in dataset
    ] + [(COUNT_FIELD, None)]

    coord_domain = (
        (partial.coordinates,)
        if partial.coordinates is not None
        else (Coordinates.CARTESIAN, Coordinates.POLAR)
    )
    enc_counts = partial.encoding_counts()
    facets = facet_domain(dataset)

    forbid = set(partial.forbid_tokens)
    coord_domain = tuple(
        c for c in coord_domain if f"coordinates.{c.value}" not in forbid
    )
    facets = tuple(
        f for f in facets
        if f is None or f"facet.{f.direction.value}" not in forbid
    )
    required_channels = {
        frag.channel for frag in partial.fixed if frag.channel is not None
    }
    pinned_scales: dict[Channel, ScaleType] = {
        frag.channel: frag.scale_type
        for frag in partial.fixed
        if frag.channel is not None and frag.scale_type is not None
    }
    # With a single layer each channel carries exactly one encoding, so
    # encoding-level fragment constraints restrict that channel's options.
    slot_fragments: dict[Channel, list[SpecFragment]] = {}
    if partial.layer_count == 1:
        for frag in partial.fixed:
            if frag.channel is not None:
                slot_fragments.setdefault(frag.channel, []).append(frag)

    # Per-encoding options: (field, aggregate, bin)
    enc_options: list[tuple[str, Aggregate, Optional[int]]] = []
    for fname, fld in field_options:
        for agg, b in transform_domain(fld):
            enc_options.append((fname, agg, b))

    def options_for(channel: Channel) -> list[tuple[str, Aggregate, Optional[int]]]:
        frags = slot_fragments.get(channel)
        if not frags:
            return enc_options
        return [
            (fname, agg, b)
            for (fname, agg, b) in enc_options
            if all(
                _encoding_option_ok(fr, fname, by_name.get(fname), agg, b)
                for fr in frags
            )
        ]

    nodes = 0
    for coords in coord_domain:
        for mark_types in itertools.product(MARK_DOMAIN, repeat=partial.layer_count):
            channel_sets_per_layer = [
                itertools.combinations(CHANNEL_ORDER, enc_counts[i])
                for i in range(partial.layer_count)
            ]
            for channel_sets in itertools.product(*channel_sets_per_layer):
                used_union = {ch for chans in channel_sets for ch in chans}
                if not required_channels <= used_union:
                    continue
                # H5: bar/area/line need a positional channel
                h5_ok = all(
                    mt not in (MarkType.BAR, MarkType.AREA, MarkType.LINE)
                    or set(chans) & POSITIONAL_CHANNELS
                    for mt, chans in zip(mark_types, channel_sets)
                )
                if not h5_ok:
                    continue
                slots = [
                    (layer, ch)
                    for layer, chans in enumerate(channel_sets)
                    for ch in chans
                ]
                slot_options = [options_for(ch) for _, ch in slots]
                if any(not opts for opts in slot_options):
                    continue
                for assignment in itertools.product(*slot_options):
                    nodes += 1
                    if nodes > bounds.node_cap:
                        raise BudgetExceededError(
                            f"enumeration exceeded node cap {bounds.node_cap}"
                        )
                    encodings_per_layer: list[list[EncodingDef]] = [
                        [] for _ in range(partial.layer_count)
                    ]
                    for (layer, ch), (fname, agg, b) in zip(slots, assignment):
                        encodings_per_layer[layer].append(
                            EncodingDef(channel=ch, field=fname, aggregate=agg, bin=b)
                        )
                    # Per-channel scale domain: intersection across encodings.
                    channel_domains: dict[Channel, tuple[ScaleType, ...]] = {}
                    feasible = True
                    for layer_encs in encodings_per_layer:
                        for enc in layer_encs:
                            fld = by_name.get(enc.field)
                            dom = scale_domain(fld, enc.bin)
                            pin = pinned_scales.get(enc.channel)
                            if pin is not None:
                                dom = tuple(t for t in dom if t is pin)
                            prev = channel_domains.get(enc.channel)
                            if prev is None:
                                channel_domains[enc.channel] = dom
                            else:
                                dom = tuple(t for t in prev if t in dom)
                                channel_domains[enc.channel] = dom
                            if not channel_domains[enc.channel]:
                                feasible = False
                                break
                        if not feasible:
                            break
                    if not feasible:
                        continue
                    used = sorted(channel_domains, key=CHANNEL_ORDER.index)
                    marks = tuple(
                        MarkDef(mtype=mt, encodings=tuple(encs))
                        for mt, encs in zip(mark_types, encodings_per_layer)
                    )
                    for scale_choice in itertools.product(
                        *(channel_domains[ch] for ch in used)
                    ):
                        scales = tuple(
                            ScaleDef(channel=ch, stype=st)
                            for ch, st in zip(used, scale_choice)
                        )
                        for facet in facets:
                            yield ChartSpec(
                                dataset=dataset,
                                coordinates=coords,
                                marks=marks,
                                scales=scales,
                                facet=facet,
                            )


def _passes(
    spec: ChartSpec,
    partial: PartialSpec,
    bounds: EnumerationBounds,
    catalog: FeatureCatalog,
    weights: Optional[WeightTable],
    force: frozenset[str],
    forbid: frozenset[str],
) -> bool:
    if validate(spec):
        return False
    if not all(fragment_satisfied(spec, frag) for frag in partial.fixed):
        return False
    if partial.forbid_tokens:
        tokens = abstract_primitives(spec)
        if any(tokens[t] for t in partial.forbid_tokens):
            return False
    needs_features = (
        bounds.max_feature_count is not None
        or bounds.cost_cap is not None
        or force
        or forbid
    )
    if needs_features:
        fv = extract_features(spec, catalog)
        if bounds.max_feature_count is not None and fv.total() > bounds.max_feature_count:
            return False
        if bounds.cost_cap is not None:
            assert weights is not None
            if cost(fv, weights) > bounds.cost_cap:
                return False
        if any(fv.get(f) < 1 for f in force):
            return False
        if any(fv.get(f) != 0 for f in forbid):
            return False
    return True


def _enumerate(
    partial: PartialSpec,
    bounds: EnumerationBounds,
    catalog: Optional[FeatureCatalog],
    weights: Optional[WeightTable],
    force: frozenset[str] = frozenset(),
    forbid: frozenset[str] = frozenset(),
) -> list[ChartSpec]:
    catalog = catalog or builtin_catalog()
    if bounds.cost_cap is not None and weights is None:
        raise ValueError("cost_cap requires a weight table")
    accepted: list[ChartSpec] = []
    for spec in _candidates(partial, bounds):
        if _passes(spec, partial, bounds, catalog, weights, force, forbid):
            accepted.append(spec)
    accepted.sort(key=canonical_sort_key)
    deduped: list[ChartSpec] = []
    seen: set[str] = set()
    for spec in accepted:
        h = spec_hash(spec)
        if h not in seen:
            seen.add(h)
            deduped.append(spec)
        if len(deduped) >= bounds.max_results:
            break
    return deduped


def complete(
    partial: PartialSpec,
    bounds: EnumerationBounds = EnumerationBounds(),
    *,
    catalog: Optional[FeatureCatalog] = None,
    weights: Optional[WeightTable] = None,
) -> list[ChartSpec]:
    """Complete a partial spec into valid charts, canonically ordered.

    Every result passes validate(), embeds all fixed fragments, and matches
    the requested layer/encoding counts exactly.  At most max_results specs
    are returned (the canonical-order prefix).
    """
    return _enumerate(partial, bounds, catalog, weights)


def enumerate_constrained(
    partial: PartialSpec,
    force: Iterable[str],
    forbid: Iterable[str],
    bounds: EnumerationBounds = EnumerationBounds(),
    *,
    catalog: Optional[FeatureCatalog] = None,
    weights: Optional[WeightTable] = None,
) -> list[ChartSpec]:
    """complete() restricted to charts exhibiting every forced feature
    (count >= 1) and no forbidden one (count = 0)."""
    catalog = catalog or builtin_catalog()
    force_set = frozenset(force)
    forbid_set = frozenset(forbid)
    overlap = force_set & forbid_set
    if overlap:
        raise ValueError(f"features both forced and forbidden: {sorted(overlap)}")
    for name in sorted(force_set | forbid_set):
        if name not in catalog:
            raise UnknownFeatureError(name)
    return _enumerate(partial, bounds, catalog, weights, force_set, forbid_set)


# ---------------------------------------------------------------------------
# JSON io
# ---------------------------------------------------------------------------

def fragment_to_dict(frag: SpecFragment) -> dict:
    out: dict = {}
    if frag.mark_type is not None:
        out["mark_type"] = frag.mark_type.value
    if frag.channel is not None:
        out["channel"] = frag.channel.value
    if frag.field_name is not None:
        out["field_name"] = frag.field_name
    if frag.field_dtype is not None:
        out["field_dtype"] = frag.field_dtype
    if frag.aggregate is not None:
        out["aggregate"] = frag.aggregate.value
    if frag.binned is not None:
        out["binned"] = frag.binned
    if frag.bin_count is not None:
        out["bin_count"] = frag.bin_count
    if frag.scale_type is not None:
        out["scale_type"] = frag.scale_type.value
    if frag.facet_direction is not None:
        out["facet_direction"] = frag.facet_direction.value
    if frag.facet_field is not None:
        out["facet_field"] = frag.facet_field
    return out


def fragment_from_dict(d: dict) -> SpecFragment:
    return SpecFragment(
        mark_type=MarkType(d["mark_type"]) if "mark_type" in d else None,
        channel=Channel(d["channel"]) if "channel" in d else None,
        field_name=d.get("field_name"),
        field_dtype=d.get("field_dtype"),
        aggregate=Aggregate(d["aggregate"]) if "aggregate" in d else None,
        binned=d.get("binned"),
        bin_count=d.get("bin_count"),
        scale_type=ScaleType(d["scale_type"]) if "scale_type" in d else None,
        facet_direction=(
            FacetDirection(d["facet_direction"]) if "facet_direction" in d else None
        ),
        facet_field=d.get("facet_field"),
    )


def partial_to_dict(partial: PartialSpec) -> dict:
    from .spec import field_to_dict

    return {
        "dataset": [field_to_dict(f) for f in partial.dataset],
        "layer_count": partial.layer_count,
        "encoding_count": (
            list(partial.encoding_count)
            if isinstance(partial.encoding_count, tuple)
            else partial.encoding_count
        ),
        "coordinates": partial.coordinates.value if partial.coordinates else None,
        "fixed": [fragment_to_dict(f) for f in partial.fixed],
        "forbid_tokens": list(partial.forbid_tokens),
        "name": partial.name,
    }


def partial_from_dict(d: dict) -> PartialSpec:
    from .spec import field_from_dict

    enc = d.get("encoding_count", 1)
    return PartialSpec(
        dataset=tuple(field_from_dict(f) for f in d["dataset"]),
        layer_count=int(d.get("layer_count", 1)),
        encoding_count=tuple(enc) if isinstance(enc, list) else int(enc),
        coordinates=Coordinates(d["coordinates"]) if d.get("coordinates") else None,
        fixed=tuple(fragment_from_dict(f) for f in d.get("fixed", ())),
        forbid_tokens=tuple(d.get("forbid_tokens", ())),
        name=d.get("name"),
    )


def top_k_distinct_cost(
    specs: Sequence[ChartSpec],
    w: WeightTable,
    k: int,
    catalog: Optional[FeatureCatalog] = None,
) -> list[ChartSpec]:
    """The canonical-first spec at each of the k lowest distinct cost levels,
    in strictly increasing cost order."""
    if not specs:
        raise ValueError("specs must be nonempty")
    if k < 1:
        raise ValueError("k must be >= 1")
    catalog = catalog or builtin_catalog()
    scored = sorted(
        ((cost(extract_features(s, catalog), w), canonical_sort_key(s), s) for s in specs),
        key=lambda t: (t[0], t[1]),
    )
    out: list[ChartSpec] = []
    last_cost: Optional[int] = None
    for c, _, s in scored:
        if last_cost is None or c != last_cost:
            out.append(s)
            last_cost = c
        if len(out) >= k:
            break
    return out

"""Design-pair augmentation pipelines.

Three generators expand a pair corpus:

* primitive augmentation re-enumerates both sides of an origin pair with
  everything freed except the data facts and the pair's abstract design
  differences, then keeps matched completions that reproduce exactly those
  differences;
* feature augmentation builds (with, without) ablation pairs for
  under-covered features, unary or in the presence/absence context of a
  second feature, guided by a provokes/contradicts dependency graph;
* seed augmentation enumerates each curated data spec, keeps the top-N
  designs with distinct costs, and pairs them labeled by the current
  weights.

All augmented pairs carry lineage (origin id, ablated features, context,
RNG seed) and are emitted unlabeled except for seed pairs.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

from .enumerator import (
    EnumerationBounds,
    PartialSpec,
    SpecFragment,
    complete,
    data_partial,
    enumerate_constrained,
    top_k_distinct_cost,
)
from .features import (
    FeatureCatalog,
    FeatureVector,
    HIGH_CARDINALITY_THRESHOLD,
    UnknownFeatureError,
    builtin_catalog,
    extract_features,
)
from .pairs import (
    DesignDifference,
    DesignPair,
    IdenticalPairError,
    Lineage,
    derive_pair_id,
    diff_specs,
    extract_design_differences,
)
from .primitives import abstract_primitives
from .spec import (
    Aggregate,
    Channel,
    ChartSpec,
    Coordinates,
    DType,
    FacetDirection,
    FieldDef,
    MarkType,
    ScaleType,
    canonical_sort_key,
    spec_hash,
)
from .weights import WeightTable, builtin_weights, cost

DEFAULT_COVERAGE_THRESHOLD = 7
DEFAULT_MAX_NEW = 7
DEFAULT_PAIRS_PER_FEATURE = 7
DEFAULT_TOP_N = 8
DEFAULT_DENSITY_CAP = 300
COMMONNESS_CUTOFF = 0.9  # features in more than 90% of charts are not ablated


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverageReport:
    frequencies: Mapping[str, int]   # total occurrences over all corpus charts
    chart_counts: Mapping[str, int]  # number of charts exhibiting the feature
    n_charts: int
    threshold: int
    under_covered: frozenset[str]

    def relative_frequencies(self) -> dict[str, float]:
        """Occurrence count per feature divided by the number of charts."""
        if self.n_charts == 0:
            return {f: 0.0 for f in self.frequencies}
        return {f: c / self.n_charts for f, c in self.frequencies.items()}

    def chart_fractions(self) -> dict[str, float]:
        """Fraction of charts exhibiting each feature (commonness)."""
        if self.n_charts == 0:
            return {f: 0.0 for f in self.chart_counts}
        return {f: c / self.n_charts for f, c in self.chart_counts.items()}


def coverage_report(
    corpus: Iterable[DesignPair],
    catalog: Optional[FeatureCatalog] = None,
    threshold: int = DEFAULT_COVERAGE_THRESHOLD,
) -> CoverageReport:
    """Per-feature occurrence totals over all corpus charts (both pair
    sides); features strictly below the threshold are under-covered."""
    catalog = catalog or builtin_catalog()
    freq = {name: 0 for name in catalog.names}
    chart_counts = {name: 0 for name in catalog.names}
    n_charts = 0
    for pair in corpus:
        for spec in (pair.left, pair.right):
            n_charts += 1
            fv = extract_features(spec, catalog)
            for name, c in fv.items():
                freq[name] += c
                chart_counts[name] += 1
    under = frozenset(n for n, c in freq.items() if c < threshold)
    return CoverageReport(
        frequencies=freq,
        chart_counts=chart_counts,
        n_charts=n_charts,
        threshold=threshold,
        under_covered=under,
    )


# ---------------------------------------------------------------------------
# feature dependencies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str, str]]  # (a, "provokes"|"contradicts", b)
    undetermined: frozenset[str] = frozenset()

    def provokes(self, a: str, b: str) -> bool:
        return (a, "provokes", b) in self.edges

    def contradicts(self, a: str, b: str) -> bool:
        return (a, "contradicts", b) in self.edges

    def connected(self, a: str, b: str) -> bool:
        return (
            self.provokes(a, b)
            or self.provokes(b, a)
            or self.contradicts(a, b)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": list(self.nodes),
            "edges": sorted(list(e) for e in self.edges),
            "undetermined": sorted(self.undetermined),
        }


def analyze_dependencies(
    probe: Sequence[ChartSpec], catalog: Optional[FeatureCatalog] = None
) -> DependencyGraph:
    """Empirical provokes/contradicts relations over a probe chart set.

    a provokes b when every probe chart containing a also contains b but
    not conversely; a contradicts b when both occur individually but never
    together.  Features absent from every probe chart are undetermined.
    """
    catalog = catalog or builtin_catalog()
    presence: dict[str, set[int]] = {name: set() for name in catalog.names}
    for i, spec in enumerate(probe):
        fv = extract_features(spec, catalog)
        for name, c in fv.items():
            if c >= 1:
                presence[name].add(i)
    undetermined = frozenset(n for n, occ in presence.items() if not occ)
    determined = [n for n in catalog.names if presence[n]]
    edges: set[tuple[str, str, str]] = set()
    for a in determined:
        for b in determined:
            if a == b:
                continue
            a_in, b_in = presence[a], presence[b]
            a_implies_b = a_in <= b_in
            b_implies_a = b_in <= a_in
            if a_implies_b and not b_implies_a:
                edges.add((a, "provokes", b))
            if not a_in & b_in:
                edges.add((a, "contradicts", b))
                edges.add((b, "contradicts", a))
    return DependencyGraph(
        nodes=tuple(catalog.names), edges=frozenset(edges), undetermined=undetermined
    )


# ---------------------------------------------------------------------------
# primitive augmentation
# ---------------------------------------------------------------------------

_DTYPE_FROM_TOKEN = {
    "quantitative": "number",
    "nominal": "string",
    "temporal": "datetime",
    "boolean": "boolean",
}
_SCALE_TOKENS = {t.value for t in ScaleType}
_AGG_TOKENS = {"mean", "sum"}


def _fragments_from_tokens(tokens: Counter) -> tuple[tuple[SpecFragment, ...], Optional[Coordinates]]:
    """Reify diff-side tokens into positive fragments; one merged fragment
    per channel.  Stack tokens are not expressible in the choice grammar and
    are left to the verification filter."""
    frags: list[SpecFragment] = []
    coords: Optional[Coordinates] = None
    per_channel: dict[str, dict[str, Any]] = {}
    for token in tokens:
        head, _, rest = token.partition(".")
        if head == "mark":
            frags.append(SpecFragment(mark_type=MarkType(rest)))
        elif head == "facet":
            frags.append(SpecFragment(facet_direction=FacetDirection(rest)))
        elif head == "coordinates":
            coords = Coordinates(rest)
        else:
            slot = per_channel.setdefault(head, {})
            if not rest:
                continue  # bare channel presence
            if rest in _DTYPE_FROM_TOKEN:
                slot["field_dtype"] = _DTYPE_FROM_TOKEN[rest]
            elif rest == "count":
                slot["field_dtype"] = "count"
            elif rest in _SCALE_TOKENS:
                slot["scale_type"] = ScaleType(rest)
            elif rest in _AGG_TOKENS:
                slot["aggregate"] = Aggregate(rest)
            elif rest == "binned":
                slot["binned"] = True
            elif rest.startswith("binned."):
                slot["bin_count"] = int(rest.split(".", 1)[1])
            # stack.* falls through to verification
    for ch, slot in per_channel.items():
        frags.append(SpecFragment(channel=Channel(ch), **slot))
    return tuple(frags), coords


def _diff_partial(
    origin: ChartSpec, own_tokens: Counter, other_tokens: Counter
) -> PartialSpec:
    frags, coords = _fragments_from_tokens(own_tokens)
    return PartialSpec(
        dataset=origin.dataset,
        layer_count=len(origin.marks),
        encoding_count=tuple(len(m.encodings) for m in origin.marks),
        coordinates=coords,
        fixed=frags,
        forbid_tokens=tuple(sorted(other_tokens)),
    )


def primitive_augment(
    pair: DesignPair,
    max_new: int = DEFAULT_MAX_NEW,
    bounds: EnumerationBounds = EnumerationBounds(max_results=5000),
    catalog: Optional[FeatureCatalog] = None,
    weights: Optional[WeightTable] = None,
) -> list[DesignPair]:
    """New unlabeled pairs exhibiting exactly the origin pair's design
    differences, with shared primitives re-enumerated.

    Both completions run over the origin's data facts with matching
    layer/encoding counts; completions match up when their shared tokens
    agree, and every emitted pair is re-verified to reproduce the origin
    differences exactly.  The max_new cheapest matched pairs (summed cost
    under the given weights, ties broken canonically) are returned, echoing
    cost-ordered enumeration.  Zero outputs are possible when the
    differences saturate the design.
    """
    diffs = extract_design_differences(pair)
    if diffs.is_empty():
        raise ValueError(
            f"pair {pair.id}: no abstract design differences to preserve"
        )
    left_names = {f.name for f in pair.left.dataset}
    right_names = {f.name for f in pair.right.dataset}
    if left_names != right_names:
        raise ValueError(f"pair {pair.id}: sides use different datasets")

    left_only = diffs.left_tokens()
    right_only = diffs.right_tokens()
    partial_l = _diff_partial(pair.left, left_only, right_only)
    partial_r = _diff_partial(pair.right, right_only, left_only)
    completions_l = complete(partial_l, bounds, catalog=catalog)
    completions_r = complete(partial_r, bounds, catalog=catalog)

    # Two completions pair up exactly when their shared tokens agree, i.e.
    # tokens minus the own diff side match; within a profile class both
    # sides are consumed in canonical rank order.
    def profile(spec: ChartSpec, own: Counter) -> Optional[tuple]:
        tokens = abstract_primitives(spec)
        if any(tokens[t] < c for t, c in own.items()):
            return None
        shared = tokens - own
        return tuple(sorted(shared.items()))

    right_buckets: dict[tuple, list[ChartSpec]] = {}
    for r_spec in completions_r:
        key = profile(r_spec, right_only)
        if key is not None:
            right_buckets.setdefault(key, []).append(r_spec)

    origin_l = spec_hash(pair.left)
    origin_r = spec_hash(pair.right)
    catalog = catalog or builtin_catalog()
    weights = weights or builtin_weights()
    matches: list[tuple[int, tuple, tuple, ChartSpec, ChartSpec]] = []
    for l_spec in completions_l:
        key = profile(l_spec, left_only)
        if key is None:
            continue
        bucket = right_buckets.get(key)
        if not bucket:
            continue
        r_spec = bucket.pop(0)
        hl, hr = spec_hash(l_spec), spec_hash(r_spec)
        if hl == origin_l and hr == origin_r:
            continue
        if hl == hr:
            continue
        if diff_specs(l_spec, r_spec) != diffs:
            continue
        pair_cost = cost(extract_features(l_spec, catalog), weights) + cost(
            extract_features(r_spec, catalog), weights
        )
        matches.append(
            (pair_cost, canonical_sort_key(l_spec), canonical_sort_key(r_spec),
             l_spec, r_spec)
        )
    matches.sort(key=lambda t: t[:3])
    return [
        DesignPair(
            id=derive_pair_id(l_spec, r_spec, "primitive_aug", salt=pair.id),
            left=l_spec,
            right=r_spec,
            source="primitive_aug",
            lineage=Lineage(origin=pair.id),
            group=pair.group,
        )
        for _, _, _, l_spec, r_spec in matches[:max_new]
    ]


# ---------------------------------------------------------------------------
# feature augmentation (unary and binary ablation)
# ---------------------------------------------------------------------------

def _l1_excluding(a: FeatureVector, b: FeatureVector, exclude: frozenset[str]) -> int:
    keys = (set(a) | set(b)) - exclude
    return sum(abs(a.get(k) - b.get(k)) for k in keys)


def _closest_couple(
    withs: Sequence[ChartSpec],
    withouts: Sequence[ChartSpec],
    exclude: frozenset[str],
    catalog: FeatureCatalog,
) -> tuple[ChartSpec, ChartSpec]:
    """The (with, without) couple minimizing L1 feature distance outside the
    ablated feature(s); ties broken by canonical order."""
    with_fvs = [(s, extract_features(s, catalog)) for s in withs]
    without_fvs = [(s, extract_features(s, catalog)) for s in withouts]
    best: Optional[tuple[int, tuple, tuple, ChartSpec, ChartSpec]] = None
    for ws, wfv in with_fvs:
        wkey = canonical_sort_key(ws)
        for os_, ofv in without_fvs:
            d = _l1_excluding(wfv, ofv, exclude)
            cand = (d, wkey, canonical_sort_key(os_), ws, os_)
            if best is None or cand[:3] < best[:3]:
                best = cand
    assert best is not None
    return best[3], best[4]


@dataclass(frozen=True)
class AblationResult:
    feature: str
    pairs: tuple[DesignPair, ...]
    warnings: tuple[str, ...]

    @property
    def feasible(self) -> bool:
        return bool(self.pairs)


def feature_augment_unary(
    feature: str,
    partials: Sequence[PartialSpec],
    catalog: Optional[FeatureCatalog] = None,
    pairs_per_feature: int = DEFAULT_PAIRS_PER_FEATURE,
    bounds: EnumerationBounds = EnumerationBounds(max_results=150),
    rng_seed: int = 0,
) -> AblationResult:
    """(with, without) ablation pairs for one feature, one pair per sampled
    partial, other feature differences L1-minimized.

    Partials are tried in seeded-random order until pairs_per_feature pairs
    are built or the pool is exhausted; infeasible partials are reported as
    warnings, never silently dropped.
    """
    catalog = catalog or builtin_catalog()
    if feature not in catalog:
        raise UnknownFeatureError(feature)
    order = list(partials)
    random.Random(rng_seed).shuffle(order)
    pairs: list[DesignPair] = []
    warnings: list[str] = []
    for partial in order:
        if len(pairs) >= pairs_per_feature:
            break
        withs = enumerate_constrained(partial, {feature}, (), bounds, catalog=catalog)
        withouts = enumerate_constrained(partial, (), {feature}, bounds, catalog=catalog)
        if not withs or not withouts:
            warnings.append(
                f"feature {feature}: partial {partial.name or '<unnamed>'} "
                f"infeasible (with={len(withs)}, without={len(withouts)})"
            )
            continue
        with_spec, without_spec = _closest_couple(
            withs, withouts, frozenset({feature}), catalog
        )
        pairs.append(
            DesignPair(
                id=derive_pair_id(
                    with_spec, without_spec, "feature_aug_unary", salt=feature
                ),
                left=with_spec,
                right=without_spec,
                source="feature_aug_unary",
                lineage=Lineage(ablated=(feature,), rng_seed=rng_seed),
            )
        )
    if not pairs:
        warnings.append(f"feature {feature}: unsatisfiable over all given partials")
    return AblationResult(feature=feature, pairs=tuple(pairs), warnings=tuple(warnings))


@dataclass(frozen=True)
class BinaryAblationResult:
    feature_a: str
    feature_b: str
    pairs: tuple[DesignPair, ...]
    warnings: tuple[str, ...]
    rejected: bool = False
    reason: Optional[str] = None  # "contradictory" | "provoking" | "too_common"


def feature_augment_binary(
    a: str,
    b: str,
    partials: Sequence[PartialSpec],
    graph: DependencyGraph,
    catalog: Optional[FeatureCatalog] = None,
    frequencies: Optional[Mapping[str, float]] = None,
    pairs_per_context: int = 2,
    bounds: EnumerationBounds = EnumerationBounds(max_results=150),
    rng_seed: int = 0,
) -> BinaryAblationResult:
    """Ablate feature b within the presence and the absence of feature a.

    Feature pairs connected by provokes/contradicts edges are rejected with
    a reason code, as are features appearing in more than 90% of corpus
    charts (when commonness fractions are supplied).  Both sides of every
    emitted pair share the a-state.
    """
    catalog = catalog or builtin_catalog()
    for name in (a, b):
        if name not in catalog:
            raise UnknownFeatureError(name)
    if a == b:
        raise ValueError("binary ablation needs two distinct features")

    def reject(reason: str) -> BinaryAblationResult:
        return BinaryAblationResult(a, b, (), (), rejected=True, reason=reason)

    if graph.contradicts(a, b):
        return reject("contradictory")
    if graph.provokes(a, b) or graph.provokes(b, a):
        return reject("provoking")
    if frequencies is not None:
        if frequencies.get(a, 0.0) > COMMONNESS_CUTOFF or frequencies.get(b, 0.0) > COMMONNESS_CUTOFF:
            return reject("too_common")

    pairs: list[DesignPair] = []
    warnings: list[str] = []
    rng = random.Random(rng_seed)
    for present in (True, False):
        order = list(partials)
        rng.shuffle(order)
        built = 0
        for partial in order:
            if built >= pairs_per_context:
                break
            if present:
                force_with, forbid_with = {a, b}, set()
                force_without, forbid_without = {a}, {b}
            else:
                force_with, forbid_with = {b}, {a}
                force_without, forbid_without = set(), {a, b}
            withs = enumerate_constrained(
                partial, force_with, forbid_with, bounds, catalog=catalog
            )
            withouts = enumerate_constrained(
                partial, force_without, forbid_without, bounds, catalog=catalog
            )
            if not withs or not withouts:
                continue
            with_spec, without_spec = _closest_couple(
                withs, withouts, frozenset({b}), catalog
            )
            pairs.append(
                DesignPair(
                    id=derive_pair_id(
                        with_spec,
                        without_spec,
                        "feature_aug_binary",
                        salt=f"{a}|{b}|{present}",
                    ),
                    left=with_spec,
                    right=without_spec,
                    source="feature_aug_binary",
                    lineage=Lineage(
                        ablated=(b,),
                        context={"feature": a, "present": present},
                        rng_seed=rng_seed,
                    ),
                )
            )
            built += 1
        if built == 0:
            warnings.append(
                f"({a}, {b}): no pair for the {'presence' if present else 'absence'} context"
            )
    return BinaryAblationResult(a, b, tuple(pairs), tuple(warnings))


def unique_data_partials(pairs: Iterable[DesignPair]) -> list[PartialSpec]:
    """Distinct data specifications (dataset + layer/encoding counts) found
    across a pair corpus, for use as ablation partials."""
    seen: dict[tuple, PartialSpec] = {}
    for pair in pairs:
        for spec in (pair.left, pair.right):
            partial = data_partial(spec)
            key = (
                tuple(
                    (f.name, f.dtype.value, f.cardinality, f.extent, f.interesting)
                    for f in partial.dataset
                ),
                partial.layer_count,
                partial.encoding_counts(),
                partial.coordinates,
            )
            if key not in seen:
                named = PartialSpec(
                    dataset=partial.dataset,
                    layer_count=partial.layer_count,
                    encoding_count=partial.encoding_count,
                    coordinates=partial.coordinates,
                    name=f"data-{len(seen)}",
                )
                seen[key] = named
    return list(seen.values())


# ---------------------------------------------------------------------------
# seed augmentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeedDataSpec:
    """A curated data specification for seed augmentation."""

    name: str
    fields: tuple[FieldDef, ...]
    layer_count: int = 1
    encoding_count: int | tuple[int, ...] = 2
    coordinates: Coordinates = Coordinates.CARTESIAN

    def to_partial(self) -> PartialSpec:
        return PartialSpec(
            dataset=self.fields,
            layer_count=self.layer_count,
            encoding_count=self.encoding_count,
            coordinates=self.coordinates,
            name=self.name,
        )


@dataclass(frozen=True)
class SeedAugmentResult:
    pairs: tuple[DesignPair, ...]
    warnings: tuple[str, ...]
    per_seed: Mapping[str, int]


def seed_augment(
    seeds: Sequence[SeedDataSpec],
    w: WeightTable,
    catalog: Optional[FeatureCatalog] = None,
    n_top: int = DEFAULT_TOP_N,
    bounds: EnumerationBounds = EnumerationBounds(
        max_results=600, max_feature_count=20
    ),
) -> SeedAugmentResult:
    """Enumerate each seed, keep the top n_top distinct-cost designs, and
    pair them all, the cheaper side preferred, labeled from w.

    Each seed contributes k(k-1)/2 pairs where k is the number of distinct
    cost levels found (k = n_top when the space is rich enough); a seed
    yielding fewer than two levels contributes nothing, with a warning.
    """
    if n_top < 2:
        raise ValueError("n_top must be >= 2")
    catalog = catalog or builtin_catalog()
    pairs: list[DesignPair] = []
    warnings: list[str] = []
    per_seed: dict[str, int] = {}
    for seed in seeds:
        specs = complete(seed.to_partial(), bounds, catalog=catalog, weights=w)
        if not specs:
            warnings.append(f"seed {seed.name}: no completions")
            per_seed[seed.name] = 0
            continue
        top = top_k_distinct_cost(specs, w, n_top, catalog)
        if len(top) < 2:
            warnings.append(
                f"seed {seed.name}: fewer than two distinct costs ({len(top)})"
            )
            per_seed[seed.name] = 0
            continue
        costs = [cost(extract_features(s, catalog), w) for s in top]
        n_before = len(pairs)
        for i in range(len(top)):
            for j in range(i + 1, len(top)):
                pairs.append(
                    DesignPair(
                        id=derive_pair_id(
                            top[i], top[j], "seed_aug", salt=f"{seed.name}|{i}|{j}"
                        ),
                        left=top[i],
                        right=top[j],
                        label=-1,  # lower-cost side preferred, and costs are distinct
                        source="seed_aug",
                        label_provenance="seed_weights",
                        lineage=Lineage(
                            context={
                                "seed": seed.name,
                                "cost_left": costs[i],
                                "cost_right": costs[j],
                                "weights_version": w.version,
                            }
                        ),
                        group=seed.name,
                    )
                )
        per_seed[seed.name] = len(pairs) - n_before
    return SeedAugmentResult(tuple(pairs), tuple(warnings), per_seed)


# ---------------------------------------------------------------------------
# legibility heuristics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IllegibilityFlag:
    illegible: bool
    reason: Optional[str] = None


def flag_illegible(
    spec: ChartSpec,
    density_cap: int = DEFAULT_DENSITY_CAP,
    high_cardinality: int = HIGH_CARDINALITY_THRESHOLD,
) -> IllegibilityFlag:
    """Advisory graphical-density screen; final removal is a human decision.

    Flags (1) bar/area layers with no aggregation over a high-cardinality
    positional field, and (2) layers whose estimated mark count (product of
    unaggregated discrete cardinalities, with field cardinality standing in
    for the row count of unaggregated continuous line/bar/area layers)
    exceeds the density cap.
    """
    for mark in spec.marks:
        has_aggregate = any(e.aggregate is not Aggregate.NONE for e in mark.encodings)
        if mark.mtype in (MarkType.BAR, MarkType.AREA) and not has_aggregate:
            for enc in mark.encodings:
                if enc.channel not in (Channel.X, Channel.Y) or enc.is_count:
                    continue
                if enc.bin is not None:
                    continue
                fld = spec.resolve(enc.field)
                assert fld is not None
                if fld.cardinality > high_cardinality:
                    return IllegibilityFlag(
                        True,
                        f"overlapping {mark.mtype.value}s: no aggregation over "
                        f"{fld.name!r} (cardinality {fld.cardinality})",
                    )
        estimate = 1
        continuous_cards: list[int] = []
        for enc in mark.encodings:
            if enc.is_count or enc.aggregate is not Aggregate.NONE:
                continue
            if enc.bin is not None:
                estimate *= enc.bin
                continue
            fld = spec.resolve(enc.field)
            assert fld is not None
            if fld.dtype in (DType.STRING, DType.BOOLEAN):
                estimate *= fld.cardinality
            else:
                continuous_cards.append(fld.cardinality)
        if mark.mtype in (MarkType.LINE, MarkType.BAR, MarkType.AREA) and continuous_cards:
            estimate = max(estimate, max(continuous_cards))
        if spec.facet is not None:
            ffld = spec.resolve(spec.facet.field)
            assert ffld is not None
            estimate *= spec.facet.bin or ffld.cardinality
        if estimate > density_cap:
            return IllegibilityFlag(
                True,
                f"overplotted {mark.mtype.value}s: estimated {estimate} marks "
                f"exceeds cap {density_cap}",
            )
    return IllegibilityFlag(False, None)


# ---------------------------------------------------------------------------
# curated builtin seeds
# ---------------------------------------------------------------------------

def _q(name: str, lo: float, hi: float, card: int, interesting: bool = False) -> FieldDef:
    return FieldDef(
        name=name,
        dtype=DType.NUMBER,
        cardinality=card,
        entropy=round(math.log2(card) * 0.9, 3),
        extent=(lo, hi),
        interesting=interesting,
    )


def _s(name: str, card: int) -> FieldDef:
    return FieldDef(
        name=name,
        dtype=DType.STRING,
        cardinality=card,
        entropy=round(math.log2(card) * 0.95, 3),
    )


def _t(name: str, card: int) -> FieldDef:
    # epoch-second extents spanning 2020-2023
    return FieldDef(
        name=name,
        dtype=DType.DATETIME,
        cardinality=card,
        entropy=round(math.log2(card) * 0.97, 3),
        extent=(1577836800.0, 1672531200.0),
    )


def builtin_seed_specs() -> list[SeedDataSpec]:
    """Ten curated data specifications spanning univariate, bivariate,
    time-series, and categorical cases with positional channels and
    faceting opportunities."""
    return [
        SeedDataSpec("univariate_value", ( _q("value", 0.5, 99.5, 80), )),
        SeedDataSpec("univariate_skewed", ( _q("amount", 1.0, 10000.0, 120), )),
        SeedDataSpec("bivariate_qq", (_q("metric_a", 0.2, 45.0, 60), _q("metric_b", 1.0, 900.0, 75))),
        SeedDataSpec(
            "bivariate_interest",
            (_q("profit", -2000.0, 8000.0, 90, interesting=True), _q("sales", 5.0, 500.0, 70)),
        ),
        SeedDataSpec("timeseries_price", (_t("date", 48), _q("price", 3.0, 150.0, 64))),
        SeedDataSpec("category_value", (_s("region", 5), _q("revenue", 10.0, 1000.0, 50))),
        SeedDataSpec("category_many", (_s("product", 30), _q("units", 1.0, 400.0, 55))),
        SeedDataSpec("two_categories", (_s("dept", 6), _s("status", 3))),
        SeedDataSpec(
            "faceted_trend",
            (_t("month", 24), _q("growth", 0.5, 30.0, 40), _s("segment", 4)),
        ),
        SeedDataSpec(
            "mixed_interest",
            (_q("score", 1.0, 10.0, 30, interesting=True), _s("cohort", 8), _q("size", 2.0, 400.0, 55)),
        ),
    ]


def seed_to_dict(seed: SeedDataSpec) -> dict[str, Any]:
    from .spec import field_to_dict

    return {
        "name": seed.name,
        "fields": [field_to_dict(f) for f in seed.fields],
        "layer_count": seed.layer_count,
        "encoding_count": list(seed.encoding_count)
        if isinstance(seed.encoding_count, tuple)
        else seed.encoding_count,
        "coordinates": seed.coordinates.value,
    }


def seed_from_dict(d: dict[str, Any]) -> SeedDataSpec:
    from .spec import field_from_dict

    enc = d.get("encoding_count", 2)
    return SeedDataSpec(
        name=d["name"],
        fields=tuple(field_from_dict(f) for f in d["fields"]),
        layer_count=int(d.get("layer_count", 1)),
        encoding_count=tuple(enc) if isinstance(enc, list) else int(enc),
        coordinates=Coordinates(d.get("coordinates", "cartesian")),
    )

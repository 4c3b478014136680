"""Augmentation pipelines: primitive round trips, coverage, dependency
analysis against a brute-force oracle, ablation exactness, seed pairing,
and legibility heuristics."""

from __future__ import annotations

import itertools

import pytest

from vizkb.augment import (
    AblationResult,
    DependencyGraph,
    analyze_dependencies,
    builtin_seed_specs,
    coverage_report,
    feature_augment_binary,
    feature_augment_unary,
    flag_illegible,
    primitive_augment,
    seed_augment,
    unique_data_partials,
)
from vizkb.enumerator import (
    EnumerationBounds,
    PartialSpec,
    SpecFragment,
    complete,
)
from vizkb.features import FeatureCatalog, FeatureDef, builtin_catalog, extract_features
from vizkb.pairs import DesignPair, extract_design_differences
from vizkb.spec import (
    Aggregate,
    COUNT_FIELD,
    Channel,
    Coordinates,
    DType,
    FacetDef,
    FacetDirection,
    FieldDef,
    MarkType,
    ScaleType,
    spec_hash,
)
from vizkb.weights import WeightTable, builtin_weights, cost

from conftest import build_spec, enc
from test_pairs import line_color_facet_pair

CAT = builtin_catalog()
W = builtin_weights()

Q = FieldDef("q", DType.NUMBER, cardinality=30, entropy=4.0, extent=(1.0, 80.0))
C = FieldDef("c", DType.STRING, cardinality=4, entropy=1.9)
PARTIAL_QC = PartialSpec(dataset=(Q, C), encoding_count=2,
                         coordinates=Coordinates.CARTESIAN, name="qc")
PARTIAL_Q = PartialSpec(dataset=(Q,), encoding_count=1,
                        coordinates=Coordinates.CARTESIAN, name="q")
SMALL = EnumerationBounds(max_results=400, node_cap=1_000_000)


# -- primitive augmentation ---------------------------------------------------

def test_primitive_augment_includes_point_mark_variant():
    pair = line_color_facet_pair()
    origin_diffs = extract_design_differences(pair)
    out = primitive_augment(pair, max_new=7)
    assert 1 <= len(out) <= 7
    marks = set()
    for p in out:
        assert extract_design_differences(p) == origin_diffs
        assert p.lineage is not None and p.lineage.origin == pair.id
        assert p.source == "primitive_aug"
        assert not p.labeled
        marks.update(m.mtype for m in p.left.marks)
        # origin pair itself never re-emitted
        assert (spec_hash(p.left), spec_hash(p.right)) != (
            spec_hash(pair.left), spec_hash(pair.right)
        )
    assert MarkType.POINT in marks


def test_primitive_augment_respects_max_new():
    pair = line_color_facet_pair()
    out = primitive_augment(pair, max_new=2, bounds=SMALL)
    assert len(out) <= 2


def test_primitive_augment_saturated_pair_gives_nothing():
    """When the two sides share no primitives, the diff pins everything and
    only the origin itself can be re-enumerated, so zero pairs come out."""
    left = build_spec(
        enc(Channel.X, "q1"),
        coordinates=Coordinates.POLAR,
        dataset=(
            FieldDef("q1", DType.NUMBER, cardinality=20, entropy=4.0,
                     extent=(1.0, 9.0)),
            FieldDef("k", DType.STRING, cardinality=3, entropy=1.5),
        ),
    )
    right = build_spec(
        enc(Channel.Y, "k"),
        mark=MarkType.BAR,
        dataset=left.dataset,
        facet=FacetDef(FacetDirection.ROW, "k"),
    )
    pair = DesignPair(id="sat", left=left, right=right)
    assert extract_design_differences(pair).left_tokens()  # fully different
    out = primitive_augment(pair, bounds=SMALL)
    assert out == []


def test_primitive_augment_requires_differences(scatter):
    near = DesignPair(
        id="x",
        left=build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2")),
        right=build_spec(enc(Channel.X, "q2"), enc(Channel.Y, "q1")),
    )
    # same token multiset (field names are abstracted away) -> no differences
    with pytest.raises(ValueError, match="differences"):
        primitive_augment(near, bounds=SMALL)


# -- coverage -----------------------------------------------------------------

def test_coverage_empty_corpus_lists_everything():
    report = coverage_report([], CAT, threshold=7)
    assert report.under_covered == frozenset(CAT.names)
    assert report.n_charts == 0


def test_coverage_threshold_is_strict():
    spec = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"))
    other = build_spec(enc(Channel.X, "q1"), enc(Channel.Y, "q2"),
                       mark=MarkType.TICK)
    pair = DesignPair(id="p", left=spec, right=other)
    # channel_x occurs once per chart; 4 pairs = 8 charts... use 3.5 pairs
    report = coverage_report([pair] * 4, CAT, threshold=7)
    # 8 charts, channel_x appears 8 times -> not under covered
    assert report.frequencies["channel_x"] == 8
    assert "channel_x" not in report.under_covered
    report7 = coverage_report([pair] * 3 + [pair.swapped()], CAT, threshold=7)
    assert report7.frequencies["channel_x"] == 8
    # exactly threshold occurrences is NOT under covered (strict <)
    seven = {"f": 7}
    from vizkb.augment import CoverageReport
    r = CoverageReport(frequencies=seven, chart_counts={"f": 7}, n_charts=7,
                       threshold=7,
                       under_covered=frozenset(k for k, v in seven.items() if v < 7))
    assert "f" not in r.under_covered


# -- dependency analysis ------------------------------------------------------

def test_aggregate_mean_provokes_aggregate():
    probe = complete(PARTIAL_QC, SMALL)
    graph = analyze_dependencies(probe, CAT)
    assert graph.provokes("aggregate_mean", "aggregate")
    assert not graph.provokes("aggregate", "aggregate_mean")


def test_log_contradicts_linear():
    probe = complete(PARTIAL_Q, SMALL)
    graph = analyze_dependencies(probe, CAT)
    assert graph.contradicts("log_x", "linear_x")
    assert graph.contradicts("linear_x", "log_x")  # stored both directions


def test_provokes_is_irreflexive():
    probe = complete(PARTIAL_Q, SMALL)
    graph = analyze_dependencies(probe, CAT)
    assert not any(a == b for a, rel, b in graph.edges if rel == "provokes")


def test_micro_catalog_matches_bruteforce_oracle():
    micro = CAT.subset([
        "aggregate", "aggregate_mean", "aggregate_sum", "log_x", "linear_x",
        "bin", "bin_high", "mark_bar",
    ])
    probe = complete(PARTIAL_QC, SMALL)
    graph = analyze_dependencies(probe, micro)

    presence = {
        name: {i for i, s in enumerate(probe)
               if extract_features(s, micro).get(name) >= 1}
        for name in micro.names
    }
    expected = set()
    for a, b in itertools.permutations([n for n in micro.names if presence[n]], 2):
        if presence[a] <= presence[b] and not presence[b] <= presence[a]:
            expected.add((a, "provokes", b))
        if not presence[a] & presence[b]:
            expected.add((a, "contradicts", b))
            expected.add((b, "contradicts", a))
    assert graph.edges == frozenset(expected)
    assert graph.undetermined == frozenset(
        n for n in micro.names if not presence[n]
    )


def test_undetermined_features_reported():
    sub = CAT.subset(["log_x", "linear_x", "polar_coords"])
    probe = complete(PARTIAL_Q, SMALL)  # cartesian pinned, polar never occurs
    graph = analyze_dependencies(probe, sub)
    assert "polar_coords" in graph.undetermined


# -- unary ablation -----------------------------------------------------------

def test_unary_ablation_bin_high():
    result = feature_augment_unary(
        "bin_high", [PARTIAL_QC], CAT, pairs_per_feature=1, bounds=SMALL,
    )
    assert len(result.pairs) == 1
    pair = result.pairs[0]
    with_fv = extract_features(pair.left, CAT)
    without_fv = extract_features(pair.right, CAT)
    assert with_fv.get("bin_high") >= 1
    assert without_fv.get("bin_high") == 0
    assert pair.lineage is not None and pair.lineage.ablated == ("bin_high",)
    assert pair.source == "feature_aug_unary"


def test_unary_ablation_counts_verified_for_many_features():
    partials = [PARTIAL_QC, PARTIAL_Q]
    for feature in ("log_x", "aggregate", "bin", "facet_row"):
        result = feature_augment_unary(
            feature, partials, CAT, pairs_per_feature=2, bounds=SMALL, rng_seed=1,
        )
        for pair in result.pairs:
            assert extract_features(pair.left, CAT).get(feature) >= 1
            assert extract_features(pair.right, CAT).get(feature) == 0


def test_unary_ablation_unsatisfiable_warns():
    # channel_x is pinned by the fragment, so its without-side is empty.
    pinned = PartialSpec(
        dataset=(Q,), encoding_count=1, coordinates=Coordinates.CARTESIAN,
        fixed=(SpecFragment(channel=Channel.X),), name="pinned-x",
    )
    result = feature_augment_unary("channel_x", [pinned], CAT, bounds=SMALL)
    assert result.pairs == ()
    assert not result.feasible
    assert any("unsatisfiable" in w for w in result.warnings)


def test_unary_ablation_unknown_feature():
    from vizkb.features import UnknownFeatureError

    with pytest.raises(UnknownFeatureError):
        feature_augment_unary("nope", [PARTIAL_Q], CAT, bounds=SMALL)


# -- binary ablation ----------------------------------------------------------

def _graph_with(edges) -> DependencyGraph:
    return DependencyGraph(nodes=tuple(CAT.names), edges=frozenset(edges))


def test_binary_rejects_contradictory():
    graph = _graph_with({
        ("horizontal_scrolling_x", "contradicts", "high_cardinality_shape"),
        ("high_cardinality_shape", "contradicts", "horizontal_scrolling_x"),
    })
    result = feature_augment_binary(
        "horizontal_scrolling_x", "high_cardinality_shape",
        [PARTIAL_QC], graph, CAT, bounds=SMALL,
    )
    assert result.rejected and result.reason == "contradictory"
    assert result.pairs == ()


def test_binary_rejects_provoking():
    graph = _graph_with({("aggregate_mean", "provokes", "aggregate")})
    result = feature_augment_binary(
        "aggregate_mean", "aggregate", [PARTIAL_QC], graph, CAT, bounds=SMALL,
    )
    assert result.rejected and result.reason == "provoking"


def test_binary_rejects_too_common():
    graph = _graph_with(set())
    result = feature_augment_binary(
        "bin", "log_x", [PARTIAL_QC], graph, CAT,
        frequencies={"bin": 0.95, "log_x": 0.1}, bounds=SMALL,
    )
    assert result.rejected and result.reason == "too_common"


def test_binary_context_integrity():
    graph = _graph_with(set())
    result = feature_augment_binary(
        "aggregate", "log_x", [PARTIAL_QC], graph, CAT,
        pairs_per_context=1, bounds=SMALL, rng_seed=3,
    )
    assert not result.rejected
    assert result.pairs
    contexts = set()
    for pair in result.pairs:
        assert pair.lineage is not None
        ctx = pair.lineage.context
        assert ctx is not None and ctx["feature"] == "aggregate"
        contexts.add(ctx["present"])
        left_fv = extract_features(pair.left, CAT)
        right_fv = extract_features(pair.right, CAT)
        # b ablated: (>=1, 0); both sides share the a-state
        assert left_fv.get("log_x") >= 1
        assert right_fv.get("log_x") == 0
        a_state = left_fv.get("aggregate") >= 1
        assert (right_fv.get("aggregate") >= 1) == a_state
        assert a_state == ctx["present"]
    assert contexts == {True, False}


# -- seed augmentation --------------------------------------------------------

SEED_BOUNDS = EnumerationBounds(max_results=50_000, max_feature_count=20)


def test_seed_pairs_prefer_cheaper_side():
    seeds = builtin_seed_specs()[:2]
    result = seed_augment(seeds, W, CAT, n_top=4, bounds=SEED_BOUNDS)
    assert len(result.pairs) == 2 * 6  # C(4,2) per seed
    for pair in result.pairs:
        assert pair.label == -1
        assert pair.label_provenance == "seed_weights"
        cl = cost(extract_features(pair.left, CAT), W)
        cr = cost(extract_features(pair.right, CAT), W)
        assert cl < cr


def test_seed_n_top_two_gives_one_pair_per_seed():
    seeds = builtin_seed_specs()[:3]
    result = seed_augment(seeds, W, CAT, n_top=2, bounds=SEED_BOUNDS)
    assert len(result.pairs) == 3
    assert all(n == 1 for n in result.per_seed.values())


def test_seed_degenerate_cost_surface_warns():
    # A catalog whose single feature never fires makes every cost zero.
    flat = FeatureCatalog([
        FeatureDef("never", lambda s: 0, 1, "never fires"),
    ])
    flat_w = WeightTable({"never": 1}, provenance="manual")
    seeds = builtin_seed_specs()[:1]
    result = seed_augment(seeds, flat_w, flat, n_top=8,
                          bounds=EnumerationBounds(max_results=2000))
    assert result.pairs == ()
    assert any("fewer than two distinct costs" in w for w in result.warnings)


def test_seed_rejects_n_top_below_two():
    with pytest.raises(ValueError):
        seed_augment(builtin_seed_specs()[:1], W, CAT, n_top=1)


# -- illegibility -------------------------------------------------------------

def test_overplotted_line_flagged():
    big = FieldDef("rows", DType.NUMBER, cardinality=500, entropy=8.0,
                   extent=(1.0, 500.0))
    q = FieldDef("v", DType.NUMBER, cardinality=400, entropy=8.0,
                 extent=(0.0, 10.0))
    spec = build_spec(enc(Channel.X, "rows"), enc(Channel.Y, "v"),
                      mark=MarkType.LINE, dataset=(big, q))
    flag = flag_illegible(spec)
    assert flag.illegible
    assert "overplotted line" in flag.reason


def test_aggregated_bar_over_few_categories_ok(cat_bar):
    assert not flag_illegible(cat_bar).illegible


def test_unaggregated_bars_over_high_cardinality_flagged():
    spec = build_spec(enc(Channel.X, "cat200"), enc(Channel.Y, "q1"),
                      mark=MarkType.BAR)
    flag = flag_illegible(spec)
    assert flag.illegible
    assert "overlapping bar" in flag.reason


def test_scatter_is_legible(scatter):
    assert not flag_illegible(scatter).illegible


# -- partial derivation -------------------------------------------------------

def test_unique_data_partials_dedupes(scatter, histogram):
    p1 = DesignPair(id="a", left=scatter, right=histogram)
    partials = unique_data_partials([p1, p1])
    assert len(partials) == 1  # same dataset, layer and encoding counts
    assert partials[0].layer_count == 1
    assert partials[0].encoding_counts() == (2,)

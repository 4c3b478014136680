"""Command-line entry points for every pipeline stage.

Every command reads/writes the documented JSON/JSONL/CSV formats, exits
nonzero on error, and prints one machine-readable JSON summary line as its
final stdout line.  Identical inputs plus the same --seed give
byte-identical outputs; commands that stamp wall-clock times accept
--no-timestamps to pin them to the epoch.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional

from . import __version__
from .augment import (
    builtin_seed_specs,
    coverage_report,
    analyze_dependencies,
    feature_augment_binary,
    feature_augment_unary,
    primitive_augment,
    seed_augment,
    seed_from_dict,
    unique_data_partials,
)
from .config import ProjectConfig
from .enumerator import (
    EnumerationBounds,
    complete,
    enumerate_constrained,
    partial_from_dict,
)
from .evaluate import (
    accuracy,
    group_cosine_similarity,
    weight_shift_report,
    write_shift_csv,
)
from .features import builtin_catalog, extract_features
from .hardrules import validate
from .labeling import (
    ClassifierConfig,
    LabelStore,
    classify_labels,
    record_to_dict,
    train_classifier_labeler,
)
from .llm import LLMEndpointConfig, llm_label_pairs
from .pairs import read_pairs_jsonl, write_pairs_jsonl
from .spec import load_spec, spec_to_dict
from .training import (
    MODEL_FAMILIES,
    TrainConfig,
    coefficients_to_weights,
    cross_validate,
    examples_for_pairs,
    make_splits,
)
from .weights import (
    builtin_weights,
    cost,
    read_weights_csv,
    write_weights_csv,
    write_weights_json,
)

EPOCH_TS = "1970-01-01T00:00:00+00:00"


def _summary(command: str, **stats: Any) -> None:
    print(json.dumps({"command": command, "status": "ok", **stats}, sort_keys=True))


def _load_weights(path: Optional[str]):
    if not path or path == "builtin":
        return builtin_weights()
    if path.endswith(".json"):
        from .weights import read_weights_json

        return read_weights_json(path)
    return read_weights_csv(path)


def _bounds(args: argparse.Namespace) -> EnumerationBounds:
    return EnumerationBounds(
        max_results=args.max_results,
        max_feature_count=args.max_features,
        cost_cap=getattr(args, "cost_cap", None),
        node_cap=args.node_cap,
    )


def _add_bounds_args(p: argparse.ArgumentParser, max_results: int = 10_000) -> None:
    p.add_argument("--max-results", type=int, default=max_results)
    p.add_argument("--max-features", type=int, default=None,
                   help="cap on total feature occurrences per chart")
    p.add_argument("--node-cap", type=int, default=500_000)


def _fix_timestamps(records: list, no_timestamps: bool) -> list:
    if not no_timestamps:
        return records
    import dataclasses

    return [dataclasses.replace(r, timestamp=EPOCH_TS) for r in records]


# ---------------------------------------------------------------------------
# kb-core commands
# ---------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> None:
    spec = load_spec(args.spec)
    violations = validate(spec)
    for v in violations:
        print(json.dumps({"rule": v.rule, "message": v.message}))
    _summary("validate", spec=args.spec, valid=not violations, violations=len(violations))


def cmd_features(args: argparse.Namespace) -> None:
    spec = load_spec(args.spec)
    fv = extract_features(spec, builtin_catalog())
    _summary("features", spec=args.spec, counts=fv.to_dict(), total=fv.total())


def cmd_cost(args: argparse.Namespace) -> None:
    spec = load_spec(args.spec)
    w = _load_weights(args.weights)
    fv = extract_features(spec, builtin_catalog())
    _summary("cost", spec=args.spec, cost=cost(fv, w), weights_version=w.version)


def cmd_catalog(args: argparse.Namespace) -> None:
    catalog = builtin_catalog()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(catalog.to_json() + "\n")
    _summary("catalog", features=len(catalog), out=args.out)


# ---------------------------------------------------------------------------
# enumerator commands
# ---------------------------------------------------------------------------

def cmd_enumerate(args: argparse.Namespace) -> None:
    with open(args.partial, "r", encoding="utf-8") as fh:
        partial = partial_from_dict(json.load(fh))
    weights = _load_weights(args.weights) if (args.weights or args.cost_cap) else None
    bounds = _bounds(args)
    force = set(args.force.split(",")) if args.force else set()
    forbid = set(args.forbid.split(",")) if args.forbid else set()
    if force or forbid:
        specs = enumerate_constrained(partial, force, forbid, bounds, weights=weights)
    else:
        specs = complete(partial, bounds, weights=weights)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for s in specs:
                fh.write(json.dumps(spec_to_dict(s), sort_keys=True) + "\n")
    _summary("enumerate", partial=args.partial, results=len(specs), out=args.out)


# ---------------------------------------------------------------------------
# augmentation commands
# ---------------------------------------------------------------------------

def cmd_augment_primitive(args: argparse.Namespace) -> None:
    pairs = read_pairs_jsonl(args.pairs)
    bounds = _bounds(args)
    out_pairs = []
    skipped = 0
    per_origin: dict[str, int] = {}
    for pair in pairs:
        try:
            new = primitive_augment(pair, max_new=args.max_new, bounds=bounds)
        except ValueError:
            skipped += 1
            continue
        per_origin[pair.id] = len(new)
        out_pairs.extend(new)
    write_pairs_jsonl(out_pairs, args.out)
    _summary(
        "augment-primitive",
        origins=len(pairs),
        skipped=skipped,
        new_pairs=len(out_pairs),
        out=args.out,
    )


def cmd_augment_feature(args: argparse.Namespace) -> None:
    pairs = read_pairs_jsonl(args.pairs)
    catalog = builtin_catalog()
    report = coverage_report(pairs, catalog, threshold=args.threshold)
    partials = unique_data_partials(pairs)
    if not partials:
        raise SystemExit("no data partials derivable from the corpus")
    bounds = _bounds(args)

    # Probe enumeration for the dependency graph: corpus charts plus
    # completions of every data partial.
    probe = [s for p in pairs for s in (p.left, p.right)]
    for partial in partials:
        probe.extend(complete(partial, bounds, catalog=catalog))
    graph = analyze_dependencies(probe, catalog)

    under = sorted(report.under_covered)
    out_pairs = []
    warnings: list[str] = []
    infeasible: list[str] = []
    for feature in under:
        result = feature_augment_unary(
            feature,
            partials,
            catalog,
            pairs_per_feature=args.per_feature,
            bounds=bounds,
            rng_seed=args.seed,
        )
        out_pairs.extend(result.pairs)
        warnings.extend(result.warnings)
        if not result.feasible:
            infeasible.append(feature)

    binary_built = 0
    binary_rejected: dict[str, int] = {}
    if args.binary_pairs > 0:
        fractions = report.chart_fractions()
        considered = 0
        for a in under:
            for b in under:
                if a == b or considered >= args.binary_pairs:
                    continue
                considered += 1
                result = feature_augment_binary(
                    a,
                    b,
                    partials,
                    graph,
                    catalog,
                    frequencies=fractions,
                    bounds=bounds,
                    rng_seed=args.seed,
                )
                if result.rejected:
                    binary_rejected[result.reason or "?"] = (
                        binary_rejected.get(result.reason or "?", 0) + 1
                    )
                    continue
                out_pairs.extend(result.pairs)
                binary_built += len(result.pairs)
            if considered >= args.binary_pairs:
                break

    write_pairs_jsonl(out_pairs, args.out)
    _summary(
        "augment-feature",
        under_covered=len(under),
        unary_pairs=len(out_pairs) - binary_built,
        binary_pairs=binary_built,
        binary_rejected=binary_rejected,
        infeasible_features=infeasible,
        warnings=len(warnings),
        out=args.out,
        seed=args.seed,
    )


def cmd_augment_seed(args: argparse.Namespace) -> None:
    if args.specs == "builtin":
        seeds = builtin_seed_specs()
    else:
        with open(args.specs, "r", encoding="utf-8") as fh:
            seeds = [seed_from_dict(d) for d in json.load(fh)]
    w = _load_weights(args.weights)
    bounds = _bounds(args)
    result = seed_augment(seeds, w, n_top=args.top, bounds=bounds)
    write_pairs_jsonl(result.pairs, args.out)
    _summary(
        "augment-seed",
        seeds=len(seeds),
        pairs=len(result.pairs),
        per_seed=dict(result.per_seed),
        warnings=list(result.warnings),
        out=args.out,
    )


def cmd_coverage(args: argparse.Namespace) -> None:
    pairs = read_pairs_jsonl(args.pairs)
    report = coverage_report(pairs, builtin_catalog(), threshold=args.threshold)
    payload = {
        "n_charts": report.n_charts,
        "threshold": report.threshold,
        "frequencies": dict(sorted(report.frequencies.items())),
        "relative_frequencies": dict(sorted(report.relative_frequencies().items())),
        "chart_fractions": dict(sorted(report.chart_fractions().items())),
        "under_covered": sorted(report.under_covered),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _summary(
        "coverage",
        charts=report.n_charts,
        under_covered=len(report.under_covered),
        threshold=args.threshold,
        out=args.out,
    )


def cmd_deps(args: argparse.Namespace) -> None:
    pairs = read_pairs_jsonl(args.pairs)
    catalog = builtin_catalog()
    probe = [s for p in pairs for s in (p.left, p.right)]
    if args.probe_partials:
        bounds = _bounds(args)
        for partial in unique_data_partials(pairs):
            probe.extend(complete(partial, bounds, catalog=catalog))
    graph = analyze_dependencies(probe, catalog)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(graph.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    provokes = sum(1 for e in graph.edges if e[1] == "provokes")
    contradicts = sum(1 for e in graph.edges if e[1] == "contradicts") // 2
    _summary(
        "deps",
        probe_charts=len(probe),
        provokes=provokes,
        contradicts=contradicts,
        undetermined=len(graph.undetermined),
        out=args.out,
    )


# ---------------------------------------------------------------------------
# labeling commands
# ---------------------------------------------------------------------------

def cmd_label_classify(args: argparse.Namespace) -> None:
    labeled_pairs = [p for p in read_pairs_jsonl(args.labeled) if p.labeled]
    unlabeled = read_pairs_jsonl(args.unlabeled)
    config = ClassifierConfig(
        hidden=args.hidden, epochs=args.epochs,
        learning_rate=args.lr, seed=args.seed,
    )
    model = train_classifier_labeler(
        [(p, int(p.label)) for p in labeled_pairs], config
    )
    records = classify_labels(model, unlabeled)
    records = _fix_timestamps(records, args.no_timestamps)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(record_to_dict(r), sort_keys=True) + "\n")
    _summary(
        "label-classify",
        trained_on=len(labeled_pairs),
        labeled=len(records),
        cv_accuracy=model.cv_accuracy_,
        seed=args.seed,
        out=args.out,
    )


def cmd_label_llm(args: argparse.Namespace) -> None:
    unlabeled = read_pairs_jsonl(args.pairs)
    config = LLMEndpointConfig(
        url=args.url,
        model=args.model,
        audit_log=args.audit,
        max_parallel=args.parallel,
    )
    records, errors = llm_label_pairs(unlabeled, config)
    records = _fix_timestamps(records, args.no_timestamps)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(record_to_dict(r), sort_keys=True) + "\n")
    _summary(
        "label-llm",
        labeled=len(records),
        contradictory=sum(1 for r in records if r.flag == "contradictory"),
        errors=[{"pair_id": e.pair_id, "error": e.error} for e in errors],
        out=args.out,
    )


def cmd_label_import(args: argparse.Namespace) -> None:
    store = LabelStore()
    import os

    if os.path.exists(args.store):
        store.import_jsonl(args.store)
    n = store.import_jsonl(args.labels)
    store.export_jsonl(args.store)
    _summary("label-import", imported=n, store_records=len(store), store=args.store)


def cmd_label_export(args: argparse.Namespace) -> None:
    store = LabelStore()
    store.import_jsonl(args.store)
    pairs = read_pairs_jsonl(args.pairs)
    labeled = store.apply(pairs)
    if args.labeled_only:
        labeled = [p for p in labeled if p.labeled]
    write_pairs_jsonl(labeled, args.out)
    _summary(
        "label-export",
        pairs=len(pairs),
        exported=len(labeled),
        removed=len(store.removed()),
        out=args.out,
    )


# ---------------------------------------------------------------------------
# training / evaluation commands
# ---------------------------------------------------------------------------

def cmd_train(args: argparse.Namespace) -> None:
    pairs = [p for p in read_pairs_jsonl(args.pairs) if p.labeled and not p.illegible]
    catalog = builtin_catalog()
    config = TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, l2=args.l2, seed=args.seed
    )
    trainer = MODEL_FAMILIES[args.model]
    examples = examples_for_pairs(pairs, catalog)
    coeffs = trainer(examples, config, catalog)
    w = coefficients_to_weights(coeffs, version=f"learned-{args.model}-seed{args.seed}")
    if args.coeffs_out:
        with open(args.coeffs_out, "w", encoding="utf-8") as fh:
            fh.write(coeffs.to_json() + "\n")
    if args.weights_out:
        if args.weights_out.endswith(".json"):
            write_weights_json(w, args.weights_out)
        else:
            write_weights_csv(w, args.weights_out)
    _summary(
        "train",
        pairs=len(pairs),
        examples=len(examples),
        model=args.model,
        seed=args.seed,
        epochs_run=coeffs.metadata.get("epochs_run"),
        weights_out=args.weights_out,
    )


def cmd_cv(args: argparse.Namespace) -> None:
    pairs = [p for p in read_pairs_jsonl(args.pairs) if p.labeled and not p.illegible]
    plan = make_splits(pairs, holdout_frac=args.holdout, k=args.k, seed=args.seed)
    config = TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, l2=args.l2, seed=args.seed
    )
    result = cross_validate(pairs, plan, args.model, config)
    _summary(
        "cv",
        pairs=len(pairs),
        holdout=len(plan.holdout),
        folds=[len(f) for f in plan.folds],
        per_fold_accuracy=[round(a, 6) for a in result.per_fold],
        mean_accuracy=round(result.mean, 6),
        model=args.model,
        seed=args.seed,
    )


def cmd_eval(args: argparse.Namespace) -> None:
    pairs = [p for p in read_pairs_jsonl(args.pairs) if p.labeled and not p.illegible]
    w = _load_weights(args.weights)
    table = accuracy(pairs, w)
    if args.out:
        table.to_csv(args.out)
    _summary(
        "eval",
        pairs=len(pairs),
        accuracy=round(table.overall(), 6),
        weights_version=w.version,
        out=args.out,
    )


def cmd_report_shift(args: argparse.Namespace) -> None:
    w_a = _load_weights(args.a)
    w_b = _load_weights(args.b)
    with open(args.freq, "r", encoding="utf-8") as fh:
        freq_doc = json.load(fh)
    freq = freq_doc.get("relative_frequencies", freq_doc)
    shifts = weight_shift_report(w_a, w_b, freq)
    write_shift_csv(shifts, args.out)
    top = [{"feature": s.feature, "shift": round(s.shift, 6)} for s in shifts[:5]]
    _summary("report-shift", features=len(shifts), top=top, out=args.out)


def cmd_report_cosine(args: argparse.Namespace) -> None:
    catalog = builtin_catalog()
    groups = {}
    for item in args.groups:
        name, _, path = item.partition("=")
        if not path:
            raise SystemExit(f"--groups entries look like name=path, got {item!r}")
        pairs = read_pairs_jsonl(path)
        groups[name] = [
            extract_features(s, catalog) for p in pairs for s in (p.left, p.right)
        ]
    matrix = group_cosine_similarity(groups)
    matrix.to_csv(args.out)
    _summary(
        "report-cosine",
        groups=list(matrix.groups),
        excluded_zero_vectors=dict(matrix.excluded_zero_vectors),
        out=args.out,
    )


# ---------------------------------------------------------------------------
# service
# ---------------------------------------------------------------------------

def cmd_serve(args: argparse.Namespace) -> None:
    import uvicorn

    from .service import ServiceState, create_app

    if args.config:
        config = ProjectConfig.load(args.config)
        args.pairs = args.pairs or config.corpus_path
        args.labels_log = args.labels_log or config.labels_path
        if args.weights == "builtin" and config.weights_path:
            args.weights = config.weights_path
        args.batch = args.batch or config.batch_size
        args.iterations = args.iterations or config.max_iterations
    if not args.pairs:
        raise SystemExit("serve needs --pairs (or a --config with corpus_path)")
    pairs = read_pairs_jsonl(args.pairs)
    weights = _load_weights(args.weights)
    state = ServiceState.create(
        pairs,
        strategy=args.strategy,
        batch_size=args.batch or 20,
        max_iterations=args.iterations or 20,
        weights=weights,
        log_path=args.labels_log,
        snapshot_path=args.snapshot,
    )
    app = create_app(state, static_dir=args.static)
    print(
        json.dumps(
            {
                "command": "serve",
                "status": "ok",
                "pairs": len(pairs),
                "strategy": args.strategy,
                "port": args.port,
            },
            sort_keys=True,
        ),
        flush=True,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vizkb",
        description="visualization knowledge-base engine and augmentation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"vizkb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="hard-constraint check of a chart spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("features", help="feature counts of a chart spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("cost", help="chart cost under a weight table")
    p.add_argument("--spec", required=True)
    p.add_argument("--weights", default="builtin")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("catalog", help="export the builtin feature catalog")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("enumerate", help="complete a partial spec")
    p.add_argument("--partial", required=True)
    p.add_argument("--force", default=None, help="comma-separated feature names")
    p.add_argument("--forbid", default=None, help="comma-separated feature names")
    p.add_argument("--weights", default=None)
    p.add_argument("--cost-cap", type=int, default=None)
    p.add_argument("--out", default=None)
    _add_bounds_args(p)
    p.set_defaults(func=cmd_enumerate)

    aug = sub.add_parser("augment", help="augmentation pipelines")
    aug_sub = aug.add_subparsers(dest="augment_kind", required=True)

    p = aug_sub.add_parser("primitive", help="difference-preserving pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-new", type=int, default=7)
    _add_bounds_args(p, max_results=400)
    p.set_defaults(func=cmd_augment_primitive)

    p = aug_sub.add_parser("feature", help="coverage-driven ablation pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=int, default=7)
    p.add_argument("--per-feature", type=int, default=7)
    p.add_argument("--binary-pairs", type=int, default=50,
                   help="cap on ordered feature pairs tried for binary ablation")
    p.add_argument("--seed", type=int, default=0)
    _add_bounds_args(p, max_results=150)
    p.set_defaults(func=cmd_augment_feature)

    p = aug_sub.add_parser("seed", help="top-N distinct-cost seed pairs")
    p.add_argument("--specs", default="builtin", help="seeds JSON file or 'builtin'")
    p.add_argument("--weights", default="builtin")
    p.add_argument("--top", type=int, default=8)
    p.add_argument("--out", required=True)
    _add_bounds_args(p, max_results=50_000)
    p.set_defaults(func=cmd_augment_seed, max_features=20)

    p = sub.add_parser("coverage", help="feature coverage over a corpus")
    p.add_argument("--pairs", required=True)
    p.add_argument("--threshold", type=int, default=7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("deps", help="provokes/contradicts feature graph")
    p.add_argument("--pairs", required=True)
    p.add_argument("--probe-partials", action="store_true",
                   help="extend the probe with completions of corpus data partials")
    p.add_argument("--out", default=None)
    _add_bounds_args(p, max_results=200)
    p.set_defaults(func=cmd_deps)

    lab = sub.add_parser("label", help="labeling workflows")
    lab_sub = lab.add_subparsers(dest="label_kind", required=True)

    p = lab_sub.add_parser("classify", help="classifier labels for unlabeled pairs")
    p.add_argument("--labeled", required=True)
    p.add_argument("--unlabeled", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timestamps", action="store_true")
    p.set_defaults(func=cmd_label_classify)

    p = lab_sub.add_parser("llm", help="LLM labels via an HTTP chat endpoint")
    p.add_argument("--pairs", required=True)
    p.add_argument("--url", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--audit", default=None)
    p.add_argument("--parallel", type=int, default=4)
    p.add_argument("--out", required=True)
    p.add_argument("--no-timestamps", action="store_true")
    p.set_defaults(func=cmd_label_llm)

    p = lab_sub.add_parser("import", help="merge label records into a store file")
    p.add_argument("--labels", required=True)
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_label_import)

    p = lab_sub.add_parser("export", help="apply a store to a corpus")
    p.add_argument("--store", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--labeled-only", action="store_true")
    p.set_defaults(func=cmd_label_export)

    p = sub.add_parser("train", help="fit a linear model and convert weights")
    p.add_argument("--pairs", required=True)
    p.add_argument("--model", choices=sorted(MODEL_FAMILIES), default="logistic")
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=4000)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coeffs-out", default=None)
    p.add_argument("--weights-out", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="k-fold compliance cross-validation")
    p.add_argument("--pairs", required=True)
    p.add_argument("--model", choices=sorted(MODEL_FAMILIES), default="logistic")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--holdout", type=float, default=0.15)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=4000)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("eval", help="compliance accuracy of labeled pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--weights", default="builtin")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    rep = sub.add_parser("report", help="analysis reports")
    rep_sub = rep.add_subparsers(dest="report_kind", required=True)

    p = rep_sub.add_parser("shift", help="frequency-weighted weight shifts")
    p.add_argument("--a", required=True, help="baseline weight table")
    p.add_argument("--b", required=True, help="updated weight table")
    p.add_argument("--freq", required=True,
                   help="relative-frequency JSON (a coverage report works)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_shift)

    p = rep_sub.add_parser("cosine", help="mean cosine similarity between groups")
    p.add_argument("--groups", nargs="+", required=True, metavar="NAME=PAIRS_JSONL")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_cosine)

    p = sub.add_parser("serve", help="run the HTTP labeling service")
    p.add_argument("--pairs", default=None)
    p.add_argument("--config", default=None, help="ProjectConfig JSON file")
    p.add_argument("--strategy", choices=["manual", "active_ml"], default="manual")
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--weights", default="builtin")
    p.add_argument("--labels-log", default=None)
    p.add_argument("--snapshot", default=None)
    p.add_argument("--static", default=None, help="built frontend directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SystemExit:
        raise
    except Exception as err:  # noqa: BLE001 - single CLI error funnel
        print(
            json.dumps(
                {
                    "command": args.command,
                    "status": "error",
                    "error": f"{type(err).__name__}: {err}",
                },
                sort_keys=True,
            ),
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

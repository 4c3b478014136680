"""Ordered design pairs and abstract design differences.

A DesignPair holds two charts with an optional preference label: -1 means
the left chart is preferred, +1 the right, 0 that they are comparable.
Pairs carry their provenance and, for augmented pairs, a lineage back to
the origin pair and the features involved.

The pair-corpus interchange format is JSONL, one pair per line with specs
embedded (a {"$ref": path} object may stand in for either spec on read).
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .primitives import abstract_primitives, token_role
from .spec import ChartSpec, spec_from_dict, spec_hash, spec_to_dict

SOURCES = ("corpus", "primitive_aug", "feature_aug_unary", "feature_aug_binary", "seed_aug")
PROVENANCES = ("manual", "ml", "active_ml", "llm", "seed_weights", "none")
LABELS = (-1, 0, 1)


class IdenticalPairError(ValueError):
    """Both sides of a pair are the same chart (by canonical hash)."""


@dataclass(frozen=True)
class Lineage:
    origin: Optional[str] = None          # origin pair id
    ablated: tuple[str, ...] = ()         # ablated feature names
    context: Optional[dict[str, Any]] = None  # e.g. {"feature": a, "present": True}
    rng_seed: Optional[int] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "origin": self.origin,
            "ablated": list(self.ablated),
            "context": self.context,
            "rng_seed": self.rng_seed,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "Lineage":
        return Lineage(
            origin=d.get("origin"),
            ablated=tuple(d.get("ablated", ())),
            context=d.get("context"),
            rng_seed=d.get("rng_seed"),
        )


@dataclass(frozen=True)
class DesignPair:
    id: str
    left: ChartSpec
    right: ChartSpec
    label: Optional[int] = None           # None means unlabeled
    source: str = "corpus"
    label_provenance: str = "none"
    lineage: Optional[Lineage] = None
    illegible: bool = False
    group: Optional[str] = None           # data-group tag, e.g. a study name

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.label_provenance not in PROVENANCES:
            raise ValueError(f"unknown label provenance {self.label_provenance!r}")
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")
        if self.label is not None and self.label_provenance == "none":
            raise ValueError("a labeled pair needs a label provenance")
        if spec_hash(self.left) == spec_hash(self.right):
            raise IdenticalPairError(f"pair {self.id}: left and right are identical")

    @property
    def labeled(self) -> bool:
        return self.label is not None

    def swapped(self) -> "DesignPair":
        return DesignPair(
            id=self.id,
            left=self.right,
            right=self.left,
            label=None if self.label is None else -self.label,
            source=self.source,
            label_provenance=self.label_provenance,
            lineage=self.lineage,
            illegible=self.illegible,
            group=self.group,
        )

    def with_label(self, label: int, provenance: str) -> "DesignPair":
        return DesignPair(
            id=self.id,
            left=self.left,
            right=self.right,
            label=label,
            source=self.source,
            label_provenance=provenance,
            lineage=self.lineage,
            illegible=self.illegible,
            group=self.group,
        )


def derive_pair_id(left: ChartSpec, right: ChartSpec, source: str, salt: str = "") -> str:
    digest = hashlib.sha256(
        "|".join((spec_hash(left), spec_hash(right), source, salt)).encode("utf-8")
    ).hexdigest()
    return digest[:16]


# ---------------------------------------------------------------------------
# abstract design differences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffEntry:
    """Paired asymmetric token groups for one role (a channel, the mark,
    the facet, or the coordinate system)."""

    role: str
    left: tuple[str, ...]   # tokens only on the left, sorted multiset
    right: tuple[str, ...]  # tokens only on the right, sorted multiset


@dataclass(frozen=True)
class DesignDifference:
    entries: tuple[DiffEntry, ...]

    def is_empty(self) -> bool:
        return not self.entries

    def roles(self) -> tuple[str, ...]:
        return tuple(e.role for e in self.entries)

    def left_tokens(self) -> Counter:
        out: Counter = Counter()
        for e in self.entries:
            out.update(e.left)
        return out

    def right_tokens(self) -> Counter:
        out: Counter = Counter()
        for e in self.entries:
            out.update(e.right)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "entries": [
                {"role": e.role, "left": list(e.left), "right": list(e.right)}
                for e in self.entries
            ]
        }


def _expand(tokens: Counter) -> list[str]:
    out: list[str] = []
    for tok in sorted(tokens):
        out.extend([tok] * tokens[tok])
    return out


def diff_specs(left: ChartSpec, right: ChartSpec) -> DesignDifference:
    """Multiset symmetric difference of abstract primitives, grouped by role.

    Raises IdenticalPairError when the two specs are the same chart.
    """
    if spec_hash(left) == spec_hash(right):
        raise IdenticalPairError("cannot diff a chart against itself")
    lt = abstract_primitives(left)
    rt = abstract_primitives(right)
    left_only = lt - rt
    right_only = rt - lt
    roles = sorted(
        {token_role(t) for t in left_only} | {token_role(t) for t in right_only}
    )
    entries = []
    for role in roles:
        l_tokens = Counter({t: c for t, c in left_only.items() if token_role(t) == role})
        r_tokens = Counter({t: c for t, c in right_only.items() if token_role(t) == role})
        entries.append(
            DiffEntry(role=role, left=tuple(_expand(l_tokens)), right=tuple(_expand(r_tokens)))
        )
    return DesignDifference(entries=tuple(entries))


def extract_design_differences(pair: DesignPair) -> DesignDifference:
    """Spec-level differences of a pair; the diffs applied to the left token
    multiset reproduce the right one exactly."""
    return diff_specs(pair.left, pair.right)


# ---------------------------------------------------------------------------
# JSONL corpus interchange
# ---------------------------------------------------------------------------

def pair_to_dict(pair: DesignPair) -> dict[str, Any]:
    return {
        "id": pair.id,
        "left": spec_to_dict(pair.left),
        "right": spec_to_dict(pair.right),
        "label": pair.label,
        "source": pair.source,
        "label_provenance": pair.label_provenance,
        "lineage": pair.lineage.to_dict() if pair.lineage else None,
        "illegible": pair.illegible,
        "group": pair.group,
    }


def _load_side(value: dict[str, Any], base_dir: str) -> ChartSpec:
    if "$ref" in value:
        ref = value["$ref"]
        path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        with open(path, "r", encoding="utf-8") as fh:
            return spec_from_dict(json.load(fh))
    return spec_from_dict(value)


def pair_from_dict(d: dict[str, Any], base_dir: str = ".") -> DesignPair:
    lineage = Lineage.from_dict(d["lineage"]) if d.get("lineage") else None
    return DesignPair(
        id=d["id"],
        left=_load_side(d["left"], base_dir),
        right=_load_side(d["right"], base_dir),
        label=d.get("label"),
        source=d.get("source", "corpus"),
        label_provenance=d.get("label_provenance", "none"),
        lineage=lineage,
        illegible=bool(d.get("illegible", False)),
        group=d.get("group"),
    )


def write_pairs_jsonl(pairs: Iterable[DesignPair], path: str) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_dict(pair), sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_pairs_jsonl(path: str) -> list[DesignPair]:
    base_dir = os.path.dirname(os.path.abspath(path))
    pairs: list[DesignPair] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                pairs.append(pair_from_dict(json.loads(line), base_dir))
    return pairs

"""Integer weight tables and chart cost.

The cost of a chart is the weighted sum of its feature counts; lower is
better and negative weights mark preferred features.  The builtin weights
are small hand-set integers chosen so that common charts (scatterplot,
histogram, bar chart) rank plausibly; they are an arbitrary starting point
for incremental updates, not an empirical claim.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Mapping

from .features import FeatureCatalog, FeatureVector, UnknownFeatureError, builtin_catalog

PROVENANCES = ("builtin", "learned", "manual")


@dataclass(frozen=True)
class WeightTable:
    weights: Mapping[str, int]
    version: str = "builtin-1"
    provenance: str = "builtin"

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(
            self, "weights", {k: int(v) for k, v in self.weights.items()}
        )

    def __contains__(self, name: str) -> bool:
        return name in self.weights

    def __getitem__(self, name: str) -> int:
        return self.weights[name]

    def scaled(self, k: int) -> "WeightTable":
        return WeightTable(
            {f: w * k for f, w in self.weights.items()},
            version=f"{self.version}*{k}",
            provenance=self.provenance,
        )


def cost(fv: FeatureVector, w: WeightTable) -> int:
    """Weighted sum of feature counts; errors on features missing from w."""
    total = 0
    for name, count in fv.items():
        if name not in w:
            raise UnknownFeatureError(f"feature {name!r} missing from weight table")
        total += w[name] * count
    return total


def builtin_weights(catalog: FeatureCatalog | None = None) -> WeightTable:
    catalog = catalog or builtin_catalog()
    return WeightTable(catalog.default_weights(), version="builtin-1", provenance="builtin")


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def write_weights_csv(w: WeightTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "weight"])
        for name in sorted(w.weights):
            writer.writerow([name, w.weights[name]])


def read_weights_csv(path: str, version: str = "imported", provenance: str = "manual") -> WeightTable:
    weights: dict[str, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            weights[row["feature"]] = int(row["weight"])
    return WeightTable(weights, version=version, provenance=provenance)


def write_weights_json(w: WeightTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "version": w.version,
                "provenance": w.provenance,
                "weights": dict(sorted(w.weights.items())),
            },
            fh,
            indent=2,
        )
        fh.write("\n")


def read_weights_json(path: str) -> WeightTable:
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    return WeightTable(d["weights"], version=d.get("version", "imported"),
                       provenance=d.get("provenance", "manual"))

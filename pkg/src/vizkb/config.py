"""Project configuration: paths, RNG seed, and pipeline parameters.

The seed travels into every derived artifact (augmentation lineage, split
plans, training metadata) so runs are reproducible end to end.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Optional


@dataclass(frozen=True)
class LLMSettings:
    url: str = ""
    model: str = ""
    api_key_env: str = "VIZKB_LLM_API_KEY"
    audit_log: Optional[str] = None
    max_parallel: int = 4


@dataclass(frozen=True)
class ProjectConfig:
    catalog_path: Optional[str] = None   # None means the builtin catalog
    corpus_path: str = "corpus.jsonl"
    labels_path: str = "labels.jsonl"
    weights_path: str = "weights.csv"
    seed: int = 0
    coverage_threshold: int = 7
    max_new: int = 7
    pairs_per_feature: int = 7
    n_top: int = 8
    batch_size: int = 20
    max_iterations: int = 20
    density_cap: int = 300
    llm: LLMSettings = field(default_factory=LLMSettings)

    def __post_init__(self) -> None:
        for name in (
            "coverage_threshold", "max_new", "pairs_per_feature",
            "n_top", "batch_size", "max_iterations", "density_cap",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @staticmethod
    def from_dict(d: dict[str, Any]) -> "ProjectConfig":
        llm = LLMSettings(**d.pop("llm", {})) if "llm" in d else LLMSettings()
        return ProjectConfig(llm=llm, **d)

    @staticmethod
    def load(path: str) -> "ProjectConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return ProjectConfig.from_dict(json.load(fh))

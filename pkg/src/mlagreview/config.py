"""Pipeline configuration: every free parameter of the method as a named key."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Mapping

from .controls import CoverageWeights
from .exposure import NETWORK_ATTRIBUTES, Ability, AttackerProfile
from .scoring import Aggregation


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.5
    coverage_weights: CoverageWeights = field(default_factory=CoverageWeights)
    tau: float = 0.0
    flag_threshold: float = 0.5
    aggregation: Aggregation = Aggregation.MEAN
    attacker: Ability = Ability.PROFESSIONAL
    # per-attribute overrides of the named attacker's thresholds
    attacker_thresholds: Mapping[str, float] | None = None
    cv_mode: str = "raw"
    empty_pool: str = "zero"
    edge_layer_rule: str = "destination"
    tie_epsilon: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "aggregation", Aggregation(self.aggregation))
        object.__setattr__(self, "attacker", Ability(self.attacker))
        if isinstance(self.coverage_weights, Mapping):
            object.__setattr__(self, "coverage_weights", CoverageWeights.from_dict(self.coverage_weights))
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.tau < 1.0:
            raise ValueError(f"tau must be in [0, 1), got {self.tau}")
        if not 0.0 <= self.flag_threshold <= 1.0:
            raise ValueError(f"flag_threshold must be in [0, 1], got {self.flag_threshold}")
        if self.cv_mode not in ("raw", "normalized"):
            raise ValueError(f"cv_mode must be 'raw' or 'normalized', got {self.cv_mode!r}")
        if self.empty_pool not in ("zero", "lambda"):
            raise ValueError(f"empty_pool must be 'zero' or 'lambda', got {self.empty_pool!r}")
        if self.edge_layer_rule not in ("destination", "source"):
            raise ValueError(f"edge_layer_rule must be 'destination' or 'source', got {self.edge_layer_rule!r}")
        if self.tie_epsilon < 0:
            raise ValueError("tie_epsilon must be non-negative")
        if self.attacker_thresholds is not None:
            unknown = set(self.attacker_thresholds) - set(NETWORK_ATTRIBUTES)
            if unknown:
                raise ValueError(f"unknown attacker threshold keys: {sorted(unknown)}")
            object.__setattr__(self, "attacker_thresholds", {k: float(v) for k, v in self.attacker_thresholds.items()})
        self.attacker_profile()

    def attacker_profile(self) -> AttackerProfile:
        base = AttackerProfile.named(self.attacker)
        if not self.attacker_thresholds:
            return base
        return AttackerProfile(base.ability, {**base.thresholds, **self.attacker_thresholds})

    def with_(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coverage_weights"] = self.coverage_weights.to_dict()
        d["aggregation"] = self.aggregation.value
        d["attacker"] = self.attacker.value
        d["attacker_thresholds"] = self.attacker_profile().thresholds
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(d))

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

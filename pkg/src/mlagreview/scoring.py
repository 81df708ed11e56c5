"""Per-layer governance factors and per-edge comprehensive scores."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exposure import EdgeRate
from .graph import LAYERS, Layer, MultiLayerAttackGraph
from .review import ControlProfile

ORIENTATION = "higher-is-safer"


class Aggregation(str, enum.Enum):
    MEAN = "mean"
    MIN = "min"
    MAX = "max"

    def __call__(self, values: Iterable[float]) -> float:
        vals = list(values)
        if not vals:
            raise ValueError("cannot aggregate an empty sequence")
        if self is Aggregation.MEAN:
            return sum(vals) / len(vals)
        if self is Aggregation.MIN:
            return min(vals)
        return max(vals)


class EmptyGovernancePoolError(ValueError):
    def __init__(self, layer: Layer):
        self.layer = layer
        super().__init__(f"no controls are mapped to the {layer.value} layer")


@dataclass(frozen=True)
class GovernanceFactor:
    layer: Layer
    value: float
    pool_size: int

    def to_dict(self) -> dict:
        return {"layer": self.layer.value, "governance": self.value, "pool_size": self.pool_size}


@dataclass(frozen=True)
class ScoredEdge:
    edge_id: str
    layer: Layer
    lam: float
    governance: float | None
    score: float

    def to_dict(self) -> dict:
        return {
            "id": self.edge_id,
            "layer": self.layer.value,
            "lambda": self.lam,
            "governance": self.governance,
            "score": self.score,
        }


def governance_factor(
    profiles: Sequence[ControlProfile], layer: Layer, f: Aggregation = Aggregation.MEAN
) -> GovernanceFactor:
    """Mean over the controls mapped to ``layer`` of f(specificity, fitting, reliability)."""
    pool = [p for p in profiles if layer in p.mapping.member_layers]
    if not pool:
        raise EmptyGovernancePoolError(layer)
    inner = [f((p.specificity, p.fitting, p.reliability)) for p in pool]
    return GovernanceFactor(layer, sum(inner) / len(inner), len(pool))


def governance_factors(
    profiles: Sequence[ControlProfile], f: Aggregation = Aggregation.MEAN
) -> dict[Layer, GovernanceFactor | None]:
    """Factors for all three layers; a layer with no mapped controls maps to ``None``."""
    out: dict[Layer, GovernanceFactor | None] = {}
    for layer in LAYERS:
        try:
            out[layer] = governance_factor(profiles, layer, f)
        except EmptyGovernancePoolError:
            out[layer] = None
    return out


def comprehensive_scores(
    g: MultiLayerAttackGraph,
    gov: Mapping[Layer, GovernanceFactor | float | None],
    rates: Mapping[str, EdgeRate | float],
    cv: float,
    f: Aggregation = Aggregation.MEAN,
    empty_pool: str = "zero",
) -> list[ScoredEdge]:
    """Score every edge as f(gov(layer), lambda) * cv, sorted by edge id.

    For a layer without a governance factor, ``empty_pool="zero"`` uses a
    governance of 0 and ``empty_pool="lambda"`` scores the edge as lambda * cv.
    """
    if cv < 0:
        raise ValueError(f"cv must be non-negative, got {cv}")
    if empty_pool not in ("zero", "lambda"):
        raise ValueError(f"empty_pool must be 'zero' or 'lambda', got {empty_pool!r}")
    out = []
    for e in sorted(g.edges, key=lambda e: e.id):
        layer = g.edge_layer(e)
        rate = rates[e.id]
        lam = rate.lam if isinstance(rate, EdgeRate) else float(rate)
        factor = gov.get(layer)
        g_val = factor.value if isinstance(factor, GovernanceFactor) else factor
        if g_val is None:
            if empty_pool == "zero":
                g_val = 0.0
            else:
                out.append(ScoredEdge(e.id, layer, lam, None, lam * cv))
                continue
        out.append(ScoredEdge(e.id, layer, lam, g_val, f((g_val, lam)) * cv))
    return out

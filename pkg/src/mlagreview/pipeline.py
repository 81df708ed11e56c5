"""End-to-end run: classify (a), contextualize (b), review (c), exposure (d), score (e)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .alignment import AlignmentMatrix
from .config import PipelineConfig
from .controls import ControlsAssessment, SecurityControl, check_assessment, compute_cv
from .exposure import EdgeRate, UnresolvedVulnerabilityError, VulnerabilityDB, rate_all_edges
from .graph import LAYERS, GraphInvalidError, Layer, MultiLayerAttackGraph, validate_graph
from .review import ControlProfile, MissingAlignmentError, review_assessment
from .scoring import ORIENTATION, GovernanceFactor, ScoredEdge, comprehensive_scores, governance_factors

STAGES = {
    "a": "controls classification",
    "b": "contextualized assessment mapping",
    "c": "assessment review",
    "d": "vulnerability exposure",
    "e": "scored assessment",
}


class PipelineError(Exception):
    """Failure tagged with the methodology stage (a-e) it happened in."""

    def __init__(self, stage: str, message: str, cause: Exception | None = None):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage} ({STAGES[stage]}): {message}")


class CrossReferenceError(PipelineError):
    def __init__(self, stage: str, message: str, ids: Sequence[str]):
        self.ids = list(ids)
        super().__init__(stage, message)


@dataclass(frozen=True)
class AssessmentInputs:
    graph: MultiLayerAttackGraph
    controls: tuple[SecurityControl, ...]
    assessment: ControlsAssessment
    spec_alignment: AlignmentMatrix
    layer_alignment: AlignmentMatrix
    vulns: VulnerabilityDB | None = None

    def with_assessment(self, assessment: ControlsAssessment) -> "AssessmentInputs":
        return replace(self, assessment=assessment)


@dataclass
class ScoredAssessment:
    cv: float
    config: PipelineConfig
    profiles: list[ControlProfile]
    layers: dict[Layer, GovernanceFactor | None]
    rates: dict[str, EdgeRate]
    edges: list[ScoredEdge]
    warnings: list[str] = field(default_factory=list)

    def scores(self) -> dict[str, float]:
        return {e.edge_id: e.score for e in self.edges}

    def to_dict(self) -> dict:
        return {
            "cv": self.cv,
            "aggregation": self.config.aggregation.value,
            "attacker": self.config.attacker.value,
            "orientation": ORIENTATION,
            "layers": [
                self.layers[layer].to_dict()
                if self.layers[layer] is not None
                else {"layer": layer.value, "governance": None, "pool_size": 0}
                for layer in LAYERS
            ],
            "edges": [e.to_dict() for e in self.edges],
            "warnings": list(self.warnings),
        }


def _weighted(assessment: ControlsAssessment, config: PipelineConfig) -> ControlsAssessment:
    if assessment.coverage_weights == config.coverage_weights:
        return assessment
    return ControlsAssessment(assessment.entries, config.coverage_weights)


def check_cross_references(inputs: AssessmentInputs) -> None:
    missing, extra = check_assessment(inputs.controls, inputs.assessment)
    if missing:
        raise CrossReferenceError("c", f"controls with no assessment value: {missing}", missing)
    if extra:
        raise CrossReferenceError("c", f"assessed ids not in the control catalog: {extra}", extra)
    no_spec = [c.id for c in inputs.controls if c.id not in inputs.spec_alignment]
    if no_spec:
        raise CrossReferenceError("a", f"controls with no classification alignment row: {no_spec}", no_spec)
    no_layer = [c.id for c in inputs.controls if c.id not in inputs.layer_alignment]
    if no_layer:
        raise CrossReferenceError("b", f"controls with no layer alignment row: {no_layer}", no_layer)


def run_review(inputs: AssessmentInputs, config: PipelineConfig | None = None) -> list[ControlProfile]:
    """Stages a-c: the flagged assessment."""
    config = config or PipelineConfig()
    check_cross_references(inputs)
    try:
        return review_assessment(
            inputs.controls,
            _weighted(inputs.assessment, config),
            inputs.spec_alignment,
            inputs.layer_alignment,
            alpha=config.alpha,
            tau=config.tau,
            flag_threshold=config.flag_threshold,
            tie_epsilon=config.tie_epsilon,
        )
    except MissingAlignmentError as exc:
        raise PipelineError("a", str(exc), exc) from exc


def run_exposure(inputs: AssessmentInputs, config: PipelineConfig | None = None) -> dict[str, EdgeRate]:
    """Stage d: lambda per edge."""
    config = config or PipelineConfig()
    graph = _graph(inputs, config)
    violations = validate_graph(graph)
    if violations:
        raise PipelineError("d", str(GraphInvalidError(violations)))
    if inputs.vulns is None:
        raise PipelineError("d", "no vulnerability database supplied")
    try:
        return rate_all_edges(graph, inputs.vulns, config.attacker_profile())
    except UnresolvedVulnerabilityError as exc:
        raise CrossReferenceError("d", str(exc), [exc.edge_id]) from exc


def _graph(inputs: AssessmentInputs, config: PipelineConfig) -> MultiLayerAttackGraph:
    g = inputs.graph
    return g if g.edge_layer_rule == config.edge_layer_rule else g.with_rule(config.edge_layer_rule)


def run_scoring(
    inputs: AssessmentInputs,
    config: PipelineConfig | None = None,
    rates: dict[str, EdgeRate] | None = None,
) -> ScoredAssessment:
    """Stages a-e. ``rates`` may be passed in to reuse stage d across assessments of one graph."""
    config = config or PipelineConfig()
    profiles = run_review(inputs, config)
    if rates is None:
        rates = run_exposure(inputs, config)
    assessment = _weighted(inputs.assessment, config)
    cv = compute_cv(assessment, config.cv_mode)
    layers = governance_factors(profiles, config.aggregation)
    warnings = []
    for layer in LAYERS:
        if layers[layer] is None:
            fallback = "governance 0" if config.empty_pool == "zero" else "lambda only"
            warnings.append(f"no controls mapped to the {layer.value} layer; its edges use {fallback}")
    try:
        edges = comprehensive_scores(
            _graph(inputs, config), layers, rates, cv, config.aggregation, config.empty_pool
        )
    except (KeyError, ValueError) as exc:
        raise PipelineError("e", str(exc), exc) from exc
    return ScoredAssessment(cv, config, profiles, layers, rates, edges, warnings)

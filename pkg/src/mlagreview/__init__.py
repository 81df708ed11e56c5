"""Review a controls-based cyber risk assessment against a multi-layer attack graph."""

from .alignment import (
    AlignmentMatrix,
    ConceptSet,
    build_layer_alignment,
    build_spec_alignment,
    lexical_align,
    load_alignment_matrix,
)
from .analytics import (
    Conservative,
    NotRigorous,
    Perturb,
    ScoreDistribution,
    apply_bias,
    borderline_cases,
    sensitivity_sweep,
    summarize,
)
from .config import PipelineConfig
from .controls import (
    AssessmentValue,
    ControlsAssessment,
    CoverageWeights,
    SecurityControl,
    compute_cv,
    count_by_value,
)
from .exposure import (
    Ability,
    AttackerProfile,
    HumanVulnerability,
    NetworkVulnerability,
    VulnerabilityDB,
    heaviside,
    human_access_lambda,
    network_lambda,
    normalize_cvss,
    rate_all_edges,
)
from .graph import (
    GraphEdge,
    GraphNode,
    Layer,
    MultiLayerAttackGraph,
    edges_in_layer,
    enumerate_attack_paths,
    validate_graph,
)
from .io import load_hospital, load_inputs
from .pipeline import AssessmentInputs, PipelineError, ScoredAssessment, run_review, run_scoring
from .review import (
    ControlClassification,
    ControlProfile,
    LayerMapping,
    classify_control,
    fitting_degree,
    layer_mapping,
    reliability_degree,
    review_assessment,
    specificity_degree,
)
from .scoring import Aggregation, GovernanceFactor, ScoredEdge, comprehensive_scores, governance_factor

__version__ = "0.1.0"

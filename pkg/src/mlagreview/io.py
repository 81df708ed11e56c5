"""Input loading, report envelopes and the bundled hospital fixture."""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path
from typing import Mapping

from .alignment import (
    AlignmentMatrix,
    AlignmentParseError,
    build_layer_alignment,
    build_spec_alignment,
    parse_alignment_csv,
    parse_concept_sets,
)
from .config import PipelineConfig
from .controls import ControlsAssessment, CoverageWeights, parse_assessment_csv, parse_controls
from .exposure import VulnerabilityDB
from .graph import MultiLayerAttackGraph
from .pipeline import AssessmentInputs

FORMAT_VERSION = "1.0"


class InputParseError(ValueError):
    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{path}: {message}")


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputParseError(path, exc.strerror or str(exc)) from None


def _json(path):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputParseError(path, f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _parsed(path, fn, *args):
    try:
        return fn(*args)
    except InputParseError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise InputParseError(path, str(exc)) from None


def load_graph(path, edge_layer_rule: str = "destination") -> MultiLayerAttackGraph:
    doc = _json(path)
    if not isinstance(doc, dict):
        raise InputParseError(path, "MLAG document must be a JSON object")
    return _parsed(path, MultiLayerAttackGraph.from_dict, doc, edge_layer_rule)


def load_controls(path):
    return _parsed(path, parse_controls, _json(path))


def load_assessment(path, weights: CoverageWeights | None = None) -> ControlsAssessment:
    return _parsed(path, parse_assessment_csv, _read(path), weights)


def load_alignment(path) -> AlignmentMatrix:
    try:
        return parse_alignment_csv(_read(path))
    except AlignmentParseError as exc:
        raise InputParseError(path, str(exc)) from None


def load_vulns(path) -> VulnerabilityDB:
    doc = _json(path)
    if not isinstance(doc, dict):
        raise InputParseError(path, "vulnerability DB must be a JSON object")
    return _parsed(path, VulnerabilityDB.from_dict, doc)


def load_concepts(path):
    return _parsed(path, parse_concept_sets, _json(path))


def file_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_inputs(
    graph,
    controls,
    assessment,
    alignment_spec=None,
    alignment_layers=None,
    vulns=None,
    config: PipelineConfig | None = None,
    feature_concepts=None,
    layer_concepts=None,
) -> tuple[AssessmentInputs, dict[str, str]]:
    """Load every input file; returns the inputs and a name -> sha256 digest map.

    Without an alignment CSV, the matching concept-set JSON is used to build
    the matrix with the built-in lexical aligner.
    """
    config = config or PipelineConfig()
    paths = {"graph": graph, "controls": controls, "assessment": assessment}
    g = load_graph(graph, config.edge_layer_rule)
    ctrls = tuple(load_controls(controls))
    a = load_assessment(assessment, config.coverage_weights)

    if alignment_spec is not None:
        spec = load_alignment(alignment_spec)
        paths["alignment_spec"] = alignment_spec
    elif feature_concepts is not None:
        spec = _parsed(feature_concepts, build_spec_alignment, ctrls, load_concepts(feature_concepts))
        paths["feature_concepts"] = feature_concepts
    else:
        raise InputParseError("alignment-spec", "need a classification alignment CSV or feature concept sets")

    if alignment_layers is not None:
        layers = load_alignment(alignment_layers)
        paths["alignment_layers"] = alignment_layers
    elif layer_concepts is not None:
        layers = _parsed(layer_concepts, build_layer_alignment, ctrls, load_concepts(layer_concepts))
        paths["layer_concepts"] = layer_concepts
    else:
        raise InputParseError("alignment-layers", "need a layer alignment CSV or layer concept sets")

    db = None
    if vulns is not None:
        db = load_vulns(vulns)
        paths["vulns"] = vulns
    digests = {name: file_digest(p) for name, p in paths.items()}
    return AssessmentInputs(g, ctrls, a, spec, layers, db), digests


def envelope(kind: str, payload: Mapping, config: PipelineConfig, digests: Mapping[str, str] | None = None) -> dict:
    """Wrap a report with format version, resolved config and input digests."""
    return {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "config": config.to_dict(),
        "inputs": dict(digests or {}),
        **payload,
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


HOSPITAL_FILES = {
    "graph": "graph.json",
    "controls": "controls.json",
    "assessment": "assessment.csv",
    "alignment_spec": "alignment_spec.csv",
    "alignment_layers": "alignment_layers.csv",
    "vulns": "vulns.json",
    "feature_concepts": "feature_concepts.json",
    "layer_concepts": "layer_concepts.json",
}


def hospital_paths() -> dict[str, Path]:
    """Paths of the bundled synthetic hospital dataset."""
    root = resources.files("mlagreview") / "fixtures" / "hospital"
    return {k: Path(str(root / v)) for k, v in HOSPITAL_FILES.items()}


def load_hospital(config: PipelineConfig | None = None, lexical: bool = False) -> AssessmentInputs:
    """Load the bundled hospital fixture; ``lexical=True`` builds alignments with the built-in aligner."""
    p = hospital_paths()
    if lexical:
        inputs, _ = load_inputs(
            p["graph"], p["controls"], p["assessment"], vulns=p["vulns"], config=config,
            feature_concepts=p["feature_concepts"], layer_concepts=p["layer_concepts"],
        )
    else:
        inputs, _ = load_inputs(
            p["graph"], p["controls"], p["assessment"], p["alignment_spec"], p["alignment_layers"],
            p["vulns"], config,
        )
    return inputs

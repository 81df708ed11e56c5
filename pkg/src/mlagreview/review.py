"""Controls classification, layer contextualization and assessment review.

Each control gets three degrees in [0, 1]:

* specificity -- from its lifetime / management-level classification,
* fitting -- the spread ``max - min`` of its three layer alignments,
* reliability -- mean of the winning lifetime value, winning management
  value, strongest layer alignment and the coverage weight of its
  assessed value.

Controls whose reliability falls below ``flag_threshold`` are flagged for
revision.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .alignment import AlignmentMatrix
from .controls import AssessmentValue, ControlsAssessment, CoverageWeights, SecurityControl
from .graph import LAYERS, Layer

DEFAULT_TIE_EPSILON = 1e-9


class Lifetime(str, enum.Enum):
    RUN_TIME = "RunTime"
    DESIGN_TIME = "DesignTime"
    NOT_DEFINED = "NotDefined"


class Management(str, enum.Enum):
    OPERATIONAL = "Operational"
    COMPLIANCE = "Compliance"
    NOT_DEFINED = "NotDefined"


class MissingAlignmentError(KeyError):
    def __init__(self, control_id: str, matrix: str):
        self.control_id = control_id
        super().__init__(f"no {matrix} alignment row for control {control_id!r}")

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class ControlClassification:
    lifetime: Lifetime
    management: Management
    winning_lifetime_value: float
    winning_management_value: float


@dataclass(frozen=True)
class LayerMapping:
    h: float
    a: float
    n: float
    member_layers: frozenset[Layer]
    most_fitting: Layer | None

    @property
    def values(self) -> tuple[float, float, float]:
        return (self.h, self.a, self.n)

    @property
    def highest(self) -> float:
        return max(self.values)

    @property
    def lowest(self) -> float:
        return min(self.values)


@dataclass(frozen=True)
class ControlProfile:
    control_id: str
    classification: ControlClassification
    mapping: LayerMapping
    specificity: float
    fitting: float
    reliability: float
    assessed_value: AssessmentValue
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "id": self.control_id,
            "lifetime": self.classification.lifetime.value,
            "management": self.classification.management.value,
            "specificity": self.specificity,
            "h": self.mapping.h,
            "a": self.mapping.a,
            "n": self.mapping.n,
            "fitting": self.fitting,
            "reliability": self.reliability,
            "assessed_value": self.assessed_value.value,
            "flagged": self.flagged,
        }


REPORT_COLUMNS = (
    "id", "lifetime", "management", "specificity", "h", "a", "n",
    "fitting", "reliability", "assessed_value", "flagged",
)


def _argmax2(first: float, second: float, eps: float):
    if abs(first - second) <= eps:
        return None, max(first, second)
    return (0, first) if first > second else (1, second)


def classify_control(row: Mapping[str, float] | Sequence[float], tie_epsilon: float = DEFAULT_TIE_EPSILON) -> ControlClassification:
    """Classify from (run_time, design_time, operational, compliance) alignments.

    ``row`` is a mapping with those keys or a 4-sequence in that order.
    Values within ``tie_epsilon`` of each other count as a tie (NotDefined).
    """
    if isinstance(row, Mapping):
        rt, dt, op, co = (float(row.get(k, 0.0)) for k in ("run_time", "design_time", "operational", "compliance"))
    else:
        rt, dt, op, co = (float(x) for x in row)
    lt_idx, lt_val = _argmax2(rt, dt, tie_epsilon)
    mg_idx, mg_val = _argmax2(op, co, tie_epsilon)
    lifetime = Lifetime.NOT_DEFINED if lt_idx is None else (Lifetime.RUN_TIME, Lifetime.DESIGN_TIME)[lt_idx]
    management = (
        Management.NOT_DEFINED if mg_idx is None else (Management.OPERATIONAL, Management.COMPLIANCE)[mg_idx]
    )
    return ControlClassification(lifetime, management, lt_val, mg_val)


# number of halvings of alpha, keyed by (management, lifetime)
_HALVINGS = {
    (Management.OPERATIONAL, Lifetime.RUN_TIME): 0,
    (Management.OPERATIONAL, Lifetime.DESIGN_TIME): 1,
    (Management.OPERATIONAL, Lifetime.NOT_DEFINED): 1,
    (Management.COMPLIANCE, Lifetime.RUN_TIME): 1,
    (Management.COMPLIANCE, Lifetime.DESIGN_TIME): 2,
    (Management.COMPLIANCE, Lifetime.NOT_DEFINED): 2,
    (Management.NOT_DEFINED, Lifetime.RUN_TIME): 1,
    (Management.NOT_DEFINED, Lifetime.DESIGN_TIME): 2,
    (Management.NOT_DEFINED, Lifetime.NOT_DEFINED): 2,
}


def specificity_degree(cl: ControlClassification, alpha: float = 0.5) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return alpha / 2 ** _HALVINGS[(cl.management, cl.lifetime)]


def layer_mapping(h: float, a: float, n: float, tau: float = 0.0) -> LayerMapping:
    """Layers with alignment strictly above ``tau`` are members; ties for the top go to the lower layer."""
    vals = (float(h), float(a), float(n))
    members = frozenset(layer for layer, v in zip(LAYERS, vals) if v > tau)
    top = max(vals)
    most = LAYERS[vals.index(top)] if top > 0 else None
    return LayerMapping(vals[0], vals[1], vals[2], members, most)


def fitting_degree(m: LayerMapping) -> float:
    return m.highest - m.lowest


def reliability_degree(
    classification: ControlClassification,
    mapping: LayerMapping,
    assessed: AssessmentValue,
    weights: CoverageWeights,
) -> float:
    return (
        classification.winning_lifetime_value
        + classification.winning_management_value
        + mapping.highest
        + weights[assessed]
    ) / 4


def control_sort_key(control_id: str):
    """Natural order: ``A.9.4.3`` before ``A.10.1.1``."""
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in re.split(r"(\d+)", control_id) if p)


def review_assessment(
    controls: Sequence[SecurityControl],
    assessment: ControlsAssessment,
    spec_alignment: AlignmentMatrix,
    layer_alignment: AlignmentMatrix,
    alpha: float = 0.5,
    tau: float = 0.0,
    flag_threshold: float = 0.5,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> list[ControlProfile]:
    """Produce the flagged assessment: one profile per control, in natural control-id order."""
    profiles = []
    for control in sorted(controls, key=lambda c: control_sort_key(c.id)):
        cid = control.id
        if cid not in spec_alignment:
            raise MissingAlignmentError(cid, "classification")
        if cid not in layer_alignment:
            raise MissingAlignmentError(cid, "layer")
        if cid not in assessment.entries:
            raise KeyError(f"control {cid!r} has no assessment value")
        cl = classify_control(spec_alignment.row(cid), tie_epsilon)
        m = layer_mapping(
            layer_alignment.get(cid, "human"),
            layer_alignment.get(cid, "access"),
            layer_alignment.get(cid, "network"),
            tau,
        )
        value = assessment[cid]
        rel = reliability_degree(cl, m, value, assessment.coverage_weights)
        profiles.append(
            ControlProfile(
                control_id=cid,
                classification=cl,
                mapping=m,
                specificity=specificity_degree(cl, alpha),
                fitting=fitting_degree(m),
                reliability=rel,
                assessed_value=value,
                flagged=rel < flag_threshold,
            )
        )
    return profiles


def profiles_to_csv(profiles: Sequence[ControlProfile]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for p in profiles:
        w.writerow(p.to_dict())
    return buf.getvalue()

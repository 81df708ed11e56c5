"""Score statistics, assessor-bias transforms, perturbation sweeps and borderline cases."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .controls import ASSESSMENT_VALUES, AssessmentValue, ControlsAssessment
from .config import PipelineConfig
from .graph import LAYERS
from .pipeline import AssessmentInputs, ScoredAssessment, run_exposure, run_scoring
from .review import control_sort_key
from .scoring import ScoredEdge

QUARTILE_METHOD = "linear"


@dataclass(frozen=True)
class ScoreDistribution:
    count: int
    mean: float
    std: float
    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: tuple[tuple[str, float], ...] = ()

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1

    @property
    def fences(self) -> tuple[float, float]:
        return self.q1 - 1.5 * self.iqr, self.q3 + 1.5 * self.iqr

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
            "outliers": [{"id": i, "score": s} for i, s in self.outliers],
            "std_kind": "population",
            "quartile_method": QUARTILE_METHOD,
        }


def _labelled(scores) -> list[tuple[str, float]]:
    if isinstance(scores, ScoredAssessment):
        scores = scores.edges
    if isinstance(scores, Mapping):
        return [(str(k), float(v)) for k, v in scores.items()]
    out = []
    for i, s in enumerate(scores):
        if isinstance(s, ScoredEdge):
            out.append((s.edge_id, s.score))
        elif isinstance(s, tuple):
            out.append((str(s[0]), float(s[1])))
        else:
            out.append((str(i), float(s)))
    return out


def summarize(scores: Sequence[ScoredEdge] | Mapping[str, float] | Sequence[float]) -> ScoreDistribution:
    """Descriptive statistics of a score list.

    Population standard deviation; quartiles by linear interpolation between
    closest ranks (numpy's default percentile method); outliers are points
    outside ``[q1 - 1.5 IQR, q3 + 1.5 IQR]``, reported in input order.
    """
    pairs = _labelled(scores)
    if not pairs:
        raise ValueError("cannot summarize an empty score list")
    x = np.array([s for _, s in pairs], dtype=float)
    q1, med, q3 = np.percentile(x, [25, 50, 75], method=QUARTILE_METHOD)
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    outliers = tuple((i, s) for i, s in pairs if s < lo or s > hi)
    return ScoreDistribution(
        count=len(pairs),
        mean=float(x.mean()),
        std=float(x.std()),
        min=float(x.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        max=float(x.max()),
        outliers=outliers,
    )


@dataclass(frozen=True)
class Conservative:
    """Assessor who marks every partially covered control as not covered."""

    name = "conservative"


@dataclass(frozen=True)
class NotRigorous:
    """Assessor who marks every partially covered control as covered."""

    name = "not-rigorous"


@dataclass(frozen=True)
class Perturb:
    percentage: float
    seed: Union[int, np.random.SeedSequence] = 0

    name = "perturb"

    def __post_init__(self) -> None:
        if not 0.0 <= self.percentage <= 100.0:
            raise ValueError(f"perturbation percentage must be in [0, 100], got {self.percentage}")


BiasTransform = Union[Conservative, NotRigorous, Perturb]


def perturbed_count(percentage: float, n: int) -> int:
    """round(p * n / 100), halves rounded up."""
    return int(math.floor(percentage * n / 100 + 0.5))


def apply_bias(a: ControlsAssessment, t: BiasTransform) -> ControlsAssessment:
    if isinstance(t, Conservative):
        return a.replace({cid: AssessmentValue.NC for cid, v in a.entries.items() if v is AssessmentValue.PC})
    if isinstance(t, NotRigorous):
        return a.replace({cid: AssessmentValue.C for cid, v in a.entries.items() if v is AssessmentValue.PC})
    if isinstance(t, Perturb):
        ids = sorted(a.entries, key=control_sort_key)
        k = perturbed_count(t.percentage, len(ids))
        rng = np.random.default_rng(t.seed)
        chosen = rng.choice(len(ids), size=k, replace=False) if k else []
        changes = {}
        for idx in chosen:
            cid = ids[int(idx)]
            others = [v for v in ASSESSMENT_VALUES if v is not a.entries[cid]]
            changes[cid] = others[int(rng.integers(len(others)))]
        return a.replace(changes)
    raise TypeError(f"unknown bias transform {t!r}")


def parse_bias(name: str, percentage: float = 0.0, seed: int = 0) -> BiasTransform:
    key = name.strip().lower().replace("_", "-")
    if key == "conservative":
        return Conservative()
    if key in ("not-rigorous", "notrigorous"):
        return NotRigorous()
    if key == "perturb":
        return Perturb(percentage, seed)
    raise ValueError(f"unknown bias {name!r}; expected conservative, not-rigorous or perturb")


def changed_controls(before: ControlsAssessment, after: ControlsAssessment) -> list[str]:
    return sorted((cid for cid in before.entries if before[cid] is not after[cid]), key=control_sort_key)


def trial_seed(seed: int, percentage: float, trial: int) -> np.random.SeedSequence:
    """Independent generator seed per (percentage, trial), stable under any run order."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(int(round(percentage * 1000)), trial))


@dataclass
class SweepRun:
    percentage: float
    trial: int
    changed: list[str]
    scored: ScoredAssessment
    distribution: ScoreDistribution
    deviations: dict[str, float]
    layer_deviation: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "percentage": self.percentage,
            "trial": self.trial,
            "changed_controls": self.changed,
            "cv": self.scored.cv,
            "scores": self.scored.scores(),
            "distribution": self.distribution.to_dict(),
            "deviations": self.deviations,
            "layer_deviation": self.layer_deviation,
        }


@dataclass
class SweepReport:
    seed: int
    percentages: list[float]
    trials: int
    ground_truth: ScoredAssessment
    ground_truth_distribution: ScoreDistribution
    runs: list[SweepRun] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "percentages": self.percentages,
            "trials": self.trials,
            "run_count": len(self.runs),
            "ground_truth": {
                "cv": self.ground_truth.cv,
                "scores": self.ground_truth.scores(),
                "distribution": self.ground_truth_distribution.to_dict(),
            },
            "runs": [r.to_dict() for r in self.runs],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["percentage", "trial", "edge_id", "layer", "score", "ground_truth_score", "deviation"])
        gt = self.ground_truth.scores()
        for run in self.runs:
            for e in run.scored.edges:
                w.writerow([
                    repr(run.percentage), run.trial, e.edge_id, e.layer.value,
                    repr(e.score), repr(gt[e.edge_id]), repr(run.deviations[e.edge_id]),
                ])
        return buf.getvalue()


def _layer_deviation(scored: ScoredAssessment, deviations: Mapping[str, float]) -> dict[str, float]:
    out = {}
    for layer in LAYERS:
        vals = [deviations[e.edge_id] for e in scored.edges if e.layer is layer]
        if vals:
            out[layer.value] = sum(vals) / len(vals)
    return out


def sensitivity_sweep(
    inputs: AssessmentInputs,
    config: PipelineConfig | None = None,
    percentages: Iterable[float] = (15, 45, 65, 90),
    trials: int = 7,
    seed: int | None = None,
    ground_truth: ControlsAssessment | None = None,
) -> SweepReport:
    """Score the ground truth and ``trials`` random perturbations at each error percentage."""
    config = config or PipelineConfig()
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seed = config.seed if seed is None else seed
    percentages = [float(p) for p in percentages]
    if ground_truth is not None:
        inputs = inputs.with_assessment(ground_truth)
    rates = run_exposure(inputs, config)
    gt_scored = run_scoring(inputs, config, rates)
    gt_scores = gt_scored.scores()
    report = SweepReport(seed, percentages, trials, gt_scored, summarize(gt_scored.edges))
    for p in percentages:
        for trial in range(trials):
            perturbed = apply_bias(inputs.assessment, Perturb(p, trial_seed(seed, p, trial)))
            scored = run_scoring(inputs.with_assessment(perturbed), config, rates)
            dev = {eid: s - gt_scores[eid] for eid, s in scored.scores().items()}
            report.runs.append(
                SweepRun(
                    percentage=p,
                    trial=trial,
                    changed=changed_controls(inputs.assessment, perturbed),
                    scored=scored,
                    distribution=summarize(scored.edges),
                    deviations=dev,
                    layer_deviation=_layer_deviation(scored, dev),
                )
            )
    return report


BORDERLINE_CASES = {"all_C": AssessmentValue.C, "all_PC": AssessmentValue.PC, "all_NC": AssessmentValue.NC}


def borderline_cases(inputs: AssessmentInputs, config: PipelineConfig | None = None) -> dict[str, ScoredAssessment]:
    """Score the uniform all-C, all-PC and all-NC assessments of the same controls."""
    config = config or PipelineConfig()
    rates = run_exposure(inputs, config)
    ids = [c.id for c in inputs.controls]
    out = {}
    for name, value in BORDERLINE_CASES.items():
        a = ControlsAssessment.uniform(ids, value, config.coverage_weights)
        out[name] = run_scoring(inputs.with_assessment(a), config, rates)
    return out


def bias_comparison(
    inputs: AssessmentInputs, transform: BiasTransform, config: PipelineConfig | None = None
) -> dict[str, ScoredAssessment]:
    """Score the ground truth and its biased variant side by side."""
    config = config or PipelineConfig()
    rates = run_exposure(inputs, config)
    biased = apply_bias(inputs.assessment, transform)
    return {
        "ground_truth": run_scoring(inputs, config, rates),
        transform.name: run_scoring(inputs.with_assessment(biased), config, rates),
    }

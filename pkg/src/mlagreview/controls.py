"""Controls-based assessment: framework controls, C/PC/NC evaluations, and the rigor constant cv."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


class AssessmentValue(str, enum.Enum):
    C = "C"
    PC = "PC"
    NC = "NC"


ASSESSMENT_VALUES = (AssessmentValue.C, AssessmentValue.PC, AssessmentValue.NC)


@dataclass(frozen=True)
class SecurityControl:
    id: str
    title: str
    concepts: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "concepts", tuple(self.concepts))
        if not self.concepts:
            raise ValueError(f"control {self.id!r} has no concept terms")


@dataclass(frozen=True)
class CoverageWeights:
    """Fraction of a control's activities that each assessment value stands for."""

    c: float = 1.0
    pc: float = 0.5
    nc: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.nc <= self.pc <= self.c <= 1.0:
            raise ValueError(
                f"coverage weights must satisfy 0 <= NC <= PC <= C <= 1, got C={self.c}, PC={self.pc}, NC={self.nc}"
            )

    def __getitem__(self, value: AssessmentValue | str) -> float:
        value = AssessmentValue(value)
        return {AssessmentValue.C: self.c, AssessmentValue.PC: self.pc, AssessmentValue.NC: self.nc}[value]

    def to_dict(self) -> dict[str, float]:
        return {"C": self.c, "PC": self.pc, "NC": self.nc}

    @classmethod
    def from_dict(cls, d: Mapping[str, float]) -> "CoverageWeights":
        default = cls()
        return cls(
            c=float(d.get("C", default.c)),
            pc=float(d.get("PC", default.pc)),
            nc=float(d.get("NC", default.nc)),
        )


@dataclass(frozen=True)
class ControlsAssessment:
    entries: Mapping[str, AssessmentValue]
    coverage_weights: CoverageWeights = field(default_factory=CoverageWeights)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", {str(k): AssessmentValue(v) for k, v in dict(self.entries).items()}
        )

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, control_id: str) -> AssessmentValue:
        return self.entries[control_id]

    def replace(self, changes: Mapping[str, AssessmentValue]) -> "ControlsAssessment":
        entries = dict(self.entries)
        entries.update(changes)
        return ControlsAssessment(entries, self.coverage_weights)

    @classmethod
    def uniform(
        cls, control_ids: Iterable[str], value: AssessmentValue, weights: CoverageWeights | None = None
    ) -> "ControlsAssessment":
        return cls({cid: value for cid in control_ids}, weights or CoverageWeights())


def check_assessment(controls: Iterable[SecurityControl], a: ControlsAssessment) -> tuple[list[str], list[str]]:
    """Return (control ids missing from the assessment, assessed ids with no control)."""
    ids = [c.id for c in controls]
    known = set(ids)
    missing = [cid for cid in ids if cid not in a.entries]
    extra = sorted(cid for cid in a.entries if cid not in known)
    return missing, extra


def count_by_value(a: ControlsAssessment) -> dict[AssessmentValue, int]:
    counts = {v: 0 for v in ASSESSMENT_VALUES}
    for v in a.entries.values():
        counts[v] += 1
    return counts


def compute_cv(a: ControlsAssessment, mode: str = "raw") -> float:
    """Assessment-rigor constant.

    ``mode="raw"`` divides the weighted count by the number of assessment
    values (3), so cv grows with the number of controls.  ``mode="normalized"``
    divides by the number of controls instead, giving cv in [0, 1].
    """
    # exact rational sum, rounded once: keeps cv monotone under upgrades
    w = a.coverage_weights
    counts = count_by_value(a)
    weighted = sum(Fraction(w[v]) * counts[v] for v in ASSESSMENT_VALUES)
    if mode == "raw":
        return float(weighted / len(ASSESSMENT_VALUES))
    if mode == "normalized":
        total = sum(counts.values())
        return float(weighted / total) if total else 0.0
    raise ValueError(f"unknown cv mode {mode!r}; expected 'raw' or 'normalized'")


def parse_assessment_csv(text: str, weights: CoverageWeights | None = None) -> ControlsAssessment:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if any(cell.strip() for cell in r)]
    if not rows:
        raise ValueError("assessment CSV is empty; expected header 'control_id,value'")
    header = [h.strip() for h in rows[0]]
    if header != ["control_id", "value"]:
        raise ValueError(f"line 1: expected header 'control_id,value', got {','.join(header)!r}")
    entries: dict[str, AssessmentValue] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ValueError(f"line {lineno}: expected 2 fields, got {len(row)}")
        cid, raw = row[0].strip(), row[1].strip()
        if not cid:
            raise ValueError(f"line {lineno}: empty control_id")
        try:
            value = AssessmentValue(raw)
        except ValueError:
            raise ValueError(f"line {lineno}, field 'value': {raw!r} is not one of C, PC, NC") from None
        if cid in entries:
            raise ValueError(f"line {lineno}: control {cid!r} assessed twice")
        entries[cid] = value
    return ControlsAssessment(entries, weights or CoverageWeights())


def format_assessment_csv(a: ControlsAssessment) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["control_id", "value"])
    for cid, v in a.entries.items():
        w.writerow([cid, v.value])
    return buf.getvalue()


def parse_controls(doc: list) -> list[SecurityControl]:
    """Control catalog from its JSON list form ``[{id, title, concepts}]``."""
    if not isinstance(doc, list):
        raise ValueError("control catalog must be a JSON list")
    out = []
    seen: set[str] = set()
    for i, raw in enumerate(doc):
        try:
            cid = str(raw["id"])
            concepts = raw["concepts"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"controls[{i}]: missing field {exc.args[0]!r}") from None
        if cid in seen:
            raise ValueError(f"controls[{i}]: duplicate control id {cid!r}")
        if not isinstance(concepts, list) or not concepts:
            raise ValueError(f"controls[{i}] ({cid}): 'concepts' must be a non-empty list")
        seen.add(cid)
        out.append(SecurityControl(cid, str(raw.get("title", "")), tuple(str(t) for t in concepts)))
    return out


def controls_to_doc(controls: Iterable[SecurityControl]) -> list[dict]:
    return [{"id": c.id, "title": c.title, "concepts": list(c.concepts)} for c in controls]

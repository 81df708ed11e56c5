"""Control-to-concept alignment values in [0, 1].

Values come either from an external ontology-alignment tool's CSV output or
from :func:`lexical_align`, a deterministic token-overlap stand-in.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .controls import SecurityControl

SPEC_COLUMNS = ("run_time", "design_time", "operational", "compliance")
LAYER_COLUMNS = ("human", "access", "network")

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_SUFFIXES = ("ing", "ed", "s")
_MIN_STEM = 3


class EmptyConceptError(ValueError):
    pass


class AlignmentParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class AlignmentRangeError(AlignmentParseError):
    pass


def stem(token: str) -> str:
    """Strip one of a fixed list of suffixes ("ing", "ed", plural "s")."""
    for suf in _SUFFIXES:
        if suf == "s" and token.endswith("ss"):
            continue
        if token.endswith(suf) and len(token) - len(suf) >= _MIN_STEM:
            return token[: -len(suf)]
    return token


def tokenize(terms: Iterable[str]) -> frozenset[str]:
    out = set()
    for term in terms:
        for tok in _TOKEN_RE.findall(term.lower()):
            out.add(stem(tok))
    return frozenset(out)


@dataclass(frozen=True)
class ConceptSet:
    name: str
    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        cleaned = []
        for t in self.terms:
            t = str(t).strip().lower()
            if t and t not in cleaned:
                cleaned.append(t)
        if not cleaned:
            raise EmptyConceptError(f"concept set {self.name!r} has no terms")
        object.__setattr__(self, "terms", tuple(cleaned))

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConceptSet":
        return cls(str(d["name"]), tuple(d["terms"]))

    def to_dict(self) -> dict:
        return {"name": self.name, "terms": list(self.terms)}


def _terms_of(x: SecurityControl | ConceptSet | Iterable[str]) -> tuple[str, ...]:
    if isinstance(x, SecurityControl):
        return x.concepts
    if isinstance(x, ConceptSet):
        return x.terms
    return tuple(x)


def lexical_align(control: SecurityControl | ConceptSet, concept: SecurityControl | ConceptSet) -> float:
    """Jaccard overlap of the stemmed token sets of two term lists.

    Either argument may be a control or a concept set, so the measure is
    symmetric in its arguments.
    """
    a = tokenize(_terms_of(control))
    b = tokenize(_terms_of(concept))
    if not a or not b:
        raise EmptyConceptError("cannot align an empty term list")
    return len(a & b) / len(a | b)


class AlignmentMatrix:
    """Rows are control ids, columns concept names, cells in [0, 1]."""

    def __init__(self, rows: Sequence[str], columns: Sequence[str], values=None):
        self.rows = tuple(rows)
        self.columns = tuple(columns)
        if len(set(self.rows)) != len(self.rows):
            raise ValueError("duplicate row id in alignment matrix")
        if values is None:
            values = np.zeros((len(self.rows), len(self.columns)))
        self.values = np.asarray(values, dtype=float).reshape(len(self.rows), len(self.columns))
        if self.values.size and (np.isnan(self.values).any() or self.values.min() < 0 or self.values.max() > 1):
            raise AlignmentRangeError("alignment values must lie in [0, 1]")
        self.values.setflags(write=False)
        self._row_index = {r: i for i, r in enumerate(self.rows)}
        self._col_index = {c: j for j, c in enumerate(self.columns)}

    def __contains__(self, row_id: str) -> bool:
        return row_id in self._row_index

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlignmentMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.columns == other.columns
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"AlignmentMatrix(rows={len(self.rows)}, columns={list(self.columns)})"

    def get(self, row_id: str, column: str) -> float:
        j = self._col_index.get(column)
        if j is None:
            return 0.0
        return float(self.values[self._row_index[row_id], j])

    def row(self, row_id: str) -> dict[str, float]:
        i = self._row_index[row_id]
        return {c: float(self.values[i, j]) for j, c in enumerate(self.columns)}

    def subset(self, row_ids: Iterable[str]) -> "AlignmentMatrix":
        ids = list(row_ids)
        idx = [self._row_index[r] for r in ids]
        return AlignmentMatrix(ids, self.columns, self.values[idx] if idx else None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", *self.columns])
        for i, r in enumerate(self.rows):
            w.writerow([r, *(repr(float(v)) for v in self.values[i])])
        return buf.getvalue()


def parse_alignment_csv(text: str) -> AlignmentMatrix:
    """Parse the ``id,<concept>...`` CSV layout. Empty or missing cells read as 0."""
    rows = [r for r in csv.reader(io.StringIO(text))]
    numbered = [(i, r) for i, r in enumerate(rows, start=1) if any(c.strip() for c in r)]
    if not numbered:
        raise AlignmentParseError("alignment CSV is empty")
    head_line, header = numbered[0]
    header = [h.strip() for h in header]
    if not header or header[0] != "id":
        raise AlignmentParseError("first column must be 'id'", line=head_line)
    columns = header[1:]
    if len(set(columns)) != len(columns) or any(not c for c in columns):
        raise AlignmentParseError("duplicate or empty concept column name", line=head_line)

    ids: list[str] = []
    values: list[list[float]] = []
    for lineno, raw in numbered[1:]:
        if len(raw) > len(header):
            raise AlignmentParseError(f"{len(raw)} fields but header has {len(header)}", line=lineno)
        rid = raw[0].strip()
        if not rid:
            raise AlignmentParseError("empty id", line=lineno, column="id")
        if rid in ids:
            raise AlignmentParseError(f"duplicate id {rid!r}", line=lineno, column="id")
        vals = []
        for j, col in enumerate(columns, start=1):
            cell = raw[j].strip() if j < len(raw) else ""
            if not cell:
                vals.append(0.0)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise AlignmentParseError(f"{cell!r} is not a number", line=lineno, column=col) from None
            if not 0.0 <= v <= 1.0:
                raise AlignmentRangeError(f"value {cell} outside [0, 1]", line=lineno, column=col)
            vals.append(v)
        ids.append(rid)
        values.append(vals)
    return AlignmentMatrix(ids, columns, values if values else None)


def load_alignment_matrix(path) -> AlignmentMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_alignment_csv(fh.read())


def build_alignment(controls: Sequence[SecurityControl], concepts: Sequence[ConceptSet]) -> AlignmentMatrix:
    """Lexically align every control against every concept set (one column each)."""
    values = [[lexical_align(c, k) for k in concepts] for c in controls]
    return AlignmentMatrix([c.id for c in controls], [k.name for k in concepts], values or None)


def _pick(concepts: Sequence[ConceptSet], names: Sequence[str]) -> list[ConceptSet]:
    by_name = {k.name: k for k in concepts}
    missing = [n for n in names if n not in by_name]
    if missing or len(concepts) != len(names):
        raise ValueError(f"expected concept sets named {list(names)}, got {[k.name for k in concepts]}")
    return [by_name[n] for n in names]


def build_layer_alignment(controls: Sequence[SecurityControl], layer_concepts: Sequence[ConceptSet]) -> AlignmentMatrix:
    return build_alignment(controls, _pick(layer_concepts, LAYER_COLUMNS))


def build_spec_alignment(controls: Sequence[SecurityControl], feature_concepts: Sequence[ConceptSet]) -> AlignmentMatrix:
    """Alignment against the four classification features (run/design time, operational/compliance)."""
    return build_alignment(controls, _pick(feature_concepts, SPEC_COLUMNS))


def parse_concept_sets(doc) -> list[ConceptSet]:
    if isinstance(doc, dict):
        doc = [doc]
    return [ConceptSet.from_dict(d) for d in doc]

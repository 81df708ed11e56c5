"""Per-edge exploitation rates.

Network edges use five CVSS-derived attributes, each gated by the
attacker's threshold for it; human and access edges use the product of
attack complexity and attack vector only, independent of the attacker.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .graph import Layer, MultiLayerAttackGraph

NETWORK_ATTRIBUTES = ("AC", "AV", "PR", "CM", "RC")
HUMAN_ATTRIBUTES = ("AC", "AV")

# Qualitative CVSS v3 level -> severity-increasing value in [0, 1].
# None holds the value used when the metric is absent or "X".
CVSS_TABLE: dict[str, dict[str | None, float]] = {
    "AV": {"N": 1.0, "A": 0.62, "L": 0.55, "P": 0.2},
    "AC": {"L": 0.9, "H": 0.4},
    "PR": {"N": 1.0, "L": 0.62, "H": 0.27},
    "CM": {"H": 1.0, "F": 0.97, "P": 0.94, "U": 0.91, None: 0.7},
    "RC": {"C": 1.0, "R": 0.96, "U": 0.92, None: 1.0},
}
# vector metric name -> attribute name
_VECTOR_KEYS = {"AV": "AV", "AC": "AC", "PR": "PR", "E": "CM", "RC": "RC"}
_OPTIONAL = {"E", "RC"}
# other v3 metrics: accepted and ignored
_IGNORED = {"UI", "S", "C", "I", "A", "RL", "CR", "IR", "AR", "MAV", "MAC", "MPR", "MUI", "MS", "MC", "MI", "MA"}

HUMAN_TABLE: dict[str, dict[str, float]] = {
    "AC": {"low": 1.0, "high": 0.4},
    "AV": {"proximity": 0.6, "knowledge": 1.0},
}


class CVSSParseError(ValueError):
    def __init__(self, token: str, reason: str):
        self.token = token
        super().__init__(f"malformed CVSS metric {token!r}: {reason}")


class UnresolvedVulnerabilityError(KeyError):
    def __init__(self, edge_id: str, ref: str, reason: str = "not found in vulnerability database"):
        self.edge_id = edge_id
        self.ref = ref
        super().__init__(f"edge {edge_id!r}: vulnerability {ref!r} {reason}")

    def __str__(self) -> str:
        return self.args[0]


class Ability(str, enum.Enum):
    NAIVE = "naive"
    ADVANCED = "advanced"
    PROFESSIONAL = "professional"


def _check_unit(attrs: Mapping[str, float], names, what: str) -> dict[str, float]:
    missing = [k for k in names if k not in attrs]
    if missing:
        raise ValueError(f"{what}: missing attributes {missing}")
    out = {k: float(attrs[k]) for k in names}
    bad = {k: v for k, v in out.items() if not 0.0 <= v <= 1.0}
    if bad:
        raise ValueError(f"{what}: attribute values outside [0, 1]: {bad}")
    return out


@dataclass(frozen=True)
class NetworkVulnerability:
    cve_id: str
    attributes: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", _check_unit(self.attributes, NETWORK_ATTRIBUTES, self.cve_id))

    @classmethod
    def from_vector(cls, cve_id: str, vector: str) -> "NetworkVulnerability":
        return cls(cve_id, normalize_cvss(vector))


@dataclass(frozen=True)
class HumanVulnerability:
    name: str
    attributes: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", _check_unit(self.attributes, HUMAN_ATTRIBUTES, self.name))

    @classmethod
    def from_levels(cls, name: str, ac: str | float, av: str | float) -> "HumanVulnerability":
        """Build from qualitative levels (AC Low/High, AV Proximity/Knowledge) or raw numbers."""
        return cls(name, {"AC": _human_level("AC", ac), "AV": _human_level("AV", av)})


def _human_level(attr: str, level: str | float) -> float:
    if isinstance(level, (int, float)) and not isinstance(level, bool):
        return float(level)
    try:
        return HUMAN_TABLE[attr][str(level).strip().lower()]
    except KeyError:
        choices = ", ".join(HUMAN_TABLE[attr])
        raise ValueError(f"{attr} level {level!r} is not one of {choices}") from None


@dataclass(frozen=True)
class AttackerProfile:
    ability: Ability
    thresholds: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ability", Ability(self.ability))
        object.__setattr__(
            self, "thresholds", _check_unit(self.thresholds, NETWORK_ATTRIBUTES, f"{self.ability.value} attacker")
        )

    @classmethod
    def named(cls, ability: Ability | str) -> "AttackerProfile":
        ability = Ability(str(getattr(ability, "value", ability)).lower())
        t = DEFAULT_THRESHOLDS[ability]
        return cls(ability, {k: t for k in NETWORK_ATTRIBUTES})


DEFAULT_THRESHOLDS = {Ability.PROFESSIONAL: 0.0, Ability.ADVANCED: 0.3, Ability.NAIVE: 0.6}


@dataclass(frozen=True)
class EdgeRate:
    edge_id: str
    lam: float


def heaviside(z: float) -> int:
    return 0 if z < 0 else 1


def normalize_cvss(vector: str, table: Mapping[str, Mapping] | None = None) -> dict[str, float]:
    """Map a CVSS v3 vector to the five normalized network attributes.

    AV, AC and PR are required. E (exploit code maturity) and RC default to
    the table's ``None`` entry when absent or ``X``.
    """
    table = CVSS_TABLE if table is None else table
    text = vector.strip()
    if text.upper().startswith("CVSS:"):
        prefix, _, text = text.partition("/")
        if prefix.upper() not in ("CVSS:3.0", "CVSS:3.1"):
            raise CVSSParseError(prefix, "only CVSS v3.0/v3.1 vectors are supported")
    levels: dict[str, str] = {}
    for token in filter(None, text.split("/")):
        key, sep, val = token.partition(":")
        if not sep or not key or not val:
            raise CVSSParseError(token, "expected METRIC:VALUE")
        if key in levels:
            raise CVSSParseError(token, "metric given twice")
        if key in _VECTOR_KEYS:
            attr = _VECTOR_KEYS[key]
            if val == "X" and key in _OPTIONAL:
                pass
            elif val not in table[attr]:
                raise CVSSParseError(token, f"unknown level {val!r}")
        elif key not in _IGNORED:
            raise CVSSParseError(token, "unknown metric")
        levels[key] = val

    out = {}
    for key, attr in _VECTOR_KEYS.items():
        val = levels.get(key)
        if val is None and key not in _OPTIONAL:
            raise CVSSParseError(key, "required metric missing")
        out[attr] = float(table[attr][None if val in (None, "X") else val])
    return out


def network_lambda(v: NetworkVulnerability, a: AttackerProfile) -> float:
    lam = 1.0
    for x in NETWORK_ATTRIBUTES:
        value = v.attributes[x]
        lam *= heaviside(value - a.thresholds[x]) * value
    return lam


def human_access_lambda(v: HumanVulnerability) -> float:
    lam = 1.0
    for x in HUMAN_ATTRIBUTES:
        lam *= v.attributes[x]
    return lam


@dataclass
class VulnerabilityDB:
    network: dict[str, NetworkVulnerability] = field(default_factory=dict)
    human: dict[str, HumanVulnerability] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "VulnerabilityDB":
        """Parse ``{network: [{id, cve, cvss_vector}], human: [{id, name, ac, av}]}``."""
        db = cls()
        for i, raw in enumerate(doc.get("network", [])):
            try:
                vid = str(raw["id"])
                db.network[vid] = NetworkVulnerability.from_vector(str(raw.get("cve", vid)), raw["cvss_vector"])
            except KeyError as exc:
                raise ValueError(f"network[{i}]: missing field {exc.args[0]!r}") from None
            except ValueError as exc:
                raise ValueError(f"network[{i}]: {exc}") from None
        for i, raw in enumerate(doc.get("human", [])):
            try:
                vid = str(raw["id"])
                db.human[vid] = HumanVulnerability.from_levels(str(raw.get("name", vid)), raw["ac"], raw["av"])
            except KeyError as exc:
                raise ValueError(f"human[{i}]: missing field {exc.args[0]!r}") from None
            except ValueError as exc:
                raise ValueError(f"human[{i}]: {exc}") from None
        clash = sorted(set(db.network) & set(db.human))
        if clash:
            raise ValueError(f"vulnerability ids used in both network and human tables: {clash}")
        return db


def rate_edge(g: MultiLayerAttackGraph, edge_id: str, db: VulnerabilityDB, profile: AttackerProfile) -> float:
    edge = g.edge(edge_id)
    if g.edge_layer(edge) is Layer.NETWORK:
        v = db.network.get(edge.vuln)
        if v is None:
            reason = "is a human/access vulnerability on a network-layer edge" if edge.vuln in db.human else None
            raise UnresolvedVulnerabilityError(edge.id, edge.vuln, *(reason,) if reason else ())
        return network_lambda(v, profile)
    hv = db.human.get(edge.vuln)
    if hv is None:
        reason = "is a network vulnerability on a human/access-layer edge" if edge.vuln in db.network else None
        raise UnresolvedVulnerabilityError(edge.id, edge.vuln, *(reason,) if reason else ())
    return human_access_lambda(hv)


def rate_all_edges(g: MultiLayerAttackGraph, db: VulnerabilityDB, profile: AttackerProfile) -> dict[str, EdgeRate]:
    return {e.id: EdgeRate(e.id, rate_edge(g, e.id, db, profile)) for e in g.edges}

"""Multi-layer attack graph: human, access and network layers as one directed multigraph."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable


class Layer(str, enum.Enum):
    HUMAN = "human"
    ACCESS = "access"
    NETWORK = "network"

    @property
    def rank(self) -> int:
        return _LAYER_RANK[self]

    @classmethod
    def parse(cls, text: str) -> "Layer":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(
                f"unknown layer {text!r}; expected one of 'human', 'access', 'network'"
            ) from None


_LAYER_RANK = {Layer.HUMAN: 0, Layer.ACCESS: 1, Layer.NETWORK: 2}
LAYERS = (Layer.HUMAN, Layer.ACCESS, Layer.NETWORK)


class GraphInvalidError(ValueError):
    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        super().__init__(f"invalid attack graph: {lines}{more}")


@dataclass(frozen=True)
class Violation:
    subject: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.subject}: [{self.rule}] {self.message}"


@dataclass(frozen=True)
class GraphNode:
    id: str
    layer: Layer
    label: str = ""


@dataclass(frozen=True)
class GraphEdge:
    id: str
    source: str
    target: str
    vuln: str


@dataclass(frozen=True)
class MultiLayerAttackGraph:
    """Immutable attack graph.

    ``edge_layer_rule`` decides which layer a cross-layer edge belongs to:
    ``"destination"`` (default) assigns it to the layer of the node being
    reached, ``"source"`` to the layer it leaves from.
    """

    nodes: tuple[GraphNode, ...] = ()
    edges: tuple[GraphEdge, ...] = ()
    entry_nodes: tuple[str, ...] = ()
    target_nodes: tuple[str, ...] = ()
    edge_layer_rule: str = "destination"
    _node_index: dict = field(init=False, repr=False, compare=False)
    _edge_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.edge_layer_rule not in ("destination", "source"):
            raise ValueError(f"edge_layer_rule must be 'destination' or 'source', got {self.edge_layer_rule!r}")
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "entry_nodes", tuple(self.entry_nodes))
        object.__setattr__(self, "target_nodes", tuple(self.target_nodes))
        object.__setattr__(self, "_node_index", {n.id: n for n in self.nodes})
        object.__setattr__(self, "_edge_index", {e.id: e for e in self.edges})

    def node(self, node_id: str) -> GraphNode:
        return self._node_index[node_id]

    def edge(self, edge_id: str) -> GraphEdge:
        return self._edge_index[edge_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_index

    def edge_layer(self, edge: GraphEdge | str) -> Layer:
        if isinstance(edge, str):
            edge = self._edge_index[edge]
        end = edge.target if self.edge_layer_rule == "destination" else edge.source
        return self._node_index[end].layer

    def with_rule(self, rule: str) -> "MultiLayerAttackGraph":
        return MultiLayerAttackGraph(self.nodes, self.edges, self.entry_nodes, self.target_nodes, rule)

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": n.id, "layer": n.layer.value, "label": n.label} for n in self.nodes],
            "edges": [
                {"id": e.id, "source": e.source, "target": e.target, "vuln": e.vuln}
                for e in self.edges
            ],
            "entry_nodes": list(self.entry_nodes),
            "target_nodes": list(self.target_nodes),
        }

    @classmethod
    def from_dict(cls, doc: dict, edge_layer_rule: str = "destination") -> "MultiLayerAttackGraph":
        """Build a graph from the MLAG JSON document layout.

        Raises ``ValueError`` (with the offending index) on missing keys or
        unknown layer strings; structural problems are left to
        :func:`validate_graph`.
        """
        nodes = []
        for i, raw in enumerate(doc.get("nodes", [])):
            try:
                nodes.append(GraphNode(str(raw["id"]), Layer.parse(raw["layer"]), str(raw.get("label", ""))))
            except KeyError as exc:
                raise ValueError(f"nodes[{i}]: missing field {exc.args[0]!r}") from None
            except ValueError as exc:
                raise ValueError(f"nodes[{i}]: {exc}") from None
        edges = []
        for i, raw in enumerate(doc.get("edges", [])):
            try:
                edges.append(GraphEdge(str(raw["id"]), str(raw["source"]), str(raw["target"]), str(raw["vuln"])))
            except KeyError as exc:
                raise ValueError(f"edges[{i}]: missing field {exc.args[0]!r}") from None
        return cls(
            tuple(nodes),
            tuple(edges),
            tuple(str(x) for x in doc.get("entry_nodes", [])),
            tuple(str(x) for x in doc.get("target_nodes", [])),
            edge_layer_rule,
        )


def validate_graph(g: MultiLayerAttackGraph) -> list[Violation]:
    out: list[Violation] = []
    seen: set[str] = set()
    for n in g.nodes:
        if n.id in seen:
            out.append(Violation(n.id, "unique-node-id", f"node id {n.id!r} appears more than once"))
        seen.add(n.id)

    seen_edges: set[str] = set()
    pair_vulns: set[tuple[str, str, str]] = set()
    for e in g.edges:
        if e.id in seen_edges:
            out.append(Violation(e.id, "unique-edge-id", f"edge id {e.id!r} appears more than once"))
        seen_edges.add(e.id)
        if e.id in seen:
            out.append(Violation(e.id, "unique-id", f"edge id {e.id!r} collides with a node id"))
        missing = [x for x in (e.source, e.target) if not g.has_node(x)]
        for x in missing:
            out.append(Violation(e.id, "unknown-node", f"edge {e.id!r} references unknown node {x!r}"))
        key = (e.source, e.target, e.vuln)
        if key in pair_vulns:
            out.append(
                Violation(
                    e.id,
                    "multigraph",
                    f"parallel edge {e.source!r}->{e.target!r} repeats vulnerability {e.vuln!r}",
                )
            )
        pair_vulns.add(key)
        if not missing:
            if g.node(e.source).layer is Layer.NETWORK and g.node(e.target).layer is Layer.HUMAN:
                out.append(Violation(e.id, "layer-direction", f"edge {e.id!r} goes from network back to human layer"))

    for nid in g.entry_nodes:
        if not g.has_node(nid):
            out.append(Violation(nid, "unknown-node", f"entry node {nid!r} is not in the graph"))
        elif g.node(nid).layer is not Layer.HUMAN:
            out.append(Violation(nid, "entry-layer", f"entry node {nid!r} is not in the human layer"))
    for nid in g.target_nodes:
        if not g.has_node(nid):
            out.append(Violation(nid, "unknown-node", f"target node {nid!r} is not in the graph"))
        elif g.node(nid).layer is not Layer.NETWORK:
            out.append(Violation(nid, "target-layer", f"target node {nid!r} is not in the network layer"))
    return out


def _require_valid(g: MultiLayerAttackGraph) -> None:
    violations = validate_graph(g)
    if violations:
        raise GraphInvalidError(violations)


def enumerate_attack_paths(g: MultiLayerAttackGraph, max_len: int | None = None) -> list[tuple[str, ...]]:
    """All node-simple paths from an entry node to a target node.

    Paths are tuples of edge ids, at most ``max_len`` edges long (default:
    number of nodes), sorted lexicographically by their edge-id sequence.
    A path that reaches one target may continue on to another target.
    """
    _require_valid(g)
    if max_len is None:
        max_len = max(len(g.nodes), 1)
    if max_len < 1:
        raise ValueError(f"max_len must be a positive integer, got {max_len}")

    out_edges: dict[str, list[GraphEdge]] = defaultdict(list)
    for e in g.edges:
        out_edges[e.source].append(e)
    for lst in out_edges.values():
        lst.sort(key=lambda e: e.id)
    targets = set(g.target_nodes)

    paths: list[tuple[str, ...]] = []
    for entry in sorted(set(g.entry_nodes)):
        # iterative DFS; each stack frame is (node, edge iterator)
        on_path = {entry}
        edge_stack: list[str] = []
        stack = [(entry, iter(out_edges.get(entry, ())))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                on_path.discard(node)
                if edge_stack:
                    edge_stack.pop()
                continue
            if nxt.target in on_path:
                continue
            if nxt.target in targets:
                paths.append(tuple(edge_stack) + (nxt.id,))
            if len(edge_stack) + 1 < max_len:
                edge_stack.append(nxt.id)
                on_path.add(nxt.target)
                stack.append((nxt.target, iter(out_edges.get(nxt.target, ()))))
    paths.sort()
    return paths


def edges_in_layer(g: MultiLayerAttackGraph, layer: Layer) -> frozenset[str]:
    return frozenset(e.id for e in g.edges if g.edge_layer(e) is layer)


def edge_layers(g: MultiLayerAttackGraph) -> dict[str, Layer]:
    return {e.id: g.edge_layer(e) for e in g.edges}


def build_graph(
    nodes: Iterable[tuple[str, Layer | str]],
    edges: Iterable[tuple[str, str, str, str]],
    entry_nodes: Iterable[str] = (),
    target_nodes: Iterable[str] = (),
    edge_layer_rule: str = "destination",
) -> MultiLayerAttackGraph:
    """Shorthand constructor: ``nodes`` as (id, layer), ``edges`` as (id, source, target, vuln)."""
    return MultiLayerAttackGraph(
        tuple(GraphNode(nid, Layer(layer), nid) for nid, layer in nodes),
        tuple(GraphEdge(*e) for e in edges),
        tuple(entry_nodes),
        tuple(target_nodes),
        edge_layer_rule,
    )

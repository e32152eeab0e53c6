"""Fact-graph data model: parsing, validation, adjacency, random generation.

An instance is a directed labeled multigraph: nodes are entities, edges are
relation mentions. The text format is one pipe-separated triple per line,
with optional ``@type`` metadata lines; blank lines separate instances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

REF_TYPES = (
    "male",
    "female",
    "plural-animate",
    "unknown-animate",
    "inanimate",
    "unknown",
)


class GraphError(ValueError):
    """Structurally invalid fact graph."""


class ParseError(GraphError):
    """Malformed instance text."""


def normalize_surface(text: str) -> str:
    """Underscores to spaces, whitespace collapsed and stripped."""
    return " ".join(text.replace("_", " ").split())


@dataclass(frozen=True)
class Entity:
    id: int
    surface: str
    ref_type: str = "unknown"


@dataclass(frozen=True)
class Edge:
    edge_id: int
    source: int
    relation: int
    target: int


@dataclass(frozen=True)
class FactGraph:
    entities: tuple[Entity, ...]
    relations: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if not self.edges:
            raise GraphError("a fact graph needs at least one edge")
        for i, ent in enumerate(self.entities):
            if ent.id != i:
                raise GraphError(f"entity ids must be dense and 0-based, got {ent.id} at {i}")
            if not ent.surface:
                raise GraphError(f"entity {i} has an empty surface")
            if ent.ref_type not in REF_TYPES:
                raise GraphError(f"unknown ref_type {ent.ref_type!r} for entity {ent.surface!r}")
        surfaces = [e.surface for e in self.entities]
        if len(set(surfaces)) != len(surfaces):
            raise GraphError("duplicate entity surfaces")
        n_ent, n_rel = len(self.entities), len(self.relations)
        for i, e in enumerate(self.edges):
            if e.edge_id != i:
                raise GraphError(f"edge ids must be dense and 0-based, got {e.edge_id} at {i}")
            if not (0 <= e.source < n_ent and 0 <= e.target < n_ent):
                raise GraphError(f"edge {i} references an unknown entity")
            if not 0 <= e.relation < n_rel:
                raise GraphError(f"edge {i} references an unknown relation")
            if e.source == e.target:
                raise GraphError(f"edge {i} is a self-loop on entity {e.source}")

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    def surface(self, entity_id: int) -> str:
        return self.entities[entity_id].surface

    def relation_name(self, relation_id: int) -> str:
        return self.relations[relation_id]

    def adjacency(self, entity_id: int) -> tuple[list[Edge], list[Edge]]:
        """(incoming, outgoing) edges of a node, each in edge_id order."""
        if not 0 <= entity_id < self.n_entities:
            raise GraphError(f"no entity with id {entity_id}")
        incoming = [e for e in self.edges if e.target == entity_id]
        outgoing = [e for e in self.edges if e.source == entity_id]
        return incoming, outgoing

    def fact(self, edge_id: int) -> tuple[int, int, int]:
        e = self.edges[edge_id]
        return (e.source, e.relation, e.target)


def is_connected(g: FactGraph, edge_ids=None) -> bool:
    """True iff the given edges (default: all) form one undirected component.

    Only nodes touched by the edge set are considered.
    """
    edges = g.edges if edge_ids is None else [g.edges[i] for i in sorted(edge_ids)]
    if not edges:
        return False
    adj: dict[int, list[int]] = {}
    for e in edges:
        adj.setdefault(e.source, []).append(e.target)
        adj.setdefault(e.target, []).append(e.source)
    start = edges[0].source
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for other in adj[node]:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    return len(seen) == len(adj)


class _Builder:
    def __init__(self):
        self.entity_ids: dict[str, int] = {}
        self.ref_types: dict[int, str] = {}
        self.relation_ids: dict[str, int] = {}
        self.edges: list[tuple[int, int, int]] = []

    def entity(self, surface: str) -> int:
        if surface not in self.entity_ids:
            self.entity_ids[surface] = len(self.entity_ids)
        return self.entity_ids[surface]

    def relation(self, name: str) -> int:
        if name not in self.relation_ids:
            self.relation_ids[name] = len(self.relation_ids)
        return self.relation_ids[name]

    def build(self) -> FactGraph:
        entities = tuple(
            Entity(i, surface, self.ref_types.get(i, "unknown"))
            for surface, i in self.entity_ids.items()
        )
        relations = tuple(self.relation_ids)
        edges = tuple(Edge(k, s, r, t) for k, (s, r, t) in enumerate(self.edges))
        return FactGraph(entities, relations, edges)


def parse_instance(text: str) -> FactGraph:
    """Parse one instance block of ``S | R | O`` triples and ``@type`` lines."""
    builder = _Builder()
    type_lines: list[tuple[int, str]] = []
    saw_triple = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("@type"):
            type_lines.append((lineno, line))
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected 3 pipe-separated fields, got {len(fields)}")
        subj, rel, obj = fields
        if not subj or not rel or not obj:
            raise ParseError(f"line {lineno}: empty field in triple")
        subj_n = normalize_surface(subj)
        obj_n = normalize_surface(obj)
        rel_n = " ".join(rel.split())
        if not subj_n or not obj_n or not rel_n:
            raise ParseError(f"line {lineno}: field empty after normalization")
        if subj_n == obj_n:
            raise ParseError(f"line {lineno}: self-loop on {subj_n!r}")
        s = builder.entity(subj_n)
        t = builder.entity(obj_n)
        r = builder.relation(rel_n)
        builder.edges.append((s, r, t))
        saw_triple = True
    if not saw_triple:
        raise ParseError("instance contains no triples")
    for lineno, line in type_lines:
        parts = line.split()
        if len(parts) < 3:
            raise ParseError(f"line {lineno}: @type needs an entity surface and a ref type")
        ref_type = parts[-1]
        surface = normalize_surface(" ".join(parts[1:-1]))
        if ref_type not in REF_TYPES:
            raise ParseError(f"line {lineno}: unknown ref type {ref_type!r}")
        if surface not in builder.entity_ids:
            raise ParseError(f"line {lineno}: @type names unknown entity {surface!r}")
        builder.ref_types[builder.entity_ids[surface]] = ref_type
    return builder.build()


def parse_instances(text: str) -> list[FactGraph]:
    """Parse a multi-instance file; blank lines separate instances."""
    blocks: list[list[str]] = [[]]
    for raw in text.splitlines():
        if raw.strip():
            blocks[-1].append(raw)
        elif blocks[-1]:
            blocks.append([])
    return [parse_instance("\n".join(b)) for b in blocks if b]


def serialize_instance(g: FactGraph) -> str:
    """Inverse of parse_instance up to normalization; parse round-trips exactly."""
    lines = [
        f"{g.surface(e.source)} | {g.relation_name(e.relation)} | {g.surface(e.target)}"
        for e in g.edges
    ]
    for ent in g.entities:
        if ent.ref_type != "unknown":
            lines.append(f"@type {ent.surface} {ent.ref_type}")
    return "\n".join(lines) + "\n"


def serialize_instances(graphs) -> str:
    return "\n".join(serialize_instance(g) for g in graphs)


def random_graph(n_edges: int, n_entities: int, n_relations: int, seed: int) -> FactGraph:
    """Random undirected-connected fact graph: spanning tree plus extra edges."""
    if n_entities < 2:
        raise GraphError("need at least 2 entities")
    if n_relations < 1:
        raise GraphError("need at least 1 relation")
    if n_edges < n_entities - 1:
        raise GraphError(
            f"{n_edges} edges cannot connect {n_entities} entities (need >= {n_entities - 1})"
        )
    rng = random.Random(seed)
    edges: list[tuple[int, int, int]] = []
    for node in range(1, n_entities):
        other = rng.randrange(node)
        s, t = (node, other) if rng.random() < 0.5 else (other, node)
        edges.append((s, rng.randrange(n_relations), t))
    while len(edges) < n_edges:
        s = rng.randrange(n_entities)
        t = rng.randrange(n_entities)
        if s == t:
            continue
        edges.append((s, rng.randrange(n_relations), t))
    entities = tuple(Entity(i, f"ent{i}") for i in range(n_entities))
    relations = tuple(f"rel{j}" for j in range(n_relations))
    g = FactGraph(entities, relations, tuple(Edge(k, s, r, t) for k, (s, r, t) in enumerate(edges)))
    assert is_connected(g) and len({e.source for e in g.edges} | {e.target for e in g.edges}) == n_entities
    return g

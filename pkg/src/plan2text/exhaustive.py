"""Baseline planner: enumerate every sentence split and every DFS traversal.

Splits are ordered partitions of the edge set into undirected-connected
parts; each part is covered by one full (non-truncated) undirected DFS
traversal, which becomes one sentence plan. Exponential in the edge count,
hence the hard cap; the transition planner is the linear-time alternative.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .graph import FactGraph
from .plans import (
    BACKWARD,
    FORWARD,
    POP,
    PlanError,
    SentencePlan,
    TextPlan,
    plan_from_traversal,
    visit,
)

DEFAULT_EDGE_CAP = 10


class ExhaustiveCapError(ValueError):
    """Graph too large for exhaustive planning; use the transition planner."""


def _incidence(g: FactGraph, edge_ids):
    """node -> [(bit, edge_id, other_endpoint)] for the given edges."""
    incident: dict[int, list[tuple[int, int, int]]] = {}
    for pos, edge_id in enumerate(edge_ids):
        e = g.edges[edge_id]
        bit = 1 << pos
        incident.setdefault(e.source, []).append((bit, edge_id, e.target))
        incident.setdefault(e.target, []).append((bit, edge_id, e.source))
    return incident


def _mask_connected(g: FactGraph, edge_ids) -> bool:
    nodes: set[int] = set()
    adj: dict[int, set[int]] = {}
    for edge_id in edge_ids:
        e = g.edges[edge_id]
        nodes.add(e.source)
        nodes.add(e.target)
        adj.setdefault(e.source, set()).add(e.target)
        adj.setdefault(e.target, set()).add(e.source)
    if not nodes:
        return False
    start = next(iter(nodes))
    seen = {start}
    frontier = [start]
    while frontier:
        n = frontier.pop()
        for m in adj[n]:
            if m not in seen:
                seen.add(m)
                frontier.append(m)
    return seen == nodes


def _full_traversals(incident, start: int, full_mask: int):
    """Yield every full undirected DFS traversal of the edge set, as step tuples."""
    steps = [visit(start)]
    stack = [start]

    def rec(mask: int):
        node = stack[-1]
        options = [(bit, eid, other) for bit, eid, other in incident.get(node, ()) if mask & bit]
        if not options:
            steps.append(POP)
            if len(stack) == 1:
                yield tuple(steps)
            else:
                popped = stack.pop()
                yield from rec(mask)
                stack.append(popped)
            steps.pop()
            return
        for bit, eid, other in options:
            steps.append(visit(other, eid))
            stack.append(other)
            yield from rec(mask & ~bit)
            stack.pop()
            steps.pop()

    yield from rec(full_mask)


def enumerate_sentence_plans(g: FactGraph, edge_ids) -> list[SentencePlan]:
    """All distinct sentence plans covering exactly the given connected edge set."""
    edge_ids = sorted(edge_ids)
    if not edge_ids:
        raise PlanError("empty edge set")
    if not _mask_connected(g, edge_ids):
        raise PlanError("edge set is not undirected-connected")
    incident = _incidence(g, edge_ids)
    full_mask = (1 << len(edge_ids)) - 1
    plans: list[SentencePlan] = []
    seen: set[SentencePlan] = set()
    for start in sorted(incident):
        for steps in _full_traversals(incident, start, full_mask):
            sp = plan_from_traversal(g, steps)
            if sp not in seen:
                seen.add(sp)
                plans.append(sp)
    return plans


def _ordered_splits(g: FactGraph, edge_ids: list[int]):
    """Ordered partitions of the edge ids into undirected-connected parts."""
    n = len(edge_ids)

    connected_cache: dict[int, bool] = {}

    def connected(mask: int) -> bool:
        hit = connected_cache.get(mask)
        if hit is None:
            part = [edge_ids[i] for i in range(n) if mask >> i & 1]
            hit = _mask_connected(g, part)
            connected_cache[mask] = hit
        return hit

    def rec(remaining: int):
        if remaining == 0:
            yield ()
            return
        sub = remaining
        while sub:
            if connected(sub):
                for rest in rec(remaining & ~sub):
                    yield (sub,) + rest
            sub = (sub - 1) & remaining
        return

    yield from rec((1 << n) - 1)


def enumerate_plans(g: FactGraph, edge_cap: int = DEFAULT_EDGE_CAP):
    """Lazily yield every distinct TextPlan for the graph, each exactly once."""
    edge_ids = [e.edge_id for e in g.edges]
    if len(edge_ids) > edge_cap:
        raise ExhaustiveCapError(
            f"{len(edge_ids)} edges exceeds the exhaustive cap of {edge_cap}; "
            "use the transition planner"
        )
    n = len(edge_ids)
    fact_multiset = [g.fact(i) for i in edge_ids]
    has_parallel = len(set(fact_multiset)) != len(fact_multiset)

    sentence_cache: dict[int, list[SentencePlan]] = {}

    def sentences_for(mask: int) -> list[SentencePlan]:
        plans = sentence_cache.get(mask)
        if plans is None:
            part = [edge_ids[i] for i in range(n) if mask >> i & 1]
            plans = enumerate_sentence_plans(g, part)
            sentence_cache[mask] = plans
        return plans

    seen: set[TextPlan] = set()
    for split in _ordered_splits(g, edge_ids):
        per_part = [sentences_for(mask) for mask in split]
        for combo in _product(per_part):
            plan = TextPlan(combo)
            if has_parallel:
                if plan in seen:
                    continue
                seen.add(plan)
            yield plan


def _product(parts):
    if not parts:
        yield ()
        return
    head, *tail = parts
    for item in head:
        for rest in _product(tail):
            yield (item,) + rest


@dataclass
class PlanScorer:
    """Deterministic heuristic plan scorer.

    score = w_dir * sum(log p(direction | relation)) + w_sent * n_sentences,
    with add-one smoothed direction frequencies per relation name.
    """

    weights: dict[str, float] = field(
        default_factory=lambda: {"relation_direction": 1.0, "sentence_count": -0.3}
    )
    direction_counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def uniform(cls) -> "PlanScorer":
        return cls(weights={"relation_direction": 0.0, "sentence_count": 0.0})

    def direction_logp(self, relation_name: str, direction: str) -> float:
        fwd, bwd = self.direction_counts.get(relation_name, (0, 0))
        num = (fwd if direction == FORWARD else bwd) + 1
        return math.log(num / (fwd + bwd + 2))

    def score(self, plan: TextPlan, g: FactGraph) -> float:
        total = 0.0
        w_dir = self.weights.get("relation_direction", 0.0)
        if w_dir:
            for sp in plan.sentences:
                total += w_dir * self._tree_logp(sp.root, g)
        total += self.weights.get("sentence_count", 0.0) * len(plan.sentences)
        return total

    def _tree_logp(self, node, g: FactGraph) -> float:
        acc = 0.0
        for relation, direction, child in node.children:
            acc += self.direction_logp(g.relation_name(relation), direction)
            acc += self._tree_logp(child, g)
        return acc

    def observe_plan(self, plan: TextPlan, g: FactGraph):
        """Accumulate relation-direction counts from a training plan."""

        def walk(node):
            for relation, direction, child in node.children:
                name = g.relation_name(relation)
                fwd, bwd = self.direction_counts.get(name, (0, 0))
                if direction == FORWARD:
                    fwd += 1
                else:
                    bwd += 1
                self.direction_counts[name] = (fwd, bwd)
                walk(child)

        for sp in plan.sentences:
            walk(sp.root)

    def save_weights(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for feature, weight in self.weights.items():
                fh.write(f"{feature}\t{weight}\n")

    def load_weights(self, path):
        weights: dict[str, float] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    feature, value = line.split("\t")
                    weights[feature] = float(value)
                except ValueError as exc:
                    raise ValueError(f"weights file line {lineno}: {raw!r}") from exc
        self.weights = weights
        return self


def count_plan_directions(lines) -> dict[str, tuple[int, int]]:
    """Relation-direction counts from rendered plan strings (no graph needed)."""
    counts: dict[str, tuple[int, int]] = {}
    for line in lines:
        for word in line.split():
            tok = word.split("|", 1)[0]
            if tok.startswith(">") or tok.startswith("<"):
                name = tok[1:].replace("_", " ")
                fwd, bwd = counts.get(name, (0, 0))
                if tok[0] == ">":
                    fwd += 1
                else:
                    bwd += 1
                counts[name] = (fwd, bwd)
    return counts


def best_plans(g: FactGraph, k: int, scorer: PlanScorer, edge_cap: int = DEFAULT_EDGE_CAP):
    """Top-k plans by score, descending; ties keep enumeration order."""
    if k <= 0:
        raise ValueError("k must be >= 1")
    heap: list[tuple[float, int, TextPlan]] = []
    for idx, plan in enumerate(enumerate_plans(g, edge_cap)):
        item = (scorer.score(plan, g), -idx, plan)
        if len(heap) < k:
            heapq.heappush(heap, item)
        elif item > heap[0]:
            heapq.heapreplace(heap, item)
    ranked = sorted(heap, key=lambda t: (-t[0], -t[1]))
    return [plan for _, _, plan in ranked]

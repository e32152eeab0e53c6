"""Text plans and sentence plans over fact graphs.

A sentence plan is an ordered tree of entities whose edges carry a relation
and a direction (forward = traversed source->target). A text plan is an
ordered sequence of sentence plans. Plans convert to and from truncated-DFS
traversal step sequences, linearize to a bracketed token string, and can be
checked for faithfulness against their source graph.

Plan equality is structural: two plans that express the same facts with the
same tree shapes are equal even if they were built from different (parallel)
edge ids. The edge ids actually traversed are kept on SentencePlan for
bookkeeping but excluded from comparison.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .graph import FactGraph

FORWARD = "forward"
BACKWARD = "backward"


class PlanError(ValueError):
    """Invalid plan or traversal."""


@dataclass(frozen=True)
class TraversalStep:
    kind: str  # "visit" | "pop"
    entity: int | None = None
    edge_id: int | None = None


def visit(entity: int, via: int | None = None) -> TraversalStep:
    return TraversalStep("visit", entity, via)


POP = TraversalStep("pop")


@dataclass(frozen=True)
class PlanNode:
    entity: int
    children: tuple[tuple[int, str, "PlanNode"], ...] = ()  # (relation, direction, child)


@dataclass(frozen=True)
class SentencePlan:
    root: PlanNode
    covered_edges: frozenset[int] = field(compare=False, default=frozenset())

    def __post_init__(self):
        if not self.root.children:
            raise PlanError("a sentence plan must cover at least one edge")


@dataclass(frozen=True)
class TextPlan:
    sentences: tuple[SentencePlan, ...]

    def __post_init__(self):
        if not self.sentences:
            raise PlanError("a text plan needs at least one sentence")
        seen: set[int] = set()
        for sp in self.sentences:
            overlap = seen & sp.covered_edges
            if overlap:
                raise PlanError(f"edges {sorted(overlap)} covered by more than one sentence")
            seen |= sp.covered_edges


def plan_from_traversal(g: FactGraph, steps) -> SentencePlan:
    """Build the sentence tree whose pre-order equals the traversal's visit order."""
    steps = list(steps)
    if not steps:
        raise PlanError("empty traversal")
    first = steps[0]
    if first.kind != "visit" or first.edge_id is not None:
        raise PlanError("a traversal must start by visiting its root without an edge")
    # stack of (entity, children list, relation/direction linking to parent)
    stack: list[list] = [[first.entity, [], None, None]]
    used: set[int] = set()
    root_node: PlanNode | None = None
    for idx, step in enumerate(steps[1:], start=1):
        if root_node is not None:
            raise PlanError(f"step {idx}: traversal continues after the root was popped")
        if step.kind == "visit":
            if step.edge_id is None:
                raise PlanError(f"step {idx}: only the first visit may omit an edge")
            if step.edge_id in used:
                raise PlanError(f"step {idx}: edge {step.edge_id} traversed twice")
            edge = g.edges[step.edge_id]
            top = stack[-1][0]
            if {edge.source, edge.target} != {top, step.entity}:
                raise PlanError(
                    f"step {idx}: edge {step.edge_id} does not join {top} and {step.entity}"
                )
            direction = FORWARD if step.entity == edge.target else BACKWARD
            used.add(step.edge_id)
            stack.append([step.entity, [], edge.relation, direction])
        elif step.kind == "pop":
            entity, children, relation, direction = stack.pop()
            node = PlanNode(entity, tuple(children))
            if stack:
                stack[-1][1].append((relation, direction, node))
            else:
                root_node = node
        else:
            raise PlanError(f"step {idx}: unknown step kind {step.kind!r}")
    if root_node is None:
        raise PlanError("traversal ended with unbalanced visits (missing pops)")
    return SentencePlan(root_node, frozenset(used))


def traversal_from_plan(g: FactGraph, plan: SentencePlan, used: set[int] | None = None):
    """Inverse of plan_from_traversal.

    Parallel edges are resolved to the lowest unused edge_id; `used` carries
    that bookkeeping across sentences of one text plan.
    """
    if used is None:
        used = set()
    steps = [visit(plan.root.entity)]

    def resolve(parent: int, relation: int, direction: str, child: int) -> int:
        if direction == FORWARD:
            s, t = parent, child
        else:
            s, t = child, parent
        for e in g.edges:
            if e.edge_id not in used and e.source == s and e.target == t and e.relation == relation:
                return e.edge_id
        raise PlanError(
            f"no unused edge {g.surface(s)} -[{g.relation_name(relation)}]-> {g.surface(t)}"
        )

    def walk(node: PlanNode):
        for relation, direction, child in node.children:
            edge_id = resolve(node.entity, relation, direction, child.entity)
            used.add(edge_id)
            steps.append(visit(child.entity, edge_id))
            walk(child)
        steps.append(POP)

    walk(plan.root)
    return steps


@dataclass(frozen=True)
class PlanToken:
    kind: str  # "open" | "close" | "entity" | "rel_fwd" | "rel_bwd"
    symbol: int | None = None
    tag: str | None = None  # "S" | "E" | "R" when typing is on


def _sentence_tokens(node: PlanNode, with_types: bool, out: list[PlanToken]):
    s = "S" if with_types else None
    out.append(PlanToken("open", None, s))
    out.append(PlanToken("entity", node.entity, "E" if with_types else None))
    for relation, direction, child in node.children:
        kind = "rel_fwd" if direction == FORWARD else "rel_bwd"
        out.append(PlanToken(kind, relation, "R" if with_types else None))
        _sentence_tokens(child, with_types, out)
    out.append(PlanToken("close", None, s))


def linearize(plan: TextPlan, with_types: bool = False) -> list[PlanToken]:
    """Bracketed pre-order serialization; injective on structural plans."""
    out: list[PlanToken] = []
    for sp in plan.sentences:
        _sentence_tokens(sp.root, with_types, out)
    return out


def _symbol_text(name: str) -> str:
    return name.replace(" ", "_")


def render_tokens(g: FactGraph, tokens, with_tags: bool = False) -> str:
    """Whitespace-separated plan string, optionally with |S/|E/|R tag suffixes."""
    parts = []
    for tok in tokens:
        if tok.kind == "open":
            text = "["
        elif tok.kind == "close":
            text = "]"
        elif tok.kind == "entity":
            text = _symbol_text(g.surface(tok.symbol))
        elif tok.kind == "rel_fwd":
            text = ">" + _symbol_text(g.relation_name(tok.symbol))
        elif tok.kind == "rel_bwd":
            text = "<" + _symbol_text(g.relation_name(tok.symbol))
        else:
            raise PlanError(f"unknown token kind {tok.kind!r}")
        if with_tags:
            if tok.tag is None:
                raise PlanError("tokens carry no tags; linearize with with_types=True")
            text += "|" + tok.tag
        parts.append(text)
    return " ".join(parts)


def render_plan(g: FactGraph, plan: TextPlan, with_tags: bool = False) -> str:
    return render_tokens(g, linearize(plan, with_types=with_tags), with_tags=with_tags)


def parse_plan(g: FactGraph, text: str) -> TextPlan:
    """Parse the render_plan format back into a structural TextPlan."""
    surface_ids = {_symbol_text(e.surface): e.id for e in g.entities}
    relation_ids = {_symbol_text(name): i for i, name in enumerate(g.relations)}
    raw = text.split()
    sentences: list[SentencePlan] = []
    used: set[int] = set()
    # stack entries: [entity, children, relation, direction]
    stack: list[list] = []
    pending_rel: tuple[int, str] | None = None

    def fail(i, msg):
        raise PlanError(f"plan token {i}: {msg}")

    i = 0
    for i, word in enumerate(raw):
        tok = word.split("|", 1)[0]
        if tok == "[":
            continue
        if tok == "]":
            if not stack:
                fail(i, "unbalanced ']'")
            entity, children, relation, direction = stack.pop()
            node = PlanNode(entity, tuple(children))
            if stack:
                stack[-1][1].append((relation, direction, node))
            else:
                sp_edges = _assign_edge_ids(g, node, used)
                sentences.append(SentencePlan(node, frozenset(sp_edges)))
        elif tok.startswith(">") or tok.startswith("<"):
            name = tok[1:]
            if name not in relation_ids:
                fail(i, f"unknown relation {name!r}")
            pending_rel = (relation_ids[name], FORWARD if tok[0] == ">" else BACKWARD)
        else:
            if tok not in surface_ids:
                fail(i, f"unknown entity {tok!r}")
            if not stack:
                stack.append([surface_ids[tok], [], None, None])
            else:
                if pending_rel is None:
                    fail(i, "entity token without a preceding relation")
                stack.append([surface_ids[tok], [], pending_rel[0], pending_rel[1]])
                pending_rel = None
    if stack:
        fail(i, "unbalanced '['")
    if not sentences:
        raise PlanError("empty plan string")
    return TextPlan(tuple(sentences))


def _assign_edge_ids(g: FactGraph, root: PlanNode, used: set[int]) -> set[int]:
    ids: set[int] = set()

    def walk(node: PlanNode):
        for relation, direction, child in node.children:
            s, t = (node.entity, child.entity) if direction == FORWARD else (child.entity, node.entity)
            for e in g.edges:
                if e.edge_id not in used and (e.source, e.relation, e.target) == (s, relation, t):
                    used.add(e.edge_id)
                    ids.add(e.edge_id)
                    break
            else:
                raise PlanError(
                    f"plan fact {g.surface(s)} -[{g.relation_name(relation)}]-> {g.surface(t)} "
                    "has no unused edge in the graph"
                )
            walk(child)

    walk(root)
    return ids


def entity_sequence(plan: TextPlan) -> list[int]:
    """Entities in pre-order per sentence, sentences in order, repeats kept."""
    seq: list[int] = []

    def walk(node: PlanNode):
        seq.append(node.entity)
        for _, _, child in node.children:
            walk(child)

    for sp in plan.sentences:
        walk(sp.root)
    return seq


def sentence_entity_sequences(plan: TextPlan) -> list[list[int]]:
    return [entity_sequence(TextPlan((sp,))) for sp in plan.sentences]


def plan_facts(plan: TextPlan) -> list[tuple[int, int, int]]:
    """(source, relation, target) facts realized by the plan, in pre-order."""
    facts: list[tuple[int, int, int]] = []

    def walk(node: PlanNode):
        for relation, direction, child in node.children:
            if direction == FORWARD:
                facts.append((node.entity, relation, child.entity))
            else:
                facts.append((child.entity, relation, node.entity))
            walk(child)

    for sp in plan.sentences:
        walk(sp.root)
    return facts


@dataclass(frozen=True)
class FaithReport:
    ok: bool
    missing: tuple[int, ...]  # edge_ids whose fact the plan does not express
    duplicated: tuple[int, ...]  # edge_ids whose fact the plan expresses too often
    extra: tuple[tuple[int, int, int], ...]  # plan facts with no graph edge at all

    def __bool__(self) -> bool:
        return self.ok


def check_faithful(plan: TextPlan, g: FactGraph) -> FaithReport:
    """True iff the plan expresses the graph's fact multiset exactly once each."""
    want = Counter(g.fact(e.edge_id) for e in g.edges)
    got = Counter(plan_facts(plan))
    missing: list[int] = []
    duplicated: list[int] = []
    extra: list[tuple[int, int, int]] = []
    by_fact: dict[tuple[int, int, int], list[int]] = {}
    for e in g.edges:
        by_fact.setdefault(g.fact(e.edge_id), []).append(e.edge_id)
    for fact, want_n in want.items():
        got_n = got.get(fact, 0)
        if got_n < want_n:
            missing.extend(by_fact[fact][got_n:])
        elif got_n > want_n:
            duplicated.extend(by_fact[fact][: got_n - want_n])
    for fact, got_n in got.items():
        if fact not in want:
            extra.extend([fact] * got_n)
    ok = not missing and not duplicated and not extra
    return FaithReport(ok, tuple(sorted(missing)), tuple(sorted(duplicated)), tuple(extra))


__all__ = [
    "FORWARD",
    "BACKWARD",
    "PlanError",
    "TraversalStep",
    "visit",
    "POP",
    "PlanNode",
    "SentencePlan",
    "TextPlan",
    "plan_from_traversal",
    "traversal_from_plan",
    "PlanToken",
    "linearize",
    "render_tokens",
    "render_plan",
    "parse_plan",
    "entity_sequence",
    "sentence_entity_sequences",
    "plan_facts",
    "FaithReport",
    "check_faithful",
]

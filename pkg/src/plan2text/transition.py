"""Linear-time planner: truncated-DFS traversals driven as a transition system.

A derivation alternates between choosing a start node and running one
truncated undirected DFS over the remaining edges; each traversal becomes a
sentence plan. Every edge is consumed exactly once, so any action sequence
that reaches the terminal state yields a faithful plan by construction, and
the total number of actions is linear in the edge count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import FactGraph
from .plans import (
    FORWARD,
    POP,
    PlanError,
    PlanToken,
    SentencePlan,
    TextPlan,
    TraversalStep,
    check_faithful,
    plan_from_traversal,
    traversal_from_plan,
    visit,
)


@dataclass(frozen=True)
class Action:
    kind: str  # "choose" | "go" | "pop"
    node: int | None = None
    edge: int | None = None

    def __str__(self) -> str:
        if self.kind == "choose":
            return f"choose n{self.node}"
        if self.kind == "go":
            return f"go e{self.edge} n{self.node}"
        return "pop"


def choose(node: int) -> Action:
    return Action("choose", node)


def go(edge_id: int, toward: int) -> Action:
    return Action("go", toward, edge_id)


POP_ACTION = Action("pop")


def action_from_str(text: str) -> Action:
    parts = text.split()
    if parts == ["pop"]:
        return POP_ACTION
    if len(parts) == 2 and parts[0] == "choose" and parts[1].startswith("n"):
        return choose(int(parts[1][1:]))
    if len(parts) == 3 and parts[0] == "go" and parts[1].startswith("e") and parts[2].startswith("n"):
        return go(int(parts[1][1:]), int(parts[2][1:]))
    raise ValueError(f"bad action string {text!r}")


@dataclass(frozen=True)
class PlannerState:
    graph: FactGraph = field(compare=False, repr=False)
    remaining: frozenset[int]
    stack: tuple[tuple[int, int | None], ...]  # (entity, edge arrived by)
    steps: tuple[TraversalStep, ...]
    finished: tuple[SentencePlan, ...]

    @property
    def phase(self) -> str:
        return "traversing" if self.stack else "choose_start"

    @property
    def is_terminal(self) -> bool:
        return not self.stack and not self.remaining


def initial_state(g: FactGraph) -> PlannerState:
    if not g.edges:
        raise PlanError("cannot plan an empty graph")
    return PlannerState(g, frozenset(e.edge_id for e in g.edges), (), (), ())


def legal_actions(s: PlannerState) -> list[Action]:
    g = s.graph
    if not s.stack:
        nodes = sorted(
            {e.source for i in s.remaining for e in (g.edges[i],)}
            | {e.target for i in s.remaining for e in (g.edges[i],)}
        )
        return [choose(n) for n in nodes]
    top = s.stack[-1][0]
    acts = []
    for i in sorted(s.remaining):
        e = g.edges[i]
        if e.source == top:
            acts.append(go(i, e.target))
        elif e.target == top:
            acts.append(go(i, e.source))
    acts.append(POP_ACTION)
    return acts


def _is_legal(s: PlannerState, a: Action) -> bool:
    if not s.stack:
        if a.kind != "choose" or s.is_terminal:
            return False
        g = s.graph
        return any(
            a.node in (g.edges[i].source, g.edges[i].target) for i in s.remaining
        )
    if a.kind == "pop":
        return True
    if a.kind != "go" or a.edge not in s.remaining:
        return False
    e = s.graph.edges[a.edge]
    top = s.stack[-1][0]
    return (e.source == top and a.node == e.target) or (e.target == top and a.node == e.source)


def apply_action(s: PlannerState, a: Action) -> PlannerState:
    if not _is_legal(s, a):
        raise PlanError(f"illegal action {a} in phase {s.phase}")
    if a.kind == "choose":
        return PlannerState(
            s.graph, s.remaining, ((a.node, None),), s.steps + (visit(a.node),), s.finished
        )
    if a.kind == "go":
        return PlannerState(
            s.graph,
            s.remaining - {a.edge},
            s.stack + ((a.node, a.edge),),
            s.steps + (visit(a.node, a.edge),),
            s.finished,
        )
    steps = s.steps + (POP,)
    stack = s.stack[:-1]
    if stack:
        return PlannerState(s.graph, s.remaining, stack, steps, s.finished)
    sentence = plan_from_traversal(s.graph, steps)
    return PlannerState(s.graph, s.remaining, (), (), s.finished + (sentence,))


def plan_of(s: PlannerState) -> TextPlan:
    if not s.is_terminal:
        raise PlanError("state is not terminal")
    return TextPlan(s.finished)


def run_actions(g: FactGraph, actions) -> TextPlan:
    """Replay a derivation from the initial state."""
    state = initial_state(g)
    for a in actions:
        state = apply_action(state, a)
    return plan_of(state)


def oracle_actions(g: FactGraph, gold: TextPlan) -> list[Action]:
    """The unique canonical action sequence whose replay yields the gold plan."""
    report = check_faithful(gold, g)
    if not report.ok:
        raise PlanError(f"gold plan is not faithful to the graph: {report}")
    actions: list[Action] = []
    used: set[int] = set()
    for sp in gold.sentences:
        steps = traversal_from_plan(g, sp, used)
        actions.append(choose(steps[0].entity))
        for step in steps[1:]:
            if step.kind == "visit":
                actions.append(go(step.edge_id, step.entity))
            else:
                actions.append(POP_ACTION)
    return actions


def tokens_for_action(s: PlannerState, a: Action, with_types: bool = False) -> list[PlanToken]:
    """Plan tokens emitted by an action; concatenated over a derivation they
    equal linearize(plan)."""
    s_tag = "S" if with_types else None
    e_tag = "E" if with_types else None
    r_tag = "R" if with_types else None
    if a.kind == "choose":
        return [PlanToken("open", None, s_tag), PlanToken("entity", a.node, e_tag)]
    if a.kind == "go":
        e = s.graph.edges[a.edge]
        kind = "rel_fwd" if a.node == e.target else "rel_bwd"
        return [
            PlanToken(kind, e.relation, r_tag),
            PlanToken("open", None, s_tag),
            PlanToken("entity", a.node, e_tag),
        ]
    return [PlanToken("close", None, s_tag)]


def _drive(g: FactGraph, controller, pick, collect_actions=False):
    session = controller.begin(g)
    state = initial_state(g)
    actions: list[Action] = []
    while not state.is_terminal:
        acts = legal_actions(state)
        probs = session.action_probs(state, acts)
        idx = pick(probs)
        a = acts[idx]
        session.advance(tokens_for_action(state, a, session.with_types))
        state = apply_action(state, a)
        if collect_actions:
            actions.append(a)
    plan = plan_of(state)
    return (plan, actions) if collect_actions else plan


def plan_greedy(g: FactGraph, controller) -> TextPlan:
    """Argmax decoding; ties resolve to the first action in legal order."""
    return _drive(g, controller, lambda p: int(np.argmax(p)))


def plan_sample(g: FactGraph, controller, temperature: float = 1.0, seed: int = 0) -> TextPlan:
    """Sample a derivation from the controller's action distributions."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    rng = np.random.default_rng(seed)
    session_holder = {}

    def pick(probs):
        return int(rng.choice(len(probs), p=probs))

    session = controller.begin(g)
    session_holder["s"] = session
    state = initial_state(g)
    while not state.is_terminal:
        acts = legal_actions(state)
        probs = session.action_probs(state, acts, temperature=temperature)
        idx = pick(probs)
        a = acts[idx]
        session.advance(tokens_for_action(state, a, session.with_types))
        state = apply_action(state, a)
    return plan_of(state)


def derivation_to_strings(actions) -> list[str]:
    return [str(a) for a in actions]


def canonical_plan(g: FactGraph) -> TextPlan:
    """Deterministic single-traversal-per-component policy used for synthetic
    gold plans: start at the lowest-id active node, always traverse the edge
    with the smallest (relation name, far surface, direction) key, pop only
    when forced."""
    state = initial_state(g)
    while not state.is_terminal:
        acts = legal_actions(state)
        if state.phase == "choose_start":
            a = acts[0]  # lowest node id
        else:
            gos = [x for x in acts if x.kind == "go"]
            if not gos:
                a = POP_ACTION
            else:
                a = min(
                    gos,
                    key=lambda x: (
                        g.relation_name(g.edges[x.edge].relation),
                        g.surface(x.node),
                        0 if g.edges[x.edge].target == x.node else 1,
                        x.edge,
                    ),
                )
        state = apply_action(state, a)
    return plan_of(state)

"""Brute-force cross-validation engine.

Reachability under one-step degree-n rewriting is explored breadth-first
over alpha-canonical states; renaming rules are folded into rule
application, and the measure-decrease of the remaining rules makes the
quotient graph finite, so searches on desk-scale formulas exhaust.

Witness traces are reconstructed concretely from the original start
formula so that they replay through the rewrite engine verbatim.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from . import semiclassical
from .formula import (
    FALSUM,
    And,
    Exists,
    Forall,
    Formula,
    Imp,
    Or,
    Prime,
    alpha_canonical,
)
from .parser import render
from .rewrite import (
    RewriteStep,
    Trace,
    applicable_steps,
    apply_step,
    format_position,
)

__all__ = [
    "DEFAULT_NODE_BUDGET",
    "ReachableSet",
    "SearchResult",
    "Signature",
    "reachable_set",
    "can_reach",
    "enumerate_formulas",
    "clear_transition_cache",
    "REACHABLE_SCHEMA",
]

DEFAULT_NODE_BUDGET = 100_000
REACHABLE_SCHEMA = "prenexify.reachable/1"

# (canonical state, degree) -> ((step on the state, canonical successor), ...)
# Shared across searches; states recur heavily across related start formulas.
_transitions: dict[tuple[Formula, int], tuple[tuple[RewriteStep, Formula], ...]] = {}


def clear_transition_cache() -> None:
    _transitions.clear()


def _expand(
    state: Formula, n: int, checker: Optional[semiclassical.Classifier]
) -> tuple[tuple[RewriteStep, Formula], ...]:
    key = (state, n)
    cached = _transitions.get(key)
    if cached is None:
        cached = tuple(
            (step, alpha_canonical(apply_step(state, step, n, checker)))
            for step in applicable_steps(state, n, checker)
        )
        _transitions[key] = cached
    return cached


@dataclass
class ReachableSet:
    """Closure of a start formula under degree-n rewriting, modulo alpha."""

    start: Formula
    n: int
    members: list[Formula]  # alpha-canonical, in BFS discovery order
    edges: dict[int, list[tuple[RewriteStep, int]]]  # member index -> successors
    exhausted: bool

    def __contains__(self, phi: Formula) -> bool:
        return alpha_canonical(phi) in self._member_set

    @property
    def _member_set(self) -> set[Formula]:
        cached = getattr(self, "_members_cache", None)
        if cached is None:
            cached = set(self.members)
            object.__setattr__(self, "_members_cache", cached)
        return cached

    def to_json(self) -> dict:
        return {
            "schema": REACHABLE_SCHEMA,
            "start": render(self.start),
            "degree": self.n,
            "exhausted": self.exhausted,
            "members": [render(m) for m in self.members],
            "edges": [
                {
                    "from": src,
                    "to": dst,
                    "rule": step.rule,
                    "path": format_position(step.position),
                    "fresh": step.fresh,
                }
                for src in range(len(self.members))
                for step, dst in self.edges.get(src, [])
            ],
        }


def reachable_set(
    phi: Formula,
    n: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    checker: Optional[semiclassical.Classifier] = None,
) -> ReachableSet:
    """Breadth-first closure of ``phi`` under applicable steps at degree n.

    ``exhausted`` is False only when the budget cut exploration short.
    """
    start = alpha_canonical(phi)
    members = [start]
    index = {start: 0}
    edges: dict[int, list[tuple[RewriteStep, int]]] = {}
    queue = [start]
    exhausted = True
    head = 0
    while head < len(queue):
        state = queue[head]
        head += 1
        out = []
        for step, succ in _expand(state, n, checker):
            dst = index.get(succ)
            if dst is None:
                if len(members) >= node_budget:
                    exhausted = False
                    continue
                dst = len(members)
                index[succ] = dst
                members.append(succ)
                queue.append(succ)
            out.append((step, dst))
        if out:
            edges[index[state]] = out
    return ReachableSet(phi, n, members, edges, exhausted)


@dataclass(frozen=True)
class SearchResult:
    status: str  # "yes" | "no" | "unknown"
    trace: Optional[Trace] = None


def can_reach(
    phi: Formula,
    n: int,
    predicate: Callable[[Formula], bool],
    node_budget: int = DEFAULT_NODE_BUDGET,
    checker: Optional[semiclassical.Classifier] = None,
) -> SearchResult:
    """Search for a reachable formula satisfying an alpha-invariant test.

    Returns "yes" with a shortest witnessing trace (ties broken by rule
    then position order), "no" only when the closure is exhausted, and
    "unknown" when the node budget was hit first.
    """
    start = alpha_canonical(phi)
    if predicate(start):
        return SearchResult("yes", Trace(phi, (), n))
    parent: dict[Formula, tuple[Formula, RewriteStep]] = {start: None}
    queue = [start]
    head = 0
    exhausted = True
    goal: Optional[Formula] = None
    while head < len(queue) and goal is None:
        state = queue[head]
        head += 1
        for step, succ in _expand(state, n, checker):
            if succ in parent:
                continue
            if len(parent) >= node_budget:
                exhausted = False
                continue
            parent[succ] = (state, step)
            queue.append(succ)
            if predicate(succ):
                goal = succ
                break
    if goal is None:
        return SearchResult("no" if exhausted else "unknown")

    # Canonical-state path, rebuilt as a concrete trace from phi itself.
    states = [goal]
    while parent[states[-1]] is not None:
        states.append(parent[states[-1]][0])
    states.reverse()
    concrete = phi
    steps: list[RewriteStep] = []
    for nxt in states[1:]:
        for step in applicable_steps(concrete, n, checker):
            result = apply_step(concrete, step, n, checker)
            if alpha_canonical(result) is nxt:
                concrete = result
                steps.append(step)
                break
        else:
            raise AssertionError("path reconstruction lost the BFS route")
    return SearchResult("yes", Trace(phi, tuple(steps), n))


@dataclass(frozen=True)
class Signature:
    """Finite universe for enumeration: predicates, variables, size cap."""

    predicates: tuple[tuple[str, int], ...]
    variables: tuple[str, ...]
    size_bound: int

    @staticmethod
    def make(predicates: dict[str, int], variables, size_bound: int) -> "Signature":
        return Signature(
            tuple(sorted(predicates.items())), tuple(variables), size_bound
        )


def enumerate_formulas(sig: Signature) -> Iterator[Formula]:
    """Every formula over the signature up to the size bound, exactly once
    modulo alpha, in a fixed order.

    Sizes ascend; within one size the atoms come first (falsum, then
    predicates in sorted order with argument tuples in variable-pool
    order), then quantifications of the previous layer (exists before
    forall, binders in pool order, bodies in layer order), then binary
    combinations (and, or, imp; left size ascending; operands in layer
    order).  Every yielded formula is alpha-canonical.
    """
    seen: set[Formula] = set()
    layers: list[list[Formula]] = [[]]  # layers[s] = canonical formulas of size s

    def emit(candidate: Formula, layer: list[Formula]) -> None:
        canon = alpha_canonical(candidate)
        if canon not in seen:
            seen.add(canon)
            layer.append(canon)

    for size_now in range(1, sig.size_bound + 1):
        layer: list[Formula] = []
        if size_now == 1:
            emit(FALSUM, layer)
            for name, arity in sig.predicates:
                for args in itertools.product(sig.variables, repeat=arity):
                    emit(Prime(name, args), layer)
        else:
            for kind in (Exists, Forall):
                for var in sig.variables:
                    for body in layers[size_now - 1]:
                        emit(kind(var, body), layer)
            for left_size in range(1, size_now - 1):
                right_size = size_now - 1 - left_size
                for op in (And, Or, Imp):
                    for left in layers[left_size]:
                        for right in layers[right_size]:
                            emit(op(left, right), layer)
        layers.append(layer)
        yield from layer

"""
MODULE: module_oracle.py - BRUTE-FORCE REFERENCE DISTANCES

ROLE: Evaluates configuration distances directly on explicit configurations
with a bounded stack, to check every symbolic engine against

KEY FUNCTIONS:
  bounded_distances(rsm, initial, stack_bound) → OracleResult
    - least fixpoint d(c') ⊒ d(c) ⊗ w(c, c') over configurations with
      stack height ≤ stack_bound, seeded by initial
  stabilized_distances(rsm, initial, queries) → OracleResult
    - raises the bound (start = max query height + module count + 1, step 2)
      until two successive bounds agree on every query
  interleaving_reach(crsm, k, stack_bound) → set of GlobalConfiguration
    - breadth-first interleaving search counting contexts per component run

ERRORS:
  NonTerminationError - a configuration relaxed more than the cap allows
  InconclusiveError - ceiling reached without agreement

NOTE: exponential in the bound, desk-scale instances only
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional, Set, Tuple

from confdist.core.constants import ORACLE_BOUND_CEILING, ORACLE_BOUND_STEP, ORACLE_RELAXATION_CAP
from confdist.core.errors import ContextBoundError, InconclusiveError, NonTerminationError
from confdist.modules.module_concurrent import Crsm, GlobalConfiguration
from confdist.modules.module_rsm import Configuration, Rsm, step


@dataclass
class OracleResult:
    zero: Any
    stack_bound: int
    distances: Dict[Configuration, Any] = field(default_factory=dict)
    stable: bool = False

    def get(self, c: Configuration):
        return self.distances.get(c, self.zero)

    def reached(self):
        return [c for c, value in self.distances.items() if value != self.zero]


def bounded_distances(
    rsm: Rsm,
    initial: Iterable[Tuple[Configuration, Any]],
    stack_bound: int,
    relaxation_cap: int = ORACLE_RELAXATION_CAP,
) -> OracleResult:
    sr = rsm.semiring
    result = OracleResult(zero=sr.zero, stack_bound=stack_bound)
    d = result.distances
    relaxations: Dict[Configuration, int] = {}
    queue = deque()
    queued = set()
    for c, weight in initial:
        rsm.check_configuration(c)
        if len(c.stack) > stack_bound:
            continue
        d[c] = sr.combine(d.get(c, sr.zero), weight)
        if c not in queued:
            queued.add(c)
            queue.append(c)

    while queue:
        c = queue.popleft()
        queued.discard(c)
        dc = d[c]
        for successor, weight in step(rsm, c):
            if len(successor.stack) > stack_bound:
                continue
            current = d.get(successor, sr.zero)
            merged = sr.combine(current, sr.extend(dc, weight))
            if merged == current:
                continue
            d[successor] = merged
            relaxations[successor] = relaxations.get(successor, 0) + 1
            if relaxations[successor] > relaxation_cap:
                raise NonTerminationError(
                    f"oracle relaxed {rsm.describe(successor)} more than {relaxation_cap} times")
            if successor not in queued:
                queued.add(successor)
                queue.append(successor)
    return result


def stabilized_distances(
    rsm: Rsm,
    initial: Iterable[Tuple[Configuration, Any]],
    queries: Iterable[Configuration],
    start: Optional[int] = None,
    step_size: int = ORACLE_BOUND_STEP,
    ceiling: int = ORACLE_BOUND_CEILING,
    relaxation_cap: int = ORACLE_RELAXATION_CAP,
) -> OracleResult:
    seeds = list(initial)
    targets = list(queries)
    if start is None:
        start = max((len(c.stack) for c in targets), default=0) + rsm.module_count + 1
    bound = start
    previous = bounded_distances(rsm, seeds, bound, relaxation_cap)
    while True:
        bound += step_size
        if bound > ceiling:
            raise InconclusiveError(
                f"oracle answers still changed at stack bound {bound - step_size} (ceiling {ceiling})")
        current = bounded_distances(rsm, seeds, bound, relaxation_cap)
        if all(previous.get(c) == current.get(c) for c in targets):
            current.stable = True
            return current
        previous = current


# ============== Interleavings ==============

def interleaving_reach(crsm: Crsm, k: int, stack_bound: int) -> Set[GlobalConfiguration]:
    """
    Explicit search over global configurations using at most k contexts.

    A context is a maximal run of one component; stacks above stack_bound are
    cut off. Returns every GlobalConfiguration seen, normalized so each
    component's node sits under the current global state (configurations that
    cannot be normalized are left out).
    """
    if k < 1:
        raise ContextBoundError("context bound k must be at least 1")

    def normalized(g, locals_):
        moved = []
        for i, c in enumerate(locals_):
            node = crsm.transplant_node(i, c.node, g)
            if node is None:
                return None
            moved.append(Configuration(node, c.stack))
        return GlobalConfiguration(g, tuple(moved))

    start = (crsm.initial_global, crsm.initial_locals, 0, None)
    seen = {start}
    queue = deque([start])
    found = set()
    while queue:
        g, locals_, contexts, last = queue.popleft()
        gc = normalized(g, locals_)
        if gc is not None:
            found.add(gc)
        for i, rsm in enumerate(crsm.components):
            used = contexts if i == last else contexts + 1
            if used > k:
                continue
            node = crsm.transplant_node(i, locals_[i].node, g)
            if node is None:
                continue
            for successor, _ in step(rsm, Configuration(node, locals_[i].stack)):
                if len(successor.stack) > stack_bound:
                    continue
                moved = list(locals_)
                moved[i] = successor
                item = (crsm.global_of(i, successor.node), tuple(moved), used, i)
                if item not in seen:
                    seen.add(item)
                    queue.append(item)
    return found

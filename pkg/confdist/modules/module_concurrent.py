"""
MODULE: module_concurrent.py - CONTEXT-BOUNDED REACHABILITY FOR CONCURRENT RSMS

ROLE: Interleaves component post* runs over a shared finite set of global states

MODEL:
  - Every component is a Boolean Rsm whose node names carry the global state
    as a suffix, "local@g"; call/return nodes inherit it ("b.e@g")
  - A step of one component moves (g, local) to (g', local'), the others stay
  - A suspended component keeps its local configuration; on resume its node is
    moved ("transplanted") to the same local name under the current global state

DRIVER:
  round 0     initial item: singleton automata, all parked at g0
  round r≤k   for every item of round r-1 and every component i other than the
              one that just ran: transplant, post*, then one new item per
              global state g' reached, with component i parked at g'

KEY FUNCTIONS:
  Crsm(components, global_states, initial_global, initial_locals)
  k_bounded_reach(crsm, k) → GlobalReachSet
  is_global_config_reachable(reach, gc) → bool
  reachable_global_configs(reach, max_height) → set of GlobalConfiguration
  random_crsm(seed, ...) → Crsm
"""
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from confdist.core.constants import DEFAULT_RELAXATION_CAP
from confdist.core.errors import ContextBoundError
from confdist.modules.module_automaton import ConfigAutomaton, State, accepts, singleton_automaton
from confdist.modules.module_confdist import post_star
from confdist.modules.module_generators import all_configurations
from confdist.modules.module_rsm import (
    BoxDef, Configuration, ModuleDef, Rsm, TransitionDef
)
from confdist.modules.module_semiring import boolean_semiring


@dataclass(frozen=True)
class GlobalConfiguration:
    global_state: int
    locals: Tuple[Configuration, ...]


def split_global(name: str) -> Tuple[str, str]:
    if "@" not in name:
        raise ValueError(f"node name '{name}' does not carry a global state (expected local@g)")
    local, state = name.rsplit("@", 1)
    return local, state


class Crsm:
    def __init__(self, components: Sequence[Rsm], global_states: Sequence[str], initial_global: int,
                 initial_locals: Sequence[Configuration]):
        self.components: Tuple[Rsm, ...] = tuple(components)
        self.global_states: Tuple[str, ...] = tuple(global_states)
        self.initial_global = initial_global
        self.initial_locals: Tuple[Configuration, ...] = tuple(initial_locals)
        if len(self.initial_locals) != len(self.components):
            raise ValueError("one initial local configuration per component is required")
        if not 0 <= initial_global < len(self.global_states):
            raise ValueError(f"initial global state index {initial_global} out of range")
        state_index = {g: i for i, g in enumerate(self.global_states)}
        self._global_of: List[Dict[int, int]] = []
        self._local_of: List[Dict[int, str]] = []
        self._by_local: List[Dict[Tuple[int, str, int], int]] = []
        for rsm in self.components:
            if rsm.semiring.name != "boolean":
                raise ValueError("concurrent reachability supports the boolean semiring only")
            global_of, local_of, by_local = {}, {}, {}
            for node, info in enumerate(rsm.nodes):
                local, state = split_global(info.name)
                if state not in state_index:
                    raise ValueError(f"node '{info.name}' names unknown global state '{state}'")
                global_of[node] = state_index[state]
                local_of[node] = local
                by_local[(info.module, local, state_index[state])] = node
            self._global_of.append(global_of)
            self._local_of.append(local_of)
            self._by_local.append(by_local)
        for i, c in enumerate(self.initial_locals):
            self.components[i].check_configuration(c)
            if self._global_of[i][c.node] != initial_global:
                raise ValueError(f"initial node of component {i} is not under the initial global state")

    @property
    def component_count(self) -> int:
        return len(self.components)

    def global_of(self, component: int, node: int) -> int:
        return self._global_of[component][node]

    def local_name(self, component: int, node: int) -> str:
        return self._local_of[component][node]

    def transplant_node(self, component: int, node: int, global_state: int) -> Optional[int]:
        """Same local node under another global state, None if it does not exist."""
        module = self.components[component].module_of(node)
        return self._by_local[component].get((module, self._local_of[component][node], global_state))

    def initial_configuration(self) -> GlobalConfiguration:
        return GlobalConfiguration(self.initial_global, self.initial_locals)


@dataclass
class ReachItem:
    round: int
    global_state: int
    automata: Tuple[ConfigAutomaton, ...]
    parked: Tuple[int, ...]  # global state each automaton's top nodes are stated under
    last: Optional[int] = None


@dataclass
class GlobalReachSet:
    crsm: Crsm
    k: int
    rounds: List[List[ReachItem]] = field(default_factory=list)
    post_star_calls: int = 0

    def items(self):
        for items in self.rounds:
            yield from items


# ============== Automaton surgery ==============

def restrict_to_global(crsm: Crsm, component: int, apost: ConfigAutomaton, global_state: int) -> Optional[ConfigAutomaton]:
    """Keep only configurations whose control node lies under global_state."""
    starts = sorted(q for q in apost.states if apost.is_initial(q)
                    and crsm.global_of(component, q[0]) == global_state)
    if not starts:
        return None
    return _copy_reachable(apost, {q: q for q in starts})


def transplant(crsm: Crsm, component: int, aut: ConfigAutomaton, source_global: int,
               target_global: int) -> Optional[ConfigAutomaton]:
    """
    Move the top nodes of every initial state from source_global to target_global.

    Interior states are shifted up one mark so the moved initial states can
    use mark 0 without colliding.
    """
    if source_global == target_global:
        return aut
    starts = {}
    for q in sorted(aut.initial):
        moved = crsm.transplant_node(component, q[0], target_global)
        if moved is not None:
            starts[q] = (moved, 0)
    if not starts:
        return None
    return _copy_reachable(aut, starts, shift=1)


def _copy_reachable(aut: ConfigAutomaton, starts: Dict[State, State], shift: int = 0) -> ConfigAutomaton:
    one = aut.semiring.one
    copy = ConfigAutomaton(aut.rsm)

    def inner(q: State) -> State:
        return (q[0], q[1] + shift)

    seen: Set[State] = set()
    queue = deque()

    def visit(q: State) -> State:
        mapped = inner(q)
        if q not in seen:
            seen.add(q)
            queue.append(q)
            copy.add_state(mapped, final=q in aut.final)
        return mapped

    for original, start in starts.items():
        copy.add_state(start, initial=True, final=original in aut.final)
        for target, weight in aut.epsilon_from(original, implicit=False):
            if weight == one:
                copy.set_epsilon(start, visit(target), one)
        for box, target, weight in aut.box_from(original):
            if weight == one:
                copy.set_box(start, box, visit(target), one)
    while queue:
        q = queue.popleft()
        source = inner(q)
        for target, weight in aut.epsilon_from(q, implicit=False):
            if weight == one:
                copy.set_epsilon(source, visit(target), one)
        for box, target, weight in aut.box_from(q):
            if weight == one:
                copy.set_box(source, box, visit(target), one)
    return copy


# ============== Driver ==============

def k_bounded_reach(crsm: Crsm, k: int, relaxation_cap: int = DEFAULT_RELAXATION_CAP) -> GlobalReachSet:
    if k < 1:
        raise ContextBoundError("context bound k must be at least 1")
    n = crsm.component_count
    g0 = crsm.initial_global
    start = ReachItem(
        round=0,
        global_state=g0,
        automata=tuple(singleton_automaton(crsm.components[i], crsm.initial_locals[i]) for i in range(n)),
        parked=(g0,) * n,
    )
    reach = GlobalReachSet(crsm=crsm, k=k, rounds=[[start]])
    frontier = [start]
    for round_ in range(1, k + 1):
        produced = []
        for item in frontier:
            for i in range(n):
                if i == item.last:
                    continue
                source = transplant(crsm, i, item.automata[i], item.parked[i], item.global_state)
                if source is None:
                    continue
                apost = post_star(crsm.components[i], source, relaxation_cap)
                reach.post_star_calls += 1
                for g in range(len(crsm.global_states)):
                    restricted = restrict_to_global(crsm, i, apost, g)
                    if restricted is None:
                        continue
                    automata = list(item.automata)
                    automata[i] = restricted
                    parked = list(item.parked)
                    parked[i] = g
                    produced.append(ReachItem(round_, g, tuple(automata), tuple(parked), last=i))
        reach.rounds.append(produced)
        frontier = produced
    return reach


def _check_global_configuration(crsm: Crsm, gc: GlobalConfiguration) -> None:
    if not 0 <= gc.global_state < len(crsm.global_states):
        raise ValueError(f"global state index {gc.global_state} out of range")
    if len(gc.locals) != crsm.component_count:
        raise ValueError(f"expected {crsm.component_count} local configurations, got {len(gc.locals)}")
    for i, c in enumerate(gc.locals):
        crsm.components[i].check_configuration(c)


def _locally_accepted(crsm: Crsm, item: ReachItem, component: int, c: Configuration) -> bool:
    node = crsm.transplant_node(component, c.node, item.parked[component])
    if node is None:
        return False
    return accepts(item.automata[component], Configuration(node, c.stack))


def is_global_config_reachable(reach: GlobalReachSet, gc: GlobalConfiguration) -> bool:
    crsm = reach.crsm
    _check_global_configuration(crsm, gc)
    if any(crsm.global_of(i, c.node) != gc.global_state for i, c in enumerate(gc.locals)):
        return False
    for item in reach.items():
        if item.global_state != gc.global_state:
            continue
        if all(_locally_accepted(crsm, item, i, c) for i, c in enumerate(gc.locals)):
            return True
    return False


def reachable_global_configs(reach: GlobalReachSet, max_height: int) -> Set[GlobalConfiguration]:
    """Every reachable global configuration whose stacks stay within max_height."""
    crsm = reach.crsm
    candidates = [all_configurations(rsm, max_height) for rsm in crsm.components]
    accepted_cache: Dict[Tuple[int, int, int], List[Configuration]] = {}
    result: Set[GlobalConfiguration] = set()
    for item in reach.items():
        g = item.global_state
        per_component = []
        for i, automaton in enumerate(item.automata):
            key = (id(automaton), item.parked[i], g)
            if key not in accepted_cache:
                accepted_cache[key] = [
                    c for c in candidates[i]
                    if crsm.global_of(i, c.node) == g and _locally_accepted(crsm, item, i, c)
                ]
            per_component.append(accepted_cache[key])
        combos = [()]
        for options in per_component:
            combos = [combo + (c,) for combo in combos for c in options]
        result.update(GlobalConfiguration(g, combo) for combo in combos)
    return result


# ============== Random instances ==============

def _product_module(name: str, entries, exits, internals, boxes, edges, states) -> ModuleDef:
    def expand(names):
        return tuple(f"{n}@{g}" for n in names for g in states)

    return ModuleDef(
        name=name,
        entries=expand(entries),
        exits=expand(exits),
        internals=expand(internals),
        boxes=tuple(boxes),
        transitions=tuple(TransitionDef(src, dst, True) for src, dst in edges),
    )


def random_crsm(seed: int, components: int = 2, max_globals: int = 3) -> Crsm:
    """
    Tiny random CRSM: each component has a main module calling one helper
    module (no recursion), four local nodes or fewer per module.
    """
    rng = random.Random(seed)
    states = tuple(f"g{j}" for j in range(rng.randint(1, max_globals)))
    rsms, initial = [], []
    for _ in range(components):
        main_internals = [f"m{k}" for k in range(rng.randint(1, 2))]
        helper_internals = [f"h{k}" for k in range(rng.randint(0, 1))]
        main_sources = ["s"] + main_internals + ["b.r"]
        main_targets = main_internals + ["x", "b.t"]
        helper_sources = ["t"] + helper_internals
        helper_targets = helper_internals + ["r"]

        def edges(sources, targets, count):
            chosen = set()
            for _ in range(count):
                src, dst = rng.choice(sources), rng.choice(targets)
                g = rng.choice(states)
                g2 = g if rng.random() < 0.6 else rng.choice(states)
                chosen.add((f"{src}@{g}", f"{dst}@{g2}"))
            return sorted(chosen)

        main = _product_module("Main", ["s"], ["x"], main_internals, [BoxDef("b", 1)],
                               edges(main_sources, main_targets, rng.randint(3, 7)), states)
        helper = _product_module("Helper", ["t"], ["r"], helper_internals, [],
                                 edges(helper_sources, helper_targets, rng.randint(1, 4)), states)
        rsm = Rsm(boolean_semiring(), [main, helper])
        rsms.append(rsm)
        initial.append(Configuration(rsm.node_id(0, f"s@{states[0]}"), ()))
    return Crsm(rsms, states, 0, initial)

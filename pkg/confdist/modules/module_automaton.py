"""
MODULE: module_automaton.py - WEIGHTED CONFIGURATION AUTOMATA

ROLE: Symbolic representation of regular configuration sets over an RSM

RESPONSIBILITIES:
  - States are (node, mark) pairs, transitions are ε or labeled by a box id
  - Every entry state carries an implicit ε-self-loop of weight one (never stored)
  - Transitions indexed by source and by target for both kinds
  - Acceptance weight: combine over accepting runs, run weight extended in reverse order
  - Builders for the singleton and module-entries languages
  - Structural checks, including the mark discipline of saturated automata
  - Deterministic DOT export

KEY FUNCTIONS:
  ConfigAutomaton(rsm) - mutable until freeze()
  accept_weight(aut, c) → weight
  singleton_automaton(rsm, c) / entries_automaton(rsm, module) → ConfigAutomaton
  validate_shape(aut) → ValidationReport
  dot_export(aut) → str
"""
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple

from confdist.core.errors import IllFormedConfigurationError
from confdist.modules.module_rsm import (
    CONFIG_KINDS, Configuration, NodeKind, Rsm, ValidationReport
)

State = Tuple[int, int]  # (node, mark)


@dataclass(frozen=True)
class AutTransition:
    source: State
    label: Optional[int]  # None for ε, otherwise a box id
    target: State
    weight: Any


class ConfigAutomaton:
    def __init__(self, rsm: Rsm, mark_count: int = 0):
        self.rsm = rsm
        self.semiring = rsm.semiring
        self.mark_count = mark_count
        self.fresh_mark: Optional[int] = None
        self.states: Set[State] = set()
        self.initial: Set[State] = set()
        self.final: Set[State] = set()
        self.frozen = False
        # filled by post_star
        self.summaries = None
        self.stats = None

        self._eps: Dict[State, Dict[State, Any]] = defaultdict(dict)
        self._eps_into: Dict[State, Dict[State, Any]] = defaultdict(dict)
        self._box: Dict[State, Dict[int, Dict[State, Any]]] = defaultdict(lambda: defaultdict(dict))
        self._box_into: Dict[State, Dict[int, Dict[State, Any]]] = defaultdict(lambda: defaultdict(dict))
        self._by_node: Dict[int, Set[State]] = defaultdict(set)

    # ============== Building ==============

    def add_state(self, q: State, initial: bool = False, final: bool = False) -> State:
        if q not in self.states:
            self.states.add(q)
            self._by_node[q[0]].add(q)
            if q[1] >= self.mark_count and q[1] != self.fresh_mark:
                self.mark_count = q[1] + 1
        if initial:
            self.initial.add(q)
        if final:
            self.final.add(q)
        return q

    def set_epsilon(self, source: State, target: State, weight) -> None:
        self.add_state(source)
        self.add_state(target)
        self._eps[source][target] = weight
        self._eps_into[target][source] = weight

    def set_box(self, source: State, box: int, target: State, weight) -> None:
        self.add_state(source)
        self.add_state(target)
        self._box[source][box][target] = weight
        self._box_into[target][box][source] = weight

    def freeze(self) -> "ConfigAutomaton":
        self.frozen = True
        return self

    def copy(self) -> "ConfigAutomaton":
        twin = ConfigAutomaton(self.rsm, self.mark_count)
        twin.fresh_mark = self.fresh_mark
        for q in self.states:
            twin.add_state(q, initial=q in self.initial, final=q in self.final)
        for t in self.transitions():
            if t.label is None:
                twin.set_epsilon(t.source, t.target, t.weight)
            else:
                twin.set_box(t.source, t.label, t.target, t.weight)
        return twin

    # ============== Queries ==============

    @property
    def marks(self) -> int:
        """Number of marks in use, the fresh one included."""
        return self.mark_count + (1 if self.fresh_mark is not None else 0)

    def is_entry_state(self, q: State) -> bool:
        return self.rsm.nodes[q[0]].kind is NodeKind.ENTRY

    def is_initial(self, q: State) -> bool:
        return q in self.initial or (self.fresh_mark is not None and q[1] == self.fresh_mark)

    def states_of_node(self, node: int) -> Set[State]:
        return self._by_node.get(node, set())

    def epsilon_weight(self, source: State, target: State):
        return self._eps.get(source, {}).get(target, self.semiring.zero)

    def box_weight(self, source: State, box: int, target: State):
        return self._box.get(source, {}).get(box, {}).get(target, self.semiring.zero)

    def epsilon_from(self, q: State, implicit: bool = True) -> Iterator[Tuple[State, Any]]:
        stored = self._eps.get(q, {})
        if implicit and self.is_entry_state(q) and q not in stored:
            yield q, self.semiring.one
        yield from stored.items()

    def epsilon_into(self, q: State) -> Dict[State, Any]:
        return self._eps_into.get(q, {})

    def box_from(self, q: State) -> Iterator[Tuple[int, State, Any]]:
        for box, targets in self._box.get(q, {}).items():
            for target, weight in targets.items():
                yield box, target, weight

    def box_targets(self, q: State, box: int) -> Dict[State, Any]:
        return self._box.get(q, {}).get(box, {})

    def box_into(self, q: State) -> Iterator[Tuple[int, State, Any]]:
        for box, sources in self._box_into.get(q, {}).items():
            for source, weight in sources.items():
                yield box, source, weight

    def transitions(self) -> List[AutTransition]:
        """Stored transitions in a stable order (implicit self-loops excluded)."""
        result = []
        for source in sorted(self._eps):
            for target in sorted(self._eps[source]):
                result.append(AutTransition(source, None, target, self._eps[source][target]))
        for source in sorted(self._box):
            for box in sorted(self._box[source]):
                for target in sorted(self._box[source][box]):
                    result.append(AutTransition(source, box, target, self._box[source][box][target]))
        return result

    @property
    def transition_count(self) -> int:
        eps = sum(len(t) for t in self._eps.values())
        box = sum(len(t) for targets in self._box.values() for t in targets.values())
        return eps + box


# ============== Acceptance ==============

def _epsilon_closure(aut: ConfigAutomaton, frontier: Dict[State, Any]) -> Dict[State, Any]:
    sr = aut.semiring
    queue = deque(frontier)
    queued = set(frontier)
    while queue:
        q = queue.popleft()
        queued.discard(q)
        fq = frontier[q]
        for target, weight in aut.epsilon_from(q, implicit=False):
            candidate = sr.extend(weight, fq)
            current = frontier.get(target, sr.zero)
            merged = sr.combine(current, candidate)
            if merged != current:
                frontier[target] = merged
                if target not in queued:
                    queued.add(target)
                    queue.append(target)
    return frontier


def accept_weight(aut: ConfigAutomaton, c: Configuration):
    """
    A(c): combine over all runs from an initial (c.node, m) state spelling c's
    stack and ending in a final state. Runs of weight zero change nothing.
    """
    aut.rsm.check_configuration(c)
    sr = aut.semiring
    frontier = {q: sr.one for q in aut.states_of_node(c.node) if aut.is_initial(q)}
    frontier = _epsilon_closure(aut, frontier)
    for box in c.stack:
        moved: Dict[State, Any] = {}
        for q, fq in frontier.items():
            for target, weight in aut.box_targets(q, box).items():
                moved[target] = sr.combine(moved.get(target, sr.zero), sr.extend(weight, fq))
        frontier = _epsilon_closure(aut, moved)
        if not frontier:
            return sr.zero
    result = sr.zero
    for q, fq in frontier.items():
        if q in aut.final:
            result = sr.combine(result, fq)
    return result


def accepts(aut: ConfigAutomaton, c: Configuration) -> bool:
    return accept_weight(aut, c) != aut.semiring.zero


# ============== Builders ==============

def _first_entry(rsm: Rsm, module: int) -> int:
    if not rsm.entries[module]:
        raise IllFormedConfigurationError(
            f"module '{rsm.modules[module].name}' has no entry node to anchor the stack on")
    return rsm.entries[module][0]


def singleton_automaton(rsm: Rsm, c: Configuration) -> ConfigAutomaton:
    """Automaton whose language is exactly {c}; all weights one."""
    rsm.check_configuration(c)
    aut = ConfigAutomaton(rsm, mark_count=len(c.stack) + 1)
    start = aut.add_state((c.node, 0), initial=True)
    if rsm.kind(c.node) is NodeKind.ENTRY:
        current = start
    else:
        current = (_first_entry(rsm, rsm.module_of(c.node)), 0)
        aut.set_epsilon(start, current, rsm.semiring.one)
    for level, box in enumerate(c.stack, start=1):
        target = (_first_entry(rsm, rsm.boxes[box].module), level)
        aut.set_box(current, box, target, rsm.semiring.one)
        current = target
    aut.add_state(current, final=True)
    return aut


def entries_automaton(rsm: Rsm, module: int) -> ConfigAutomaton:
    """Language {⟨e, ε⟩ : e entry of module}."""
    if not 0 <= module < rsm.module_count:
        raise IndexError(f"module index {module} out of range")
    aut = ConfigAutomaton(rsm, mark_count=1)
    for entry in rsm.entries[module]:
        aut.add_state((entry, 0), initial=True, final=True)
    return aut


# ============== Structure ==============

def validate_shape(aut: ConfigAutomaton) -> ValidationReport:
    rsm = aut.rsm
    report = ValidationReport()

    def name(q: State) -> str:
        return f"({rsm.node_name(q[0])},{q[1]})"

    for q in sorted(aut.states):
        if not 0 <= q[0] < len(rsm.nodes):
            report.violations.append(f"state {q} holds an unknown node")
        elif rsm.kind(q[0]) not in CONFIG_KINDS:
            report.violations.append(f"state {name(q)} holds a {rsm.kind(q[0]).value} node")
    for q in sorted(aut.final):
        if not aut.is_entry_state(q):
            report.violations.append(f"final state {name(q)} does not hold an entry node")
    if report.violations:
        return report

    fresh = aut.fresh_mark
    for t in aut.transitions():
        src, dst = t.source, t.target
        where = f"{name(src)} -{'ε' if t.label is None else rsm.box_name(t.label)}-> {name(dst)}"
        if t.label is None:
            if rsm.kind(dst[0]) is not NodeKind.ENTRY:
                report.violations.append(f"ε-transition {where}: target is not an entry")
            elif rsm.module_of(src[0]) != rsm.module_of(dst[0]):
                report.violations.append(f"ε-transition {where}: source and target in different modules")
            elif rsm.kind(src[0]) is NodeKind.ENTRY and src[0] != dst[0]:
                report.violations.append(f"ε-transition {where}: entry source must equal its target node")
        else:
            box = rsm.boxes[t.label]
            if rsm.kind(src[0]) is not NodeKind.ENTRY or rsm.module_of(src[0]) != box.callee:
                report.violations.append(f"b-transition {where}: source is not an entry of the callee")
            if rsm.kind(dst[0]) is not NodeKind.ENTRY or rsm.module_of(dst[0]) != box.module:
                report.violations.append(f"b-transition {where}: target is not an entry of the box's module")
        if fresh is not None and src[1] != fresh and dst[1] == fresh:
            report.violations.append(f"transition {where} switches from an old mark to the fresh mark")
    if fresh is not None:
        for q in sorted(aut.final):
            if q[1] == fresh:
                report.violations.append(f"final state {name(q)} carries the fresh mark")
    return report


def dot_export(aut: ConfigAutomaton) -> str:
    rsm, sr = aut.rsm, aut.semiring

    def ident(q: State) -> str:
        return f"\"{q[0]}/{q[1]}\""

    lines = ["digraph confdist {", "  rankdir=LR;"]
    for q in sorted(aut.states):
        shape = "doublecircle" if q in aut.final else "circle"
        style = ", style=bold" if aut.is_initial(q) else ""
        lines.append(f"  {ident(q)} [label=\"({rsm.node_name(q[0])},{q[1]})\", shape={shape}{style}];")
    for t in aut.transitions():
        label = "ε" if t.label is None else rsm.box_name(t.label)
        lines.append(f"  {ident(t.source)} -> {ident(t.target)} [label=\"{label}/{sr.format_weight(t.weight)}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""
MODULE: module_confdist.py - POST* SATURATION WITH ENTRY-TO-EXIT SUMMARIES

ROLE: Turns a configuration automaton A into A_post*, which assigns every
configuration its distance from L(A)

ALGORITHM:
  - One fresh mark m̂; fresh states are created on the fly and are all initial
  - FIFO worklist of transitions, absent transition = weight zero
  - ε-transition (u,m)→(e,m'), weight w:
      internal u→u'      relax (u',m̂)→ε(e,m')        with w ⊗ w(u,u')
      call u→(b,e')      relax (e',m̂)→b(e,m')         with w ⊗ w(u,(b,e')), queue self-loop of (e',m̂) once
      exit u→x           sum((e,m'),x) ⊕= w, then for every (e,m')→b(e'',m''):
                         relax ((b,x),m̂)→ε(e'',m'')  with v ⊗ sum
  - b-transition (e,m̂)→b(e',m'), weight w:
      every exit x of e's module: relax ((b,x),m̂)→ε(e',m') with w ⊗ sum((e,m̂),x)

KEY FUNCTIONS:
  post_star(rsm, aut, relaxation_cap, stats) → ConfigAutomaton
  summaries(apost) → SummaryTable

INPUT:
  ε-moves (e,m)→(e,m') between entry states are folded away before saturating

ERRORS:
  AutomatonShapeError - RSM not normalized, non-one input weight, bad shape
  NonTerminationError - a transition relaxed more than relaxation_cap times
"""
from collections import deque
from typing import Any, Dict, Iterator, Optional, Tuple

from confdist.core.constants import DEFAULT_RELAXATION_CAP
from confdist.core.errors import AutomatonShapeError, NonTerminationError
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import ConfigAutomaton, State, validate_shape
from confdist.modules.module_rsm import Rsm
from confdist.modules.module_semiring import counting

TransitionKey = Tuple[State, Optional[int], State]  # (source, box or None, target)


class SummaryTable:
    """sum((entry, mark), exit), zero when absent."""

    def __init__(self, zero):
        self.zero = zero
        self._values: Dict[Tuple[State, int], Any] = {}

    def get(self, entry_state: State, exit_node: int):
        return self._values.get((entry_state, exit_node), self.zero)

    def set(self, entry_state: State, exit_node: int, value) -> None:
        self._values[(entry_state, exit_node)] = value

    def items(self) -> Iterator[Tuple[Tuple[State, int], Any]]:
        return iter(sorted(self._values.items(), key=lambda kv: kv[0]))

    def __len__(self) -> int:
        return len(self._values)


def fold_entry_epsilons(aut: ConfigAutomaton) -> ConfigAutomaton:
    """
    Copy of aut without ε-moves between entry states.

    An entry state gains the b-transitions and finality of every entry state it
    reaches through such moves, so the language is unchanged and each entry
    state sees all the callers it stands for.
    """
    sr = aut.semiring
    folded = ConfigAutomaton(aut.rsm, aut.mark_count)
    folded.fresh_mark = aut.fresh_mark
    for q in aut.states:
        folded.add_state(q, initial=q in aut.initial, final=q in aut.final)
    for t in aut.transitions():
        if t.label is not None:
            folded.set_box(t.source, t.label, t.target, t.weight)
        elif not aut.is_entry_state(t.source):
            folded.set_epsilon(t.source, t.target, t.weight)

    for q in sorted(aut.states):
        if not aut.is_entry_state(q):
            continue
        reached, queue = {q}, deque([q])
        while queue:
            for target, _ in aut.epsilon_from(queue.popleft(), implicit=False):
                if target not in reached:
                    reached.add(target)
                    queue.append(target)
        for other in sorted(reached - {q}):
            if other in aut.final:
                folded.add_state(q, final=True)
            for box, target, weight in aut.box_from(other):
                folded.set_box(q, box, target, sr.combine(folded.box_weight(q, box, target), weight))
    return folded


class ConfDistEngine:
    def __init__(self, rsm: Rsm, aut: ConfigAutomaton, relaxation_cap: int = DEFAULT_RELAXATION_CAP,
                 stats: Optional[EngineStats] = None):
        self.rsm = rsm
        self.stats = stats if stats is not None else EngineStats()
        self.sr = counting(rsm.semiring, stats) if stats is not None else rsm.semiring
        self.relaxation_cap = relaxation_cap
        self.result = fold_entry_epsilons(aut)
        self.fresh = aut.mark_count
        self.result.fresh_mark = self.fresh
        self.sums = SummaryTable(self.sr.zero)
        self.worklist: deque = deque()
        self.queued: set = set()
        self.self_loops_added: set = set()

    # ============== Weights ==============

    def weight(self, key: TransitionKey):
        source, box, target = key
        if box is None:
            if source == target and self.result.is_entry_state(source):
                return self.sr.one
            return self.result.epsilon_weight(source, target)
        return self.result.box_weight(source, box, target)

    def _enqueue(self, key: TransitionKey) -> None:
        if key not in self.queued:
            self.queued.add(key)
            self.worklist.append(key)

    def relax(self, key: TransitionKey, value) -> bool:
        """w(t) := w(t) ⊕ value; queue t when its weight strictly decreased."""
        sr = self.sr
        if value == sr.zero:
            return False
        current = self.weight(key)
        merged = sr.combine(current, value)
        if merged == current:
            return False
        source, box, target = key
        if box is None:
            self.result.set_epsilon(source, target, merged)
        else:
            self.result.set_box(source, box, target, merged)
        if source[1] == self.fresh:
            self.result.add_state(source, initial=True)
        self.stats.relaxations += 1
        self.stats.per_transition[key] += 1
        if self.stats.per_transition[key] > self.relaxation_cap:
            raise NonTerminationError(
                f"transition {self._describe(key)} relaxed more than {self.relaxation_cap} times; "
                f"the semiring '{self.sr.name}' seems to admit infinite descending chains")
        self._enqueue(key)
        return True

    def _describe(self, key: TransitionKey) -> str:
        source, box, target = key
        label = "ε" if box is None else self.rsm.box_name(box)
        return (f"({self.rsm.node_name(source[0])},{source[1]}) -{label}-> "
                f"({self.rsm.node_name(target[0])},{target[1]})")

    # ============== Saturation ==============

    def _queue_self_loop(self, state: State) -> None:
        if state not in self.self_loops_added:
            self.self_loops_added.add(state)
            self.result.add_state(state, initial=state[1] == self.fresh)
            self._enqueue((state, None, state))

    def run(self) -> ConfigAutomaton:
        result = self.result
        for q in sorted(result.initial):
            for target, weight in list(result.epsilon_from(q, implicit=False)):
                if weight == self.sr.one:
                    self._enqueue((q, None, target))
            if result.is_entry_state(q):
                self._queue_self_loop(q)

        while self.worklist:
            key = self.worklist.popleft()
            self.queued.discard(key)
            self.stats.worklist_pops += 1
            if key[1] is None:
                self._process_epsilon(key)
            else:
                self._process_box(key)

        result.summaries = self.sums
        result.stats = self.stats
        return result.freeze()

    def _process_epsilon(self, key: TransitionKey) -> None:
        (u, _), _, entry_state = key
        rsm, sr, fresh = self.rsm, self.sr, self.fresh
        w = self.weight(key)
        for target, wt in rsm.out_internal.get(u, ()):
            self.relax(((target, fresh), None, entry_state), sr.extend(w, wt))
        for box, callee_entry, wt in rsm.out_call.get(u, ()):
            self.relax(((callee_entry, fresh), box, entry_state), sr.extend(w, wt))
            self._queue_self_loop((callee_entry, fresh))
        for exit_node, wt in rsm.out_exit.get(u, ()):
            current = self.sums.get(entry_state, exit_node)
            merged = sr.combine(current, sr.extend(w, wt))
            if merged == current:
                continue
            self.sums.set(entry_state, exit_node, merged)
            for box, caller_state, v in list(self.result.box_from(entry_state)):
                return_node = rsm.return_node[(box, exit_node)]
                self.relax(((return_node, fresh), None, caller_state), sr.extend(v, merged))

    def _process_box(self, key: TransitionKey) -> None:
        entry_state, box, caller_state = key
        rsm, sr, fresh = self.rsm, self.sr, self.fresh
        w = self.weight(key)
        for exit_node in rsm.exits[rsm.module_of(entry_state[0])]:
            summary = self.sums.get(entry_state, exit_node)
            if summary == sr.zero:
                continue
            return_node = rsm.return_node[(box, exit_node)]
            self.relax(((return_node, fresh), None, caller_state), sr.extend(w, summary))


def check_post_star_input(rsm: Rsm, aut: ConfigAutomaton) -> None:
    if aut.rsm is not rsm:
        raise AutomatonShapeError("automaton was built for a different RSM")
    if not rsm.is_normalized():
        raise AutomatonShapeError("RSM has non-one weights into exit nodes; run normalize_exit_weights first")
    if aut.fresh_mark is not None:
        raise AutomatonShapeError("input automaton is already saturated")
    one = rsm.semiring.one
    for t in aut.transitions():
        if t.weight != one:
            raise AutomatonShapeError("every input transition must carry weight one")
    report = validate_shape(aut)
    if not report.ok:
        raise AutomatonShapeError("input automaton is malformed: " + "; ".join(report.violations))


def post_star(rsm: Rsm, aut: ConfigAutomaton, relaxation_cap: int = DEFAULT_RELAXATION_CAP,
              stats: Optional[EngineStats] = None) -> ConfigAutomaton:
    """
    Saturate aut. The result is frozen and carries .summaries and .stats.

    Pass an EngineStats to also count semiring operations.
    """
    check_post_star_input(rsm, aut)
    return ConfDistEngine(rsm, aut, relaxation_cap, stats).run()


def summaries(apost: ConfigAutomaton) -> SummaryTable:
    if apost.summaries is None:
        raise ValueError("automaton was not produced by post_star")
    return apost.summaries


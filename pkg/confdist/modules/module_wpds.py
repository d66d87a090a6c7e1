"""
MODULE: module_wpds.py - WEIGHTED PUSHDOWN BASELINE

ROLE: Translates an RSM into a weighted pushdown system and saturates
P-automata with the classical post* procedure (no RSM summaries)

TRANSLATION:
  control states   p (0) and one state per exit position j (1 + j)
  stack symbols    control nodes, then one symbol per box
  internal u→u'    ⟨p,u⟩ → ⟨p,u'⟩
  call u→(b,e)     ⟨p,u⟩ → ⟨p,e b⟩
  exit u→x_j       ⟨p,u⟩ → ⟨p_j,ε⟩
  return           ⟨p_j,b⟩ → ⟨p,(b,x_j)⟩ with weight one
  ⟨u, b1…br⟩ corresponds to ⟨p, u b1…br⟩

SATURATION:
  - one mid state per push rule, never shared between rules with the same
    head (p', γ')
  - ε-transitions leave control states only and are composed with the
    transitions leaving their target

KEY FUNCTIONS:
  rsm_to_wpds(rsm) → (Wpds, Correspondence)
  singleton_pautomaton(wpds, corr, c) → PAutomaton
  wpds_post_star(wpds, init) → PAutomaton
  pds_accept_weight(pa, control, word) → weight
"""
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from confdist.core.constants import DEFAULT_RELAXATION_CAP
from confdist.core.errors import NonTerminationError
from confdist.core.state import EngineStats
from confdist.modules.module_rsm import Configuration, Rsm
from confdist.modules.module_semiring import Semiring, counting

NORMAL = 0


@dataclass(frozen=True, eq=False)
class Rule:
    control: int
    symbol: int
    new_control: int
    push: Tuple[int, ...]  # new top first, length 0, 1 or 2
    weight: Any


@dataclass
class Wpds:
    semiring: Semiring
    control_count: int
    symbol_names: List[str]
    rules: List[Rule] = field(default_factory=list)
    by_head: Dict[Tuple[int, int], List[Rule]] = field(default_factory=lambda: defaultdict(list))

    def add_rule(self, rule: Rule) -> None:
        self.rules.append(rule)
        self.by_head[(rule.control, rule.symbol)].append(rule)

    def push_rules(self) -> List[Rule]:
        return [r for r in self.rules if len(r.push) == 2]


@dataclass
class Correspondence:
    """Maps RSM configurations onto PDS configurations and back."""
    rsm: Rsm
    box_offset: int

    def box_symbol(self, box: int) -> int:
        return self.box_offset + box

    def to_pds(self, c: Configuration) -> Tuple[int, Tuple[int, ...]]:
        return NORMAL, (c.node,) + tuple(self.box_symbol(b) for b in c.stack)

    def to_rsm(self, control: int, word: Sequence[int]) -> Optional[Configuration]:
        if control != NORMAL or not word or word[0] >= self.box_offset:
            return None
        stack = tuple(symbol - self.box_offset for symbol in word[1:])
        if any(b < 0 for b in stack):
            return None
        c = Configuration(word[0], stack)
        return c if self.rsm.is_well_formed(c) else None


def rsm_to_wpds(rsm: Rsm) -> Tuple[Wpds, Correspondence]:
    box_offset = len(rsm.nodes)
    names = [rsm.qualified_name(n) for n in range(len(rsm.nodes))]
    names += [rsm.qualified_box_name(b) for b in range(len(rsm.boxes))]
    wpds = Wpds(rsm.semiring, control_count=1 + rsm.theta_exits, symbol_names=names)
    corr = Correspondence(rsm, box_offset)
    exit_position = {x: j for exits in rsm.exits for j, x in enumerate(exits)}

    for u in rsm.config_nodes():
        for target, w in rsm.out_internal.get(u, ()):
            wpds.add_rule(Rule(NORMAL, u, NORMAL, (target,), w))
        for box, entry, w in rsm.out_call.get(u, ()):
            wpds.add_rule(Rule(NORMAL, u, NORMAL, (entry, corr.box_symbol(box)), w))
        for exit_node, w in rsm.out_exit.get(u, ()):
            wpds.add_rule(Rule(NORMAL, u, 1 + exit_position[exit_node], (), w))
    for (box, exit_node), return_node in sorted(rsm.return_node.items()):
        wpds.add_rule(Rule(1 + exit_position[exit_node], corr.box_symbol(box), NORMAL, (return_node,),
                           rsm.semiring.one))
    return wpds, corr


class PAutomaton:
    """States 0..control_count-1 are the control states; symbol None is ε."""

    def __init__(self, wpds: Wpds):
        self.wpds = wpds
        self.semiring = wpds.semiring
        self.state_count = wpds.control_count
        self.final: set = set()
        self.out: Dict[int, Dict[Tuple[Optional[int], int], Any]] = defaultdict(dict)
        self.eps_into: Dict[int, Dict[int, Any]] = defaultdict(dict)
        self.stats: Optional[EngineStats] = None

    def new_state(self) -> int:
        self.state_count += 1
        return self.state_count - 1

    def is_control(self, q: int) -> bool:
        return q < self.wpds.control_count

    def weight(self, source: int, symbol: Optional[int], target: int):
        return self.out.get(source, {}).get((symbol, target), self.semiring.zero)

    def set(self, source: int, symbol: Optional[int], target: int, weight) -> None:
        self.out[source][(symbol, target)] = weight
        if symbol is None:
            self.eps_into[target][source] = weight

    def transitions(self) -> List[Tuple[int, Optional[int], int, Any]]:
        result = []
        for source in sorted(self.out):
            for (symbol, target), weight in self.out[source].items():
                result.append((source, symbol, target, weight))
        return result

    @property
    def transition_count(self) -> int:
        return sum(len(t) for t in self.out.values())

    def copy(self) -> "PAutomaton":
        twin = PAutomaton(self.wpds)
        twin.state_count = self.state_count
        twin.final = set(self.final)
        for source, symbol, target, weight in self.transitions():
            twin.set(source, symbol, target, weight)
        return twin


def singleton_pautomaton(wpds: Wpds, corr: Correspondence, c: Configuration) -> PAutomaton:
    corr.rsm.check_configuration(c)
    control, word = corr.to_pds(c)
    pa = PAutomaton(wpds)
    current = control
    for symbol in word:
        target = pa.new_state()
        pa.set(current, symbol, target, wpds.semiring.one)
        current = target
    pa.final.add(current)
    return pa


class PostStarSaturation:
    def __init__(self, wpds: Wpds, init: PAutomaton, relaxation_cap: int, stats: Optional[EngineStats]):
        self.wpds = wpds
        self.stats = stats if stats is not None else EngineStats()
        self.sr = counting(wpds.semiring, stats) if stats is not None else wpds.semiring
        self.cap = relaxation_cap
        self.pa = init.copy()
        self.mid = {rule: self.pa.new_state() for rule in wpds.push_rules()}
        self.worklist: deque = deque()
        self.queued: set = set()

    def _enqueue(self, key) -> None:
        if key not in self.queued:
            self.queued.add(key)
            self.worklist.append(key)

    def relax(self, source: int, symbol: Optional[int], target: int, value) -> None:
        sr = self.sr
        if value == sr.zero:
            return
        current = self.pa.weight(source, symbol, target)
        merged = sr.combine(current, value)
        if merged == current:
            return
        self.pa.set(source, symbol, target, merged)
        key = (source, symbol, target)
        self.stats.relaxations += 1
        self.stats.per_transition[key] += 1
        if self.stats.per_transition[key] > self.cap:
            raise NonTerminationError(f"P-automaton transition {key} relaxed more than {self.cap} times")
        self._enqueue(key)

    def run(self) -> PAutomaton:
        for source, symbol, target, _ in self.pa.transitions():
            self._enqueue((source, symbol, target))
        while self.worklist:
            key = self.worklist.popleft()
            self.queued.discard(key)
            self.stats.worklist_pops += 1
            source, symbol, target = key
            weight = self.pa.weight(source, symbol, target)
            if symbol is None:
                self._compose_epsilon(source, target, weight)
                continue
            for p, l_eps in list(self.pa.eps_into.get(source, {}).items()):
                self.relax(p, symbol, target, self.sr.extend(weight, l_eps))
            if self.pa.is_control(source):
                self._apply_rules(source, symbol, target, weight)
        self.pa.stats = self.stats
        return self.pa

    def _compose_epsilon(self, control: int, target: int, l_eps) -> None:
        for (symbol, beyond), weight in list(self.pa.out.get(target, {}).items()):
            if symbol is not None:
                self.relax(control, symbol, beyond, self.sr.extend(weight, l_eps))

    def _apply_rules(self, control: int, symbol: int, target: int, weight) -> None:
        sr = self.sr
        for rule in self.wpds.by_head.get((control, symbol), ()):
            value = sr.extend(weight, rule.weight)
            if not rule.push:
                self.relax(rule.new_control, None, target, value)
            elif len(rule.push) == 1:
                self.relax(rule.new_control, rule.push[0], target, value)
            else:
                middle = self.mid[rule]
                self.relax(rule.new_control, rule.push[0], middle, sr.one)
                self.relax(middle, rule.push[1], target, value)


def wpds_post_star(wpds: Wpds, init: PAutomaton, relaxation_cap: int = DEFAULT_RELAXATION_CAP,
                   stats: Optional[EngineStats] = None) -> PAutomaton:
    return PostStarSaturation(wpds, init, relaxation_cap, stats).run()


def pds_accept_weight(pa: PAutomaton, control: int, word: Sequence[int]):
    sr = pa.semiring

    def closure(frontier):
        queue = deque(frontier)
        while queue:
            q = queue.popleft()
            for (symbol, target), weight in pa.out.get(q, {}).items():
                if symbol is not None:
                    continue
                current = frontier.get(target, sr.zero)
                merged = sr.combine(current, sr.extend(weight, frontier[q]))
                if merged != current:
                    frontier[target] = merged
                    queue.append(target)
        return frontier

    frontier = closure({control: sr.one})
    for symbol in word:
        moved = {}
        for q, fq in frontier.items():
            for (label, target), weight in pa.out.get(q, {}).items():
                if label == symbol:
                    moved[target] = sr.combine(moved.get(target, sr.zero), sr.extend(weight, fq))
        frontier = closure(moved)
        if not frontier:
            return sr.zero
    result = sr.zero
    for q, fq in frontier.items():
        if q in pa.final:
            result = sr.combine(result, fq)
    return result


def rsm_accept_weight(pa: PAutomaton, corr: Correspondence, c: Configuration):
    control, word = corr.to_pds(c)
    return pds_accept_weight(pa, control, word)

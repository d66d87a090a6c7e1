"""
MODULE: module_extraction.py - DISTANCE QUERIES OVER A SATURATED AUTOMATON

ROLE: Reads configuration, superconfiguration, node and same-context
distances out of A_post*

KEY FUNCTIONS:
  config_distance(apost, c) → weight
    - ε-step from the initial states of c.node, one frontier fold per box,
      combine over final states
  superconfig_automaton(apost) → ModuleAutomaton
    - box labels replaced by the module owning the box, parallel weights combined
  superconfig_distance(maut, sc) → weight
  node_distances(apost) → {node: weight}
    - backward single-source relaxation from the final states
  same_context_distances(rsm) → {(module, node): weight}
    - one post* per module from its entries
  block_precompute(maut, rsm, z) → BlockTable
  superconfig_distance_blocked(maut, table, sc) → weight

NOTES:
  - Frontiers are dicts state → weight, absent means zero
  - Frontier updates extend on the left: new = w(t) ⊗ old
"""
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from confdist.core.constants import BLOCK_BUDGET, DEFAULT_RELAXATION_CAP
from confdist.core.errors import BudgetExceededError, IllFormedConfigurationError
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import ConfigAutomaton, State, entries_automaton
from confdist.modules.module_confdist import post_star
from confdist.modules.module_rsm import CONFIG_KINDS, Configuration, Rsm, Superconfiguration
from confdist.modules.module_semiring import Semiring, counting

Frontier = Dict[State, Any]
Matrix = Dict[State, Dict[State, Any]]


def _semiring(apost: ConfigAutomaton, stats: Optional[EngineStats]) -> Semiring:
    return counting(apost.semiring, stats) if stats is not None else apost.semiring


def _initial_frontier(apost: ConfigAutomaton, node: int, sr: Semiring) -> Frontier:
    frontier: Frontier = {}
    for q in sorted(apost.states_of_node(node)):
        if not apost.is_initial(q):
            continue
        for target, weight in apost.epsilon_from(q):
            frontier[target] = sr.combine(frontier.get(target, sr.zero), weight)
    return frontier


def _fold(frontier: Frontier, targets: Callable[[State], Dict[State, Any]], sr: Semiring) -> Frontier:
    """Advance every frontier state along targets(q), extending weights in reverse."""
    moved: Frontier = {}
    for q, fq in frontier.items():
        for target, weight in targets(q).items():
            moved[target] = sr.combine(moved.get(target, sr.zero), sr.extend(weight, fq))
    return moved


def _finish(apost: ConfigAutomaton, frontier: Frontier, sr: Semiring):
    result = sr.zero
    for q, fq in frontier.items():
        if q in apost.final:
            result = sr.combine(result, fq)
    return result


# ============== Configurations ==============

def config_distance(apost: ConfigAutomaton, c: Configuration, stats: Optional[EngineStats] = None):
    apost.rsm.check_configuration(c)
    sr = _semiring(apost, stats)
    frontier = _initial_frontier(apost, c.node, sr)
    for box in c.stack:
        if not frontier:
            return sr.zero
        frontier = _fold(frontier, lambda q: apost.box_targets(q, box), sr)
    return _finish(apost, frontier, sr)


# ============== Superconfigurations ==============

class ModuleAutomaton:
    """A_post* with every box label replaced by the module that owns the box."""

    def __init__(self, apost: ConfigAutomaton):
        self.apost = apost
        self.rsm = apost.rsm
        self.moves: Dict[State, Dict[int, Dict[State, Any]]] = defaultdict(lambda: defaultdict(dict))

    def add(self, source: State, module: int, target: State, weight) -> None:
        sr = self.apost.semiring
        row = self.moves[source][module]
        row[target] = sr.combine(row.get(target, sr.zero), weight)

    def targets(self, source: State, module: int) -> Dict[State, Any]:
        return self.moves.get(source, {}).get(module, {})

    @property
    def transition_count(self) -> int:
        return sum(len(row) for rows in self.moves.values() for row in rows.values())


def superconfig_automaton(apost: ConfigAutomaton) -> ModuleAutomaton:
    maut = ModuleAutomaton(apost)
    rsm = apost.rsm
    for t in apost.transitions():
        if t.label is not None:
            maut.add(t.source, rsm.boxes[t.label].module, t.target, t.weight)
    return maut


def _check_super_node(rsm: Rsm, sc: Superconfiguration) -> None:
    if not 0 <= sc.node < len(rsm.nodes) or rsm.kind(sc.node) not in CONFIG_KINDS:
        raise IllFormedConfigurationError(f"node id {sc.node} cannot hold control")


def superconfig_distance(maut: ModuleAutomaton, sc: Superconfiguration, stats: Optional[EngineStats] = None):
    """Combine of config_distance over every stack refining sc.module_stack."""
    _check_super_node(maut.rsm, sc)
    sr = _semiring(maut.apost, stats)
    frontier = _initial_frontier(maut.apost, sc.node, sr)
    for module in sc.module_stack:
        if not frontier:
            return sr.zero
        frontier = _fold(frontier, lambda q: maut.targets(q, module), sr)
    return _finish(maut.apost, frontier, sr)


# ============== Node and same-context distances ==============

def node_distances(apost: ConfigAutomaton) -> Dict[int, Any]:
    """dist(u) = combine of A(⟨u,S⟩) over every stack S, for every control node u."""
    sr = apost.semiring
    back: Dict[State, Any] = {q: sr.one for q in apost.final}
    queue = deque(sorted(back))
    queued = set(queue)
    while queue:
        q = queue.popleft()
        queued.discard(q)
        bq = back[q]
        incoming = [(source, w) for source, w in apost.epsilon_into(q).items()]
        incoming.extend((source, w) for _, source, w in apost.box_into(q))
        for source, weight in incoming:
            candidate = sr.extend(bq, weight)
            current = back.get(source, sr.zero)
            merged = sr.combine(current, candidate)
            if merged != current:
                back[source] = merged
                if source not in queued:
                    queued.add(source)
                    queue.append(source)

    distances = {node: sr.zero for node in apost.rsm.config_nodes()}
    for q, value in back.items():
        if apost.is_initial(q):
            distances[q[0]] = sr.combine(distances[q[0]], value)
    return distances


def same_context_distances(rsm: Rsm, relaxation_cap: int = DEFAULT_RELAXATION_CAP) -> Dict[Tuple[int, int], Any]:
    sr = rsm.semiring
    result: Dict[Tuple[int, int], Any] = {}
    for module in range(rsm.module_count):
        nodes = [n for n in rsm.config_nodes() if rsm.module_of(n) == module]
        if not rsm.entries[module]:
            result.update({(module, n): sr.zero for n in nodes})
            continue
        apost = post_star(rsm, entries_automaton(rsm, module), relaxation_cap)
        for node in nodes:
            result[(module, node)] = config_distance(apost, Configuration(node, ()))
    return result


# ============== Sparse block precomputation ==============

@dataclass
class BlockTable:
    z: int
    index: Dict[Tuple[int, ...], int] = field(default_factory=dict)
    matrices: List[Matrix] = field(default_factory=list)

    def matrix(self, sequence: Sequence[int]) -> Optional[Matrix]:
        slot = self.index.get(tuple(sequence))
        return None if slot is None else self.matrices[slot]

    def __len__(self) -> int:
        return len(self.matrices)


def valid_module_sequences(rsm: Rsm, length: int) -> List[Tuple[int, ...]]:
    """Sequences M0..M(length-1) where each module is called by the next one."""
    graph = rsm.call_graph()
    sequences = [(m,) for m in range(rsm.module_count)]
    for _ in range(length - 1):
        sequences = [seq + (caller,) for seq in sequences for caller in sorted(graph.predecessors(seq[-1]))]
    return sequences


def block_precompute(maut: ModuleAutomaton, rsm: Rsm, z: int, budget: int = BLOCK_BUDGET) -> BlockTable:
    if z < 1:
        raise ValueError("block size z must be at least 1")
    graph = rsm.call_graph()
    fanout = max((graph.in_degree(m) for m in graph.nodes), default=0)
    bound = rsm.module_count * max(fanout, 1) ** z
    if bound > budget:
        raise BudgetExceededError(
            f"{rsm.module_count}·{fanout}^{z} = {bound} module sequences exceed the budget of {budget}")

    sr = maut.apost.semiring
    sources_by_module: Dict[int, List[State]] = defaultdict(list)
    for source in sorted(maut.moves):
        sources_by_module[rsm.module_of(source[0])].append(source)

    table = BlockTable(z=z)
    for sequence in valid_module_sequences(rsm, z + 1):
        matrix: Matrix = {}
        for source in sources_by_module.get(sequence[0], ()):
            row: Frontier = {source: sr.one}
            for module in sequence[1:]:
                row = _fold(row, lambda q: maut.targets(q, module), sr)
                if not row:
                    break
            if row:
                matrix[source] = row
        table.index[sequence] = len(table.matrices)
        table.matrices.append(matrix)
    return table


def superconfig_distance_blocked(maut: ModuleAutomaton, table: BlockTable, sc: Superconfiguration):
    labels = tuple(sc.module_stack)
    if len(labels) < table.z:
        return superconfig_distance(maut, sc)
    _check_super_node(maut.rsm, sc)
    sr = maut.apost.semiring
    frontier = _initial_frontier(maut.apost, sc.node, sr)
    current = maut.rsm.module_of(sc.node)
    position = 0
    while position + table.z <= len(labels):
        matrix = table.matrix((current,) + labels[position:position + table.z])
        if matrix is None:
            return sr.zero
        moved: Frontier = {}
        for q, fq in frontier.items():
            for target, weight in matrix.get(q, {}).items():
                moved[target] = sr.combine(moved.get(target, sr.zero), sr.extend(weight, fq))
        frontier = moved
        current = labels[position + table.z - 1]
        position += table.z
    for module in labels[position:]:
        frontier = _fold(frontier, lambda q: maut.targets(q, module), sr)
    return _finish(maut.apost, frontier, sr)

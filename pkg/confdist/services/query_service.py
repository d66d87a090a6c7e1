"""
Runs query documents against A_post* or against the brute-force oracle and
formats one "kind input => weight" line per query.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

from confdist.core.errors import DocumentError
from confdist.models import AnalysisSettings, QueryItem
from confdist.modules.module_automaton import ConfigAutomaton, entries_automaton, singleton_automaton
from confdist.modules.module_confdist import post_star
from confdist.modules.module_extraction import (
    BlockTable, ModuleAutomaton, block_precompute, config_distance, node_distances, same_context_distances,
    superconfig_automaton, superconfig_distance, superconfig_distance_blocked,
)
from confdist.modules.module_oracle import stabilized_distances
from confdist.modules.module_rsm import Configuration, Rsm, Superconfiguration, normalize_exit_weights
from confdist.modules.module_semiring import combine_all
from confdist.utils.helpers import format_stack
from confdist.utils.validation import parse_init, parse_module_stack, resolve_stack

InitialSet = Union[Configuration, int]


@dataclass
class QueryResult:
    item: QueryItem
    weight: Any
    line: str


def format_query(item: QueryItem, weight, rsm: Rsm) -> str:
    text = rsm.semiring.format_weight(weight)
    if item.kind == "config":
        return f"config {item.node} {format_stack(item.stack)} => {text}"
    if item.kind == "superconfig":
        return f"superconfig {item.node} {format_stack(item.module_stack)} => {text}"
    return f"{item.kind} {item.node} => {text}"


def prepare(rsm: Rsm, init_text: str) -> Tuple[Rsm, InitialSet]:
    """Normalize exit weights, then resolve the initial set on the normalized RSM."""
    rsm = normalize_exit_weights(rsm)
    return rsm, parse_init(rsm, init_text)


def initial_automaton(rsm: Rsm, initial: InitialSet) -> ConfigAutomaton:
    if isinstance(initial, Configuration):
        return singleton_automaton(rsm, initial)
    return entries_automaton(rsm, initial)


def initial_seeds(rsm: Rsm, initial: InitialSet) -> List[Tuple[Configuration, Any]]:
    one = rsm.semiring.one
    if isinstance(initial, Configuration):
        return [(initial, one)]
    return [(Configuration(e), one) for e in rsm.entries[initial]]


def saturate(rsm: Rsm, init_text: str, settings: Optional[AnalysisSettings] = None) -> ConfigAutomaton:
    settings = settings or AnalysisSettings()
    rsm, initial = prepare(rsm, init_text)
    return post_star(rsm, initial_automaton(rsm, initial), settings.relaxation_cap)


def _resolve(rsm: Rsm, item: QueryItem, position: int):
    try:
        node = rsm.find_node(item.node)
        if item.kind == "config":
            return Configuration(node, resolve_stack(rsm, node, item.stack))
        if item.kind == "superconfig":
            return Superconfiguration(node, parse_module_stack(rsm, item.module_stack))
        return node
    except KeyError as e:
        raise DocumentError(f"queries.{position}: {e.args[0] if e.args else e}") from None
    except ValueError as e:
        raise DocumentError(f"queries.{position}: {e}") from None


class QueryRunner:
    """
    Answers queries over one A_post*, building derived tables on first use.

    With block_size set, superconfig queries go through the z-block table,
    built once under settings.block_budget.
    """

    def __init__(self, apost: ConfigAutomaton, settings: Optional[AnalysisSettings] = None,
                 block_size: Optional[int] = None):
        self.apost = apost
        self.rsm = apost.rsm
        self.settings = settings or AnalysisSettings()
        self._maut: Optional[ModuleAutomaton] = None
        self.block_size = block_size
        self._blocks: Optional[BlockTable] = None
        self._nodes: Optional[Dict[int, Any]] = None
        self._same_context: Optional[Dict[Tuple[int, int], Any]] = None

    def answer(self, item: QueryItem, position: int = 0):
        target = _resolve(self.rsm, item, position)
        if item.kind == "config":
            return config_distance(self.apost, target)
        if item.kind == "superconfig":
            if self._maut is None:
                self._maut = superconfig_automaton(self.apost)
            if self.block_size is None:
                return superconfig_distance(self._maut, target)
            if self._blocks is None:
                self._blocks = block_precompute(self._maut, self.rsm, self.block_size, self.settings.block_budget)
            return superconfig_distance_blocked(self._maut, self._blocks, target)
        if item.kind == "node":
            if self._nodes is None:
                self._nodes = node_distances(self.apost)
            return self._nodes.get(target, self.rsm.semiring.zero)
        if self._same_context is None:
            self._same_context = same_context_distances(self.rsm, self.settings.relaxation_cap)
        return self._same_context.get((self.rsm.module_of(target), target), self.rsm.semiring.zero)

    def run(self, queries: List[QueryItem]) -> List[QueryResult]:
        results = []
        for position, item in enumerate(queries):
            weight = self.answer(item, position)
            results.append(QueryResult(item, weight, format_query(item, weight, self.rsm)))
        return results


def run_queries(rsm: Rsm, init_text: str, queries: List[QueryItem],
                settings: Optional[AnalysisSettings] = None, block_size: Optional[int] = None) -> List[QueryResult]:
    apost = saturate(rsm, init_text, settings)
    return QueryRunner(apost, settings, block_size).run(queries)


def run_oracle_queries(rsm: Rsm, init_text: str, queries: List[QueryItem],
                       settings: Optional[AnalysisSettings] = None) -> List[QueryResult]:
    """
    Same queries answered by explicit exploration.

    config and same-context queries are stabilized; node and superconfig
    queries combine over every configuration seen at the stabilized bound.
    """
    settings = settings or AnalysisSettings()
    rsm, initial = prepare(rsm, init_text)
    sr = rsm.semiring
    seeds = initial_seeds(rsm, initial)
    resolved = [_resolve(rsm, item, i) for i, item in enumerate(queries)]
    config_targets = [t for item, t in zip(queries, resolved) if item.kind == "config"]

    def stabilize(seed_list, targets):
        return stabilized_distances(
            rsm, seed_list, targets,
            step_size=settings.oracle_bound_step,
            ceiling=settings.oracle_bound_ceiling,
            relaxation_cap=settings.oracle_relaxation_cap,
        )

    main = stabilize(seeds, config_targets)
    results = []
    for item, target in zip(queries, resolved):
        if item.kind == "config":
            weight = main.get(target)
        elif item.kind == "node":
            weight = combine_all(sr, (d for c, d in main.distances.items() if c.node == target))
        elif item.kind == "superconfig":
            weight = combine_all(sr, (
                d for c, d in main.distances.items()
                if c.node == target.node
                and tuple(rsm.boxes[b].module for b in c.stack) == target.module_stack
            ))
        else:
            module = rsm.module_of(target)
            local = stabilize([(Configuration(e), sr.one) for e in rsm.entries[module]], [Configuration(target)])
            weight = local.get(Configuration(target))
        results.append(QueryResult(item, weight, format_query(item, weight, rsm)))
    return results

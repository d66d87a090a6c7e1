"""
MODULE: module_rsm.py - WEIGHTED RECURSIVE STATE MACHINES

ROLE: Immutable RSM model, configuration semantics and structural validation

RESPONSIBILITIES:
  - Compiles named module definitions into integer node ids with a side table
  - Derives call nodes "box.entry" and return nodes "box.exit" per box
  - Records every structural violation instead of failing on construction
  - Single-step successor relation over configurations
  - Exit-weight normalization with auxiliary internal nodes

KEY FUNCTIONS:
  Rsm(semiring, modules) - compiled model, adjacency per node kind
  validate(rsm) → ValidationReport
  normalize_exit_weights(rsm) → Rsm
  step(rsm, c) → list of (Configuration, weight)

DEPENDENCIES:
  - module_semiring: weights
  - networkx: call graph between modules
"""
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from confdist.core.errors import IllFormedConfigurationError
from confdist.modules.module_semiring import Semiring


class NodeKind(str, Enum):
    INTERNAL = "internal"
    ENTRY = "entry"
    EXIT = "exit"
    CALL = "call"
    RETURN = "return"


CONFIG_KINDS = frozenset({NodeKind.INTERNAL, NodeKind.ENTRY, NodeKind.RETURN})
SOURCE_KINDS = CONFIG_KINDS
TARGET_KINDS = frozenset({NodeKind.INTERNAL, NodeKind.EXIT, NodeKind.CALL})


@dataclass(frozen=True)
class BoxDef:
    name: str
    callee: int


@dataclass(frozen=True)
class TransitionDef:
    source: str
    target: str
    weight: Any


@dataclass(frozen=True)
class ModuleDef:
    name: str
    entries: Tuple[str, ...] = ()
    exits: Tuple[str, ...] = ()
    internals: Tuple[str, ...] = ()
    boxes: Tuple[BoxDef, ...] = ()
    transitions: Tuple[TransitionDef, ...] = ()


@dataclass(frozen=True)
class NodeInfo:
    module: int
    kind: NodeKind
    name: str
    box: Optional[int] = None  # call/return nodes only
    port: Optional[int] = None  # callee entry/exit behind a call/return node


@dataclass(frozen=True)
class BoxInfo:
    module: int
    name: str
    callee: int


@dataclass(frozen=True)
class Configuration:
    """Control node plus box stack, top first."""
    node: int
    stack: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Superconfiguration:
    node: int
    module_stack: Tuple[int, ...] = ()


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


class Rsm:
    """
    Compiled weighted RSM.

    Node and box ids are global integers. Malformed pieces (unknown names,
    transitions of the wrong kind, boxes with an unknown callee) are left out
    of the adjacency tables and listed in build_issues.
    """

    def __init__(self, semiring: Semiring, modules: Sequence[ModuleDef]):
        self.semiring = semiring
        self.modules: Tuple[ModuleDef, ...] = tuple(modules)
        self.nodes: List[NodeInfo] = []
        self.boxes: List[BoxInfo] = []
        self.build_issues: List[str] = []

        count = len(self.modules)
        self.entries: List[List[int]] = [[] for _ in range(count)]
        self.exits: List[List[int]] = [[] for _ in range(count)]
        self.internals: List[List[int]] = [[] for _ in range(count)]
        self.module_boxes: List[List[int]] = [[] for _ in range(count)]
        self.call_nodes: List[List[int]] = [[] for _ in range(count)]
        self.return_nodes: List[List[int]] = [[] for _ in range(count)]

        self.call_node: Dict[Tuple[int, int], int] = {}  # (box, callee entry) -> node
        self.return_node: Dict[Tuple[int, int], int] = {}  # (box, callee exit) -> node
        self.out_internal: Dict[int, List[Tuple[int, Any]]] = defaultdict(list)
        self.out_call: Dict[int, List[Tuple[int, int, Any]]] = defaultdict(list)
        self.out_exit: Dict[int, List[Tuple[int, Any]]] = defaultdict(list)
        self.transition_count = 0

        self._names: Dict[Tuple[int, str], int] = {}
        self._box_names: Dict[Tuple[int, str], int] = {}
        self._module_names: Dict[str, int] = {}
        self._build()

    # ============== Construction ==============

    def _add_node(self, module: int, kind: NodeKind, name: str, box=None, port=None) -> Optional[int]:
        key = (module, name)
        if key in self._names:
            self.build_issues.append(
                f"module '{self.modules[module].name}': node name '{name}' used more than once")
            return None
        node = len(self.nodes)
        self.nodes.append(NodeInfo(module, kind, name, box, port))
        self._names[key] = node
        return node

    def _build(self) -> None:
        for i, mod in enumerate(self.modules):
            if mod.name in self._module_names:
                self.build_issues.append(f"module name '{mod.name}' used more than once")
            else:
                self._module_names[mod.name] = i
            for kind, names, bucket in (
                (NodeKind.ENTRY, mod.entries, self.entries[i]),
                (NodeKind.EXIT, mod.exits, self.exits[i]),
                (NodeKind.INTERNAL, mod.internals, self.internals[i]),
            ):
                for name in names:
                    node = self._add_node(i, kind, name)
                    if node is not None:
                        bucket.append(node)

        for i, mod in enumerate(self.modules):
            for box in mod.boxes:
                if not 0 <= box.callee < len(self.modules):
                    self.build_issues.append(
                        f"module '{mod.name}': box '{box.name}' targets module index {box.callee} out of range")
                    continue
                if (i, box.name) in self._box_names:
                    self.build_issues.append(f"module '{mod.name}': box name '{box.name}' used more than once")
                    continue
                b = len(self.boxes)
                self.boxes.append(BoxInfo(i, box.name, box.callee))
                self._box_names[(i, box.name)] = b
                self.module_boxes[i].append(b)
                for entry in self.entries[box.callee]:
                    node = self._add_node(i, NodeKind.CALL, f"{box.name}.{self.nodes[entry].name}", b, entry)
                    if node is not None:
                        self.call_node[(b, entry)] = node
                        self.call_nodes[i].append(node)
                for exit_ in self.exits[box.callee]:
                    node = self._add_node(i, NodeKind.RETURN, f"{box.name}.{self.nodes[exit_].name}", b, exit_)
                    if node is not None:
                        self.return_node[(b, exit_)] = node
                        self.return_nodes[i].append(node)

        for i, mod in enumerate(self.modules):
            for t in mod.transitions:
                self._add_transition(i, t)
        for table in (self.out_internal, self.out_exit, self.out_call):
            for targets in table.values():
                targets.sort(key=lambda item: item[:-1])

    def _add_transition(self, i: int, t: TransitionDef) -> None:
        where = f"module '{self.modules[i].name}': transition {t.source} -> {t.target}"
        src = self._names.get((i, t.source))
        dst = self._names.get((i, t.target))
        if src is None or dst is None:
            missing = t.source if src is None else t.target
            self.build_issues.append(f"{where}: unknown node '{missing}'")
            return
        src_kind, dst_kind = self.nodes[src].kind, self.nodes[dst].kind
        if src_kind not in SOURCE_KINDS:
            self.build_issues.append(f"{where}: {src_kind.value} node as transition source")
            return
        if dst_kind not in TARGET_KINDS:
            self.build_issues.append(f"{where}: {dst_kind.value} node as transition target")
            return
        if not self.semiring.contains(t.weight):
            self.build_issues.append(f"{where}: weight {t.weight!r} is not a {self.semiring.name} value")
            return
        if dst_kind is NodeKind.INTERNAL:
            self.out_internal[src].append((dst, t.weight))
        elif dst_kind is NodeKind.EXIT:
            self.out_exit[src].append((dst, t.weight))
        else:
            info = self.nodes[dst]
            self.out_call[src].append((info.box, info.port, t.weight))
        self.transition_count += 1

    # ============== Lookup ==============

    def module_of(self, node: int) -> int:
        return self.nodes[node].module

    def kind(self, node: int) -> NodeKind:
        return self.nodes[node].kind

    def node_name(self, node: int) -> str:
        return self.nodes[node].name

    def qualified_name(self, node: int) -> str:
        info = self.nodes[node]
        return f"{self.modules[info.module].name}:{info.name}"

    def box_name(self, box: int) -> str:
        return self.boxes[box].name

    def qualified_box_name(self, box: int) -> str:
        info = self.boxes[box]
        return f"{self.modules[info.module].name}:{info.name}"

    def module_index(self, name: str) -> int:
        try:
            return self._module_names[name]
        except KeyError:
            raise KeyError(f"unknown module '{name}'") from None

    def node_id(self, module: int, name: str) -> int:
        try:
            return self._names[(module, name)]
        except KeyError:
            raise KeyError(f"module '{self.modules[module].name}' has no node '{name}'") from None

    def find_node(self, text: str) -> int:
        """Resolve "Module:name" or a bare name that is unique across modules."""
        if ":" in text:
            module, name = text.split(":", 1)
            return self.node_id(self.module_index(module), name)
        hits = [node for (_, name), node in self._names.items() if name == text]
        if not hits:
            raise KeyError(f"unknown node '{text}'")
        if len(hits) > 1:
            raise KeyError(f"node name '{text}' is ambiguous, qualify it as Module:{text}")
        return hits[0]

    def find_box(self, text: str) -> int:
        if ":" in text:
            module, name = text.split(":", 1)
            key = (self.module_index(module), name)
            if key not in self._box_names:
                raise KeyError(f"unknown box '{text}'")
            return self._box_names[key]
        hits = [box for (_, name), box in self._box_names.items() if name == text]
        if len(hits) != 1:
            raise KeyError(f"box name '{text}' is unknown or ambiguous")
        return hits[0]

    def config_nodes(self) -> List[int]:
        return [n for n, info in enumerate(self.nodes) if info.kind in CONFIG_KINDS]

    # ============== Metrics ==============

    @property
    def module_count(self) -> int:
        return len(self.modules)

    @property
    def size(self) -> int:
        return max(len(self.nodes), self.transition_count)

    @property
    def theta_entries(self) -> int:
        return max((len(e) for e in self.entries), default=0)

    @property
    def theta_exits(self) -> int:
        return max((len(x) for x in self.exits), default=0)

    @property
    def call_count(self) -> int:
        return len(self.call_node)

    def call_graph(self) -> nx.DiGraph:
        """Caller -> callee edges, one per pair of modules, with the boxes on it."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.module_count))
        for b, info in enumerate(self.boxes):
            if graph.has_edge(info.module, info.callee):
                graph.edges[info.module, info.callee]["boxes"].append(b)
            else:
                graph.add_edge(info.module, info.callee, boxes=[b])
        return graph

    def is_normalized(self) -> bool:
        one = self.semiring.one
        return all(w == one for targets in self.out_exit.values() for _, w in targets)

    # ============== Configurations ==============

    def configuration_problem(self, c: Configuration) -> Optional[str]:
        if not 0 <= c.node < len(self.nodes):
            return f"unknown node id {c.node}"
        info = self.nodes[c.node]
        if info.kind not in CONFIG_KINDS:
            return f"{info.kind.value} node '{info.name}' cannot hold control"
        expected = info.module
        for position, box in enumerate(c.stack):
            if not 0 <= box < len(self.boxes):
                return f"unknown box id {box}"
            if self.boxes[box].callee != expected:
                return (f"stack position {position}: box '{self.boxes[box].name}' does not call "
                        f"module '{self.modules[expected].name}'")
            expected = self.boxes[box].module
        return None

    def is_well_formed(self, c: Configuration) -> bool:
        return self.configuration_problem(c) is None

    def check_configuration(self, c: Configuration) -> None:
        problem = self.configuration_problem(c)
        if problem is not None:
            raise IllFormedConfigurationError(problem)

    def describe(self, c: Configuration) -> str:
        return self.node_name(c.node) + "[" + ",".join(self.box_name(b) for b in c.stack) + "]"


def validate(rsm: Rsm) -> ValidationReport:
    return ValidationReport(list(rsm.build_issues))


def step(rsm: Rsm, c: Configuration) -> List[Tuple[Configuration, Any]]:
    """Successors of c with the weight of the transition taken."""
    rsm.check_configuration(c)
    u, stack = c.node, c.stack
    successors = [(Configuration(v, stack), w) for v, w in rsm.out_internal.get(u, ())]
    for box, entry, w in rsm.out_call.get(u, ()):
        successors.append((Configuration(entry, (box,) + stack), w))
    if stack:
        top = stack[0]
        for exit_, w in rsm.out_exit.get(u, ()):
            successors.append((Configuration(rsm.return_node[(top, exit_)], stack[1:]), w))
    return successors


def normalize_exit_weights(rsm: Rsm) -> Rsm:
    """
    Route every non-one transition into an exit through a fresh internal node.

    (u, x, w) becomes (u, u~x, w), (u~x, x, one). Returns rsm itself when there
    is nothing to rewrite.
    """
    one = rsm.semiring.one
    changed = False
    modules = []
    for mod in rsm.modules:
        exits = set(mod.exits)
        taken = set(mod.entries) | exits | set(mod.internals)
        internals = list(mod.internals)
        transitions = []
        for t in mod.transitions:
            if t.target not in exits or t.weight == one:
                transitions.append(t)
                continue
            aux = f"{t.source}~{t.target}"
            suffix = 1
            while aux in taken:
                suffix += 1
                aux = f"{t.source}~{t.target}~{suffix}"
            taken.add(aux)
            internals.append(aux)
            transitions.append(TransitionDef(t.source, aux, t.weight))
            transitions.append(TransitionDef(aux, t.target, one))
            changed = True
        modules.append(ModuleDef(mod.name, mod.entries, mod.exits, tuple(internals), mod.boxes, tuple(transitions)))
    if not changed:
        return rsm
    return Rsm(rsm.semiring, modules)


def build_rsm(semiring: Semiring, modules: Iterable[dict]) -> Rsm:
    """
    Build an Rsm from plain dicts with module names as box callees.

    Each dict has keys name, entries, exits, internals, boxes ({name: callee
    module name}) and transitions ((source, target[, weight]) tuples, weight
    defaults to one).
    """
    raw_modules = list(modules)
    index = {raw["name"]: i for i, raw in enumerate(raw_modules)}
    defs = []
    for raw in raw_modules:
        boxes = tuple(BoxDef(name, index.get(callee, -1)) for name, callee in raw.get("boxes", {}).items())
        transitions = tuple(
            TransitionDef(t[0], t[1], t[2] if len(t) > 2 else semiring.one)
            for t in raw.get("transitions", ())
        )
        defs.append(ModuleDef(
            name=raw["name"],
            entries=tuple(raw.get("entries", ())),
            exits=tuple(raw.get("exits", ())),
            internals=tuple(raw.get("internals", ())),
            boxes=boxes,
            transitions=transitions,
        ))
    return Rsm(semiring, defs)

"""
JSON document loading and saving for RSMs, CRSMs, queries and automata.

Every parse error is raised as DocumentError with the location of the
offending value, e.g. "rsm.modules.0.transitions.2.weight: ...".
"""
import json
from typing import Any, List

from pydantic import BaseModel, ValidationError

from confdist.core.errors import DocumentError
from confdist.models import (
    AutomatonDocument, CrsmDocument, QueryDocument, QueryItem, RsmDocument
)
from confdist.modules.module_automaton import ConfigAutomaton
from confdist.modules.module_concurrent import Crsm
from confdist.modules.module_rsm import BoxDef, ModuleDef, Rsm, TransitionDef, validate
from confdist.modules.module_semiring import semiring_from_name
from confdist.utils.file_ops import safe_read_text, safe_write_text
from confdist.utils.validation import parse_configuration


# ============== Raw JSON ==============

def read_json(filepath: str) -> Any:
    text = safe_read_text(filepath)
    if text is None:
        raise FileNotFoundError(f"cannot read '{filepath}'")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{filepath}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_json(filepath: str, data: Any) -> bool:
    return safe_write_text(filepath, dump_json(data))


def _validated(model: type, data: Any, where: str) -> BaseModel:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        problems = []
        for err in e.errors():
            location = ".".join([where] + [str(part) for part in err["loc"]])
            problems.append(f"{location}: {err['msg']}")
        raise DocumentError("; ".join(problems)) from None


def _lookup_message(e: KeyError) -> str:
    return e.args[0] if e.args else str(e)


# ============== RSM ==============

def _rsm_from_document(doc: RsmDocument, where: str) -> Rsm:
    try:
        sr = semiring_from_name(doc.semiring)
    except ValueError as e:
        raise DocumentError(f"{where}.semiring: {e}") from None
    index = {}
    for i, module in enumerate(doc.modules):
        index.setdefault(module.name, i)

    modules = []
    for i, module in enumerate(doc.modules):
        boxes = []
        for j, box in enumerate(module.boxes):
            if box.calls not in index:
                raise DocumentError(f"{where}.modules.{i}.boxes.{j}.calls: unknown module '{box.calls}'")
            boxes.append(BoxDef(box.name, index[box.calls]))
        transitions = []
        for j, t in enumerate(module.transitions):
            try:
                weight = sr.parse_weight(t.weight)
            except ValueError as e:
                raise DocumentError(f"{where}.modules.{i}.transitions.{j}.weight: {e}") from None
            transitions.append(TransitionDef(t.source, t.target, weight))
        modules.append(ModuleDef(
            name=module.name,
            entries=tuple(module.entries),
            exits=tuple(module.exits),
            internals=tuple(module.internals),
            boxes=tuple(boxes),
            transitions=tuple(transitions),
        ))
    return Rsm(sr, modules)


def parse_rsm(data: Any, where: str = "rsm") -> Rsm:
    """Document → Rsm. Structural problems stay in rsm.build_issues for validate()."""
    return _rsm_from_document(_validated(RsmDocument, data, where), where)


def rsm_to_document(rsm: Rsm) -> dict:
    sr = rsm.semiring
    modules = []
    for mod in rsm.modules:
        modules.append({
            "name": mod.name,
            "entries": list(mod.entries),
            "exits": list(mod.exits),
            "internals": list(mod.internals),
            "boxes": [
                {"name": box.name, "calls": rsm.modules[box.callee].name}
                for box in mod.boxes if 0 <= box.callee < rsm.module_count
            ],
            "transitions": [
                {"from": t.source, "to": t.target, "weight": sr.dump_weight(t.weight)}
                for t in mod.transitions
            ],
        })
    return {"semiring": sr.name, "modules": modules}


def load_rsm(filepath: str) -> Rsm:
    return parse_rsm(read_json(filepath))


def save_rsm(rsm: Rsm, filepath: str) -> bool:
    return write_json(filepath, rsm_to_document(rsm))


# ============== Queries ==============

def parse_queries(data: Any) -> List[QueryItem]:
    """Accepts {"queries": [...]} or a bare list."""
    if isinstance(data, list):
        data = {"queries": data}
    return _validated(QueryDocument, data, "queries").queries


def load_queries(filepath: str) -> List[QueryItem]:
    return parse_queries(read_json(filepath))


# ============== Concurrent RSM ==============

def parse_crsm(data: Any) -> Crsm:
    doc = _validated(CrsmDocument, data, "crsm")
    components = []
    for i, component in enumerate(doc.components):
        where = f"crsm.components.{i}"
        rsm = _rsm_from_document(component, where)
        report = validate(rsm)
        if not report.ok:
            raise DocumentError(f"{where}: " + "; ".join(report.violations))
        components.append(rsm)
    if doc.initial.global_state not in doc.global_states:
        raise DocumentError(f"crsm.initial.global: unknown global state '{doc.initial.global_state}'")
    if len(doc.initial.components) != len(components):
        raise DocumentError(
            f"crsm.initial.components: expected {len(components)} configurations, got {len(doc.initial.components)}")
    initial = []
    for i, (rsm, text) in enumerate(zip(components, doc.initial.components)):
        try:
            initial.append(parse_configuration(rsm, text))
        except KeyError as e:
            raise DocumentError(f"crsm.initial.components.{i}: {_lookup_message(e)}") from None
        except ValueError as e:
            raise DocumentError(f"crsm.initial.components.{i}: {e}") from None
    try:
        return Crsm(components, doc.global_states, doc.global_states.index(doc.initial.global_state), initial)
    except ValueError as e:
        raise DocumentError(f"crsm: {e}") from None


def load_crsm(filepath: str) -> Crsm:
    return parse_crsm(read_json(filepath))


# ============== Configuration automata ==============

def automaton_to_document(aut: ConfigAutomaton) -> dict:
    rsm, sr = aut.rsm, aut.semiring

    def state(q):
        return {"node": rsm.qualified_name(q[0]), "mark": q[1]}

    transitions = []
    for t in aut.transitions():
        transitions.append({
            "from": state(t.source),
            "label": None if t.label is None else rsm.qualified_box_name(t.label),
            "to": state(t.target),
            "weight": sr.dump_weight(t.weight),
        })
    return {
        "semiring": sr.name,
        "mark_count": aut.mark_count,
        "fresh_mark": aut.fresh_mark,
        "states": [state(q) for q in sorted(aut.states)],
        "initial": [state(q) for q in sorted(aut.initial)],
        "final": [state(q) for q in sorted(aut.final)],
        "transitions": transitions,
    }


def parse_automaton(rsm: Rsm, data: Any) -> ConfigAutomaton:
    doc = _validated(AutomatonDocument, data, "automaton")
    sr = rsm.semiring
    if doc.semiring != sr.name:
        raise DocumentError(f"automaton.semiring: '{doc.semiring}' does not match the RSM's '{sr.name}'")

    def state(s, where):
        try:
            return rsm.find_node(s.node), s.mark
        except KeyError as e:
            raise DocumentError(f"{where}.node: {_lookup_message(e)}") from None

    aut = ConfigAutomaton(rsm, doc.mark_count)
    aut.fresh_mark = doc.fresh_mark
    for group in ("states", "initial", "final"):
        for i, s in enumerate(getattr(doc, group)):
            q = state(s, f"automaton.{group}.{i}")
            aut.add_state(q, initial=group == "initial", final=group == "final")
    for i, t in enumerate(doc.transitions):
        where = f"automaton.transitions.{i}"
        source, target = state(t.source, f"{where}.from"), state(t.target, f"{where}.to")
        try:
            weight = sr.parse_weight(t.weight)
        except ValueError as e:
            raise DocumentError(f"{where}.weight: {e}") from None
        if t.label is None:
            aut.set_epsilon(source, target, weight)
            continue
        try:
            box = rsm.find_box(t.label)
        except KeyError as e:
            raise DocumentError(f"{where}.label: {_lookup_message(e)}") from None
        aut.set_box(source, box, target, weight)
    if aut.fresh_mark is not None:
        aut.freeze()
    return aut


def save_automaton(aut: ConfigAutomaton, filepath: str) -> bool:
    return write_json(filepath, automaton_to_document(aut))


def load_automaton(rsm: Rsm, filepath: str) -> ConfigAutomaton:
    return parse_automaton(rsm, read_json(filepath))

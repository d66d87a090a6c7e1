"""
Parsers for the short text forms accepted on the command line.

  configuration        node | node[b1,b2]          (stack top first)
  initial set          configuration | entries:Module
  global configuration g;node1[stack];node2[stack]
  sizes                10,20,40
"""
import re
from typing import List, Sequence, Tuple, Union

from confdist.core.errors import IllFormedConfigurationError
from confdist.modules.module_concurrent import Crsm, GlobalConfiguration
from confdist.modules.module_rsm import Configuration, Rsm

CONFIG_PATTERN = re.compile(r"^\s*([^\[\]\s]+)\s*(?:\[([^\[\]]*)\])?\s*$")


def split_configuration(text: str) -> Tuple[str, List[str]]:
    """Split "node[b1,b2]" into ("node", ["b1", "b2"])."""
    match = CONFIG_PATTERN.match(text or "")
    if not match:
        raise ValueError(f"cannot parse configuration '{text}' (expected node or node[b1,b2])")
    node, stack = match.group(1), match.group(2)
    names = [name.strip() for name in stack.split(",")] if stack and stack.strip() else []
    if any(not name for name in names):
        raise ValueError(f"empty box name in configuration '{text}'")
    return node, names


def resolve_stack(rsm: Rsm, node: int, names: Sequence[str]) -> Tuple[int, ...]:
    """
    Resolve box names top first. A bare name is looked up among the boxes
    that call the module expected at that position.
    """
    expected = rsm.module_of(node)
    stack = []
    for position, name in enumerate(names):
        if ":" in name:
            box = rsm.find_box(name)
        else:
            hits = [b for b, info in enumerate(rsm.boxes) if info.name == name and info.callee == expected]
            if len(hits) != 1:
                raise IllFormedConfigurationError(
                    f"stack position {position}: no unique box '{name}' calling module "
                    f"'{rsm.modules[expected].name}'")
            box = hits[0]
        stack.append(box)
        expected = rsm.boxes[box].module
    return tuple(stack)


def parse_configuration(rsm: Rsm, text: str) -> Configuration:
    name, boxes = split_configuration(text)
    node = rsm.find_node(name)
    c = Configuration(node, resolve_stack(rsm, node, boxes))
    rsm.check_configuration(c)
    return c


def parse_init(rsm: Rsm, text: str) -> Union[Configuration, int]:
    """A configuration, or the module index of an "entries:Module" initial set."""
    if text.startswith("entries:"):
        return rsm.module_index(text[len("entries:"):].strip())
    return parse_configuration(rsm, text)


def parse_module_stack(rsm: Rsm, names: Sequence[str]) -> Tuple[int, ...]:
    return tuple(rsm.module_index(name) for name in names)


def parse_sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"sizes must be comma-separated integers, got '{text}'") from None
    if not sizes or any(n < 1 for n in sizes):
        raise ValueError(f"sizes must be positive, got '{text}'")
    return sizes


def split_global_configuration(text: str) -> Tuple[str, List[str]]:
    parts = [part.strip() for part in (text or "").split(";")]
    if len(parts) < 2 or not parts[0]:
        raise ValueError(f"cannot parse global configuration '{text}' (expected g;node1[stack];node2[stack])")
    return parts[0], parts[1:]


def parse_global_configuration(crsm: Crsm, text: str) -> GlobalConfiguration:
    name, parts = split_global_configuration(text)
    if name not in crsm.global_states:
        raise ValueError(f"unknown global state '{name}'")
    if len(parts) != crsm.component_count:
        raise ValueError(f"expected {crsm.component_count} component configurations, got {len(parts)}")
    locals_ = tuple(parse_configuration(rsm, part) for rsm, part in zip(crsm.components, parts))
    return GlobalConfiguration(crsm.global_states.index(name), locals_)

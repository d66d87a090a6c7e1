"""
MODULE: module_generators.py - SYNTHETIC RSM FAMILIES

ROLE: Builds benchmark and property-test instances

KEY FUNCTIONS:
  dense_family(n, semiring) → Rsm
    - one module, n entries, n exits, one self-recursive box
    - every entry reaches every call and exit node, every return reaches every exit
  random_rsm(seed, semiring, ...) → Rsm
    - seeded, always validate-clean, exit weights may need normalization
  all_configurations(rsm, max_height) → list of Configuration
    - every well-formed configuration up to a stack height
"""
import random
from typing import List

from confdist.modules.module_rsm import (
    BoxDef, Configuration, ModuleDef, Rsm, TransitionDef, CONFIG_KINDS
)
from confdist.modules.module_semiring import Semiring


def dense_family(n: int, semiring: Semiring) -> Rsm:
    if n < 1:
        raise ValueError("dense_family needs n >= 1")
    one = semiring.one
    entries = tuple(f"e{i}" for i in range(n))
    exits = tuple(f"x{i}" for i in range(n))
    calls = [f"b.{e}" for e in entries]
    returns = [f"b.{x}" for x in exits]
    transitions = []
    for e in entries:
        transitions.extend(TransitionDef(e, c, one) for c in calls)
        transitions.extend(TransitionDef(e, x, one) for x in exits)
    for r in returns:
        transitions.extend(TransitionDef(r, x, one) for x in exits)
    module = ModuleDef(
        name="M",
        entries=entries,
        exits=exits,
        boxes=(BoxDef("b", 0),),
        transitions=tuple(transitions),
    )
    return Rsm(semiring, [module])


def random_rsm(
    seed: int,
    semiring: Semiring,
    max_modules: int = 4,
    max_entries: int = 2,
    max_exits: int = 2,
    max_internals: int = 3,
    max_boxes: int = 2,
    max_transitions: int = 40,
    recursion_prob: float = 0.3,
) -> Rsm:
    """
    Seeded random RSM.

    Boxes call a later module unless a recursion draw succeeds, in which case
    any module (itself included) may be called. Module 0 is the usual root.
    """
    rng = random.Random(seed)
    count = rng.randint(1, max_modules)
    shapes = []
    for i in range(count):
        shapes.append({
            "entries": tuple(f"e{i}_{k}" for k in range(rng.randint(1, max_entries))),
            "exits": tuple(f"x{i}_{k}" for k in range(rng.randint(1, max_exits))),
            "internals": tuple(f"u{i}_{k}" for k in range(rng.randint(0, max_internals))),
        })

    boxes_per_module = []
    for i in range(count):
        boxes = []
        for k in range(rng.randint(0, max_boxes)):
            later = list(range(i + 1, count))
            if later and rng.random() >= recursion_prob:
                callee = rng.choice(later)
            else:
                callee = rng.randrange(count)
            boxes.append(BoxDef(f"b{i}_{k}", callee))
        boxes_per_module.append(boxes)

    budget = max_transitions
    modules = []
    for i in range(count):
        shape = shapes[i]
        calls, returns = [], []
        for box in boxes_per_module[i]:
            calls.extend(f"{box.name}.{e}" for e in shapes[box.callee]["entries"])
            returns.extend(f"{box.name}.{x}" for x in shapes[box.callee]["exits"])
        sources = list(shape["entries"]) + list(shape["internals"]) + returns
        targets = list(shape["internals"]) + list(shape["exits"]) + calls
        wanted = min(budget // max(count - i, 1), len(sources) * len(targets))
        wanted = rng.randint(min(len(shape["entries"]), wanted), wanted) if wanted else 0
        pairs = set()
        # every entry gets at least one way forward
        for e in shape["entries"]:
            if len(pairs) < wanted:
                pairs.add((e, rng.choice(targets)))
        attempts = 0
        while len(pairs) < wanted and attempts < 20 * wanted:
            pairs.add((rng.choice(sources), rng.choice(targets)))
            attempts += 1
        budget -= len(pairs)
        transitions = tuple(
            TransitionDef(src, dst, semiring.random_weight(rng)) for src, dst in sorted(pairs)
        )
        modules.append(ModuleDef(
            name=f"M{i}",
            entries=shape["entries"],
            exits=shape["exits"],
            internals=shape["internals"],
            boxes=tuple(boxes_per_module[i]),
            transitions=transitions,
        ))
    return Rsm(semiring, modules)


def all_configurations(rsm: Rsm, max_height: int) -> List[Configuration]:
    """Every well-formed configuration whose stack height is at most max_height."""
    stacks_into = {m: [()] for m in range(rsm.module_count)}  # module -> stacks valid under it
    layer = {m: [()] for m in range(rsm.module_count)}
    for _ in range(max_height):
        grown = {m: [] for m in range(rsm.module_count)}
        for b, info in enumerate(rsm.boxes):
            # box b calls info.callee and lives in info.module
            for below in layer[info.module]:
                grown[info.callee].append((b,) + below)
        for m in grown:
            stacks_into[m].extend(grown[m])
        layer = grown
    configs = []
    for node, info in enumerate(rsm.nodes):
        if info.kind in CONFIG_KINDS:
            configs.extend(Configuration(node, s) for s in stacks_into[info.module])
    return configs

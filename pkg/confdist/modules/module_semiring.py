"""
MODULE: module_semiring.py - IDEMPOTENT SEMIRINGS

ROLE: Value-level semiring definitions shared by every engine

KEY FUNCTIONS:
  boolean_semiring() / tropical_semiring(ceiling) / genkill_semiring(universe) → Semiring
  semiring_from_name(name) → Semiring
    - "boolean", "tropical", "genkill:a,b,c"
  combine(sr, a, b) / extend(sr, a, b) / leq(sr, a, b)
    - Checked operations, raise SemiringMismatchError on foreign values
  verify_semiring_laws(sr, samples) → LawReport
  counting(sr, stats) → Semiring
    - Same semiring, every combine/extend counted into EngineStats

NOTES:
  - Engines call sr.combine / sr.extend directly (unchecked hot path)
  - a ⊑ b iff combine(a, b) == a
  - height_bound is an upper bound on strict decreases starting at zero,
    None when only the descending chain condition holds
"""
import itertools
import math
import random
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from confdist.core.constants import TROPICAL_CEILING
from confdist.core.errors import SemiringMismatchError
from confdist.core.state import EngineStats

INF = math.inf


@dataclass(frozen=True)
class Semiring:
    """An idempotent semiring given by its operations."""
    name: str
    zero: Any
    one: Any
    combine: Callable[[Any, Any], Any]
    extend: Callable[[Any, Any], Any]
    height_bound: Optional[int] = None
    contains: Callable[[Any], bool] = field(default=lambda value: True, compare=False)
    parse_weight: Callable[[Any], Any] = field(default=lambda raw: raw, compare=False)
    dump_weight: Callable[[Any], Any] = field(default=lambda value: value, compare=False)
    format_weight: Callable[[Any], str] = field(default=str, compare=False)
    random_weight: Callable[[random.Random], Any] = field(default=None, compare=False)

    @property
    def dcc_only(self) -> bool:
        return self.height_bound is None

    def leq(self, a, b) -> bool:
        return self.combine(a, b) == a

    def check(self, *values) -> None:
        for value in values:
            if not self.contains(value):
                raise SemiringMismatchError(f"{value!r} is not a value of semiring '{self.name}'")


# ============== Checked operations ==============

def combine(sr: Semiring, a, b):
    sr.check(a, b)
    return sr.combine(a, b)


def extend(sr: Semiring, a, b):
    """a ⊗ b: first a, then b."""
    sr.check(a, b)
    return sr.extend(a, b)


def leq(sr: Semiring, a, b) -> bool:
    sr.check(a, b)
    return sr.combine(a, b) == a


def combine_all(sr: Semiring, values: Iterable) -> Any:
    result = sr.zero
    for value in values:
        result = sr.combine(result, value)
    return result


# ============== Boolean ==============

def _parse_bool(raw):
    if raw is None:
        return True
    if not isinstance(raw, bool):
        raise ValueError(f"boolean weight must be true or false, got {raw!r}")
    return raw


def boolean_semiring() -> Semiring:
    return Semiring(
        name="boolean",
        zero=False,
        one=True,
        combine=lambda a, b: a or b,
        extend=lambda a, b: a and b,
        height_bound=2,
        contains=lambda v: type(v) is bool,
        parse_weight=_parse_bool,
        dump_weight=lambda v: v,
        format_weight=lambda v: "true" if v else "false",
        random_weight=lambda rng: rng.random() < 0.9,
    )


# ============== Tropical ==============

def tropical_semiring(ceiling: int = TROPICAL_CEILING) -> Semiring:
    """min/+ over naturals with +inf; sums reaching ceiling saturate to +inf."""

    def saturating_add(a, b):
        if a == INF or b == INF:
            return INF
        total = a + b
        return INF if total >= ceiling else total

    def contains(v) -> bool:
        if v == INF and isinstance(v, float):
            return True
        return type(v) is int and 0 <= v < ceiling

    def parse(raw):
        if raw is None:
            return 0
        if raw == "inf":
            return INF
        if type(raw) is not int or raw < 0:
            raise ValueError(f"tropical weight must be a non-negative integer or \"inf\", got {raw!r}")
        return INF if raw >= ceiling else raw

    return Semiring(
        name="tropical",
        zero=INF,
        one=0,
        combine=min,
        extend=saturating_add,
        height_bound=None,
        contains=contains,
        parse_weight=parse,
        dump_weight=lambda v: "inf" if v == INF else v,
        format_weight=lambda v: "inf" if v == INF else str(v),
        random_weight=lambda rng: rng.randint(0, 4),
    )


# ============== Gen/Kill ==============

@dataclass(frozen=True)
class GenKillValue:
    """Transfer function X ↦ (X ∖ kill) ∪ gen, or the unreachable zero."""
    kill: FrozenSet[str] = frozenset()
    gen: FrozenSet[str] = frozenset()
    reachable: bool = True

    def __post_init__(self):
        kill = frozenset(self.kill)
        gen = frozenset(self.gen)
        if not self.reachable:
            kill, gen = frozenset(), frozenset()
        object.__setattr__(self, "kill", kill - gen)
        object.__setattr__(self, "gen", gen)

    def apply(self, facts: FrozenSet[str]) -> FrozenSet[str]:
        if not self.reachable:
            return frozenset()
        return (frozenset(facts) - self.kill) | self.gen

    def __repr__(self) -> str:
        if not self.reachable:
            return "GenKill(zero)"
        return f"GenKill(kill={sorted(self.kill)}, gen={sorted(self.gen)})"


GENKILL_ZERO = GenKillValue(reachable=False)
GENKILL_ONE = GenKillValue()


def _genkill_combine(a: GenKillValue, b: GenKillValue) -> GenKillValue:
    if not a.reachable:
        return b
    if not b.reachable:
        return a
    return GenKillValue(a.kill & b.kill, a.gen | b.gen)


def _genkill_extend(a: GenKillValue, b: GenKillValue) -> GenKillValue:
    if not a.reachable or not b.reachable:
        return GENKILL_ZERO
    return GenKillValue(a.kill | b.kill, (a.gen - b.kill) | b.gen)


def genkill_semiring(universe: Iterable[str]) -> Semiring:
    facts = frozenset(universe)
    if not facts:
        raise ValueError("genkill universe must not be empty")
    ordered = sorted(facts)

    def contains(v) -> bool:
        return isinstance(v, GenKillValue) and v.kill <= facts and v.gen <= facts

    def parse(raw):
        if raw is None:
            return GENKILL_ONE
        if raw == "zero":
            return GENKILL_ZERO
        if not isinstance(raw, dict) or set(raw) - {"kill", "gen"}:
            raise ValueError(f"genkill weight must be {{\"kill\": [...], \"gen\": [...]}} or \"zero\", got {raw!r}")
        kill = frozenset(raw.get("kill", ()))
        gen = frozenset(raw.get("gen", ()))
        unknown = (kill | gen) - facts
        if unknown:
            raise ValueError(f"facts {sorted(unknown)} are outside the universe {ordered}")
        return GenKillValue(kill, gen)

    def dump(v: GenKillValue):
        if not v.reachable:
            return "zero"
        return {"kill": sorted(v.kill), "gen": sorted(v.gen)}

    def fmt(v: GenKillValue) -> str:
        if not v.reachable:
            return "zero"
        return "{kill:[" + ",".join(sorted(v.kill)) + "],gen:[" + ",".join(sorted(v.gen)) + "]}"

    def sample(rng: random.Random) -> GenKillValue:
        kill = {f for f in ordered if rng.random() < 0.3}
        gen = {f for f in ordered if rng.random() < 0.3}
        return GenKillValue(kill, gen)

    return Semiring(
        name="genkill:" + ",".join(ordered),
        zero=GENKILL_ZERO,
        one=GENKILL_ONE,
        combine=_genkill_combine,
        extend=_genkill_extend,
        height_bound=2 * len(facts) + 1,
        contains=contains,
        parse_weight=parse,
        dump_weight=dump,
        format_weight=fmt,
        random_weight=sample,
    )


def genkill_values(universe: Iterable[str]) -> List[GenKillValue]:
    """Every canonical value over universe, zero included."""
    facts = sorted(frozenset(universe))
    values = [GENKILL_ZERO]
    # each fact is killed, generated, or left alone
    for choice in itertools.product((0, 1, 2), repeat=len(facts)):
        kill = {f for f, c in zip(facts, choice) if c == 1}
        gen = {f for f, c in zip(facts, choice) if c == 2}
        values.append(GenKillValue(kill, gen))
    return values


# ============== Lookup by name ==============

def semiring_from_name(name: str) -> Semiring:
    if name == "boolean":
        return boolean_semiring()
    if name == "tropical":
        return tropical_semiring()
    if name.startswith("genkill:"):
        universe = [f.strip() for f in name[len("genkill:"):].split(",") if f.strip()]
        return genkill_semiring(universe)
    raise ValueError(f"unknown semiring '{name}' (expected boolean, tropical or genkill:<facts>)")


def counting(sr: Semiring, stats: EngineStats) -> Semiring:
    """Wrap sr so that every combine and extend increments stats."""
    base_combine, base_extend = sr.combine, sr.extend

    def counted_combine(a, b):
        stats.combines += 1
        return base_combine(a, b)

    def counted_extend(a, b):
        stats.extends += 1
        return base_extend(a, b)

    return replace(sr, combine=counted_combine, extend=counted_extend)


# ============== Law checking ==============

@dataclass
class LawResult:
    passed: bool = True
    counterexample: Optional[Tuple] = None


@dataclass
class LawReport:
    semiring: str
    results: Dict[str, LawResult] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failed(self) -> List[str]:
        return [name for name, r in self.results.items() if not r.passed]


def verify_semiring_laws(sr: Semiring, samples: Iterable) -> LawReport:
    """
    Check every semiring axiom and the monotonicity of ⊑ over all sample triples.

    The first failing triple of each law is kept as its counterexample.
    """
    values = list(samples)
    if not values:
        raise ValueError("verify_semiring_laws needs at least one sample")
    plus, times, zero, one = sr.combine, sr.extend, sr.zero, sr.one

    def below(a, b):
        return plus(a, b) == a

    unary = {
        "combine_idempotent": lambda a: plus(a, a) == a,
        "combine_zero_neutral": lambda a: plus(a, zero) == a and plus(zero, a) == a,
        "extend_one_neutral": lambda a: times(a, one) == a and times(one, a) == a,
        "extend_zero_annihilates": lambda a: times(a, zero) == zero and times(zero, a) == zero,
    }
    binary = {
        "combine_commutative": lambda a, b: plus(a, b) == plus(b, a),
    }
    ternary = {
        "combine_associative": lambda a, b, c: plus(plus(a, b), c) == plus(a, plus(b, c)),
        "extend_associative": lambda a, b, c: times(times(a, b), c) == times(a, times(b, c)),
        "left_distributive": lambda a, b, c: times(a, plus(b, c)) == plus(times(a, b), times(a, c)),
        "right_distributive": lambda a, b, c: times(plus(b, c), a) == plus(times(b, a), times(c, a)),
        "monotone_combine": lambda a, b, c: not below(a, b) or below(plus(a, c), plus(b, c)),
        "monotone_extend_right": lambda a, b, c: not below(a, b) or below(times(a, c), times(b, c)),
        "monotone_extend_left": lambda a, b, c: not below(a, b) or below(times(c, a), times(c, b)),
    }

    report = LawReport(semiring=sr.name)
    for arity, laws in ((1, unary), (2, binary), (3, ternary)):
        for law, holds in laws.items():
            result = LawResult()
            for args in itertools.product(values, repeat=arity):
                if not holds(*args):
                    result = LawResult(passed=False, counterexample=args)
                    break
            report.results[law] = result
    return report

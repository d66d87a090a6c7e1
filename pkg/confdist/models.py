"""
Pydantic models for the JSON documents read and written by the CLI.
"""
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from confdist.core.constants import (
    BENCH_REPETITIONS, BLOCK_BUDGET, DEFAULT_BENCH_SIZES, DEFAULT_RELAXATION_CAP,
    ORACLE_BOUND_CEILING, ORACLE_BOUND_STEP, ORACLE_RELAXATION_CAP,
)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# ============== RSM ==============

class BoxDocument(StrictModel):
    name: str
    calls: str


class TransitionDocument(StrictModel):
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    weight: Any = None  # parsed by the semiring, None means one


class ModuleDocument(StrictModel):
    name: str
    entries: List[str] = []
    exits: List[str] = []
    internals: List[str] = []
    boxes: List[BoxDocument] = []
    transitions: List[TransitionDocument] = []


class RsmDocument(StrictModel):
    semiring: str = "boolean"
    modules: List[ModuleDocument]


# ============== Queries ==============

class QueryItem(StrictModel):
    kind: Literal["config", "superconfig", "node", "same-context"]
    node: str
    stack: List[str] = []  # box names, top first
    module_stack: List[str] = []  # module names, top first


class QueryDocument(StrictModel):
    queries: List[QueryItem]


# ============== Concurrent RSM ==============

class CrsmInitial(StrictModel):
    global_state: str = Field(alias="global")
    components: List[str]  # one "node[b1,b2]" per component


class CrsmDocument(StrictModel):
    global_states: List[str] = Field(alias="globals", min_length=1)
    components: List[RsmDocument] = Field(min_length=1)
    initial: CrsmInitial


# ============== Configuration automata ==============

class StateDocument(StrictModel):
    node: str  # Module:name
    mark: int = Field(ge=0)


class AutTransitionDocument(StrictModel):
    source: StateDocument = Field(alias="from")
    label: Optional[str] = None  # Module:box, None for ε
    target: StateDocument = Field(alias="to")
    weight: Any = None


class AutomatonDocument(StrictModel):
    semiring: str
    mark_count: int = Field(ge=0)
    fresh_mark: Optional[int] = None
    states: List[StateDocument] = []
    initial: List[StateDocument] = []
    final: List[StateDocument] = []
    transitions: List[AutTransitionDocument] = []


# ============== Settings ==============

class AnalysisSettings(BaseModel):
    """Tunable limits, read from the optional settings file."""
    model_config = ConfigDict(extra="forbid")

    relaxation_cap: int = Field(DEFAULT_RELAXATION_CAP, ge=1)
    oracle_bound_step: int = Field(ORACLE_BOUND_STEP, ge=1)
    oracle_bound_ceiling: int = Field(ORACLE_BOUND_CEILING, ge=0)
    oracle_relaxation_cap: int = Field(ORACLE_RELAXATION_CAP, ge=1)
    block_budget: int = Field(BLOCK_BUDGET, ge=1)
    bench_sizes: List[int] = list(DEFAULT_BENCH_SIZES)
    bench_repetitions: int = Field(BENCH_REPETITIONS, ge=1)

"""
Run counters and the shared console log buffer.
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import List

console_logs: List[dict] = []  # bounded by MAX_LOGS, newest last


@dataclass
class EngineStats:
    """Mutable per-run counters filled by the saturation engines and queries."""
    relaxations: int = 0
    combines: int = 0
    extends: int = 0
    worklist_pops: int = 0
    per_transition: Counter = field(default_factory=Counter)

    @property
    def operations(self) -> int:
        return self.combines + self.extends

    @property
    def max_relaxations_per_transition(self) -> int:
        return max(self.per_transition.values(), default=0)

"""
Shared fixtures: the two-module mutual recursion example, semirings and the
seeded random corpus.
"""
import os
from functools import lru_cache

import pytest

from confdist.modules.module_automaton import singleton_automaton
from confdist.modules.module_confdist import post_star
from confdist.modules.module_generators import random_rsm
from confdist.modules.module_rsm import Configuration, build_rsm, normalize_exit_weights
from confdist.modules.module_semiring import (
    boolean_semiring, genkill_semiring, semiring_from_name, tropical_semiring
)
from confdist.utils.validation import parse_configuration

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

CORPUS_SEEDS = range(200)
CORPUS_SEMIRINGS = ("boolean", "tropical", "genkill:a,b,c")


def two_module_definitions(weight):
    """
    M1 (entries e1_1, e1_2) calls M2 through box b1, M2 (entry e2) calls M1
    through box b2. Every transition carries `weight`.
    """
    return [
        {
            "name": "M1",
            "entries": ["e1_1", "e1_2"],
            "exits": ["x1"],
            "internals": ["u1"],
            "boxes": {"b1": "M2"},
            "transitions": [
                ("e1_1", "b1.e2", weight),
                ("e1_2", "u1", weight),
                ("b1.x2", "u1", weight),
                ("u1", "x1", weight),
            ],
        },
        {
            "name": "M2",
            "entries": ["e2"],
            "exits": ["x2"],
            "boxes": {"b2": "M1"},
            "transitions": [
                ("e2", "b2.e1_1", weight),
                ("e2", "b2.e1_2", weight),
                ("b2.x1", "x2", weight),
                ("e2", "x2", weight),
            ],
        },
    ]


@pytest.fixture
def fixture_path():
    return lambda name: os.path.join(FIXTURES, name)


@pytest.fixture
def boolean():
    return boolean_semiring()


@pytest.fixture
def tropical():
    return tropical_semiring()


@pytest.fixture
def genkill():
    return genkill_semiring(["a", "b", "c"])


@pytest.fixture
def two_module_boolean():
    return build_rsm(boolean_semiring(), two_module_definitions(True))


@pytest.fixture
def two_module_tropical():
    """All weights 1, exit weights already normalized."""
    return normalize_exit_weights(build_rsm(tropical_semiring(), two_module_definitions(1)))


@pytest.fixture
def cfg():
    """cfg(rsm, "u1[b2,b1]") -> Configuration."""
    return parse_configuration


@pytest.fixture
def two_module_post(two_module_boolean):
    return post_star(two_module_boolean, singleton_automaton(two_module_boolean, parse_configuration(two_module_boolean, "e1_1")))


# ============== Random corpus ==============

@lru_cache(maxsize=None)
def corpus_case(seed: int, semiring_name: str):
    """(normalized rsm, initial configuration, A_post*) for one corpus entry."""
    rsm = normalize_exit_weights(random_rsm(seed, semiring_from_name(semiring_name)))
    initial = Configuration(rsm.entries[0][0])
    return rsm, initial, post_star(rsm, singleton_automaton(rsm, initial))


@pytest.fixture
def corpus():
    return corpus_case


@pytest.fixture
def two_module_factory():
    """two_module_factory(semiring, weight) -> raw (unnormalized) example RSM."""
    return lambda semiring, weight: build_rsm(semiring, two_module_definitions(weight))

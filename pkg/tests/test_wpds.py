"""
Weighted pushdown baseline: translation, saturation and agreement with ConfDist.
"""
import pytest

from confdist.core.errors import NonTerminationError
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import accept_weight
from confdist.modules.module_generators import all_configurations, dense_family
from confdist.modules.module_rsm import Configuration
from confdist.modules.module_wpds import (
    NORMAL, rsm_accept_weight, rsm_to_wpds, singleton_pautomaton, wpds_post_star,
)
from conftest import CORPUS_SEEDS, CORPUS_SEMIRINGS


def test_translation_of_example(two_module_boolean):
    wpds, corr = rsm_to_wpds(two_module_boolean)
    assert wpds.control_count == 2
    assert len(wpds.rules) == 10
    pushes = [r for r in wpds.rules if len(r.push) == 2]
    assert len(pushes) == 3
    assert all(r.push[1] >= corr.box_offset for r in pushes)
    pops = [r for r in wpds.rules if not r.push]
    assert {r.new_control for r in pops} == {1}
    assert len(wpds.symbol_names) == len(two_module_boolean.nodes) + len(two_module_boolean.boxes)


def test_correspondence_round_trip(two_module_boolean):
    _, corr = rsm_to_wpds(two_module_boolean)
    for c in all_configurations(two_module_boolean, 2):
        control, word = corr.to_pds(c)
        assert control == NORMAL
        assert corr.to_rsm(control, word) == c
    c = Configuration(two_module_boolean.find_node("u1"))
    assert corr.to_rsm(1, corr.to_pds(c)[1]) is None
    assert corr.to_rsm(NORMAL, ()) is None
    assert corr.to_rsm(NORMAL, (corr.box_symbol(0),)) is None


def test_singleton_pautomaton(two_module_boolean, cfg):
    wpds, corr = rsm_to_wpds(two_module_boolean)
    c = cfg(two_module_boolean, "u1[b2,b1]")
    pa = singleton_pautomaton(wpds, corr, c)
    assert pa.transition_count == 3
    accepted = [d for d in all_configurations(two_module_boolean, 3) if rsm_accept_weight(pa, corr, d) is True]
    assert accepted == [c]


def test_example_matches_confdist(two_module_post, two_module_boolean):
    wpds, corr = rsm_to_wpds(two_module_boolean)
    start = Configuration(two_module_boolean.find_node("e1_1"))
    pa = wpds_post_star(wpds, singleton_pautomaton(wpds, corr, start))
    for c in all_configurations(two_module_boolean, 3):
        assert rsm_accept_weight(pa, corr, c) == accept_weight(two_module_post, c)


def test_tropical_example(two_module_tropical, cfg):
    rsm = two_module_tropical
    wpds, corr = rsm_to_wpds(rsm)
    pa = wpds_post_star(wpds, singleton_pautomaton(wpds, corr, cfg(rsm, "e1_1")))
    assert rsm_accept_weight(pa, corr, cfg(rsm, "u1")) == 3
    assert rsm_accept_weight(pa, corr, cfg(rsm, "u1[b2,b1]")) == 3


def test_relaxation_cap(two_module_boolean, cfg):
    wpds, corr = rsm_to_wpds(two_module_boolean)
    with pytest.raises(NonTerminationError):
        wpds_post_star(wpds, singleton_pautomaton(wpds, corr, cfg(two_module_boolean, "e1_1")), relaxation_cap=0)


def test_counted_run(boolean):
    rsm = dense_family(3, boolean)
    wpds, corr = rsm_to_wpds(rsm)
    stats = EngineStats()
    pa = wpds_post_star(wpds, singleton_pautomaton(wpds, corr, Configuration(rsm.entries[0][0])), stats=stats)
    assert pa.stats is stats
    assert stats.operations > 0
    assert stats.max_relaxations_per_transition <= boolean.height_bound


@pytest.mark.parametrize("semiring_name", CORPUS_SEMIRINGS)
@pytest.mark.parametrize("seed", CORPUS_SEEDS)
def test_agrees_with_confdist(corpus, seed, semiring_name):
    rsm, initial, apost = corpus(seed, semiring_name)
    wpds, corr = rsm_to_wpds(rsm)
    pa = wpds_post_star(wpds, singleton_pautomaton(wpds, corr, initial))
    for c in all_configurations(rsm, 3):
        assert rsm_accept_weight(pa, corr, c) == accept_weight(apost, c), rsm.describe(c)


def test_each_push_rule_gets_its_own_mid_state(boolean):
    rsm = dense_family(3, boolean)
    wpds, corr = rsm_to_wpds(rsm)
    init = singleton_pautomaton(wpds, corr, Configuration(rsm.entries[0][0]))
    pa = wpds_post_star(wpds, init)
    assert len(wpds.push_rules()) == 9
    assert pa.state_count == init.state_count + 9

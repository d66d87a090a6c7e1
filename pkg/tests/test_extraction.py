"""
Distance queries read out of A_post*.
"""
import pytest

from confdist.core.errors import BudgetExceededError, IllFormedConfigurationError
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import accept_weight, singleton_automaton
from confdist.modules.module_confdist import post_star
from confdist.modules.module_extraction import (
    block_precompute, config_distance, node_distances, same_context_distances, superconfig_automaton,
    superconfig_distance, superconfig_distance_blocked, valid_module_sequences,
)
from confdist.modules.module_generators import all_configurations, random_rsm
from confdist.modules.module_oracle import bounded_distances, stabilized_distances
from confdist.modules.module_rsm import Configuration, Superconfiguration, normalize_exit_weights
from confdist.modules.module_semiring import semiring_from_name


def module_stack(rsm, c):
    return tuple(rsm.boxes[b].module for b in c.stack)


def super_by_enumeration(apost, sc, configs):
    sr = apost.semiring
    total = sr.zero
    for c in configs:
        if c.node == sc.node and module_stack(apost.rsm, c) == sc.module_stack:
            total = sr.combine(total, accept_weight(apost, c))
    return total


# ============== Configurations ==============

def test_example_config_distance(two_module_post, cfg):
    rsm = two_module_post.rsm
    assert config_distance(two_module_post, cfg(rsm, "u1[b2,b1]")) is True
    assert config_distance(two_module_post, cfg(rsm, "e1_2")) is False


def test_config_distance_rejects_ill_formed(two_module_post):
    rsm = two_module_post.rsm
    with pytest.raises(IllFormedConfigurationError):
        config_distance(two_module_post, Configuration(rsm.find_node("u1"), (rsm.find_box("b1"),)))


def test_config_distance_counts_operations(two_module_post, cfg):
    stats = EngineStats()
    config_distance(two_module_post, cfg(two_module_post.rsm, "u1[b2,b1]"), stats)
    assert stats.extends > 0


@pytest.mark.parametrize("semiring_name", ["boolean", "tropical", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(40))
def test_normal_form_runs_suffice(corpus, seed, semiring_name):
    """One ε-step then box steps gives the same weight as unrestricted runs."""
    rsm, _, apost = corpus(seed, semiring_name)
    for c in all_configurations(rsm, 3):
        assert config_distance(apost, c) == accept_weight(apost, c)


# ============== Superconfigurations ==============

def test_example_superconfig(two_module_post, cfg):
    rsm = two_module_post.rsm
    maut = superconfig_automaton(two_module_post)
    m1, m2 = rsm.module_index("M1"), rsm.module_index("M2")
    u1 = rsm.find_node("u1")
    assert superconfig_distance(maut, Superconfiguration(u1, (m2, m1))) is True
    assert superconfig_distance(maut, Superconfiguration(u1, ())) is True
    assert superconfig_distance(maut, Superconfiguration(rsm.find_node("e1_2"), ())) is False


def test_one_box_per_module_makes_both_walks_agree(two_module_tropical):
    rsm = two_module_tropical
    apost = post_star(rsm, singleton_automaton(rsm, Configuration(rsm.find_node("e1_1"))))
    maut = superconfig_automaton(apost)
    nodes = {rsm.find_node(name) for name in ("u1", "e1_1", "e1_2", "e2")}
    for c in all_configurations(rsm, 3):
        if c.node in nodes:
            sc = Superconfiguration(c.node, module_stack(rsm, c))
            assert superconfig_distance(maut, sc) == config_distance(apost, c), rsm.describe(c)


def test_module_labels_merge_parallel_boxes(two_module_post):
    maut = superconfig_automaton(two_module_post)
    assert maut.transition_count <= sum(1 for t in two_module_post.transitions() if t.label is not None)


def test_superconfig_rejects_non_control_node(two_module_post):
    maut = superconfig_automaton(two_module_post)
    with pytest.raises(IllFormedConfigurationError):
        superconfig_distance(maut, Superconfiguration(two_module_post.rsm.find_node("x1")))


@pytest.mark.parametrize("semiring_name", ["boolean", "tropical", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(30))
def test_superconfig_equals_refinement_combine(corpus, seed, semiring_name):
    rsm, _, apost = corpus(seed, semiring_name)
    maut = superconfig_automaton(apost)
    configs = all_configurations(rsm, 2)
    seen = {(c.node, module_stack(rsm, c)) for c in configs}
    for node, modules in sorted(seen):
        sc = Superconfiguration(node, modules)
        assert superconfig_distance(maut, sc) == super_by_enumeration(apost, sc, configs)


# ============== Blocks ==============

def test_example_block_table(two_module_post):
    rsm = two_module_post.rsm
    maut = superconfig_automaton(two_module_post)
    table = block_precompute(maut, rsm, 2)
    assert len(table) == 2
    assert len(valid_module_sequences(rsm, 3)) == 2
    assert table.matrix((0, 0, 0)) is None


def test_block_budget(two_module_post):
    maut = superconfig_automaton(two_module_post)
    with pytest.raises(BudgetExceededError):
        block_precompute(maut, two_module_post.rsm, 2, budget=1)
    with pytest.raises(ValueError):
        block_precompute(maut, two_module_post.rsm, 0)


@pytest.mark.parametrize("z", [1, 2, 3])
@pytest.mark.parametrize("seed", range(30))
def test_blocked_queries_match_plain_ones(corpus, seed, z):
    rsm, _, apost = corpus(seed, "tropical")
    maut = superconfig_automaton(apost)
    table = block_precompute(maut, rsm, z)
    sequences = [seq for length in range(1, 6) for seq in valid_module_sequences(rsm, length)]
    for node in rsm.config_nodes():
        for seq in sequences:
            if seq[0] != rsm.module_of(node):
                continue
            sc = Superconfiguration(node, seq[1:])
            assert superconfig_distance_blocked(maut, table, sc) == superconfig_distance(maut, sc)


# ============== Node and same-context distances ==============

def test_example_node_distances(two_module_post, two_module_tropical, cfg):
    rsm = two_module_post.rsm
    distances = node_distances(two_module_post)
    for name in ["e1_1", "e1_2", "u1", "e2", "b1.x2", "b2.x1"]:
        assert distances[rsm.find_node(name)] is True, name

    trop = two_module_tropical
    apost = post_star(trop, singleton_automaton(trop, cfg(trop, "e1_1")))
    distances = node_distances(apost)
    assert distances[trop.find_node("e2")] == 1
    assert distances[trop.find_node("e1_2")] == 2
    assert distances[trop.find_node("u1")] == 3


@pytest.mark.parametrize("semiring_name", ["boolean", "tropical", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(30))
def test_node_distances_on_call_trees(seed, semiring_name):
    rsm = normalize_exit_weights(random_rsm(seed, semiring_from_name(semiring_name), recursion_prob=0.0))
    start = Configuration(rsm.entries[0][0])
    apost = post_star(rsm, singleton_automaton(rsm, start))
    oracle = bounded_distances(rsm, [(start, rsm.semiring.one)], rsm.module_count)
    sr = rsm.semiring
    expected = {node: sr.zero for node in rsm.config_nodes()}
    for c, value in oracle.distances.items():
        expected[c.node] = sr.combine(expected[c.node], value)
    assert node_distances(apost) == expected


@pytest.mark.parametrize("seed", range(30))
def test_node_distances_bound_every_stack(corpus, seed):
    rsm, _, apost = corpus(seed, "tropical")
    distances = node_distances(apost)
    for c in all_configurations(rsm, 2):
        assert rsm.semiring.leq(distances[c.node], accept_weight(apost, c))


def test_example_same_context(two_module_tropical, two_module_boolean):
    rsm = two_module_tropical
    table = same_context_distances(rsm)
    m1 = rsm.module_index("M1")
    assert table[(m1, rsm.find_node("u1"))] == 1
    assert table[(m1, rsm.find_node("e1_1"))] == 0
    # call, e2 -> e2~x2 -> x2, free return
    assert table[(m1, rsm.find_node("b1.x2"))] == 2

    boolean_table = same_context_distances(two_module_boolean)
    assert all(value is True for value in boolean_table.values())


@pytest.mark.parametrize("seed", range(25))
def test_same_context_matches_oracle(seed):
    rsm = normalize_exit_weights(random_rsm(seed, semiring_from_name("tropical")))
    sr = rsm.semiring
    table = same_context_distances(rsm)
    for module in range(rsm.module_count):
        nodes = [n for n in rsm.config_nodes() if rsm.module_of(n) == module]
        seeds = [(Configuration(e), sr.one) for e in rsm.entries[module]]
        oracle = stabilized_distances(rsm, seeds, [Configuration(n) for n in nodes])
        for node in nodes:
            assert table[(module, node)] == oracle.get(Configuration(node))

"""
Post* saturation: worked examples, relaxation, preconditions and output
structure on the random corpus.
"""
import pytest

from confdist.core.errors import AutomatonShapeError, NonTerminationError
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import ConfigAutomaton, accept_weight, singleton_automaton, validate_shape
from confdist.modules.module_confdist import ConfDistEngine, SummaryTable, fold_entry_epsilons, post_star, summaries
from confdist.modules.module_generators import all_configurations
from confdist.modules.module_oracle import stabilized_distances
from confdist.modules.module_rsm import Configuration, build_rsm


# ============== Worked examples ==============

def test_boolean_example_language(two_module_post, cfg):
    rsm = two_module_post.rsm
    for text in ["e1_1", "e2[b1]", "e1_2[b2,b1]", "u1[b2,b1]", "b2.x1[b1]", "b1.x2", "u1"]:
        assert accept_weight(two_module_post, cfg(rsm, text)) is True, text
    assert accept_weight(two_module_post, cfg(rsm, "e1_2")) is False


def test_lone_entry_stays_put(boolean):
    rsm = build_rsm(boolean, [{"name": "M", "entries": ["e"], "exits": ["x"]}])
    start = Configuration(rsm.find_node("e"))
    apost = post_star(rsm, singleton_automaton(rsm, start))
    accepted = [c for c in all_configurations(rsm, 1) if accept_weight(apost, c) is True]
    assert accepted == [start]


def test_tropical_example_distances(two_module_tropical, cfg):
    rsm = two_module_tropical
    apost = post_star(rsm, singleton_automaton(rsm, cfg(rsm, "e1_1")))
    assert accept_weight(apost, cfg(rsm, "u1")) == 3
    assert accept_weight(apost, cfg(rsm, "u1[b2,b1]")) == 3
    assert accept_weight(apost, cfg(rsm, "e2[b1]")) == 1
    assert accept_weight(apost, cfg(rsm, "e1_1")) == 0


def test_tropical_example_matches_oracle(two_module_tropical):
    rsm = two_module_tropical
    start = Configuration(rsm.find_node("e1_1"))
    apost = post_star(rsm, singleton_automaton(rsm, start))
    queries = all_configurations(rsm, 3)
    oracle = stabilized_distances(rsm, [(start, 0)], queries, start=6)
    for c in queries:
        assert accept_weight(apost, c) == oracle.get(c), rsm.describe(c)


# ============== ε-moves between entry states ==============

def caller_and_callee(semiring, weight):
    return build_rsm(semiring, [
        {"name": "Main", "entries": ["s"], "exits": ["x"], "internals": ["u"], "boxes": {"b": "Sub"},
         "transitions": [("b.r", "u", weight)]},
        {"name": "Sub", "entries": ["t"], "exits": ["r"], "internals": ["v"],
         "transitions": [("v", "r", semiring.one)]},
    ])


def mark_switching_automaton(rsm):
    """(v,0) -ε-> (t,0) -ε-> (t,1) -b-> (s,2), accepting exactly ⟨v,[b]⟩."""
    one = rsm.semiring.one
    v, t, s = rsm.find_node("v"), rsm.find_node("t"), rsm.find_node("s")
    aut = ConfigAutomaton(rsm, mark_count=3)
    aut.add_state((v, 0), initial=True)
    aut.set_epsilon((v, 0), (t, 0), one)
    aut.set_epsilon((t, 0), (t, 1), one)
    aut.set_box((t, 1), rsm.find_box("b"), (s, 2), one)
    aut.add_state((s, 2), final=True)
    return aut


def test_return_through_entry_epsilon_chain(boolean, cfg):
    rsm = caller_and_callee(boolean, True)
    aut = mark_switching_automaton(rsm)
    assert validate_shape(aut).ok
    assert accept_weight(aut, cfg(rsm, "v[b]")) is True
    apost = post_star(rsm, aut)
    assert accept_weight(apost, cfg(rsm, "u")) is True
    assert accept_weight(apost, cfg(rsm, "b.r")) is True
    assert validate_shape(apost).ok


def test_entry_epsilon_chain_matches_oracle(tropical, cfg):
    rsm = caller_and_callee(tropical, 2)
    apost = post_star(rsm, mark_switching_automaton(rsm))
    queries = all_configurations(rsm, 2)
    oracle = stabilized_distances(rsm, [(cfg(rsm, "v[b]"), 0)], queries)
    for c in queries:
        assert accept_weight(apost, c) == oracle.get(c), rsm.describe(c)
    assert accept_weight(apost, cfg(rsm, "u")) == 2


def test_entry_epsilons_are_folded_into_their_source(boolean):
    rsm = caller_and_callee(boolean, True)
    folded = fold_entry_epsilons(mark_switching_automaton(rsm))
    t, s = rsm.find_node("t"), rsm.find_node("s")
    assert folded.box_weight((t, 0), rsm.find_box("b"), (s, 2)) is True
    assert all(not folded.is_entry_state(tr.source) for tr in folded.transitions() if tr.label is None)


# ============== Relaxation ==============

@pytest.fixture
def engine(two_module_tropical, cfg):
    rsm = two_module_tropical
    return ConfDistEngine(rsm, singleton_automaton(rsm, cfg(rsm, "e1_1")))


def test_relax_lowers_and_queues(engine):
    rsm = engine.rsm
    key = ((rsm.find_node("u1"), engine.fresh), None, (rsm.find_node("e1_1"), 0))
    assert engine.weight(key) == rsm.semiring.zero
    assert engine.relax(key, 4) is True
    assert engine.weight(key) == 4
    assert key in engine.queued
    assert engine.relax(key, 5) is False
    assert engine.weight(key) == 4
    assert engine.relax(key, 2) is True
    assert engine.stats.per_transition[key] == 2


def test_relax_ignores_zero(engine):
    rsm = engine.rsm
    key = ((rsm.find_node("u1"), engine.fresh), None, (rsm.find_node("e1_1"), 0))
    assert engine.relax(key, rsm.semiring.zero) is False
    assert engine.result.transition_count == 0


def test_boolean_relax_is_idempotent(two_module_boolean, cfg):
    engine = ConfDistEngine(two_module_boolean, singleton_automaton(two_module_boolean, cfg(two_module_boolean, "e1_1")))
    key = ((two_module_boolean.find_node("u1"), engine.fresh), None, (two_module_boolean.find_node("e1_1"), 0))
    assert engine.relax(key, True) is True
    assert engine.relax(key, True) is False


def test_fresh_sources_become_initial(engine):
    rsm = engine.rsm
    source = (rsm.find_node("u1"), engine.fresh)
    engine.relax((source, None, (rsm.find_node("e1_1"), 0)), 1)
    assert source in engine.result.initial


# ============== Preconditions ==============

def test_unnormalized_rsm_is_rejected(two_module_factory, tropical, cfg):
    raw = two_module_factory(tropical, 1)
    with pytest.raises(AutomatonShapeError, match="normalize_exit_weights"):
        post_star(raw, singleton_automaton(raw, cfg(raw, "e1_1")))


def test_non_one_input_weight_is_rejected(two_module_tropical):
    rsm = two_module_tropical
    aut = ConfigAutomaton(rsm, mark_count=1)
    aut.add_state((rsm.find_node("u1"), 0), initial=True)
    aut.set_epsilon((rsm.find_node("u1"), 0), (rsm.find_node("e1_1"), 0), 5)
    aut.add_state((rsm.find_node("e1_1"), 0), final=True)
    with pytest.raises(AutomatonShapeError, match="weight one"):
        post_star(rsm, aut)


def test_foreign_or_saturated_automaton_is_rejected(two_module_post, two_module_factory, boolean, cfg):
    with pytest.raises(AutomatonShapeError, match="already saturated"):
        post_star(two_module_post.rsm, two_module_post)
    other = two_module_factory(boolean, True)
    with pytest.raises(AutomatonShapeError, match="different RSM"):
        post_star(other, singleton_automaton(two_module_post.rsm, cfg(two_module_post.rsm, "e1_1")))


def test_malformed_input_is_rejected(two_module_boolean):
    rsm = two_module_boolean
    aut = ConfigAutomaton(rsm, mark_count=2)
    aut.set_box((rsm.find_node("u1"), 0), rsm.find_box("b2"), (rsm.find_node("e2"), 1), True)
    with pytest.raises(AutomatonShapeError, match="malformed"):
        post_star(rsm, aut)


def test_relaxation_cap_aborts(two_module_boolean, cfg):
    with pytest.raises(NonTerminationError, match="relaxed more than 0 times"):
        post_star(two_module_boolean, singleton_automaton(two_module_boolean, cfg(two_module_boolean, "e1_1")), relaxation_cap=0)


def test_input_is_not_modified(two_module_boolean, cfg):
    aut = singleton_automaton(two_module_boolean, cfg(two_module_boolean, "u1[b2,b1]"))
    before = aut.transitions()
    post_star(two_module_boolean, aut)
    assert aut.transitions() == before
    assert aut.fresh_mark is None


# ============== Summaries ==============

def test_example_summaries(two_module_post, two_module_tropical, cfg):
    rsm = two_module_post.rsm
    table = summaries(two_module_post)
    assert table.get((rsm.find_node("e2"), two_module_post.fresh_mark), rsm.find_node("x2")) is True

    trop = two_module_tropical
    apost = post_star(trop, singleton_automaton(trop, cfg(trop, "e1_1")))
    assert summaries(apost).get((trop.find_node("e2"), apost.fresh_mark), trop.find_node("x2")) == 1


def test_unreached_entry_has_zero_summary(boolean):
    rsm = build_rsm(boolean, [
        {"name": "Main", "entries": ["s"], "exits": ["t"], "transitions": [("s", "t")]},
        {"name": "Idle", "entries": ["e"], "exits": ["x"], "transitions": [("e", "x")]},
    ])
    apost = post_star(rsm, singleton_automaton(rsm, Configuration(rsm.find_node("s"))))
    table = summaries(apost)
    assert table.get((rsm.find_node("e"), apost.fresh_mark), rsm.find_node("x")) is False
    assert table.get((rsm.find_node("s"), 0), rsm.find_node("t")) is True


def test_summaries_need_a_saturated_automaton(two_module_boolean, cfg):
    with pytest.raises(ValueError):
        summaries(singleton_automaton(two_module_boolean, cfg(two_module_boolean, "e1_1")))


def test_summary_table_defaults_to_zero():
    table = SummaryTable(zero=float("inf"))
    assert table.get((0, 0), 1) == float("inf")
    table.set((0, 0), 1, 3)
    assert list(table.items()) == [(((0, 0), 1), 3)]
    assert len(table) == 1


@pytest.mark.parametrize("semiring_name", ["tropical", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(25))
def test_fresh_summaries_are_same_context_distances(corpus, seed, semiring_name):
    rsm, _, apost = corpus(seed, semiring_name)
    sr = rsm.semiring
    by_entry = {}
    for ((entry, mark), exit_node), value in summaries(apost).items():
        if mark == apost.fresh_mark:
            by_entry.setdefault(entry, []).append((exit_node, value))
    for entry, rows in by_entry.items():
        # exits cannot hold control, so measure up to their predecessors
        preds = {x: [(u, w) for u, targets in rsm.out_exit.items() for y, w in targets if y == x] for x, _ in rows}
        queries = [Configuration(u) for edges in preds.values() for u, _ in edges]
        oracle = stabilized_distances(rsm, [(Configuration(entry), sr.one)], queries)
        for exit_node, value in rows:
            expected = sr.zero
            for u, w in preds[exit_node]:
                expected = sr.combine(expected, sr.extend(oracle.get(Configuration(u)), w))
            assert value == expected


# ============== Output structure on the corpus ==============

@pytest.mark.parametrize("semiring_name", ["boolean", "tropical", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(60))
def test_output_structure(corpus, seed, semiring_name):
    rsm, initial, apost = corpus(seed, semiring_name)
    report = validate_shape(apost)
    assert report.ok, report.violations
    assert apost.frozen
    assert apost.fresh_mark == 1
    assert apost.final == {(rsm.entries[0][0], 0)}
    assert all(q[1] == apost.fresh_mark for q in apost.initial if q != (initial.node, 0))
    assert all(q in apost.initial for q in apost.states if q[1] == apost.fresh_mark)
    bound = rsm.size * rsm.theta_entries * apost.marks ** 2
    assert apost.transition_count <= bound


@pytest.mark.parametrize("semiring_name", ["boolean", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(60))
def test_relaxations_respect_height(corpus, seed, semiring_name):
    rsm, _, apost = corpus(seed, semiring_name)
    assert apost.stats.max_relaxations_per_transition <= rsm.semiring.height_bound


@pytest.mark.parametrize("semiring_name", ["tropical", "genkill:a,b,c"])
@pytest.mark.parametrize("seed", range(25))
def test_fresh_epsilon_weights_are_same_context_distances(corpus, seed, semiring_name):
    rsm, _, apost = corpus(seed, semiring_name)
    fresh = apost.fresh_mark
    sr = rsm.semiring
    by_entry = {}
    for t in apost.transitions():
        if t.label is None and t.source[1] == fresh and t.target[1] == fresh:
            by_entry.setdefault(t.target[0], []).append(t)
    for entry, transitions in by_entry.items():
        queries = [Configuration(t.source[0]) for t in transitions]
        oracle = stabilized_distances(rsm, [(Configuration(entry), sr.one)], queries)
        for t in transitions:
            assert t.weight == oracle.get(Configuration(t.source[0]))


def test_counted_run_reports_operations(two_module_boolean, cfg):
    stats = EngineStats()
    apost = post_star(two_module_boolean, singleton_automaton(two_module_boolean, cfg(two_module_boolean, "e1_1")), stats=stats)
    assert apost.stats is stats
    assert stats.operations > 0
    assert stats.relaxations == sum(stats.per_transition.values())
    assert stats.worklist_pops > 0

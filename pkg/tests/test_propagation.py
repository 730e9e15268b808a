import random

import pytest
from hypothesis import given, settings, strategies as st

from relp.cooccurrence import CoocMatrix, build_matrix
from relp.corpus import Corpus, SeedSet, Stance
from relp.propagation import (
    LabelState,
    LabelTable,
    PropagationConfig,
    PropagationError,
    dump_trace,
    finalize,
    hash_bucket,
    init_labels,
    propagate,
    seed_selection,
)

from conftest import tw
from oracles import random_corpus, random_seeds, reference_propagation

SEEDS = SeedSet({"s_for": Stance.FOR, "s_against": Stance.AGAINST})


def matrix(pairs: dict[tuple[str, str], int], dens: dict[str, int]) -> CoocMatrix:
    """Hand-built matrix from co-retweet counts per unordered pair and column sizes."""
    neighbors: dict[str, dict] = {t: {} for t in dens}
    for (a, b), count in pairs.items():
        neighbors[a][b] = count
        neighbors[b][a] = count
    return CoocMatrix({t: tuple(sorted(v.items())) for t, v in neighbors.items()}, dens)


@pytest.mark.parametrize("v,n,expected", [
    (0.55, 10, 5), (0.0, 10, 0), (1.0, 10, 10), (1.7, 10, 10), (-0.2, 10, 0), (0.999, 1, 0),
])
def test_hash_bucket(v, n, expected):
    assert hash_bucket(v, n) == expected


def test_init_labels():
    c = Corpus([
        tw("t1", "s_for"), tw("t2", "s_for"), tw("t3", "x"),
        tw("t4", "s_against"), tw("r", "s_against", retweet_of="t3"),
    ])
    table = init_labels(c, SEEDS)
    assert table.active["t1"] == table.active["t2"] == LabelState(1.0, 0.0)
    assert table.active["t4"] == LabelState(0.0, 1.0)
    assert table.active["t3"] == LabelState(0.0, 0.0)
    # a seed's retweet is not initialized
    assert table.active["r"] == LabelState(0.0, 0.0)
    assert table.pinned == {"t1", "t2", "t4"}
    assert not table.finalized


def test_init_without_seed_tweets():
    c = Corpus([tw("t", "x"), tw("r", "s_for", retweet_of="t")])
    with pytest.raises(PropagationError, match="no seed tweets present"):
        init_labels(c, SEEDS)


def table_of(values):
    return LabelTable({t: LabelState(*v) for t, v in values.items()})


def test_seed_selection_highest_bucket():
    t = table_of({"t1": (0.73, 0.10), "t2": (0.35, 0.20), "t3": (0.35, 0.41)})
    # by hand: buckets t1 -> 7, t2 -> 3, t3 -> 4
    assert seed_selection(t, PropagationConfig(10)) == {"t1"}


def test_seed_selection_terminates_at_zero():
    assert seed_selection(table_of({"a": (0, 0), "b": (0.05, 0.0)})) == set()


def test_seed_selection_ties_in_bucket():
    t = table_of({"a": (0.71, 0), "b": (0, 0.79), "c": (0.6, 0.1)})
    assert seed_selection(t) == {"a", "b"}


def test_two_tweet_trace():
    m = matrix({("t1", "t2"): 1}, {"t1": 1, "t2": 2})
    assert m.weight("t1", "t2") == 0.5 and m.weight("t2", "t1") == 1.0
    start = table_of({"t1": (1, 0), "t2": (0, 0)})
    seen = []
    out = propagate(m, start, on_iteration=lambda i, t: seen.append((i, dict(t.finalized))))
    assert out.trace == [(1, "t1", 1.0, 0.0), (2, "t2", 0.5, 0.0)]
    assert out.iterations == 2 and not out.active
    assert seen[0][1] == {"t1": LabelState(1, 0)}
    # input table untouched
    assert start.active["t2"] == LabelState(0, 0)


def test_clamp_two_contributors():
    m = matrix({("a", "c"): 7, ("b", "c"): 6}, {"a": 7, "b": 6, "c": 10})
    out = propagate(m, table_of({"a": (1, 0), "b": (1, 0), "c": (0, 0)}))
    assert out.finalized["c"].for_value == 1.0


def test_later_batch_member_receives_from_earlier():
    # a and b both start in bucket 10; a pushes against-mass into b before b pushes
    m = matrix({("a", "b"): 1}, {"a": 1, "b": 2})
    out = propagate(m, table_of({"a": (0, 1), "b": (1, 0)}))
    assert out.finalized["a"] == LabelState(0, 1)
    assert out.finalized["b"] == LabelState(1, 0.5)
    assert out.iterations == 1


def test_pinned_seed_tweets_receive_nothing():
    # the only retweeter of the against seed also retweeted the for seed:
    # M[f][a] = 1, so without pinning "a" would finalize at (1, 1) and tie
    c = Corpus([
        tw("f", "s_for"), tw("a", "s_against"),
        tw("r1", "u1", retweet_of="f"), tw("r2", "u1", retweet_of="a"),
        tw("r3", "u2", retweet_of="f"),
    ])
    m = build_matrix(c)
    assert m.weight("f", "a") == 1.0
    table = propagate(m, init_labels(c, SEEDS))
    final = finalize(table, c)
    assert final.labeled == {"f": Stance.FOR, "a": Stance.AGAINST}


def test_isolated_seeds():
    c = Corpus([
        tw("f", "s_for"), tw("a", "s_against"), tw("x", "u"), tw("y", "v"),
        tw("r1", "w", retweet_of="x"), tw("r2", "w", retweet_of="y"),
    ])
    table = propagate(build_matrix(c), init_labels(c, SEEDS))
    final = finalize(table, c)
    assert final.labeled == {"f": Stance.FOR, "a": Stance.AGAINST}
    assert final.unlabeled == {"x", "y", "r1", "r2"}


def test_finalize_rules():
    c = Corpus([tw(t, "u") for t in "abcd"])
    table = LabelTable(
        active={"d": LabelState(0.04, 0.0)},
        finalized={"a": LabelState(0.5, 0.2), "b": LabelState(0.3, 0.3), "c": LabelState(0.1, 0.6)},
    )
    final = finalize(table, c)
    assert final.labeled == {"a": Stance.FOR, "c": Stance.AGAINST}
    assert final.unlabeled == {"b", "d"}


def test_never_selected_low_mass_is_unlabeled():
    # t2 gets 0.04 of mass (bucket 0) and is never selected
    m = matrix({("t1", "t2"): 1}, {"t1": 1, "t2": 25})
    c = Corpus([tw("t1", "u"), tw("t2", "v")])
    table = propagate(m, table_of({"t1": (1, 0), "t2": (0, 0)}))
    assert table.active["t2"] == LabelState(0.04, 0.0)
    assert finalize(table, c).unlabeled == {"t2"}


def test_config_validation():
    with pytest.raises(ValueError):
        PropagationConfig(0)
    with pytest.raises(ValueError):
        PropagationConfig(clamp=False)


def test_trace_dump(tmp_path):
    m = matrix({("t1", "t2"): 1}, {"t1": 1, "t2": 2})
    out = propagate(m, table_of({"t1": (1, 0), "t2": (0, 0)}))
    path = tmp_path / "trace.tsv"
    dump_trace(out, path)
    assert path.read_text() == "1\tt1\t1.000000\t0.000000\n2\tt2\t0.500000\t0.000000\n"


def random_instance(seed, max_tweets=20):
    rng = random.Random(seed)
    for _ in range(50):
        c = random_corpus(rng, max_tweets, 6, p_retweet=0.6)
        seeds = random_seeds(rng, c)
        if seeds is not None and c.n_retweets:
            return c, seeds
    return None


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**9), n=st.sampled_from([1, 3, 10, 20]))
def test_engine_matches_reference_and_invariants(seed, n):
    inst = random_instance(seed)
    if inst is None:
        return
    c, seeds = inst
    cfg = PropagationConfig(n)
    snapshots = []

    def check(i, t):
        snapshots.append({k: (v.for_value, v.against_value) for k, v in t.finalized.items()})
        for s in list(t.active.values()) + list(t.finalized.values()):
            assert 0 <= s.for_value <= 1 and 0 <= s.against_value <= 1

    start = init_labels(c, seeds)
    table = propagate(build_matrix(c), start, cfg, on_iteration=check)
    final = finalize(table, c)
    ref_stances, ref_values, ref_iters = reference_propagation(c, seeds, n)

    assert final.labeled == ref_stances
    assert {t: [s.for_value, s.against_value] for t, s in table.finalized.items()} == ref_values
    assert table.iterations == ref_iters <= len(c)
    # monotone, strictly growing finalized set with frozen values
    for before, after in zip(snapshots, snapshots[1:]):
        assert len(after) > len(before)
        assert all(after[k] == v for k, v in before.items())
    # each tweet pushed exactly once
    pushed = [t for _, t, _, _ in table.trace]
    assert len(pushed) == len(set(pushed)) == len(table.finalized)
    assert not set(table.active) & set(table.finalized)
    assert final.unlabeled | set(final.labeled) == {t.id for t in c}
    # every seed user's original tweet keeps its seed stance
    for t in start.pinned:
        assert final.labeled[t] is seeds[c[t].user_id]

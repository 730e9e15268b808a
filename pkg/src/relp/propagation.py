"""Bucketed label propagation over the co-occurrence matrix.

Every tweet carries a (for, against) pair in [0, 1]. Each round selects the
active tweets whose stronger field falls in the highest occupied bucket,
pushes their mass to co-occurring active tweets and retires them. Bucket 0
is never selected, which is what ends the loop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .cooccurrence import CoocMatrix
from .corpus import Corpus, SeedSet, Stance


class PropagationError(ValueError):
    pass


@dataclass
class LabelState:
    for_value: float = 0.0
    against_value: float = 0.0

    @property
    def max_value(self) -> float:
        return max(self.for_value, self.against_value)

    def copy(self) -> "LabelState":
        return LabelState(self.for_value, self.against_value)


@dataclass
class LabelTable:
    active: dict[str, LabelState]
    finalized: dict[str, LabelState] = field(default_factory=dict)
    # (iteration, tweet id, for, against) per finalization, in order
    trace: list[tuple[int, str, float, float]] = field(default_factory=list)
    iterations: int = 0
    # seed tweets: never receive mass from other tweets
    pinned: frozenset[str] = frozenset()

    def copy(self) -> "LabelTable":
        return LabelTable(
            {t: s.copy() for t, s in self.active.items()},
            {t: s.copy() for t, s in self.finalized.items()},
            list(self.trace),
            self.iterations,
            self.pinned,
        )


@dataclass(frozen=True)
class PropagationConfig:
    n_buckets: int = 10
    clamp: bool = True

    def __post_init__(self):
        if self.n_buckets < 1:
            raise ValueError("n_buckets must be >= 1")
        if not self.clamp:
            raise ValueError("clamping cannot be disabled")


@dataclass(frozen=True)
class FinalLabeling:
    labeled: dict[str, Stance]
    unlabeled: frozenset[str]


def hash_bucket(v: float, n: int) -> int:
    return math.floor(min(max(v, 0.0), 1.0) * n)


def init_labels(corpus: Corpus, seeds: SeedSet) -> LabelTable:
    """Give each seed user's original tweets their seed stance at full strength.

    Those tweets are pinned: opposite-stance seed tweets selected in the same
    first batch would otherwise push mass into each other and could tie.
    """
    if not len(corpus):
        raise PropagationError("empty corpus")
    active = {tw.id: LabelState() for tw in corpus.tweets}
    pinned = set()
    for user_id, stance in seeds.items():
        for tw in corpus.originals_of(user_id):
            if stance is Stance.FOR:
                active[tw.id] = LabelState(1.0, 0.0)
            else:
                active[tw.id] = LabelState(0.0, 1.0)
            pinned.add(tw.id)
    if not pinned:
        raise PropagationError("no seed tweets present")
    return LabelTable(active, pinned=frozenset(pinned))


def seed_selection(table: LabelTable, cfg: PropagationConfig = PropagationConfig()) -> set[str]:
    """Active tweets in the highest occupied bucket; empty once that bucket is 0."""
    buckets = {t: hash_bucket(s.max_value, cfg.n_buckets) for t, s in table.active.items()}
    top = max(buckets.values(), default=0)
    if top == 0:
        return set()
    return {t for t, b in buckets.items() if b == top}


def propagate(
    m: CoocMatrix,
    table: LabelTable,
    cfg: PropagationConfig = PropagationConfig(),
    on_iteration: Callable[[int, LabelTable], None] | None = None,
) -> LabelTable:
    """Run propagation to completion and return the resulting table.

    The input table is not modified. Within a batch, tweets push in ascending
    id order and a batch member that has not pushed yet can still receive mass.
    ``on_iteration`` is called after each round with the round number.
    """
    table = table.copy()
    active, finalized = table.active, table.finalized
    n = cfg.n_buckets

    # bucket index over active tweets with nonzero bucket
    buckets: dict[int, set[str]] = {}
    where: dict[str, int] = {}
    for t, state in active.items():
        b = hash_bucket(state.max_value, n)
        if b:
            buckets.setdefault(b, set()).add(t)
            where[t] = b

    def rebucket(t: str, b: int) -> None:
        old = where.get(t, 0)
        if b == old:
            return
        if old:
            buckets[old].discard(t)
            if not buckets[old]:
                del buckets[old]
        if b:
            buckets.setdefault(b, set()).add(t)
            where[t] = b
        else:
            where.pop(t, None)

    iteration = table.iterations
    while buckets:
        iteration += 1
        top = max(buckets)
        for t_i in sorted(buckets[top]):
            src = active[t_i]
            for t_j, w in m.row(t_i):
                dst = active.get(t_j)
                if dst is None or t_j in table.pinned:
                    continue
                dst.for_value = min(1.0, dst.for_value + src.for_value * w)
                dst.against_value = min(1.0, dst.against_value + src.against_value * w)
                rebucket(t_j, hash_bucket(dst.max_value, n))
            rebucket(t_i, 0)
            del active[t_i]
            finalized[t_i] = src
            table.trace.append((iteration, t_i, src.for_value, src.against_value))
        table.iterations = iteration
        if on_iteration is not None:
            on_iteration(iteration, table)
    return table


def finalize(table: LabelTable, corpus: Corpus) -> FinalLabeling:
    """Label finalized tweets by their stronger field; ties and the rest stay unlabeled."""
    labeled: dict[str, Stance] = {}
    for tw in corpus.tweets:
        state = table.finalized.get(tw.id)
        if state is None:
            continue
        if state.for_value > state.against_value:
            labeled[tw.id] = Stance.FOR
        elif state.against_value > state.for_value:
            labeled[tw.id] = Stance.AGAINST
    unlabeled = frozenset(tw.id for tw in corpus.tweets if tw.id not in labeled)
    return FinalLabeling(labeled, unlabeled)


def run_propagation(
    m: CoocMatrix,
    corpus: Corpus,
    seeds: SeedSet,
    cfg: PropagationConfig = PropagationConfig(),
) -> tuple[LabelTable, FinalLabeling]:
    table = propagate(m, init_labels(corpus, seeds), cfg)
    return table, finalize(table, corpus)


def dump_trace(table: LabelTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for iteration, t, fv, av in table.trace:
            f.write(f"{iteration}\t{t}\t{fv:.6f}\t{av:.6f}\n")

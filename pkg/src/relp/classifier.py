"""Multinomial naive Bayes over n-gram counts, plus user-level vote aggregation."""
from __future__ import annotations

import enum
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, Stance
from .features import FeatureVector, featurize
from .propagation import FinalLabeling

CLASSES = (Stance.FOR, Stance.AGAINST)
# log-score gaps below this are ties (float noise between equal rationals)
TIE_TOLERANCE = 1e-9


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class MNBModel:
    class_log_prior: dict[Stance, float]
    feature_log_likelihood: dict[Stance, dict[str, float]]
    vocabulary: frozenset[str]
    alpha: float

    def dump(self, path: str | Path) -> None:
        """Write priors then ``class<TAB>ngram<TAB>log_likelihood`` lines, sorted."""
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for c in CLASSES:
                f.write(f"# prior\t{c.value}\t{self.class_log_prior[c]:.6f}\n")
            for c in CLASSES:
                table = self.feature_log_likelihood[c]
                for w in sorted(self.vocabulary):
                    f.write(f"{c.value}\t{w}\t{table[w]:.6f}\n")


def train(docs: Sequence[tuple[FeatureVector, Stance]], alpha: float = 1.0) -> MNBModel:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if {stance for _, stance in docs} != set(CLASSES):
        raise TrainingError("degenerate training set")
    n_docs = Counter(stance for _, stance in docs)
    counts = {c: Counter() for c in CLASSES}
    for fv, stance in docs:
        counts[stance].update(fv)
    vocabulary = frozenset(w for c in CLASSES for w in counts[c])
    if not vocabulary:
        raise TrainingError("training set has no features")
    total = len(docs)
    priors = {c: math.log(n_docs[c] / total) for c in CLASSES}
    likelihood = {}
    for c in CLASSES:
        denom = sum(counts[c].values()) + alpha * len(vocabulary)
        likelihood[c] = {w: math.log((counts[c][w] + alpha) / denom) for w in sorted(vocabulary)}
    return MNBModel(priors, likelihood, vocabulary, alpha)


def predict(model: MNBModel, fv: FeatureVector) -> tuple[Stance, dict[Stance, float]]:
    """Most probable class and per-class log scores.

    Out-of-vocabulary n-grams are ignored. Ties go to AGAINST.
    """
    scores = {}
    for c in CLASSES:
        table = model.feature_log_likelihood[c]
        terms = [model.class_log_prior[c]]
        for w in sorted(fv):
            if w in table:
                terms.extend([table[w]] * fv[w])
        scores[c] = math.fsum(terms)
    gap = scores[Stance.FOR] - scores[Stance.AGAINST]
    best = Stance.FOR if gap > TIE_TOLERANCE else Stance.AGAINST
    return best, scores


class Source(str, enum.Enum):
    PROPAGATED = "propagated"
    CLASSIFIED = "classified"
    MIXED = "mixed"


@dataclass(frozen=True)
class UserStanceResult:
    user_id: str
    stance: Stance
    tweet_votes: dict[Stance, int]
    source: Source
    margin: float = 0.0


def vote(
    labels: Iterable[tuple[Stance, float]],
) -> tuple[Stance, dict[Stance, int], float]:
    """Majority over (label, for-minus-against margin) pairs.

    A tied vote falls back to the sign of the summed margins, then to AGAINST.
    """
    votes = {c: 0 for c in CLASSES}
    margin = 0.0
    for stance, m in labels:
        votes[stance] += 1
        margin += m
    if votes[Stance.FOR] != votes[Stance.AGAINST]:
        return max(CLASSES, key=votes.__getitem__), votes, margin
    return (Stance.FOR if margin > 0 else Stance.AGAINST), votes, margin


def aggregate_users(
    corpus: Corpus,
    tweet_labels: Mapping[str, Stance],
    margins: Mapping[str, float],
    propagated: frozenset[str] | set[str] = frozenset(),
) -> list[UserStanceResult]:
    """Per-user majority vote over tweet labels, in user-id order."""
    results = []
    for user_id in sorted(corpus.users):
        ids = [t for t in corpus.users[user_id] if t in tweet_labels]
        if not ids:
            continue
        stance, votes, margin = vote((tweet_labels[t], margins[t]) for t in ids)
        n_prop = sum(1 for t in ids if t in propagated)
        if n_prop == len(ids):
            source = Source.PROPAGATED
        elif n_prop == 0:
            source = Source.CLASSIFIED
        else:
            source = Source.MIXED
        results.append(UserStanceResult(user_id, stance, votes, source, margin))
    return results


def predict_tweets(
    model: MNBModel, corpus: Corpus, tweet_ids: Sequence[str], threads: int = 1,
) -> dict[str, tuple[Stance, float]]:
    """Predicted stance and for-minus-against log-score margin per tweet."""

    def one(t: str) -> tuple[Stance, float]:
        stance, scores = predict(model, featurize(corpus[t].text))
        return stance, scores[Stance.FOR] - scores[Stance.AGAINST]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(one, tweet_ids))
    else:
        out = [one(t) for t in tweet_ids]
    return dict(zip(tweet_ids, out))


def classify_users(
    corpus: Corpus, final: FinalLabeling, model: MNBModel, threads: int = 1,
) -> list[UserStanceResult]:
    """Label every tweet (propagated label if any, else predicted) and vote per user.

    Propagated tweets contribute a margin of +1 or -1 to the tie-break.
    """
    labels: dict[str, Stance] = {}
    margins: dict[str, float] = {}
    for t, stance in final.labeled.items():
        labels[t] = stance
        margins[t] = 1.0 if stance is Stance.FOR else -1.0
    remaining = [tw.id for tw in corpus.tweets if tw.id not in final.labeled]
    for t, (stance, margin) in predict_tweets(model, corpus, remaining, threads).items():
        labels[t] = stance
        margins[t] = margin
    return aggregate_users(corpus, labels, margins, frozenset(final.labeled))


def training_docs(corpus: Corpus, final: FinalLabeling) -> list[tuple[FeatureVector, Stance]]:
    """Propagated tweets as training examples, in corpus order."""
    return [
        (featurize(tw.text), final.labeled[tw.id])
        for tw in corpus.tweets
        if tw.id in final.labeled
    ]

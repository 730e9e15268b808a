"""Comparison methods: seed-trained NB (B1), hashtag-trained NB (B2) and
seeded spherical k-means (B3)."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .classifier import MNBModel, TrainingError, train
from .corpus import Corpus, CorpusError, SeedSet, Stance
from .features import FeatureVector, featurize, tokenize


class BaselineError(ValueError):
    pass


@dataclass(frozen=True)
class HashtagSeeds:
    for_tags: frozenset[str]
    against_tags: frozenset[str]

    def __post_init__(self):
        for tag in self.for_tags | self.against_tags:
            if not tag.startswith("#") or tag != tag.lower():
                raise BaselineError(f"hashtag {tag!r} must be lowercase and start with #")
        if self.for_tags & self.against_tags:
            raise BaselineError("hashtag seed sets overlap")

    @property
    def all_tags(self) -> frozenset[str]:
        return self.for_tags | self.against_tags


def load_hashtags(path: str | Path) -> HashtagSeeds:
    tags: dict[Stance, set[str]] = {Stance.FOR: set(), Stance.AGAINST: set()}
    with open(path, "r", encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise CorpusError(f"line {lineno}: expected 2 columns, got {len(row)}")
            tag = row[0].strip().lower()
            if not tag.startswith("#"):
                tag = "#" + tag
            tags[Stance.parse(row[1])].add(tag)
    return HashtagSeeds(frozenset(tags[Stance.FOR]), frozenset(tags[Stance.AGAINST]))


def seed_tweets(corpus: Corpus, seeds: SeedSet) -> list[tuple[str, Stance]]:
    """Original tweets of seed users with their seed stance, in corpus order."""
    out = []
    for tw in corpus.tweets:
        if tw.user_id in seeds and not tw.is_retweet:
            out.append((tw.id, seeds[tw.user_id]))
    return out


def train_b1(corpus: Corpus, seeds: SeedSet, alpha: float = 1.0) -> MNBModel:
    docs = [(featurize(corpus[t].text), s) for t, s in seed_tweets(corpus, seeds)]
    if not docs:
        raise TrainingError("seed users have no original tweets")
    return train(docs, alpha)


def build_b2_training(corpus: Corpus, tags: HashtagSeeds) -> list[tuple[FeatureVector, Stance]]:
    """Tweets carrying hashtags from exactly one side, with those hashtags removed."""
    docs = []
    for tw in corpus.tweets:
        tokens = set(tokenize(tw.text))
        has_for = bool(tokens & tags.for_tags)
        has_against = bool(tokens & tags.against_tags)
        if has_for == has_against:
            continue
        stance = Stance.FOR if has_for else Stance.AGAINST
        docs.append((featurize(tw.text, drop=tags.all_tags), stance))
    sides = {s for _, s in docs}
    if sides != {Stance.FOR, Stance.AGAINST}:
        raise BaselineError("hashtag seeds matched no tweets")
    return docs


def train_b2(corpus: Corpus, tags: HashtagSeeds, alpha: float = 1.0) -> MNBModel:
    return train(build_b2_training(corpus, tags), alpha)


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 2
    max_iterations: int = 100

    def __post_init__(self):
        if self.k != 2:
            raise ValueError("k is fixed at 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class KMeansResult:
    labels: dict[str, Stance]
    # cos(x, for centroid) - cos(x, against centroid), per tweet
    margins: dict[str, float]
    iterations: int
    objective: list[float]


def _unit_rows(corpus: Corpus) -> tuple[list[str], sp.csr_matrix]:
    ids = [tw.id for tw in corpus.tweets]
    vectors = [featurize(tw.text) for tw in corpus.tweets]
    vocab = {w: k for k, w in enumerate(sorted({w for fv in vectors for w in fv}))}
    rows, cols, vals = [], [], []
    for r, fv in enumerate(vectors):
        for w, c in fv.items():
            rows.append(r)
            cols.append(vocab[w])
            vals.append(float(c))
    x = sp.csr_matrix((vals, (rows, cols)), shape=(len(ids), max(len(vocab), 1)))
    norms = np.sqrt(np.asarray(x.multiply(x).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    return ids, sp.diags(1.0 / norms) @ x


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def kmeans_b3(corpus: Corpus, seeds: SeedSet, cfg: KMeansConfig = KMeansConfig()) -> KMeansResult:
    """Two-means with cosine distance, started from the per-side seed-tweet means.

    Cluster 0 starts from the FOR seeds and cluster 1 from the AGAINST seeds,
    and each keeps that stance. An empty cluster keeps its previous centroid.
    Similarity ties, including all-zero vectors, go to AGAINST.
    """
    ids, x = _unit_rows(corpus)
    row = {t: k for k, t in enumerate(ids)}
    seeded = seed_tweets(corpus, seeds)
    centroids = []
    for side in (Stance.FOR, Stance.AGAINST):
        members = [row[t] for t, s in seeded if s is side]
        if not members:
            raise BaselineError(f"no seed tweets for stance {side.value}")
        centroids.append(_unit(np.asarray(x[members].mean(axis=0)).ravel()))

    assign = None
    objective: list[float] = []
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        sims = np.column_stack([x @ c for c in centroids])
        new = np.where(sims[:, 0] > sims[:, 1], 0, 1)
        objective.append(float(np.sum(1.0 - sims[np.arange(len(ids)), new])))
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        for k in range(2):
            members = np.flatnonzero(assign == k)
            if len(members):
                centroids[k] = _unit(np.asarray(x[members].sum(axis=0)).ravel())

    sims = np.column_stack([x @ c for c in centroids])
    sides = (Stance.FOR, Stance.AGAINST)
    labels = {t: sides[int(assign[k])] for k, t in enumerate(ids)}
    margins = {t: float(sims[k, 0] - sims[k, 1]) for k, t in enumerate(ids)}
    return KMeansResult(labels, margins, iterations, objective)


def run_b3(corpus: Corpus, seeds: SeedSet, cfg: KMeansConfig = KMeansConfig()) -> dict[str, Stance]:
    return kmeans_b3(corpus, seeds, cfg).labels

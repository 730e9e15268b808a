"""Column-normalized retweet co-occurrence matrix.

Entry ``(t_i, t_j)`` is the number of users who retweeted both tweets divided
by the number of users who retweeted ``t_j``. Counts are kept as integers;
weights are materialized on read.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class CoocMatrix:
    # tweet -> ((other tweet, co-retweeter count), ...) sorted by other tweet id;
    # the count is symmetric, so one adjacency serves rows and columns
    neighbors: dict[str, tuple[tuple[str, int], ...]]
    col_denominator: dict[str, int]

    def __contains__(self, tweet_id: object) -> bool:
        return tweet_id in self.col_denominator

    def __len__(self) -> int:
        return len(self.col_denominator)

    @property
    def nnz(self) -> int:
        return sum(len(v) for v in self.neighbors.values())

    def fraction(self, t_i: str, t_j: str) -> Fraction:
        """Exact value of M[t_i][t_j]; zero when not stored."""
        for other, count in self.neighbors.get(t_j, ()):
            if other == t_i:
                return Fraction(count, self.col_denominator[t_j])
        return Fraction(0)

    def weight(self, t_i: str, t_j: str) -> float:
        return float(self.fraction(t_i, t_j))

    def column(self, t_j: str) -> list[tuple[str, float]]:
        """Entries M[t_i][t_j] for every t_i: the mass t_j receives per unit of t_i."""
        den = self.col_denominator.get(t_j)
        if den is None:
            return []
        return [(t_i, count / den) for t_i, count in self.neighbors[t_j]]

    def row(self, t_i: str) -> list[tuple[str, float]]:
        """Entries M[t_i][t_j] for every t_j: where t_i pushes its labels."""
        return [
            (t_j, count / self.col_denominator[t_j])
            for t_j, count in self.neighbors.get(t_i, ())
        ]

    def entries(self):
        """Yield ``(t_i, t_j, numerator, denominator)`` sorted by (t_j, t_i)."""
        for t_j in sorted(self.col_denominator):
            den = self.col_denominator[t_j]
            for t_i, count in self.neighbors[t_j]:
                yield t_i, t_j, count, den


def build_matrix(corpus: Corpus) -> CoocMatrix:
    """Build M over every tweet in ``corpus`` that has at least one retweeter.

    Retweets whose referent is not in the corpus are ignored.
    """
    targets = sorted(t for t in corpus.retweeters if t in corpus)
    if not targets:
        raise MatrixError("no retweet structure")
    users = sorted({u for t in targets for u in corpus.retweeters[t]})
    user_idx = {u: k for k, u in enumerate(users)}
    rows, cols = [], []
    for j, t in enumerate(targets):
        for u in corpus.retweeters[t]:
            rows.append(user_idx[u])
            cols.append(j)
    data = np.ones(len(rows), dtype=np.int64)
    incidence = sp.csc_matrix((data, (rows, cols)), shape=(len(users), len(targets)))
    # co[i, j] = |retweeters(i) & retweeters(j)|; the diagonal holds |retweeters(j)|
    co = (incidence.T @ incidence).tocsc()
    co.sort_indices()

    neighbors: dict[str, tuple[tuple[str, int], ...]] = {}
    denominators: dict[str, int] = {}
    for j, t_j in enumerate(targets):
        start, stop = co.indptr[j], co.indptr[j + 1]
        idx = co.indices[start:stop]
        vals = co.data[start:stop]
        denominators[t_j] = len(corpus.retweeters[t_j])
        # targets is sorted, so ascending row index is ascending tweet id
        neighbors[t_j] = tuple(
            (targets[i], int(v)) for i, v in zip(idx, vals) if i != j and v > 0
        )
    return CoocMatrix(neighbors, denominators)


def dump_matrix(m: CoocMatrix, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t_i, t_j, num, den in m.entries():
            f.write(f"{t_i}\t{t_j}\t{num}\t{den}\n")

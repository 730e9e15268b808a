"""Tweet corpus and seed-user loading, validation and filtering."""
from __future__ import annotations

import csv
import enum
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

logger = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Raised for malformed corpus or seed input."""


class Stance(str, enum.Enum):
    FOR = "for"
    AGAINST = "against"

    @classmethod
    def parse(cls, value: str) -> "Stance":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise CorpusError(f"unknown stance {value!r}") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Tweet:
    id: str
    user_id: str
    text: str
    timestamp: int
    retweet_of: str | None = None

    @property
    def is_retweet(self) -> bool:
        return self.retweet_of is not None

    def to_record(self) -> dict:
        record = {
            "id": self.id,
            "user_id": self.user_id,
            "text": self.text,
            "timestamp": self.timestamp,
        }
        if self.retweet_of is not None:
            record["retweet_of"] = self.retweet_of
        return record


class Corpus:
    """An ordered, immutable collection of tweets with derived indexes.

    ``users`` maps each author to their tweet ids in corpus order.
    ``retweeters`` maps a retweeted tweet id to the set of users who
    retweeted it; repeated retweets by one user count once.
    """

    def __init__(self, tweets: Iterable[Tweet] = (), skipped: int = 0):
        self.tweets: tuple[Tweet, ...] = tuple(tweets)
        self.skipped = skipped
        by_id: dict[str, Tweet] = {}
        users: dict[str, list[str]] = {}
        retweeters: dict[str, set[str]] = {}
        for tw in self.tweets:
            if tw.id in by_id:
                raise CorpusError(f"duplicate tweet id {tw.id!r}")
            by_id[tw.id] = tw
            users.setdefault(tw.user_id, []).append(tw.id)
            if tw.retweet_of is not None:
                retweeters.setdefault(tw.retweet_of, set()).add(tw.user_id)
        self._by_id = by_id
        self.users: dict[str, tuple[str, ...]] = {u: tuple(ids) for u, ids in users.items()}
        self.retweeters: dict[str, frozenset[str]] = {
            t: frozenset(us) for t, us in retweeters.items()
        }

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self):
        return iter(self.tweets)

    def __contains__(self, tweet_id: object) -> bool:
        return tweet_id in self._by_id

    def __getitem__(self, tweet_id: str) -> Tweet:
        return self._by_id[tweet_id]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.tweets == other.tweets

    def __repr__(self) -> str:
        return f"Corpus({len(self.tweets)} tweets, {len(self.users)} users)"

    @property
    def n_retweets(self) -> int:
        return sum(1 for tw in self.tweets if tw.is_retweet)

    def originals_of(self, user_id: str) -> list[Tweet]:
        """Original (non-retweet) tweets authored by ``user_id``."""
        return [
            self._by_id[t]
            for t in self.users.get(user_id, ())
            if not self._by_id[t].is_retweet
        ]

    def tweets_of(self, user_id: str) -> list[Tweet]:
        return [self._by_id[t] for t in self.users.get(user_id, ())]


@dataclass(frozen=True)
class SeedSet:
    entries: Mapping[str, Stance] = field(default_factory=dict)

    def __post_init__(self):
        stances = set(self.entries.values())
        if stances != {Stance.FOR, Stance.AGAINST}:
            raise CorpusError("seed set must cover both stances")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, user_id: object) -> bool:
        return user_id in self.entries

    def __getitem__(self, user_id: str) -> Stance:
        return self.entries[user_id]

    def items(self):
        return sorted(self.entries.items())

    def users_with(self, stance: Stance) -> list[str]:
        return sorted(u for u, s in self.entries.items() if s is stance)


_REQUIRED = {"id": str, "user_id": str, "text": str, "timestamp": int}


def parse_tweet(record: object) -> Tweet:
    """Validate one decoded JSON record. Raises CorpusError with the reason."""
    if not isinstance(record, dict):
        raise CorpusError("record is not a JSON object")
    for name, kind in _REQUIRED.items():
        if name not in record:
            raise CorpusError(f"missing field {name}")
        value = record[name]
        # bool is an int subclass; reject it for timestamps
        if not isinstance(value, kind) or isinstance(value, bool):
            raise CorpusError(f"field {name} must be {kind.__name__}")
    retweet_of = record.get("retweet_of")
    if retweet_of is not None and not isinstance(retweet_of, str):
        raise CorpusError("field retweet_of must be str")
    return Tweet(
        id=record["id"],
        user_id=record["user_id"],
        text=record["text"],
        timestamp=record["timestamp"],
        retweet_of=retweet_of,
    )


def load_corpus(path: str | Path, strict: bool = True) -> Corpus:
    """Read a JSON-lines tweet file.

    In strict mode the first bad line raises ``CorpusError("line N: reason")``.
    In lenient mode bad lines are skipped and counted in ``Corpus.skipped``.
    Blank lines are ignored.
    """
    tweets: list[Tweet] = []
    seen: set[str] = set()
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"invalid JSON ({exc.msg})") from None
                tweet = parse_tweet(record)
                if tweet.id in seen:
                    raise CorpusError(f"duplicate tweet id {tweet.id}")
            except CorpusError as exc:
                if strict:
                    raise CorpusError(f"line {lineno}: {exc}") from None
                skipped += 1
                continue
            seen.add(tweet.id)
            tweets.append(tweet)
    if skipped:
        logger.warning("skipped %d malformed line(s) in %s", skipped, path)
    return Corpus(tweets, skipped=skipped)


def dump_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for tw in corpus.tweets:
            f.write(json.dumps(tw.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def filter_corpus(
    corpus: Corpus,
    min_tweets_per_user: int = 2,
    keep: Callable[[Tweet], bool] | None = None,
) -> Corpus:
    """Drop low-activity users and dangling retweets.

    ``keep`` is an optional predicate applied first (e.g. a language filter).
    The user-count and dangling-retweet rules are repeated until nothing
    changes, so the result is a fixed point and the filter is idempotent.
    """
    if min_tweets_per_user < 1:
        raise ValueError("min_tweets_per_user must be >= 1")
    tweets = [tw for tw in corpus.tweets if keep is None or keep(tw)]
    while True:
        counts = Counter(tw.user_id for tw in tweets)
        kept = [tw for tw in tweets if counts[tw.user_id] >= min_tweets_per_user]
        ids = {tw.id for tw in kept}
        kept = [tw for tw in kept if tw.retweet_of is None or tw.retweet_of in ids]
        if len(kept) == len(tweets):
            return Corpus(kept)
        tweets = kept


def load_seeds(path: str | Path) -> SeedSet:
    """Read a headerless ``user_id,stance`` CSV."""
    entries: dict[str, Stance] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or not any(cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise CorpusError(f"line {lineno}: expected 2 columns, got {len(row)}")
            user_id, stance = row[0].strip(), Stance.parse(row[1])
            if entries.get(user_id, stance) is not stance:
                raise CorpusError(f"conflicting stances for seed user {user_id}")
            entries[user_id] = stance
    return SeedSet(entries)


def read_stance_csv(path: str | Path) -> dict[str, Stance]:
    """Read a headerless ``key,stance`` CSV (gold labels, predictions)."""
    out: dict[str, Stance] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise CorpusError(f"line {lineno}: expected 2 columns, got {len(row)}")
            out[row[0].strip()] = Stance.parse(row[1])
    return out


def write_stance_csv(labels: Mapping[str, Stance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        for key in sorted(labels):
            writer.writerow([key, labels[key].value])

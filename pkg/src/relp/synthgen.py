"""Deterministic synthetic debate corpora with two planted retweet communities.

Each user belongs to one side. Originals mix side-specific words with shared
filler words, so text carries a learnable but noisy signal. Every non-seed
user first retweets one of their own side's seed tweets, then keeps accepting
offered tweets (seed tweets with elevated probability) with ``p_retweet_in``
for same-side and ``p_retweet_cross`` for opposite-side authors. Seed user k
of a side retweets seed user k-1, which keeps each side connected.
"""
from __future__ import annotations

import csv
import random
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .corpus import Corpus, SeedSet, Stance, Tweet, dump_corpus, write_stance_csv

BASE_TIMESTAMP = 1366000000  # mid-April 2013
WINDOW_SECONDS = 4 * 86400

SIDE_PREFIX = {Stance.FOR: "pro", Stance.AGAINST: "anti"}


class SynthConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    users_per_side: int = 200
    tweets_per_user: tuple[int, int] = (3, 5)
    seed_users_per_side: int = 3
    p_retweet_in: float = 0.9
    p_retweet_cross: float = 0.02
    vocab_size_shared: int = 500
    vocab_size_side: int = 300
    tokens_per_tweet: tuple[int, int] = (5, 10)
    rng_seed: int = 20130415
    # probability a token comes from the author's side vocabulary
    p_side_token: float = 0.25
    # probability an offered tweet is drawn from the seed users' tweets
    p_seed_offer: float = 0.5
    # probability an original carries a hashtag, and that it is the author's side tag
    p_hashtag: float = 0.2
    p_hashtag_own_side: float = 0.8
    for_hashtag: str = "#endgunviolence"
    against_hashtag: str = "#protect2a"

    def __post_init__(self):
        def bad(msg):
            raise SynthConfigError(msg)

        if self.users_per_side < 1:
            bad("users_per_side must be >= 1")
        if not 1 <= self.seed_users_per_side <= self.users_per_side:
            bad("seed_users_per_side must be in [1, users_per_side]")
        for name in ("tweets_per_user", "tokens_per_tweet"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                bad(f"{name} must be a range 1 <= lo <= hi")
        if not 0 <= self.p_retweet_cross < self.p_retweet_in <= 1:
            bad("need 0 <= p_retweet_cross < p_retweet_in <= 1")
        if self.vocab_size_shared < 1 or self.vocab_size_side < 1:
            bad("vocabulary sizes must be >= 1")
        for name in ("p_side_token", "p_seed_offer", "p_hashtag", "p_hashtag_own_side"):
            if not 0 <= getattr(self, name) <= 1:
                bad(f"{name} must be a probability")
        for tag in (self.for_hashtag, self.against_hashtag):
            if not tag.startswith("#") or tag != tag.lower() or len(tag) < 2:
                bad(f"hashtag {tag!r} must be lowercase and start with #")
        if self.for_hashtag == self.against_hashtag:
            bad("hashtags must differ")

    @classmethod
    def from_mapping(cls, values: dict) -> "SynthConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise SynthConfigError(f"unknown config key(s): {', '.join(unknown)}")
        kwargs = dict(values)
        for name in ("tweets_per_user", "tokens_per_tweet"):
            if name in kwargs:
                v = kwargs[name]
                if isinstance(v, int):
                    v = (v, v)
                elif isinstance(v, str):
                    lo, _, hi = v.partition("..")
                    v = (int(lo), int(hi or lo))
                kwargs[name] = tuple(int(x) for x in v)
        return cls(**kwargs)

    def to_mapping(self) -> dict:
        out = asdict(self)
        for name in ("tweets_per_user", "tokens_per_tweet"):
            out[name] = list(out[name])
        return out


@dataclass(frozen=True)
class SynthOutput:
    corpus: Corpus
    gold: dict[str, Stance]
    seeds: SeedSet
    hashtags: dict[str, Stance]

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "tweets": out / "tweets.jsonl",
            "seeds": out / "seeds.csv",
            "gold": out / "gold.csv",
            "hashtags": out / "hashtags.csv",
        }
        dump_corpus(self.corpus, paths["tweets"])
        write_stance_csv(self.seeds.entries, paths["seeds"])
        write_stance_csv(self.gold, paths["gold"])
        with open(paths["hashtags"], "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            for tag in sorted(self.hashtags):
                writer.writerow([tag, self.hashtags[tag].value])
        return paths


def _other(side: Stance) -> Stance:
    return Stance.AGAINST if side is Stance.FOR else Stance.FOR


def generate(cfg: SynthConfig = SynthConfig()) -> SynthOutput:
    rng = random.Random(cfg.rng_seed)
    n_users = 2 * cfg.users_per_side
    user_ids = [f"u{k:05d}" for k in range(n_users)]
    sides = [Stance.FOR] * cfg.users_per_side + [Stance.AGAINST] * cfg.users_per_side
    rng.shuffle(sides)
    gold = dict(zip(user_ids, sides))

    seed_list = {
        side: [u for u in user_ids if gold[u] is side][: cfg.seed_users_per_side]
        for side in (Stance.FOR, Stance.AGAINST)
    }
    seed_users = {u for side in seed_list.values() for u in side}

    shared = [f"w{k:04d}" for k in range(cfg.vocab_size_shared)]
    side_vocab = {
        side: [f"{SIDE_PREFIX[side]}{k:04d}" for k in range(cfg.vocab_size_side)]
        for side in (Stance.FOR, Stance.AGAINST)
    }
    tag_of = {Stance.FOR: cfg.for_hashtag, Stance.AGAINST: cfg.against_hashtag}

    def write_text(side: Stance) -> str:
        n = rng.randint(*cfg.tokens_per_tweet)
        words = [
            rng.choice(side_vocab[side]) if rng.random() < cfg.p_side_token else rng.choice(shared)
            for _ in range(n)
        ]
        if rng.random() < cfg.p_hashtag:
            tag_side = side if rng.random() < cfg.p_hashtag_own_side else _other(side)
            words.insert(rng.randrange(len(words) + 1), tag_of[tag_side])
        return " ".join(words)

    counter = 0

    def next_id() -> str:
        nonlocal counter
        counter += 1
        return f"t{counter:07d}"

    # tweet budget per user: (originals, retweets)
    budget: dict[str, tuple[int, int]] = {}
    for u in user_ids:
        total = rng.randint(*cfg.tweets_per_user)
        if u in seed_users:
            chained = seed_list[gold[u]].index(u) > 0
            total = max(total, 2) if chained else total
            budget[u] = (total - int(chained), int(chained))
        else:
            n_rt = rng.randint(1, max(1, total - 1))
            budget[u] = (total - n_rt, n_rt)

    tweets: list[Tweet] = []
    author: dict[str, str] = {}
    originals_by_user: dict[str, list[str]] = {}
    for u in user_ids:
        for _ in range(budget[u][0]):
            tid = next_id()
            ts = BASE_TIMESTAMP + rng.randrange(WINDOW_SECONDS)
            tweets.append(Tweet(tid, u, write_text(gold[u]), ts))
            author[tid] = u
            originals_by_user.setdefault(u, []).append(tid)
    by_id = {tw.id: tw for tw in tweets}
    all_originals = [tw.id for tw in tweets]
    seed_originals = [t for t in all_originals if author[t] in seed_users]
    side_seed_originals = {
        side: [t for t in seed_originals if gold[author[t]] is side]
        for side in (Stance.FOR, Stance.AGAINST)
    }

    retweets: list[Tweet] = []

    def retweet(u: str, target: str) -> None:
        src = by_id[target]
        ts = src.timestamp + rng.randint(1, 6 * 3600)
        retweets.append(Tweet(next_id(), u, f"RT @{src.user_id}: {src.text}", ts, target))

    for side, chain in seed_list.items():
        for prev, u in zip(chain, chain[1:]):
            retweet(u, originals_by_user[prev][0])

    for u in user_ids:
        if u in seed_users:
            continue
        wanted = budget[u][1]
        taken: set[str] = set()
        anchor = rng.choice(side_seed_originals[gold[u]])
        retweet(u, anchor)
        taken.add(anchor)
        offers = 0
        while len(taken) < wanted and offers < 50 * wanted:
            offers += 1
            pool = seed_originals if rng.random() < cfg.p_seed_offer else all_originals
            target = rng.choice(pool)
            if target in taken or author[target] == u:
                continue
            same = gold[author[target]] is gold[u]
            if rng.random() < (cfg.p_retweet_in if same else cfg.p_retweet_cross):
                retweet(u, target)
                taken.add(target)

    ordered = sorted(tweets + retweets, key=lambda tw: (tw.timestamp, tw.id))
    seeds = SeedSet({u: gold[u] for u in sorted(seed_users)})
    hashtags = {cfg.for_hashtag: Stance.FOR, cfg.against_hashtag: Stance.AGAINST}
    return SynthOutput(Corpus(ordered), gold, seeds, hashtags)

import json

import pytest

from relp.corpus import Corpus, Tweet


def tw(tid, user, text="", retweet_of=None, ts=0):
    return Tweet(tid, user, text, ts, retweet_of)


@pytest.fixture
def write_jsonl(tmp_path):
    def write(records, name="tweets.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            for r in records:
                f.write((r if isinstance(r, str) else json.dumps(r)) + "\n")
        return path

    return write


@pytest.fixture
def three_tweet_corpus():
    """t1 <- {u1,u2}, t2 <- {u1,u2,u3}, t3 <- {u3}."""
    tweets = [
        tw("t1", "a", "one"),
        tw("t2", "b", "two"),
        tw("t3", "c", "three"),
        tw("r1", "u1", "RT one", "t1"),
        tw("r2", "u2", "RT one", "t1"),
        tw("r3", "u1", "RT two", "t2"),
        tw("r4", "u2", "RT two", "t2"),
        tw("r5", "u3", "RT two", "t2"),
        tw("r6", "u3", "RT three", "t3"),
    ]
    return Corpus(tweets)

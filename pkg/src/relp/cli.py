"""Command-line entry point.

Subcommands: pipeline, baselines, synth, build-matrix, propagate, evaluate.
Settings come from an optional flat YAML file (``--config``); flags win.
Set RELP_LOG_LEVEL (e.g. DEBUG) to change log verbosity.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from . import baselines as bl
from .classifier import (
    UserStanceResult,
    aggregate_users,
    classify_users,
    train,
    training_docs,
)
from .cooccurrence import build_matrix, dump_matrix
from .corpus import (
    CorpusError,
    Stance,
    filter_corpus,
    load_corpus,
    load_seeds,
    read_stance_csv,
)
from .evaluation import (
    csv_rows,
    evaluate,
    read_metrics_csv,
    render_text,
    write_metrics_csv,
)
from .propagation import FinalLabeling, PropagationConfig, dump_trace, finalize, init_labels, propagate
from .synthgen import SynthConfig, SynthConfigError, generate

logger = logging.getLogger("relp")

BASELINE_METHODS = ("B1", "B2", "B3")
METHOD_ORDER = ("ReLP",) + BASELINE_METHODS
EVAL_GROUP = "all"


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@contextlib.contextmanager
def stage(name: str):
    logger.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except (OSError, ValueError, KeyError) as exc:
        raise StageError(name, str(exc)) from exc


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str | None = None
    seeds: str | None = None
    gold: str | None = None
    hashtags: str | None = None
    out: str = "relp-out"
    min_tweets_per_user: int = 2
    n_buckets: int = 10
    alpha: float = 1.0
    kmeans_max_iterations: int = 100
    lenient: bool = False
    threads: int = 1

    def check_inputs(self, required: tuple[str, ...]) -> None:
        for name in required:
            if getattr(self, name) is None:
                raise StageError("config", f"missing required input '{name}'")
        for name in ("corpus", "seeds", "gold", "hashtags"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise StageError("config", f"{name} file not found: {path}")


def read_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        values = yaml.safe_load(f) or {}
    if not isinstance(values, dict):
        raise StageError("config", f"{path}: expected a flat key-value mapping")
    return {str(k).replace("-", "_"): v for k, v in values.items()}


def pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    values = read_config_file(args.config)
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise StageError("config", f"unknown config key(s): {', '.join(unknown)}")
    cfg = PipelineConfig(**values)
    overrides = {
        name: getattr(args, name)
        for name in known
        if getattr(args, name, None) is not None
    }
    return replace(cfg, **overrides)


def _load_inputs(cfg: PipelineConfig):
    with stage("ingest"):
        corpus = load_corpus(cfg.corpus, strict=not cfg.lenient)
        corpus = filter_corpus(corpus, cfg.min_tweets_per_user)
        seeds = load_seeds(cfg.seeds)
        logger.info("corpus: %d tweets, %d users, %d retweets",
                    len(corpus), len(corpus.users), corpus.n_retweets)
    return corpus, seeds


def write_user_stances(results: list[UserStanceResult], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["user_id", "stance", "for_votes", "against_votes", "source", "margin"])
        for r in results:
            writer.writerow([
                r.user_id, r.stance.value, r.tweet_votes[Stance.FOR],
                r.tweet_votes[Stance.AGAINST], r.source.value, f"{r.margin:.6f}",
            ])


def read_user_stances(path: str | Path) -> dict[str, Stance]:
    """Read ``user_stances.csv`` output or a headerless ``user_id,stance`` file."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        first = f.readline()
    if first.startswith("user_id,"):
        with open(path, "r", encoding="utf-8", newline="") as f:
            return {row["user_id"]: Stance.parse(row["stance"]) for row in csv.DictReader(f)}
    return read_stance_csv(path)


def update_metrics(out: Path, methods: dict[str, dict[str, Stance]], gold: dict[str, Stance],
                   replace_methods: tuple[str, ...]) -> None:
    """Replace ``replace_methods`` rows in metrics.csv and re-render report.txt."""
    path = out / "metrics.csv"
    rows = [r for r in read_metrics_csv(path) if r[0] not in replace_methods] if path.exists() else []
    for name, pred in methods.items():
        rows.extend(csv_rows(name, EVAL_GROUP, evaluate(pred, gold)))
    rank = {m: k for k, m in enumerate(METHOD_ORDER)}
    rows.sort(key=lambda r: (rank.get(r[0], len(rank)), r[0] if r[0] not in rank else ""))
    write_metrics_csv(rows, path)
    (out / "report.txt").write_text(render_text(rows), encoding="utf-8")


def cmd_pipeline(args: argparse.Namespace) -> int:
    cfg = pipeline_config(args)
    cfg.check_inputs(("corpus", "seeds"))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus, seeds = _load_inputs(cfg)

    with stage("matrix"):
        m = build_matrix(corpus)
        dump_matrix(m, out / "matrix.tsv")
    with stage("propagate"):
        table = propagate(m, init_labels(corpus, seeds), PropagationConfig(cfg.n_buckets))
        final = finalize(table, corpus)
        dump_trace(table, out / "propagation_trace.tsv")
        write_tweet_labels(table, final, out / "tweet_labels.tsv")
        logger.info("propagation labeled %d of %d tweets in %d iterations",
                    len(final.labeled), len(corpus), table.iterations)
    with stage("train"):
        model = train(training_docs(corpus, final), cfg.alpha)
        model.dump(out / "model.tsv")
    with stage("classify"):
        results = classify_users(corpus, final, model, threads=cfg.threads)
        write_user_stances(results, out / "user_stances.csv")
    if cfg.gold is not None:
        with stage("evaluate"):
            gold = read_stance_csv(cfg.gold)
            update_metrics(out, {"ReLP": {r.user_id: r.stance for r in results}}, gold, ("ReLP",))
            sys.stdout.write((out / "report.txt").read_text(encoding="utf-8"))
    return 0


def write_tweet_labels(table, final: FinalLabeling, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t in sorted(final.labeled):
            s = table.finalized[t]
            f.write(f"{t}\t{final.labeled[t].value}\t{s.for_value:.6f}\t{s.against_value:.6f}\n")


def cmd_baselines(args: argparse.Namespace) -> int:
    cfg = pipeline_config(args)
    cfg.check_inputs(("corpus", "seeds"))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus, seeds = _load_inputs(cfg)
    unlabeled = FinalLabeling({}, frozenset(tw.id for tw in corpus.tweets))
    predictions: dict[str, dict[str, Stance]] = {}

    with stage("B1"):
        results = classify_users(corpus, unlabeled, bl.train_b1(corpus, seeds, cfg.alpha), cfg.threads)
        write_user_stances(results, out / "user_stances_b1.csv")
        predictions["B1"] = {r.user_id: r.stance for r in results}
    if cfg.hashtags is None:
        logger.warning("no hashtag seed file given; skipping B2")
    else:
        with stage("B2"):
            tags = bl.load_hashtags(cfg.hashtags)
            results = classify_users(corpus, unlabeled, bl.train_b2(corpus, tags, cfg.alpha), cfg.threads)
            write_user_stances(results, out / "user_stances_b2.csv")
            predictions["B2"] = {r.user_id: r.stance for r in results}
    with stage("B3"):
        km = bl.kmeans_b3(corpus, seeds, bl.KMeansConfig(max_iterations=cfg.kmeans_max_iterations))
        results = aggregate_users(corpus, km.labels, km.margins)
        write_user_stances(results, out / "user_stances_b3.csv")
        predictions["B3"] = {r.user_id: r.stance for r in results}

    if cfg.gold is not None:
        with stage("evaluate"):
            gold = read_stance_csv(cfg.gold)
            update_metrics(out, predictions, gold, BASELINE_METHODS)
            sys.stdout.write((out / "report.txt").read_text(encoding="utf-8"))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    with stage("synth"):
        values = read_config_file(args.config)
        if args.rng_seed is not None:
            values["rng_seed"] = args.rng_seed
        try:
            cfg = SynthConfig.from_mapping(values)
        except TypeError as exc:
            raise SynthConfigError(str(exc)) from None
        output = generate(cfg)
        paths = output.write(args.out)
    for name, path in paths.items():
        logger.info("wrote %s: %s", name, path)
    return 0


def cmd_build_matrix(args: argparse.Namespace) -> int:
    if not Path(args.corpus).is_file():
        raise StageError("config", f"corpus file not found: {args.corpus}")
    with stage("ingest"):
        corpus = filter_corpus(load_corpus(args.corpus, strict=not args.lenient), 2 if args.min_tweets_per_user is None else args.min_tweets_per_user)
    with stage("matrix"):
        m = build_matrix(corpus)
        dump_matrix(m, args.out)
    logger.info("matrix: %d columns, %d stored entries", len(m), m.nnz)
    return 0


def cmd_propagate(args: argparse.Namespace) -> int:
    cfg = pipeline_config(args)
    cfg.check_inputs(("corpus", "seeds"))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus, seeds = _load_inputs(cfg)
    with stage("matrix"):
        m = build_matrix(corpus)
    with stage("propagate"):
        table = propagate(m, init_labels(corpus, seeds), PropagationConfig(cfg.n_buckets))
        final = finalize(table, corpus)
        dump_trace(table, out / "propagation_trace.tsv")
        write_tweet_labels(table, final, out / "tweet_labels.tsv")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    for path in (args.pred, args.gold):
        if not Path(path).is_file():
            raise StageError("config", f"file not found: {path}")
    with stage("evaluate"):
        pred = read_user_stances(args.pred)
        gold = read_stance_csv(args.gold)
        rows = csv_rows(args.method, args.group, evaluate(pred, gold))
        if args.out:
            write_metrics_csv(rows, args.out)
        sys.stdout.write(render_text(rows))
    return 0


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat YAML file with pipeline settings")
    p.add_argument("--corpus", help="tweet JSON-lines file")
    p.add_argument("--seeds", help="seed users CSV (user_id,stance)")
    p.add_argument("--gold", help="gold user stances CSV (user_id,stance)")
    p.add_argument("--hashtags", help="hashtag seeds CSV (tag,stance)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--min-tweets-per-user", dest="min_tweets_per_user", type=int)
    p.add_argument("--n-buckets", dest="n_buckets", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--kmeans-max-iterations", dest="kmeans_max_iterations", type=int)
    p.add_argument("--lenient", action="store_const", const=True, default=None,
                   help="skip malformed corpus lines instead of failing")
    p.add_argument("--threads", type=int, help="worker threads for prediction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="propagate, train, classify and evaluate")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("baselines", help="run B1, B2 and B3 and add their metrics")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("propagate", help="run label propagation only")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("synth", help="generate a synthetic debate corpus")
    p.add_argument("--config", help="flat YAML file with generator settings")
    p.add_argument("--rng-seed", dest="rng_seed", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build-matrix", help="dump the co-occurrence matrix")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output TSV path")
    p.add_argument("--min-tweets-per-user", dest="min_tweets_per_user", type=int)
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_build_matrix)

    p = sub.add_parser("evaluate", help="score predicted user stances against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--method", default="method")
    p.add_argument("--group", default=EVAL_GROUP)
    p.add_argument("--out", help="metrics CSV path")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("RELP_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"relp: error in stage {exc}", file=sys.stderr)
        return 1
    except (CorpusError, OSError, ValueError, TypeError) as exc:
        print(f"relp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Retweet-based label propagation for stance classification of Twitter users."""

from .corpus import Corpus, SeedSet, Stance, Tweet, filter_corpus, load_corpus, load_seeds
from .cooccurrence import CoocMatrix, build_matrix
from .propagation import (
    FinalLabeling,
    LabelState,
    LabelTable,
    PropagationConfig,
    finalize,
    hash_bucket,
    init_labels,
    propagate,
    run_propagation,
    seed_selection,
)
from .features import extract_ngrams, tokenize
from .classifier import MNBModel, classify_users, predict, train
from .evaluation import MetricsReport, evaluate, report_table

__version__ = "0.1.0"

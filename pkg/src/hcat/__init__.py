"""hcat: hate/counterspeech tweet-stream and follower-graph analysis.

Pipeline pieces: keyword-filtered corpus ingest, user categorization,
feature-based tweet classifiers, homophily measurement against
degree-preserving shuffled graphs, and exposure-conditioned infection
risk against cascade-shuffle null models.

Set ``HCAT_DISABLE_NUMBA=1`` before import to force the pure-numpy
kernel backend.
"""

__version__ = "0.1.0"

from hcat.cascade import (
    Cascade,
    RiskCurve,
    build_cascade,
    compute_exposures,
    contagion_report,
    infection_risk,
    shuffled_risk,
)
from hcat.evaluation import EvalReport, cross_validate, eval_metrics
from hcat.graph import (
    SocialGraph,
    UserCategory,
    build_graph,
    categorize_users,
    ego_stats,
    load_edges,
    load_graph,
    load_node_attributes,
)
from hcat.homophily import ConnectivityReport, connectivity_probabilities, homophily_report
from hcat.ingest import CorpusStats, filter_corpus
from hcat.keywords import KeywordSet, load_keywords, match_keywords
from hcat.model import ClassifierModel, Hyper, load_model, predict, save_model, train
from hcat.records import TweetLabel, TweetRecord, load_records
from hcat.shuffle import (
    ShuffleConfig,
    ShuffleStats,
    check_shuffle_invariants,
    degree_preserving_shuffle,
    shuffle_with_stats,
)
from hcat.stats import daily_counts, mann_whitney_u, tail_distribution, window_change

__all__ = [
    "__version__",
    "Cascade",
    "ClassifierModel",
    "ConnectivityReport",
    "CorpusStats",
    "EvalReport",
    "Hyper",
    "KeywordSet",
    "RiskCurve",
    "ShuffleConfig",
    "ShuffleStats",
    "SocialGraph",
    "TweetLabel",
    "TweetRecord",
    "UserCategory",
    "build_cascade",
    "build_graph",
    "categorize_users",
    "check_shuffle_invariants",
    "compute_exposures",
    "connectivity_probabilities",
    "contagion_report",
    "cross_validate",
    "daily_counts",
    "degree_preserving_shuffle",
    "ego_stats",
    "eval_metrics",
    "filter_corpus",
    "homophily_report",
    "infection_risk",
    "load_edges",
    "load_graph",
    "load_keywords",
    "load_model",
    "load_node_attributes",
    "load_records",
    "mann_whitney_u",
    "match_keywords",
    "predict",
    "save_model",
    "shuffle_with_stats",
    "shuffled_risk",
    "tail_distribution",
    "train",
    "window_change",
]

"""Degree-preserving rewiring null model.

Rewires by directed double-edge swaps between edges whose targets
share a covid_flag class, which keeps every node's in-degree,
out-degree, and covid-flagged-followee count exactly while
randomizing who follows whom.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from hcat.accel import active_backend, get_kernels
from hcat.errors import ConfigError
from hcat.graph import SocialGraph, validate_graph


@dataclass
class ShuffleConfig:
    swap_attempts_factor: float = 10.0
    seed: int = 0
    preserve_covid_partition: bool = True

    def __post_init__(self):
        # factor 0 is allowed and means the identity rewiring
        if not np.isfinite(self.swap_attempts_factor) or self.swap_attempts_factor < 0:
            raise ConfigError(
                f"swap_attempts_factor must be >= 0, got {self.swap_attempts_factor}"
            )


@dataclass
class ShuffleStats:
    attempts: int
    accepted: int
    degenerate: bool
    backend: str

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def shuffle_with_stats(
    graph: SocialGraph, config: ShuffleConfig | None = None
) -> tuple[SocialGraph, ShuffleStats]:
    """Rewired copy of *graph* plus swap diagnostics.

    A graph where no covid class holds two edges cannot swap at all;
    it comes back unchanged with the degenerate flag set (and a
    warning), not as an error.
    """
    config = config or ShuffleConfig()
    m = graph.n_edges
    n = graph.n_nodes
    backend = active_backend()
    attempts = int(round(config.swap_attempts_factor * m))

    src = graph.edge_sources()
    dst = graph.targets.copy()
    if config.preserve_covid_partition:
        cls = graph.covid_flag[dst].astype(np.int64)
    else:
        cls = np.zeros(m, dtype=np.int64)

    # the target class of an edge slot never changes under valid swaps,
    # so per-class edge counts are fixed up front
    largest_class = int(np.bincount(cls, minlength=1).max()) if m else 0
    if largest_class < 2:
        if attempts > 0:
            warnings.warn(
                "graph too constrained to swap (no covid class holds 2 edges); "
                "returning it unchanged",
                stacklevel=2,
            )
        out = replace(graph, targets=graph.targets.copy())
        return out, ShuffleStats(0, 0, degenerate=True, backend=backend)

    if attempts == 0:
        out = replace(graph, targets=graph.targets.copy())
        return out, ShuffleStats(0, 0, degenerate=False, backend=backend)

    kern = get_kernels()
    seed64 = np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF)
    accepted = kern.shuffle_edges(
        src, dst, cls, np.int64(n), np.int64(attempts), seed64
    )

    order = np.lexsort((dst, src))
    out = replace(graph, targets=dst[order])
    return out, ShuffleStats(attempts, int(accepted), degenerate=False, backend=backend)


def degree_preserving_shuffle(
    graph: SocialGraph, config: ShuffleConfig | None = None
) -> SocialGraph:
    rewired, _ = shuffle_with_stats(graph, config)
    return rewired


def edge_jaccard(a: SocialGraph, b: SocialGraph) -> float:
    """Jaccard similarity of two edge sets over the same node set."""
    if a.n_nodes != b.n_nodes:
        raise ConfigError("graphs have different node counts")
    ka, kb = a.edge_keys(), b.edge_keys()
    inter = np.intersect1d(ka, kb, assume_unique=True).shape[0]
    union = ka.shape[0] + kb.shape[0] - inter
    return inter / union if union else 1.0


def check_shuffle_invariants(original: SocialGraph, rewired: SocialGraph) -> None:
    """Assert-style verification used by tests and the CLI self-check."""
    validate_graph(rewired)
    if original.user_ids != rewired.user_ids:
        raise AssertionError("node set changed")
    if not np.array_equal(original.out_degrees(), rewired.out_degrees()):
        raise AssertionError("out-degrees changed")
    if not np.array_equal(original.in_degrees(), rewired.in_degrees()):
        raise AssertionError("in-degrees changed")
    if not np.array_equal(original.covid_out_counts(), rewired.covid_out_counts()):
        raise AssertionError("covid followee counts changed")

"""Pure-numpy kernel backend, signature-compatible with njit_kernels.

The shuffle proposes swaps in batches and keeps only proposals that
are valid against the state at the start of the round and that do not
interfere with each other (no shared edge slot, no repeated new key).
Rejecting a proposal that a sequential scan would have accepted is
fine; accepting an invalid one is not, so every filter errs toward
rejection. Deterministic for a given seed, but not bit-equal to the
numba walk.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def splitmix64_sequence(seed, n):
    """Same stream as the numba backend, computed with masked ints."""
    out = np.empty(n, dtype=np.uint64)
    state = int(seed) & 0xFFFFFFFFFFFFFFFF
    for i in range(n):
        state = (state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        z = z ^ (z >> 31)
        out[i] = z
    return out


def _present(sorted_keys, queries):
    pos = np.searchsorted(sorted_keys, queries)
    inside = pos < sorted_keys.shape[0]
    hit = np.zeros(queries.shape[0], dtype=bool)
    if inside.any():
        hit[inside] = sorted_keys[pos[inside]] == queries[inside]
    return hit


def shuffle_edges(src, dst, cls, n_nodes, n_attempts, seed):
    """Batched double-edge swaps on dst, in place; returns accepted count.

    Attempts are counted as drawn proposal pairs, matching the numba
    backend's budget semantics.
    """
    m = src.shape[0]
    if m < 2 or n_attempts <= 0:
        return 0
    rng = np.random.Generator(np.random.PCG64(seed))
    n = np.int64(n_nodes)
    accepted = 0
    remaining = int(n_attempts)
    batch = max(1, m // 8)
    while remaining > 0:
        b = min(batch, remaining)
        remaining -= b
        e1 = rng.integers(0, m, size=b, dtype=np.int64)
        e2 = rng.integers(0, m, size=b, dtype=np.int64)
        s1, t1 = src[e1], dst[e1]
        s2, t2 = src[e2], dst[e2]
        ok = (
            (e1 != e2)
            & (cls[e1] == cls[e2])
            & (t1 != t2)
            & (s1 != t2)
            & (s2 != t1)
        )
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            continue
        keys_now = np.sort(src * n + dst)
        k1 = s1[idx] * n + t2[idx]
        k2 = s2[idx] * n + t1[idx]
        clean = ~_present(keys_now, k1) & ~_present(keys_now, k2)
        idx, k1, k2 = idx[clean], k1[clean], k2[clean]
        if idx.size == 0:
            continue
        # each edge slot may be touched by at most one proposal per round
        slot_count = np.bincount(
            np.concatenate([e1[idx], e2[idx]]), minlength=m
        )
        solo = (slot_count[e1[idx]] == 1) & (slot_count[e2[idx]] == 1)
        idx, k1, k2 = idx[solo], k1[solo], k2[solo]
        if idx.size == 0:
            continue
        # and no two proposals may introduce the same new key
        kk = np.concatenate([k1, k2])
        uniq, counts = np.unique(kk, return_counts=True)
        fresh = (counts[np.searchsorted(uniq, k1)] == 1) & (
            counts[np.searchsorted(uniq, k2)] == 1
        )
        idx = idx[fresh]
        if idx.size == 0:
            continue
        a, c = e1[idx], e2[idx]
        new_a, new_c = dst[c].copy(), dst[a].copy()
        dst[a] = new_a
        dst[c] = new_c
        accepted += idx.size
    return accepted


def exposure_counts(src, dst, source_mask, t_act, cutoff, n_nodes):
    """Per-node count of in-neighbors in the source set that activated
    strictly before the node's cutoff time. Matches the numba backend
    exactly."""
    sel = (source_mask[src] != 0) & (t_act[src] < cutoff[dst])
    if not sel.any():
        return np.zeros(n_nodes, dtype=np.int64)
    return np.bincount(dst[sel], minlength=n_nodes).astype(np.int64)

"""Numba-compiled kernels: edge-swap shuffle and exposure counting.

The shuffle keeps its own open-addressing hash set of edge keys
(src * n_nodes + dst) so duplicate checks are O(1) without touching
Python objects, and draws randomness from an in-kernel splitmix64
stream so a run is reproducible from a single uint64 seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

EMPTY = np.int64(-1)

_SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM64_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_M2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, nogil=True, inline="always")
def _sm64_next(state):
    state = state + _SM64_GAMMA
    z = state
    z = (z ^ (z >> np.uint64(30))) * _SM64_M1
    z = (z ^ (z >> np.uint64(27))) * _SM64_M2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True, nogil=True)
def splitmix64_sequence(seed, n):
    """First n outputs of the splitmix64 stream, for testing the RNG."""
    out = np.empty(n, dtype=np.uint64)
    state = np.uint64(seed)
    for i in range(n):
        state, z = _sm64_next(state)
        out[i] = z
    return out


@njit(cache=True, nogil=True, inline="always")
def _slot_of(key, mask):
    # splitmix64 finalizer as the hash; keys are structured (src*n+dst)
    z = np.uint64(key) + _SM64_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _SM64_M1
    z = (z ^ (z >> np.uint64(27))) * _SM64_M2
    z = z ^ (z >> np.uint64(31))
    return np.int64(z & np.uint64(mask))


@njit(cache=True, nogil=True)
def set_insert(table, mask, key):
    j = _slot_of(key, mask)
    while table[j] != EMPTY:
        if table[j] == key:
            return False
        j = (j + 1) & mask
    table[j] = key
    return True


@njit(cache=True, nogil=True)
def set_contains(table, mask, key):
    j = _slot_of(key, mask)
    while table[j] != EMPTY:
        if table[j] == key:
            return True
        j = (j + 1) & mask
    return False


@njit(cache=True, nogil=True)
def set_remove(table, mask, key):
    j = _slot_of(key, mask)
    while True:
        if table[j] == EMPTY:
            return False
        if table[j] == key:
            break
        j = (j + 1) & mask
    # backward-shift deletion keeps probe chains unbroken without
    # tombstones: pull back any entry whose home slot precedes the hole
    k = (j + 1) & mask
    while table[k] != EMPTY:
        home = _slot_of(table[k], mask)
        if ((k - home) & mask) >= ((k - j) & mask):
            table[j] = table[k]
            j = k
        k = (k + 1) & mask
    table[j] = EMPTY
    return True


@njit(cache=True, nogil=True)
def build_edge_set(src, dst, n_nodes):
    """Hash table (capacity = power of two >= 2(m+2)) plus its mask."""
    m = src.shape[0]
    cap = 4
    while cap < 2 * (m + 2):
        cap *= 2
    table = np.full(cap, EMPTY, dtype=np.int64)
    mask = np.int64(cap - 1)
    for i in range(m):
        set_insert(table, mask, src[i] * n_nodes + dst[i])
    return table, mask


@njit(cache=True, nogil=True)
def shuffle_edges(src, dst, cls, n_nodes, n_attempts, seed):
    """Directed double-edge swaps on dst, in place.

    Each attempt draws an ordered pair of edge slots uniformly and
    swaps their targets unless the pair is degenerate, mixes target
    classes, or would create a self-loop or duplicate edge. cls holds
    the per-slot target class, which valid swaps never change.
    Returns the number of accepted swaps.
    """
    m = src.shape[0]
    if m < 2 or n_attempts <= 0:
        return 0
    table, tmask = build_edge_set(src, dst, n_nodes)

    smask = np.uint64(1)
    while smask < np.uint64(m):
        smask = smask * np.uint64(2)
    smask = smask - np.uint64(1)

    state = np.uint64(seed)
    accepted = 0
    for _ in range(n_attempts):
        while True:
            state, z = _sm64_next(state)
            e1 = np.int64(z & smask)
            if e1 < m:
                break
        while True:
            state, z = _sm64_next(state)
            e2 = np.int64(z & smask)
            if e2 < m:
                break
        if e1 == e2:
            continue
        if cls[e1] != cls[e2]:
            continue
        s1 = src[e1]
        t1 = dst[e1]
        s2 = src[e2]
        t2 = dst[e2]
        if t1 == t2:
            continue
        if s1 == t2 or s2 == t1:
            continue
        k1 = s1 * n_nodes + t2
        k2 = s2 * n_nodes + t1
        if set_contains(table, tmask, k1):
            continue
        if set_contains(table, tmask, k2):
            continue
        set_remove(table, tmask, s1 * n_nodes + t1)
        set_remove(table, tmask, s2 * n_nodes + t2)
        set_insert(table, tmask, k1)
        set_insert(table, tmask, k2)
        dst[e1] = t2
        dst[e2] = t1
        accepted += 1
    return accepted


@njit(cache=True, nogil=True)
def exposure_counts(src, dst, source_mask, t_act, cutoff, n_nodes):
    """Per-node count of in-neighbors in the source set that activated
    strictly before the node's cutoff time."""
    out = np.zeros(n_nodes, dtype=np.int64)
    for i in range(src.shape[0]):
        u = src[i]
        if source_mask[u] != 0 and t_act[u] < cutoff[dst[i]]:
            out[dst[i]] += 1
    return out

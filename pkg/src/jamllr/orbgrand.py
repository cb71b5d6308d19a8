"""ORBGRAND: soft-detection decoding by guessing noise in logistic-weight order.

Bits are ranked from least (rank 1) to most reliable.  A noise pattern is a
set of ranks, and its logistic weight is the sum of those ranks, so the
patterns of weight ``w`` are the partitions of ``w`` into distinct parts no
larger than ``n``.  Patterns are streamed in increasing weight; within a
weight, fewer parts come first, then lexicographic order of the ascending
rank list.  Nothing is materialised: each pattern is derived from the
previous one in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .codes import LinearCode, syndrome

DEFAULT_MAX_QUERIES = 1_000_000


@dataclass(frozen=True)
class DecoderConfig:
    max_queries: int = DEFAULT_MAX_QUERIES
    max_logistic_weight: int | None = None

    def __post_init__(self):
        if self.max_queries < 1:
            raise ValueError(f"max_queries must be >= 1, got {self.max_queries}")
        if self.max_logistic_weight is not None and self.max_logistic_weight < 0:
            raise ValueError("max_logistic_weight must be non-negative")


@dataclass(frozen=True)
class DecodeOutcome:
    codeword: np.ndarray | None
    queries: int
    abandoned: bool
    logistic_weight: int = -1


def rank_by_reliability(llrs) -> np.ndarray:
    """Indices ordered by ascending ``|LLR|``; ties keep index order."""
    return np.argsort(np.abs(np.asarray(llrs, dtype=np.float64)), kind="stable")


# ---------------------------------------------------------------------------
# pattern stream (shared by the Python iterator and the decoding kernel)


@numba.njit(cache=True)
def _feasible(t, prev, rest, n):
    # Can ``t`` distinct integers in (prev, n] sum to ``rest``?
    if t == 0:
        return rest == 0
    if prev + t > n:
        return False
    lo = t * prev + t * (t + 1) // 2
    hi = t * n - t * (t - 1) // 2
    return lo <= rest <= hi


@numba.njit(cache=True)
def _fill_smallest(parts, start, t, prev, rest, n):
    # Lexicographically smallest increasing tail; caller has checked feasibility.
    for j in range(t):
        r = t - j - 1
        v = rest - (r * n - r * (r - 1) // 2)
        if v < prev + 1:
            v = prev + 1
        parts[start + j] = v
        prev = v
        rest -= v


@numba.njit(cache=True)
def _advance(parts, state, n, max_weight):
    """Step ``parts[:m]`` to the next pattern.  ``state = [m, w]``; False when exhausted."""
    m = state[0]
    w = state[1]
    # Next pattern with the same weight and number of parts.
    if m >= 2:
        suffix = parts[m - 1]
        for i in range(m - 2, -1, -1):
            suffix += parts[i]
            v = parts[i] + 1
            t = m - 1 - i
            if _feasible(t, v, suffix - v, n):
                parts[i] = v
                _fill_smallest(parts, i + 1, t, v, suffix - v, n)
                return True
    # Next admissible part count at this weight, then heavier weights.
    m += 1
    top = n * (n + 1) // 2
    while w <= max_weight and w <= top:
        while m * (m + 1) // 2 <= w and m <= n:
            if _feasible(m, 0, w, n):
                _fill_smallest(parts, 0, m, 0, w, n)
                state[0] = m
                state[1] = w
                return True
            m += 1
        w += 1
        m = 1
    return False


def _weight_cap(n, cap):
    top = n * (n + 1) // 2
    return top if cap is None else min(int(cap), top)


def patterns_by_logistic_weight(n: int, cap: int | None = None):
    """Yield rank tuples (1-based) in ORBGRAND order, starting with ``()``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    max_weight = _weight_cap(n, cap)
    parts = np.zeros(n + 1, dtype=np.int64)
    state = np.zeros(2, dtype=np.int64)
    yield ()
    while _advance(parts, state, n, max_weight):
        yield tuple(int(x) for x in parts[:state[0]])


# ---------------------------------------------------------------------------
# decoding kernel


@numba.njit(cache=True, nogil=True)
def _search(s0, cols_by_rank, max_queries, max_weight):
    """Return (found, queries, m, weight, parts) for the first zero-syndrome pattern."""
    n = cols_by_rank.shape[0]
    n_words = cols_by_rank.shape[1]
    parts = np.zeros(n + 1, dtype=np.int64)
    state = np.zeros(2, dtype=np.int64)
    s = np.empty(n_words, dtype=np.uint64)
    queries = 1
    zero = True
    for q in range(n_words):
        if s0[q] != 0:
            zero = False
    if zero:
        return True, queries, 0, 0, parts
    while queries < max_queries:
        if not _advance(parts, state, n, max_weight):
            break
        queries += 1
        m = state[0]
        for q in range(n_words):
            s[q] = s0[q]
        for j in range(m):
            col = cols_by_rank[parts[j] - 1]
            for q in range(n_words):
                s[q] ^= col[q]
        zero = True
        for q in range(n_words):
            if s[q] != 0:
                zero = False
                break
        if zero:
            return True, queries, m, state[1], parts
    return False, queries, 0, -1, parts


def decode(llrs, code: LinearCode, cfg: DecoderConfig = DecoderConfig()) -> DecodeOutcome:
    """Decode one frame of LLRs into a codeword of ``code``."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llrs.shape}")
    hard = (llrs < 0).astype(np.uint8)
    perm = rank_by_reliability(llrs)
    s0 = syndrome(code, hard)
    cols = np.ascontiguousarray(code.columns[perm])
    found, queries, m, weight, parts = _search(
        s0, cols, cfg.max_queries, _weight_cap(code.n, cfg.max_logistic_weight))
    if not found:
        return DecodeOutcome(codeword=None, queries=int(queries), abandoned=True)
    flips = perm[parts[:m] - 1]
    hard[flips] ^= 1
    return DecodeOutcome(codeword=hard, queries=int(queries), abandoned=False,
                         logistic_weight=int(weight))

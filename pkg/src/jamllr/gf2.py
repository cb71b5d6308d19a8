"""Dense GF(2) linear algebra on uint8 0/1 matrices, plus word packing."""

from __future__ import annotations

import numpy as np


def as_bits(m) -> np.ndarray:
    a = np.asarray(m)
    if a.size and not np.all((a == 0) | (a == 1)):
        raise ValueError("binary matrix entries must be 0 or 1")
    return a.astype(np.uint8)


def rref(m) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot column of each nonzero row."""
    a = as_bits(m).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.flatnonzero(a[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m) -> int:
    return len(rref(m)[1])


def nullspace(m) -> np.ndarray:
    """Basis (as rows) of ``{x : m @ x = 0 mod 2}``."""
    a = as_bits(m)
    cols = a.shape[1]
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, p in enumerate(pivots):
            basis[j, p] = red[i, f]
    return basis


def matmul(a, b) -> np.ndarray:
    return (as_bits(a).astype(np.int64) @ as_bits(b).astype(np.int64) % 2).astype(np.uint8)


def pack_columns(h) -> np.ndarray:
    """Pack each column of ``h`` into little-endian uint64 words.

    Returns shape ``(n_cols, n_words)``; bit ``r % 64`` of word ``r // 64``
    holds row ``r``.  The syndrome of a word is then the XOR of the packed
    columns at its nonzero positions.
    """
    h = as_bits(h)
    rows, cols = h.shape
    n_words = max(1, (rows + 63) // 64)
    out = np.zeros((cols, n_words), dtype=np.uint64)
    for r in range(rows):
        word, bit = divmod(r, 64)
        out[:, word] |= h[r].astype(np.uint64) << np.uint64(bit)
    return out


def packed_syndrome(columns: np.ndarray, word) -> np.ndarray:
    word = np.asarray(word)
    sel = columns[word.astype(bool)]
    if sel.shape[0] == 0:
        return np.zeros(columns.shape[1], dtype=np.uint64)
    return np.bitwise_xor.reduce(sel, axis=0)

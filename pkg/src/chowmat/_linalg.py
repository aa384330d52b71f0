"""Exact linear algebra: signatures by symmetric congruence, ranks, kernels.

Signatures are computed over the rationals with simultaneous row/column
elimination; zero diagonals are handled by the standard hyperbolic 2x2 block,
each contributing one positive and one negative inertia count.  Ranks of
integer matrices prove "full rank" through a single modular elimination
(full rank mod p implies full rank over Q) and fall back to exact rational
elimination otherwise.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

#: Prime below 2^31 so products of two reduced entries stay inside int64.
_P = 2147483647


def signature(sym: list[list[Fraction]]) -> tuple[int, int, int]:
    """Exact inertia (n_plus, n_minus, n_zero) of a symmetric rational matrix."""
    n = len(sym)
    a = [[Fraction(v) for v in row] for row in sym]
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    pos = neg = zero = 0
    while active:
        k = next((i for i in active if a[i][i] != 0), None)
        if k is not None:
            d = a[k][k]
            if d > 0:
                pos += 1
            else:
                neg += 1
            active.remove(k)
            col = {r: a[r][k] for r in active}
            for r in active:
                if col[r]:
                    for c in active:
                        a[r][c] -= col[r] * a[k][c] / d
            continue
        pair = next(
            ((i, j) for ii, i in enumerate(active) for j in active[ii + 1 :] if a[i][j] != 0),
            None,
        )
        if pair is None:
            zero += len(active)
            break
        i, j = pair
        v = a[i][j]
        pos += 1
        neg += 1
        active.remove(i)
        active.remove(j)
        coli = {r: a[r][i] for r in active}
        colj = {r: a[r][j] for r in active}
        for r in active:
            if coli[r] or colj[r]:
                for c in active:
                    a[r][c] -= (coli[r] * a[j][c] + colj[r] * a[i][c]) / v
    return pos, neg, zero


def rank_mod_p(matrix: np.ndarray, p: int = _P) -> int:
    """Rank of an integer matrix over GF(p); a lower bound for the Q-rank."""
    arr = np.asarray(matrix)
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        m = np.array([[int(v) % p for v in row] for row in arr], dtype=np.int64)
    else:
        m = arr.astype(np.int64) % p
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        sel = None
        for r in range(rank, rows):
            if m[r, col]:
                sel = r
                break
        if sel is None:
            continue
        m[[rank, sel]] = m[[sel, rank]]
        inv = pow(int(m[rank, col]), p - 2, p)
        m[rank] = (m[rank] * inv) % p
        mask = m[rank + 1 :, col] != 0
        if mask.any():
            m[rank + 1 :][mask] = (m[rank + 1 :][mask] - np.outer(m[rank + 1 :, col][mask], m[rank])) % p
        rank += 1
        if rank == rows:
            break
    return rank


def rank_exact_fraction(matrix: list[list[Fraction]]) -> int:
    m = [[Fraction(v) for v in row] for row in matrix]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    for col in range(cols):
        sel = next((r for r in range(rank, rows) if m[r][col]), None)
        if sel is None:
            continue
        m[rank], m[sel] = m[sel], m[rank]
        piv = m[rank][col]
        for r in range(rows):
            if r != rank and m[r][col]:
                f = m[r][col] / piv
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def rank_int(matrix: np.ndarray) -> int:
    """Exact rank over Q of an integer matrix.

    Fast path: if the rank mod p is already maximal, that is a proof.  The
    modular rank never exceeds the rational one, so any shortfall triggers
    the exact rational elimination.
    """
    if matrix.size == 0:
        return 0
    modular = rank_mod_p(matrix)
    if modular == min(matrix.shape):
        return modular
    exact = rank_exact_fraction([[Fraction(int(v)) for v in row] for row in matrix])
    assert exact >= modular
    return exact


def nullity_int(matrix: np.ndarray) -> int:
    if matrix.size == 0:
        return matrix.shape[1] if matrix.ndim == 2 else 0
    return matrix.shape[1] - rank_int(matrix)


def is_full_rank(matrix: np.ndarray) -> bool:
    if matrix.size == 0:
        return min(matrix.shape) == 0
    return rank_int(matrix) == min(matrix.shape)

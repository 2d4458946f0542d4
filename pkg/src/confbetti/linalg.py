"""Exact rank of sparse rational matrices.

Three independent routes:

* :func:`rank`: fraction-free elimination on integer rows.  Small
  matrices use dense Bareiss; larger ones use sparse elimination with
  Markowitz-style pivot choice and gcd content removal.
* :func:`rank_rational`: textbook Gaussian elimination over ``Fraction``.
* :func:`rank_via_modular_check`: elimination modulo a random large
  prime.  Never exceeds the rational rank; used only as a cross-check.
"""

from __future__ import annotations

import heapq
import math
import random
import time
from dataclasses import dataclass
from typing import Optional

from .complex import SparseRationalMatrix

DENSE_CUTOFF = 64


@dataclass(frozen=True)
class RankReport:
    rank: int
    rows: int
    cols: int
    pivot_count: int
    elapsed: float  # seconds
    backend: str = "fraction-free"

    def __int__(self):
        return self.rank


def _integer_rows(m: SparseRationalMatrix) -> list:
    """Rows as ``{col: int}``, each scaled by the lcm of its denominators."""
    out = []
    for row in m.row_dicts():
        scale = 1
        for v in row.values():
            scale = math.lcm(scale, v.denominator)
        out.append({c: int(v * scale) for c, v in row.items()})
    return out


def rank(m: SparseRationalMatrix) -> RankReport:
    start = time.perf_counter()
    if max(m.rows, m.cols) < DENSE_CUTOFF:
        r = _bareiss_dense(m)
        backend = "bareiss-dense"
    else:
        r = _fraction_free_sparse(_integer_rows(m))
        backend = "fraction-free-sparse"
    return RankReport(r, m.rows, m.cols, r, time.perf_counter() - start, backend)


def _bareiss_dense(m: SparseRationalMatrix) -> int:
    rows = [[0] * m.cols for _ in range(m.rows)]
    for i, row in enumerate(_integer_rows(m)):
        for c, v in row.items():
            rows[i][c] = v
    nrows, ncols = m.rows, m.cols
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((p for p in range(r, nrows) if rows[p][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        a = rows[r][c]
        for i in range(r + 1, nrows):
            b = rows[i][c]
            ri = rows[i]
            rr = rows[r]
            for j in range(c + 1, ncols):
                ri[j] = (a * ri[j] - b * rr[j]) // prev
            ri[c] = 0
        prev = a
        r += 1
    return r


def _fraction_free_sparse(rows: list) -> int:
    """Rank of integer rows ``{col: int}``; consumes ``rows``."""
    active = {}
    col_rows: dict = {}
    heap = []
    for rid, row in enumerate(rows):
        if not row:
            continue
        active[rid] = row
        heapq.heappush(heap, (len(row), rid))
        for c in row:
            col_rows.setdefault(c, set()).add(rid)

    rank_ = 0
    while heap:
        length, rid = heapq.heappop(heap)
        row = active.get(rid)
        if row is None or len(row) != length:
            continue  # stale heap entry
        # Markowitz: shortest row, then the column with fewest other entries;
        # prefer unit pivots to keep the growth down.
        c = min(row, key=lambda col: (len(col_rows[col]), abs(row[col]), col))
        a = row[c]
        del active[rid]
        for col in row:
            col_rows[col].discard(rid)
        rank_ += 1
        for other in list(col_rows[c]):
            target = active[other]
            b = target[c]
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            new = {}
            for col, v in target.items():
                if col != c:
                    new[col] = fa * v
            for col, v in row.items():
                if col == c:
                    continue
                x = new.get(col, 0) - fb * v
                if x:
                    new[col] = x
                else:
                    new.pop(col, None)
            for col in target:
                if col not in new:
                    col_rows[col].discard(other)
            for col in new:
                col_rows.setdefault(col, set()).add(other)
            if new:
                content = math.gcd(*new.values())
                if content > 1:
                    new = {col: v // content for col, v in new.items()}
                active[other] = new
                heapq.heappush(heap, (len(new), other))
            else:
                del active[other]
    return rank_


def rank_rational(m: SparseRationalMatrix) -> RankReport:
    """Plain Gaussian elimination over Q, first nonzero pivot in column order."""
    start = time.perf_counter()
    rows = [dict(r) for r in m.row_dicts() if r]
    r = 0
    for c in range(m.cols):
        pivot = next((k for k in range(r, len(rows)) if rows[k].get(c)), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        inv = 1 / prow[c]
        for k in range(r + 1, len(rows)):
            f = rows[k].get(c)
            if not f:
                continue
            f = f * inv
            target = rows[k]
            for col, v in prow.items():
                x = target.get(col, 0) - f * v
                if x:
                    target[col] = x
                else:
                    target.pop(col, None)
        r += 1
    return RankReport(r, m.rows, m.cols, r, time.perf_counter() - start, "rational")


def random_prime(rng: random.Random, bits: int = 61) -> int:
    from sympy import randprime

    low = 1 << (bits - 1)
    return randprime(low + rng.randrange(low // 2), 1 << bits)


def rank_via_modular_check(
    m: SparseRationalMatrix, prime: Optional[int] = None, seed: Optional[int] = None
) -> RankReport:
    """Rank over GF(p) for a random ~61-bit prime p not dividing any denominator."""
    start = time.perf_counter()
    rng = random.Random(seed)
    denominators = {v.denominator for _, _, v in m.entries}
    while prime is None or any(d % prime == 0 for d in denominators):
        prime = random_prime(rng)
    p = prime
    rows = []
    for row in m.row_dicts():
        red = {}
        for c, v in row.items():
            x = v.numerator * pow(v.denominator, -1, p) % p
            if x:
                red[c] = x
        if red:
            rows.append(red)
    r = _modular_sparse(rows, p)
    return RankReport(r, m.rows, m.cols, r, time.perf_counter() - start, f"modular(p={p})")


def _modular_sparse(rows: list, p: int) -> int:
    active = dict(enumerate(rows))
    col_rows: dict = {}
    for rid, row in active.items():
        for c in row:
            col_rows.setdefault(c, set()).add(rid)
    rank_ = 0
    while active:
        rid = min(active, key=lambda k: (len(active[k]), k))
        row = active.pop(rid)
        for col in row:
            col_rows[col].discard(rid)
        c = min(row, key=lambda col: (len(col_rows[col]), col))
        inv = pow(row[c], -1, p)
        rank_ += 1
        for other in list(col_rows[c]):
            target = active[other]
            f = target[c] * inv % p
            for col, v in row.items():
                x = (target.get(col, 0) - f * v) % p
                if x:
                    if col not in target:
                        col_rows.setdefault(col, set()).add(other)
                    target[col] = x
                elif col in target:
                    del target[col]
                    col_rows[col].discard(other)
            if not target:
                del active[other]
    return rank_


def nullity(m: SparseRationalMatrix) -> int:
    return m.cols - rank(m).rank


def rank_of_vectors(vectors, length: int) -> int:
    """Rank of a list of sparse ``{position: coeff}`` vectors of the given length."""
    return rank(SparseRationalMatrix.from_columns(length, vectors)).rank


__all__ = [
    "RankReport", "rank", "rank_rational", "rank_via_modular_check", "random_prime",
    "nullity", "rank_of_vectors",
]

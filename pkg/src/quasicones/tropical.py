"""Extended-integer min-plus matrix algebra.

Every entry encodes an exponent tail set Z_{>=v}: +inf stands for the empty
set, -inf for all of Z.  Under the Minkowski-sum reading of addition the
empty set absorbs, so +inf + x = +inf for every x, including -inf.
"""
from __future__ import annotations

from typing import Sequence

INF = float("inf")
NEG_INF = float("-inf")

ExtInt = int | float
ExtMatrix = tuple  # tuple of row tuples of ExtInt


def ext_add(a: ExtInt, b: ExtInt) -> ExtInt:
    """Tail-set sum; the empty set (+inf) absorbs everything."""
    if a == INF or b == INF:
        return INF
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def ext_sub(a: ExtInt, k: int) -> ExtInt:
    """Shift a tail set down by a finite integer."""
    return ext_add(a, -k)


def freeze(rows: Sequence[Sequence[ExtInt]]) -> ExtMatrix:
    return tuple(tuple(r) for r in rows)


def identity(dim: int) -> ExtMatrix:
    return freeze([[0 if i == j else INF for j in range(dim)] for i in range(dim)])


def all_inf(dim: int) -> ExtMatrix:
    return freeze([[INF] * dim for _ in range(dim)])


def minplus_product(a: ExtMatrix, b: ExtMatrix) -> ExtMatrix:
    """c[i][j] = min_k (a[i][k] + b[k][j]) with tail-set addition."""
    dim = len(a)
    if len(b) != dim:
        raise ValueError("dimension mismatch")
    out = []
    for i in range(dim):
        row_a = a[i]
        row = []
        for j in range(dim):
            best = INF
            for k in range(dim):
                v = ext_add(row_a[k], b[k][j])
                if v < best:
                    best = v
            row.append(best)
        out.append(row)
    return freeze(out)


def elementwise_min(a: ExtMatrix, b: ExtMatrix) -> ExtMatrix:
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return freeze([[min(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)])


def _one_step(a: ExtMatrix) -> ExtMatrix:
    return minplus_product(a, elementwise_min(a, identity(len(a))))


def _floor_negative_cycles(a: ExtMatrix) -> ExtMatrix:
    """Entries on a walk through a negative cycle drop to -inf."""
    dim = len(a)
    bad = [k for k in range(dim) if a[k][k] < 0]
    rows = [list(r) for r in a]
    for k in bad:
        for i in range(dim):
            if a[i][k] < INF or i == k:
                for j in range(dim):
                    if a[k][j] < INF or j == k:
                        rows[i][j] = NEG_INF
    return freeze(rows)


def closure(a: ExtMatrix) -> ExtMatrix:
    """Least fixpoint of A <- A (x)' (A (+)' I').

    Equals the min over all walks of length >= 1, i.e. the subalgebra
    generated by the entries.  Without negative cycles the fixpoint is
    reached within dim squaring passes; negative cycles floor every entry
    they can touch at -inf.
    """
    dim = len(a)
    b = a
    for _ in range(max(1, dim)):
        nxt = _one_step(b)
        if nxt == b:
            return b
        b = nxt
    b = _floor_negative_cycles(b)
    assert _one_step(b) == b, "closure failed to stabilise after cycle flooring"
    return b


def is_idempotent(a: ExtMatrix) -> bool:
    return _one_step(a) == a


def _check_square(a: ExtMatrix) -> int:
    dim = len(a)
    if any(len(r) != dim for r in a):
        raise ValueError("matrix is not square")
    return dim


def box_plus(a: ExtMatrix, b: ExtMatrix) -> ExtMatrix:
    """Block direct sum with empty (+inf) off-diagonal blocks."""
    da, db = _check_square(a), _check_square(b)
    rows = [list(a[i]) + [INF] * db for i in range(da)]
    rows += [[INF] * da + list(b[i]) for i in range(db)]
    return freeze(rows)


def box_bslash(a: ExtMatrix, b: ExtMatrix) -> ExtMatrix:
    """Block sum with the full tail set (-inf) in the lower-left block."""
    da, db = _check_square(a), _check_square(b)
    rows = [list(a[i]) + [INF] * db for i in range(da)]
    rows += [[NEG_INF] * da + list(b[i]) for i in range(db)]
    return freeze(rows)


def n_square(n: int, k: int, sign: int) -> ExtMatrix:
    """Nilpotent block matrix for the split at simple root k.

    The (n+1)-dimensional matrix whose lower-left k-split block is -inf for
    sign -1 (transposed for sign +1) and +inf everywhere else.
    """
    if not 1 <= k <= n:
        raise ValueError(f"split index {k} out of range 1..{n}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m = box_bslash(all_inf(k), all_inf(n + 1 - k))
    if sign == 1:
        m = freeze([[m[j][i] for j in range(n + 1)] for i in range(n + 1)])
    return m

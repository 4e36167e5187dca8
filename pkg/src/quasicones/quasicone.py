"""Quasicone matrices: validation, defect, gap, lattice structure, group
actions, canonical normal form and bounded enumeration.

A quasicone matrix stores, per off-diagonal position, the least delta
exponent whose whole tail of root vectors lies in the subalgebra, plus one
scalar (heisenberg) exponent for the Cartan directions.  Position (a, b)
with a < b carries the positive root a_{a+1}+...+a_b, position (b, a) its
negative.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Sequence

from . import tropical
from .tropical import INF, NEG_INF, ExtInt, ext_add
from .roots import root_index

Violation = tuple  # ("triangle", (p, q, r), lhs, rhs) | ("pair", (p, q), total, omega)


@dataclass(frozen=True)
class QuasiconeMatrix:
    rank: int
    entries: tuple  # (rank+1) x (rank+1), None on the diagonal
    heisenberg: ExtInt = 1

    @property
    def dim(self) -> int:
        return self.rank + 1

    def entry(self, p: int, q: int) -> ExtInt:
        if p == q:
            raise ValueError("diagonal position carries no root entry")
        return self.entries[p][q]

    def is_finite(self) -> bool:
        d = self.dim
        return all(
            isinstance(self.entries[p][q], int)
            for p in range(d)
            for q in range(d)
            if p != q
        )


def from_rows(rows: Sequence[Sequence], heisenberg: ExtInt = 1) -> QuasiconeMatrix:
    dim = len(rows)
    if any(len(r) != dim for r in rows):
        raise ValueError("matrix is not square")
    ent = tuple(
        tuple(None if p == q else rows[p][q] for q in range(dim)) for p in range(dim)
    )
    return QuasiconeMatrix(dim - 1, ent, heisenberg)


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Index pairs (a, b), a < b, in increasing root-index order."""
    return tuple(
        sorted(
            ((a, b) for a in range(n) for b in range(a + 1, n + 1)),
            key=lambda ab: root_index(ab[0], ab[1]),
        )
    )


@lru_cache(maxsize=None)
def _perm_tables(n: int):
    """All permutations with inverses and their action on the pair list."""
    plist = pairs(n)
    pindex = {ab: t for t, ab in enumerate(plist)}
    tables = []
    for sigma in permutations(range(n + 1)):
        inv = [0] * (n + 1)
        for i, s in enumerate(sigma):
            inv[s] = i
        gmap = tuple(
            pindex[tuple(sorted((inv[a], inv[b])))] for a, b in plist
        )
        tables.append((sigma, tuple(inv), gmap))
    return tuple(tables)


def gap(c: QuasiconeMatrix) -> tuple[ExtInt, ...]:
    """Pair sums (c_nu + c_-nu) in increasing index order."""
    e = c.entries
    return tuple(ext_add(e[a][b], e[b][a]) for a, b in pairs(c.rank))


def defect(c: QuasiconeMatrix) -> int:
    if not c.is_finite():
        raise ValueError("defect requires finite entries")
    return sum(max(g - 2, 0) for g in gap(c))


def validate(c: QuasiconeMatrix) -> list[Violation]:
    """All violated triangle or pair inequalities, empty when valid."""
    d = c.dim
    e = c.entries
    bad: list[Violation] = []
    for p in range(d):
        for q in range(d):
            if p == q:
                continue
            for r in range(d):
                if r == p or r == q:
                    continue
                rhs = ext_add(e[p][r], e[r][q])
                if e[p][q] > rhs:
                    bad.append(("triangle", (p, q, r), e[p][q], rhs))
    for a, b in pairs(c.rank):
        total = ext_add(e[a][b], e[b][a])
        if total < c.heisenberg:
            bad.append(("pair", (a, b), total, c.heisenberg))
    return bad


def gamma(n: int, values: Sequence[int]) -> QuasiconeMatrix:
    """Least quasicone candidate with the given gap vector.

    Positive entries are maximal (the root length), negatives make up the
    gap.  Rejects non-monotone input.
    """
    plist = pairs(n)
    if len(values) != len(plist):
        raise ValueError(f"gap vector must have {len(plist)} components")
    if any(values[t] < values[t + 1] for t in range(len(values) - 1)):
        raise ValueError("gap vector must be monotone non-increasing")
    dim = n + 1
    rows = [[0] * dim for _ in range(dim)]
    for t, (a, b) in enumerate(plist):
        rows[a][b] = b - a
        rows[b][a] = values[t] - (b - a)
    return from_rows(rows)


def compare(c1: QuasiconeMatrix, c2: QuasiconeMatrix) -> str:
    """Order relation: 'equal', '<i', '>i', '<ii', '>ii' or 'incomparable'.

    (i) compares matrices with identical positive entries by their negative
    entries; (ii) compares matrices with identical gap vectors the same way.
    """
    if c1.rank != c2.rank:
        raise ValueError("rank mismatch")
    if c1.entries == c2.entries:
        return "equal"
    plist = pairs(c1.rank)
    e1, e2 = c1.entries, c2.entries
    pos_equal = all(e1[a][b] == e2[a][b] for a, b in plist)
    neg_le = all(e1[b][a] <= e2[b][a] for a, b in plist)
    neg_ge = all(e1[b][a] >= e2[b][a] for a, b in plist)
    if pos_equal:
        if neg_le:
            return "<i"
        if neg_ge:
            return ">i"
        return "incomparable"
    if gap(c1) == gap(c2):
        if neg_le:
            return "<ii"
        if neg_ge:
            return ">ii"
    return "incomparable"


def _with_omega(entries, omega: ExtInt, dim: int):
    return tuple(
        tuple(omega if p == q else entries[p][q] for q in range(dim))
        for p in range(dim)
    )


def close(c: QuasiconeMatrix) -> QuasiconeMatrix:
    """Joint fixpoint of the tropical closure and the heisenberg minimum."""
    dim = c.dim
    entries, omega = c.entries, c.heisenberg
    while True:
        full = tropical.closure(_with_omega(entries, omega, dim))
        new_omega = min(full[p][p] for p in range(dim))
        new_entries = tuple(
            tuple(None if p == q else full[p][q] for q in range(dim))
            for p in range(dim)
        )
        if new_entries == entries and new_omega == omega:
            return QuasiconeMatrix(c.rank, entries, omega)
        entries, omega = new_entries, new_omega


def is_closed(c: QuasiconeMatrix) -> bool:
    return tropical.is_idempotent(_with_omega(c.entries, c.heisenberg, c.dim))


def lattice_join(c1: QuasiconeMatrix, c2: QuasiconeMatrix) -> QuasiconeMatrix:
    """Subalgebra generated by the union: entrywise min, then closure."""
    if c1.rank != c2.rank:
        raise ValueError("rank mismatch")
    dim = c1.dim
    ent = tuple(
        tuple(
            None if p == q else min(c1.entries[p][q], c2.entries[p][q])
            for q in range(dim)
        )
        for p in range(dim)
    )
    return close(QuasiconeMatrix(c1.rank, ent, min(c1.heisenberg, c2.heisenberg)))


def lattice_meet(c1: QuasiconeMatrix, c2: QuasiconeMatrix) -> QuasiconeMatrix:
    """Intersection: entrywise max."""
    if c1.rank != c2.rank:
        raise ValueError("rank mismatch")
    dim = c1.dim
    ent = tuple(
        tuple(
            None if p == q else max(c1.entries[p][q], c2.entries[p][q])
            for q in range(dim)
        )
        for p in range(dim)
    )
    return QuasiconeMatrix(c1.rank, ent, max(c1.heisenberg, c2.heisenberg))


def translate_action(c: QuasiconeMatrix, u: Sequence[int]) -> QuasiconeMatrix:
    """Shift entries by u_p - u_q; gap and defect are untouched."""
    dim = c.dim
    if len(u) != dim:
        raise ValueError("translation vector length must match the dimension")
    ent = tuple(
        tuple(
            None if p == q else ext_add(c.entries[p][q], u[p] - u[q])
            for q in range(dim)
        )
        for p in range(dim)
    )
    return QuasiconeMatrix(c.rank, ent, c.heisenberg)


def permute_action(c: QuasiconeMatrix, sigma: Sequence[int]) -> QuasiconeMatrix:
    """Row-column permutation: new entry (p, q) reads old (inv p, inv q)."""
    dim = c.dim
    if sorted(sigma) != list(range(dim)):
        raise ValueError("sigma must be a permutation of the index set")
    inv = [0] * dim
    for i, s in enumerate(sigma):
        inv[s] = i
    ent = tuple(
        tuple(
            None if p == q else c.entries[inv[p]][inv[q]] for q in range(dim)
        )
        for p in range(dim)
    )
    return QuasiconeMatrix(c.rank, ent, c.heisenberg)


def _candidate(c: QuasiconeMatrix, inv: Sequence[int]):
    """Permute by inv, then translate so the superdiagonal is all ones.

    Returns (entry rows, row-major off-diagonal tuple).
    """
    dim = c.dim
    e = c.entries
    perm = [[e[inv[p]][inv[q]] for q in range(dim)] for p in range(dim)]
    u = [0] * dim
    for p in range(dim - 1):
        u[p + 1] = u[p] + perm[p][p + 1] - 1
    rows = [
        [None if p == q else perm[p][q] + u[p] - u[q] for q in range(dim)]
        for p in range(dim)
    ]
    flat = tuple(rows[p][q] for p in range(dim) for q in range(dim) if p != q)
    return rows, flat


def _is_monotone(vec: Sequence[ExtInt]) -> bool:
    return all(vec[t] >= vec[t + 1] for t in range(len(vec) - 1))


def normalize(c: QuasiconeMatrix) -> QuasiconeMatrix:
    """Canonical representative of the permutation/translation orbit.

    Among all permutations followed by the unique translation that puts
    ones on the superdiagonal, keeps the candidates with monotone
    non-increasing gap vector and returns the lexicographic minimum by
    (gap vector, row-major entries).  When no candidate has a monotone gap
    vector (which the normal-form existence argument does not rule out),
    the minimum is taken over all candidates instead.
    """
    if not c.is_finite():
        raise ValueError("normal form is defined for finite matrices only")
    g = gap(c)
    tables = _perm_tables(c.rank)
    # Every candidate with a monotone non-increasing gap vector carries the
    # same one (the gap multiset sorted descending), which is also the
    # lexicographically greatest achievable arrangement.  Taking the
    # lex-greatest gap therefore matches the monotone candidates whenever
    # the orbit has one and extends the rule deterministically to orbits
    # that have none.
    best_gap = None
    invs = []
    for sigma, inv, gmap in tables:
        pg = tuple(g[m] for m in gmap)
        if best_gap is None or pg > best_gap:
            best_gap, invs = pg, [inv]
        elif pg == best_gap:
            invs.append(inv)
    best_rows = None
    best_flat = None
    for inv in invs:
        rows, flat = _candidate(c, inv)
        if best_flat is None or flat < best_flat:
            best_rows, best_flat = rows, flat
    return QuasiconeMatrix(
        c.rank,
        tuple(tuple(r) for r in best_rows),
        c.heisenberg,
    )


def _is_canonical(c: QuasiconeMatrix) -> bool:
    """Fast path for matrices already in normal form (monotone gap)."""
    g = gap(c)
    dim = c.dim
    ref = tuple(
        c.entries[p][q] for p in range(dim) for q in range(dim) if p != q
    )
    for sigma, inv, gmap in _perm_tables(c.rank):
        pg = tuple(g[m] for m in gmap)
        if pg == g:
            _, flat = _candidate(c, inv)
            if flat < ref:
                return False
    return True


def enumerate_normal(n: int, bound: int, canonical: bool = True) -> Iterator[QuasiconeMatrix]:
    """All normal quasicones with gaps in [1, bound], deterministically.

    Superdiagonal entries are 1, the gap vector is monotone non-increasing,
    positive entries never exceed the root length, every triangle
    inequality holds.  With canonical=True only one representative per
    normalize-orbit is produced.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    yield from _enumerate(n, bound, canonical, rng=None)


def random_normal(n: int, bound: int, rng) -> QuasiconeMatrix:
    """One uniformly-shuffled DFS leaf of the normal-form enumeration."""
    for c in _enumerate(n, bound, canonical=False, rng=rng):
        return c
    raise RuntimeError("no normal quasicone exists for these parameters")


def _enumerate(n: int, bound: int, canonical: bool, rng) -> Iterator[QuasiconeMatrix]:
    plist = pairs(n)
    q = len(plist)
    dim = n + 1
    rows = [[0] * dim for _ in range(dim)]

    def assign(t: int, prev_gap: int) -> Iterator[QuasiconeMatrix]:
        if t == q:
            ent = tuple(
                tuple(None if p == r else rows[p][r] for r in range(dim))
                for p in range(dim)
            )
            cand = QuasiconeMatrix(n, ent, 1)
            if not canonical or _is_canonical(cand):
                yield cand
            return
        a, b = plist[t]
        length = b - a
        gaps = range(1, min(bound, prev_gap) + 1)
        if rng is not None:
            gaps = sorted(gaps, key=lambda _: rng.random())
        for g in gaps:
            if b == a + 1:
                xs: Sequence[int] = (1,)
            else:
                x_lo, x_hi = None, length
                for r in range(a + 1, b):
                    hi = rows[a][r] + rows[r][b]
                    if hi < x_hi:
                        x_hi = hi
                    lows = (
                        rows[a][r] - rows[b][r],
                        rows[r][b] - rows[r][a],
                        g - rows[b][r] - rows[r][a],
                    )
                    for lo in lows:
                        if x_lo is None or lo > x_lo:
                            x_lo = lo
                    hi2 = g - (rows[r][a] - rows[r][b])
                    if hi2 < x_hi:
                        x_hi = hi2
                    hi3 = g - (rows[b][r] - rows[a][r])
                    if hi3 < x_hi:
                        x_hi = hi3
                if x_lo is None:
                    x_lo = x_hi
                xs = range(x_lo, x_hi + 1)
                if rng is not None:
                    xs = sorted(xs, key=lambda _: rng.random())
            for x in xs:
                rows[a][b] = x
                rows[b][a] = g - x
                yield from assign(t + 1, g)
        rows[a][b] = rows[b][a] = 0

    yield from assign(0, bound)


def _canonical_gap_arrangements(n: int, bound: int) -> list[tuple[int, ...]]:
    """Gap-vector arrangements that are lex-greatest in their orbit.

    Returns only the non-monotone ones; monotone arrangements are covered
    by the normal-form enumeration.
    """
    tables = _perm_tables(n)
    gmaps = [gmap for _, _, gmap in tables]
    q = len(pairs(n))
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int]) -> None:
        t = len(prefix)
        if t == q:
            g = tuple(prefix)
            if _is_monotone(g):
                return
            for gmap in gmaps:
                pg = tuple(g[m] for m in gmap)
                if pg > g:
                    return
            out.append(g)
            return
        for v in range(bound, 0, -1):
            prefix.append(v)
            rec(prefix)
            prefix.pop()

    rec([])
    return out


def enumerate_orbit_seeds(n: int, bound: int) -> Iterator[QuasiconeMatrix]:
    """One canonical representative per orbit with gaps in [1, bound].

    Extends enumerate_normal by the orbits that admit no monotone gap
    arrangement; their representatives carry the lex-greatest achievable
    arrangement instead.
    """
    yield from enumerate_normal(n, bound)
    plist = pairs(n)
    dim = n + 1
    for g in _canonical_gap_arrangements(n, bound):
        rows = [[0] * dim for _ in range(dim)]

        def assign(t: int) -> Iterator[QuasiconeMatrix]:
            if t == len(plist):
                ent = tuple(
                    tuple(None if p == r else rows[p][r] for r in range(dim))
                    for p in range(dim)
                )
                cand = QuasiconeMatrix(n, ent, 1)
                if _is_canonical(cand):
                    yield cand
                return
            a, b = plist[t]
            length = b - a
            gv = g[t]
            if b == a + 1:
                xs: Sequence[int] = (1,)
            else:
                x_lo, x_hi = None, length
                for r in range(a + 1, b):
                    x_hi = min(
                        x_hi,
                        rows[a][r] + rows[r][b],
                        gv - (rows[r][a] - rows[r][b]),
                        gv - (rows[b][r] - rows[a][r]),
                    )
                    lo = max(
                        rows[a][r] - rows[b][r],
                        rows[r][b] - rows[r][a],
                        gv - rows[b][r] - rows[r][a],
                    )
                    if x_lo is None or lo > x_lo:
                        x_lo = lo
                if x_lo is None:
                    x_lo = x_hi
                xs = range(x_lo, x_hi + 1)
            for x in xs:
                rows[a][b] = x
                rows[b][a] = gv - x
                yield from assign(t + 1)

        yield from assign(0)


def dumps(c: QuasiconeMatrix) -> str:
    """Canonical single-line document; byte-exact round trips."""
    flat = []
    for p in range(c.dim):
        for q in range(c.dim):
            if p == q:
                flat.append(None)
            else:
                v = c.entries[p][q]
                flat.append("inf" if v == INF else "-inf" if v == NEG_INF else v)
    doc = {"rank": c.rank, "entries": flat, "heisenberg": c.heisenberg}
    return json.dumps(doc, separators=(",", ":"))


def loads(text: str) -> QuasiconeMatrix:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("matrix document must be an object")
    try:
        n = doc["rank"]
        flat = doc["entries"]
        omega = doc["heisenberg"]
    except KeyError as exc:
        raise ValueError(f"matrix document misses field {exc}") from None
    dim = n + 1
    if not isinstance(n, int) or n < 1:
        raise ValueError("rank must be a positive integer")
    if not isinstance(omega, int) or isinstance(omega, bool):
        raise ValueError("heisenberg must be an integer")
    if len(flat) != dim * dim:
        raise ValueError(f"entries must hold {dim * dim} values")
    rows = []
    for p in range(dim):
        row = []
        for q in range(dim):
            v = flat[p * dim + q]
            if p == q:
                if v is not None:
                    raise ValueError("diagonal entries must be null")
                row.append(None)
            elif v == "inf":
                row.append(INF)
            elif v == "-inf":
                row.append(NEG_INF)
            elif isinstance(v, int) and not isinstance(v, bool):
                row.append(v)
            else:
                raise ValueError(f"bad entry {v!r} at ({p}, {q})")
        rows.append(tuple(row))
    return QuasiconeMatrix(n, tuple(rows), omega)

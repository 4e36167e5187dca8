"""Finite arithmetic for the affine type-A root system.

Exponential index notation: the simple root a_i maps to 2^(i-1), so the
positive root a_{p+1} + ... + a_q has index 2^q - 2^p and lives at matrix
position (p, q); its negative lives at (q, p).  Real affine roots are a
signed index plus an integer multiple of the null root delta; imaginary
roots are pure nonzero multiples of delta.

Weights are stored by their values on the affine coroots (one per node of
the affine diagram, index 0 first) plus the value on the scaling element d.
All marks are 1 in type A, so the central charge is the plain coroot sum.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Rational = int | Fraction


def is_root_index(nu: int) -> bool:
    """True iff nu = 2^b - 2^a for some 0 <= a < b (a contiguous bit block)."""
    if nu <= 0:
        return False
    a = (nu & -nu).bit_length() - 1
    b = nu.bit_length()
    return nu == (1 << b) - (1 << a)


def root_endpoints(nu: int) -> tuple[int, int]:
    """Matrix endpoints (a, b) of a positive root index."""
    if not is_root_index(nu):
        raise ValueError(f"{nu} is not a root index")
    return (nu & -nu).bit_length() - 1, nu.bit_length()


def root_index(a: int, b: int) -> int:
    if not 0 <= a < b:
        raise ValueError(f"bad endpoints ({a}, {b})")
    return (1 << b) - (1 << a)


def root_length(nu: int) -> int:
    a, b = root_endpoints(nu)
    return b - a


def position_of(signed_nu: int) -> tuple[int, int]:
    """Matrix position of a signed root index."""
    a, b = root_endpoints(abs(signed_nu))
    return (a, b) if signed_nu > 0 else (b, a)


def root_at(p: int, q: int) -> int:
    """Signed root index at matrix position (p, q), p != q."""
    if p == q:
        raise ValueError("diagonal position carries no root")
    return root_index(p, q) if p < q else -root_index(q, p)


def all_indices(n: int) -> tuple[int, ...]:
    """I_n in increasing order."""
    return tuple(sorted(root_index(a, b) for a in range(n) for b in range(a + 1, n + 1)))


def classical_coords(signed_nu: int, n: int) -> tuple[int, ...]:
    """Simple-root coordinate vector (length n) of a signed root index."""
    if signed_nu == 0:
        return (0,) * n
    a, b = root_endpoints(abs(signed_nu))
    if b > n:
        raise ValueError(f"index {signed_nu} exceeds rank {n}")
    s = 1 if signed_nu > 0 else -1
    return tuple(s if a < i <= b else 0 for i in range(1, n + 1))


def coords_to_signed_nu(coords: Sequence[int]) -> int | None:
    """Signed index of a coordinate vector, 0 for zero, None if not a root."""
    support = [i for i, c in enumerate(coords) if c != 0]
    if not support:
        return 0
    vals = {coords[i] for i in support}
    if vals not in ({1}, {-1}):
        return None
    if support != list(range(support[0], support[-1] + 1)):
        return None
    sign = coords[support[0]]
    return sign * root_index(support[0], support[-1] + 1)


@dataclass(frozen=True)
class AffineRoot:
    """classical signed index (0 = none) plus delta coefficient."""

    classical: int
    delta: int

    def __post_init__(self) -> None:
        if self.classical != 0 and not is_root_index(abs(self.classical)):
            raise ValueError(f"{self.classical} is not a signed root index")

    @property
    def is_real(self) -> bool:
        return self.classical != 0

    @property
    def is_imaginary(self) -> bool:
        return self.classical == 0 and self.delta != 0

    def is_root(self) -> bool:
        return self.classical != 0 or self.delta != 0

    def __neg__(self) -> "AffineRoot":
        return AffineRoot(-self.classical, -self.delta)


@dataclass(frozen=True)
class Weight:
    """Values on the affine coroots (index 0 first) and on d."""

    coroot_values: tuple[Rational, ...]
    d_value: Rational = 0

    @property
    def rank(self) -> int:
        return len(self.coroot_values) - 1

    @property
    def central_charge(self) -> Rational:
        return sum(self.coroot_values)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(
            tuple(x + y for x, y in zip(self.coroot_values, other.coroot_values)),
            self.d_value + other.d_value,
        )

    def __neg__(self) -> "Weight":
        return Weight(tuple(-x for x in self.coroot_values), -self.d_value)


def zero_weight(n: int) -> Weight:
    return Weight((0,) * (n + 1))


def fundamental_weight(n: int, i: int) -> Weight:
    """omega_i, vanishing on d."""
    if not 0 <= i <= n:
        raise ValueError(f"node {i} out of range 0..{n}")
    return Weight(tuple(1 if j == i else 0 for j in range(n + 1)))


def pairing(lam: Weight, beta: AffineRoot) -> Rational:
    """Bilinear pairing (lam, beta) = sum m_i lam(coroot_i) + k lam(c)."""
    n = lam.rank
    val: Rational = beta.delta * lam.central_charge
    if beta.classical != 0:
        m = classical_coords(beta.classical, n)
        val += sum(mi * ci for mi, ci in zip(m, lam.coroot_values[1:]))
    return val


def classify(lam: Weight, beta: AffineRoot) -> int:
    """Sign in {+1, 0, -1} of the pairing."""
    if not beta.is_root():
        raise ValueError("beta must be a root")
    v = pairing(lam, beta)
    return (v > 0) - (v < 0)


def positive_member(lam1: Weight, lam2: Weight, beta: AffineRoot) -> bool:
    c1 = classify(lam1, beta)
    return c1 > 0 or (c1 == 0 and classify(lam2, beta) > 0)


def parabolic_member(lam1: Weight, lam2: Weight, lam3: Weight, beta: AffineRoot) -> bool:
    c1 = classify(lam1, beta)
    if c1 > 0:
        return True
    return c1 == 0 and (classify(lam2, beta) > 0 or classify(lam3, beta) > 0)


def phi_x(n: int, x: Iterable[int]) -> Weight:
    """Hyperplane-defining weight for a subset of classical node indices."""
    xs = set(x)
    if not xs <= set(range(1, n + 1)):
        raise ValueError("subset must consist of classical node indices")
    if xs == set(range(1, n + 1)):
        return Weight((0,) + (1,) * n)
    rest = [i for i in range(1, n + 1) if i not in xs]
    vals = [0] * (n + 1)
    for i in rest:
        vals[i] = 1
    vals[0] = -len(rest)  # all marks are 1 in type A
    return Weight(tuple(vals))


_CACHED_GRAM: dict[int, tuple[tuple[int, ...], ...]] = {}


def _gram(n: int) -> tuple[tuple[int, ...], ...]:
    g = _CACHED_GRAM.get(n)
    if g is None:
        g = tuple(
            tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n))
            for i in range(n)
        )
        _CACHED_GRAM[n] = g
    return g


def translate(alpha: Sequence[int], lam: Weight) -> Weight:
    """Affine translation t_alpha for a classical root-lattice vector alpha.

    t_alpha(lam) = lam + lam(c) alpha - ((lam, alpha) + (alpha, alpha)/2 lam(c)) delta,
    re-expressed in coroot coordinates.
    """
    n = lam.rank
    if len(alpha) != n:
        raise ValueError("alpha must have one coordinate per classical node")
    gram = _gram(n)
    c = lam.central_charge
    lam_alpha = sum(m * v for m, v in zip(alpha, lam.coroot_values[1:]))
    norm = sum(alpha[i] * gram[i][j] * alpha[j] for i in range(n) for j in range(n))
    # alpha as a functional on the affine coroots: (alpha, a_i) classically,
    # and -(alpha, theta) on the affine node.
    pair_simple = [sum(gram[i][j] * alpha[j] for j in range(n)) for i in range(n)]
    pair_theta = sum(pair_simple)
    vals = list(lam.coroot_values)
    vals[0] += c * (-pair_theta)
    for i in range(n):
        vals[i + 1] += c * pair_simple[i]
    # (alpha, alpha) is even for every root-lattice vector in type A
    d_val = lam.d_value - (lam_alpha + (norm // 2) * c)
    return Weight(tuple(vals), d_val)


def real_roots_window(n: int, k_bound: int) -> Iterator[AffineRoot]:
    """All real roots with |delta coefficient| <= k_bound."""
    for nu in all_indices(n):
        for s in (1, -1):
            for k in range(-k_bound, k_bound + 1):
                yield AffineRoot(s * nu, k)


def roots_window(n: int, k_bound: int) -> Iterator[AffineRoot]:
    """All roots (real and imaginary) with |delta coefficient| <= k_bound."""
    yield from real_roots_window(n, k_bound)
    for k in range(-k_bound, k_bound + 1):
        if k != 0:
            yield AffineRoot(0, k)

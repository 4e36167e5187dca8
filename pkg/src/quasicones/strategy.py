"""Operator calculus on annihilating quasicones.

A strategy is a sequence of root steps, each a signed exponential root
index with a delta exponent (AUTO resolves to the current matrix entry
minus one).  Applying a step updates the tracked worst-case annihilator in
four stages: bracket preimage, weight-offset move plus hole generator,
tropical closure joint with the heisenberg minimum, and consistency
checks.  The weight offset is the position of the current vector relative
to the hole weight; searches start at minus delta.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .quasicone import QuasiconeMatrix, close, defect, gap
from .roots import (
    classical_coords,
    coords_to_signed_nu,
    is_root_index,
    position_of,
    root_endpoints,
    root_index,
)
from .tropical import INF, NEG_INF, ext_sub


class StrategyError(Exception):
    """Base for step failures; kind mirrors the class name on the wire."""

    def __init__(self, message: str, state: "StrategyState | None" = None):
        super().__init__(message)
        self.state = state
        self.step_index: int | None = None

    @property
    def kind(self) -> str:
        return type(self).__name__


class StepAnnihilates(StrategyError):
    """The chosen exponent already lies in the annihilator."""


class DegenerateState(StrategyError):
    """The image is no longer a quasicone (heisenberg exponent below one)."""


class InvalidPath(StrategyError):
    """A partial classical sum is neither a root nor zero."""


class AutoExponentUndefined(StrategyError):
    """AUTO needs a finite entry; an empty tail has no largest missing step."""


@dataclass(frozen=True)
class Step:
    root: int
    exponent: int | None = None  # None = AUTO

    def __post_init__(self) -> None:
        if self.root == 0 or not is_root_index(abs(self.root)):
            raise ValueError(f"{self.root} is not a signed root index")
        if self.exponent is not None and not isinstance(self.exponent, int):
            raise ValueError("explicit exponents must be integers")


Strategy = tuple[Step, ...]


@dataclass(frozen=True)
class StrategyState:
    matrix: QuasiconeMatrix
    classical: tuple[int, ...]  # simple-root coordinates of the offset
    delta: int
    trace: tuple[tuple[int, int], ...] = ()  # (root, resolved exponent)


def initial_state(c: QuasiconeMatrix, delta: int = -1) -> StrategyState:
    return StrategyState(c, (0,) * c.rank, delta)


_STEP_RE = re.compile(r"^([+-]?\d+)(?:@(-?\d+))?$")


def parse_strategy(text: str) -> Strategy:
    """Comma-separated signed indices with optional @exponent."""
    steps = []
    for raw in text.split(","):
        token = "".join(raw.split())
        if not token:
            continue
        m = _STEP_RE.match(token)
        if not m:
            raise ValueError(f"bad strategy token {raw.strip()!r}")
        root = int(m.group(1))
        if root == 0 or not is_root_index(abs(root)):
            raise ValueError(f"{root} is not a signed root index")
        exp = int(m.group(2)) if m.group(2) is not None else None
        steps.append(Step(root, exp))
    if not steps:
        raise ValueError("empty strategy")
    return tuple(steps)


def format_strategy(steps: Iterable[Step]) -> str:
    out = []
    for s in steps:
        tok = f"{s.root:+d}"
        if s.exponent is not None:
            tok += f"@{s.exponent}"
        out.append(tok)
    return ", ".join(out)


def format_trace(state: StrategyState) -> str:
    return ", ".join(f"{r:+d}@{k}" for r, k in state.trace)


def auto_exponent(state: StrategyState, root: int) -> int:
    """Largest exponent at which the operator is not yet annihilating."""
    a, b = position_of(root)
    entry = state.matrix.entries[a][b]
    if entry == INF:
        raise AutoExponentUndefined(
            f"entry at {root:+d} is empty; an explicit exponent is required"
        )
    if entry == NEG_INF:
        raise StepAnnihilates(f"every exponent at {root:+d} annihilates")
    return entry - 1


def apply_step(
    state: StrategyState,
    root: int,
    exponent: int | None = None,
    *,
    tropical_close: bool = True,
) -> StrategyState:
    """One operator application in the worst-case annihilator model.

    tropical_close=False skips the closure stage and the quasicone check;
    this diagnostic mode mirrors hand bookkeeping that only records the
    local bracket and hole updates.
    """
    m = state.matrix
    n = m.rank
    if root_endpoints(abs(root))[1] > n:
        raise InvalidPath(f"root {root:+d} exceeds rank {n}")
    new_classical = tuple(
        x + y for x, y in zip(state.classical, classical_coords(root, n))
    )
    signed_offset = coords_to_signed_nu(new_classical)
    if signed_offset is None:
        raise InvalidPath(f"offset after {root:+d} is not a root or zero")

    a, b = position_of(root)
    entry = m.entries[a][b]
    k = auto_exponent(state, root) if exponent is None else exponent
    if not k < entry:
        raise StepAnnihilates(f"exponent {k} at {root:+d} already annihilates")

    # bracket preimage: keep what stays in the annihilator after commuting
    e = m.entries
    dim = n + 1
    rows = [list(r) for r in e]
    for p in range(dim):
        if p == a or p == b:
            continue
        v = ext_sub(e[p][b], k)
        if v > rows[p][a]:
            rows[p][a] = v
        v = ext_sub(e[a][p], k)
        if v > rows[b][p]:
            rows[b][p] = v
    v = ext_sub(m.heisenberg, k)
    if v > rows[b][a]:
        rows[b][a] = v

    # hole generator at the new offset
    new_delta = state.delta + k
    omega = m.heisenberg
    if signed_offset == 0:
        omega = min(omega, -new_delta)
    else:
        hp, hq = position_of(-signed_offset)
        if -new_delta < rows[hp][hq]:
            rows[hp][hq] = -new_delta

    cand = QuasiconeMatrix(
        n,
        tuple(
            tuple(None if p == q else rows[p][q] for q in range(dim))
            for p in range(dim)
        ),
        omega,
    )
    if tropical_close:
        cand = close(cand)
    out = StrategyState(cand, new_classical, new_delta, state.trace + ((root, k),))
    if tropical_close and cand.heisenberg < 1:
        raise DegenerateState(
            f"heisenberg exponent fell to {cand.heisenberg}", state=out
        )
    return out


def apply_strategy(
    state: StrategyState,
    steps: Sequence[Step],
    *,
    tropical_close: bool = True,
) -> StrategyState:
    """Left fold of apply_step; AUTO exponents resolve against each state."""
    if not steps:
        raise ValueError("empty strategy")
    for i, step in enumerate(steps):
        try:
            state = apply_step(
                state, step.root, step.exponent, tropical_close=tropical_close
            )
        except StrategyError as err:
            err.step_index = i
            raise
    return state


def is_circular(steps: Sequence[Step], n: int) -> bool:
    total = [0] * n
    for s in steps:
        for i, c in enumerate(classical_coords(s.root, n)):
            total[i] += c
    return not any(total)


def succeeded(input_matrix: QuasiconeMatrix, output: StrategyState) -> bool:
    """Defect strictly reduced, or every gap component in {1, 2}."""
    out = output.matrix
    if all(g in (1, 2) for g in gap(out)):
        return True
    return defect(out) < defect(input_matrix)


def shortest(c: QuasiconeMatrix, epsilon: int) -> Strategy:
    """Raise the first simple root, lower it back one delta notch short."""
    if epsilon < 1:
        raise ValueError("epsilon must be at least 1")
    k = min(epsilon, c.entries[1][0]) - 1
    return (Step(1), Step(-1, k))


def shortest_long(
    c: QuasiconeMatrix, *, r_mode: str = "balance", epsilon: int = 1
) -> Strategy:
    """Raise through every simple root, close with the lowered highest root.

    The final exponent is the current entry minus one for r_mode="auto",
    or the value balancing all resolved exponents to zero ("balance", the
    choice that keeps the positive Cartan tail annihilating).
    """
    n = c.rank
    raise_steps = tuple(Step(1 << i) for i in range(n))
    if n == 1:
        return shortest(c, epsilon)
    if r_mode == "auto":
        return raise_steps + (Step(-(root_index(0, n))),)
    if r_mode != "balance":
        raise ValueError(f"unknown r_mode {r_mode!r}")
    probe = apply_strategy(initial_state(c, -epsilon), raise_steps)
    k_last = -sum(k for _, k in probe.trace[1:])
    return raise_steps + (Step(-(root_index(0, n)), k_last),)


def _compositions(m: int) -> Iterable[tuple[int, ...]]:
    """Interval partitions of 0..m as part indices, deterministic order."""
    for cuts in range(1 << max(m - 1, 0)):
        marks = [0] + [i for i in range(1, m) if cuts >> (i - 1) & 1] + [m]
        yield tuple(
            root_index(marks[i], marks[i + 1]) for i in range(len(marks) - 1)
        )


def simple_basic_set(n: int) -> list[Strategy]:
    """Raise a simple-root chain, lower a monotone partition of its top."""
    out: list[Strategy] = []
    for m in range(1, n + 1):
        raise_steps = tuple(Step(1 << i) for i in range(m))
        for parts in _compositions(m):
            down = tuple(Step(-p) for p in parts)
            out.append(raise_steps + down)
            if len(parts) > 1:
                out.append(raise_steps + tuple(reversed(down)))
    return out


def validate_strategy(
    steps: Sequence[Step], c: QuasiconeMatrix, epsilon: int = 1
) -> StrategyError | None:
    """None when the strategy is applicable to c, else the first violation."""
    n = c.rank
    total = [0] * n
    for i, s in enumerate(steps):
        if root_endpoints(abs(s.root))[1] > n:
            err: StrategyError = InvalidPath(f"root {s.root:+d} exceeds rank {n}")
            err.step_index = i
            return err
        for j, x in enumerate(classical_coords(s.root, n)):
            total[j] += x
        if coords_to_signed_nu(total) is None:
            err = InvalidPath(f"partial sum after step {i} is not a root or zero")
            err.step_index = i
            return err
    try:
        apply_strategy(initial_state(c, -epsilon), steps)
    except StrategyError as caught:
        return caught
    return None


StrategyProvider = Callable[[QuasiconeMatrix], list[Strategy]]

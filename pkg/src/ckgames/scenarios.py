"""Universe constraints, sight models, and scenario construction.

Each constraint can enumerate its full world set in canonical (lexicographic)
order, test membership, and report an exact count without enumerating.  The
constraints whose natural universe is infinite (exact or at-most maximum
difference, consecutive numbers) carry an explicit value cap; the cap is a
finite proxy validated by the engine's stability check, not by construction.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .worlds import KnowledgeState, VisibilityGraph, World


class GenerationError(Exception):
    """Constraint/agent-count mismatch, missing cap, or inconsistent actual world."""


# ---------------------------------------------------------------------------
# universe constraints


@dataclass(frozen=True)
class HatsAtLeast:
    """At least `count` agents wear color `color` (index into the alphabet)."""

    color: int
    count: int
    n_colors: int

    def generate(self, n: int) -> Iterator[World]:
        for w in _tuples(range(self.n_colors), n):
            if w.count(self.color) >= self.count:
                yield w

    def contains(self, w: World) -> bool:
        return (
            all(0 <= v < self.n_colors for v in w) and w.count(self.color) >= self.count
        )

    def count_worlds(self, n: int) -> int:
        c = self.n_colors
        return sum(
            math.comb(n, k) * (c - 1) ** (n - k) for k in range(self.count, n + 1)
        )


@dataclass(frozen=True)
class HatsExactly:
    """Exactly `count` agents wear color `color`."""

    color: int
    count: int
    n_colors: int

    def generate(self, n: int) -> Iterator[World]:
        for w in _tuples(range(self.n_colors), n):
            if w.count(self.color) == self.count:
                yield w

    def contains(self, w: World) -> bool:
        return (
            all(0 <= v < self.n_colors for v in w) and w.count(self.color) == self.count
        )

    def count_worlds(self, n: int) -> int:
        return math.comb(n, self.count) * (self.n_colors - 1) ** (n - self.count)


@dataclass(frozen=True)
class MaxDiffExact:
    """Non-negative integers with max - min exactly `diff`, values capped at `cap`.

    The exact-difference reading: the two-person analysis has the max holder
    choosing between M and M-2D, which presumes the difference is attained.
    """

    diff: int
    cap: int

    def __post_init__(self):
        if self.diff < 0 or self.cap < self.diff:
            raise GenerationError("cap must be at least the required difference")

    def generate(self, n: int) -> Iterator[World]:
        if self.diff == 0:
            for v in range(self.cap + 1):
                yield (v,) * n
            return
        yield from heapq.merge(
            *(
                _window_tuples(lo, self.diff, n)
                for lo in range(self.cap - self.diff + 1)
            )
        )

    def contains(self, w: World) -> bool:
        return (
            all(0 <= v <= self.cap for v in w) and max(w) - min(w) == self.diff
        )

    def count_worlds(self, n: int) -> int:
        if self.diff == 0:
            return self.cap + 1
        d = self.diff
        # tuples over a window of d+1 values touching both ends, per window offset
        per = (d + 1) ** n - 2 * d**n + (d - 1) ** n
        return (self.cap - d + 1) * per


@dataclass(frozen=True)
class MaxDiffAtMost:
    """At-most reading of the maximum-difference announcement (kept for comparison)."""

    diff: int
    cap: int

    def __post_init__(self):
        if self.diff < 0 or self.cap < self.diff:
            raise GenerationError("cap must be at least the required difference")

    def generate(self, n: int) -> Iterator[World]:
        equal = ((v,) * n for v in range(self.cap + 1))
        yield from heapq.merge(
            equal,
            *(
                _window_tuples(lo, d, n)
                for d in range(1, self.diff + 1)
                for lo in range(self.cap - d + 1)
            ),
        )

    def contains(self, w: World) -> bool:
        return all(0 <= v <= self.cap for v in w) and max(w) - min(w) <= self.diff

    def count_worlds(self, n: int) -> int:
        return sum(
            MaxDiffExact(d, max(d, self.cap)).count_worlds(n) if d else self.cap + 1
            for d in range(self.diff + 1)
        )


@dataclass(frozen=True)
class ConsecutiveDistinct:
    """Distinct consecutive non-negative integers (one per agent), minimum at most cap-N+1."""

    cap: int

    def generate(self, n: int) -> Iterator[World]:
        if n < 2:
            raise GenerationError("consecutive numbers need at least 2 agents")
        if self.cap < n - 1:
            raise GenerationError("cap too small for the agent count")
        yield from heapq.merge(
            *(
                itertools.permutations(range(lo, lo + n))
                for lo in range(self.cap - n + 2)
            )
        )

    @staticmethod
    def _is_consecutive(w: World) -> bool:
        lo = min(w)
        return len(set(w)) == len(w) and max(w) - lo == len(w) - 1 and min(w) >= 0

    def contains(self, w: World) -> bool:
        return all(0 <= v <= self.cap for v in w) and self._is_consecutive(w)

    def count_worlds(self, n: int) -> int:
        return (self.cap - n + 2) * math.factorial(n)


@dataclass(frozen=True)
class SumOrProduct:
    """Positive integers whose sum is `announced` or whose product is `announced`."""

    announced: int

    def generate(self, n: int) -> Iterator[World]:
        worlds = set(_compositions({self.announced}, n))
        worlds.update(_factorizations(self.announced, n))
        yield from sorted(worlds)

    def contains(self, w: World) -> bool:
        if any(v < 1 for v in w):
            return False
        return sum(w) == self.announced or math.prod(w) == self.announced

    def count_worlds(self, n: int) -> int:
        return sum(1 for _ in self.generate(n))


@dataclass(frozen=True)
class SumInSet:
    """Positive integers whose sum lies in a fixed set."""

    sums: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sums", tuple(sorted(set(self.sums))))

    def generate(self, n: int) -> Iterator[World]:
        yield from _compositions(set(self.sums), n)

    def contains(self, w: World) -> bool:
        return all(v >= 1 for v in w) and sum(w) in self.sums

    def count_worlds(self, n: int) -> int:
        return sum(math.comb(s - 1, n - 1) for s in self.sums if s >= n)


@dataclass(frozen=True)
class ZeroOne:
    """Values in {0, 1} with at least one zero."""

    def generate(self, n: int) -> Iterator[World]:
        for w in _tuples((0, 1), n):
            if 0 in w:
                yield w

    def contains(self, w: World) -> bool:
        return all(v in (0, 1) for v in w) and 0 in w

    def count_worlds(self, n: int) -> int:
        return 2**n - 1


Constraint = (
    HatsAtLeast
    | HatsExactly
    | MaxDiffExact
    | MaxDiffAtMost
    | ConsecutiveDistinct
    | SumOrProduct
    | SumInSet
    | ZeroOne
)


def _tuples(values, n: int) -> Iterator[World]:
    """All n-tuples over `values`, ascending lexicographically."""
    return itertools.product(tuple(values), repeat=n)


def _window_tuples(lo: int, d: int, n: int) -> Iterator[World]:
    """n-tuples over [lo, lo+d] containing both endpoints, in lex order."""
    hi = lo + d
    for w in itertools.product(range(lo, hi + 1), repeat=n):
        if lo in w and hi in w:
            yield w


def _compositions(sums: set[int], n: int) -> Iterator[World]:
    """Positive n-tuples with sum in `sums`, in lexicographic order."""
    if n == 1:
        for s in sorted(sums):
            if s >= 1:
                yield (s,)
        return
    top = max(sums, default=0) - (n - 1)
    for head in range(1, top + 1):
        rest = {s - head for s in sums if s - head >= n - 1}
        if rest:
            for tail in _compositions(rest, n - 1):
                yield (head,) + tail


def _factorizations(product: int, n: int) -> Iterator[World]:
    """Positive n-tuples with the given product (all orderings)."""
    if n == 1:
        if product >= 1:
            yield (product,)
        return
    for head in range(1, product + 1):
        if product % head == 0:
            for tail in _factorizations(product // head, n - 1):
                yield (head,) + tail


# ---------------------------------------------------------------------------
# sight models


@dataclass(frozen=True)
class Full:
    pass


@dataclass(frozen=True)
class Blind:
    agents: frozenset[int]


@dataclass(frozen=True)
class NearCircle:
    pass


@dataclass(frozen=True)
class FarCircle:
    pass


@dataclass(frozen=True)
class NearLine:
    pass


SightModel = Full | Blind | NearCircle | FarCircle | NearLine


def gen_visibility(model: SightModel, n: int) -> VisibilityGraph:
    """Build the visibility graph for a sight model over n seated agents."""
    if n < 2:
        raise GenerationError("need at least 2 agents")
    everyone = set(range(n))
    if isinstance(model, Full):
        sees = [everyone - {i} for i in range(n)]
    elif isinstance(model, Blind):
        bad = [a for a in model.agents if not 0 <= a < n]
        if bad:
            raise GenerationError(f"blind agent index out of range: {bad}")
        sees = [set() if i in model.agents else everyone - {i} for i in range(n)]
    elif isinstance(model, NearCircle):
        if n < 3:
            raise GenerationError("a circle needs at least 3 agents")
        sees = [{(i - 1) % n, (i + 1) % n} for i in range(n)]
    elif isinstance(model, FarCircle):
        if n < 3:
            raise GenerationError("a circle needs at least 3 agents")
        sees = [everyone - {(i - 1) % n, i, (i + 1) % n} for i in range(n)]
    elif isinstance(model, NearLine):
        sees = [{j for j in (i - 1, i + 1) if 0 <= j < n} for i in range(n)]
    else:
        raise GenerationError(f"unknown sight model {model!r}")
    return VisibilityGraph(tuple(frozenset(s) for s in sees))


# ---------------------------------------------------------------------------
# universe construction


MATERIALIZE_LIMIT = 2_000_000


def gen_universe(constraint: Constraint, n: int) -> KnowledgeState:
    """The complete, canonically ordered world set satisfying the constraint."""
    if n < 2:
        raise GenerationError("need at least 2 agents")
    count = constraint.count_worlds(n)
    if count > MATERIALIZE_LIMIT:
        raise GenerationError(
            f"universe has {count} worlds; use stream_worlds for families this large"
        )
    return KnowledgeState.from_worlds(constraint.generate(n))


def stream_worlds(
    constraint: Constraint, n: int, predicates: Iterable = ()
) -> Iterator[World]:
    """Yield the worlds of gen_universe passing every predicate, in canonical
    order, without materializing the set."""
    predicates = tuple(predicates)
    for w in constraint.generate(n):
        if all(p(w) for p in predicates):
            yield w


@dataclass(frozen=True)
class BoundConfig:
    """Value cap standing in for an unbounded domain, plus the stability increment."""

    cap: int
    growth: int = 10


def needs_cap(constraint: Constraint) -> bool:
    return isinstance(constraint, (MaxDiffExact, MaxDiffAtMost, ConsecutiveDistinct))


def default_cap(constraint, actual: World, max_rounds: int) -> int:
    """Heuristic cap for unbounded families; soundness comes from stability_check."""
    if isinstance(constraint, (MaxDiffExact, MaxDiffAtMost)):
        return max(actual) + (max_rounds + 2) * max(constraint.diff, 1)
    if isinstance(constraint, ConsecutiveDistinct):
        return max(actual) + len(actual)
    raise GenerationError("constraint does not take a cap")


def with_cap(constraint: Constraint, cap: int) -> Constraint:
    if isinstance(constraint, MaxDiffExact):
        return MaxDiffExact(constraint.diff, cap)
    if isinstance(constraint, MaxDiffAtMost):
        return MaxDiffAtMost(constraint.diff, cap)
    if isinstance(constraint, ConsecutiveDistinct):
        return ConsecutiveDistinct(cap)
    raise GenerationError("constraint does not take a cap")


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Scenario:
    """One complete puzzle setup: universe, sight, protocol, and the actual world."""

    name: str
    agents: tuple[str, ...]
    constraint: Constraint
    sight: SightModel
    protocol: "ProtocolSpec"
    actual: Optional[World]
    alphabet: Optional[tuple[str, ...]] = None
    bound: Optional[BoundConfig] = None

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def visibility(self) -> VisibilityGraph:
        return gen_visibility(self.sight, self.n_agents)

    def universe(self) -> KnowledgeState:
        return gen_universe(self.constraint, self.n_agents)

    def validate(self) -> None:
        if self.actual is not None:
            if len(self.actual) != self.n_agents:
                raise GenerationError("actual world length does not match agent count")
            if not self.constraint.contains(self.actual):
                raise GenerationError("actual world violates the announced constraint")
        if needs_cap(self.constraint) and self.bound is None:
            raise GenerationError("this scenario family requires an explicit bound")

    def value_label(self, v: int) -> str:
        if self.alphabet is not None and 0 <= v < len(self.alphabet):
            return self.alphabet[v]
        return str(v)


@dataclass(frozen=True)
class Simultaneous:
    max_rounds: int

    def __post_init__(self):
        if self.max_rounds < 1:
            raise GenerationError("max_rounds must be positive")


@dataclass(frozen=True)
class Circular:
    order: tuple[int, ...]
    max_rounds: int

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise GenerationError("circular order must be a permutation of the agents")
        if self.max_rounds < 1:
            raise GenerationError("max_rounds must be positive")


ProtocolSpec = Simultaneous | Circular

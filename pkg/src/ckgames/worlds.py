"""Core semantic model: worlds, observations, knowledge, and announcement filtering.

A world is a tuple of small non-negative integers, one value per agent
(position i is agent i's own value).  A knowledge state is the set of worlds
still consistent with everything publicly announced so far.  Filtering a
state on an announcement keeps exactly the worlds in which that announcement
would have been made.
"""

from __future__ import annotations

from dataclasses import dataclass, field

World = tuple[int, ...]

YES = True
NO = False


def answer_str(answer: bool) -> str:
    return "YES" if answer else "NO"


class ContractViolation(Exception):
    """An engine precondition was broken (bad index, world outside state, ...)."""


class EmptyStateError(ContractViolation):
    """A filter produced an empty state.

    This can only happen when an announcement is inconsistent with the state,
    which indicates a generator bug or a bounding artifact, never a valid game.
    """


@dataclass(frozen=True)
class VisibilityGraph:
    """Per-agent sets of observed agents.  No agent sees itself."""

    sees: tuple[frozenset[int], ...]

    def __post_init__(self):
        for i, seen in enumerate(self.sees):
            if i in seen:
                raise ContractViolation(f"agent {i} cannot see itself")
            for j in seen:
                if not 0 <= j < len(self.sees):
                    raise ContractViolation(f"agent {i} sees out-of-range agent {j}")

    @property
    def n_agents(self) -> int:
        return len(self.sees)

    def observed(self, agent: int) -> tuple[int, ...]:
        """Sorted tuple of agents observed by `agent` (stable observation key order)."""
        if not 0 <= agent < len(self.sees):
            raise ContractViolation(f"agent index {agent} out of range")
        return tuple(sorted(self.sees[agent]))


def observe(agent: int, world: World, vis: VisibilityGraph) -> dict[int, int]:
    """Restrict `world` to what `agent` sees: a mapping observed-agent -> value.

    Observations are identity keyed: agents know who sits where, so seeing the
    same multiset of values on different neighbours is not the same observation.
    """
    return {j: world[j] for j in vis.observed(agent)}


def _obs_key(agent: int, world: World, vis: VisibilityGraph) -> tuple[int, ...]:
    # Tuple in sorted-agent order; equivalent to the observe() mapping but hashable
    # and cheap, used as a grouping key everywhere.
    return tuple(world[j] for j in vis.observed(agent))


@dataclass(frozen=True)
class KnowledgeState:
    """A finite set of worlds plus a record of the announcements applied so far.

    Worlds are kept canonically ordered (lexicographically) so dumps and
    transcripts are reproducible.  The actual world must remain a member after
    every filter; an empty filter result raises EmptyStateError.
    """

    worlds: tuple[World, ...]
    history: tuple[str, ...] = ()
    _members: frozenset[World] = field(default=None, repr=False, compare=False)

    @staticmethod
    def from_worlds(worlds, history: tuple[str, ...] = ()) -> "KnowledgeState":
        ordered = tuple(sorted(set(worlds)))
        state = KnowledgeState(ordered, history)
        object.__setattr__(state, "_members", frozenset(ordered))
        return state

    def __post_init__(self):
        if self._members is None:
            object.__setattr__(self, "_members", frozenset(self.worlds))

    def __len__(self) -> int:
        return len(self.worlds)

    def __contains__(self, world: World) -> bool:
        return world in self._members

    def __iter__(self):
        return iter(self.worlds)


def knows_own(agent: int, world: World, state: KnowledgeState, vis: VisibilityGraph) -> bool:
    """YES iff `agent`'s own value is the same in every state world matching its observation."""
    if world not in state:
        raise ContractViolation("world is not a member of the state")
    key = _obs_key(agent, world, vis)
    own = world[agent]
    for w in state:
        if w[agent] != own and _obs_key(agent, w, vis) == key:
            return NO
    return YES


def _candidate_counts(state: KnowledgeState, agent: int, vis: VisibilityGraph) -> dict:
    """Map observation key -> set of own values seen under it (capped at 2 members)."""
    observed = vis.observed(agent)
    values: dict[tuple[int, ...], set[int]] = {}
    for w in state:
        key = tuple(w[j] for j in observed)
        vals = values.setdefault(key, set())
        if len(vals) < 2:
            vals.add(w[agent])
    return values


def answers_for_all(state: KnowledgeState, vis: VisibilityGraph) -> dict[World, tuple[bool, ...]]:
    """Hypothetical answer vector of every world in the state, in one grouping pass.

    Equivalent to calling knows_own per agent per world but O(|state| * N).
    """
    n = vis.n_agents
    columns = []
    for agent in range(n):
        values = _candidate_counts(state, agent, vis)
        observed = vis.observed(agent)
        columns.append((observed, values))
    out: dict[World, tuple[bool, ...]] = {}
    for w in state:
        out[w] = tuple(
            len(values[tuple(w[j] for j in observed)]) == 1 for observed, values in columns
        )
    return out


def answer_vector(state: KnowledgeState, world: World, vis: VisibilityGraph) -> tuple[bool, ...]:
    """Per-agent knows_own for `world` against `state`."""
    return tuple(knows_own(i, world, state, vis) for i in range(vis.n_agents))


def filter_simultaneous(
    state: KnowledgeState, announced: tuple[bool, ...], vis: VisibilityGraph
) -> KnowledgeState:
    """Keep the worlds whose hypothetical answer vector equals the announced one.

    All hypothetical answers are computed against the state as it stood when the
    round was announced (synchronous semantics within a round).
    """
    answers = answers_for_all(state, vis)
    kept = tuple(w for w in state if answers[w] == announced)
    if not kept:
        raise EmptyStateError("announcement inconsistent with state")
    label = "sim:" + "".join("Y" if a else "N" for a in announced)
    return KnowledgeState(kept, state.history + (label,))


def filter_turn(
    state: KnowledgeState, agent: int, answer: bool, vis: VisibilityGraph
) -> KnowledgeState:
    """Keep the worlds in which `agent` would have announced `answer`."""
    values = _candidate_counts(state, agent, vis)
    observed = vis.observed(agent)
    kept = tuple(
        w for w in state if (len(values[tuple(w[j] for j in observed)]) == 1) == answer
    )
    if not kept:
        raise EmptyStateError("announcement inconsistent with state")
    label = f"turn:{agent}:{'Y' if answer else 'N'}"
    return KnowledgeState(kept, state.history + (label,))

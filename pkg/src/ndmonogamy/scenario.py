"""Measurement scenario: a 5-cycle of Alice settings plus two Bob settings.

Alice holds five dichotomic measurements A1..A5, cyclically compatible
(A_i with A_{i+1}, indices mod 5).  Bob holds two mutually incompatible
dichotomic measurements B1, B2, each compatible with every A_i.  The
maximal measurement contexts are the ten triples {A_i, A_{i+1}, B_j}.

A ``Behavior`` assigns a probability distribution over the eight outcome
triples of every context.  Pair and singleton marginals are always derived
from the context tables, never stored, so a behavior cannot contradict
itself about its own marginals; whether marginals agree *across* contexts
is exactly the no-disturbance question answered by
:func:`check_no_disturbance`.

Outcome indexing convention: outcomes are -1/+1, tables are indexed
lexicographically with -1 before +1 and the leftmost measurement of the
context most significant, e.g. index 0 is (-1,-1,-1) and index 7 is
(+1,+1,+1).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import SubsetNotMeasurable

N_CYCLE = 5
OUTCOMES = (-1, +1)
#: the eight outcome triples of a context, lexicographic, -1 first
OUTCOME_TRIPLES: tuple[tuple[int, int, int], ...] = tuple(
    itertools.product(OUTCOMES, repeat=3)
)

DEFAULT_TOL = 1e-12


def alice(i: int) -> str:
    """Label of Alice's i-th measurement, index taken mod 5 into 1..5."""
    return f"A{(i - 1) % N_CYCLE + 1}"


def bob(j: int) -> str:
    """Label of Bob's j-th measurement, j in {1, 2}."""
    if j not in (1, 2):
        raise ValueError(f"Bob has measurements 1 and 2, got {j}")
    return f"B{j}"


@dataclass(frozen=True)
class Measurement:
    """A dichotomic measurement with outcomes -1 and +1."""

    id: str
    outcomes: tuple[int, int] = OUTCOMES


@dataclass(frozen=True)
class Context:
    """An ordered triple of jointly measurable measurements."""

    members: tuple[str, str, str]

    @property
    def label(self) -> str:
        return ",".join(self.members)

    def position(self, measurement_id: str) -> int:
        return self.members.index(measurement_id)

    def contains(self, subset: Iterable[str]) -> bool:
        return set(subset) <= set(self.members)


class MarginalRequirement(NamedTuple):
    """A subset of measurements whose marginal several contexts must share."""

    subset: tuple[str, ...]
    contexts: tuple[Context, ...]


@dataclass(frozen=True)
class Scenario:
    """The compatibility structure: measurements plus maximal contexts."""

    measurements: tuple[Measurement, ...]
    contexts: tuple[Context, ...]

    @property
    def measurement_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.measurements)

    def context_index(self, context: Context) -> int:
        return self.contexts.index(context)

    def contexts_containing(self, subset: Iterable[str]) -> tuple[Context, ...]:
        subset = tuple(subset)
        return tuple(c for c in self.contexts if c.contains(subset))

    def canonical_context(self, subset: Iterable[str]) -> Context:
        """First context (in scenario order) containing ``subset``."""
        containing = self.contexts_containing(subset)
        if not containing:
            raise SubsetNotMeasurable(
                f"measurements {tuple(subset)} share no context"
            )
        return containing[0]

    def marginal_requirements(self) -> tuple[MarginalRequirement, ...]:
        """All proper subsets of contexts that appear in several contexts.

        These are exactly the marginals the no-disturbance principle ties
        together: every shared pair and every singleton.
        """
        seen: dict[tuple[str, ...], tuple[Context, ...]] = {}
        for context in self.contexts:
            for size in (1, 2):
                for sub in itertools.combinations(context.members, size):
                    key = tuple(sorted(sub))
                    if key in seen:
                        continue
                    containing = self.contexts_containing(key)
                    if len(containing) > 1:
                        seen[key] = containing
        return tuple(MarginalRequirement(s, cs) for s, cs in seen.items())


def build_canonical_scenario() -> Scenario:
    """The 7-measurement, 10-context scenario.

    A_i is compatible with A_{i+1} (cyclically); B1 and B2 are each
    compatible with every A_i but not with each other, so the maximal
    contexts are {A_i, A_{i+1}, B_j} for i in 1..5 and j in 1..2.
    """
    measurements = tuple(
        Measurement(name)
        for name in [alice(i) for i in range(1, 6)] + [bob(1), bob(2)]
    )
    contexts = tuple(
        Context((alice(i), alice(i + 1), bob(j)))
        for i in range(1, 6)
        for j in (1, 2)
    )
    return Scenario(measurements, contexts)


#: module-level canonical scenario; immutable, safe to share
CANONICAL = build_canonical_scenario()


def _validate_table(table: np.ndarray, label: str, tol: float) -> np.ndarray:
    table = np.asarray(table, dtype=float)
    if table.shape != (8,):
        raise ValueError(f"context {label}: expected 8 probabilities, got {table.shape}")
    if table.min() < -tol:
        raise ValueError(f"context {label}: negative probability {table.min()}")
    total = float(table.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"context {label}: probabilities sum to {total}, not 1")
    return np.clip(table, 0.0, None)


@dataclass(frozen=True, eq=False)
class Behavior:
    """Probability tables over every context of a scenario.

    ``probs`` has shape (n_contexts, 8), rows in scenario context order,
    columns in the lexicographic outcome order of ``OUTCOME_TRIPLES``.
    The array is read-only after construction; negative entries within
    the validation tolerance are clipped to exactly zero.
    """

    scenario: Scenario
    probs: np.ndarray
    validation_tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        expected = (len(self.scenario.contexts), 8)
        if probs.shape != expected:
            raise ValueError(f"behavior table must have shape {expected}, got {probs.shape}")
        probs = np.array(
            [
                _validate_table(row, ctx.label, self.validation_tol)
                for ctx, row in zip(self.scenario.contexts, probs)
            ]
        )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_tables(
        cls,
        tables: Mapping[str, Sequence[float]],
        scenario: Scenario = CANONICAL,
        tol: float = DEFAULT_TOL,
    ) -> "Behavior":
        """Build from a mapping of context label to 8-entry table."""
        missing = [c.label for c in scenario.contexts if c.label not in tables]
        if missing:
            raise ValueError(f"missing context tables: {missing}")
        probs = np.array([tables[c.label] for c in scenario.contexts], dtype=float)
        return cls(scenario, probs, validation_tol=tol)

    @classmethod
    def uniform(cls, scenario: Scenario = CANONICAL) -> "Behavior":
        return cls(scenario, np.full((len(scenario.contexts), 8), 1 / 8))

    # -- access ------------------------------------------------------------

    def table(self, context: Context) -> np.ndarray:
        return self.probs[self.scenario.context_index(context)]

    def marginal(self, context: Context, assignment: Mapping[str, int]) -> float:
        """Probability of ``assignment`` (id -> outcome) within one context."""
        positions = [(context.position(m), v) for m, v in assignment.items()]
        total = 0.0
        table = self.table(context)
        for k, triple in enumerate(OUTCOME_TRIPLES):
            if all(triple[pos] == v for pos, v in positions):
                total += table[k]
        return total

    # -- algebra -----------------------------------------------------------

    def mix(self, other: "Behavior", weight: float) -> "Behavior":
        """Convex mixture ``weight*self + (1-weight)*other``."""
        if not 0.0 <= weight <= 1.0:
            raise ValueError(f"mixture weight must lie in [0,1], got {weight}")
        return Behavior(
            self.scenario, weight * self.probs + (1.0 - weight) * other.probs
        )

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        """JSON object keyed by context label, bit-exact round trip."""
        payload = {
            ctx.label: list(row)
            for ctx, row in zip(self.scenario.contexts, self.probs)
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str, scenario: Scenario = CANONICAL) -> "Behavior":
        return cls.from_tables(json.loads(text), scenario)


def sign_vector(context: Context, subset: Sequence[str]) -> np.ndarray:
    """Products of ``subset`` outcomes for the 8 outcome triples of a context."""
    positions = [context.position(m) for m in subset]
    return np.array(
        [float(np.prod([t[p] for p in positions])) for t in OUTCOME_TRIPLES]
    )


def indicator_vector(context: Context, assignment: Mapping[str, int]) -> np.ndarray:
    """1 where an outcome triple matches ``assignment``, else 0, per column."""
    positions = [(context.position(m), v) for m, v in assignment.items()]
    return np.array(
        [
            1.0 if all(t[p] == v for p, v in positions) else 0.0
            for t in OUTCOME_TRIPLES
        ]
    )


class MarginalRowInfo(NamedTuple):
    """Provenance of one marginal-agreement constraint row."""

    subset: tuple[str, ...]
    outcomes: tuple[int, ...]
    context_a: Context
    context_b: Context


@lru_cache(maxsize=None)
def marginal_constraint_rows(
    scenario: Scenario,
) -> tuple[np.ndarray, tuple[MarginalRowInfo, ...]]:
    """Matrix R with R @ behavior.probs.ravel() = marginal disagreements.

    One row per shared subset, outcome assignment and consecutive pair of
    containing contexts; all rows vanish exactly on no-disturbance
    behaviors.
    """
    n = len(scenario.contexts) * 8
    rows: list[np.ndarray] = []
    infos: list[MarginalRowInfo] = []
    for subset, contexts in scenario.marginal_requirements():
        for values in itertools.product(OUTCOMES, repeat=len(subset)):
            assignment = dict(zip(subset, values))
            for ctx_a, ctx_b in zip(contexts, contexts[1:]):
                row = np.zeros(n)
                ia = 8 * scenario.context_index(ctx_a)
                ib = 8 * scenario.context_index(ctx_b)
                row[ia : ia + 8] = indicator_vector(ctx_a, assignment)
                row[ib : ib + 8] -= indicator_vector(ctx_b, assignment)
                rows.append(row)
                infos.append(MarginalRowInfo(subset, values, ctx_a, ctx_b))
    matrix = np.array(rows)
    matrix.setflags(write=False)
    return matrix, tuple(infos)


def correlator(
    behavior: Behavior,
    subset: Sequence[str],
    context: Context | None = None,
) -> float:
    """Mean value of the product of outcomes of ``subset``.

    The subset must be jointly measurable (contained in some context).
    By default the first containing context is used; any other containing
    context may be requested explicitly, which matters only for behaviors
    violating no-disturbance.
    """
    subset = tuple(subset)
    if context is None:
        context = behavior.scenario.canonical_context(subset)
    elif not context.contains(subset):
        raise SubsetNotMeasurable(
            f"{subset} not contained in context {context.label}"
        )
    return float(sign_vector(context, subset) @ behavior.table(context))


class NdViolation(NamedTuple):
    """One marginal that disagrees between two contexts sharing it."""

    subset: tuple[str, ...]
    context_a: str
    context_b: str
    outcomes: tuple[int, ...]
    value_a: float
    value_b: float

    @property
    def magnitude(self) -> float:
        return abs(self.value_a - self.value_b)


def check_no_disturbance(behavior: Behavior, tol: float = 1e-10) -> list[NdViolation]:
    """All marginal disagreements of ``behavior`` beyond ``tol``.

    Covers every shared pair marginal, p(a_i, a_{i+1}) across j in {1,2}
    and p(a_i, b_j) across the two contexts containing {A_i, B_j}, and
    every singleton marginal across all containing contexts.  An empty
    list means the behavior satisfies no-disturbance at this tolerance;
    violations are returned as data, never raised.
    """
    matrix, infos = marginal_constraint_rows(behavior.scenario)
    residuals = matrix @ behavior.probs.ravel()
    violations: list[NdViolation] = []
    for k in np.flatnonzero(np.abs(residuals) > tol):
        info = infos[k]
        assignment = dict(zip(info.subset, info.outcomes))
        violations.append(
            NdViolation(
                info.subset,
                info.context_a.label,
                info.context_b.label,
                info.outcomes,
                behavior.marginal(info.context_a, assignment),
                behavior.marginal(info.context_b, assignment),
            )
        )
    return violations


def kcbs_value(behavior: Behavior) -> float:
    """The pentagon witness: sum of the five cyclic pair correlators.

    Noncontextual hidden-variable models obey ``kcbs_value >= -3``.
    """
    return sum(
        correlator(behavior, (alice(i), alice(i + 1))) for i in range(1, 6)
    )


def chsh_value(behavior: Behavior, pivot: int = 5) -> float:
    """The Bell witness built on Alice's settings around ``pivot``.

    Uses A_{pivot+1} and A_{pivot-1} (an incompatible pair) against B1, B2:
    ``<A+ B1> + <A+ B2> + <A- B1> - <A- B2>``.  Local hidden-variable
    models obey ``chsh_value >= -2``.  The default pivot 5 selects the
    A1/A4 form.
    """
    a_plus, a_minus = alice(pivot + 1), alice(pivot - 1)
    return (
        correlator(behavior, (a_plus, bob(1)))
        + correlator(behavior, (a_plus, bob(2)))
        + correlator(behavior, (a_minus, bob(1)))
        - correlator(behavior, (a_minus, bob(2)))
    )

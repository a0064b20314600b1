"""Deterministic hidden-variable models and exhaustive classical bounds.

A noncontextual (or local) hidden-variable model is a probability mixture
of deterministic assignments, one fixed outcome per measurement, so the
classical bound of any linear correlator expression is its extremum over
all 2^n assignments.  At n = 7 this is 128 cases; enumeration is exact
and instant, so no symmetry reduction is attempted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import TooLarge
from .scenario import (
    CANONICAL,
    OUTCOME_TRIPLES,
    Behavior,
    Scenario,
    alice,
    bob,
)

MAX_ENUMERATION_BITS = 24
MAX_CYCLE = 20


@dataclass(frozen=True)
class DeterministicAssignment:
    """One outcome (-1 or +1) for every measurement of a scenario."""

    ids: tuple[str, ...]
    outcomes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.outcomes):
            raise ValueError("ids and outcomes must have equal length")
        if any(v not in (-1, 1) for v in self.outcomes):
            raise ValueError("outcomes must be -1 or +1")

    def value(self, measurement_id: str) -> int:
        return self.outcomes[self.ids.index(measurement_id)]

    def product(self, subset: Sequence[str]) -> int:
        p = 1
        for m in subset:
            p *= self.value(m)
        return p

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.ids, self.outcomes))


@dataclass(frozen=True)
class LinearExpression:
    """A linear combination of outcome-product correlators.

    ``terms`` is a sequence of (coefficient, measurement-id subset).
    """

    terms: tuple[tuple[float, tuple[str, ...]], ...]
    name: str = ""

    def __post_init__(self) -> None:
        for coeff, subset in self.terms:
            if not subset:
                raise ValueError("each term needs a nonempty subset")
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff}")

    def __add__(self, other: "LinearExpression") -> "LinearExpression":
        name = f"{self.name}+{other.name}" if self.name and other.name else ""
        return LinearExpression(self.terms + other.terms, name)

    def evaluate_assignment(self, assignment: DeterministicAssignment) -> float:
        return sum(c * assignment.product(sub) for c, sub in self.terms)

    def evaluate_behavior(self, behavior: Behavior) -> float:
        from .scenario import correlator

        return sum(c * correlator(behavior, sub) for c, sub in self.terms)

    def relabeled(self, shift: int) -> "LinearExpression":
        """Cyclic relabeling A_i -> A_{i+shift}; Bob's settings unchanged."""

        def move(m: str) -> str:
            return alice(int(m[1]) + shift) if m.startswith("A") else m

        return LinearExpression(
            tuple((c, tuple(move(m) for m in sub)) for c, sub in self.terms),
            self.name,
        )


def kcbs_expression() -> LinearExpression:
    """Pentagon expression: sum of the 5 cyclic pair correlators (bound -3)."""
    return LinearExpression(
        tuple((1.0, (alice(i), alice(i + 1))) for i in range(1, 6)), "kcbs"
    )


def chsh_expression(pivot: int = 5) -> LinearExpression:
    """Bell expression on A_{pivot+1}, A_{pivot-1} vs B1, B2 (bound -2)."""
    a_plus, a_minus = alice(pivot + 1), alice(pivot - 1)
    return LinearExpression(
        (
            (1.0, (a_plus, bob(1))),
            (1.0, (a_plus, bob(2))),
            (1.0, (a_minus, bob(1))),
            (-1.0, (a_minus, bob(2))),
        ),
        f"chsh[{pivot}]",
    )


def c1_expression(pivot: int) -> LinearExpression:
    """Pentagon-shaped part of the split of kcbs+chsh around ``pivot``.

    Runs around the 5-cycle (B1, A_{pivot+1}, A_{pivot+2}, A_{pivot-2},
    A_{pivot-1}); classical and no-disturbance bound -3.
    """
    i = pivot
    return LinearExpression(
        (
            (1.0, (alice(i + 1), bob(1))),
            (1.0, (alice(i + 1), alice(i + 2))),
            (1.0, (alice(i + 2), alice(i - 2))),
            (1.0, (alice(i - 2), alice(i - 1))),
            (1.0, (alice(i - 1), bob(1))),
        ),
        f"c1[{pivot}]",
    )


def c2_expression(pivot: int) -> LinearExpression:
    """Bell-shaped part of the split: A_{pivot+-1} against A_pivot and B2.

    Classical and no-disturbance bound -2.  Together with
    :func:`c1_expression` it sums to kcbs + chsh for the same pivot.
    """
    i = pivot
    return LinearExpression(
        (
            (1.0, (alice(i + 1), alice(i))),
            (1.0, (alice(i - 1), alice(i))),
            (1.0, (alice(i + 1), bob(2))),
            (-1.0, (alice(i - 1), bob(2))),
        ),
        f"c2[{pivot}]",
    )


def enumerate_assignments(
    scenario: Scenario = CANONICAL,
) -> Iterator[DeterministicAssignment]:
    """All 2^n deterministic assignments, lexicographic, -1 before +1.

    The first measurement in scenario order is most significant.
    """
    ids = scenario.measurement_ids
    if len(ids) > MAX_ENUMERATION_BITS:
        raise TooLarge(
            f"{len(ids)} measurements exceed the {MAX_ENUMERATION_BITS}-bit "
            "enumeration limit"
        )
    for outcomes in itertools.product((-1, +1), repeat=len(ids)):
        yield DeterministicAssignment(ids, outcomes)


class ClassicalBound(NamedTuple):
    minimum: float
    maximum: float
    argmin: DeterministicAssignment


def classical_bound(
    expr: LinearExpression, scenario: Scenario = CANONICAL
) -> ClassicalBound:
    """Exact hidden-variable extrema of ``expr`` by full enumeration.

    Ties in the argmin are broken by the first assignment found in
    lexicographic order, so results are reproducible.
    """
    known = set(scenario.measurement_ids)
    for _, subset in expr.terms:
        unknown = set(subset) - known
        if unknown:
            raise ValueError(f"expression references unknown measurements {unknown}")
    best_min = np.inf
    best_max = -np.inf
    argmin: DeterministicAssignment | None = None
    for assignment in enumerate_assignments(scenario):
        v = expr.evaluate_assignment(assignment)
        if v < best_min:
            best_min, argmin = v, assignment
        if v > best_max:
            best_max = v
    assert argmin is not None
    return ClassicalBound(float(best_min), float(best_max), argmin)


def cycle_bound(n: int) -> float:
    """Hidden-variable minimum of the n-cycle expression sum <X_i X_{i+1}>.

    Computed by enumerating all 2^n sign assignments (bit tricks keep
    n = 20 fast).  Equals -(n-2) for odd n and -n for even n.
    """
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
    if n > MAX_CYCLE:
        raise TooLarge(f"cycle length {n} exceeds the enumeration limit {MAX_CYCLE}")
    states = np.arange(1 << n, dtype=np.uint32)
    rotated = ((states >> 1) | (states << (n - 1))) & np.uint32((1 << n) - 1)
    # x_i * x_{i+1} = 1 - 2*(bit_i XOR bit_{i+1}); sum over the cycle
    disagreements = np.bitwise_count(states ^ rotated).astype(np.int64)
    return float((n - 2 * disagreements).min())


def behavior_from_assignment(
    assignment: DeterministicAssignment, scenario: Scenario = CANONICAL
) -> Behavior:
    """The deterministic behavior: each context table is a point mass."""
    probs = np.zeros((len(scenario.contexts), 8))
    for c_idx, context in enumerate(scenario.contexts):
        triple = tuple(assignment.value(m) for m in context.members)
        probs[c_idx, OUTCOME_TRIPLES.index(triple)] = 1.0
    return Behavior(scenario, probs)

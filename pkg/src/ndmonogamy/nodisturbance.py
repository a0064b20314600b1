"""The no-disturbance polytope: joint constructions, LP bounds, monogamy.

Under no-disturbance, the context tables of a behavior can be stitched
into explicit joint distributions over larger measurement sets by
conditional product formulas.  The existence of those joints forces the
pentagon-shaped and Bell-shaped parts of any kcbs+chsh split back to
their classical bounds (-3 and -2), which is the monogamy relation
``kcbs + chsh >= -5``.  This module builds the joints, verifies them,
and independently computes all bounds as linear programs over the
80-dimensional behavior polytope.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .classical import LinearExpression, chsh_expression, kcbs_expression
from .errors import Infeasible, NotNoDisturbance
from .scenario import (
    CANONICAL,
    OUTCOMES,
    Behavior,
    Scenario,
    alice,
    bob,
    check_no_disturbance,
    chsh_value,
    kcbs_value,
    marginal_constraint_rows,
    sign_vector,
)

ND_TOL = 1e-10

PIVOTS = (1, 2, 3, 4, 5)
KCBS_CLASSICAL_BOUND = -3.0
CHSH_CLASSICAL_BOUND = -2.0
MONOGAMY_BOUND = -5.0


# ---------------------------------------------------------------------------
# joint distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """A distribution over +-1 outcome tuples of several measurements.

    Indexing is lexicographic with -1 before +1 and the first variable
    most significant, matching the context-table convention.
    """

    variables: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (2 ** len(self.variables),):
            raise ValueError(
                f"need {2 ** len(self.variables)} probabilities for "
                f"{len(self.variables)} variables, got {probs.shape}"
            )
        if probs.min() < -1e-12:
            raise ValueError(f"negative joint probability {probs.min()}")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"joint probabilities sum to {probs.sum()}, not 1")
        probs = np.clip(probs, 0.0, None)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def outcome_tuples(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(OUTCOMES, repeat=len(self.variables))

    def as_array(self) -> np.ndarray:
        """The table as a (2, ..., 2) array, axis k = variable k, -1 first."""
        return self.probs.reshape((2,) * len(self.variables))

    def marginal(self, subset: Sequence[str]) -> "JointDistribution":
        """Marginal distribution over ``subset`` (in ``subset`` order)."""
        positions = [self.variables.index(m) for m in subset]
        drop = tuple(
            k for k in range(len(self.variables)) if k not in positions
        )
        summed = self.as_array().sum(axis=drop)
        reordered = np.transpose(summed, np.argsort(np.argsort(positions)))
        return JointDistribution(tuple(subset), reordered.ravel())

    def correlator(self, subset: Sequence[str]) -> float:
        """Mean product of the outcomes of ``subset`` under this joint."""
        marg = self.marginal(subset)
        signs = np.array(
            [float(np.prod(t)) for t in marg.outcome_tuples()]
        )
        return float(signs @ marg.probs)


def _require_nd(behavior: Behavior, tol: float) -> None:
    matrix, _ = marginal_constraint_rows(behavior.scenario)
    worst = float(np.max(np.abs(matrix @ behavior.probs.ravel())))
    if worst > tol:
        raise NotNoDisturbance(
            f"behavior violates no-disturbance (worst marginal gap {worst:.3e} "
            f"at tolerance {tol:.1e})",
            check_no_disturbance(behavior, tol),
        )


def _context_array(behavior: Behavior, members: tuple[str, str, str]) -> np.ndarray:
    """Table of the context containing ``members``, axes in ``members`` order."""
    context = behavior.scenario.canonical_context(members)
    table = behavior.table(context).reshape(2, 2, 2)
    return np.transpose(table, [context.position(m) for m in members])


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num/den with 0/0 = 0; the joint formulas guarantee num=0 where den=0."""
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0.0)
    return out


def fine_join_c1(behavior: Behavior, pivot: int, tol: float = ND_TOL) -> JointDistribution:
    """Joint over (A_{i+1}, A_{i+2}, A_{i-1}, A_{i-2}, B1) for i = pivot.

    Conditional product of the three measured B1-context tables around
    the pentagon, divided by the two linking pair marginals.  Requires
    no-disturbance; recovers every pair marginal of the pentagon-shaped
    split expression exactly.  Entries whose denominator marginal
    vanishes are zero (their numerators vanish too) and the remaining
    entries still sum to one, so no renormalization is applied.
    """
    _require_nd(behavior, tol)
    i = pivot
    t_a = _context_array(behavior, (alice(i + 1), alice(i + 2), bob(1)))
    t_b = _context_array(behavior, (alice(i + 2), alice(i - 2), bob(1)))
    t_c = _context_array(behavior, (alice(i - 2), alice(i - 1), bob(1)))
    den_a = t_b.sum(axis=1)  # p(a_{i+2}, b1)
    den_b = t_c.sum(axis=1)  # p(a_{i-2}, b1)
    # joint[a+1, a+2, a-1, a-2, b1]
    num = np.einsum("pqb,qsb,srb->pqrsb", t_a, t_b, t_c)
    den = np.einsum("qb,sb->qsb", den_a, den_b)
    joint = _safe_divide(num, den[None, :, None, :, :])
    variables = (alice(i + 1), alice(i + 2), alice(i - 1), alice(i - 2), bob(1))
    return JointDistribution(variables, joint.ravel())


def fine_join_c2(behavior: Behavior, pivot: int, tol: float = ND_TOL) -> JointDistribution:
    """Joint over (A_{i-1}, A_i, A_{i+1}, B2) for i = pivot.

    Conditional product of the two measured B2-context tables that share
    A_i, divided by the pair marginal p(a_i, b2).  Marginalizing over
    (A_{i+1}, B2) recovers p(a_{i-1}, a_i); over (A_{i-1}, B2) recovers
    p(a_i, a_{i+1}).  Same zero-denominator rule as the pentagon joint.
    """
    _require_nd(behavior, tol)
    i = pivot
    t_prev = _context_array(behavior, (alice(i - 1), alice(i), bob(2)))
    t_next = _context_array(behavior, (alice(i), alice(i + 1), bob(2)))
    den = t_next.sum(axis=1)  # p(a_i, b2)
    # joint[a-1, a_i, a+1, b2]
    num = np.einsum("mib,ipb->mipb", t_prev, t_next)
    joint = _safe_divide(num, den[None, :, None, :])
    variables = (alice(i - 1), alice(i), alice(i + 1), bob(2))
    return JointDistribution(variables, joint.ravel())


# ---------------------------------------------------------------------------
# linear program over the behavior polytope
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def nd_equality_system(scenario: Scenario = CANONICAL) -> tuple[np.ndarray, np.ndarray]:
    """Equality constraints A x = b of the no-disturbance polytope.

    Variables are the stacked context tables (n_contexts * 8).  Rows:
    one normalization per context, then agreement of every shared
    marginal between consecutive containing contexts.  Some rows are
    redundant (singleton ties follow from pair ties); the LP solver's
    presolve handles that, and the explicit form mirrors the definition.
    """
    n = len(scenario.contexts) * 8
    normalization = np.zeros((len(scenario.contexts), n))
    for c_idx in range(len(scenario.contexts)):
        normalization[c_idx, 8 * c_idx : 8 * c_idx + 8] = 1.0
    marginal_rows, _ = marginal_constraint_rows(scenario)
    matrix = np.vstack([normalization, marginal_rows])
    rhs = np.concatenate([np.ones(len(scenario.contexts)), np.zeros(len(marginal_rows))])
    matrix.setflags(write=False)
    rhs.setflags(write=False)
    return matrix, rhs


def expression_vector(expr: LinearExpression, scenario: Scenario = CANONICAL) -> np.ndarray:
    """Vector c with c @ x = expression value on the stacked tables x.

    Each term is evaluated in its first containing context; on the
    no-disturbance polytope the choice does not matter.
    """
    c = np.zeros(len(scenario.contexts) * 8)
    for coeff, subset in expr.terms:
        context = scenario.canonical_context(subset)
        c_idx = scenario.context_index(context)
        c[8 * c_idx : 8 * c_idx + 8] += coeff * sign_vector(context, subset)
    return c


class NdOptimum(NamedTuple):
    value: float
    witness: Behavior


def nd_optimum(
    expr: LinearExpression,
    sense: str = "min",
    scenario: Scenario = CANONICAL,
) -> NdOptimum:
    """Exact LP optimum of ``expr`` over the no-disturbance polytope."""
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    A_eq, b_eq = nd_equality_system(scenario)
    c = expression_vector(expr, scenario)
    sign = 1.0 if sense == "min" else -1.0
    result = linprog(sign * c, A_eq=A_eq, b_eq=b_eq, bounds=(0, 1), method="highs")
    if not result.success:
        raise Infeasible(f"LP failed unexpectedly: {result.message}")
    witness = Behavior(scenario, result.x.reshape(-1, 8), validation_tol=1e-7)
    return NdOptimum(float(sign * result.fun), witness)


# ---------------------------------------------------------------------------
# random no-disturbance behaviors
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _projector(scenario: Scenario = CANONICAL) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis Q of the constraint row space and a feasible point."""
    A_eq, _ = nd_equality_system(scenario)
    _, singulars, vt = np.linalg.svd(A_eq, full_matrices=False)
    rank = int((singulars > singulars[0] * 1e-12).sum())
    q = np.ascontiguousarray(vt[:rank].T)
    q.setflags(write=False)
    uniform = np.full(len(scenario.contexts) * 8, 1 / 8)
    uniform.setflags(write=False)
    return q, uniform


def sample_behavior_matrix(
    count: int,
    seed: int | np.random.Generator = 0,
    scenario: Scenario = CANONICAL,
    batch: int = 200_000,
    method: str = "reject",
) -> np.ndarray:
    """``count`` random no-disturbance behaviors, stacked as rows.

    Raw context tables are drawn uniformly from the simplex and
    orthogonally projected onto the no-disturbance equality subspace.
    ``method='reject'`` discards projections with genuinely negative
    entries; ``method='shrink'`` instead pulls them toward the uniform
    behavior just enough to reach the polytope (its outputs often sit on
    polytope faces, and nothing is discarded, which makes it the cheap
    choice for very large feasibility sweeps).  Either way the returned
    rows are exact members of the polytope: entries in [-1e-12, 0) are
    clipped to zero and each context row renormalized.
    """
    if method not in ("reject", "shrink"):
        raise ValueError(f"method must be 'reject' or 'shrink', got {method!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    q, uniform = _projector(scenario)
    n_ctx = len(scenario.contexts)
    chunks: list[np.ndarray] = []
    total = 0
    while total < count:
        size = min(batch, max(1000, 16 * (count - total)))
        raw = rng.dirichlet(np.ones(8), size=(size, n_ctx)).reshape(size, 8 * n_ctx)
        raw -= uniform
        raw -= (raw @ q) @ q.T
        raw += uniform
        if method == "reject":
            keep = raw[np.min(raw, axis=1) >= -1e-12]
        else:
            # largest t with uniform + t*(row - uniform) nonnegative, t <= 1
            drop = uniform - raw
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(drop > 0.0, uniform / drop, np.inf)
            t = np.minimum(ratios.min(axis=1), 1.0)
            keep = uniform + t[:, None] * (raw - uniform)
        tables = np.clip(keep, 0.0, None).reshape(-1, n_ctx, 8)
        tables /= tables.sum(axis=2, keepdims=True)
        chunks.append(tables.reshape(-1, 8 * n_ctx))
        total += len(chunks[-1])
    return np.concatenate(chunks)[:count]


def sample_behaviors(
    count: int,
    seed: int | np.random.Generator = 0,
    scenario: Scenario = CANONICAL,
) -> list[Behavior]:
    """Random no-disturbance behaviors as :class:`Behavior` objects."""
    rows = sample_behavior_matrix(count, seed, scenario)
    return [Behavior(scenario, row.reshape(-1, 8)) for row in rows]


# ---------------------------------------------------------------------------
# monogamy certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonogamyReport:
    """kcbs and per-pivot chsh values of a no-disturbance behavior."""

    kcbs: float
    chsh_by_pivot: dict[int, float]
    violation_tol: float

    @property
    def sums_by_pivot(self) -> dict[int, float]:
        return {i: self.kcbs + v for i, v in self.chsh_by_pivot.items()}

    @property
    def kcbs_violated(self) -> bool:
        return self.kcbs < KCBS_CLASSICAL_BOUND - self.violation_tol

    @property
    def chsh_violated(self) -> bool:
        return any(
            v < CHSH_CLASSICAL_BOUND - self.violation_tol
            for v in self.chsh_by_pivot.values()
        )

    @property
    def at_most_one_violated(self) -> bool:
        return not (self.kcbs_violated and self.chsh_violated)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kcbs": self.kcbs,
                "chsh_by_pivot": {str(i): v for i, v in self.chsh_by_pivot.items()},
                "sums_by_pivot": {str(i): v for i, v in self.sums_by_pivot.items()},
                "kcbs_violated": self.kcbs_violated,
                "chsh_violated": self.chsh_violated,
                "at_most_one_violated": self.at_most_one_violated,
            }
        )


def monogamy_certificate(
    behavior: Behavior, tol: float = ND_TOL, violation_tol: float = 1e-9
) -> MonogamyReport:
    """kcbs, chsh for every pivot, their sums, and the tradeoff flag.

    For any behavior satisfying no-disturbance at ``tol``, at most one of
    the two inequalities can be violated (beyond ``violation_tol``).
    """
    _require_nd(behavior, tol)
    return MonogamyReport(
        kcbs=kcbs_value(behavior),
        chsh_by_pivot={i: chsh_value(behavior, i) for i in PIVOTS},
        violation_tol=violation_tol,
    )


def monogamy_expression(pivot: int = 5) -> LinearExpression:
    """The combined expression kcbs + chsh for one pivot (bound -5)."""
    return kcbs_expression() + chsh_expression(pivot)

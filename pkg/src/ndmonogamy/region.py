"""The quantum (chsh, kcbs) region of the qutrit-qubit implementation.

Both witnesses are block-diagonal in the same splitting of the 6-dim
space, so the reachable (chsh, kcbs) pairs of each 3-dim block form a
region swept by two real parameters:

    |theta, phi> = cos(theta)|a> + sin(theta) cos(phi)|b>
                 + sin(theta) sin(phi)|c>,

with |a> the block direction extremizing the pentagon witness and |b>,
|c> the eigenvectors of the upper-left 2x2 submatrix of the Bell block M.
The pentagon expectation depends on theta alone, so boundary points of
the region are exactly the phi-stationary points of the Bell expectation
at fixed theta.  Solving that stationarity for theta as a function of phi
gives the closed-form boundary condition

    tan(theta) = csc(2 phi) (g5 cos(phi) - g4 sin(phi)) / (2 g3),

and substituting it back yields one-parameter families of boundary states
f(phi)|01> + g(phi)|10> + |21> (plus block) and the mirrored family on
the other block.  The second block reproduces the same region with the
chsh axis negated.

All constants (alpha, beta, g1..g5, f, g) are recomputed from the Bell
block to full precision; rounded literature values appear only in tests
as anchors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .errors import SingularParameter
from .quantum import (
    block_decompose,
    chsh_operator,
    eigensystem,
    expectation,
    kcbs_operator,
    random_states,
)

SQRT5 = math.sqrt(5.0)
KCBS_QUANTUM_MIN = 5.0 - 4.0 * SQRT5
KCBS_QUANTUM_DEGENERATE = -5.0 + 2.0 * SQRT5
MONOGAMY_BOUND = -5.0
POINTWISE_SLACK = 1e-9

BRANCHES = ("plus", "minus")


# ---------------------------------------------------------------------------
# block data
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _blocks() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(M, N, basis_plus, basis_minus): the real 3x3 blocks and embeddings."""
    decomposition = block_decompose(chsh_operator())
    m = np.real(decomposition.m)
    m.setflags(write=False)
    n = np.diag([KCBS_QUANTUM_DEGENERATE, KCBS_QUANTUM_DEGENERATE, KCBS_QUANTUM_MIN])
    n.setflags(write=False)
    return m, n, decomposition.basis_plus, decomposition.basis_minus


def bell_block() -> np.ndarray:
    """The 3x3 Bell block M in the basis (|01>, |10>, |21>)."""
    return _blocks()[0].copy()


def pentagon_block() -> np.ndarray:
    """The 3x3 pentagon block, diagonal in the same basis."""
    return _blocks()[1].copy()


def bell_block_minimum() -> float:
    """Smallest eigenvalue of M, the quantum chsh minimum."""
    w, _ = eigensystem(bell_block())
    return float(w[0])


@dataclass(frozen=True, eq=False)
class RegionBasis:
    """Orthonormal block frame (a, b, c) with b, c in the top 2x2 plane."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    alpha: float
    beta: float


@lru_cache(maxsize=None)
def _region_basis() -> RegionBasis:
    m = _blocks()[0]
    w, v = eigensystem(m[:2, :2].astype(complex))
    minimizer = np.real(v[:, 0])
    alpha, beta = float(minimizer[0]), float(minimizer[1])
    a = np.array([0.0, 0.0, 1.0])
    b = np.array([alpha, beta, 0.0])
    c = np.array([-beta, alpha, 0.0])
    for vec in (a, b, c):
        vec.setflags(write=False)
    return RegionBasis(a, b, c, alpha, beta)


def region_basis() -> RegionBasis:
    """Frame with |b> minimizing and |c> maximizing <M> on the top plane."""
    return _region_basis()


class Gammas(NamedTuple):
    """Coefficients of the closed-form Bell expectation in the frame."""

    g1: float
    g2: float
    g3: float
    g4: float
    g5: float


@lru_cache(maxsize=None)
def gammas() -> Gammas:
    """g1 = <a|M|a>, g2/g3 = mean/half-gap of <b|M|b>, <c|M|c>, g4 = 2<a|M|b>,
    g5 = 2<a|M|c>; recomputed from the Bell block to full precision."""
    m = _blocks()[0]
    frame = _region_basis()
    mbb = float(frame.b @ m @ frame.b)
    mcc = float(frame.c @ m @ frame.c)
    return Gammas(
        g1=float(frame.a @ m @ frame.a),
        g2=(mbb + mcc) / 2.0,
        g3=(mbb - mcc) / 2.0,
        g4=2.0 * float(frame.a @ m @ frame.b),
        g5=2.0 * float(frame.a @ m @ frame.c),
    )


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def expectation_M(theta, phi):
    """Closed-form Bell expectation <theta,phi|M|theta,phi> (array-safe)."""
    g = gammas()
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    value = (
        g.g1 * np.cos(theta) ** 2
        + (g.g2 + g.g3 * np.cos(2 * phi)) * np.sin(theta) ** 2
        + np.cos(theta) * np.sin(theta) * (g.g4 * np.cos(phi) + g.g5 * np.sin(phi))
    )
    return float(value) if value.ndim == 0 else value


def expectation_N(theta):
    """Closed-form pentagon expectation, independent of phi (array-safe)."""
    theta = np.asarray(theta, dtype=float)
    value = -SQRT5 + (5.0 - 3.0 * SQRT5) * np.cos(2 * theta)
    return float(value) if value.ndim == 0 else value


def frame_state(theta: float, phi: float) -> np.ndarray:
    """The parametrized block vector in (e1, e2, e3) coordinates."""
    frame = _region_basis()
    return (
        math.cos(theta) * frame.a
        + math.sin(theta) * math.cos(phi) * frame.b
        + math.sin(theta) * math.sin(phi) * frame.c
    )


def matrix_expectation_M(theta: float, phi: float) -> float:
    """Direct quadratic form through the Bell block (oracle path)."""
    v = frame_state(theta, phi)
    return float(v @ _blocks()[0] @ v)


def matrix_expectation_N(theta: float, phi: float) -> float:
    v = frame_state(theta, phi)
    return float(v @ _blocks()[1] @ v)


def closed_form_agreement_gap(n_theta: int, n_phi: int) -> float:
    """Worst |closed form - quadratic form| for both witnesses on a grid."""
    m, n, _, _ = _blocks()
    frame = _region_basis()
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    th, ph = np.meshgrid(thetas, phis, indexing="ij")
    states = (
        np.cos(th)[..., None] * frame.a
        + (np.sin(th) * np.cos(ph))[..., None] * frame.b
        + (np.sin(th) * np.sin(ph))[..., None] * frame.c
    )
    direct_m = np.einsum("...i,ij,...j->...", states, m, states)
    direct_n = np.einsum("...i,ij,...j->...", states, n, states)
    gap_m = np.max(np.abs(expectation_M(th, ph) - direct_m))
    gap_n = np.max(np.abs(expectation_N(th) - direct_n))
    return float(max(gap_m, gap_n))


# ---------------------------------------------------------------------------
# boundary
# ---------------------------------------------------------------------------


def _check_not_singular(phi: float, tol: float = 1e-9) -> None:
    nearest = round(phi / (math.pi / 2)) * (math.pi / 2)
    if abs(phi - nearest) < tol:
        raise SingularParameter(
            f"phi={phi} is within {tol} of a multiple of pi/2 where the "
            "boundary formula is singular; approach by limit instead"
        )


def boundary_theta(phi: float) -> float:
    """theta in [0, pi) making (theta, phi) a boundary point of the region.

    Solves the phi-stationarity of the Bell expectation at fixed theta,
    tan(theta) = csc(2 phi)(g5 cos(phi) - g4 sin(phi)) / (2 g3); the
    pentagon expectation is constant in phi, so these stationary points
    sweep the boundary curves.
    """
    _check_not_singular(phi)
    g = gammas()
    t = (g.g5 * math.cos(phi) - g.g4 * math.sin(phi)) / (
        2.0 * g.g3 * math.sin(2.0 * phi)
    )
    theta = math.atan(t)
    return theta if theta >= 0.0 else theta + math.pi


def stationarity_residual(phi: float, step: float = 1e-6) -> float:
    """Central-difference d<M>/dphi at (boundary_theta(phi), phi)."""
    theta = boundary_theta(phi)
    return (expectation_M(theta, phi + step) - expectation_M(theta, phi - step)) / (
        2.0 * step
    )


class _Extreme(NamedTuple):
    value: float
    phi: float


def _phi_extremes(theta: float) -> tuple[_Extreme, _Extreme]:
    """(min, max) of the Bell expectation over phi at fixed theta.

    Stationary phis solve a degree-4 polynomial in tan(phi/2); all real
    roots plus phi = pi are evaluated and compared.
    """
    g = gammas()
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    a = g.g3 * sin_t * sin_t
    b = g.g4 * sin_t * cos_t
    c = g.g5 * sin_t * cos_t
    coeffs = np.array([-c, 8.0 * a - 2.0 * b, 0.0, -(8.0 * a + 2.0 * b), c])
    candidates = [math.pi]
    if np.max(np.abs(coeffs)) > 1e-15:
        roots = np.roots(coeffs)
        candidates.extend(
            2.0 * math.atan(float(r.real))
            for r in roots
            if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real))
        )
    else:
        candidates.append(0.0)  # expectation constant in phi
    values = [_Extreme(float(expectation_M(theta, p)), p % (2 * math.pi)) for p in candidates]
    return min(values), max(values)


@dataclass(frozen=True)
class RegionPoint:
    """One (chsh, kcbs) pair with the block and parameters producing it."""

    chsh: float
    kcbs: float
    branch: str
    theta: float | None = None
    phi: float | None = None

    def __post_init__(self) -> None:
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        if self.chsh + self.kcbs < MONOGAMY_BOUND - POINTWISE_SLACK:
            raise ValueError(
                f"point ({self.chsh}, {self.kcbs}) breaks chsh+kcbs >= -5"
            )


def sample_boundary(n: int) -> list[RegionPoint]:
    """n points per branch tracing the closed quantum boundary curves.

    For each theta on a grid over [0, pi/2] the Bell expectation is
    extremized over phi exactly; lower and upper extremes give the two
    arms of the boundary.  The minus branch is the plus branch with the
    chsh coordinate negated.  Points are ordered by branch, then kcbs,
    then chsh.
    """
    if n < 2:
        raise ValueError(f"need at least 2 boundary samples, got {n}")
    n_lower = (n + 1) // 2
    n_upper = n - n_lower
    points: list[RegionPoint] = []
    for count, pick_low in ((n_lower, True), (n_upper, False)):
        if count == 0:
            continue
        for theta in np.linspace(0.0, math.pi / 2, count):
            lo, hi = _phi_extremes(float(theta))
            ext = lo if pick_low else hi
            kcbs = float(expectation_N(float(theta)))
            points.append(RegionPoint(ext.value, kcbs, "plus", float(theta), ext.phi))
            points.append(RegionPoint(-ext.value, kcbs, "minus", float(theta), ext.phi))
    points.sort(key=lambda p: (p.branch != "plus", p.kcbs, p.chsh))
    return points


def _golden_minimize(func, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section minimizer of a unimodal function on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = func(x1), func(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = func(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = func(x2)
    return (lo + hi) / 2.0


def touching_point() -> RegionPoint:
    """The boundary point minimizing chsh + kcbs.

    Golden-section refinement of theta along the lower plus-branch
    boundary after a coarse bracketing grid; the minimum saturates the
    no-disturbance line chsh + kcbs = -5.
    """

    def objective(theta: float) -> float:
        return _phi_extremes(theta)[0].value + expectation_N(theta)

    grid = np.linspace(0.0, math.pi / 2, 201)
    values = [objective(float(t)) for t in grid]
    k = int(np.argmin(values))
    lo = float(grid[max(0, k - 1)])
    hi = float(grid[min(len(grid) - 1, k + 1)])
    theta = _golden_minimize(objective, lo, hi)
    low, _ = _phi_extremes(theta)
    return RegionPoint(
        low.value, float(expectation_N(theta)), "plus", theta, low.phi
    )


# ---------------------------------------------------------------------------
# boundary states
# ---------------------------------------------------------------------------


def boundary_coefficients(phi: float) -> tuple[float, float]:
    """(f, g) with f e1 + g e2 + e3 the unnormalized boundary vector."""
    theta = boundary_theta(phi)
    tan_theta = math.tan(theta)
    frame = _region_basis()
    f = tan_theta * (frame.alpha * math.cos(phi) - frame.beta * math.sin(phi))
    g = tan_theta * (frame.beta * math.cos(phi) + frame.alpha * math.sin(phi))
    return f, g


def boundary_state(phi: float, branch: str = "plus") -> np.ndarray:
    """Normalized 6-dim state mapping onto the boundary at parameter phi.

    Plus branch: f|01> + g|10> + |21>.  Minus branch: the mirrored family
    on the complementary block (in that block's sign convention), whose
    point is the plus point with chsh negated.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")
    f, g = boundary_coefficients(phi)
    block_vec = np.array([f, g, 1.0], dtype=complex)
    block_vec /= np.linalg.norm(block_vec)
    basis = _blocks()[2] if branch == "plus" else _blocks()[3]
    return basis @ block_vec


def boundary_point_of_state(state: np.ndarray, branch: str) -> RegionPoint:
    """The (chsh, kcbs) point of a state, tagged with ``branch``."""
    chsh = float(expectation(chsh_operator(), state))
    kcbs = float(expectation(kcbs_operator(), state))
    return RegionPoint(chsh, kcbs, branch)


# ---------------------------------------------------------------------------
# membership sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepReport:
    """Random-state sweep statistics against the three pointwise bounds."""

    samples: int
    seed: int
    min_kcbs: float
    min_chsh: float
    min_sum: float
    max_kcbs: float
    max_chsh: float
    monogamy_violations: list[dict] = field(default_factory=list)
    kcbs_floor_violations: list[dict] = field(default_factory=list)
    chsh_floor_violations: list[dict] = field(default_factory=list)
    kcbs_only_violation_count: int = 0
    chsh_only_violation_count: int = 0

    @property
    def clean(self) -> bool:
        return not (
            self.monogamy_violations
            or self.kcbs_floor_violations
            or self.chsh_floor_violations
        )

    def to_json(self) -> str:
        payload = {
            "samples": self.samples,
            "seed": self.seed,
            "extrema": {
                "min_kcbs": self.min_kcbs,
                "min_chsh": self.min_chsh,
                "min_sum": self.min_sum,
                "max_kcbs": self.max_kcbs,
                "max_chsh": self.max_chsh,
            },
            "violations": {
                "monogamy": self.monogamy_violations,
                "kcbs_floor": self.kcbs_floor_violations,
                "chsh_floor": self.chsh_floor_violations,
            },
            "tradeoff_witnesses": {
                "kcbs_only": self.kcbs_only_violation_count,
                "chsh_only": self.chsh_only_violation_count,
            },
            "clean": self.clean,
        }
        return json.dumps(payload)


def region_membership_sweep(
    samples: int, seed: int = 0, slack: float = POINTWISE_SLACK
) -> SweepReport:
    """Check random pure states against the three region bounds.

    Every state must satisfy chsh + kcbs >= -5, kcbs >= 5 - 4 sqrt(5) and
    chsh >= min eig of the Bell block, all within ``slack``; the report
    also counts states violating exactly one of the two classical bounds
    (the two-sided tradeoff).
    """
    if samples < 1:
        raise ValueError(f"need at least 1 sample, got {samples}")
    states = random_states(samples, seed)
    kcbs = expectation(kcbs_operator(), states)
    chsh = expectation(chsh_operator(), states)
    total = kcbs + chsh
    chsh_floor = bell_block_minimum()

    def offenders(mask: np.ndarray) -> list[dict]:
        idx = np.flatnonzero(mask)[:100]
        return [
            {"index": int(i), "kcbs": float(kcbs[i]), "chsh": float(chsh[i])}
            for i in idx
        ]

    return SweepReport(
        samples=samples,
        seed=seed,
        min_kcbs=float(kcbs.min()),
        min_chsh=float(chsh.min()),
        min_sum=float(total.min()),
        max_kcbs=float(kcbs.max()),
        max_chsh=float(chsh.max()),
        monogamy_violations=offenders(total < MONOGAMY_BOUND - slack),
        kcbs_floor_violations=offenders(kcbs < KCBS_QUANTUM_MIN - slack),
        chsh_floor_violations=offenders(chsh < chsh_floor - slack),
        kcbs_only_violation_count=int(np.sum((kcbs < -3.0) & (chsh > -2.0))),
        chsh_only_violation_count=int(np.sum((chsh < -2.0) & (kcbs > -3.0))),
    )


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def boundary_csv_rows(points: Iterable[RegionPoint]) -> list[str]:
    """CSV rows 'branch,phi,theta,chsh,kcbs' at 17 significant digits."""
    rows = ["branch,phi,theta,chsh,kcbs"]
    for p in points:
        phi = "" if p.phi is None else f"{p.phi:.17g}"
        theta = "" if p.theta is None else f"{p.theta:.17g}"
        rows.append(f"{p.branch},{phi},{theta},{p.chsh:.17g},{p.kcbs:.17g}")
    return rows

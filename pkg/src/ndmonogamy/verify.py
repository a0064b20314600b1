"""Cross-module invariant suite behind the ``verify`` CLI command.

Each check recomputes a property two independent ways (enumeration vs
LP, closed form vs matrix quadratic form, Jacobi vs characteristic
polynomial, behavior path vs operator path) and reports pass/fail with a
short deterministic detail string, so repeated runs with the same seed
produce identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import classical, nodisturbance, quantum, region
from .errors import BlockStructureViolated
from .scenario import check_no_disturbance, chsh_value, correlator, kcbs_value

ND_BEHAVIOR_COUNT = 200
STATE_SPOT_CHECKS = 25
BOUNDARY_PHI_SAMPLES = 100
GRID = 100


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name, bool(passed), detail)


def check_classical_bounds() -> CheckResult:
    expected = {
        "kcbs": -3.0,
        "chsh": -2.0,
        "kcbs+chsh": -5.0,
        **{f"c1[{i}]": -3.0 for i in nodisturbance.PIVOTS},
        **{f"c2[{i}]": -2.0 for i in nodisturbance.PIVOTS},
    }
    got = {
        "kcbs": classical.classical_bound(classical.kcbs_expression()).minimum,
        "chsh": classical.classical_bound(classical.chsh_expression()).minimum,
        "kcbs+chsh": classical.classical_bound(
            nodisturbance.monogamy_expression()
        ).minimum,
    }
    for i in nodisturbance.PIVOTS:
        got[f"c1[{i}]"] = classical.classical_bound(classical.c1_expression(i)).minimum
        got[f"c2[{i}]"] = classical.classical_bound(classical.c2_expression(i)).minimum
    bad = {k: v for k, v in got.items() if v != expected[k]}
    return _result(
        "classical-bounds",
        not bad,
        "all enumeration minima exact" if not bad else f"mismatches {bad}",
    )


def check_nd_lp_bounds() -> CheckResult:
    expected = {
        "kcbs": -5.0,
        "chsh": -4.0,
        "kcbs+chsh": -5.0,
        **{f"c1[{i}]": -3.0 for i in nodisturbance.PIVOTS},
        **{f"c2[{i}]": -2.0 for i in nodisturbance.PIVOTS},
    }
    exprs = {
        "kcbs": classical.kcbs_expression(),
        "chsh": classical.chsh_expression(),
        "kcbs+chsh": nodisturbance.monogamy_expression(),
        **{f"c1[{i}]": classical.c1_expression(i) for i in nodisturbance.PIVOTS},
        **{f"c2[{i}]": classical.c2_expression(i) for i in nodisturbance.PIVOTS},
    }
    gaps = {
        name: abs(nodisturbance.nd_optimum(expr).value - expected[name])
        for name, expr in exprs.items()
    }
    worst = max(gaps.values())
    return _result(
        "nd-lp-bounds",
        worst <= 1e-6,
        f"worst LP gap {worst:.3g}",
    )


def check_fine_recovery(seed: int) -> CheckResult:
    behaviors = nodisturbance.sample_behaviors(ND_BEHAVIOR_COUNT, seed)
    worst = 0.0
    for behavior in behaviors:
        for pivot in nodisturbance.PIVOTS:
            joint1 = nodisturbance.fine_join_c1(behavior, pivot)
            joint2 = nodisturbance.fine_join_c2(behavior, pivot)
            for joint, expr in (
                (joint1, classical.c1_expression(pivot)),
                (joint2, classical.c2_expression(pivot)),
            ):
                for _, subset in expr.terms:
                    gap = abs(
                        joint.correlator(subset) - correlator(behavior, subset)
                    )
                    worst = max(worst, gap)
    return _result(
        "fine-marginal-recovery",
        worst <= 1e-10,
        f"{ND_BEHAVIOR_COUNT} behaviors x {len(nodisturbance.PIVOTS)} pivots, "
        f"worst marginal gap {worst:.3g}",
    )


def check_nd_monogamy(seed: int, slack: float = 1e-9) -> CheckResult:
    behaviors = nodisturbance.sample_behaviors(ND_BEHAVIOR_COUNT, seed + 1)
    worst = math.inf
    flags_ok = True
    for behavior in behaviors:
        report = nodisturbance.monogamy_certificate(behavior)
        worst = min(worst, min(report.sums_by_pivot.values()))
        flags_ok = flags_ok and report.at_most_one_violated
    passed = flags_ok and worst >= nodisturbance.MONOGAMY_BOUND - slack
    return _result(
        "nd-monogamy-sweep",
        passed,
        f"min kcbs+chsh over sample {worst:.12g}",
    )


def check_kcbs_spectrum() -> CheckResult:
    op = quantum.kcbs_operator()
    off = float(np.max(np.abs(op - np.diag(np.diag(op)))))
    w, _ = quantum.eigensystem(op)
    expected = np.array(
        [region.KCBS_QUANTUM_MIN] * 2 + [region.KCBS_QUANTUM_DEGENERATE] * 4
    )
    gap = float(np.max(np.abs(w - expected)))
    passed = off <= 1e-12 and gap <= 1e-10
    return _result(
        "kcbs-spectrum",
        passed,
        f"off-diagonal {off:.3g}, eigenvalue gap {gap:.3g}",
    )


def check_chsh_block_structure(chsh_matrix: np.ndarray | None = None) -> CheckResult:
    op = quantum.chsh_operator() if chsh_matrix is None else chsh_matrix
    try:
        decomposition = quantum.block_decompose(op)
    except BlockStructureViolated as exc:
        return _result("chsh-block-structure", False, str(exc))
    minus = decomposition.basis_minus.conj().T @ op @ decomposition.basis_minus
    mirror_gap = float(np.max(np.abs(decomposition.m + minus)))
    s5 = math.sqrt(5.0)
    corner_gap = abs(decomposition.m[0, 0].real - (1.0 - 1.0 / s5))
    passed = mirror_gap <= 1e-10 and corner_gap <= 1e-10
    return _result(
        "chsh-block-structure",
        passed,
        f"mirror gap {mirror_gap:.3g}, corner entry gap {corner_gap:.3g}",
    )


def check_bell_block_eigensystem() -> CheckResult:
    m = region.bell_block()
    w, v = quantum.eigensystem(m.astype(complex))
    oracle = quantum.eigvals_characteristic_3x3(m)
    gap_oracle = float(np.max(np.abs(w - oracle)))
    residual = float(np.max(np.abs(m @ v - v * w[None, :])))
    reconstruction = float(
        np.max(np.abs((v * w[None, :]) @ v.conj().T - m))
    )
    lam2_gap = abs(w[2] - 2.0)
    passed = (
        gap_oracle <= 1e-10
        and residual <= 1e-10
        and reconstruction <= 1e-10
        and lam2_gap <= 1e-10
    )
    return _result(
        "bell-block-eigensystem",
        passed,
        f"oracle gap {gap_oracle:.3g}, residual {residual:.3g}, "
        f"lam2 gap {lam2_gap:.3g}",
    )


def check_behavior_operator_consistency(seed: int) -> CheckResult:
    states = quantum.random_states(STATE_SPOT_CHECKS, seed + 2)
    k_op = quantum.kcbs_operator()
    c_op = quantum.chsh_operator()
    worst_gap = 0.0
    worst_nd = 0.0
    for psi in states:
        behavior = quantum.behavior_from_state(psi)
        worst_gap = max(
            worst_gap,
            abs(kcbs_value(behavior) - quantum.expectation(k_op, psi)),
            abs(chsh_value(behavior) - quantum.expectation(c_op, psi)),
        )
        violations = check_no_disturbance(behavior, 1e-10)
        if violations:
            worst_nd = max(worst_nd, max(v.magnitude for v in violations))
    passed = worst_gap <= 1e-10 and worst_nd == 0.0
    return _result(
        "behavior-operator-consistency",
        passed,
        f"{STATE_SPOT_CHECKS} states, worst value gap {worst_gap:.3g}",
    )


def check_region_constants() -> CheckResult:
    frame = region.region_basis()
    norm_gap = abs(frame.alpha**2 + frame.beta**2 - 1.0)
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(100):
        theta = float(rng.uniform(0.0, math.pi))
        phi = float(rng.uniform(0.0, 2 * math.pi))
        worst = max(
            worst,
            abs(region.expectation_M(theta, phi) - region.matrix_expectation_M(theta, phi)),
        )
    passed = norm_gap <= 1e-12 and worst <= 1e-10
    return _result(
        "region-constants",
        passed,
        f"frame norm gap {norm_gap:.3g}, coefficient gap {worst:.3g}",
    )


def check_closed_form_agreement() -> CheckResult:
    worst = region.closed_form_agreement_gap(GRID, GRID)
    return _result(
        "closed-form-agreement",
        worst <= 1e-10,
        f"{GRID}x{GRID} grid, worst gap {worst:.3g}",
    )


def check_boundary_stationarity() -> CheckResult:
    quarter = math.pi / 2
    offsets = np.linspace(0.02, quarter - 0.02, BOUNDARY_PHI_SAMPLES // 4)
    phis = [k * quarter + d for k in range(4) for d in offsets]
    worst = max(abs(region.stationarity_residual(p)) for p in phis)
    return _result(
        "boundary-stationarity",
        worst <= 1e-8,
        f"{len(phis)} phi samples, worst d<M>/dphi {worst:.3g}",
    )


def check_touching_point() -> CheckResult:
    point = region.touching_point()
    sum_gap = abs(point.chsh + point.kcbs - region.MONOGAMY_BOUND)
    m = region.bell_block()
    n = region.pentagon_block()
    w, v = quantum.eigensystem((m + n).astype(complex))
    vec = np.real(v[:, 0])
    oracle_chsh = float(vec @ m @ vec)
    oracle_kcbs = float(vec @ n @ vec)
    coord_gap = max(abs(point.chsh - oracle_chsh), abs(point.kcbs - oracle_kcbs))
    eig_gap = abs(w[0] - region.MONOGAMY_BOUND)
    passed = sum_gap <= 1e-6 and coord_gap <= 1e-5 and eig_gap <= 1e-10
    return _result(
        "touching-point",
        passed,
        f"sum gap {sum_gap:.3g}, eigen-oracle coordinate gap {coord_gap:.3g}",
    )


def check_boundary_states() -> CheckResult:
    quarter = math.pi / 2
    worst = 0.0
    for branch, sign in (("plus", 1.0), ("minus", -1.0)):
        for phi in np.linspace(0.1, quarter - 0.1, 10):
            theta = region.boundary_theta(float(phi))
            state = region.boundary_state(float(phi), branch)
            behavior = quantum.behavior_from_state(state)
            worst = max(
                worst,
                abs(chsh_value(behavior) - sign * region.expectation_M(theta, float(phi))),
                abs(kcbs_value(behavior) - region.expectation_N(theta)),
            )
    return _result(
        "boundary-states",
        worst <= 1e-8,
        f"end-to-end boundary gap {worst:.3g}",
    )


def check_region_membership(samples: int, seed: int, slack: float = 1e-9) -> CheckResult:
    report = region.region_membership_sweep(samples, seed, slack)
    two_sided = (
        report.kcbs_only_violation_count >= 1
        and report.chsh_only_violation_count >= 1
    )
    return _result(
        "region-membership",
        report.clean and two_sided,
        f"{samples} states, min sum {report.min_sum:.12g}, "
        f"one-sided counts {report.kcbs_only_violation_count}/"
        f"{report.chsh_only_violation_count}",
    )


def verify_all(
    samples: int = 100_000,
    seed: int = 42,
    chsh_matrix: np.ndarray | None = None,
    slack: float = 1e-9,
) -> list[CheckResult]:
    """Run the full suite.

    ``chsh_matrix`` overrides the Bell operator in the block-structure
    check (fault-injection hook for testing); ``slack`` is the tolerance
    granted to the pointwise monogamy bounds in the random sweeps.
    """
    return [
        check_classical_bounds(),
        check_nd_lp_bounds(),
        check_fine_recovery(seed),
        check_nd_monogamy(seed, slack),
        check_kcbs_spectrum(),
        check_chsh_block_structure(chsh_matrix),
        check_bell_block_eigensystem(),
        check_behavior_operator_consistency(seed),
        check_region_constants(),
        check_closed_form_agreement(),
        check_boundary_stationarity(),
        check_touching_point(),
        check_boundary_states(),
        check_region_membership(samples, seed, slack),
    ]


def summary_json(results: list[CheckResult], samples: int, seed: int) -> str:
    return json.dumps(
        {
            "samples": samples,
            "seed": seed,
            "passed": all(r.passed for r in results),
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
        },
        indent=2,
    )

"""Monogamy of the pentagon (KCBS) and Bell (CHSH) witnesses at desk scale.

Library layout:

- :mod:`ndmonogamy.scenario` - measurements, contexts, behaviors,
  correlators, the no-disturbance check.
- :mod:`ndmonogamy.classical` - deterministic assignments and exhaustive
  hidden-variable bounds.
- :mod:`ndmonogamy.nodisturbance` - joint-distribution constructions,
  LP bounds over the behavior polytope, monogamy certificates.
- :mod:`ndmonogamy.quantum` - qutrit-qubit operators, spectra, block
  structure, Born-rule behaviors.
- :mod:`ndmonogamy.region` - the quantum (chsh, kcbs) region, its
  boundary, touching point and boundary states.
- :mod:`ndmonogamy.cli` - the ``ndmonogamy`` command.
"""

from .classical import (
    ClassicalBound,
    DeterministicAssignment,
    LinearExpression,
    behavior_from_assignment,
    c1_expression,
    c2_expression,
    chsh_expression,
    classical_bound,
    cycle_bound,
    enumerate_assignments,
    kcbs_expression,
)
from .errors import (
    BlockStructureViolated,
    Infeasible,
    NdMonogamyError,
    NotHermitian,
    NotNoDisturbance,
    NotNormalized,
    SingularParameter,
    SubsetNotMeasurable,
    TooLarge,
)
from .nodisturbance import (
    JointDistribution,
    MonogamyReport,
    NdOptimum,
    fine_join_c1,
    fine_join_c2,
    monogamy_certificate,
    monogamy_expression,
    nd_optimum,
    sample_behaviors,
)
from .quantum import (
    behavior_from_state,
    block_decompose,
    chsh_operator,
    eigensystem,
    kcbs_observables,
    kcbs_operator,
    kcbs_vectors,
)
from .region import (
    RegionPoint,
    boundary_state,
    boundary_theta,
    expectation_M,
    expectation_N,
    gammas,
    region_basis,
    region_membership_sweep,
    sample_boundary,
    touching_point,
)
from .scenario import (
    Behavior,
    Context,
    Measurement,
    Scenario,
    build_canonical_scenario,
    check_no_disturbance,
    chsh_value,
    correlator,
    kcbs_value,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "BlockStructureViolated",
    "ClassicalBound",
    "Context",
    "DeterministicAssignment",
    "Infeasible",
    "JointDistribution",
    "LinearExpression",
    "Measurement",
    "MonogamyReport",
    "NdMonogamyError",
    "NdOptimum",
    "NotHermitian",
    "NotNoDisturbance",
    "NotNormalized",
    "RegionPoint",
    "Scenario",
    "SingularParameter",
    "SubsetNotMeasurable",
    "TooLarge",
    "behavior_from_assignment",
    "behavior_from_state",
    "block_decompose",
    "boundary_state",
    "boundary_theta",
    "build_canonical_scenario",
    "c1_expression",
    "c2_expression",
    "check_no_disturbance",
    "chsh_expression",
    "chsh_operator",
    "chsh_value",
    "classical_bound",
    "correlator",
    "cycle_bound",
    "eigensystem",
    "enumerate_assignments",
    "expectation_M",
    "expectation_N",
    "fine_join_c1",
    "fine_join_c2",
    "gammas",
    "kcbs_expression",
    "kcbs_observables",
    "kcbs_operator",
    "kcbs_value",
    "kcbs_vectors",
    "monogamy_certificate",
    "monogamy_expression",
    "nd_optimum",
    "region_basis",
    "region_membership_sweep",
    "sample_behaviors",
    "sample_boundary",
    "touching_point",
]

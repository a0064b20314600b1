import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndmonogamy.classical import (
    DeterministicAssignment,
    behavior_from_assignment,
    chsh_expression,
    classical_bound,
    kcbs_expression,
)
from ndmonogamy.errors import SubsetNotMeasurable
from ndmonogamy.quantum import alice_observable, behavior_from_state
from ndmonogamy.scenario import (
    CANONICAL,
    OUTCOME_TRIPLES,
    Behavior,
    build_canonical_scenario,
    check_no_disturbance,
    chsh_value,
    correlator,
    kcbs_value,
)


def all_plus_assignment():
    ids = CANONICAL.measurement_ids
    return DeterministicAssignment(ids, (1,) * len(ids))


class TestCanonicalScenario:
    def test_seven_measurements(self, scenario):
        assert len(scenario.measurements) == 7
        assert scenario.measurement_ids == ("A1", "A2", "A3", "A4", "A5", "B1", "B2")

    def test_outcomes_are_plus_minus_one(self, scenario):
        assert all(m.outcomes == (-1, 1) for m in scenario.measurements)

    def test_ten_contexts(self, scenario):
        assert len(scenario.contexts) == 10
        labels = {c.label for c in scenario.contexts}
        assert "A1,A2,B1" in labels
        assert "A5,A1,B2" in labels

    def test_contexts_are_cyclic_pairs_with_one_bob_setting(self, scenario):
        for context in scenario.contexts:
            first, second, third = context.members
            i = int(first[1])
            assert second == f"A{i % 5 + 1}"
            assert third in ("B1", "B2")

    def test_bobs_settings_share_no_context(self, scenario):
        assert scenario.contexts_containing(("B1", "B2")) == ()
        with pytest.raises(SubsetNotMeasurable):
            scenario.canonical_context(("B1", "B2"))

    def test_rebuild_matches_module_constant(self):
        assert build_canonical_scenario() == CANONICAL


class TestBehavior:
    def test_uniform_tables(self, uniform_behavior):
        assert uniform_behavior.probs.shape == (10, 8)
        assert np.all(uniform_behavior.probs == 1 / 8)

    def test_rejects_negative_probability(self, scenario):
        probs = np.full((10, 8), 1 / 8)
        probs[0, 0] = -0.01
        probs[0, 1] = 0.26
        with pytest.raises(ValueError, match="negative"):
            Behavior(scenario, probs)

    def test_rejects_bad_normalization(self, scenario):
        probs = np.full((10, 8), 1 / 8)
        probs[3, 0] = 0.5
        with pytest.raises(ValueError, match="sum"):
            Behavior(scenario, probs)

    def test_rejects_missing_context(self):
        with pytest.raises(ValueError, match="missing"):
            Behavior.from_tables({"A1,A2,B1": [1 / 8] * 8})

    def test_tiny_negative_entries_clip_to_zero(self, scenario):
        probs = np.full((10, 8), 1 / 8)
        probs[0, 0] = -1e-14
        probs[0, 1] = 2 / 8 + 1e-14
        behavior = Behavior(scenario, probs)
        assert behavior.probs[0, 0] == 0.0

    def test_tables_are_read_only(self, uniform_behavior):
        with pytest.raises(ValueError):
            uniform_behavior.probs[0, 0] = 0.5

    def test_json_round_trip_is_bit_exact(self, nd_behaviors):
        behavior = nd_behaviors[0]
        again = Behavior.from_json(behavior.to_json())
        assert np.array_equal(again.probs, behavior.probs)

    def test_json_keys_are_context_labels(self, uniform_behavior):
        payload = json.loads(uniform_behavior.to_json())
        assert set(payload) == {c.label for c in CANONICAL.contexts}
        assert all(len(v) == 8 for v in payload.values())

    def test_mix_weights_validated(self, uniform_behavior):
        with pytest.raises(ValueError):
            uniform_behavior.mix(uniform_behavior, 1.5)


class TestCorrelator:
    def test_uniform_pair_correlator_is_zero(self, uniform_behavior):
        assert correlator(uniform_behavior, ("A1", "A2")) == 0.0

    def test_deterministic_all_plus(self):
        behavior = behavior_from_assignment(all_plus_assignment())
        assert correlator(behavior, ("A1", "B1")) == 1.0
        assert correlator(behavior, ("A1", "A2", "B1")) == 1.0

    def test_unmeasurable_subsets_raise(self, uniform_behavior):
        for subset in [("A1", "A3"), ("B1", "B2"), ("A1", "A2", "B1", "B2")]:
            with pytest.raises(SubsetNotMeasurable):
                correlator(uniform_behavior, subset)

    def test_explicit_context_must_contain_subset(self, uniform_behavior, scenario):
        other = scenario.canonical_context(("A3", "A4"))
        with pytest.raises(SubsetNotMeasurable):
            correlator(uniform_behavior, ("A1", "A2"), context=other)

    def test_quantum_pair_correlator_matches_trace_oracle(self, basis_state_behavior):
        # oracle: <20|A1 A2 (x) 1|20> computed directly from the observables
        a1a2 = alice_observable(1) @ alice_observable(2)
        expected = float(np.real(a1a2[2, 2]))
        assert correlator(basis_state_behavior, ("A1", "A2")) == pytest.approx(
            expected, abs=1e-12
        )

    def test_nd_behavior_pair_correlator_context_independent(self, nd_behaviors, scenario):
        for behavior in nd_behaviors[:10]:
            for i in range(1, 6):
                pair = (f"A{i}", f"A{i % 5 + 1}")
                ctx_j1, ctx_j2 = scenario.contexts_containing(pair)
                v1 = correlator(behavior, pair, context=ctx_j1)
                v2 = correlator(behavior, pair, context=ctx_j2)
                assert v1 == pytest.approx(v2, abs=1e-12)

    def test_triple_correlator_is_exposed(self, nd_behaviors):
        behavior = nd_behaviors[0]
        value = correlator(behavior, ("A1", "A2", "B1"))
        assert -1.0 - 1e-12 <= value <= 1.0 + 1e-12


class TestNoDisturbance:
    def test_quantum_behavior_passes(self, quantum_behaviors):
        for behavior in quantum_behaviors:
            assert check_no_disturbance(behavior, 1e-10) == []

    def test_constructed_counterexample_reports_singleton_gap(self, scenario):
        # context A1,A2,B1 pins a1 = +1; context A5,A1,B1 pins a1 = -1
        tables = {c.label: [1 / 8] * 8 for c in scenario.contexts}
        tables["A1,A2,B1"] = [0, 0, 0, 0, 0, 0, 0, 1.0]
        tables["A5,A1,B1"] = [1.0, 0, 0, 0, 0, 0, 0, 0]
        behavior = Behavior.from_tables(tables)
        violations = check_no_disturbance(behavior, 1e-10)
        assert violations
        assert any(v.subset == ("A1",) for v in violations)

    def test_mixture_of_nd_behaviors_is_nd(self, quantum_behaviors):
        mixed = quantum_behaviors[0].mix(quantum_behaviors[1], 0.3)
        assert check_no_disturbance(mixed, 1e-10) == []

    def test_violation_records_carry_values(self, scenario):
        tables = {c.label: [1 / 8] * 8 for c in scenario.contexts}
        tables["A1,A2,B1"] = [0, 0, 0, 0, 0, 0, 0, 1.0]
        behavior = Behavior.from_tables(tables)
        violations = check_no_disturbance(behavior, 1e-10)
        worst = max(violations, key=lambda v: v.magnitude)
        assert worst.magnitude == pytest.approx(
            abs(worst.value_a - worst.value_b), abs=0
        )


class TestWitnessValues:
    def test_all_plus_deterministic(self):
        behavior = behavior_from_assignment(all_plus_assignment())
        assert kcbs_value(behavior) == 5.0
        assert chsh_value(behavior) == 2.0

    def test_classical_optimum_reaches_kcbs_bound(self):
        argmin = classical_bound(kcbs_expression()).argmin
        behavior = behavior_from_assignment(argmin)
        assert kcbs_value(behavior) == -3.0

    def test_classical_optimum_reaches_chsh_bound(self):
        argmin = classical_bound(chsh_expression()).argmin
        behavior = behavior_from_assignment(argmin)
        assert chsh_value(behavior) == -2.0

    def test_default_pivot_uses_a1_a4(self, nd_behaviors):
        behavior = nd_behaviors[0]
        expected = (
            correlator(behavior, ("A1", "B1"))
            + correlator(behavior, ("A1", "B2"))
            + correlator(behavior, ("A4", "B1"))
            - correlator(behavior, ("A4", "B2"))
        )
        assert chsh_value(behavior) == pytest.approx(expected, abs=1e-14)
        assert chsh_value(behavior, 5) == chsh_value(behavior)

    @given(weight=st.floats(0.0, 1.0, allow_nan=False))
    @settings(max_examples=30, deadline=None)
    def test_witnesses_linear_in_mixtures(self, weight):
        rng = np.random.default_rng(7)
        tables = rng.dirichlet(np.ones(8), size=(2, 10))
        first = Behavior(CANONICAL, tables[0])
        second = Behavior(CANONICAL, tables[1])
        mixed = first.mix(second, weight)
        for value in (kcbs_value, chsh_value):
            direct = value(mixed)
            combined = weight * value(first) + (1 - weight) * value(second)
            assert direct == pytest.approx(combined, abs=1e-12)

    def test_pivot_wraps_modulo_five(self, nd_behaviors):
        behavior = nd_behaviors[1]
        assert chsh_value(behavior, 5) == pytest.approx(
            chsh_value(behavior, 10), abs=1e-14
        )


def test_outcome_triples_are_lexicographic():
    assert OUTCOME_TRIPLES[0] == (-1, -1, -1)
    assert OUTCOME_TRIPLES[7] == (1, 1, 1)
    assert OUTCOME_TRIPLES == tuple(itertools.product((-1, 1), repeat=3))


def test_quantum_behavior_from_state_passes_nd_everywhere():
    for k in range(6):
        e = np.zeros(6, dtype=complex)
        e[k] = 1.0
        assert check_no_disturbance(behavior_from_state(e), 1e-10) == []

import pytest

from qdesk import (
    ModelConstants,
    build_periodic,
    classical_symbolic_cost,
    quantum_step_cost,
    stage_costs,
    stage_table,
)
from qdesk.costmodel import STAGES
from qdesk.shor import divisors


class TestClassicalCost:
    def test_function_evaluation_writes_every_term(self):
        assert classical_symbolic_cost(build_periodic(3, 2), "function-evaluation") == 8

    def test_filtration_scans_every_term(self):
        assert classical_symbolic_cost(build_periodic(3, 2), "filtration") == 8

    def test_degenerate_single_term_instance(self):
        inst = build_periodic(0, 1)
        for stage in STAGES:
            assert classical_symbolic_cost(inst, stage) == 1

    def test_extraction_reads_the_filtered_list(self):
        # 2^4 / 4 = 4 terms dominate the 4-bit output write
        assert classical_symbolic_cost(build_periodic(4, 4), "extraction") == 4
        # with a long period the write dominates
        assert classical_symbolic_cost(build_periodic(4, 16), "extraction") == 4
        assert classical_symbolic_cost(build_periodic(5, 16), "extraction") == 5

    def test_unknown_stage(self):
        with pytest.raises(ValueError):
            classical_symbolic_cost(build_periodic(2, 2), "telepathy")


class TestQuantumCost:
    def test_filtration_is_linear_in_register_width(self):
        assert quantum_step_cost(build_periodic(3, 2), "filtration") == 3

    def test_extraction_counts_fourier_layers_plus_readout(self):
        assert quantum_step_cost(build_periodic(3, 2), "extraction") == 9

    def test_smallest_function_evaluation(self):
        assert quantum_step_cost(build_periodic(1, 2), "function-evaluation") == 2

    def test_entanglement_independence(self):
        for n in range(2, 7):
            counts = {
                quantum_step_cost(build_periodic(n, r), "filtration") for r in divisors(1 << n)
            }
            assert counts == {n}

    def test_constants_scale_counts(self):
        doubled = ModelConstants(measured_qubit_unit=2)
        assert quantum_step_cost(build_periodic(3, 2), "filtration", doubled) == 6


class TestStageTable:
    def test_classical_filtration_counts_double(self):
        rows = stage_table(list(range(2, 9)))
        counts = [r.classical_units for r in rows if r.stage == "filtration"]
        assert counts == [4, 8, 16, 32, 64, 128, 256]

    def test_quantum_filtration_counts_are_linear(self):
        rows = stage_table(list(range(2, 9)))
        counts = [r.quantum_units for r in rows if r.stage == "filtration"]
        assert counts == [2, 3, 4, 5, 6, 7, 8]

    def test_ratio_strictly_increases(self):
        rows = stage_table(list(range(2, 11)))
        ratios = [r.classical_units / r.quantum_units for r in rows if r.stage == "filtration"]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_rows_cover_every_stage_per_size(self):
        rows = stage_table([2, 3, 4])
        assert len(rows) == 9
        assert {(r.n, r.stage) for r in rows} == {(n, s) for n in (2, 3, 4) for s in STAGES}

    def test_empty_range_rejected(self):
        with pytest.raises(ValueError):
            stage_table([])

    def test_growth_assertions_catch_bad_constants(self):
        # a fake period chooser cannot break doubling, but a giant unit can
        # break the quadratic cap
        huge = ModelConstants(gate_layer_unit=1000)
        with pytest.raises(AssertionError):
            stage_table([2, 3], constants=huge)

    def test_per_instance_rows(self):
        rows = stage_costs(build_periodic(3, 4))
        assert [r.stage for r in rows] == list(STAGES)
        assert all(r.n == 3 for r in rows)

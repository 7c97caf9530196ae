"""Stage-by-stage step counts for period finding, classical vs quantum.

This is a declared accounting model, not a benchmark.  Classical cost is
the work to write out the symbolic description of the next state from the
previous one, term by term; quantum cost counts gate layers and measured
qubits.  Under the default constants:

                        classical                quantum
  function-evaluation   2^n   (all terms)        n + 1  (one Hadamard layer
                                                 + oracle credited n layers)
  filtration            2^n   (scan all terms)   n      (measure n F qubits)
  extraction            max(2^n / r, n)          n(n+1)/2 + n  (Fourier
                                                 layers + measured X qubits)

The oracle's n-layer credit stands in for a concrete circuit of the
evaluated function, which this model deliberately leaves abstract.  The
quantum filtration count depends on register width only, never on how
entangled the registers are.
"""

from __future__ import annotations

from dataclasses import dataclass

from .shor import PeriodFindingInstance

STAGES = ("function-evaluation", "filtration", "extraction")

# Quantum counts are asserted polynomial with this quadratic cap.
GROWTH_CAP_FACTOR = 2


@dataclass(frozen=True)
class ModelConstants:
    """Unit weights of the accounting model; all default to one count each."""

    term_unit: int = 1
    gate_layer_unit: int = 1
    measured_qubit_unit: int = 1


DEFAULT_CONSTANTS = ModelConstants()


@dataclass(frozen=True)
class StageCost:
    n: int
    stage: str
    classical_units: int
    quantum_units: int


def _check_stage(stage: str) -> str:
    if stage not in STAGES:
        raise ValueError(f"stage must be one of {STAGES}, got {stage!r}")
    return stage


def classical_symbolic_cost(
    inst: PeriodFindingInstance, stage: str, constants: ModelConstants = DEFAULT_CONSTANTS
) -> int:
    """Terms written or scanned to derive the next symbolic description."""
    _check_stage(stage)
    size = inst.dimension
    if stage == "function-evaluation":
        return constants.term_unit * size
    if stage == "filtration":
        return constants.term_unit * size
    # extraction: read the period from the filtered term list, then write
    # the n-bit answer; the dominating count is charged.
    return constants.term_unit * max(size // inst.period, inst.n)


def quantum_step_cost(
    inst: PeriodFindingInstance, stage: str, constants: ModelConstants = DEFAULT_CONSTANTS
) -> int:
    """Gate layers plus measured qubits for one stage."""
    _check_stage(stage)
    n = inst.n
    if stage == "function-evaluation":
        return constants.gate_layer_unit * (1 + n)
    if stage == "filtration":
        return constants.measured_qubit_unit * inst.table.output_bits
    return constants.gate_layer_unit * (n * (n + 1) // 2) + constants.measured_qubit_unit * n


def stage_costs(
    inst: PeriodFindingInstance, constants: ModelConstants = DEFAULT_CONSTANTS
) -> list[StageCost]:
    return [
        StageCost(
            inst.n,
            stage,
            classical_symbolic_cost(inst, stage, constants),
            quantum_step_cost(inst, stage, constants),
        )
        for stage in STAGES
    ]


def stage_table(
    n_values: list[int],
    period_for=None,
    constants: ModelConstants = DEFAULT_CONSTANTS,
) -> list[StageCost]:
    """Cost rows for every n, with the growth-class assertions built in.

    ``period_for(n)`` picks the instance period per size (default: half the
    input space, which keeps classical extraction linear in n).  Raises
    ``AssertionError`` if the counts stop doubling classically or exceed the
    quadratic cap quantally.
    """
    from .shor import build_periodic

    if not n_values:
        raise ValueError("n_values must not be empty")
    if period_for is None:
        period_for = lambda n: max(1, (1 << n) // 2)
    rows: list[StageCost] = []
    for n in sorted(n_values):
        rows.extend(stage_costs(build_periodic(n, period_for(n)), constants))
    _assert_growth_classes(rows)
    return rows


def _assert_growth_classes(rows: list[StageCost]) -> None:
    by_stage: dict[str, list[StageCost]] = {stage: [] for stage in STAGES}
    for row in rows:
        by_stage[row.stage].append(row)
    for stage in ("function-evaluation", "filtration"):
        seq = sorted(by_stage[stage], key=lambda r: r.n)
        for prev, cur in zip(seq, seq[1:]):
            expected = prev.classical_units << (cur.n - prev.n)
            assert cur.classical_units == expected, (
                f"classical {stage} count stopped doubling: "
                f"n={cur.n} has {cur.classical_units}, expected {expected}"
            )
    for stage in STAGES:
        for row in by_stage[stage]:
            cap = GROWTH_CAP_FACTOR * row.n * row.n
            assert row.quantum_units <= max(cap, 2), (
                f"quantum {stage} count {row.quantum_units} exceeds {cap} at n={row.n}"
            )

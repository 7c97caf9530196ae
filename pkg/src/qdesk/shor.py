"""Period finding end to end: build a periodic function table, push it
through the Hadamard / oracle / Fourier block diagram under one of three
measurement disciplines, and read the period off the measured outcome with
continued fractions.

The three disciplines agree exactly on the final [X] statistics:

* ``measure-F-at-t2``  -- measure the function register right after the
  oracle, carrying one Born branch forward;
* ``skip-F``           -- never touch F before the end;
* ``annihilate-F``     -- replace the pure state by its random-phase
  mixture over F values (sampled phases in the sampling pipeline, the exact
  phase average in the exact one).

Exact distributions are computed by full enumeration, never sampling, so
the equality of the disciplines is a 1e-10 assertion rather than a
statistical one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit_ir import CircuitProgram, GateOp, Measure, Prepare
from .errors import ShapeMismatchError
from .gates import FunctionTable, modexp_table, oracle_xor, hadamard_all, qft
from .measure import (
    MeasurementRecord,
    ProjectionOperator,
    _register_marginal,
    born_sample,
    outcome_distribution,
    phased_mixture_from_state,
    project,
    sample_phases,
)
from .qstate import PureState, RegisterLayout, make_basis_state

DISCIPLINES = ("measure-F-at-t2", "skip-F", "annihilate-F")


@dataclass(frozen=True)
class PeriodFindingInstance:
    """A function table with hidden period, plus the register sizes to run it.

    ``period`` is ground truth for checking extraction; the pipeline itself
    never reads it.
    """

    n: int
    table: FunctionTable
    period: int
    period_divides: bool

    def __post_init__(self):
        if self.table.input_bits != self.n:
            raise ShapeMismatchError("table input width must equal n")

    @property
    def dimension(self) -> int:
        return 1 << self.n

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout.of(X=self.n, F=self.table.output_bits)


@dataclass(frozen=True)
class PeriodResult:
    measured_value: int
    candidate_period: int | None
    success: bool
    f_outcome: int | None = None


def build_periodic(n: int, period: int) -> PeriodFindingInstance:
    """Canonical instance f(x) = x mod period on n input qubits."""
    size = 1 << n
    if not 1 <= period <= size:
        raise ValueError(f"period must be in 1..{size}, got {period}")
    table = FunctionTable(n, n, tuple(x % period for x in range(size)))
    return PeriodFindingInstance(n, table, period, size % period == 0)


def build_modexp(base: int, modulus: int, n: int) -> PeriodFindingInstance:
    """Instance f(x) = base**x mod modulus; the period is the multiplicative
    order of the base, found by brute force."""
    table = modexp_table(base, modulus, n)
    order, acc = 1, base % modulus
    while acc != 1:
        acc = (acc * base) % modulus
        order += 1
    return PeriodFindingInstance(n, table, order, (1 << n) % order == 0)


def state_after_oracle(inst: PeriodFindingInstance) -> PureState:
    """The entangled two-register state right after function evaluation."""
    state = make_basis_state(inst.layout, {})
    state = hadamard_all(state, "X")
    return oracle_xor(state, inst.table, "X", "F")


def period_circuit(inst: PeriodFindingInstance, discipline: str) -> CircuitProgram:
    """The block-diagram program, tagged t1..t4 on instruction boundaries.

    Only the two circuit-expressible disciplines apply here; phase
    annihilation is a state transform, not an instruction.
    """
    head = [
        Prepare("X", 0),
        GateOp("hadamard", reg="X"),
        GateOp("oracle-xor", in_reg="X", out_reg="F", table=inst.table),
    ]
    if discipline == "measure-F-at-t2":
        instrs = head + [Measure("F"), GateOp("qft", reg="X"), Measure("X")]
        tags = {"t1": 1, "t2": 3, "t3": 4, "t4": 5}
    elif discipline == "skip-F":
        instrs = head + [GateOp("qft", reg="X"), Measure("X"), Measure("F")]
        tags = {"t1": 1, "t2": 3, "t4": 4}
    else:
        raise ValueError(f"no circuit form for discipline {discipline!r}")
    return CircuitProgram(inst.layout, tuple(instrs), tags)


def extract_period(outcome: int, dimension: int) -> int | None:
    """Denominator of outcome/dimension in lowest terms, via the
    continued-fraction convergent recurrence; 0 carries no information."""
    if not 0 <= outcome < dimension:
        raise ValueError(f"outcome must be in 0..{dimension - 1}")
    if outcome == 0:
        return None
    num, den = outcome, dimension
    quotients = []
    while den:
        quotients.append(num // den)
        num, den = den, num % den
    q_prev, q_cur = 1, 0
    for a in quotients:
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return q_cur


def run_pipeline(
    inst: PeriodFindingInstance,
    discipline: str,
    rng: np.random.Generator,
    record_sink: list[MeasurementRecord] | None = None,
) -> PeriodResult:
    """One sampled run of the full pipeline under the chosen discipline.

    Pass a list as ``record_sink`` to collect the Born samples taken along
    the way.
    """
    if discipline not in DISCIPLINES:
        raise ValueError(f"discipline must be one of {DISCIPLINES}, got {discipline!r}")
    state = state_after_oracle(inst)
    f_outcome = None
    if discipline == "measure-F-at-t2":
        f_dist = outcome_distribution(state, "F")
        f_outcome = born_sample(f_dist, rng)
        state = project(state, ProjectionOperator("F", f_outcome))
        if record_sink is not None:
            record_sink.append(
                MeasurementRecord("F", f_outcome, float(f_dist.probabilities[f_outcome]))
            )
    elif discipline == "annihilate-F":
        state = sample_phases(phased_mixture_from_state(state, "F"), rng)
    state = qft(state, "X")
    x_dist = outcome_distribution(state, "X")
    measured = born_sample(x_dist, rng)
    if record_sink is not None:
        record_sink.append(
            MeasurementRecord("X", measured, float(x_dist.probabilities[measured]))
        )
    candidate = extract_period(measured, inst.dimension)
    return PeriodResult(measured, candidate, candidate == inst.period, f_outcome)


def exact_outcome_distribution(inst: PeriodFindingInstance, discipline: str) -> np.ndarray:
    """Exact final [X] distribution, computed along the discipline's own route.

    skip-F transforms the full pure state; measure-F-at-t2 enumerates the F
    branches with their Born weights; annihilate-F takes the closed-form
    phase average of the mixture (cross terms vanish slot by slot).
    """
    state = state_after_oracle(inst)
    layout = inst.layout
    if discipline == "skip-F":
        return outcome_distribution(qft(state, "X"), "X").probabilities.copy()
    if discipline == "measure-F-at-t2":
        f_dist = outcome_distribution(state, "F")
        total = np.zeros(inst.dimension)
        for v in f_dist.support():
            post = project(state, ProjectionOperator("F", v))
            branch = outcome_distribution(qft(post, "X"), "X").probabilities
            total += float(f_dist.probabilities[v]) * branch
        return total
    if discipline == "annihilate-F":
        mixture = phased_mixture_from_state(state, "F")
        total = np.zeros(inst.dimension)
        for slot in mixture.slots:
            evolved = qft(PureState(layout, slot), "X")
            total += _register_marginal(evolved.amplitudes, layout, "X")
        return total
    raise ValueError(f"discipline must be one of {DISCIPLINES}, got {discipline!r}")


def single_run_success_probability(inst: PeriodFindingInstance) -> float:
    """Probability that one run's extracted period equals the true period,
    summed over the exact outcome distribution."""
    probs = exact_outcome_distribution(inst, "skip-F")
    total = 0.0
    for outcome, p in enumerate(probs):
        if p > 0.0 and extract_period(outcome, inst.dimension) == inst.period:
            total += float(p)
    return total


def divisors(value: int) -> list[int]:
    """All positive divisors, ascending; handy for sweeping r | N."""
    out = [d for d in range(1, int(math.isqrt(value)) + 1) if value % d == 0]
    return sorted(set(out + [value // d for d in out]))

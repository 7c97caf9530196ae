"""The drawer-search game, quantum and classical.

The chest of drawers is an oracle that answers 1 exactly when the probed
drawer x equals the hidden drawer.  The standard quantum circuit searches
with oracle + inversion-about-mean iterations; for 4 drawers a single
iteration lands on the hidden drawer with probability exactly 1, with the
kickback register's (|0>-|1>)/sqrt(2) factor intact.

The extended variant adds a 2-qubit mode register holding the hider's
choice in a random-phase superposition, so both players' answers come out
of one entangled state: measuring the mode register and the search
register, in either order, yields equal values with certainty.

The classical counterpart is the row/column game on a square chest: the
hider announces the row, the seeker scans it, and the worst case costs
sqrt(n) probes instead of n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import (
    FunctionTable,
    ModedFunctionTable,
    grover_diffusion,
    grover_iteration,
    hadamard_all,
    oracle_moded,
)
from .measure import (
    ProjectionOperator,
    average_density,
    analytic_average_density,
    measure_register,
    outcome_distribution,
    phased_mixture_from_state,
    project,
)
from .qstate import PureState, RegisterLayout, StateDistance, make_basis_state

STRATEGIES = ("joint", "unilateral")


@dataclass(frozen=True)
class GameInstance:
    """n drawers, one of them hiding the object."""

    drawers: int
    hidden_drawer: int

    def __post_init__(self):
        if not 0 <= self.hidden_drawer < self.drawers:
            raise ValueError(f"hidden drawer {self.hidden_drawer} not in 0..{self.drawers - 1}")


@dataclass(frozen=True)
class GameTranscript:
    drawers: int
    variant: str
    oracle_queries: int
    announced_k: int
    answered_x: int
    announced_row: int | None = None


def iteration_count(drawers: int) -> int:
    """floor(pi/4 * sqrt(n)) search iterations; exactly 1 for n = 4."""
    return int(math.floor(math.pi / 4.0 * math.sqrt(drawers)))


def marked_drawer_table(drawers: int, hidden_drawer: int) -> FunctionTable:
    bits = _drawer_bits(drawers)
    return FunctionTable(bits, 1, tuple(1 if x == hidden_drawer else 0 for x in range(drawers)))


def _drawer_bits(drawers: int) -> int:
    bits = drawers.bit_length() - 1
    if drawers < 2 or (1 << bits) != drawers:
        raise ValueError(f"drawer count must be a power of two >= 2, got {drawers}")
    return bits


def standard_layout(drawers: int) -> RegisterLayout:
    return RegisterLayout.of(X=_drawer_bits(drawers), F=1)


def kickback_preparation(layout: RegisterLayout) -> PureState:
    """|0..0>_X (|0> - |1>)_F / sqrt(2), the same for every hidden drawer."""
    return hadamard_all(make_basis_state(layout, {"F": 1}), "F")


def standard_grover_state(inst: GameInstance) -> PureState:
    """Pre-measurement state after the full iteration schedule."""
    state = kickback_preparation(standard_layout(inst.drawers))
    state = hadamard_all(state, "X")
    table = marked_drawer_table(inst.drawers, inst.hidden_drawer)
    for _ in range(iteration_count(inst.drawers)):
        state = grover_iteration(state, table, "X", "F")
    return state


def run_standard_grover(inst: GameInstance, rng: np.random.Generator) -> GameTranscript:
    """Play the standard game once; oracle queries = iteration count."""
    state = standard_grover_state(inst)
    answered, _ = measure_register(state, "X", rng)
    return GameTranscript(
        inst.drawers,
        "standard",
        iteration_count(inst.drawers),
        inst.hidden_drawer,
        answered,
    )


EXTENDED_LAYOUT = RegisterLayout.of(K=2, X=2, F=1)


def extended_preparation(phases: tuple[float, float, float]) -> PureState:
    """Mode register in superposition with random phases on the last three
    values, search register at 0, kickback register loaded."""
    amps = np.zeros(EXTENDED_LAYOUT.dimension, dtype=np.complex128)
    factors = [1.0, *(np.exp(1j * p) for p in phases)]
    scale = 1.0 / (2.0 * math.sqrt(2.0))
    for mode in range(4):
        amps[EXTENDED_LAYOUT.encode({"K": mode, "X": 0, "F": 0})] = factors[mode] * scale
        amps[EXTENDED_LAYOUT.encode({"K": mode, "X": 0, "F": 1})] = -factors[mode] * scale
    return PureState(EXTENDED_LAYOUT, amps)


def run_extended_grover(
    drawers: int,
    rng: np.random.Generator,
    order: str = "kx",
    phases: tuple[float, float, float] | None = None,
) -> tuple[PureState, GameTranscript]:
    """Play the mode-extended game once and return the pre-measurement state.

    The construction is specific to 4 drawers.  ``order`` picks which
    register is read first ("kx" or "xk"); the answers agree either way.
    """
    if drawers != 4:
        raise ValueError("the extended game is built for exactly 4 drawers")
    if order not in ("kx", "xk"):
        raise ValueError(f"order must be 'kx' or 'xk', got {order!r}")
    if phases is None:
        phases = tuple(rng.uniform(0.0, 2.0 * math.pi, size=3))
    state = extended_preparation(phases)
    state = hadamard_all(state, "X")
    state = oracle_moded(state, ModedFunctionTable.equality_test(2), "K", "X", "F")
    pre_state = grover_diffusion(state, "X")
    first, second = ("K", "X") if order == "kx" else ("X", "K")
    first_outcome, mid = measure_register(pre_state, first, rng)
    second_outcome, _ = measure_register(mid, second, rng)
    outcomes = {first: first_outcome, second: second_outcome}
    return pre_state, GameTranscript(drawers, "extended", 1, outcomes["K"], outcomes["X"])


def sequential_joint_distribution(
    state: PureState, first: str, second: str
) -> dict[tuple[int, int], float]:
    """Exact joint outcome distribution, enumerated measurement by
    measurement in the given order; keys are (first register's) value pairs
    in (first, second) order."""
    out: dict[tuple[int, int], float] = {}
    first_dist = outcome_distribution(state, first)
    for v in first_dist.support():
        post = project(state, ProjectionOperator(first, v))
        second_dist = outcome_distribution(post, second)
        for w in second_dist.support():
            p = float(first_dist.probabilities[v]) * float(second_dist.probabilities[w])
            out[(v, w)] = out.get((v, w), 0.0) + p
    return out


def mixture_equivalence_check(
    drawers: int = 4,
    method: str = "analytic",
    samples: int = 100_000,
    rng: np.random.Generator | None = None,
    correlated_phases: bool = False,
) -> StateDistance:
    """Frobenius distance between the mode register's phase-averaged reduced
    density and the uniform classical mixture over the 4 choices.

    Independent phases drive the distance to zero (exactly under the
    analytic average, statistically under Monte Carlo); correlated phases
    leave cross terms alive, so the distance stays visibly positive.
    """
    if drawers != 4:
        raise ValueError("the mixture check is built for exactly 4 drawers")
    mixture = phased_mixture_from_state(extended_preparation((0.0, 0.0, 0.0)), "K")
    uniform = np.eye(4) / 4.0
    if method == "analytic":
        groups = [[0], [1, 2, 3]] if correlated_phases else None
        reduced = analytic_average_density(mixture, keep=["K"], phase_groups=groups)
    elif method == "monte-carlo":
        if correlated_phases:
            raise ValueError("correlated phases are evaluated in closed form only")
        if rng is None:
            raise ValueError("monte-carlo method needs an rng")
        reduced = average_density(mixture, samples, rng, keep=["K"])
    else:
        raise ValueError(f"method must be 'analytic' or 'monte-carlo', got {method!r}")
    return StateDistance(reduced.frobenius_distance(uniform), kind="frobenius")


def run_classical_game(drawers: int, hidden_drawer: int, strategy: str) -> GameTranscript:
    """The square-chest game: jointly (row announced, row scanned) or
    unilaterally (every drawer scanned).  Scans stop on hit."""
    inst = GameInstance(drawers, hidden_drawer)
    if strategy == "joint":
        side = math.isqrt(drawers)
        if side * side != drawers:
            raise ValueError(f"joint strategy needs a square drawer count, got {drawers}")
        row, column = divmod(inst.hidden_drawer, side)
        return GameTranscript(
            drawers,
            "classical-joint",
            column + 1,
            inst.hidden_drawer,
            inst.hidden_drawer,
            announced_row=row,
        )
    if strategy == "unilateral":
        return GameTranscript(
            drawers,
            "classical-unilateral",
            inst.hidden_drawer + 1,
            inst.hidden_drawer,
            inst.hidden_drawer,
        )
    raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")


def classical_worst_case_queries(drawers: int, strategy: str) -> int:
    return max(
        run_classical_game(drawers, k, strategy).oracle_queries for k in range(drawers)
    )

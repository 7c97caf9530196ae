"""Command-line front end.

Subcommands: shor, grover, game, defer-check, cost, mixture-check.  Every
run is seeded (flag, else the QDESK_SEED environment variable, else 0) and
every report carries its seed.  JSON output is the stable contract; text
and csv are conveniences.  Exit codes: 0 ok, 1 internal failure, 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import circuit_ir, costmodel, grover, measure, shor
from .errors import QdeskError
from .gates import qft
from .selftest import SUBCOMMAND_SUITES, run_selftest

DEFAULT_SEED_ENV = "QDESK_SEED"


def _default_seed() -> int:
    raw = os.environ.get(DEFAULT_SEED_ENV)
    return int(raw) if raw else 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default: $QDESK_SEED or 0)")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="machine-readable JSON report")
    fmt.add_argument("--csv", action="store_true", help="delimited report")
    fmt.add_argument("--text", action="store_true", help="human-readable report (default)")
    parser.add_argument(
        "--selftest", action="store_true", help="run this subcommand's invariant suite and exit"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdesk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shor", help="period finding under a measurement discipline")
    p.add_argument("--n", type=int, default=3, help="input register qubits")
    p.add_argument("--r", type=int, default=None, help="hidden period of the synthetic instance")
    p.add_argument("--base", type=int, default=None, help="modular-exponentiation base")
    p.add_argument("--modulus", type=int, default=None, help="modular-exponentiation modulus")
    p.add_argument("--discipline", choices=shor.DISCIPLINES, default="skip-F")
    p.add_argument("--trials", type=int, default=0, help="sampled runs for the empirical rate")
    p.add_argument("--dump-state", metavar="PATH", help="write the pre-measurement state as JSON")
    p.add_argument("--records", metavar="PATH", help="write measurement records as JSON lines")
    _add_common(p)

    p = sub.add_parser("grover", help="quantum drawer search, standard or mode-extended")
    p.add_argument("--n", type=int, default=4, help="number of drawers (power of two)")
    p.add_argument("--k", type=int, default=0, help="hidden drawer (standard variant)")
    p.add_argument("--variant", choices=("standard", "extended"), default="standard")
    p.add_argument("--order", choices=("kx", "xk"), default="kx", help="extended measurement order")
    p.add_argument("--dump-state", metavar="PATH", help="write the pre-measurement state as JSON")
    _add_common(p)

    p = sub.add_parser("game", help="classical drawer search on a square chest")
    p.add_argument("--drawers", type=int, default=4)
    p.add_argument("--k", type=int, default=0, help="hidden drawer")
    p.add_argument("--strategy", choices=grover.STRATEGIES, default="joint")
    _add_common(p)

    p = sub.add_parser("defer-check", help="prove a deferral rewrite observationally sound")
    p.add_argument("--circuit", metavar="PATH", help="program JSON file")
    p.add_argument("--against", metavar="PATH", help="second program JSON file to compare")
    p.add_argument("--auto-defer", action="store_true", help="compare against the deferred rewrite")
    p.add_argument("--fig1", action="store_true", help="use the built-in period-finding program")
    p.add_argument("--n", type=int, default=2, help="built-in program: input qubits")
    p.add_argument("--r", type=int, default=2, help="built-in program: hidden period")
    p.add_argument("--observed", help="comma-separated registers (default: measured in both)")
    _add_common(p)

    p = sub.add_parser("cost", help="classical vs quantum stage cost table")
    p.add_argument("--n-range", default="2:10", help="inclusive range, e.g. 2:10")
    _add_common(p)

    p = sub.add_parser("mixture-check", help="random-phase mixture vs uniform classical mixture")
    p.add_argument("--n", type=int, default=4, help="number of drawers (4)")
    p.add_argument("--samples", type=int, default=100_000)
    _add_common(p)

    return parser


def _emit(report: dict, args: argparse.Namespace, csv_rows=None, csv_header=None) -> None:
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    elif args.csv:
        out = io.StringIO()
        writer = csv.writer(out)
        if csv_rows is not None:
            writer.writerow(csv_header)
            writer.writerows(csv_rows)
        else:
            writer.writerow(["key", "value"])
            for key in sorted(report):
                value = report[key]
                writer.writerow([key, json.dumps(value) if isinstance(value, (dict, list)) else value])
        sys.stdout.write(out.getvalue())
    else:
        for key in sorted(report):
            print(f"{key}: {report[key]}")


def _shor_instance(args: argparse.Namespace) -> shor.PeriodFindingInstance:
    if args.base is not None or args.modulus is not None:
        if args.base is None or args.modulus is None:
            raise QdeskError("--base and --modulus must be given together")
        return shor.build_modexp(args.base, args.modulus, args.n)
    period = args.r if args.r is not None else (1 << args.n) // 2
    return shor.build_periodic(args.n, period)


def _cmd_shor(args: argparse.Namespace, seed: int) -> dict:
    inst = _shor_instance(args)
    rng = np.random.default_rng(seed)
    distribution = shor.exact_outcome_distribution(inst, args.discipline)
    report = {
        "n": inst.n,
        "r": inst.period,
        "r_divides_space": inst.period_divides,
        "discipline": args.discipline,
        "seed": seed,
        "distribution": [float(p) for p in distribution],
        "success_probability_exact": shor.single_run_success_probability(inst),
        "trials": args.trials,
        "success_rate_empirical": None,
    }
    records: list[measure.MeasurementRecord] = []
    if args.trials > 0:
        successes = 0
        for _ in range(args.trials):
            result = shor.run_pipeline(inst, args.discipline, rng, record_sink=records)
            successes += result.success
        report["success_rate_empirical"] = successes / args.trials
    if args.records:
        with open(args.records, "w") as fh:
            for record in records:
                fh.write(json.dumps(record.to_json() | {"seed": seed}, sort_keys=True) + "\n")
    if args.dump_state:
        state = state_before_final_measurement(inst, args.discipline, np.random.default_rng(seed))
        with open(args.dump_state, "w") as fh:
            json.dump(state.to_json(), fh)
    return report


def state_before_final_measurement(inst, discipline, rng):
    state = shor.state_after_oracle(inst)
    if discipline == "measure-F-at-t2":
        _, state = measure.measure_register(state, "F", rng)
    elif discipline == "annihilate-F":
        state = measure.sample_phases(measure.phased_mixture_from_state(state, "F"), rng)
    return qft(state, "X")


def _cmd_grover(args: argparse.Namespace, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    if args.variant == "standard":
        inst = grover.GameInstance(args.n, args.k)
        pre = grover.standard_grover_state(inst)
        transcript = grover.run_standard_grover(inst, rng)
        probs = measure.outcome_distribution(pre, "X").probabilities
        report = {
            "variant": "standard",
            "n": args.n,
            "k": args.k,
            "seed": seed,
            "oracle_queries": transcript.oracle_queries,
            "announced_k": transcript.announced_k,
            "answered_x": transcript.answered_x,
            "hit_probability": float(probs[args.k]),
        }
    else:
        pre, transcript = grover.run_extended_grover(args.n, rng, order=args.order)
        joint = grover.sequential_joint_distribution(pre, "K", "X")
        report = {
            "variant": "extended",
            "n": args.n,
            "order": args.order,
            "seed": seed,
            "oracle_queries": transcript.oracle_queries,
            "announced_k": transcript.announced_k,
            "answered_x": transcript.answered_x,
            "joint_distribution": {f"{k},{x}": p for (k, x), p in sorted(joint.items())},
        }
    if args.dump_state:
        with open(args.dump_state, "w") as fh:
            json.dump(pre.to_json(), fh)
    return report


def _cmd_game(args: argparse.Namespace, seed: int) -> dict:
    transcript = grover.run_classical_game(args.drawers, args.k, args.strategy)
    return {
        "drawers": args.drawers,
        "k": args.k,
        "strategy": args.strategy,
        "seed": seed,
        "oracle_queries": transcript.oracle_queries,
        "announced_row": transcript.announced_row,
        "found_drawer": transcript.answered_x,
        "worst_case_queries": grover.classical_worst_case_queries(args.drawers, args.strategy),
    }


def _cmd_defer_check(args: argparse.Namespace, seed: int) -> dict:
    if args.fig1:
        inst = shor.build_periodic(args.n, args.r)
        program = shor.period_circuit(inst, "measure-F-at-t2")
    elif args.circuit:
        with open(args.circuit) as fh:
            program = circuit_ir.CircuitProgram.from_json(json.load(fh))
    else:
        raise QdeskError("need --circuit FILE or --fig1")
    if args.against:
        with open(args.against) as fh:
            other = circuit_ir.CircuitProgram.from_json(json.load(fh))
    elif args.auto_defer or args.fig1:
        other = circuit_ir.defer_measurements(program)
    else:
        raise QdeskError("need --against FILE or --auto-defer")
    if args.observed:
        observed = tuple(name.strip() for name in args.observed.split(",") if name.strip())
    else:
        observed = tuple(sorted(set(program.measured_registers()) & set(other.measured_registers())))
        if not observed:
            raise QdeskError("the two programs share no measured registers")
    distance = circuit_ir.equivalent_distributions(program, other, observed)
    return {
        "seed": seed,
        "observed": list(observed),
        "tv_distance": distance.value,
        "instructions": len(program.instructions),
        "instructions_rewritten": len(other.instructions),
    }


def _parse_n_range(raw: str) -> list[int]:
    lo, _, hi = raw.partition(":")
    try:
        low, high = int(lo), int(hi if hi else lo)
    except ValueError as exc:
        raise QdeskError(f"bad --n-range {raw!r}; expected LO:HI") from exc
    if not 1 <= low <= high:
        raise QdeskError(f"bad --n-range {raw!r}")
    return list(range(low, high + 1))


def _cmd_cost(args: argparse.Namespace, seed: int) -> tuple[dict, list, list]:
    rows = costmodel.stage_table(_parse_n_range(args.n_range))
    header = ["n", "stage", "classical_units", "quantum_units"]
    table = [[row.n, row.stage, row.classical_units, row.quantum_units] for row in rows]
    report = {
        "seed": seed,
        "rows": [dict(zip(header, row)) for row in table],
    }
    return report, table, header


def _cmd_mixture_check(args: argparse.Namespace, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    analytic = grover.mixture_equivalence_check(args.n, "analytic")
    monte = grover.mixture_equivalence_check(args.n, "monte-carlo", samples=args.samples, rng=rng)
    correlated = grover.mixture_equivalence_check(args.n, "analytic", correlated_phases=True)
    return {
        "n": args.n,
        "seed": seed,
        "samples": args.samples,
        "analytic_distance": analytic.value,
        "monte_carlo_distance": monte.value,
        "correlated_phase_distance": correlated.value,
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.selftest:
        ok, lines = run_selftest(SUBCOMMAND_SUITES[args.command], seed)
        for line in lines:
            print(line)
        return 0 if ok else 1
    try:
        if args.command == "shor":
            _emit(_cmd_shor(args, seed), args)
        elif args.command == "grover":
            _emit(_cmd_grover(args, seed), args)
        elif args.command == "game":
            _emit(_cmd_game(args, seed), args)
        elif args.command == "defer-check":
            _emit(_cmd_defer_check(args, seed), args)
        elif args.command == "cost":
            report, table, header = _cmd_cost(args, seed)
            _emit(report, args, csv_rows=table, csv_header=header)
        elif args.command == "mixture-check":
            _emit(_cmd_mixture_check(args, seed), args)
    except QdeskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

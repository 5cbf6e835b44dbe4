"""Command-line front end.

    timesym tables --n 2 --setting 01 --sharing left
    timesym verify-rule --N 4,16,64,256 --variant certainty
    timesym simulate --n 2 --seed 7
    timesym sharings --n 4 --setting 0110
    timesym epr --outcome 1

Exit status: 0 when every internal check passes, 1 when one fails (the
failing check is named on stderr), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import render
from .classical import quantum_query_bound, verify_rule
from .epr import EprScenario, EPR_LAYOUT, agreement_probability, no_signaling_gap, run_epr
from .grover import CERTAINTY_TOL, build_program, plan_variant, solution_probability
from .pipelines import (
    Sharing,
    check_trace_identities,
    loop_closure_fidelity,
    run_ordinary,
    run_relativized,
    run_relativized_loop,
    timesym_for_setting,
)
from .program import Gate, UnitaryProgram
from .records import dumps, report_to_records, trace_to_records
from .sharings import enumerate_sharings, reduction_factor, sweep_instances
from .state import (
    MAX_BITS,
    MeasurementSpec,
    RegisterLayout,
    make_uniform_state,
    parse_bits,
    sample_measure,
    to_bits,
)

COMMANDS = ("simulate", "tables", "sharings", "verify-rule", "epr")


class CheckFailed(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_bits: int
    setting: str | None = None
    sharing: str | None = None
    seed: int | None = None
    variant: str = "certainty"
    output: str = "text"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not 1 <= self.n_bits <= MAX_BITS:
            raise ValueError(f"--n must be in 1..{MAX_BITS}")
        if self.setting is not None:
            parse_bits(self.setting, self.n_bits)
        if self.sharing is not None:
            parse_sharing(self.sharing, self.n_bits)

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout(self.n_bits)


def parse_sharing(text: str, n: int) -> Sharing:
    """A preset name (``left``/``right``) or a comma-separated list of t1 bit positions."""
    if text in ("left", "right"):
        return Sharing.preset(text, n)
    try:
        bits = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValueError(f"malformed sharing {text!r}") from None
    return Sharing(n, bits)


def _parse_N_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",")]
    except ValueError:
        raise ValueError(f"malformed drawer list {text!r}") from None
    for N in values:
        if N < 2 or N & (N - 1) or N > (1 << MAX_BITS):
            raise ValueError(f"drawer count {N} must be a power of two in 2..{1 << MAX_BITS}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="timesym", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=2):
        p.add_argument("--n", type=int, default=n_default, help="bits per register")
        p.add_argument("--variant", choices=("standard", "certainty"), default="certainty")
        p.add_argument("--output", choices=("text", "structured"), default="text")
        return p

    p = common(sub.add_parser("simulate", help="seeded run of the ordinary description"))
    p.add_argument("--setting")
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("tables", help="print Tables I-V for one setting and sharing"))
    p.add_argument("--setting", default=None)
    p.add_argument("--sharing", default="left")

    p = common(sub.add_parser("sharings", help="sweep every even sharing"))
    p.add_argument("--setting")
    p.add_argument("--sample", type=int, default=None, help="sharings sampled per setting")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify-rule", help="quantum vs classical query counts")
    p.add_argument("--N", default="4,16,64,256", help="comma-separated drawer counts")
    p.add_argument("--variant", choices=("standard", "certainty"), default="certainty")
    p.add_argument("--output", choices=("text", "structured"), default="text")

    p = sub.add_parser("epr", help="same-basis measurements on an entangled pair")
    p.add_argument("--outcome", type=int, choices=(0, 1), default=None)
    p.add_argument("--first", choices=("B", "A"), default="B")
    p.add_argument("--separation", choices=("identity", "phase"), default="identity")
    p.add_argument("--output", choices=("text", "structured"), default="text")
    return parser


def _emit(out, text_parts, records, structured):
    if structured:
        print(dumps(records), file=out)
    else:
        print("\n\n".join(text_parts), file=out)


def cmd_simulate(args, out) -> None:
    cfg = RunConfig("simulate", args.n, args.setting, None, args.seed, args.variant, args.output)
    layout = cfg.layout
    variant = plan_variant(layout.N, cfg.variant)
    u = build_program(layout, variant)
    rng = np.random.default_rng(cfg.seed)
    start = make_uniform_state(layout)
    if cfg.setting is None:
        bits, _ = sample_measure(start, MeasurementSpec.full("B", layout.n_bits), rng)
        setting = int("".join(map(str, bits)), 2)
    else:
        setting = parse_bits(cfg.setting, layout.n_bits)
    trace = run_ordinary(layout, setting, program=u)
    evolved = trace.state("forward_evolved")
    reading, _ = sample_measure(evolved, MeasurementSpec.full("A", layout.n_bits), rng)
    read = "".join(map(str, reading))
    success = solution_probability(evolved)
    summary = {"record": "simulation", "n_bits": layout.n_bits, "seed": cfg.seed, "variant": cfg.variant,
               "setting": to_bits(setting, layout.n_bits), "reading": read,
               "oracle_queries": u.oracle_count, "success_probability": success}
    text = [render.format_trace(trace),
            f"setting {summary['setting']}  reading {read}  oracle queries {u.oracle_count}  "
            f"success probability {round(success, 12)}"]
    _emit(out, text, trace_to_records(trace) + [summary], cfg.output == "structured")
    if cfg.variant == "certainty" and success < 1.0 - CERTAINTY_TOL:
        raise CheckFailed(f"certainty_success: probability {success!r}")


def cmd_tables(args, out) -> None:
    n = args.n
    setting_text = args.setting if args.setting is not None else to_bits(1 % (1 << n), n)
    cfg = RunConfig("tables", n, setting_text, args.sharing, None, args.variant, args.output)
    layout = cfg.layout
    setting = parse_bits(cfg.setting, n)
    sharing = parse_sharing(cfg.sharing, n)
    u = build_program(layout, plan_variant(layout.N, cfg.variant))
    t1 = run_ordinary(layout, setting, program=u)
    t2 = run_relativized(layout, setting, program=u)
    t3 = timesym_for_setting(layout, sharing, setting, program=u)
    t4 = run_relativized_loop(layout, sharing, sharing.final_outcome(setting), program=u)
    report = check_trace_identities(layout, setting, sharing, plan_variant(layout.N, cfg.variant))
    text = [render.table_ordinary(t1), render.table_relativized(t2), render.table_timesym(t3, sharing),
            render.table_loop(t4, sharing), render.table_forward_reading(t4), render.format_identities(report)]
    records = []
    for t in (t1, t2, t3, t4):
        records += trace_to_records(t)
    records += report_to_records(report)
    _emit(out, text, records, cfg.output == "structured")
    if not report.passed:
        raise CheckFailed("; ".join(f"{c.name}: fidelity {c.fidelity!r}" for c in report.failures))


def cmd_sharings(args, out) -> None:
    cfg = RunConfig("sharings", args.n, args.setting, None, args.seed, args.variant, args.output)
    layout = cfg.layout
    family = enumerate_sharings(layout.n_bits)
    before, after = reduction_factor(layout.n_bits)
    settings = range(layout.N) if cfg.setting is None else [parse_bits(cfg.setting, layout.n_bits)]
    variant = plan_variant(layout.N, cfg.variant)
    reports = [sweep_instances(layout, s, variant, sample=args.sample, seed=cfg.seed) for s in settings]
    text = [f"{len(family)} even sharings of {layout.n_bits} bits: "
            + ", ".join(s.describe() for s in family)
            + f"\ncandidate space {before} -> {after}"]
    text += [render.format_sweep(r) for r in reports]
    records = [{"record": "sharing_family", "n_bits": layout.n_bits,
                "sharings": [s.describe() for s in family], "space_before": before, "space_after": after}]
    for r in reports:
        records += report_to_records(r)
    _emit(out, text, records, cfg.output == "structured")
    failed = [r.setting for r in reports if not r.passed]
    if failed:
        raise CheckFailed(f"sharing_universality: settings {', '.join(failed)}")


def cmd_verify_rule(args, out) -> None:
    Ns = _parse_N_list(args.N)
    reports = verify_rule(Ns, args.variant)
    records = []
    for r in reports:
        records += report_to_records(r)
    _emit(out, [render.format_query_table(reports)], records, args.output == "structured")
    problems = []
    for r in reports:
        n = int(math.log2(r.N))
        if r.classical_blind_worst != r.N - 1:
            problems.append(f"classical_blind N={r.N}")
        if r.classical_half_worst != (1 << (n // 2)) - 1:
            problems.append(f"classical_half N={r.N}")
        if args.variant == "certainty":
            if r.quantum_success < 1.0 - CERTAINTY_TOL:
                problems.append(f"quantum_success N={r.N}: {r.quantum_success!r}")
            if r.quantum_queries > quantum_query_bound(r.N):
                problems.append(f"query_bound N={r.N}: {r.quantum_queries} > {quantum_query_bound(r.N)}")
    if problems:
        raise CheckFailed("; ".join(problems))


def cmd_epr(args, out) -> None:
    if args.separation == "identity":
        sep = UnitaryProgram.identity(EPR_LAYOUT)
    else:
        sep = UnitaryProgram(EPR_LAYOUT, (Gate("phase_oracle", 0.7), Gate("oracle")))
    scenario = EprScenario(sep, args.first)
    outcomes = (0, 1) if args.outcome is None else (args.outcome,)
    traces = [run_epr(scenario, o) for o in outcomes]
    agree = agreement_probability(scenario)
    gap = no_signaling_gap(scenario)
    closure = min(loop_closure_fidelity(t) for t in traces)
    summary = {"record": "epr_summary", "first_measured": args.first, "separation": args.separation,
               "agreement_probability": agree, "no_signaling_gap": gap, "loop_closure_fidelity": closure}
    text = [render.format_trace(t, unitary="S") for t in traces]
    text.append(f"agreement probability {agree!r}  no-signaling gap {gap:.3e}  loop closure {closure:.12f}")
    records = [rec for t in traces for rec in trace_to_records(t)] + [summary]
    _emit(out, text, records, args.output == "structured")
    problems = []
    if agree != 1.0:
        problems.append(f"perfect_correlation: {agree!r}")
    if gap > 1e-12:
        problems.append(f"no_signaling: {gap!r}")
    if closure < 1.0 - 1e-9:
        problems.append(f"loop_closure: {closure!r}")
    if problems:
        raise CheckFailed("; ".join(problems))


HANDLERS = {
    "simulate": cmd_simulate,
    "tables": cmd_tables,
    "sharings": cmd_sharings,
    "verify-rule": cmd_verify_rule,
    "epr": cmd_epr,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        HANDLERS[args.command](args, out)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"timesym {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main_entry() -> None:
    sys.exit(main())

"""Labeled traces of the search under its different descriptions.

ordinary          measure B at t1, evolve, read A at t2
relativized       the B projection is deferred past the evolution
timesym_instance  the setting's bits are shared between the t1 measurement of
                  B and the t2 measurement of A; the t2 outcome is carried
                  back by the adjoint program
relativized_loop  as above with the t1 projection deferred as well
forward_reading   the loop's backward leg read left to right
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grover import GroverVariant, build_program
from .program import UnitaryProgram, apply_unitary
from .state import (
    MeasurementSpec,
    RegisterLayout,
    StateVector,
    bit_at,
    joint_distribution,
    make_uniform_state,
    project,
    sample_measure,
    fidelity,
    to_bits,
)

TRACE_KINDS = (
    "ordinary",
    "relativized",
    "timesym_instance",
    "relativized_loop",
    "forward_reading",
    "epr",
)
STATE_LABELS = ("t1_premeasure", "t1_selected", "forward_evolved", "t2_selected", "backward_evolved")
OP_LABELS = ("measure", "evolve")
TIME_DIRECTIONS = ("forward", "backward", "none")
BACKWARD_KINDS = frozenset({"timesym_instance", "relativized_loop", "epr"})
IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class TraceEvent:
    label: str
    payload: StateVector | MeasurementSpec | UnitaryProgram
    direction: str = "none"
    probability: float | None = None

    def __post_init__(self):
        if self.direction not in TIME_DIRECTIONS:
            raise ValueError(f"bad time direction {self.direction!r}")
        if self.is_state:
            if self.label not in STATE_LABELS:
                raise ValueError(f"bad state label {self.label!r}")
        elif self.label not in OP_LABELS:
            raise ValueError(f"bad operation label {self.label!r}")

    @property
    def is_state(self) -> bool:
        return isinstance(self.payload, StateVector)


@dataclass(frozen=True)
class Trace:
    kind: str
    events: tuple[TraceEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if self.kind not in TRACE_KINDS:
            raise ValueError(f"unknown trace kind {self.kind!r}")
        ev = self.events
        if not ev or not ev[0].is_state or not ev[-1].is_state:
            raise ValueError("a trace starts and ends with a state")
        for i, e in enumerate(ev):
            if e.is_state != (i % 2 == 0):
                raise ValueError("trace events must alternate states and operations")
            if e.is_state and abs(e.payload.norm() - 1.0) > 1e-10:
                raise ValueError(f"state {e.label} is not normalized")
            if e.direction == "backward" and self.kind not in BACKWARD_KINDS:
                raise ValueError(f"{self.kind} traces cannot propagate backward")

    def states(self) -> list[TraceEvent]:
        return [e for e in self.events if e.is_state]

    def operations(self) -> list[TraceEvent]:
        return [e for e in self.events if not e.is_state]

    def state(self, label: str) -> StateVector:
        for e in self.events:
            if e.is_state and e.label == label:
                return e.payload
        raise KeyError(f"{self.kind} trace has no state labeled {label!r}")

    def has(self, label: str) -> bool:
        return any(e.is_state and e.label == label for e in self.events)

    @property
    def final(self) -> StateVector:
        return self.events[-1].payload

    @property
    def layout(self) -> RegisterLayout:
        return self.events[0].payload.layout

    def program(self) -> UnitaryProgram:
        """The forward program this trace evolves by."""
        for e in self.events:
            if e.label == "evolve":
                return e.payload if e.direction == "forward" else e.payload.adjoint()
        raise KeyError("trace has no evolution step")


def _state(label, s):
    return TraceEvent(label, s)


def _measure(spec, probability):
    return TraceEvent("measure", spec, "none", probability)


def _evolve(program, direction):
    return TraceEvent("evolve", program, direction)


# -- sharings --------------------------------------------------------------


@dataclass(frozen=True)
class Sharing:
    """Which setting bits the t1 measurement of B selects.

    The t2 measurement of A reads the complementary positions, so the two
    selections together name exactly one setting. With odd n the initial
    half is the larger one.
    """

    n_bits: int
    initial_bits: tuple[int, ...]
    final_bits: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        n = self.n_bits
        initial = tuple(sorted(int(b) for b in self.initial_bits))
        complement = tuple(p for p in range(n) if p not in initial)
        final = complement if self.final_bits is None else tuple(sorted(int(b) for b in self.final_bits))
        object.__setattr__(self, "initial_bits", initial)
        object.__setattr__(self, "final_bits", final)
        if len(set(initial)) != len(initial) or any(not 0 <= p < n for p in initial):
            raise ValueError(f"initial bits {initial} are not distinct positions below {n}")
        if final != complement:
            raise ValueError(f"final bits {final} must be the complement of {initial}")
        if len(initial) != math.ceil(n / 2):
            raise ValueError(f"an even sharing of {n} bits measures {math.ceil(n / 2)} bits at t1")

    @classmethod
    def preset(cls, name: str, n_bits: int) -> "Sharing":
        """``left``: B's left half at t1, A's right half at t2. ``right`` is the mirror."""
        half = math.ceil(n_bits / 2)
        if name == "left":
            return cls(n_bits, tuple(range(half)))
        if name == "right":
            return cls(n_bits, tuple(range(n_bits - half, n_bits)))
        raise ValueError(f"unknown sharing preset {name!r}")

    def initial_outcome(self, setting: int) -> tuple[int, ...]:
        return tuple(bit_at(setting, p, self.n_bits) for p in self.initial_bits)

    def final_outcome(self, setting: int) -> tuple[int, ...]:
        return tuple(bit_at(setting, p, self.n_bits) for p in self.final_bits)

    def describe(self) -> str:
        b = ",".join(map(str, self.initial_bits))
        a = ",".join(map(str, self.final_bits))
        return f"B[{b}]|A[{a}]"


# -- pipelines -------------------------------------------------------------


def _program(layout, variant, program):
    if program is not None:
        return program
    return build_program(layout, variant)


def run_ordinary(
    layout: RegisterLayout,
    setting: int | None = None,
    seed: int | None = None,
    variant: GroverVariant | None = None,
    program: UnitaryProgram | None = None,
) -> Trace:
    """Measure B at t1 (forced to ``setting`` or sampled with ``seed``), evolve, read A."""
    u = _program(layout, variant, program)
    start = make_uniform_state(layout)
    n = layout.n_bits
    b_spec = MeasurementSpec.full("B", n)
    if setting is None:
        if seed is None:
            raise ValueError("run_ordinary needs a setting or a seed")
        outcome, _ = sample_measure(start, b_spec, seed)
        setting = int("".join(map(str, outcome)), 2)
    selected, p_b = project(start, MeasurementSpec.full("B", n, setting))
    evolved = apply_unitary(selected, u, "forward")
    final, p_a = project(evolved, MeasurementSpec.full("A", n, setting))
    return Trace(
        "ordinary",
        [
            _state("t1_premeasure", start),
            _measure(MeasurementSpec.full("B", n, setting), p_b),
            _state("t1_selected", selected),
            _evolve(u, "forward"),
            _state("forward_evolved", evolved),
            _measure(MeasurementSpec.full("A", n, setting), p_a),
            _state("t2_selected", final),
        ],
    )


def run_relativized(
    layout: RegisterLayout,
    setting: int,
    variant: GroverVariant | None = None,
    program: UnitaryProgram | None = None,
) -> Trace:
    """The B projection is deferred; evolve the full superposition, then read A."""
    u = _program(layout, variant, program)
    n = layout.n_bits
    start = make_uniform_state(layout)
    evolved = apply_unitary(start, u, "forward")
    a_spec = MeasurementSpec.full("A", n, setting)
    final, p_a = project(evolved, a_spec)
    return Trace(
        "relativized",
        [
            _state("t1_premeasure", start),
            _evolve(u, "forward"),
            _state("forward_evolved", evolved),
            _measure(a_spec, p_a),
            _state("t2_selected", final),
        ],
    )


def _check_outcome(bits, expected_len, what):
    bits = tuple(int(b) for b in bits)
    if len(bits) != expected_len:
        raise ValueError(f"{what} outcome has {len(bits)} bits, sharing measures {expected_len}")
    return bits


def run_timesym_instance(
    layout: RegisterLayout,
    sharing: Sharing,
    initial_outcome: Sequence[int],
    final_outcome: Sequence[int],
    variant: GroverVariant | None = None,
    program: UnitaryProgram | None = None,
) -> Trace:
    """One time-symmetrization instance for the given sharing and outcomes."""
    if sharing.n_bits != layout.n_bits:
        raise ValueError("sharing and layout disagree on n")
    u = _program(layout, variant, program)
    initial_outcome = _check_outcome(initial_outcome, len(sharing.initial_bits), "initial")
    final_outcome = _check_outcome(final_outcome, len(sharing.final_bits), "final")
    start = make_uniform_state(layout)
    b_spec = MeasurementSpec("B", sharing.initial_bits, initial_outcome)
    selected, p_b = project(start, b_spec)
    evolved = apply_unitary(selected, u, "forward")
    a_spec = MeasurementSpec("A", sharing.final_bits, final_outcome)
    final, p_a = project(evolved, a_spec)
    back = apply_unitary(final, u, "adjoint")
    return Trace(
        "timesym_instance",
        [
            _state("t1_premeasure", start),
            _measure(b_spec, p_b),
            _state("t1_selected", selected),
            _evolve(u, "forward"),
            _state("forward_evolved", evolved),
            _measure(a_spec, p_a),
            _state("t2_selected", final),
            _evolve(u, "backward"),
            _state("backward_evolved", back),
        ],
    )


def timesym_for_setting(layout, sharing, setting, variant=None, program=None) -> Trace:
    return run_timesym_instance(
        layout, sharing, sharing.initial_outcome(setting), sharing.final_outcome(setting),
        variant=variant, program=program,
    )


def run_relativized_loop(
    layout: RegisterLayout,
    sharing: Sharing,
    final_outcome: Sequence[int],
    variant: GroverVariant | None = None,
    program: UnitaryProgram | None = None,
) -> Trace:
    """The causal loop with the t1 projection deferred: evolve, read half of A, go back."""
    if sharing.n_bits != layout.n_bits:
        raise ValueError("sharing and layout disagree on n")
    u = _program(layout, variant, program)
    final_outcome = _check_outcome(final_outcome, len(sharing.final_bits), "final")
    start = make_uniform_state(layout)
    evolved = apply_unitary(start, u, "forward")
    a_spec = MeasurementSpec("A", sharing.final_bits, final_outcome)
    final, p_a = project(evolved, a_spec)
    back = apply_unitary(final, u, "adjoint")
    return Trace(
        "relativized_loop",
        [
            _state("t1_premeasure", start),
            _evolve(u, "forward"),
            _state("forward_evolved", evolved),
            _measure(a_spec, p_a),
            _state("t2_selected", final),
            _evolve(u, "backward"),
            _state("backward_evolved", back),
        ],
    )


def forward_reading(loop: Trace) -> Trace:
    """Read the loop's backward leg left to right: its t1 end evolved forward."""
    u = loop.program()
    start = loop.state("backward_evolved")
    return Trace(
        "forward_reading",
        [
            _state("t1_selected", start),
            _evolve(u, "forward"),
            _state("forward_evolved", apply_unitary(start, u, "forward")),
        ],
    )


def loop_closure_fidelity(trace: Trace) -> float:
    """Fidelity between the backward-evolved state pushed forward again and the t2 state."""
    u = trace.program()
    return fidelity(apply_unitary(trace.state("backward_evolved"), u, "forward"), trace.state("t2_selected"))


# -- identities ------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    fidelity: float
    passed: bool


class TraceIdentityError(AssertionError):
    def __init__(self, failures: Sequence[IdentityCheck]):
        self.failures = tuple(failures)
        detail = "; ".join(f"{c.name} (fidelity {c.fidelity:.12f})" for c in self.failures)
        super().__init__(f"trace identities failed: {detail}")


@dataclass(frozen=True)
class IdentityReport:
    n_bits: int
    setting: str
    sharing: str
    checks: tuple[IdentityCheck, ...]
    tolerance: float = IDENTITY_TOL

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]

    def raise_for_failures(self) -> None:
        if self.failures:
            raise TraceIdentityError(self.failures)


IDENTITY_NAMES = (
    "timesym_final_is_ordinary_final",
    "backward_leg_is_ordinary_evolution",
    "loop_forward_reading",
)


def check_trace_identities(
    layout: RegisterLayout,
    setting: int,
    sharing: Sharing,
    variant: GroverVariant | None = None,
    tolerance: float = IDENTITY_TOL,
) -> IdentityReport:
    """Check the three identities tying the time-symmetric traces to the ordinary one.

    1. the instance's t2 outcome is the ordinary final state;
    2. the instance's backward leg, read forward, is the ordinary evolution
       (same start state, same end state);
    3. the loop's backward state evolved forward is the loop's t2 state.
    """
    u = build_program(layout, variant)
    ordinary = run_ordinary(layout, setting, program=u)
    inst = timesym_for_setting(layout, sharing, setting, program=u)
    loop = run_relativized_loop(layout, sharing, sharing.final_outcome(setting), program=u)

    f1 = fidelity(inst.state("t2_selected"), ordinary.state("t2_selected"))
    back = inst.state("backward_evolved")
    f2 = min(
        fidelity(back, ordinary.state("t1_selected")),
        fidelity(apply_unitary(back, u, "forward"), ordinary.state("forward_evolved")),
    )
    f3 = fidelity(forward_reading(loop).final, loop.state("t2_selected"))
    checks = tuple(
        IdentityCheck(name, f, f >= 1.0 - tolerance)
        for name, f in zip(IDENTITY_NAMES, (f1, f2, f3))
    )
    return IdentityReport(layout.n_bits, to_bits(setting, layout.n_bits), sharing.describe(), checks, tolerance)


# -- deferred measurement --------------------------------------------------


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def ordinary_outcome_distribution(layout: RegisterLayout, variant: GroverVariant | None = None) -> np.ndarray:
    """Joint (B, A) distribution at t2 when B is measured at t1, averaged over t1 outcomes."""
    u = build_program(layout, variant)
    total = np.zeros((layout.N, layout.N))
    for b in range(layout.N):
        trace = run_ordinary(layout, b, program=u)
        p_b = trace.events[1].probability
        total += p_b * joint_distribution(trace.state("forward_evolved"))
    return total


def relativized_outcome_distribution(layout: RegisterLayout, variant: GroverVariant | None = None) -> np.ndarray:
    """Joint (B, A) distribution at t2 with the t1 projection deferred."""
    u = build_program(layout, variant)
    return joint_distribution(apply_unitary(make_uniform_state(layout), u, "forward"))


def deferred_measurement_distance(layout: RegisterLayout, variant: GroverVariant | None = None) -> float:
    """Largest total variation distance between the ordinary and relativized outcomes.

    Compares the averaged joint distributions and, setting by setting, the
    distributions of the two final states.
    """
    u = build_program(layout, variant)
    worst = total_variation(
        ordinary_outcome_distribution(layout, variant), relativized_outcome_distribution(layout, variant)
    )
    for b in range(layout.N):
        d = total_variation(
            joint_distribution(run_ordinary(layout, b, program=u).final),
            joint_distribution(run_relativized(layout, b, program=u).final),
        )
        worst = max(worst, d)
    return worst

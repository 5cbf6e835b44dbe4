"""Same-basis measurements on a maximally entangled pair of one-bit registers.

Spatial separation is modeled only as a program that commutes with both
single-side computational projectors; the default is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pipelines import Trace, TraceEvent
from .program import UnitaryProgram, apply_unitary
from .state import (
    MeasurementSpec,
    RegisterLayout,
    StateVector,
    joint_distribution,
    project,
    register_marginal,
    superposition,
)

EPR_LAYOUT = RegisterLayout(1)


def bell_state() -> StateVector:
    """(|0>_B|0>_A + |1>_B|1>_A) / sqrt 2"""
    return superposition(EPR_LAYOUT, [(0, 0), (1, 1)])


def _other(side: str) -> str:
    return "A" if side == "B" else "B"


@dataclass(frozen=True)
class EprScenario:
    separation_program: UnitaryProgram = field(default_factory=lambda: UnitaryProgram.identity(EPR_LAYOUT))
    first_measured: str = "B"

    def __post_init__(self):
        if self.separation_program.layout != EPR_LAYOUT:
            raise ValueError("the pair lives on one-bit registers")
        if not all(g.is_diagonal for g in self.separation_program.steps):
            raise ValueError("separation must commute with the computational projectors of both sides")
        if self.first_measured not in ("B", "A"):
            raise ValueError("first_measured must be 'B' or 'A'")

    @property
    def second_measured(self) -> str:
        return _other(self.first_measured)


def run_epr(scenario: EprScenario, forced_first_outcome: int) -> Trace:
    """Separate, measure the first side, and carry the outcome back to before separation."""
    if forced_first_outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    u = scenario.separation_program
    start = bell_state()
    separated = apply_unitary(start, u, "forward")
    spec = MeasurementSpec(scenario.first_measured, (0,), (forced_first_outcome,))
    selected, p = project(separated, spec)
    back = apply_unitary(selected, u, "adjoint")
    return Trace(
        "epr",
        [
            TraceEvent("t1_premeasure", start),
            TraceEvent("evolve", u, "forward"),
            TraceEvent("forward_evolved", separated),
            TraceEvent("measure", spec, "none", p),
            TraceEvent("t2_selected", selected),
            TraceEvent("evolve", u, "backward"),
            TraceEvent("backward_evolved", back),
        ],
    )


def second_outcome_distribution(trace: Trace, scenario: EprScenario) -> np.ndarray:
    """Distribution of the second side's reading, after the first side was measured."""
    return register_marginal(trace.state("t2_selected"), scenario.second_measured)


def agreement_probability(scenario: EprScenario) -> float:
    """Probability that both sides read the same bit, from the separated state."""
    joint = joint_distribution(apply_unitary(bell_state(), scenario.separation_program, "forward"))
    same = float(np.trace(joint))
    # Ratio rather than the raw trace: rounding in the norm must not show up as disagreement.
    return same / float(joint.sum())


def no_signaling_gap(scenario: EprScenario) -> float:
    """How much measuring the first side moves the second side's marginal.

    Compares the marginal of the untouched separated state with the
    outcome-averaged marginal after the first measurement.
    """
    separated = apply_unitary(bell_state(), scenario.separation_program, "forward")
    other = scenario.second_measured
    before = register_marginal(separated, other)
    after = np.zeros(2)
    for o in (0, 1):
        collapsed, p = project(separated, MeasurementSpec(scenario.first_measured, (0,), (o,)))
        after += p * register_marginal(collapsed, other)
    return float(np.max(np.abs(before - after)))

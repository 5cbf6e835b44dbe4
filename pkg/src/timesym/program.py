"""Gate descriptors and unitary programs, evaluated on the fly.

A program never materializes its 2^(2n) x 2^(2n) matrix. Each gate acts on
the (B, A) amplitude matrix row by row: for fixed B content it is an
operator on register A, and it never moves amplitude between B values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .state import LayoutMismatchError, RegisterLayout, StateVector

GATE_KINDS = ("oracle", "diffusion", "phase_oracle", "phase_diffusion")
ORACLE_KINDS = ("oracle", "phase_oracle")
DIRECTIONS = ("forward", "adjoint")


def _phase_factor(phi: float) -> complex:
    # exp(i*pi) is not exactly -1 in floating point; keep phi = pi exact.
    if phi == math.pi or phi == -math.pi:
        return -1.0
    return complex(np.exp(1j * phi))


@dataclass(frozen=True)
class Gate:
    """One step of a program.

    ``oracle``          phase flip of every basis state with A content = B content
    ``diffusion``       2|u><u| - I on register A, |u> the uniform A state
    ``phase_oracle``    multiplies the A = B component by exp(i*phase)
    ``phase_diffusion`` -(I + (exp(i*phase) - 1)|u><u|) on register A

    At ``phase = pi`` the phase gates coincide with the plain ones.
    """

    kind: str
    phase: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind.startswith("phase_"):
            if self.phase is None:
                raise ValueError(f"{self.kind} needs a phase")
            object.__setattr__(self, "phase", float(self.phase))
        elif self.phase is not None:
            raise ValueError(f"{self.kind} takes no phase")

    @property
    def is_oracle(self) -> bool:
        return self.kind in ORACLE_KINDS

    @property
    def is_diagonal(self) -> bool:
        """Diagonal in the joint computational basis."""
        return self.kind in ORACLE_KINDS

    def adjoint(self) -> "Gate":
        if self.phase is None:
            return self
        return Gate(self.kind, -self.phase)

    def apply(self, m: np.ndarray, marked: np.ndarray) -> np.ndarray:
        """Apply to a (rows, N) amplitude matrix; ``marked[r]`` is row r's A = B column."""
        rows = np.arange(m.shape[0])
        out = m.copy()
        if self.kind == "oracle":
            out[rows, marked] *= -1.0
        elif self.kind == "phase_oracle":
            out[rows, marked] *= _phase_factor(self.phase)
        elif self.kind == "diffusion":
            out = 2.0 * out.mean(axis=1, keepdims=True) - out
        else:
            f = _phase_factor(self.phase)
            out = -(out + (f - 1.0) * out.mean(axis=1, keepdims=True))
        return out


@dataclass
class QueryCounter:
    """Oracle applications seen during a run; one per oracle or phase-oracle step."""

    oracle_calls: int = 0


@dataclass(frozen=True)
class UnitaryProgram:
    layout: RegisterLayout
    steps: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @classmethod
    def identity(cls, layout: RegisterLayout) -> "UnitaryProgram":
        return cls(layout, ())

    @property
    def oracle_count(self) -> int:
        return sum(g.is_oracle for g in self.steps)

    def adjoint(self) -> "UnitaryProgram":
        return UnitaryProgram(self.layout, tuple(g.adjoint() for g in reversed(self.steps)))

    def then(self, other: "UnitaryProgram") -> "UnitaryProgram":
        if other.layout != self.layout:
            raise LayoutMismatchError("cannot compose programs on different layouts")
        return UnitaryProgram(self.layout, self.steps + other.steps)


def run_steps(m: np.ndarray, steps, marked: np.ndarray, counter: QueryCounter | None = None) -> np.ndarray:
    for gate in steps:
        m = gate.apply(m, marked)
        if counter is not None and gate.is_oracle:
            counter.oracle_calls += 1
    return m


def apply_unitary(
    state: StateVector,
    program: UnitaryProgram,
    direction: str = "forward",
    counter: QueryCounter | None = None,
) -> StateVector:
    """Evolve ``state`` by ``program`` or, with ``direction="adjoint"``, by its inverse."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if program.layout != state.layout:
        raise LayoutMismatchError(
            f"program acts on n={program.layout.n_bits}, state has n={state.layout.n_bits}"
        )
    steps = program.steps if direction == "forward" else program.adjoint().steps
    N = state.layout.N
    m = run_steps(state.matrix(), steps, np.arange(N), counter)
    return StateVector(state.layout, m, normalize=False)

"""Grover search on register A, with the marked item named by register B.

Two variants are planned here. ``standard`` is plain Grover iteration.
``certainty`` uses phase-matched iterations, where the oracle and the
diffusion both rotate by the same angle. The angle is tuned so the marked
item is found with probability 1 for any N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .program import Gate, QueryCounter, UnitaryProgram, apply_unitary, run_steps
from .state import RegisterLayout, StateVector, make_uniform_state

VARIANT_KINDS = ("standard", "certainty")
CERTAINTY_TOL = 1e-9


def build_oracle(layout: RegisterLayout) -> Gate:
    return Gate("oracle")


def build_diffusion(layout: RegisterLayout) -> Gate:
    return Gate("diffusion")


@dataclass(frozen=True)
class GroverVariant:
    kind: str
    iterations: int
    phase: float | None = None

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise ValueError(f"variant kind must be one of {VARIANT_KINDS}, got {self.kind!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.kind == "certainty" and self.phase is None:
            raise ValueError("certainty variant needs a phase")

    def steps(self) -> tuple[Gate, ...]:
        if self.kind == "standard":
            one = (Gate("oracle"), Gate("diffusion"))
        else:
            one = (Gate("phase_oracle", self.phase), Gate("phase_diffusion", self.phase))
        return one * self.iterations


def _log2_exact(N: int) -> int:
    if not isinstance(N, (int, np.integer)) or N < 2 or N & (N - 1):
        raise ValueError(f"drawer count must be a power of two >= 2, got {N!r}")
    return int(N).bit_length() - 1


def standard_iterations(N: int) -> int:
    """Nearest integer to pi / (4 asin(1/sqrt N)), ties downward, at least 1."""
    _log2_exact(N)
    x = math.pi / (4.0 * math.asin(1.0 / math.sqrt(N)))
    lo = math.floor(x)
    frac = x - lo
    if abs(frac - 0.5) < 1e-9:
        j = lo
    else:
        j = lo + (frac > 0.5)
    return max(1, j)


def certainty_iterations(N: int) -> int:
    """Fewest phase-matched iterations that can reach probability 1."""
    _log2_exact(N)
    beta = math.asin(1.0 / math.sqrt(N))
    # (2K + 1) * beta >= pi / 2 is the reachability condition.
    return max(1, math.ceil((math.pi / 2 - beta) / (2 * beta) - 1e-9))


def _closed_form_phase(N: int, iterations: int) -> float:
    beta = math.asin(1.0 / math.sqrt(N))
    arg = math.sin(math.pi / (4 * iterations + 2)) / math.sin(beta)
    if arg >= 1.0 - 1e-12:
        return math.pi
    return 2.0 * math.asin(arg)


def success_probability(N: int, variant: GroverVariant) -> float:
    """Probability of reading the marked item after running ``variant`` on one register."""
    row = np.full((1, N), 1.0 / math.sqrt(N), dtype=np.complex128)
    out = run_steps(row, variant.steps(), np.zeros(1, dtype=int))
    return float(abs(out[0, 0]) ** 2)


def _tune_phase(N: int, iterations: int) -> float:
    start = _closed_form_phase(N, iterations)
    if start == math.pi:
        candidate = math.pi
    else:
        res = minimize_scalar(
            lambda phi: 1.0 - success_probability(N, GroverVariant("certainty", iterations, phi)),
            bounds=(max(0.0, start - 0.05), min(math.pi, start + 0.05)),
            method="bounded",
            options={"xatol": 1e-12},
        )
        candidate = float(res.x)
    best = max(
        (start, candidate),
        key=lambda phi: success_probability(N, GroverVariant("certainty", iterations, phi)),
    )
    p = success_probability(N, GroverVariant("certainty", iterations, best))
    if p < 1.0 - CERTAINTY_TOL:
        raise RuntimeError(f"phase tuning failed for N={N}: success {p!r}")
    return best


@lru_cache(maxsize=None)
def plan_variant(N: int, kind: str = "certainty") -> GroverVariant:
    _log2_exact(N)
    if kind == "standard":
        return GroverVariant("standard", standard_iterations(N))
    if kind == "certainty":
        k = certainty_iterations(N)
        return GroverVariant("certainty", k, _tune_phase(N, k))
    raise ValueError(f"variant kind must be one of {VARIANT_KINDS}, got {kind!r}")


def build_program(layout: RegisterLayout, variant: GroverVariant | None = None) -> UnitaryProgram:
    """Program for ``variant``; defaults to the certainty variant planned for this layout."""
    if variant is None:
        variant = plan_variant(layout.N, "certainty")
    return UnitaryProgram(layout, variant.steps())


def run_search(
    layout: RegisterLayout,
    variant: GroverVariant | None = None,
    counter: QueryCounter | None = None,
    initial: StateVector | None = None,
) -> tuple[UnitaryProgram, StateVector]:
    """Build the search program, run it on ``initial`` (uniform by default).

    The counter, when supplied, ends up holding the number of oracle queries.
    """
    program = build_program(layout, variant)
    state = make_uniform_state(layout) if initial is None else initial
    if counter is None:
        counter = QueryCounter()
    counter.oracle_calls = 0
    return program, apply_unitary(state, program, "forward", counter)


def solution_probability(state: StateVector) -> float:
    """Probability that measuring both registers reads A = B."""
    return float(np.sum(np.abs(np.diag(state.matrix())) ** 2))

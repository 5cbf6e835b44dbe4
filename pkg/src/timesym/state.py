"""Dense state vectors over two n-bit registers.

Register B holds the problem-setting, register A the solution. The joint
basis index puts B in the high n bits, so ``amplitudes.reshape(N, N)`` is a
matrix whose row is the B value and whose column is the A value.

Bit positions inside a register count from the left of the bitstring:
position 0 is the most significant bit, matching how ``"01"`` is read.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_BITS = 8
NORM_TOL = 1e-10
IMPOSSIBLE_TOL = 1e-12

REGISTERS = ("B", "A")


class InvalidLayoutError(ValueError):
    pass


class LayoutMismatchError(ValueError):
    pass


class ImpossibleOutcomeError(ValueError):
    """Raised when a forced outcome has (numerically) zero probability."""

    def __init__(self, spec: "MeasurementSpec", probability: float):
        self.spec = spec
        self.probability = probability
        super().__init__(
            f"impossible outcome {spec.describe()} (probability {probability:.3e})"
        )


@dataclass(frozen=True)
class RegisterLayout:
    n_bits: int

    def __post_init__(self):
        if not isinstance(self.n_bits, (int, np.integer)) or isinstance(self.n_bits, bool):
            raise InvalidLayoutError(f"n_bits must be an integer, got {self.n_bits!r}")
        if not 1 <= self.n_bits <= MAX_BITS:
            raise InvalidLayoutError(f"n_bits must be in 1..{MAX_BITS}, got {self.n_bits}")

    @property
    def N(self) -> int:
        """Drawer count, the dimension of one register."""
        return 1 << self.n_bits

    @property
    def dim(self) -> int:
        return 1 << (2 * self.n_bits)

    def index(self, b: int, a: int) -> int:
        return (b << self.n_bits) | a


def to_bits(value: int, n: int) -> str:
    return format(value, f"0{n}b")


def parse_bits(text: str, n: int | None = None) -> int:
    """Parse a bitstring such as ``"0110"`` into its integer value."""
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"malformed bitstring {text!r}")
    if n is not None and len(text) != n:
        raise ValueError(f"bitstring {text!r} has length {len(text)}, expected {n}")
    return int(text, 2)


def bit_at(value: int, position: int, n: int) -> int:
    return (value >> (n - 1 - position)) & 1


def consistent_mask(n: int, bits: Sequence[int], outcome: Sequence[int]) -> np.ndarray:
    """Boolean mask over register values whose ``bits`` read ``outcome``."""
    values = np.arange(1 << n)
    mask = np.ones(1 << n, dtype=bool)
    for p, o in zip(bits, outcome):
        mask &= ((values >> (n - 1 - p)) & 1) == o
    return mask


@dataclass(frozen=True)
class MeasurementSpec:
    """A computational-basis measurement of some bits of one register.

    ``bits`` are positions within the register (0 = leftmost). ``outcome``,
    when given, forces the values read on those positions, in the same order.
    """

    register: str
    bits: tuple[int, ...]
    outcome: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.register not in REGISTERS:
            raise ValueError(f"register must be 'B' or 'A', got {self.register!r}")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if len(set(self.bits)) != len(self.bits):
            raise ValueError(f"bit positions must be distinct: {self.bits}")
        if any(b < 0 for b in self.bits):
            raise ValueError(f"bit positions must be non-negative: {self.bits}")
        if self.outcome is not None:
            object.__setattr__(self, "outcome", tuple(int(o) for o in self.outcome))
            if len(self.outcome) != len(self.bits):
                raise ValueError("outcome length must match the number of bits")
            if any(o not in (0, 1) for o in self.outcome):
                raise ValueError(f"outcome values must be bits: {self.outcome}")

    @classmethod
    def full(cls, register: str, n: int, value: int | None = None) -> "MeasurementSpec":
        """Measure the whole register, optionally forcing it to ``value``."""
        outcome = None if value is None else tuple(bit_at(value, p, n) for p in range(n))
        return cls(register, tuple(range(n)), outcome)

    def with_outcome(self, outcome: Sequence[int]) -> "MeasurementSpec":
        return MeasurementSpec(self.register, self.bits, tuple(outcome))

    def check_layout(self, layout: RegisterLayout) -> None:
        if any(b >= layout.n_bits for b in self.bits):
            raise ValueError(
                f"bit positions {self.bits} out of range for {layout.n_bits}-bit registers"
            )

    def describe(self) -> str:
        bits = ",".join(map(str, self.bits))
        if self.outcome is None:
            return f"{self.register}[{bits}]"
        return f"{self.register}[{bits}]={''.join(map(str, self.outcome))}"


class StateVector:
    """Normalized pure state of the two registers. Immutable."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: RegisterLayout, amplitudes, *, normalize: bool = False):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape != (layout.dim,):
            raise LayoutMismatchError(
                f"expected {layout.dim} amplitudes for n={layout.n_bits}, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if normalize:
            if norm < IMPOSSIBLE_TOL:
                raise ValueError("cannot normalize the zero vector")
            amps /= norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash((self.layout, self.amplitudes.tobytes()))

    def __repr__(self):
        return f"StateVector(n_bits={self.layout.n_bits}, support={len(self.support())})"

    def matrix(self) -> np.ndarray:
        """Read-only (B, A) view of the amplitudes."""
        N = self.layout.N
        return self.amplitudes.reshape(N, N)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    # Thresholds are on probability. IMPOSSIBLE_TOL sits well above the ~1e-18
    # residue a tuned search leaves in the wrong branches.
    def support(self, tol: float = IMPOSSIBLE_TOL) -> list[tuple[int, int]]:
        """Joint basis states (b, a) with non-negligible probability."""
        bs, as_ = np.nonzero(np.abs(self.matrix()) ** 2 > tol)
        return list(zip(bs.tolist(), as_.tolist()))

    def b_support(self, tol: float = IMPOSSIBLE_TOL) -> set[int]:
        return {int(b) for b in np.nonzero(b_marginal(self) > tol)[0]}

    def a_support(self, tol: float = IMPOSSIBLE_TOL) -> set[int]:
        return {int(a) for a in np.nonzero(a_marginal(self) > tol)[0]}


def _check_same_layout(a: StateVector, b: StateVector) -> None:
    if a.layout != b.layout:
        raise LayoutMismatchError(f"layout mismatch: n={a.layout.n_bits} vs n={b.layout.n_bits}")


def make_uniform_state(layout: RegisterLayout) -> StateVector:
    return StateVector(layout, np.full(layout.dim, 2.0 ** (-layout.n_bits)))


def basis_state(layout: RegisterLayout, b: int, a: int) -> StateVector:
    amps = np.zeros(layout.dim)
    amps[layout.index(b, a)] = 1.0
    return StateVector(layout, amps)


def product_state(layout: RegisterLayout, b_vector, a_vector) -> StateVector:
    """Tensor product of a B-register vector and an A-register vector (normalized)."""
    b_vec = np.asarray(b_vector, dtype=np.complex128)
    a_vec = np.asarray(a_vector, dtype=np.complex128)
    if b_vec.shape != (layout.N,) or a_vec.shape != (layout.N,):
        raise LayoutMismatchError("register vectors must have length N")
    return StateVector(layout, np.kron(b_vec, a_vec), normalize=True)


def superposition(layout: RegisterLayout, terms: Iterable[tuple[int, int]], weights=None) -> StateVector:
    """Normalized sum of joint basis states ``|b>_B |a>_A``."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    terms = list(terms)
    weights = np.ones(len(terms)) if weights is None else weights
    for (b, a), w in zip(terms, weights):
        amps[layout.index(b, a)] += w
    return StateVector(layout, amps, normalize=True)


def random_state(layout: RegisterLayout, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return StateVector(layout, amps, normalize=True)


def b_marginal(state: StateVector) -> np.ndarray:
    """Probability of each B value."""
    return np.sum(np.abs(state.matrix()) ** 2, axis=1)


def a_marginal(state: StateVector) -> np.ndarray:
    return np.sum(np.abs(state.matrix()) ** 2, axis=0)


def register_marginal(state: StateVector, register: str) -> np.ndarray:
    return b_marginal(state) if register == "B" else a_marginal(state)


def joint_distribution(state: StateVector) -> np.ndarray:
    """(N, N) array of P(B=b, A=a)."""
    return np.abs(state.matrix()) ** 2


def outcome_distribution(state: StateVector, spec: MeasurementSpec) -> dict[tuple[int, ...], float]:
    """Exact distribution of the bits named by ``spec`` (its outcome is ignored)."""
    spec.check_layout(state.layout)
    n = state.layout.n_bits
    marginal = register_marginal(state, spec.register)
    dist: dict[tuple[int, ...], float] = {}
    for value, p in enumerate(marginal):
        key = tuple(bit_at(value, pos, n) for pos in spec.bits)
        dist[key] = dist.get(key, 0.0) + float(p)
    return dict(sorted(dist.items()))


def project(state: StateVector, spec: MeasurementSpec) -> tuple[StateVector, float]:
    """Project onto the forced outcome of ``spec`` and renormalize.

    Returns the collapsed state and the probability of the outcome.
    """
    if spec.outcome is None:
        raise ValueError("project requires a forced outcome")
    spec.check_layout(state.layout)
    mask = consistent_mask(state.layout.n_bits, spec.bits, spec.outcome)
    m = state.matrix().copy()
    if spec.register == "B":
        m[~mask, :] = 0.0
    else:
        m[:, ~mask] = 0.0
    probability = float(np.sum(np.abs(m) ** 2))
    if probability < IMPOSSIBLE_TOL:
        raise ImpossibleOutcomeError(spec, probability)
    return StateVector(state.layout, m / np.sqrt(probability)), probability


def sample_measure(
    state: StateVector, spec: MeasurementSpec, seed: int | np.random.Generator
) -> tuple[tuple[int, ...], StateVector]:
    """Draw an outcome for the bits of ``spec`` and collapse the state onto it."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dist = outcome_distribution(state, spec)
    outcomes = list(dist)
    probs = np.array([dist[o] for o in outcomes])
    choice = outcomes[int(rng.choice(len(outcomes), p=probs / probs.sum()))]
    collapsed, _ = project(state, spec.with_outcome(choice))
    return choice, collapsed


def inner(a: StateVector, b: StateVector) -> complex:
    _check_same_layout(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, clipped to [0, 1]."""
    return float(min(1.0, max(0.0, abs(inner(a, b)) ** 2)))


def with_global_phase(state: StateVector, theta: float) -> StateVector:
    return StateVector(state.layout, state.amplitudes * np.exp(1j * theta))

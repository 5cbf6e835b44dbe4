"""Even sharings of the setting bits, and sweeps of the time-symmetric traces over them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grover import GroverVariant, build_program
from .pipelines import IDENTITY_TOL, Sharing, run_ordinary, run_relativized_loop, timesym_for_setting
from .state import MAX_BITS, RegisterLayout, fidelity, to_bits


@dataclass(frozen=True)
class SharingFamily:
    n_bits: int
    sharings: tuple[Sharing, ...]

    def __len__(self):
        return len(self.sharings)

    def __iter__(self):
        return iter(self.sharings)


def enumerate_sharings(n: int) -> SharingFamily:
    """All ceil(n/2)-subsets of B positions, lexicographic, each with its complement on A."""
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"n must be in 1..{MAX_BITS}, got {n}")
    half = math.ceil(n / 2)
    return SharingFamily(n, tuple(Sharing(n, c) for c in itertools.combinations(range(n), half)))


def reduction_factor(n: int) -> tuple[int, int]:
    """Candidate-space size before and after the loop: (2^n, 2^(n - ceil(n/2)))."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1 << n, 1 << (n - math.ceil(n / 2))


@dataclass(frozen=True)
class SweepRow:
    sharing: str
    fidelity: float
    loop_support: tuple[str, ...]
    passed: bool


@dataclass(frozen=True)
class SweepReport:
    n_bits: int
    setting: str
    rows: tuple[SweepRow, ...]
    support_intersection: tuple[str, ...]
    backward_legs_identical: bool
    tolerance: float = IDENTITY_TOL

    @property
    def pass_count(self) -> int:
        return sum(r.passed for r in self.rows)

    @property
    def min_fidelity(self) -> float:
        return min(r.fidelity for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.pass_count == len(self.rows) and self.backward_legs_identical


def sweep_instances(
    layout: RegisterLayout,
    setting: int,
    variant: GroverVariant | None = None,
    sample: int | None = None,
    seed: int = 0,
) -> SweepReport:
    """Run the time-symmetrization instance for every sharing and compare with the ordinary run.

    Each row also records the B-support of that sharing's relativized loop.
    ``sample`` restricts the sweep to a seeded random subset of sharings.
    """
    n = layout.n_bits
    if not 0 <= setting < layout.N:
        raise ValueError(f"setting {setting} out of range for n={n}")
    sharings = list(enumerate_sharings(n))
    if sample is not None and sample < len(sharings):
        rng = np.random.default_rng(seed)
        picked = sorted(rng.choice(len(sharings), size=sample, replace=False).tolist())
        sharings = [sharings[i] for i in picked]

    u = build_program(layout, variant)
    target = run_ordinary(layout, setting, program=u).final
    rows = []
    backs = []
    common: set[int] | None = None
    for sh in sharings:
        inst = timesym_for_setting(layout, sh, setting, program=u)
        f = fidelity(inst.state("t2_selected"), target)
        backs.append(inst.state("backward_evolved"))
        loop = run_relativized_loop(layout, sh, sh.final_outcome(setting), program=u)
        support = loop.state("backward_evolved").b_support()
        common = support if common is None else common & support
        rows.append(
            SweepRow(sh.describe(), f, tuple(to_bits(b, n) for b in sorted(support)), f >= 1.0 - IDENTITY_TOL)
        )
    identical = all(fidelity(backs[0], b) >= 1.0 - IDENTITY_TOL for b in backs[1:])
    return SweepReport(
        n,
        to_bits(setting, n),
        tuple(rows),
        tuple(to_bits(b, n) for b in sorted(common or ())),
        identical,
    )

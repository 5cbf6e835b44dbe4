"""Classical drawer search, blind or with half of the setting known in advance.

One classical query is one drawer opened. A searcher stops as soon as the
ball's drawer is known, which includes the case where a single unopened
candidate is left.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .grover import _log2_exact, plan_variant, run_search, solution_probability
from .program import QueryCounter
from .state import RegisterLayout, bit_at


class ContractViolation(ValueError):
    pass


@dataclass(frozen=True)
class Strategy:
    kind: str
    known_subset: frozenset[int] | None = None

    def __post_init__(self):
        if self.kind == "blind":
            if self.known_subset is not None:
                raise ValueError("a blind search knows no subset")
        elif self.kind == "half_info":
            if not self.known_subset:
                raise ValueError("half_info needs a known subset")
            object.__setattr__(self, "known_subset", frozenset(self.known_subset))
        else:
            raise ValueError(f"unknown strategy {self.kind!r}")

    def candidates(self, N: int) -> list[int]:
        return list(range(N)) if self.kind == "blind" else sorted(self.known_subset)


def half_info_subset(n: int, setting: int, known_bits: Sequence[int] | None = None) -> frozenset[int]:
    """Drawers agreeing with ``setting`` on the known bit positions.

    By default the leftmost ceil(n/2) bits are known, leaving 2^floor(n/2) candidates.
    """
    if known_bits is None:
        known_bits = range(math.ceil(n / 2))
    return frozenset(
        d for d in range(1 << n) if all(bit_at(d, p, n) == bit_at(setting, p, n) for p in known_bits)
    )


def _check(N: int, strategy: Strategy, setting: int) -> list[int]:
    n = _log2_exact(N)
    if not 0 <= setting < N:
        raise ValueError(f"setting {setting} out of range for N={N}")
    cands = strategy.candidates(N)
    if strategy.kind == "half_info":
        if any(not 0 <= d < N for d in cands):
            raise ValueError("known subset has drawers outside the chest")
        if setting not in strategy.known_subset:
            raise ContractViolation(f"known subset does not contain the setting {setting}")
        if len(cands) != 1 << (n // 2):
            raise ContractViolation(f"known subset must have {1 << (n // 2)} drawers, has {len(cands)}")
    return cands


def classical_search(N: int, strategy: Strategy, setting: int, query_order: Iterable[int] | None = None) -> int:
    """Drawers opened before the ball's location is known.

    ``query_order`` lists the candidates in opening order; drawers outside
    the candidate set are skipped. Defaults to ascending order.
    """
    cands = _check(N, strategy, setting)
    order = cands if query_order is None else [d for d in query_order if d in set(cands)]
    if sorted(order) != cands:
        raise ValueError("query order must list every candidate drawer exactly once")
    remaining = len(cands)
    opened = 0
    for d in order:
        if remaining == 1:
            break
        opened += 1
        if d == setting:
            break
        remaining -= 1
    return opened


def worst_case_queries(N: int, strategy: Strategy, query_order: Iterable[int] | None = None) -> int:
    """Worst case over all settings consistent with the strategy, for one order."""
    cands = strategy.candidates(N)
    order = None if query_order is None else list(query_order)
    return max(classical_search(N, strategy, s, order) for s in cands)


def mean_queries(N: int, strategy: Strategy) -> float:
    """Expected drawers opened for a uniform setting and a uniform opening order."""
    cands = strategy.candidates(N)
    # For a uniform order the setting's rank is uniform, as it is for a fixed order and uniform setting.
    return sum(classical_search(N, strategy, s) for s in cands) / len(cands)


def brute_force_worst_case(N: int, strategy: Strategy) -> int:
    """Worst case over every opening order and every consistent setting. Small sets only."""
    cands = strategy.candidates(N)
    if len(cands) > 8:
        raise ValueError("brute force over orders is limited to 8 candidates")
    return max(
        classical_search(N, strategy, s, order)
        for order in itertools.permutations(cands)
        for s in cands
    )


@dataclass(frozen=True)
class QueryReport:
    N: int
    classical_blind_worst: int
    classical_half_worst: int
    quantum_queries: int
    quantum_success: float
    within_bound: bool
    classical_blind_mean: float
    classical_half_mean: float
    variant: str = "certainty"

    @property
    def query_bound(self) -> int:
        return quantum_query_bound(self.N)


def quantum_query_bound(N: int) -> int:
    return math.ceil(math.pi / 4 * math.sqrt(N)) + 1


def verify_rule(N_list: Sequence[int], variant: str = "certainty") -> list[QueryReport]:
    """Quantum query counts next to the classical blind and half-informed figures.

    The quantum side runs the search on the uniform superposition of all
    settings and reports the probability of reading A = B.
    """
    reports = []
    for N in N_list:
        n = _log2_exact(N)
        layout = RegisterLayout(n)
        counter = QueryCounter()
        _, out = run_search(layout, plan_variant(N, variant), counter)
        blind = Strategy("blind")
        # Any setting works for the half-informed figure; take the first.
        half = Strategy("half_info", half_info_subset(n, 0))
        reports.append(
            QueryReport(
                N=N,
                classical_blind_worst=worst_case_queries(N, blind),
                classical_half_worst=worst_case_queries(N, half),
                quantum_queries=counter.oracle_calls,
                quantum_success=solution_probability(out),
                within_bound=counter.oracle_calls <= quantum_query_bound(N),
                classical_blind_mean=mean_queries(N, blind),
                classical_half_mean=mean_queries(N, half),
                variant=variant,
            )
        )
    return reports

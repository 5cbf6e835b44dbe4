import itertools
import math

import pytest

from timesym.classical import (
    ContractViolation,
    Strategy,
    brute_force_worst_case,
    classical_search,
    half_info_subset,
    mean_queries,
    quantum_query_bound,
    verify_rule,
    worst_case_queries,
)

BLIND = Strategy("blind")


def test_blind_n4_worst_order():
    # Ball in the third drawer opened: two misses, the third opening finds it.
    assert classical_search(4, BLIND, 0b11, [0, 1, 2, 3]) == 3
    assert classical_search(4, BLIND, 0b10, [0, 1, 2, 3]) == 3


def test_blind_n4_first_drawer():
    assert classical_search(4, BLIND, 0, [0, 1, 2, 3]) == 1


def test_half_info_one_query():
    s = Strategy("half_info", {0b01, 0b11})
    assert classical_search(4, s, 0b11, [0b01, 0b11]) == 1
    assert classical_search(4, s, 0b01, [0b01, 0b11]) == 1


def test_brute_force_n4():
    assert brute_force_worst_case(4, BLIND) == 3
    assert brute_force_worst_case(4, Strategy("half_info", half_info_subset(2, 1))) == 1


def test_brute_force_n16_half():
    for setting in (0, 6, 13):
        s = Strategy("half_info", half_info_subset(4, setting))
        assert brute_force_worst_case(16, s) == 3


def _oracle_worst(N, cands):
    # Independent count: the k-th opened drawer is found after k openings, the last is free.
    worst = 0
    for order in itertools.permutations(cands):
        for s in cands:
            k = order.index(s) + 1
            worst = max(worst, min(k, len(cands) - 1))
    return worst


@pytest.mark.parametrize("N", [2, 4, 8])
def test_blind_matches_oracle(N):
    assert brute_force_worst_case(N, BLIND) == _oracle_worst(N, list(range(N))) == N - 1


def test_contract_violation_missing_setting():
    s = Strategy("half_info", {0b01, 0b11})
    with pytest.raises(ContractViolation):
        classical_search(4, s, 0b00)


def test_contract_violation_wrong_size():
    with pytest.raises(ContractViolation):
        classical_search(4, Strategy("half_info", {0, 1, 2}), 0)


def test_bad_order():
    with pytest.raises(ValueError):
        classical_search(4, BLIND, 0, [0, 1, 1, 2])


def test_strategy_validation():
    with pytest.raises(ValueError):
        Strategy("psychic")
    with pytest.raises(ValueError):
        Strategy("half_info")
    with pytest.raises(ValueError):
        Strategy("blind", frozenset({0}))


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_half_info_subset(n):
    sub = half_info_subset(n, 5 % (1 << n))
    assert len(sub) == 2 ** (n // 2)
    assert 5 % (1 << n) in sub


def test_half_info_custom_bits():
    assert half_info_subset(2, 0b11, known_bits=(1,)) == {0b01, 0b11}


@pytest.mark.parametrize("N", [4, 16, 64, 256])
def test_worst_case_fixed_order(N):
    n = int(math.log2(N))
    assert worst_case_queries(N, BLIND) == N - 1
    assert worst_case_queries(N, Strategy("half_info", half_info_subset(n, 0))) == math.isqrt(N) - 1


def test_mean_queries_n4():
    # Ascending order: settings 0..3 take 1, 2, 3, 3 openings.
    assert mean_queries(4, BLIND) == pytest.approx(9 / 4)


@pytest.mark.parametrize("N,bound", [(4, 3), (16, 5), (64, 8), (256, 14)])
def test_quantum_query_bound(N, bound):
    assert quantum_query_bound(N) == bound


def test_verify_rule_rows():
    rows = verify_rule([4, 16])
    assert (rows[0].classical_blind_worst, rows[0].classical_half_worst, rows[0].quantum_queries) == (3, 1, 1)
    assert rows[0].quantum_success == pytest.approx(1.0, abs=1e-12)
    assert (rows[1].classical_blind_worst, rows[1].classical_half_worst) == (15, 3)
    assert rows[1].quantum_queries <= 4 and rows[1].within_bound
    assert rows[1].quantum_success >= 1 - 1e-9


def test_verify_rule_standard_not_certain():
    row = verify_rule([16], "standard")[0]
    assert row.variant == "standard"
    assert math.sin(7 * math.asin(0.25)) ** 2 == pytest.approx(row.quantum_success, abs=1e-12)


def test_verify_rule_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        verify_rule([12])

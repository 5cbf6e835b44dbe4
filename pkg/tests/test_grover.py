import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_bits, kets
from timesym.grover import (
    GroverVariant,
    build_diffusion,
    build_oracle,
    build_program,
    certainty_iterations,
    plan_variant,
    run_search,
    solution_probability,
    standard_iterations,
    success_probability,
)
from timesym.program import Gate, QueryCounter, UnitaryProgram, apply_unitary
from timesym.state import (
    RegisterLayout,
    StateVector,
    b_marginal,
    basis_state,
    fidelity,
    make_uniform_state,
    random_state,
)

L2 = RegisterLayout(2)


def dense_oracle(N, marked, phi=math.pi):
    m = np.eye(N, dtype=complex)
    m[marked, marked] = np.exp(1j * phi)
    return m


def dense_diffusion(N, phi=math.pi):
    s = np.full((N, 1), 1 / math.sqrt(N))
    return -(np.eye(N) + (np.exp(1j * phi) - 1) * (s @ s.T))


def dense_success(N, iterations, phi=math.pi):
    psi = np.full(N, 1 / math.sqrt(N), dtype=complex)
    step = dense_diffusion(N, phi) @ dense_oracle(N, 0, phi)
    for _ in range(iterations):
        psi = step @ psi
    return abs(psi[0]) ** 2


def test_oracle_matches_explicit_matrix():
    # One B row at a time: row b flips the sign of |b>_A only.
    layout = L2
    s = random_state(layout, np.random.default_rng(1))
    out = apply_unitary(s, UnitaryProgram(layout, (build_oracle(layout),))).matrix()
    for b in range(4):
        np.testing.assert_allclose(out[b], dense_oracle(4, b) @ s.matrix()[b], atol=1e-14)


def test_oracle_n2_example():
    oracle = np.diag([1, -1, 1, 1])
    s = make_uniform_state(L2)
    out = apply_unitary(s, UnitaryProgram(L2, (build_oracle(L2),))).matrix()
    np.testing.assert_allclose(out[1], oracle @ s.matrix()[1], atol=1e-15)
    np.testing.assert_allclose(out[1], [0.25, -0.25, 0.25, 0.25], atol=1e-15)


def test_diffusion_matches_explicit_matrix():
    s = random_state(L2, np.random.default_rng(2))
    out = apply_unitary(s, UnitaryProgram(L2, (build_diffusion(L2),))).matrix()
    d = 2 * np.full((4, 4), 0.25) - np.eye(4)
    np.testing.assert_allclose(out, s.matrix() @ d.T, atol=1e-14)


@pytest.mark.parametrize("phi", [0.3, 1.1, 2.5, math.pi])
def test_phase_gates_match_explicit_matrices(phi):
    s = random_state(L2, np.random.default_rng(3))
    prog = UnitaryProgram(L2, (Gate("phase_oracle", phi), Gate("phase_diffusion", phi)))
    out = apply_unitary(s, prog).matrix()
    for b in range(4):
        expected = dense_diffusion(4, phi) @ dense_oracle(4, b, phi) @ s.matrix()[b]
        np.testing.assert_allclose(out[b], expected, atol=1e-13)


def test_phase_pi_is_plain_gate():
    s = random_state(L2, np.random.default_rng(4))
    a = apply_unitary(s, UnitaryProgram(L2, (Gate("phase_oracle", math.pi), Gate("phase_diffusion", math.pi))))
    b = apply_unitary(s, UnitaryProgram(L2, (Gate("oracle"), Gate("diffusion"))))
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-15)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("hadamard")
    with pytest.raises(ValueError):
        Gate("phase_oracle")


@pytest.mark.parametrize("N,expected", [(4, 1), (16, 3), (64, 6), (256, 13)])
def test_standard_iterations(N, expected):
    assert standard_iterations(N) == expected


@pytest.mark.parametrize("N,expected", [(4, 1), (16, 3), (64, 6), (256, 13)])
def test_certainty_iterations(N, expected):
    assert certainty_iterations(N) == expected


@pytest.mark.parametrize("N", [4, 16, 64, 256])
def test_certainty_reachability_minimal(N):
    # Independent angle check: fewest K with (2K+1) beta >= pi/2.
    beta = math.asin(1 / math.sqrt(N))
    k = next(k for k in range(1, 100) if (2 * k + 1) * beta >= math.pi / 2 - 1e-12)
    assert certainty_iterations(N) == k


@pytest.mark.parametrize("N", [0, 1, 3, 12, 100])
def test_non_power_of_two(N):
    with pytest.raises(ValueError):
        plan_variant(N, "standard")


def test_unknown_variant():
    with pytest.raises(ValueError):
        plan_variant(4, "quick")
    with pytest.raises(ValueError):
        GroverVariant("certainty", 2)


def test_n4_standard_success_closed_form():
    theta = math.asin(1 / 4)
    expected = math.sin(7 * theta) ** 2
    assert expected == pytest.approx(0.9613, abs=1e-4)
    assert success_probability(16, plan_variant(16, "standard")) == pytest.approx(expected, abs=1e-12)
    assert dense_success(16, 3) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("N", [4, 16, 64])
def test_standard_success_matches_dense(N):
    v = plan_variant(N, "standard")
    assert success_probability(N, v) == pytest.approx(dense_success(N, v.iterations), abs=1e-12)


def _golden_max(f, lo, hi, tol=1e-12):
    g = (math.sqrt(5) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    while hi - lo > tol:
        if f(c) > f(d):
            hi, d = d, c
            c = hi - g * (hi - lo)
        else:
            lo, c = c, d
            d = lo + g * (hi - lo)
    return (lo + hi) / 2


def test_n4_certainty_against_dense_phase_scan():
    N, k = 16, 3
    grid = np.linspace(0.01, math.pi, 2000)
    values = [dense_success(N, k, phi) for phi in grid]
    i = int(np.argmax(values))
    phi = _golden_max(lambda x: dense_success(N, k, x), grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)])
    assert dense_success(N, k, phi) >= 1 - 1e-9
    v = plan_variant(N, "certainty")
    assert v.iterations == k
    assert dense_success(N, k, v.phase) >= 1 - 1e-9
    assert success_probability(N, v) == pytest.approx(dense_success(N, k, v.phase), abs=1e-12)


def test_n2_certainty_is_plain_grover():
    v = plan_variant(4, "certainty")
    assert v.iterations == 1
    assert v.phase == pytest.approx(math.pi, abs=1e-12)


@pytest.mark.parametrize("N", [4, 16, 64, 256])
def test_certainty_success(N):
    assert success_probability(N, plan_variant(N, "certainty")) >= 1 - 1e-9


def test_run_search_n2_uniform():
    counter = QueryCounter()
    program, out = run_search(L2, counter=counter)
    assert counter.oracle_calls == 1 == program.oracle_count
    expected = kets(L2, [(b, b) for b in all_bits(2)])
    assert fidelity(out, expected) >= 1 - 1e-12


def test_run_search_n2_selected():
    start = kets(L2, [("10", a) for a in all_bits(2)])
    _, out = run_search(L2, initial=start)
    assert fidelity(out, basis_state(L2, 0b10, 0b10)) >= 1 - 1e-12


def test_counter_resets():
    counter = QueryCounter(oracle_calls=99)
    run_search(RegisterLayout(4), counter=counter)
    assert counter.oracle_calls == 3


def test_solution_probability():
    assert solution_probability(make_uniform_state(L2)) == pytest.approx(0.25)
    assert solution_probability(basis_state(L2, 3, 3)) == pytest.approx(1.0)


@pytest.mark.parametrize("N", [4, 16, 64, 256])
def test_query_bound(N):
    q = plan_variant(N, "certainty").iterations
    assert q <= math.ceil(math.pi / 4 * math.sqrt(N)) + 1
    assert 0.25 <= q / math.sqrt(N) <= 1.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
def test_linearity(seed, n):
    r = np.random.default_rng(seed)
    layout = RegisterLayout(n)
    u = build_program(layout)
    s, t = random_state(layout, r), random_state(layout, r)
    a, b = complex(*r.normal(size=2)), complex(*r.normal(size=2))
    mix = a * s.amplitudes + b * t.amplitudes
    lhs = apply_unitary(StateVector(layout, mix, normalize=True), u).amplitudes
    rhs = a * apply_unitary(s, u).amplitudes + b * apply_unitary(t, u).amplitudes
    np.testing.assert_allclose(lhs, rhs / np.linalg.norm(mix), atol=1e-12)


@pytest.mark.parametrize("n", [2, 4])
def test_branches_reach_solution_uniformly(n):
    layout = RegisterLayout(n)
    u = build_program(layout)
    for b in range(layout.N):
        row = np.zeros((layout.N, layout.N), dtype=complex)
        row[b] = 1 / math.sqrt(layout.N)
        out = apply_unitary(StateVector(layout, row.ravel()), u).matrix()
        assert abs(out[b, b]) ** 2 >= 1 - 1e-9


@pytest.mark.parametrize("n", [2, 4])
def test_b_marginal_invariant(n):
    layout = RegisterLayout(n)
    s = random_state(layout, np.random.default_rng(n))
    before = b_marginal(s)
    for g in build_program(layout).steps:
        s = apply_unitary(s, UnitaryProgram(layout, (g,)))
        np.testing.assert_allclose(b_marginal(s), before, atol=1e-10)

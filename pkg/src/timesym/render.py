"""Plain-text rendering of states, traces and reports.

Kets are written without normalization and up to a global phase, so the
uniform state of one register reads ``(|00>_B + |01>_B + |10>_B + |11>_B)``.
Unequal or complex relative coefficients are printed explicitly.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .pipelines import Sharing, Trace, forward_reading
from .state import StateVector, to_bits

KET_TOL = 1e-9
FWD = "=> U12 =>"
BWD = "<= U12^dag <="
DOWN = ("||", "\\/")


def _coeff(c: complex) -> str:
    if abs(c.imag) < KET_TOL:
        return f"{c.real:.6g}"
    if abs(c.real) < KET_TOL:
        return f"{c.imag:.6g}i"
    return f"({c.real:.6g}{c.imag:+.6g}i)"


def _terms(coeffs: Sequence[complex], labels: Sequence[str]) -> list[str]:
    coeffs = np.asarray(coeffs, dtype=complex)
    keep = np.nonzero(np.abs(coeffs) > KET_TOL * np.max(np.abs(coeffs)))[0]
    ref = coeffs[keep[0]]
    rel = coeffs[keep] / ref
    plain = np.allclose(rel, 1.0, atol=1e-9)
    out = []
    for i, r in zip(keep, rel):
        out.append(labels[i] if plain else f"{_coeff(r)}{labels[i]}")
    return out


def _join(terms: list[str], group: bool) -> str:
    body = " + ".join(terms)
    return f"({body})" if group and len(terms) > 1 else body


def format_register(vector, n: int, register: str) -> str:
    labels = [f"|{to_bits(v, n)}>_{register}" for v in range(1 << n)]
    return _join(_terms(vector, labels), group=True)


def format_state(state: StateVector) -> str:
    """Ket expression for ``state``, factorized when it is a product state."""
    n = state.layout.n_bits
    m = state.matrix()
    u, s, vh = np.linalg.svd(m)
    if s.size < 2 or s[1] < KET_TOL * s[0]:
        return format_register(u[:, 0], n, "B") + format_register(vh[0, :], n, "A")
    N = state.layout.N
    labels = [f"|{to_bits(b, n)}>_B|{to_bits(a, n)}>_A" for b in range(N) for a in range(N)]
    return _join(_terms(state.amplitudes, labels), group=False)


def format_table(title: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    cols = [header, *rows]
    widths = [max(len(r[i]) for r in cols) for i in range(3)]
    lines = [title, "  ".join(h.center(w) for h, w in zip(header, widths)).rstrip(), ""]
    for r in rows:
        lines.append("  ".join(c.center(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def _bit_name(register: str, bits: Sequence[int], n: int) -> str:
    if n == 2 and len(bits) == 1:
        return f"{register}_{'l' if bits[0] == 0 else 'r'}"
    if len(bits) == n:
        return register
    return f"{register}[{','.join(map(str, bits))}]"


def _down(column: int) -> list[list[str]]:
    rows = []
    for glyph in DOWN:
        r = ["", "", ""]
        r[column] = glyph
        rows.append(r)
    return rows


def table_ordinary(trace: Trace) -> str:
    f = format_state
    rows = [[f(trace.state("t1_premeasure")), "", ""], *_down(0),
            [f(trace.state("t1_selected")), FWD, f(trace.state("forward_evolved"))]]
    return format_table("Table I: ordinary description",
                        ["time t1, meas. of B", "t1 -> t2", "time t2, meas. of A"], rows)


def table_relativized(trace: Trace) -> str:
    f = format_state
    rows = [[f(trace.state("t1_premeasure")), FWD, f(trace.state("forward_evolved"))], *_down(2),
            ["", "", f(trace.state("t2_selected"))]]
    return format_table("Table II: relativized to the problem-solver",
                        ["time t1, meas. of B", "t1 -> t2", "time t2, meas. of A"], rows)


def _sym_header(sharing: Sharing) -> list[str]:
    n = sharing.n_bits
    return [f"time t1, meas. of {_bit_name('B', sharing.initial_bits, n)}", "t1 <-> t2",
            f"time t2, meas. of {_bit_name('A', sharing.final_bits, n)}"]


def table_timesym(trace: Trace, sharing: Sharing) -> str:
    f = format_state
    rows = [[f(trace.state("t1_premeasure")), "", ""], *_down(0),
            [f(trace.state("t1_selected")), FWD, f(trace.state("forward_evolved"))], *_down(2),
            [f(trace.state("backward_evolved")), BWD, f(trace.state("t2_selected"))]]
    return format_table("Table III: time-symmetrization instance", _sym_header(sharing), rows)


def table_loop(trace: Trace, sharing: Sharing) -> str:
    f = format_state
    rows = [[f(trace.state("t1_premeasure")), FWD, f(trace.state("forward_evolved"))], *_down(2),
            [f(trace.state("backward_evolved")), BWD, f(trace.state("t2_selected"))]]
    return format_table("Table IV: causal loop relativized to the problem-solver", _sym_header(sharing), rows)


def table_forward_reading(loop: Trace) -> str:
    reading = forward_reading(loop)
    rows = [[format_state(reading.state("t1_selected")), FWD, format_state(reading.final)]]
    return format_table("Table V: bottom line of Table IV read forward",
                        ["time t1", "t1 -> t2", "time t2"], rows)


def format_trace(trace: Trace, unitary: str = "U12") -> str:
    """One line per event, in trace order."""
    n = trace.layout.n_bits
    lines = [f"trace {trace.kind}"]
    for e in trace.events:
        if e.is_state:
            lines.append(f"  {e.label:<17} {format_state(e.payload)}")
        elif e.label == "measure":
            spec = e.payload
            out = "".join(map(str, spec.outcome))
            lines.append(f"    measure {_bit_name(spec.register, spec.bits, n)} = {out}  (p = {e.probability:.6g})")
        else:
            glyph = f"=> {unitary} =>" if e.direction == "forward" else f"<= {unitary}^dag <="
            lines.append(f"    {glyph}  (oracle queries: {e.payload.oracle_count})")
    return "\n".join(lines)


def format_query_table(reports) -> str:
    header = ["N", "blind", "half-info", "quantum", "success"]
    body = [[str(r.N), str(r.classical_blind_worst), str(r.classical_half_worst),
             str(r.quantum_queries), str(round(r.quantum_success, 12))] for r in reports]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(lines)


def format_sweep(report) -> str:
    lines = [f"sweep n={report.n_bits} setting={report.setting}"]
    width = max(len(r.sharing) for r in report.rows)
    for r in report.rows:
        mark = "ok" if r.passed else "FAIL"
        lines.append(f"  {r.sharing:<{width}}  fidelity {r.fidelity:.12f}  {mark}  loop support {{{', '.join(r.loop_support)}}}")
    lines.append(
        f"  {report.pass_count}/{len(report.rows)} agree, min fidelity {report.min_fidelity:.12f}, "
        f"support intersection {{{', '.join(report.support_intersection)}}}, "
        f"backward legs identical: {report.backward_legs_identical}"
    )
    return "\n".join(lines)


def format_identities(report) -> str:
    lines = [f"identities n={report.n_bits} setting={report.setting} sharing={report.sharing}"]
    for c in report.checks:
        lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}  fidelity {c.fidelity:.12f}")
    return "\n".join(lines)

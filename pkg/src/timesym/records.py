"""Line-delimited JSON records for traces and reports.

A trace becomes one record per event. State events carry a sparse
amplitude list of ``[bits_B, bits_A, re, im]`` entries; exact zeros are
omitted, everything else is kept so parsing gives back the same state.
Reports become one record per row followed by a summary record.
"""
from __future__ import annotations

import json
from dataclasses import asdict
from typing import Iterable

import numpy as np

from .classical import QueryReport
from .pipelines import IdentityCheck, IdentityReport, Trace, TraceEvent
from .program import Gate, UnitaryProgram
from .sharings import SweepReport, SweepRow
from .state import MeasurementSpec, RegisterLayout, StateVector, parse_bits, to_bits


def state_amplitudes(state: StateVector) -> list[list]:
    n = state.layout.n_bits
    m = state.matrix()
    bs, as_ = np.nonzero(m)
    return [[to_bits(int(b), n), to_bits(int(a), n), float(m[b, a].real), float(m[b, a].imag)]
            for b, a in zip(bs, as_)]


def state_from_amplitudes(layout: RegisterLayout, entries) -> StateVector:
    amps = np.zeros(layout.dim, dtype=np.complex128)
    for b, a, re, im in entries:
        amps[layout.index(parse_bits(b, layout.n_bits), parse_bits(a, layout.n_bits))] = complex(re, im)
    return StateVector(layout, amps)


def trace_to_records(trace: Trace) -> list[dict]:
    n = trace.layout.n_bits
    out = []
    for i, e in enumerate(trace.events):
        rec = {"record": "trace_event", "trace": trace.kind, "n_bits": n, "index": i,
               "label": e.label, "direction": e.direction}
        if e.is_state:
            rec["amplitudes"] = state_amplitudes(e.payload)
        elif e.label == "measure":
            spec = e.payload
            rec["operation"] = {"type": "measure", "register": spec.register, "bits": list(spec.bits),
                                "outcome": list(spec.outcome), "probability": e.probability}
        else:
            rec["operation"] = {"type": "evolve", "steps": [[g.kind, g.phase] for g in e.payload.steps]}
        out.append(rec)
    return out


def trace_from_records(records: Iterable[dict]) -> Trace:
    records = sorted(records, key=lambda r: r["index"])
    layout = RegisterLayout(records[0]["n_bits"])
    events = []
    for r in records:
        if "amplitudes" in r:
            payload = state_from_amplitudes(layout, r["amplitudes"])
            events.append(TraceEvent(r["label"], payload, r["direction"]))
            continue
        op = r["operation"]
        if op["type"] == "measure":
            spec = MeasurementSpec(op["register"], tuple(op["bits"]), tuple(op["outcome"]))
            events.append(TraceEvent("measure", spec, r["direction"], op["probability"]))
        else:
            program = UnitaryProgram(layout, tuple(Gate(k, p) for k, p in op["steps"]))
            events.append(TraceEvent("evolve", program, r["direction"]))
    return Trace(records[0]["trace"], events)


def report_to_records(report) -> list[dict]:
    if isinstance(report, QueryReport):
        return [{"record": "query_report", **asdict(report)}]
    if isinstance(report, SweepReport):
        rows = [{"record": "sweep_row", "n_bits": report.n_bits, "setting": report.setting,
                 "sharing": r.sharing, "fidelity": r.fidelity, "loop_support": list(r.loop_support),
                 "passed": r.passed} for r in report.rows]
        summary = {"record": "sweep_summary", "n_bits": report.n_bits, "setting": report.setting,
                   "pass_count": report.pass_count, "total": len(report.rows),
                   "min_fidelity": report.min_fidelity,
                   "support_intersection": list(report.support_intersection),
                   "backward_legs_identical": report.backward_legs_identical,
                   "tolerance": report.tolerance, "passed": report.passed}
        return rows + [summary]
    if isinstance(report, IdentityReport):
        rows = [{"record": "identity_check", "n_bits": report.n_bits, "setting": report.setting,
                 "sharing": report.sharing, "name": c.name, "fidelity": c.fidelity, "passed": c.passed}
                for c in report.checks]
        summary = {"record": "identity_summary", "n_bits": report.n_bits, "setting": report.setting,
                   "sharing": report.sharing, "tolerance": report.tolerance, "passed": report.passed,
                   "pass_count": sum(c.passed for c in report.checks), "total": len(report.checks)}
        return rows + [summary]
    raise TypeError(f"cannot serialize {type(report).__name__}")


def reports_from_records(records: Iterable[dict]) -> list:
    """Rebuild reports from a record stream (inverse of ``report_to_records``)."""
    out = []
    rows: list = []
    for r in records:
        kind = r["record"]
        if kind == "query_report":
            fields = {k: v for k, v in r.items() if k != "record"}
            out.append(QueryReport(**fields))
        elif kind == "sweep_row":
            rows.append(SweepRow(r["sharing"], r["fidelity"], tuple(r["loop_support"]), r["passed"]))
        elif kind == "sweep_summary":
            out.append(SweepReport(r["n_bits"], r["setting"], tuple(rows), tuple(r["support_intersection"]),
                                   r["backward_legs_identical"], r["tolerance"]))
            rows = []
        elif kind == "identity_check":
            rows.append(IdentityCheck(r["name"], r["fidelity"], r["passed"]))
        elif kind == "identity_summary":
            out.append(IdentityReport(r["n_bits"], r["setting"], r["sharing"], tuple(rows), r["tolerance"]))
            rows = []
        else:
            raise ValueError(f"not a report record: {kind!r}")
    return out


def dumps(records: Iterable[dict]) -> str:
    return "\n".join(json.dumps(r, sort_keys=True) for r in records)


def loads(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]

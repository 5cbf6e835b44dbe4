"""Two-register state-vector simulation of Grover search under ordinary,
relativized and time-symmetrized descriptions."""
from .state import (
    ImpossibleOutcomeError,
    InvalidLayoutError,
    LayoutMismatchError,
    MeasurementSpec,
    RegisterLayout,
    StateVector,
    basis_state,
    fidelity,
    make_uniform_state,
    project,
    sample_measure,
)
from .program import Gate, QueryCounter, UnitaryProgram, apply_unitary
from .grover import GroverVariant, build_diffusion, build_oracle, build_program, plan_variant, run_search
from .pipelines import (
    Sharing,
    Trace,
    TraceEvent,
    check_trace_identities,
    forward_reading,
    run_ordinary,
    run_relativized,
    run_relativized_loop,
    run_timesym_instance,
)
from .sharings import SharingFamily, enumerate_sharings, reduction_factor, sweep_instances
from .classical import QueryReport, Strategy, classical_search, verify_rule
from .epr import EprScenario, run_epr

__version__ = "0.1.0"

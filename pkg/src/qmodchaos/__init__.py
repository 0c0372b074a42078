"""Quasi-chaotic oscillators from reversible modular quantum circuits."""
from .qarith import (
    GateStats,
    QmodLayout,
    build_qadd,
    build_qleft,
    build_qmod_section,
    build_qmul,
    build_unrolled,
    qubit_count,
    stats,
)
from .qsim import Circuit, Gate, NoiseModel, QuantumState, apply, inverse, measure_all, prepare_basis, prepare_uniform, read_register, to_qasm
from .ring import (
    FilterConfig,
    Modulus,
    SignedRange,
    TimeSeries,
    autocorrelation,
    decode,
    detect_period,
    encode,
    from_signed,
    mod_add,
    mod_mul,
    to_signed,
    zero_input_response,
)

__version__ = "0.1.0"

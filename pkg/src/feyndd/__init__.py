"""Exact quantum circuit analysis with modular-terminal decision diagrams.

Circuits over power-form gate sets compile to sum-of-powers tensors; the
exponent polynomial becomes a multi-terminal decision diagram, and amplitudes,
probabilities, samples and equivalence verdicts reduce to exact terminal
counting.
"""
from .circuit import (
    Circuit,
    Gate,
    GateSetConfig,
    GateSpec,
    adjoint,
    builtin_gateset,
    generate_bv,
    generate_ghz,
    generate_linear_network,
    load_gateset,
    parse_circuit,
    serialize_circuit,
)
from .engine import (
    EquivVerdict,
    SimOptions,
    accept_probability,
    amplitude,
    check_equivalence,
    joint_probability,
    mutate_missing,
    mutate_reverse,
    sample,
)
from .exactnum import CyclotomicValue
from .mtbdd import DdStore
from .sop import SopTensor, circuit_to_sop

__version__ = "0.1.0"

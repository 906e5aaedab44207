"""Independent brute-force references: dense statevector simulation and
direct path-sum enumeration.

Gate matrices are reconstructed from the gate-set description (exactly, then
rendered to floats), so the oracle doubles as a validator for shipped and
user-supplied configs.  ``pathsum_eval`` enumerates assignments directly and
never touches the decision-diagram machinery.

Qubit 0 is the least significant bit of a basis index; a bitstring's leftmost
character belongs to qubit 0.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, GateSetConfig, GateSpec
from .exactnum import CyclotomicValue, from_counts, to_complex
from .sop import SopTensor

__all__ = [
    "gate_matrix_exact",
    "gate_matrix",
    "sv_state",
    "sv_amplitude",
    "sv_unitary",
    "sv_unitary_trace",
    "pathsum_eval",
]

_MAX_SV_QUBITS = 24
_MAX_UNITARY_QUBITS = 12
_MAX_PATHSUM_VARS = 20


def _simple_matrix_exact(spec: GateSpec) -> list[list[CyclotomicValue]]:
    r = spec.modulus
    k = spec.arity
    dim = 1 << k
    wired = spec.wiring()
    zero = CyclotomicValue.zero(r)
    rows = [[zero for _ in range(dim)] for _ in range(dim)]
    for col in range(dim):
        in_bits = [(col >> i) & 1 for i in range(k)]
        free = list(spec.fresh_output_qubits)
        for fill in range(1 << len(free)):
            out_bits = [0] * k
            for p in range(k):
                if p in wired:
                    out_bits[p] = in_bits[wired[p]]
            for idx, p in enumerate(free):
                out_bits[p] = (fill >> idx) & 1
            counts = [0] * r
            for y_fill in range(1 << spec.internal_count):
                e = 0
                for coeff, slots in spec.monomials:
                    prod = 1
                    for kind, pos in slots:
                        if kind == "in":
                            prod &= in_bits[pos]
                        elif kind == "out":
                            prod &= out_bits[pos]
                        else:
                            prod &= (y_fill >> pos) & 1
                        if not prod:
                            break
                    if prod:
                        e += coeff
                counts[e % r] += 1
            row = sum(b << p for p, b in enumerate(out_bits))
            rows[row][col] = from_counts(counts, spec.sqrt2_exponent, modulus=r)
    return rows


def _matmul_exact(a, b, r: int):
    n = len(a)
    zero = CyclotomicValue.zero(r)
    out = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = zero
            for k in range(n):
                acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def _lift_exact(mat, slots: Sequence[int], arity: int, r: int):
    """Embed a small exact matrix onto the given slot positions of a k-qubit gate."""
    dim = 1 << arity
    sub = len(slots)
    zero = CyclotomicValue.zero(r)
    out = [[zero for _ in range(dim)] for _ in range(dim)]
    for col in range(dim):
        in_sub = sum(((col >> slots[i]) & 1) << i for i in range(sub))
        for row_sub in range(1 << sub):
            row = col
            for i in range(sub):
                bit = (row_sub >> i) & 1
                row = (row & ~(1 << slots[i])) | (bit << slots[i])
            entry = mat[row_sub][in_sub]
            if not entry.is_zero():
                out[row][col] = out[row][col] + entry
    return out


def gate_matrix_exact(spec: GateSpec, gateset: GateSetConfig):
    """The gate's matrix with exact cyclotomic entries (column = input index)."""
    if spec.kind == "simple":
        return _simple_matrix_exact(spec)
    r = gateset.common_modulus
    dim = 1 << spec.arity
    zero = CyclotomicValue.zero(r)
    one = CyclotomicValue.integer(1, r)
    acc = [[one if i == j else zero for j in range(dim)] for i in range(dim)]
    for name, slots in spec.expansion:
        sub = _simple_matrix_exact(gateset.gates[name])
        acc = _matmul_exact(_lift_exact(sub, slots, spec.arity, r), acc, r)
    return acc


def gate_matrix(spec: GateSpec, gateset: GateSetConfig) -> np.ndarray:
    exact = gate_matrix_exact(spec, gateset)
    dim = len(exact)
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            if not exact[i][j].is_zero():
                out[i, j] = to_complex(exact[i][j], 60)
    return out


def _apply_gate(state: np.ndarray, mat: np.ndarray, qubits: Sequence[int],
                n: int) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the given qubits of a state (or state batch)."""
    k = len(qubits)
    batch = state.shape[1:] if state.ndim > 1 else ()
    tensor = state.reshape([2] * n + list(batch) if batch else [2] * n)
    # axis for qubit q is n-1-q (qubit 0 is the least significant bit)
    axes = [n - 1 - q for q in qubits]
    moved = np.moveaxis(tensor, axes, range(k))
    rest = moved.shape[k:]
    flat = moved.reshape(1 << k, -1)
    # matrix index bit i corresponds to qubits[i]; undo numpy's big-endian axes
    perm = [0] * (1 << k)
    for idx in range(1 << k):
        j = 0
        for i in range(k):
            if (idx >> i) & 1:
                j |= 1 << (k - 1 - i)
        perm[j] = idx
    flat = mat[np.ix_(perm, perm)] @ flat
    moved = flat.reshape((2,) * k + rest)
    tensor = np.moveaxis(moved, range(k), axes)
    return tensor.reshape(state.shape)


def sv_state(circuit: Circuit, gateset: GateSetConfig) -> np.ndarray:
    """Dense simulation of the circuit on the all-zeros initial state."""
    n = circuit.num_qubits
    if n > _MAX_SV_QUBITS:
        raise ValueError(f"statevector oracle limited to {_MAX_SV_QUBITS} qubits")
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    for gate in circuit.gates:
        mat = gate_matrix(gateset.spec(gate.name), gateset)
        state = _apply_gate(state, mat, gate.qubits, n)
    norm = np.linalg.norm(state)
    assert abs(norm - 1.0) < 1e-10, "statevector norm drifted"
    return state


def sv_amplitude(circuit: Circuit, bits: Sequence[int] | str,
                 gateset: GateSetConfig) -> complex:
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    if len(bits) != circuit.num_qubits:
        raise ValueError("bitstring length must equal the qubit count")
    state = sv_state(circuit, gateset)
    index = sum(int(b) << q for q, b in enumerate(bits))
    return complex(state[index])


def sv_unitary(circuit: Circuit, gateset: GateSetConfig) -> np.ndarray:
    n = circuit.num_qubits
    if n > _MAX_UNITARY_QUBITS:
        raise ValueError(f"unitary oracle limited to {_MAX_UNITARY_QUBITS} qubits")
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for gate in circuit.gates:
        mat = gate_matrix(gateset.spec(gate.name), gateset)
        u = _apply_gate(u, mat, gate.qubits, n)
    return u


def sv_unitary_trace(circuit: Circuit, gateset: GateSetConfig) -> complex:
    return complex(np.trace(sv_unitary(circuit, gateset)))


def pathsum_eval(tensor: SopTensor, bindings: Mapping[int, int] | None = None
                 ) -> CyclotomicValue:
    """Enumerate all assignments of the tensor's free variables and sum omega^f.

    Vectorized enumeration over bit masks; exact by construction (counts are
    plain integers, exponents stay below the modulus).
    """
    r = tensor.modulus
    if tensor.zero_flag:
        return CyclotomicValue.zero(r)
    fixed = dict(tensor.bound)
    if bindings:
        for var, value in bindings.items():
            if fixed.get(var, value) != value:
                return CyclotomicValue.zero(r)
            fixed[var] = int(value)
    free = sorted(tensor.free_vars() - set(fixed))
    if len(free) > _MAX_PATHSUM_VARS:
        raise ValueError(f"path-sum enumeration limited to {_MAX_PATHSUM_VARS} variables")
    pos = {v: i for i, v in enumerate(free)}
    total = 1 << len(free)
    exponents = np.zeros(total, dtype=np.int64)
    index = np.arange(total, dtype=np.int64)
    for coeff, vars_ in tensor.poly.terms:
        mask = 0
        live = True
        for v in vars_:
            if v in pos:
                mask |= 1 << pos[v]
            elif not fixed[v]:
                live = False
                break
        if not live:
            continue
        if mask:
            exponents[(index & mask) == mask] += coeff
        else:
            exponents += coeff
    counts_np = np.bincount(exponents % r, minlength=r)
    counts = [int(c) for c in counts_np]
    return from_counts(counts, tensor.sqrt2_exponent, phase=tensor.phase, modulus=r)

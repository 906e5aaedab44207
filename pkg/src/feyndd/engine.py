"""Task drivers: amplitude, probabilities, sampling, equivalence checking.

Each task owns one diagram store (stores are single-threaded); distinct tasks
can run in parallel.  The pipeline is always
circuit -> tensor -> polynomial-level simplification -> diagram -> counting,
with floating point confined to the final rendering of probabilities.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import mtbdd, sop
from .circuit import Circuit, Gate, GateSetConfig, adjoint, adjoint_extension
from .exactnum import CyclotomicValue, equals_integer, from_counts, probability
from .mtbdd import DEFAULT_GC_WATERMARK, DdStore

__all__ = [
    "SimOptions",
    "TaskStats",
    "EquivVerdict",
    "amplitude",
    "accept_probability",
    "joint_probability",
    "sample",
    "check_equivalence",
    "mutate_missing",
    "mutate_reverse",
]


def _default_watermark() -> int:
    env = os.environ.get("FEYNDD_GC_WATERMARK")
    return int(env) if env else DEFAULT_GC_WATERMARK


@dataclass(frozen=True)
class SimOptions:
    order_strategy: str | Sequence[int] = "qubit"  # "qubit" | "gate" | explicit list
    sifting: bool = False
    simplify: bool = True
    seed: int = 0
    gc_watermark: int = field(default_factory=_default_watermark)


@dataclass
class TaskStats:
    dd_nodes: int = 0
    peak_nodes: int = 0
    order: tuple[int, ...] = ()


@dataclass(frozen=True)
class EquivVerdict:
    equivalent: bool
    trace_value: CyclotomicValue  # trace normalized by 2^n
    phase_index: int | None = None


def _choose_order(tensor: sop.SopTensor, opts: SimOptions) -> tuple[int, ...]:
    if not isinstance(opts.order_strategy, str):
        return mtbdd.explicit_order(tensor, list(opts.order_strategy))
    if opts.order_strategy == "qubit":
        return mtbdd.qubit_order(tensor)
    if opts.order_strategy == "gate":
        return mtbdd.gate_order(tensor)
    raise ValueError(f"unknown order strategy {opts.order_strategy!r}")


def _count_value(tensor: sop.SopTensor, opts: SimOptions,
                 stats: TaskStats) -> CyclotomicValue:
    """Build the diagram for a fully-substituted tensor and count terminals."""
    r = tensor.modulus
    if tensor.zero_flag:
        return CyclotomicValue.zero(r)
    order = _choose_order(tensor, opts)
    if opts.sifting and order:
        order = mtbdd.sift(tensor.poly, order, opts.gc_watermark)
    store = DdStore(r, order, opts.gc_watermark)
    root = store.build(tensor.poly)
    stats.dd_nodes = store.size(root)
    stats.peak_nodes = store.peak_nodes
    stats.order = order
    counts = store.count_terminals(root, tensor.free_vars())
    return from_counts(counts, tensor.sqrt2_exponent, phase=tensor.phase, modulus=r)


def amplitude(circuit: Circuit, gateset: GateSetConfig, bits: Sequence[int] | str,
              opts: SimOptions = SimOptions()) -> tuple[CyclotomicValue, TaskStats]:
    """Exact amplitude of reading ``bits`` after running the circuit on zeros."""
    stats = TaskStats()
    tensor = sop.circuit_to_sop(circuit, gateset)
    tensor = sop.amplitude_tensor(tensor, bits)
    if opts.simplify:
        tensor = sop.simplify_pairs(tensor)
    value = _count_value(tensor, opts, stats)
    return value.normalized(), stats


# ---------------------------------------------------------------------------
# probabilities and sampling


class _ProbeContext:
    """Holds the probability diagram for one circuit; answers prefix queries.

    The diagram for the difference polynomial is built once; each query
    restricts the measured qubits' output variables and counts terminals.
    """

    def __init__(self, circuit: Circuit, gateset: GateSetConfig, opts: SimOptions):
        self.opts = opts
        tensor = sop.circuit_to_sop(circuit, gateset)
        tensor = sop.substitute(
            tensor, {v: 0 for v in tensor.input_vars if v not in tensor.bound})
        if opts.simplify:
            tensor = sop.simplify_pairs(tensor)
        tensor = sop.difference_tensor(tensor)
        if opts.simplify:
            tensor = sop.simplify_pairs(tensor)
        self.tensor = tensor
        self.stats = TaskStats()
        order = _choose_order(tensor, opts)
        if opts.sifting and order:
            order = mtbdd.sift(tensor.poly, order, opts.gc_watermark)
        self.store = DdStore(tensor.modulus, order, opts.gc_watermark)
        self.root = self.store.protect(self.store.build(tensor.poly))
        self.stats.dd_nodes = self.store.size(self.root.id)
        self.stats.order = order
        self._value_cache: dict[tuple, CyclotomicValue] = {}

    def exact_probability(self, assignments: Mapping[int, int]) -> CyclotomicValue:
        tensor = self.tensor
        r = tensor.modulus
        wanted: dict[int, int] = {}
        for qubit, bit in assignments.items():
            if not 0 <= qubit < tensor.num_qubits:
                raise ValueError(f"qubit {qubit} out of range")
            var = tensor.output_vars[qubit]
            bit = int(bit)
            if var in tensor.bound:
                if tensor.bound[var] != bit:
                    return CyclotomicValue.zero(r)
                continue
            if wanted.get(var, bit) != bit:
                return CyclotomicValue.zero(r)
            wanted[var] = bit
        if tensor.zero_flag:
            # measuring a circuit is still normalized even if a prior
            # substitution annihilated the tensor; this cannot happen for
            # the contexts the engine builds
            return CyclotomicValue.zero(r)
        key = tuple(sorted(wanted.items()))
        hit = self._value_cache.get(key)
        if hit is not None:
            return hit
        node = self.root.id
        for var, bit in key:
            node = self.store.restrict(node, var, bit)
        over = self.tensor.free_vars() - set(wanted)
        counts = self.store.count_terminals(node, over)
        value = from_counts(counts, tensor.sqrt2_exponent, phase=tensor.phase,
                            modulus=r)
        self.stats.peak_nodes = self.store.peak_nodes
        self._value_cache[key] = value
        return value

    def probability(self, assignments: Mapping[int, int]) -> float:
        return probability(self.exact_probability(assignments))


def joint_probability(circuit: Circuit, gateset: GateSetConfig,
                      assignments: Mapping[int, int] | Sequence[int],
                      opts: SimOptions = SimOptions()) -> tuple[float, TaskStats]:
    """Probability that the listed qubits read the given bits.

    ``assignments`` is a qubit->bit mapping, or a bit sequence treated as a
    prefix over qubits 0..j-1.  The empty assignment returns 1.
    """
    if not isinstance(assignments, Mapping):
        assignments = {q: int(b) for q, b in enumerate(assignments)}
    ctx = _ProbeContext(circuit, gateset, opts)
    return ctx.probability(assignments), ctx.stats


def accept_probability(circuit: Circuit, gateset: GateSetConfig, qubit: int,
                       outcome: int, opts: SimOptions = SimOptions()
                       ) -> tuple[float, TaskStats]:
    """Probability of reading ``outcome`` when measuring one qubit."""
    ctx = _ProbeContext(circuit, gateset, opts)
    return ctx.probability({qubit: outcome}), ctx.stats


def sample(circuit: Circuit, gateset: GateSetConfig, shots: int = 1,
           opts: SimOptions = SimOptions()) -> tuple[list[str], TaskStats]:
    """Draw measurement outcomes bit by bit from exact conditional counts.

    One probability diagram serves every shot; prefix probabilities are cached,
    so repeated shots over a concentrated distribution cost almost nothing.
    """
    ctx = _ProbeContext(circuit, gateset, opts)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(opts.seed)))
    n = circuit.num_qubits
    results = []
    prob_cache: dict[tuple[int, ...], float] = {(): 1.0}
    for _ in range(shots):
        prefix: list[int] = []
        for q in range(n):
            base = prob_cache[tuple(prefix)]
            assert base > 0, "sampler extended a zero-probability prefix"
            trial = tuple(prefix + [0])
            if trial not in prob_cache:
                prob_cache[trial] = ctx.probability(
                    {i: b for i, b in enumerate(trial)})
            p0 = prob_cache[trial] / base
            bit = 0 if rng.random() < p0 else 1
            prefix.append(bit)
            chosen = tuple(prefix)
            if chosen not in prob_cache:
                prob_cache[chosen] = ctx.probability(
                    {i: b for i, b in enumerate(chosen)})
        results.append("".join(map(str, prefix)))
    return results, ctx.stats


# ---------------------------------------------------------------------------
# equivalence


def check_equivalence(c0: Circuit, c1: Circuit, gateset: GateSetConfig,
                      opts: SimOptions = SimOptions()
                      ) -> tuple[EquivVerdict, TaskStats]:
    """Decide equality up to global phase via the normalized unitary trace.

    The verdict compares |sum_j N_j omega^j|^2 against R * 4^n with exact
    integer arithmetic; no floating point participates.
    """
    if c0.num_qubits != c1.num_qubits:
        raise ValueError("circuits act on different qubit counts")
    n = c0.num_qubits
    augmented, _ = adjoint_extension(gateset)
    reversed_c0 = adjoint(c0, gateset)
    combined = Circuit(n, reversed_c0.gates + c1.gates, augmented.id)
    stats = TaskStats()
    tensor = sop.circuit_to_sop(combined, augmented)
    tensor = sop.trace_tensor(tensor)
    if opts.simplify:
        tensor = sop.simplify_pairs(tensor)
    r = tensor.modulus
    order = _choose_order(tensor, opts)
    if opts.sifting and order:
        order = mtbdd.sift(tensor.poly, order, opts.gc_watermark)
    store = DdStore(r, order, opts.gc_watermark)
    root = store.build(tensor.poly)
    stats.dd_nodes = store.size(root)
    stats.peak_nodes = store.peak_nodes
    stats.order = order
    counts = store.count_terminals(root, tensor.free_vars())
    w = from_counts(counts, 0, phase=tensor.phase, modulus=r)
    target = (1 << tensor.sqrt2_exponent) * (4 ** n)
    equivalent = equals_integer(w.abs_squared(), target)
    trace_value = from_counts(counts, tensor.sqrt2_exponent + 2 * n,
                              phase=tensor.phase, modulus=r).normalized()
    phase_index = None
    if equivalent:
        for j in range(r):
            if trace_value == CyclotomicValue.root_power(j, r):
                phase_index = j
                break
    return EquivVerdict(equivalent, trace_value, phase_index), stats


# ---------------------------------------------------------------------------
# local rewrite mutators (for building inequivalent test pairs)


def mutate_missing(circuit: Circuit, seed: int) -> Circuit:
    """Delete one uniformly chosen gate."""
    if not circuit.gates:
        raise ValueError("cannot delete a gate from an empty circuit")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    victim = int(rng.integers(0, len(circuit.gates)))
    gates = circuit.gates[:victim] + circuit.gates[victim + 1:]
    return replace(circuit, gates=gates)


def mutate_reverse(circuit: Circuit, seed: int) -> Circuit | None:
    """Swap the two qubits of one uniformly chosen cnot; None if there is none."""
    candidates = [i for i, g in enumerate(circuit.gates) if g.name == "cnot"]
    if not candidates:
        return None
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    victim = candidates[int(rng.integers(0, len(candidates)))]
    old = circuit.gates[victim]
    swapped = Gate(old.name, (old.qubits[1], old.qubits[0]), old.moment)
    gates = circuit.gates[:victim] + (swapped,) + circuit.gates[victim + 1:]
    return replace(circuit, gates=gates)

"""Sum-of-powers tensors.

A circuit over a power-form gate set denotes the tensor
``2**(-s/2) * omega**phase * sum_{internal} omega**f(vars)`` where ``f`` is a
multilinear polynomial with coefficients mod r.  This module does the wire
labeling that produces the tensor, plus the polynomial-level operations that
are cheaper than anything at the decision-diagram level: substitution,
contraction, the two-term internal-variable elimination, and the derived
tensors for amplitudes, traces and measurement probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple, Sequence

from .circuit import Circuit, GateSetConfig, GateSpec

__all__ = [
    "Monomial",
    "SopPolynomial",
    "VarInfo",
    "SopTensor",
    "circuit_to_sop",
    "substitute",
    "contract",
    "simplify_pairs",
    "amplitude_tensor",
    "trace_tensor",
    "difference_tensor",
    "format_tensor",
]


class Monomial(NamedTuple):
    coefficient: int
    variables: tuple[int, ...]  # sorted, duplicate-free


class VarInfo(NamedTuple):
    qubit: int        # originating qubit
    gate_index: int   # first gate referencing the variable (-1: never used)
    moment: int       # that gate's moment, or its index when moments are absent


@dataclass(frozen=True)
class SopPolynomial:
    modulus: int
    terms: tuple[Monomial, ...]  # canonical: merged by variable set, sorted

    def variables(self) -> set[int]:
        return {v for t in self.terms for v in t.variables}

    def degree(self) -> int:
        return max((len(t.variables) for t in self.terms), default=0)


def _canonical(items: Iterable[tuple[int, Sequence[int]]], modulus: int):
    """Merge terms sharing a variable set; returns (terms, constant exponent)."""
    merged: dict[tuple[int, ...], int] = {}
    for coeff, vars_ in items:
        key = tuple(vars_)
        merged[key] = (merged.get(key, 0) + coeff) % modulus
    const = merged.pop((), 0)
    terms = tuple(Monomial(c, k) for k, c in sorted(merged.items()) if c)
    return terms, const


@dataclass(frozen=True)
class SopTensor:
    """A sum-of-powers tensor with per-qubit input/output wire variables.

    ``bound`` records external variables already fixed to a bit; the
    polynomial never mentions bound variables.  ``zero_flag`` marks a tensor
    annihilated by a contradictory substitution.  Closed legs (traced out)
    hold None in the role tuples.
    """

    modulus: int
    sqrt2_exponent: int
    input_vars: tuple[int | None, ...]
    output_vars: tuple[int | None, ...]
    internal_vars: frozenset[int]
    poly: SopPolynomial
    bound: Mapping[int, int]
    provenance: Mapping[int, VarInfo]
    phase: int = 0
    zero_flag: bool = False

    @property
    def num_qubits(self) -> int:
        return len(self.input_vars)

    def external_vars(self) -> set[int]:
        ext = {v for v in self.input_vars if v is not None}
        ext |= {v for v in self.output_vars if v is not None}
        return ext

    def free_vars(self) -> set[int]:
        return (self.external_vars() - set(self.bound)) | set(self.internal_vars)


def circuit_to_sop(circuit: Circuit, gateset: GateSetConfig) -> SopTensor:
    """Label the circuit's wires and collect the exponent polynomial.

    Every qubit starts with a fresh variable; a gate's fresh output slots mint
    new variables, wired slots reuse the incoming ones, and complex gates are
    expanded first.  Variables that are neither initial nor final wire labels
    are internal (summed over).
    """
    r = gateset.common_modulus
    plan: list[tuple[GateSpec, tuple[int, ...], int, int]] = []
    for idx, gate in enumerate(circuit.gates):
        spec = gateset.spec(gate.name)
        if len(gate.qubits) != spec.arity:
            raise ValueError(f"gate {idx} ({gate.name}): arity mismatch")
        if any(q >= circuit.num_qubits for q in gate.qubits):
            raise ValueError(f"gate {idx} ({gate.name}): qubit out of range")
        moment = gate.moment if gate.moment is not None else idx
        if spec.kind == "complex":
            for ref, slots in spec.expansion:
                sub = gateset.gates[ref]
                plan.append((sub, tuple(gate.qubits[s] for s in slots), idx, moment))
        else:
            plan.append((spec, gate.qubits, idx, moment))

    counter = 0
    provenance: dict[int, VarInfo] = {}

    def mint(qubit: int, gate_index: int, moment: int) -> int:
        nonlocal counter
        counter += 1
        provenance[counter] = VarInfo(qubit, gate_index, moment)
        return counter

    def touch(var: int, gate_index: int, moment: int) -> None:
        info = provenance[var]
        if info.gate_index == -1:
            provenance[var] = VarInfo(info.qubit, gate_index, moment)

    cur = [mint(q, -1, -1) for q in range(circuit.num_qubits)]
    initial = tuple(cur)
    raw_terms: list[tuple[int, tuple[int, ...]]] = []
    phase = 0
    s = 0
    for spec, qubits, idx, moment in plan:
        env: dict[tuple[str, int], int] = {}
        for i, q in enumerate(qubits):
            env[("in", i)] = cur[q]
            touch(cur[q], idx, moment)
        for j in range(spec.internal_count):
            env[("y", j)] = mint(qubits[spec.internal_qubits[j]], idx, moment)
        wired = spec.wiring()
        outs = []
        for p in range(spec.arity):
            if p in wired:
                outs.append(env[("in", wired[p])])
            else:
                v = mint(qubits[p], idx, moment)
                env[("out", p)] = v
                outs.append(v)
        for p, q in enumerate(qubits):
            cur[q] = outs[p]
        s += spec.sqrt2_exponent
        for coeff, slots in spec.monomials:
            if not slots:
                phase = (phase + coeff) % r
                continue
            vars_ = tuple(sorted(env[sl] for sl in slots))
            raw_terms.append((coeff, vars_))

    terms, const = _canonical(raw_terms, r)
    phase = (phase + const) % r
    internal = frozenset(range(1, counter + 1)) - set(initial) - set(cur)
    return SopTensor(modulus=r, sqrt2_exponent=s, input_vars=initial,
                     output_vars=tuple(cur), internal_vars=internal,
                     poly=SopPolynomial(r, terms), bound={},
                     provenance=provenance, phase=phase)


def _zeroed(tensor: SopTensor, bound: Mapping[int, int]) -> SopTensor:
    return replace(tensor, poly=SopPolynomial(tensor.modulus, ()),
                   bound=dict(bound), phase=0, zero_flag=True)


def substitute(tensor: SopTensor, bindings: Mapping[int, int]) -> SopTensor:
    """Fix external variables to bits, folding them into the polynomial.

    A variable serving several roles that is re-bound to a conflicting value
    yields the zero tensor (zero_flag) rather than an error.
    """
    if tensor.zero_flag:
        return tensor
    external = tensor.external_vars()
    for var, value in bindings.items():
        if var in tensor.internal_vars:
            raise ValueError(f"cannot bind internal variable x{var}")
        if var not in external:
            raise ValueError(f"unknown external variable x{var}")
        if value not in (0, 1):
            raise ValueError("bindings must be bits")
    merged = dict(tensor.bound)
    for var, value in bindings.items():
        if merged.get(var, value) != value:
            return _zeroed(tensor, merged)
        merged[var] = value
    r = tensor.modulus
    items: list[tuple[int, tuple[int, ...]]] = []
    phase = tensor.phase
    for coeff, vars_ in tensor.poly.terms:
        keep = []
        dead = False
        for v in vars_:
            if v in bindings:
                if bindings[v] == 0:
                    dead = True
                    break
            else:
                keep.append(v)
        if dead:
            continue
        items.append((coeff, tuple(keep)))
    terms, const = _canonical(items, r)
    phase = (phase + const) % r
    return replace(tensor, poly=SopPolynomial(r, terms), bound=merged, phase=phase)


def _renamed(tensor: SopTensor, mapping: Mapping[int, int]) -> SopTensor:
    """Apply a variable rename to polynomial, roles, bindings and internals."""
    def m(v):
        return mapping.get(v, v) if v is not None else None
    # x*x = x over bit assignments, so a merge inside one monomial drops a factor
    items = [(c, tuple(sorted({m(v) for v in vars_}))) for c, vars_ in tensor.poly.terms]
    terms, const = _canonical(items, tensor.modulus)
    bound = {}
    zero = tensor.zero_flag
    for var, value in tensor.bound.items():
        tgt = m(var)
        if bound.get(tgt, value) != value:
            zero = True
        bound[tgt] = value
    internal = frozenset(m(v) for v in tensor.internal_vars)
    t = replace(tensor,
                poly=SopPolynomial(tensor.modulus, terms),
                input_vars=tuple(m(v) for v in tensor.input_vars),
                output_vars=tuple(m(v) for v in tensor.output_vars),
                internal_vars=internal, bound=bound,
                phase=(tensor.phase + const) % tensor.modulus,
                zero_flag=zero)
    return _zeroed(t, bound) if zero else t


def contract(tensor: SopTensor, pairs: Sequence[tuple[int, int]]) -> SopTensor:
    """Identify pairs of external variables, plugging their legs together.

    Chains of identifications converge through union-find.  A merged variable
    that ends up labeling both an input and an output leg has both roles
    consumed: its legs close and it becomes internal.  Contracting a variable
    with itself is a no-op.
    """
    external = tensor.external_vars()
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    for a, b in pairs:
        for v in (a, b):
            if v in tensor.internal_vars:
                raise ValueError(f"cannot contract internal variable x{v}")
            if v not in external:
                raise ValueError(f"unknown external variable x{v}")
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    mapping = {v: find(v) for v in external if find(v) != v}
    out = _renamed(tensor, mapping)
    if out.zero_flag:
        return out
    touched = {find(a) for a, b in pairs if a != b}
    ins = list(out.input_vars)
    outs = list(out.output_vars)
    closed = []
    for v in touched:
        if v in ins and v in outs:
            closed.append(v)
    internal = set(out.internal_vars)
    bound = dict(out.bound)
    for v in closed:
        ins = [None if x == v else x for x in ins]
        outs = [None if x == v else x for x in outs]
        if v in bound:
            # a closed leg with a pre-existing binding keeps its value by
            # never being summed; fold it in as a substitution instead
            raise ValueError(f"cannot contract bound variable x{v}")
        internal.add(v)
    return replace(out, input_vars=tuple(ins), output_vars=tuple(outs),
                   internal_vars=frozenset(internal), bound=bound)


def simplify_pairs(tensor: SopTensor) -> SopTensor:
    """Eliminate internal variables via sum_x (-1)**(x*(y0+y1)) = 2*delta(y0,y1).

    Applies only when r is even and an internal variable occurs in exactly two
    terms, both bilinear with coefficient exactly r/2.  Each rewrite removes
    the summed variable, identifies its two partners and lowers the sqrt(2)
    exponent by 2; iterates to a fixpoint.
    """
    r = tensor.modulus
    if tensor.zero_flag or r % 2:
        return tensor
    half = r // 2
    terms: dict[int, tuple[int, frozenset[int]]] = {}
    by_set: dict[frozenset[int], int] = {}
    occ: dict[int, set[int]] = {}
    next_tid = 0

    def add_term(coeff: int, vset: frozenset[int]) -> None:
        nonlocal next_tid
        if vset in by_set:
            tid = by_set[vset]
            c = (terms[tid][0] + coeff) % r
            if c:
                terms[tid] = (c, vset)
            else:
                remove_term(tid)
        elif coeff % r:
            tid = next_tid
            next_tid += 1
            terms[tid] = (coeff % r, vset)
            by_set[vset] = tid
            for v in vset:
                occ.setdefault(v, set()).add(tid)

    def remove_term(tid: int) -> None:
        coeff, vset = terms.pop(tid)
        del by_set[vset]
        for v in vset:
            occ[v].discard(tid)

    for coeff, vars_ in tensor.poly.terms:
        add_term(coeff, frozenset(vars_))

    internal = set(tensor.internal_vars)
    external = tensor.external_vars()
    rename: dict[int, int] = {}
    s = tensor.sqrt2_exponent
    queue = set(internal)
    while queue:
        x = queue.pop()
        if x not in internal:
            continue
        tids = occ.get(x, set())
        if len(tids) != 2:
            continue
        pair = [terms[tid] for tid in tids]
        if any(c != half or len(vs) != 2 for c, vs in pair):
            continue
        (c0, vs0), (c1, vs1) = pair
        y0 = next(iter(vs0 - {x}))
        y1 = next(iter(vs1 - {x}))
        # keep an external partner alive; otherwise keep the smaller id
        if y1 in external and y0 not in external:
            y0, y1 = y1, y0
        elif y1 in external and y0 in external and y1 < y0:
            y0, y1 = y1, y0
        elif y1 not in external and y0 not in external and y1 < y0:
            y0, y1 = y1, y0
        for tid in list(tids):
            remove_term(tid)
        for tid in list(occ.get(y1, set())):
            coeff, vset = terms[tid]
            remove_term(tid)
            add_term(coeff, (vset - {y1}) | {y0})
        internal.discard(x)
        if y1 in internal:
            internal.discard(y1)
        rename[y1] = y0
        s -= 2
        queue |= {y0} | {v for tid in occ.get(y0, set()) for v in terms[tid][1]}

    if not rename and s == tensor.sqrt2_exponent:
        return tensor

    # resolve rename chains
    def resolve(v: int) -> int:
        while v in rename:
            v = rename[v]
        return v

    final = {v: resolve(v) for v in rename}
    new_terms = tuple(Monomial(c, vs) for vs, c in sorted(
        (tuple(sorted(vset)), c) for c, vset in terms.values()))

    def m(v):
        return final.get(v, v) if v is not None else None

    bound = {}
    zero = False
    for var, value in tensor.bound.items():
        tgt = m(var)
        if bound.get(tgt, value) != value:
            zero = True
        bound[tgt] = value
    out = replace(tensor, sqrt2_exponent=s,
                  poly=SopPolynomial(r, new_terms),
                  input_vars=tuple(m(v) for v in tensor.input_vars),
                  output_vars=tuple(m(v) for v in tensor.output_vars),
                  internal_vars=frozenset(m(v) for v in internal),
                  bound=bound, zero_flag=zero or tensor.zero_flag)
    return _zeroed(out, bound) if out.zero_flag else out


def amplitude_tensor(tensor: SopTensor, bits: Sequence[int] | str) -> SopTensor:
    """Tensor for the amplitude of reading ``bits`` starting from all zeros.

    Inputs are fixed to 0 and each qubit's output variable to its bit; a
    variable serving conflicting roles yields the zero tensor.
    """
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    if len(bits) != tensor.num_qubits:
        raise ValueError(f"expected {tensor.num_qubits} bits, got {len(bits)}")
    desired: dict[int, int] = {}
    for v in tensor.input_vars:
        if v is None:
            raise ValueError("cannot take an amplitude of a tensor with closed legs")
        desired[v] = 0
    for v, b in zip(tensor.output_vars, bits):
        if v is None:
            raise ValueError("cannot take an amplitude of a tensor with closed legs")
        if desired.get(v, b) != b:
            return _zeroed(tensor, tensor.bound)
        desired[v] = int(b)
    return substitute(tensor, desired)


def trace_tensor(tensor: SopTensor) -> SopTensor:
    """Close every qubit's input leg onto its output leg.

    Variables shared across qubits (swapping gates, diagonal wires) are forced
    consistent by merging per connected component; each component's variable
    is then summed over.
    """
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    for vin, vout in zip(tensor.input_vars, tensor.output_vars):
        if vin is None or vout is None:
            raise ValueError("trace needs every leg open")
        ra, rb = find(vin), find(vout)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    external = tensor.external_vars()
    mapping = {v: find(v) for v in external if find(v) != v}
    out = _renamed(tensor, mapping)
    if out.zero_flag:
        return out
    reps = {find(v) for v in external}
    if any(v in out.bound for v in reps):
        raise ValueError("trace over bound variables is not supported")
    n = tensor.num_qubits
    return replace(out, input_vars=(None,) * n, output_vars=(None,) * n,
                   internal_vars=frozenset(out.internal_vars) | reps)


def difference_tensor(tensor: SopTensor) -> SopTensor:
    """Difference of the polynomial against a clone of its summed variables.

    For f(x, y) with inputs already bound, returns the tensor of
    f(x, y) - f(x, y') over fresh clones y'; the squared prefactor doubles the
    sqrt(2) exponent.  Counting this tensor yields measurement probabilities.
    """
    if tensor.zero_flag:
        return replace(tensor, sqrt2_exponent=2 * tensor.sqrt2_exponent, phase=0)
    for v in tensor.input_vars:
        if v is not None and v not in tensor.bound:
            raise ValueError("inputs must be bound before deriving probabilities")
    r = tensor.modulus
    top = max([0, *tensor.provenance.keys(), *tensor.free_vars()])
    clone: dict[int, int] = {}
    provenance = dict(tensor.provenance)
    for i, v in enumerate(sorted(tensor.internal_vars), start=1):
        clone[v] = top + i
        provenance[top + i] = tensor.provenance.get(v, VarInfo(0, -1, -1))
    items: list[tuple[int, tuple[int, ...]]] = [
        (c, vs) for c, vs in tensor.poly.terms]
    for coeff, vars_ in tensor.poly.terms:
        mapped = tuple(sorted(clone.get(v, v) for v in vars_))
        items.append(((-coeff) % r, mapped))
    terms, const = _canonical(items, r)
    assert const == 0, "difference of identical constants must cancel"
    return replace(tensor, poly=SopPolynomial(r, terms),
                   internal_vars=frozenset(tensor.internal_vars) | set(clone.values()),
                   sqrt2_exponent=2 * tensor.sqrt2_exponent,
                   provenance=provenance, phase=0)


def format_tensor(tensor: SopTensor) -> str:
    """Debug rendering, e.g. ``x1*x4 + x2*x5 [r=2, s=4, internal={x5}]``."""
    if tensor.zero_flag:
        body = "ZERO"
    elif not tensor.poly.terms:
        body = "0"
    else:
        parts = []
        for coeff, vars_ in tensor.poly.terms:
            head = "" if coeff == 1 else f"{coeff}*"
            parts.append(head + "*".join(f"x{v}" for v in vars_))
        body = " + ".join(parts)
    internal = ",".join(f"x{v}" for v in sorted(tensor.internal_vars))
    extra = f", phase={tensor.phase}" if tensor.phase else ""
    return (f"{body} [r={tensor.modulus}, s={tensor.sqrt2_exponent}, "
            f"internal={{{internal}}}{extra}]")

"""Circuit IR: gate-set configuration, file parsing, generators, adjoints.

A gate set is data, not code.  Each gate is either *simple* (its nonzero
matrix entries are powers of a root of unity, described by monomials over
input/output/internal variable slots) or *complex* (syntactic sugar expanded
into a sequence of simple gates).  New gate sets therefore need only a new
config file.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from itertools import combinations

import numpy as np

__all__ = [
    "Gate",
    "Circuit",
    "GateSpec",
    "GateSetConfig",
    "GateSetError",
    "CircuitParseError",
    "load_gateset",
    "builtin_gateset",
    "parse_circuit",
    "serialize_circuit",
    "validate_circuit",
    "generate_ghz",
    "generate_bv",
    "generate_linear_network",
    "adjoint",
    "adjoint_extension",
]

Slot = tuple[str, int]  # ("in" | "out" | "y", position)


class GateSetError(ValueError):
    """Raised for malformed or inconsistent gate-set configurations."""


class CircuitParseError(ValueError):
    """Raised for malformed circuit files; the message carries a line number."""


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    moment: int | None = None

    def __post_init__(self) -> None:
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"gate {self.name} repeats a qubit: {self.qubits}")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    gateset_id: str = ""


@dataclass(frozen=True)
class GateSpec:
    """One gate's power form (simple) or its expansion (complex).

    Monomials reference variable slots; slots on wired output positions are
    normalized onto the input slot they share a variable with, so only fresh
    output positions ever appear as ("out", p).
    """

    name: str = field(compare=False)
    arity: int
    kind: str  # "simple" | "complex"
    modulus: int | None = None
    sqrt2_exponent: int = 0
    diagonal_qubits: tuple[int, ...] = ()
    output_permutation: tuple[tuple[int, int], ...] = ()  # (out position, in position)
    fresh_output_qubits: tuple[int, ...] = ()
    internal_count: int = 0
    internal_qubits: tuple[int, ...] = field(default=(), compare=False)
    monomials: tuple[tuple[int, tuple[Slot, ...]], ...] = ()
    expansion: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def wiring(self) -> dict[int, int]:
        """Map from output position to the input position it shares a variable with."""
        wired = {p: p for p in self.diagonal_qubits}
        wired.update(dict(self.output_permutation))
        return wired


@dataclass(frozen=True)
class GateSetConfig:
    id: str
    common_modulus: int
    gates: dict[str, GateSpec]
    aliases: dict[str, str]

    def resolve(self, name: str) -> str:
        name = name.lower()
        name = self.aliases.get(name, name)
        if name not in self.gates:
            raise GateSetError(f"unknown gate {name!r} in gate set {self.id!r}")
        return name

    def spec(self, name: str) -> GateSpec:
        return self.gates[self.resolve(name)]


# ---------------------------------------------------------------------------
# gate-set loading


_SLOT_KINDS = ("in", "out", "y")


def _parse_slot(text: str, gate: str) -> Slot:
    for kind in _SLOT_KINDS:
        if text.startswith(kind) and text[len(kind):].isdigit():
            return (kind, int(text[len(kind):]))
    raise GateSetError(f"gate {gate!r}: bad variable slot {text!r}")


def _require_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GateSetError(f"{what} must be an integer, got {value!r}")
    return value


def _canonical_monomials(raw, gate: str, arity: int, modulus: int,
                         internal_count: int, wired: dict[int, int],
                         fresh: set[int]) -> tuple[tuple[int, tuple[Slot, ...]], ...]:
    merged: dict[tuple[Slot, ...], int] = {}
    for entry in raw:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise GateSetError(f"gate {gate!r}: monomial entries are [coeff, [slots]]")
        coeff = _require_int(entry[0], f"gate {gate!r} monomial coefficient")
        slots = []
        for s in entry[1]:
            kind, pos = _parse_slot(s, gate)
            if kind == "y":
                if pos >= internal_count:
                    raise GateSetError(f"gate {gate!r}: internal slot y{pos} out of range")
            elif pos >= arity:
                raise GateSetError(f"gate {gate!r}: slot {s!r} out of range")
            if kind == "out" and pos in wired:
                kind, pos = "in", wired[pos]  # wired outputs reuse the input variable
            slots.append((kind, pos))
        key = tuple(sorted(slots, key=lambda t: (_SLOT_KINDS.index(t[0]), t[1])))
        if len(set(key)) != len(key):
            raise GateSetError(f"gate {gate!r}: monomial repeats a variable slot")
        merged[key] = (merged.get(key, 0) + coeff) % modulus
    return tuple(sorted((c, k) for k, c in merged.items() if c))


def _load_simple(name: str, entry: dict) -> GateSpec:
    arity = _require_int(entry.get("arity"), f"gate {name!r} arity")
    modulus = _require_int(entry.get("modulus"), f"gate {name!r} modulus")
    if arity < 1 or modulus < 1:
        raise GateSetError(f"gate {name!r}: arity and modulus must be positive")
    s = _require_int(entry.get("sqrt2_exponent", 0), f"gate {name!r} sqrt2_exponent")
    if s < 0:
        raise GateSetError(f"gate {name!r}: sqrt2_exponent must be non-negative")
    diagonal = {_require_int(p, "diagonal position")
                for p in entry.get("diagonal_qubits", [])}
    perm_raw = {}
    for out_pos, in_pos in entry.get("output_permutation", {}).items():
        perm_raw[int(out_pos)] = _require_int(in_pos, "permutation target")
    # identity wiring is just the diagonal case
    diagonal = tuple(sorted(diagonal | {p for p, q in perm_raw.items() if p == q}))
    perm_only = tuple(sorted((p, q) for p, q in perm_raw.items() if p != q))
    wired = {p: p for p in diagonal} | dict(perm_only)
    if len(wired) != len(diagonal) + len(perm_only):
        raise GateSetError(f"gate {name!r}: diagonal and permutation positions overlap")
    if any(p >= arity for p in wired) or any(q >= arity for q in wired.values()):
        raise GateSetError(f"gate {name!r}: wiring position out of range")
    if len(set(wired.values())) != len(wired):
        raise GateSetError(f"gate {name!r}: two outputs wired to one input")
    fresh = tuple(sorted(set(range(arity)) - set(wired)))
    declared_fresh = entry.get("fresh_output_qubits")
    if declared_fresh is not None and tuple(sorted(declared_fresh)) != fresh:
        raise GateSetError(f"gate {name!r}: fresh_output_qubits must be {list(fresh)}")
    internal = _require_int(entry.get("internal_count", 0), f"gate {name!r} internal_count")
    internal_qubits = tuple(entry.get("internal_qubits", [arity - 1] * internal))
    if len(internal_qubits) != internal or any(q >= arity for q in internal_qubits):
        raise GateSetError(f"gate {name!r}: bad internal_qubits")
    monomials = _canonical_monomials(entry.get("monomials", []), name, arity,
                                     modulus, internal, wired, set(fresh))
    return GateSpec(name=name, arity=arity, kind="simple", modulus=modulus,
                    sqrt2_exponent=s, diagonal_qubits=diagonal,
                    output_permutation=perm_only, fresh_output_qubits=fresh,
                    internal_count=internal, internal_qubits=internal_qubits,
                    monomials=monomials)


def _load_complex(name: str, entry: dict) -> GateSpec:
    arity = _require_int(entry.get("arity"), f"gate {name!r} arity")
    steps = []
    for step in entry.get("expansion", []):
        qubits = tuple(_require_int(q, "expansion qubit slot") for q in step["qubits"])
        if any(q >= arity for q in qubits) or len(set(qubits)) != len(qubits):
            raise GateSetError(f"gate {name!r}: bad expansion qubit slots {qubits}")
        steps.append((step["gate"].lower(), qubits))
    if not steps:
        raise GateSetError(f"gate {name!r}: complex gate needs a non-empty expansion")
    return GateSpec(name=name, arity=arity, kind="complex", expansion=tuple(steps))


def _rescaled(spec: GateSpec, common: int) -> GateSpec:
    if spec.kind != "simple" or spec.modulus == common:
        return spec
    factor = common // spec.modulus
    monomials = tuple(sorted((c * factor % common, slots) for c, slots in spec.monomials))
    return replace(spec, modulus=common, monomials=monomials)


def load_gateset(config_text: str) -> GateSetConfig:
    """Parse and validate a gate-set config, rescaling to the common modulus."""
    try:
        data = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise GateSetError(f"gate-set config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "gates" not in data:
        raise GateSetError("gate-set config must be an object with a 'gates' map")
    set_id = data.get("id", "unnamed")
    gates: dict[str, GateSpec] = {}
    for name, entry in data["gates"].items():
        name = name.lower()
        kind = entry.get("kind")
        if kind == "simple":
            gates[name] = _load_simple(name, entry)
        elif kind == "complex":
            gates[name] = _load_complex(name, entry)
        else:
            raise GateSetError(f"gate {name!r}: kind must be 'simple' or 'complex'")
    for name, spec in gates.items():
        if spec.kind == "complex":
            for ref, qubits in spec.expansion:
                if ref not in gates:
                    raise GateSetError(f"gate {name!r}: expansion references unknown gate {ref!r}")
                target = gates[ref]
                if target.kind != "simple":
                    raise GateSetError(f"gate {name!r}: expansions may only use simple gates")
                if len(qubits) != target.arity:
                    raise GateSetError(f"gate {name!r}: expansion step {ref!r} arity mismatch")
    moduli = [g.modulus for g in gates.values() if g.kind == "simple"]
    if not moduli:
        raise GateSetError("gate set has no simple gates")
    common = math.lcm(*moduli)
    gates = {n: _rescaled(g, common) for n, g in gates.items()}
    aliases = {str(k).lower(): str(v).lower() for k, v in data.get("aliases", {}).items()}
    for target in aliases.values():
        if target not in gates:
            raise GateSetError(f"alias target {target!r} is not a gate")
    return GateSetConfig(id=set_id, common_modulus=common, gates=gates, aliases=aliases)


_BUILTIN_CACHE: dict[str, GateSetConfig] = {}


def builtin_gateset(name: str) -> GateSetConfig:
    """One of the shipped gate sets: 'z', 't' or 'g'."""
    if name not in _BUILTIN_CACHE:
        path = resources.files("feyndd").joinpath("gatesets", f"{name}.json")
        try:
            text = path.read_text()
        except FileNotFoundError:
            raise GateSetError(f"no builtin gate set named {name!r}") from None
        _BUILTIN_CACHE[name] = load_gateset(text)
    return _BUILTIN_CACHE[name]


# ---------------------------------------------------------------------------
# circuit files


def validate_circuit(circuit: Circuit, gateset: GateSetConfig) -> None:
    for i, gate in enumerate(circuit.gates):
        spec = gateset.spec(gate.name)
        if len(gate.qubits) != spec.arity:
            raise ValueError(f"gate {i} ({gate.name}): expected {spec.arity} qubits")
        for q in gate.qubits:
            if not 0 <= q < circuit.num_qubits:
                raise ValueError(f"gate {i} ({gate.name}): qubit {q} out of range")


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_gate_args(parts, lineno: int, gateset: GateSetConfig) -> Gate:
    name = gateset.resolve(parts[0])
    try:
        qubits = tuple(int(tok) for tok in parts[1:])
    except ValueError:
        raise CircuitParseError(f"line {lineno}: qubit indices must be integers") from None
    if any(q < 0 for q in qubits):
        raise CircuitParseError(f"line {lineno}: negative qubit index")
    try:
        return Gate(name, qubits)
    except ValueError as exc:
        raise CircuitParseError(f"line {lineno}: {exc}") from None


def _parse_simple(text: str, gateset: GateSetConfig) -> Circuit:
    num_qubits = None
    gates = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if num_qubits is None:
            if parts[0].lower() != "qubits" or len(parts) != 2 or not parts[1].isdigit():
                raise CircuitParseError(f"line {lineno}: expected 'qubits N' header")
            num_qubits = int(parts[1])
            continue
        try:
            gate = _parse_gate_args(parts, lineno, gateset)
        except GateSetError as exc:
            raise CircuitParseError(f"line {lineno}: {exc}") from None
        if gateset.gates[gate.name].arity != len(gate.qubits):
            raise CircuitParseError(f"line {lineno}: {gate.name} takes "
                                    f"{gateset.gates[gate.name].arity} qubits")
        if any(q >= num_qubits for q in gate.qubits):
            raise CircuitParseError(f"line {lineno}: qubit index out of range")
        gates.append(gate)
    if num_qubits is None:
        raise CircuitParseError("line 1: empty circuit file")
    return Circuit(num_qubits, tuple(gates), gateset.id)


def _parse_grcs(text: str, gateset: GateSetConfig) -> Circuit:
    entries = []
    declared = None
    for lineno, line in _content_lines(text):
        parts = line.split()
        if declared is None and len(parts) == 1 and parts[0].isdigit() and not entries:
            declared = int(parts[0])
            continue
        if len(parts) < 2 or not parts[0].lstrip("-").isdigit():
            raise CircuitParseError(f"line {lineno}: expected 'moment gate qubits...'")
        moment = int(parts[0])
        try:
            gate = _parse_gate_args(parts[1:], lineno, gateset)
        except GateSetError as exc:
            raise CircuitParseError(f"line {lineno}: {exc}") from None
        if gateset.gates[gate.name].arity != len(gate.qubits):
            raise CircuitParseError(f"line {lineno}: {gate.name} takes "
                                    f"{gateset.gates[gate.name].arity} qubits")
        entries.append((moment, len(entries), Gate(gate.name, gate.qubits, moment)))
    if not entries and declared is None:
        raise CircuitParseError("line 1: empty circuit file")
    entries.sort(key=lambda e: (e[0], e[1]))
    gates = tuple(e[2] for e in entries)
    inferred = 1 + max((q for g in gates for q in g.qubits), default=-1)
    num_qubits = declared if declared is not None else inferred
    if inferred > num_qubits:
        raise CircuitParseError(f"qubit index {inferred - 1} exceeds declared count {num_qubits}")
    return Circuit(num_qubits, gates, gateset.id)


def parse_circuit(text: str, format: str, gateset: GateSetConfig) -> Circuit:
    if format == "simple":
        return _parse_simple(text, gateset)
    if format == "grcs":
        return _parse_grcs(text, gateset)
    raise ValueError(f"unknown circuit format {format!r}")


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    for gate in circuit.gates:
        lines.append(" ".join([gate.name, *map(str, gate.qubits)]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# generators


def generate_ghz(n: int) -> Circuit:
    """H on qubit 0 followed by a CNOT chain down the register."""
    if n < 1:
        raise ValueError("n must be at least 1")
    gates = [Gate("h", (0,))]
    gates += [Gate("cnot", (q, q + 1)) for q in range(n - 1)]
    return Circuit(n, tuple(gates), "z")


def generate_bv(n: int) -> Circuit:
    """Phase-oracle form of the all-ones hidden-string circuit, 3n gates."""
    if n < 1:
        raise ValueError("n must be at least 1")
    gates = [Gate("h", (q,)) for q in range(n)]
    gates += [Gate("z", (q,)) for q in range(n)]
    gates += [Gate("h", (q,)) for q in range(n)]
    return Circuit(n, tuple(gates), "z")


def generate_linear_network(n: int, k: int, seed: int,
                            alphas=None, window_triples=None):
    """Diagonal-core circuit from a degree-3 polynomial with banded cubic terms.

    f(x) = A(x) * sum_i x_i + sum of one random cubic monomial per length-k
    window of consecutive variables, with A(x) a random 0/1 linear form.  The
    first product is expanded multilinearly (x_i^2 = x_i) and realised with
    Z/CZ gates; each window's cubic term becomes one CCZ gate.  Returns the
    circuit and the expanded polynomial as a tuple of sorted variable tuples
    (coefficients are all 1 mod 2).

    ``alphas`` and ``window_triples`` exist for tests that need to pin the
    random choices; normal callers pass only (n, k, seed).
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if k > n:
        raise ValueError("k must not exceed n")
    ss_alpha, ss_windows = np.random.SeedSequence(seed).spawn(2)
    if alphas is None:
        alphas = np.random.Generator(np.random.PCG64(ss_alpha)).integers(0, 2, size=n)
    alphas = [int(a) for a in alphas]
    if window_triples is None:
        rng = np.random.Generator(np.random.PCG64(ss_windows))
        window_triples = []
        for i in range(n - k + 1):
            choices = list(combinations(range(i, i + k), 3))
            window_triples.append(choices[int(rng.integers(0, len(choices)))])
    window_triples = [tuple(sorted(t)) for t in window_triples]

    # expand A(x) * sum_j x_j over GF(2)
    linear = [i for i in range(n) if alphas[i]]
    quadratic = [(i, j) for i, j in combinations(range(n), 2)
                 if (alphas[i] + alphas[j]) % 2]
    cubic_counts: dict[tuple[int, ...], int] = {}
    for t in window_triples:
        cubic_counts[t] = cubic_counts.get(t, 0) + 1
    poly = sorted([(i,) for i in linear] + list(quadratic)
                  + [t for t, c in cubic_counts.items() if c % 2])

    gates = [Gate("h", (q,)) for q in range(n)]
    gates += [Gate("z", (i,)) for i in linear]
    gates += [Gate("cz", pair) for pair in quadratic]
    gates += [Gate("ccz", t) for t in window_triples]
    gates += [Gate("h", (q,)) for q in range(n)]
    return Circuit(n, tuple(gates), "z"), tuple(poly)


# ---------------------------------------------------------------------------
# adjoints


def _adjoint_simple(spec: GateSpec) -> GateSpec:
    """Conjugate transpose of a power-form gate: swap in/out roles, negate exponents."""
    r = spec.modulus
    sigma = spec.wiring()                      # out position -> in position
    tau = {q: p for p, q in sigma.items()}     # inverted wiring

    def map_slot(slot: Slot) -> Slot:
        kind, pos = slot
        if kind == "y":
            return slot
        if kind == "out":                      # fresh output becomes an input
            return ("in", pos)
        if pos in tau:
            return ("in", tau[pos])
        return ("out", pos)                    # its qubit's output is fresh after the swap
    monomials = []
    for coeff, slots in spec.monomials:
        mapped = tuple(sorted((map_slot(s) for s in slots),
                              key=lambda t: (_SLOT_KINDS.index(t[0]), t[1])))
        monomials.append(((-coeff) % r, mapped))
    diagonal = tuple(sorted(p for p, q in tau.items() if p == q))
    perm = tuple(sorted((p, q) for p, q in tau.items() if p != q))
    fresh = tuple(sorted(set(range(spec.arity)) - set(tau)))
    return GateSpec(name=spec.name + "_dg", arity=spec.arity, kind="simple",
                    modulus=r, sqrt2_exponent=spec.sqrt2_exponent,
                    diagonal_qubits=diagonal, output_permutation=perm,
                    fresh_output_qubits=fresh, internal_count=spec.internal_count,
                    internal_qubits=spec.internal_qubits,
                    monomials=tuple(sorted((c, k) for c, k in monomials if c)))


def adjoint_extension(gateset: GateSetConfig) -> tuple[GateSetConfig, dict[str, str]]:
    """Gate set augmented with adjoint gates, plus the name -> adjoint-name map.

    Self-inverse gates map to themselves; otherwise a '<name>_dg' gate is added
    (or an existing structurally-equal gate is reused).
    """
    gates = dict(gateset.gates)
    mapping: dict[str, str] = {}

    def find_match(candidate: GateSpec) -> str | None:
        for other_name, other in gates.items():
            if other == candidate:
                return other_name
        return None

    for name, spec in gateset.gates.items():
        if spec.kind != "simple":
            continue
        adj = _adjoint_simple(spec)
        existing = find_match(adj)
        if existing is None:
            gates[adj.name] = adj
            mapping[name] = adj.name
        else:
            mapping[name] = existing
    for name, spec in gateset.gates.items():
        if spec.kind != "complex":
            continue
        steps = tuple((mapping[ref], qubits) for ref, qubits in reversed(spec.expansion))
        adj = GateSpec(name=name + "_dg", arity=spec.arity, kind="complex",
                       expansion=steps)
        existing = find_match(adj)
        if existing is None:
            gates[adj.name] = adj
            mapping[name] = adj.name
        else:
            mapping[name] = existing
    changed = any(mapping[n] != n for n in mapping)
    set_id = gateset.id + "+adj" if changed else gateset.id
    return GateSetConfig(set_id, gateset.common_modulus, gates, dict(gateset.aliases)), mapping


def adjoint(circuit: Circuit, gateset: GateSetConfig) -> Circuit:
    """Circuit implementing the conjugate transpose of the given circuit."""
    augmented, mapping = adjoint_extension(gateset)
    gates = tuple(Gate(mapping[gateset.resolve(g.name)], g.qubits, g.moment)
                  for g in reversed(circuit.gates))
    return Circuit(circuit.num_qubits, gates, augmented.id)

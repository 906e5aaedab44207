import json

import numpy as np
import pytest

from feyndd.circuit import (
    Circuit,
    CircuitParseError,
    Gate,
    GateSetError,
    adjoint,
    adjoint_extension,
    generate_bv,
    generate_ghz,
    generate_linear_network,
    load_gateset,
    parse_circuit,
    serialize_circuit,
    validate_circuit,
)
from feyndd.oracle import gate_matrix, sv_state

from util import random_circuit, rng_for


# -- gate-set configs --------------------------------------------------------

def test_builtin_common_moduli(zset, tset, gset):
    assert zset.common_modulus == 2
    assert tset.common_modulus == 8
    assert gset.common_modulus == 24


def test_h_spec_in_z(zset):
    h = zset.gates["h"]
    assert h.monomials == ((1, (("in", 0), ("out", 0))),)
    assert h.sqrt2_exponent == 1
    assert h.fresh_output_qubits == (0,)


def test_rescaling_to_common_modulus(tset, gset):
    # h declared at modulus 2 carries coefficient 4 once rescaled to 8
    assert tset.gates["h"].monomials == ((4, (("in", 0), ("out", 0))),)
    assert tset.gates["t"].monomials == ((1, (("in", 0),)),)
    assert tset.gates["cnot"].monomials == (
        (4, (("in", 0), ("y", 0))),
        (4, (("in", 1), ("y", 0))),
        (4, (("out", 1), ("y", 0))),
    )
    assert gset.gates["h"].monomials[0][0] == 12
    assert gset.gates["t"].monomials[0][0] == 3
    sx = {(c, s) for c, s in gset.gates["sx"].monomials}
    assert sx == {(18, (("in", 0),)), (18, (("out", 0),)),
                  (12, (("in", 0), ("out", 0)))}


def test_iswap_wiring(gset):
    iswap = gset.gates["iswap"]
    assert iswap.output_permutation == ((0, 1), (1, 0))
    assert iswap.fresh_output_qubits == ()
    assert iswap.sqrt2_exponent == 0


def test_schema_errors():
    with pytest.raises(GateSetError):
        load_gateset("not json {")
    with pytest.raises(GateSetError):
        load_gateset(json.dumps({"id": "x", "gates": {
            "a": {"arity": 1, "kind": "simple", "modulus": 2,
                  "monomials": [[1, ["in0", "in0"]]]}}}))  # repeated slot
    with pytest.raises(GateSetError):
        load_gateset(json.dumps({"id": "x", "gates": {
            "a": {"arity": 1, "kind": "simple", "modulus": 2,
                  "monomials": [[1.5, ["in0"]]]}}}))  # non-integer coefficient
    with pytest.raises(GateSetError):
        load_gateset(json.dumps({"id": "x", "gates": {
            "a": {"arity": 1, "kind": "complex",
                  "expansion": [{"gate": "nope", "qubits": [0]}]}}}))
    with pytest.raises(GateSetError):
        load_gateset(json.dumps({"id": "x", "gates": {
            "a": {"arity": 2, "kind": "simple", "modulus": 2,
                  "diagonal_qubits": [0], "fresh_output_qubits": [0, 1],
                  "monomials": [[1, ["in0"]]]}}}))  # partition mismatch


def test_all_shipped_gates_are_unitary(zset, tset, gset):
    for gs in (zset, tset, gset):
        augmented, _ = adjoint_extension(gs)
        for name, spec in augmented.gates.items():
            mat = gate_matrix(spec, augmented)
            dim = mat.shape[0]
            assert np.max(np.abs(mat @ mat.conj().T - np.eye(dim))) < 1e-12, (gs.id, name)


def test_cnot_expansion_matches_truth_table_exactly(zset):
    mat = gate_matrix(zset.gates["cnot"], zset)
    expected = np.zeros((4, 4), dtype=complex)
    for a0 in (0, 1):
        for a1 in (0, 1):
            expected[a0 + 2 * (a1 ^ a0), a0 + 2 * a1] = 1
    assert np.array_equal(mat, expected)


def test_toffoli_expansion(zset):
    mat = gate_matrix(zset.gates["toffoli"], zset)
    expected = np.zeros((8, 8), dtype=complex)
    for idx in range(8):
        a0, a1, a2 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
        expected[a0 + 2 * a1 + 4 * (a2 ^ (a0 & a1)), idx] = 1
    assert np.array_equal(mat, expected)


# -- parsing -----------------------------------------------------------------

def test_parse_simple(zset):
    c = parse_circuit("qubits 2\nh 0\ncx 0 1\n", "simple", zset)
    assert c.num_qubits == 2
    assert c.gates == (Gate("h", (0,)), Gate("cnot", (0, 1)))


def test_parse_simple_comments_and_ccz(zset):
    c = parse_circuit("# preamble\nqubits 3\nccz 0 1 2  # tail\n", "simple", zset)
    assert c.gates == (Gate("ccz", (0, 1, 2)),)


def test_parse_errors_carry_line_numbers(zset):
    with pytest.raises(CircuitParseError, match="line 2"):
        parse_circuit("qubits 2\nbogus 0\n", "simple", zset)
    with pytest.raises(CircuitParseError, match="line 3"):
        parse_circuit("qubits 2\nh 0\nh 5\n", "simple", zset)
    with pytest.raises(CircuitParseError, match="line 2"):
        parse_circuit("qubits 2\nh zero\n", "simple", zset)
    with pytest.raises(CircuitParseError, match="line 1"):
        parse_circuit("h 0\n", "simple", zset)


def test_parse_grcs(zset):
    c = parse_circuit("0 h 5\n", "grcs", zset)
    assert c.num_qubits == 6
    assert c.gates == (Gate("h", (5,), moment=0),)


def test_parse_grcs_header_and_moment_order(gset):
    text = "8\n1 cz 0 1\n0 h 1\n0 h 0\n"
    c = parse_circuit(text, "grcs", gset)
    assert c.num_qubits == 8
    assert [g.name for g in c.gates] == ["h", "h", "cz"]
    assert [g.moment for g in c.gates] == [0, 0, 1]


def test_round_trip_simple_format(zset):
    rng = rng_for(3)
    for _ in range(20):
        c = random_circuit(zset, int(rng.integers(1, 6)), int(rng.integers(0, 12)), rng)
        assert parse_circuit(serialize_circuit(c), "simple", zset) == c


def test_validate_circuit(zset):
    with pytest.raises(ValueError):
        validate_circuit(Circuit(1, (Gate("h", (1,)),), "z"), zset)
    with pytest.raises(GateSetError):
        validate_circuit(Circuit(1, (Gate("nope", (0,)),), "z"), zset)
    with pytest.raises(ValueError):
        Gate("cz", (0, 0))


# -- generators --------------------------------------------------------------

def test_ghz_shapes():
    assert generate_ghz(1).gates == (Gate("h", (0,)),)
    assert generate_ghz(3).gates == (Gate("h", (0,)), Gate("cnot", (0, 1)),
                                     Gate("cnot", (1, 2)))
    assert len(generate_ghz(100).gates) == 100


def test_bv_shapes():
    c = generate_bv(2)
    assert [g.name for g in c.gates] == ["h", "h", "z", "z", "h", "h"]
    # the 3n form lands one gate above the 3n-1 construction seen elsewhere
    assert len(generate_bv(100).gates) == 300


def test_bv_concentrates_on_all_ones(zset):
    for n in (1, 3, 6):
        state = sv_state(generate_bv(n), zset)
        assert abs(abs(state[(1 << n) - 1]) - 1.0) < 1e-9


def test_linear_network_determinism_and_bounds():
    c1, p1 = generate_linear_network(20, 5, seed=42)
    c2, p2 = generate_linear_network(20, 5, seed=42)
    assert c1 == c2 and p1 == p2
    assert all(len(t) <= 3 for t in p1)
    with pytest.raises(ValueError):
        generate_linear_network(4, 5, 0)
    with pytest.raises(ValueError):
        generate_linear_network(4, 2, 0)


def test_linear_network_zero_alphas_only_cubic():
    c, poly = generate_linear_network(10, 3, 0, alphas=[0] * 10)
    assert set(g.name for g in c.gates) <= {"h", "ccz"}
    assert all(len(t) == 3 for t in poly)


def test_linear_network_gate_count_band():
    # one cubic term per window keeps the 10-seed average near 161
    means = [len(generate_linear_network(20, 5, s)[0].gates) for s in range(10)]
    assert 145 <= sum(means) / 10 <= 180


def test_linear_network_windows_are_local():
    _, poly = generate_linear_network(30, 5, seed=9)
    for term in poly:
        if len(term) == 3:
            assert max(term) - min(term) <= 4


# -- adjoints ----------------------------------------------------------------

def test_self_inverse_gates_map_to_themselves(zset):
    _, mapping = adjoint_extension(zset)
    for name in ("h", "z", "cz", "ccz", "cnot", "toffoli"):
        assert mapping[name] == name


def test_t_adjoint_exponent(tset):
    augmented, mapping = adjoint_extension(tset)
    assert mapping["t"] == "t_dg"
    assert augmented.gates["t_dg"].monomials == ((7, (("in", 0),)),)


def test_adjoint_matrices_are_daggers(zset, tset, gset):
    for gs in (zset, tset, gset):
        augmented, mapping = adjoint_extension(gs)
        for name in gs.gates:
            mat = gate_matrix(augmented.gates[name], augmented)
            adj = gate_matrix(augmented.gates[mapping[name]], augmented)
            assert np.max(np.abs(adj - mat.conj().T)) < 1e-12, (gs.id, name)


def test_adjoint_is_an_involution(zset, tset, gset):
    rng = rng_for(8)
    for gs in (zset, tset, gset):
        for _ in range(10):
            c = random_circuit(gs, 4, int(rng.integers(1, 15)), rng)
            augmented, _ = adjoint_extension(gs)
            twice = adjoint(adjoint(c, gs), augmented)
            assert twice.gates == c.gates


def test_iswap_adjoint_negates_exponents(gset):
    augmented, mapping = adjoint_extension(gset)
    spec = augmented.gates[mapping["iswap"]]
    assert mapping["iswap"] == "iswap_dg"
    assert {c for c, _ in spec.monomials} == {6, 12}
    assert spec.output_permutation == ((0, 1), (1, 0))

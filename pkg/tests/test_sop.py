import pytest

from feyndd.circuit import Circuit, Gate
from feyndd.exactnum import CyclotomicValue, to_complex
from feyndd.oracle import pathsum_eval, sv_unitary_trace
from feyndd.sop import (
    Monomial,
    SopPolynomial,
    amplitude_tensor,
    circuit_to_sop,
    contract,
    difference_tensor,
    format_tensor,
    simplify_pairs,
    substitute,
    trace_tensor,
)

from util import random_circuit, rng_for


GOLD = "x1*x4 + x2*x5 + x3*x4*x5 + x3*x5 + x3*x7 + x4 + x4*x6*x7 + x5*x6 " \
       "[r=2, s=4, internal={x5}]"


def test_branching_circuit_polynomial(branching_circuit, zset):
    t = circuit_to_sop(branching_circuit, zset)
    expected = {
        (1, (1, 4)), (1, (2, 5)), (1, (3, 5)), (1, (3, 4, 5)),
        (1, (4,)), (1, (5, 6)), (1, (3, 7)), (1, (4, 6, 7)),
    }
    assert {(c, v) for c, v in t.poly.terms} == expected
    assert t.internal_vars == frozenset({5})
    assert t.sqrt2_exponent == 4
    assert t.input_vars == (1, 2, 3)
    assert t.output_vars == (4, 6, 7)
    assert format_tensor(t) == GOLD


def test_single_h(zset):
    t = circuit_to_sop(Circuit(1, (Gate("h", (0,)),), "z"), zset)
    assert t.poly.terms == (Monomial(1, (1, 2)),)
    assert t.sqrt2_exponent == 1
    assert (t.input_vars, t.output_vars) == ((1,), (2,))
    assert not t.internal_vars


def test_cnot_expansion_is_a_delta(zset):
    t = circuit_to_sop(Circuit(2, (Gate("cnot", (0, 1)),), "z"), zset)
    assert len(t.internal_vars) == 1
    for a in (0, 1):
        for b in (0, 1):
            for out in (0, 1):
                val = pathsum_eval(t, {t.input_vars[0]: a, t.input_vars[1]: b,
                                       t.output_vars[1]: out})
                want = 1 if out == a ^ b else 0
                assert val == CyclotomicValue.integer(want, 2)


def test_substitute_basic():
    poly = SopPolynomial(2, (Monomial(1, (1, 4)), Monomial(1, (4,))))
    from feyndd.sop import SopTensor, VarInfo
    t = SopTensor(modulus=2, sqrt2_exponent=0, input_vars=(1,), output_vars=(4,),
                  internal_vars=frozenset(), poly=poly, bound={},
                  provenance={1: VarInfo(0, -1, -1), 4: VarInfo(0, 0, 0)})
    out = substitute(t, {1: 0})
    assert out.poly.terms == (Monomial(1, (4,)),)
    out2 = substitute(t, {1: 1, 4: 1})
    assert out2.poly.terms == ()
    assert out2.phase == 0  # 1*1 + 1 = 2 = 0 mod 2
    with pytest.raises(ValueError):
        substitute(t, {99: 0})


def test_substitute_inputs_only_golden(branching_circuit, zset):
    t = circuit_to_sop(branching_circuit, zset)
    red = substitute(t, {1: 0, 2: 0, 3: 0})
    assert {v for _, v in red.poly.terms} == {(4,), (5, 6), (4, 6, 7)}
    assert len(red.poly.variables()) == 4


def test_substitute_conflict_sets_zero_flag(zset):
    t = circuit_to_sop(Circuit(1, (Gate("z", (0,)),), "z"), zset)
    assert t.input_vars == t.output_vars  # diagonal circuit shares the wire label
    out = substitute(substitute(t, {1: 0}), {1: 1})
    assert out.zero_flag


def test_substitute_internal_rejected(zset):
    t = circuit_to_sop(Circuit(2, (Gate("cnot", (0, 1)),), "z"), zset)
    internal = next(iter(t.internal_vars))
    with pytest.raises(ValueError):
        substitute(t, {internal: 0})


def test_amplitude_tensor_golden(branching_circuit, zset):
    t = circuit_to_sop(branching_circuit, zset)
    amp = amplitude_tensor(t, "000")
    assert pathsum_eval(amp) == CyclotomicValue(2, (2, 0), 4)  # value 1/2
    assert amp.free_vars() == {5}


def test_amplitude_tensor_diagonal_cases(zset):
    t = circuit_to_sop(Circuit(1, (Gate("z", (0,)),), "z"), zset)
    ok = amplitude_tensor(t, "0")
    assert pathsum_eval(ok) == CyclotomicValue.integer(1, 2)
    contradiction = amplitude_tensor(t, "1")
    assert contradiction.zero_flag
    with pytest.raises(ValueError):
        amplitude_tensor(t, "01")


def test_contract_h_pair_traces_to_identity(zset):
    t = circuit_to_sop(Circuit(1, (Gate("h", (0,)), Gate("h", (0,))), "z"), zset)
    closed = contract(t, [(t.input_vars[0], t.output_vars[0])])
    assert closed.input_vars == (None,)
    assert pathsum_eval(closed) == CyclotomicValue.integer(2, 2)


def test_contract_self_pair_is_noop(zset):
    t = circuit_to_sop(Circuit(1, (Gate("z", (0,)),), "z"), zset)
    assert contract(t, [(1, 1)]) == t


def test_contract_rejects_internal(zset):
    t = circuit_to_sop(Circuit(2, (Gate("cnot", (0, 1)),), "z"), zset)
    internal = next(iter(t.internal_vars))
    with pytest.raises(ValueError):
        contract(t, [(t.input_vars[0], internal)])


def test_contract_commutes_with_substitution(zset):
    rng = rng_for(17)
    for _ in range(25):
        c = random_circuit(zset, 3, int(rng.integers(1, 8)), rng)
        t = circuit_to_sop(c, zset)
        if len(t.free_vars()) > 12:
            continue
        vin, vout = t.input_vars[0], t.output_vars[0]
        other_in = t.input_vars[1]
        if len({vin, vout, other_in}) < 3:
            continue
        bit = int(rng.integers(0, 2))
        a = substitute(contract(t, [(vin, vout)]), {other_in: bit})
        b = contract(substitute(t, {other_in: bit}), [(vin, vout)])
        assert pathsum_eval(a) == pathsum_eval(b)


def test_simplify_pairs_basic(zset):
    # two h gates back to back: x2 occurs in exactly two bilinear terms
    t = circuit_to_sop(Circuit(1, (Gate("h", (0,)), Gate("h", (0,))), "z"), zset)
    before = pathsum_eval(t, {t.input_vars[0]: 1, t.output_vars[0]: 1})
    s = simplify_pairs(t)
    assert s.sqrt2_exponent == t.sqrt2_exponent - 2
    assert not s.poly.terms
    assert s.input_vars == s.output_vars  # collapsed to the identity wire
    after = pathsum_eval(s, {s.input_vars[0]: 1})
    assert before == after


def test_simplify_pairs_requires_exactly_two_occurrences(zset):
    t = circuit_to_sop(Circuit(2, (Gate("cnot", (0, 1)),), "z"), zset)
    assert simplify_pairs(t) == t  # the summed variable occurs three times


def test_simplify_pairs_preserves_value_and_shrinks(zset, tset, gset):
    rng = rng_for(5)
    for gs in (zset, tset, gset):
        for _ in range(20):
            circ = random_circuit(gs, 3, int(rng.integers(2, 10)), rng)
            raw = circuit_to_sop(circ, gs)
            t = substitute(raw, {v: 0 for v in set(raw.input_vars)})
            s = simplify_pairs(t)
            assert len(s.free_vars()) <= len(t.free_vars())
            if len(t.free_vars()) <= 14:
                assert pathsum_eval(s) == pathsum_eval(t)


def test_trace_tensor_examples(zset):
    ident = circuit_to_sop(Circuit(1, (), "z"), zset)
    assert pathsum_eval(trace_tensor(ident)) == CyclotomicValue.integer(2, 2)
    zgate = circuit_to_sop(Circuit(1, (Gate("z", (0,)),), "z"), zset)
    assert pathsum_eval(trace_tensor(zgate)) == CyclotomicValue.zero(2)


def test_trace_matches_statevector(zset, tset, gset):
    rng = rng_for(23)
    for gs in (zset, tset, gset):
        for _ in range(8):
            c = random_circuit(gs, 3, int(rng.integers(1, 10)), rng)
            t = simplify_pairs(trace_tensor(circuit_to_sop(c, gs)))
            if len(t.free_vars()) > 16:
                continue
            got = to_complex(pathsum_eval(t))
            assert abs(got - sv_unitary_trace(c, gs)) < 1e-9


def test_difference_tensor_structure(tset):
    t = circuit_to_sop(Circuit(2, (Gate("h", (0,)), Gate("cnot", (0, 1))), "t"), tset)
    t = substitute(t, {v: 0 for v in t.input_vars})
    f = difference_tensor(t)
    assert f.sqrt2_exponent == 2 * t.sqrt2_exponent
    assert len(f.poly.terms) <= 2 * len(t.poly.terms)
    assert len(f.internal_vars) == 2 * len(t.internal_vars)


def test_difference_tensor_requires_bound_inputs(zset):
    t = circuit_to_sop(Circuit(1, (Gate("h", (0,)),), "z"), zset)
    with pytest.raises(ValueError):
        difference_tensor(t)


def test_difference_of_constant_counts_everything(zset):
    t = circuit_to_sop(Circuit(1, (Gate("h", (0,)), Gate("h", (0,))), "z"), zset)
    t = substitute(t, {t.input_vars[0]: 0})
    f = difference_tensor(t)
    # value sums to 1 over outputs: total probability
    total = pathsum_eval(f)
    got = sum(c * 1 for c in total.normalized().coeffs)
    assert to_complex(total) == 1


def test_degree_and_term_bounds(zset, tset, gset):
    rng = rng_for(31)
    for gs in (zset, tset, gset):
        for _ in range(10):
            m = int(rng.integers(1, 30))
            c = random_circuit(gs, 5, m, rng)
            t = circuit_to_sop(c, gs)
            assert t.poly.degree() <= 3
            assert len(t.poly.terms) <= 4 * m + 1


def test_zero_tensor_formats(zset):
    t = circuit_to_sop(Circuit(1, (Gate("z", (0,)),), "z"), zset)
    z = amplitude_tensor(t, "1")
    assert "ZERO" in format_tensor(z)

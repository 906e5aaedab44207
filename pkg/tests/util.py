"""Shared test helpers: seeded random circuits and polynomials."""
from __future__ import annotations

import numpy as np

from feyndd.circuit import Circuit, Gate, GateSetConfig
from feyndd.sop import Monomial, SopPolynomial


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def random_circuit(gateset: GateSetConfig, n: int, m: int,
                   rng: np.random.Generator) -> Circuit:
    names = sorted(nm for nm, sp in gateset.gates.items() if sp.arity <= n)
    gates = []
    for _ in range(m):
        name = names[int(rng.integers(0, len(names)))]
        arity = gateset.gates[name].arity
        qubits = tuple(int(q) for q in rng.choice(n, size=arity, replace=False))
        gates.append(Gate(name, qubits))
    return Circuit(n, tuple(gates), gateset.id)


def random_polynomial(num_vars: int, num_terms: int, modulus: int,
                      rng: np.random.Generator, max_degree: int = 3) -> SopPolynomial:
    merged: dict[tuple[int, ...], int] = {}
    for _ in range(num_terms):
        degree = int(rng.integers(1, max_degree + 1))
        degree = min(degree, num_vars)
        vars_ = tuple(sorted(int(v) for v in rng.choice(num_vars, size=degree,
                                                        replace=False)))
        coeff = int(rng.integers(1, modulus))
        merged[vars_] = (merged.get(vars_, 0) + coeff) % modulus
    terms = tuple(Monomial(c, v) for v, c in sorted(merged.items()) if c)
    return SopPolynomial(modulus, terms)


def brute_force_counts(poly: SopPolynomial, num_vars: int) -> tuple[int, ...]:
    """Count assignments per residue by vectorized enumeration."""
    total = 1 << num_vars
    index = np.arange(total, dtype=np.int64)
    acc = np.zeros(total, dtype=np.int64)
    for coeff, vars_ in poly.terms:
        mask = 0
        for v in vars_:
            mask |= 1 << v
        acc[(index & mask) == mask] += coeff
    counts = np.bincount(acc % poly.modulus, minlength=poly.modulus)
    return tuple(int(c) for c in counts)

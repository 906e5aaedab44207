import pytest

from feyndd.circuit import Circuit, Gate, builtin_gateset


@pytest.fixture(scope="session")
def zset():
    return builtin_gateset("z")


@pytest.fixture(scope="session")
def tset():
    return builtin_gateset("t")


@pytest.fixture(scope="session")
def gset():
    return builtin_gateset("g")


@pytest.fixture(scope="session")
def branching_circuit():
    """Three qubits, eight gates; its exponent polynomial has eight terms and
    one summed variable, a handy golden case throughout the suite."""
    gates = (
        Gate("h", (0,)),
        Gate("h", (1,)),
        Gate("cz", (1, 2)),
        Gate("ccz", (0, 1, 2)),
        Gate("z", (0,)),
        Gate("h", (1,)),
        Gate("h", (2,)),
        Gate("ccz", (0, 1, 2)),
    )
    return Circuit(3, gates, "z")

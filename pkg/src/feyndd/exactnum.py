"""Exact values: cyclotomic integers with a dyadic sqrt(2) prefactor.

Every quantity the pipeline produces has the shape
``(sum_j c_j * omega**j) * 2**(-s/2)`` where ``omega = exp(2*pi*i/r)`` is the
r-th root of unity, the ``c_j`` are arbitrary-precision signed integers and
``s`` is a (possibly negative) integer exponent.  Arithmetic and equality are
exact; floating point appears only at the rendering boundary.

Internally the power basis ``1, omega, ..., omega**(r-1)`` is kept redundant;
reduction modulo the r-th cyclotomic polynomial happens lazily, when equality
or a canonical form is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import mpmath

__all__ = [
    "CyclotomicValue",
    "cyclotomic_coefficients",
    "from_counts",
    "equals_integer",
    "to_mpmath",
    "to_complex",
    "probability",
    "to_json",
]


def _poly_div_exact(num: Sequence[int], den: Sequence[int]) -> list[int]:
    """Divide num by the monic polynomial den over Z; the remainder must vanish."""
    work = list(num)
    dn = len(den) - 1
    qn = len(work) - 1 - dn
    quot = [0] * (qn + 1)
    for k in range(qn, -1, -1):
        c = work[k + dn]
        quot[k] = c
        if c:
            for j in range(dn + 1):
                work[k + j] -= c * den[j]
    if any(work[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_coefficients(r: int) -> tuple[int, ...]:
    """Coefficients of the r-th cyclotomic polynomial, lowest degree first."""
    if r < 1:
        raise ValueError("r must be positive")
    poly: list[int] = [-1] + [0] * (r - 1) + [1]  # X^r - 1
    for d in range(1, r):
        if r % d == 0:
            poly = _poly_div_exact(poly, cyclotomic_coefficients(d))
    return tuple(poly)


def _reduce(coeffs: Sequence[int], r: int) -> tuple[int, ...]:
    """Remainder of sum(c_j X^j) modulo the r-th cyclotomic polynomial."""
    phi = cyclotomic_coefficients(r)
    deg = len(phi) - 1
    work = list(coeffs) + [0] * max(0, deg - len(coeffs))
    for k in range(len(work) - 1, deg - 1, -1):
        c = work[k]
        if c:
            for j in range(deg + 1):
                work[k - deg + j] -= c * phi[j]
    return tuple(work[:deg])


def _sqrt2_vector(r: int) -> tuple[int, ...]:
    # sqrt(2) = omega^(r/8) + omega^(7r/8); exists in Z[omega_r] only for 8 | r.
    if r % 8 != 0:
        raise ValueError(f"sqrt(2) is not an element of Z[omega_{r}]")
    vec = [0] * r
    vec[r // 8] += 1
    vec[7 * r // 8] += 1
    return tuple(vec)


def _cyclic_mul(a: Sequence[int], b: Sequence[int], r: int) -> tuple[int, ...]:
    out = [0] * r
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[(i + j) % r] += ca * cb
    return tuple(out)


@dataclass(frozen=True, eq=False)
class CyclotomicValue:
    """An element of Z[omega_r][sqrt2, 1/sqrt2] in the redundant power basis."""

    modulus: int
    coeffs: tuple[int, ...]
    sqrt2_exponent: int = 0

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if len(self.coeffs) != self.modulus:
            raise ValueError("coefficient vector length must equal the modulus")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, modulus: int) -> "CyclotomicValue":
        return cls(modulus, (0,) * modulus, 0)

    @classmethod
    def integer(cls, n: int, modulus: int) -> "CyclotomicValue":
        return cls(modulus, (n,) + (0,) * (modulus - 1), 0)

    @classmethod
    def root_power(cls, j: int, modulus: int, sqrt2_exponent: int = 0) -> "CyclotomicValue":
        vec = [0] * modulus
        vec[j % modulus] = 1
        return cls(modulus, tuple(vec), sqrt2_exponent)

    # -- canonical form ----------------------------------------------------

    def _normal_form(self) -> tuple[tuple[int, ...], int]:
        red = list(_reduce(self.coeffs, self.modulus))
        if not any(red):
            return tuple(red), 0
        s = self.sqrt2_exponent
        if s % 2 and self.modulus % 8 == 0:
            # absorb one sqrt(2) into the coefficients so s becomes even
            lifted = _cyclic_mul(red + [0] * (self.modulus - len(red)),
                                 _sqrt2_vector(self.modulus), self.modulus)
            red = list(_reduce(lifted, self.modulus))
            s += 1
        while all(c % 2 == 0 for c in red):
            red = [c // 2 for c in red]
            s -= 2
        return tuple(red), s

    def normalized(self) -> "CyclotomicValue":
        """Canonical representative: reduced, with powers of 2 stripped into s."""
        red, s = self._normal_form()
        padded = tuple(red) + (0,) * (self.modulus - len(red))
        return CyclotomicValue(self.modulus, padded, s)

    def is_zero(self) -> bool:
        return not any(_reduce(self.coeffs, self.modulus))

    # -- arithmetic --------------------------------------------------------

    def _check_same_ring(self, other: "CyclotomicValue") -> None:
        if self.modulus != other.modulus:
            raise ValueError("mixed moduli are not supported")

    def _raised_to(self, s_target: int) -> "CyclotomicValue":
        d = s_target - self.sqrt2_exponent
        if d == 0:
            return self
        if d < 0:
            raise ValueError("can only raise the sqrt2 exponent")
        if self.is_zero():
            return CyclotomicValue.zero(self.modulus)._replace_s(s_target)
        coeffs = self.coeffs
        if d % 2:
            coeffs = _cyclic_mul(coeffs, _sqrt2_vector(self.modulus), self.modulus)
            d -= 1
        factor = 1 << (d // 2)
        return CyclotomicValue(self.modulus, tuple(c * factor for c in coeffs), s_target)

    def _replace_s(self, s: int) -> "CyclotomicValue":
        return CyclotomicValue(self.modulus, self.coeffs, s)

    def __add__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        self._check_same_ring(other)
        s = max(self.sqrt2_exponent, other.sqrt2_exponent)
        a, b = self._raised_to(s), other._raised_to(s)
        return CyclotomicValue(self.modulus,
                               tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), s)

    def __neg__(self) -> "CyclotomicValue":
        return CyclotomicValue(self.modulus, tuple(-c for c in self.coeffs),
                               self.sqrt2_exponent)

    def __sub__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicValue(self.modulus, tuple(c * other for c in self.coeffs),
                                   self.sqrt2_exponent)
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        self._check_same_ring(other)
        return CyclotomicValue(self.modulus,
                               _cyclic_mul(self.coeffs, other.coeffs, self.modulus),
                               self.sqrt2_exponent + other.sqrt2_exponent)

    __rmul__ = __mul__

    def conj(self) -> "CyclotomicValue":
        r = self.modulus
        vec = [0] * r
        for j, c in enumerate(self.coeffs):
            vec[(r - j) % r] += c
        return CyclotomicValue(r, tuple(vec), self.sqrt2_exponent)

    def abs_squared(self) -> "CyclotomicValue":
        return self * self.conj()

    # -- comparison --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        self._check_same_ring(other)
        return self._normal_form() == other._normal_form()

    def __hash__(self) -> int:
        red, s = self._normal_form()
        return hash((self.modulus, red, s))

    def __repr__(self) -> str:
        return (f"CyclotomicValue(r={self.modulus}, coeffs={list(self.coeffs)}, "
                f"sqrt2_exponent={self.sqrt2_exponent})")


def from_counts(counts: Sequence[int], sqrt2_exponent: int, phase: int = 0,
                modulus: int | None = None) -> CyclotomicValue:
    """Value of omega^phase * sum_j N_j omega^j scaled by 2^(-s/2)."""
    r = modulus if modulus is not None else len(counts)
    if len(counts) != r:
        raise ValueError("count vector length must equal the modulus")
    vec = [0] * r
    for j in range(r):
        vec[(j + phase) % r] += counts[j]
    return CyclotomicValue(r, tuple(vec), sqrt2_exponent)


def equals_integer(value: CyclotomicValue, n: int) -> bool:
    """Exact comparison of a value against a plain integer."""
    return value == CyclotomicValue.integer(n, value.modulus)


def to_mpmath(value: CyclotomicValue, precision: int = 53) -> "mpmath.mpc":
    """Evaluate numerically with the given binary mantissa width.

    The rounding error is bounded by |value| * 2^-(precision - ceil(log2 sum|c_j|)).
    """
    if precision < 53:
        raise ValueError("precision below 53 bits is not supported")
    with mpmath.workprec(precision):
        re = mpmath.mpf(0)
        im = mpmath.mpf(0)
        r = value.modulus
        for j, c in enumerate(value.coeffs):
            if c:
                frac = mpmath.mpf(2 * j) / r
                re += c * mpmath.cospi(frac)
                im += c * mpmath.sinpi(frac)
        scale = mpmath.power(2, -mpmath.mpf(value.sqrt2_exponent) / 2)
        return mpmath.mpc(re * scale, im * scale)


def to_complex(value: CyclotomicValue, precision: int = 53) -> complex:
    z = to_mpmath(value, precision)
    return complex(float(z.real), float(z.imag))


def probability(value: CyclotomicValue, tol: float = 1e-9) -> float:
    """Render an exactly-real value as a probability in [0, 1].

    A large imaginary residue signals an upstream bug, because probabilities
    are real by construction; it raises rather than being silently dropped.
    """
    z = to_mpmath(value, 80)
    mag = abs(z)
    if abs(z.imag) > tol * (1 + mag):
        raise ArithmeticError(f"probability has imaginary residue {z.imag}")
    p = float(z.real)
    if p < -tol or p > 1 + tol:
        raise ArithmeticError(f"probability {p} outside [0, 1]")
    return min(1.0, max(0.0, p))


def to_json(value: CyclotomicValue) -> dict:
    """Decimal/JSON rendering: float parts plus the exact representation."""
    norm = value.normalized()
    z = to_complex(norm)
    return {
        "re": z.real,
        "im": z.imag,
        "exact": {
            "r": norm.modulus,
            "coeffs": list(norm.coeffs),
            "sqrt2_exp": norm.sqrt2_exponent,
        },
    }

"""Generalized Pauli operators gamma^a Z(z) X(x) over G and normalizer gates.

The label (a, z, x) always means gamma^a * Z(z) * X(x) in that order, with
X(x)|h> = |h + x> and Z(z)|h> = chi_z(h)|h>.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

from .groups import Group, GroupElement, GroupMismatchError, PhaseExp, char_exp_raw
from .homomorphism import (HomMatrix, InvalidHomomorphismError, dual,
                           invert_automorphism, validate)
from .quadratic import QuadraticFunction, bicharacter_hom


class InvalidGateError(ValueError):
    pass


@dataclass(frozen=True)
class PauliOperator:
    group: Group
    a: int
    z: tuple[int, ...]
    x: tuple[int, ...]

    def __init__(self, group: Group, a: int, z: Sequence[int] | GroupElement,
                 x: Sequence[int] | GroupElement):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "a", int(a) % group.phase_modulus)
        object.__setattr__(self, "z", group.reduce(tuple(z)))
        object.__setattr__(self, "x", group.reduce(tuple(x)))

    @classmethod
    def identity(cls, G: Group) -> "PauliOperator":
        zero = (0,) * len(G)
        return cls(G, 0, zero, zero)

    @classmethod
    def Z(cls, G: Group, z, a: int = 0) -> "PauliOperator":
        return cls(G, a, z, (0,) * len(G))

    @classmethod
    def X(cls, G: Group, x, a: int = 0) -> "PauliOperator":
        return cls(G, a, (0,) * len(G), x)

    @property
    def phase(self) -> PhaseExp:
        return PhaseExp(self.group, self.a)

    @property
    def z_part(self) -> GroupElement:
        return GroupElement(self.group, self.z)

    @property
    def x_part(self) -> GroupElement:
        return GroupElement(self.group, self.x)

    def is_identity(self) -> bool:
        return self.a == 0 and not any(self.z) and not any(self.x)

    def is_diagonal(self) -> bool:
        return not any(self.x)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __pow__(self, n: int) -> "PauliOperator":
        return power(self, n)

    def __repr__(self) -> str:
        return f"σ({self.a}, z={list(self.z)}, x={list(self.x)})"


def _cexp(G: Group, g: Sequence[int], h: Sequence[int]) -> int:
    return char_exp_raw(G.char_weights, G.phase_modulus, g, h)


def multiply(s: PauliOperator, t: PauliOperator) -> PauliOperator:
    """Label of the matrix product s t."""
    G = s.group
    if t.group != G:
        raise GroupMismatchError(f"{s.group} vs {t.group}")
    # X(x_s) Z(z_t) = conj(chi_{z_t}(x_s)) Z(z_t) X(x_s)
    a = s.a + t.a - _cexp(G, t.z, s.x)
    return PauliOperator(G, a, [p + q for p, q in zip(s.z, t.z)],
                         [p + q for p, q in zip(s.x, t.x)])


def power(s: PauliOperator, n: int) -> PauliOperator:
    """Label of s**n, closed form: (Z(z)X(x))^n = chi_z(x)^{-n(n-1)/2} Z(nz)X(nx)."""
    G = s.group
    n = int(n)
    if n < 0:
        return power(adjoint(s), -n)
    a = n * s.a - (n * (n - 1) // 2) * _cexp(G, s.z, s.x)
    return PauliOperator(G, a, [n * v for v in s.z], [n * v for v in s.x])


def power_by_squaring(s: PauliOperator, n: int) -> PauliOperator:
    result = PauliOperator.identity(s.group)
    base = s
    n = int(n)
    if n < 0:
        base, n = adjoint(s), -n
    while n:
        if n & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        n >>= 1
    return result


def adjoint(s: PauliOperator) -> PauliOperator:
    """(gamma^a Z(z) X(x))^dagger = gamma^{-a - chi(z,x)} Z(-z) X(-x)."""
    G = s.group
    return PauliOperator(G, -s.a - _cexp(G, s.z, s.x), [-v for v in s.z], [-v for v in s.x])


def commute(s: PauliOperator, t: PauliOperator) -> bool:
    if s.group != t.group:
        raise GroupMismatchError(f"{s.group} vs {t.group}")
    G = s.group
    return _cexp(G, s.z, t.x) == _cexp(G, t.z, s.x)


def product(ops: Iterable[tuple[PauliOperator, int]], G: Group) -> PauliOperator:
    """prod_i s_i^{w_i} in the given order."""
    out = PauliOperator.identity(G)
    n = G.phase_modulus
    for s, w in ops:
        w %= n
        if w:
            out = multiply(out, power(s, w))
    return out


def order(s: PauliOperator) -> int:
    """Smallest N > 0 with s^N = identity; always divides 2|G|."""
    import math

    G = s.group
    n0 = 1
    for v, d in zip(s.z + s.x, G.moduli + G.moduli):
        n0 = math.lcm(n0, d // math.gcd(v, d))
    a = power(s, n0).a
    n = G.phase_modulus
    return n0 * (n // math.gcd(a, n))


# --- normalizer gates ------------------------------------------------------


@dataclass(frozen=True)
class QFT:
    group: Group
    registers: tuple[int, ...]

    def __init__(self, group: Group, registers: Iterable[int]):
        regs = tuple(sorted(set(int(r) for r in registers)))
        if not regs:
            raise InvalidGateError("QFT needs at least one register")
        if any(r < 0 or r >= len(group) for r in regs):
            raise InvalidGateError(f"register out of range in {regs}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "registers", regs)


@dataclass(frozen=True)
class Automorphism:
    matrix: HomMatrix

    def __post_init__(self):
        A = self.matrix
        if A.domain != A.codomain:
            raise InvalidGateError("automorphism must map G to G")
        if not validate(A):
            raise InvalidGateError("matrix is not a valid homomorphism")
        try:
            inv = invert_automorphism(A)
        except InvalidHomomorphismError as exc:
            raise InvalidGateError(f"not an automorphism: {exc}") from exc
        object.__setattr__(self, "_inverse", inv)

    @property
    def group(self) -> Group:
        return self.matrix.domain

    @cached_property
    def inverse_dual(self) -> HomMatrix:
        """alpha^{-*} = (alpha^{-1})^*, used on Z labels."""
        return dual(self._inverse)


@dataclass(frozen=True)
class QuadraticPhase:
    function: QuadraticFunction

    @property
    def group(self) -> Group:
        return self.function.group

    @cached_property
    def beta(self) -> HomMatrix:
        return bicharacter_hom(self.function)


@dataclass(frozen=True)
class PauliGate:
    pauli: PauliOperator

    @property
    def group(self) -> Group:
        return self.pauli.group


NormalizerGate = Union[QFT, Automorphism, QuadraticPhase, PauliGate]


def conjugate(gate: NormalizerGate, s: PauliOperator) -> PauliOperator:
    """Label of U s U^dagger."""
    G = s.group
    if gate.group != G:
        raise GroupMismatchError(f"gate acts on {gate.group}, operator on {G}")
    zero = (0,) * len(G)
    if isinstance(gate, QFT):
        # X(g) -> Z(g), Z(g) -> X(-g) on the listed registers
        R = set(gate.registers)
        z_in = [v if i in R else 0 for i, v in enumerate(s.z)]
        x_in = [v if i in R else 0 for i, v in enumerate(s.x)]
        z_out = [0 if i in R else v for i, v in enumerate(s.z)]
        x_out = [0 if i in R else v for i, v in enumerate(s.x)]
        # U s U^+ = gamma^a X(-z_in) Z(z_out) Z(x_in) X(x_out)
        left = PauliOperator(G, s.a, zero, [-v for v in z_in])
        right = PauliOperator(G, 0, [p + q for p, q in zip(z_out, x_in)], x_out)
        return multiply(left, right)
    if isinstance(gate, Automorphism):
        z = gate.inverse_dual.apply_raw(s.z)
        x = gate.matrix.apply_raw(s.x)
        return PauliOperator(G, s.a, z, x)
    if isinstance(gate, QuadraticPhase):
        # X(x) -> xi(x) X(x) Z(beta x) = xi(x) conj(chi_{beta x}(x)) Z(beta x) X(x)
        b = gate.beta.apply_raw(s.x)
        xi = gate.function.exponent(s.x)
        shifted = PauliOperator(G, xi - _cexp(G, b, s.x), b, s.x)
        return multiply(PauliOperator(G, s.a, s.z, zero), shifted)
    if isinstance(gate, PauliGate):
        P = gate.pauli
        # P s P^+ = chi_{z_P}(x_s) conj(chi_{z_s}(x_P)) s
        delta = _cexp(G, P.z, s.x) - _cexp(G, s.z, P.x)
        return PauliOperator(G, s.a + delta, s.z, s.x)
    raise InvalidGateError(f"unknown gate {gate!r}")

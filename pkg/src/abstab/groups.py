"""Finite abelian groups Z_{d1} x ... x Z_{dm}, their elements and characters.

Phases are never floats: every phase in the package is gamma**a with
gamma = exp(i*pi/|G|), stored as the integer exponent ``a`` mod 2|G|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence


class GroupMismatchError(ValueError):
    """Raised when an operation mixes elements of different groups."""


@dataclass(frozen=True)
class Group:
    """G = Z_{d1} x ... x Z_{dm}. Trivial factors d_i = 1 are kept."""

    moduli: tuple[int, ...]

    def __init__(self, moduli: Iterable[int]):
        mods = tuple(int(d) for d in moduli)
        if not mods:
            raise ValueError("a group needs at least one factor")
        if any(d < 1 for d in mods):
            raise ValueError(f"moduli must be positive, got {mods}")
        object.__setattr__(self, "moduli", mods)

    def __len__(self) -> int:
        return len(self.moduli)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def phase_modulus(self) -> int:
        return 2 * self.order

    @cached_property
    def exponent(self) -> int:
        """Least common multiple of the moduli."""
        return math.lcm(*self.moduli)

    @cached_property
    def char_weights(self) -> tuple[int, ...]:
        # 2|G|/d_i, exact
        n = self.phase_modulus
        return tuple(n // d for d in self.moduli)

    def element(self, residues: Iterable[int]) -> "GroupElement":
        return GroupElement(self, residues)

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * len(self.moduli))

    def basis(self, i: int) -> "GroupElement":
        """Canonical generator e_i."""
        res = [0] * len(self.moduli)
        res[i] = 1
        return GroupElement(self, res)

    def reduce(self, residues: Sequence[int]) -> tuple[int, ...]:
        if len(residues) != len(self.moduli):
            raise GroupMismatchError(
                f"expected {len(self.moduli)} residues, got {len(residues)}"
            )
        return tuple(int(x) % d for x, d in zip(residues, self.moduli))

    def elements(self) -> Iterator["GroupElement"]:
        """Enumerate all of G (small groups only)."""
        def rec(prefix: list[int], i: int):
            if i == len(self.moduli):
                yield GroupElement(self, prefix)
                return
            for x in range(self.moduli[i]):
                yield from rec(prefix + [x], i + 1)

        yield from rec([], 0)

    def product(self, other: "Group") -> "Group":
        return Group(self.moduli + other.moduli)

    def phase(self, a: int) -> "PhaseExp":
        return PhaseExp(self, a)

    def __repr__(self) -> str:
        return "Group(" + " x ".join(f"Z{d}" for d in self.moduli) + ")"


@dataclass(frozen=True)
class GroupElement:
    group: Group
    residues: tuple[int, ...] = field()

    def __init__(self, group: Group, residues: Iterable[int]):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "residues", group.reduce(tuple(residues)))

    def _check(self, other: "GroupElement") -> None:
        if self.group != other.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self, other)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return add(self, negate(other))

    def __neg__(self) -> "GroupElement":
        return negate(self)

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(self.group, (k * x for x in self.residues))

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.residues)

    def __len__(self) -> int:
        return len(self.residues)

    def __getitem__(self, i: int) -> int:
        return self.residues[i]

    def is_zero(self) -> bool:
        return not any(self.residues)

    def __repr__(self) -> str:
        return f"{list(self.residues)}"


@dataclass(frozen=True)
class PhaseExp:
    """gamma**exponent with gamma = exp(i*pi/|G|)."""

    group: Group
    exponent: int

    def __init__(self, group: Group, exponent: int):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "exponent", int(exponent) % group.phase_modulus)

    def __add__(self, other: "PhaseExp") -> "PhaseExp":
        if self.group != other.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")
        return PhaseExp(self.group, self.exponent + other.exponent)

    def __neg__(self) -> "PhaseExp":
        return PhaseExp(self.group, -self.exponent)

    def __complex__(self) -> complex:
        return phase_value(self.exponent, self.group.order)

    def __int__(self) -> int:
        return self.exponent


def phase_value(a: int, order: int) -> complex:
    """Numeric value of gamma**a for |G| = order."""
    n = 2 * order
    a %= n
    # reduce the fraction first so huge groups stay accurate
    g = math.gcd(a, n)
    return cmath.exp(1j * math.pi * 2 * (a // g) / (n // g))


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    g._check(h)
    return GroupElement(g.group, (x + y for x, y in zip(g.residues, h.residues)))


def negate(g: GroupElement) -> GroupElement:
    return GroupElement(g.group, (-x for x in g.residues))


def char_exp_raw(weights: Sequence[int], modulus: int, g: Sequence[int],
                 h: Sequence[int]) -> int:
    return sum(w * x * y for w, x, y in zip(weights, g, h)) % modulus


def character_exp(g: GroupElement, h: GroupElement) -> PhaseExp:
    """Exponent a with gamma**a = chi_g(h)."""
    g._check(h)
    G = g.group
    return PhaseExp(G, char_exp_raw(G.char_weights, G.phase_modulus,
                                    g.residues, h.residues))


def character_value(g: GroupElement, h: GroupElement) -> complex:
    """chi_g(h) by the floating product formula; for cross-checks."""
    return cmath.exp(2j * math.pi * sum(
        x * y / d for x, y, d in zip(g.residues, h.residues, g.group.moduli)))

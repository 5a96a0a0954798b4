"""Quadratic functions xi(g) = exp(i pi (g^T M g + C^T g + 2 v^T g)) on G."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

from .groups import Group, GroupElement, GroupMismatchError, PhaseExp
from .homomorphism import HomMatrix


class InvalidQuadraticError(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticFunction:
    """Normal form (M, v).  Equality of the functions is pointwise, see
    :func:`same_function`; (M, v) itself is not canonical."""

    group: Group
    M: tuple[tuple[Fraction, ...], ...]
    v: tuple[Fraction, ...]

    def __init__(self, group: Group, M: Sequence[Sequence], v: Sequence | None = None):
        m = len(group)
        Mf = tuple(tuple(Fraction(x) for x in row) for row in M)
        vf = tuple(Fraction(x) for x in (v if v is not None else [0] * m))
        if len(Mf) != m or any(len(row) != m for row in Mf) or len(vf) != m:
            raise InvalidQuadraticError("shape mismatch")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "M", Mf)
        object.__setattr__(self, "v", vf)
        self._validate()

    def _validate(self) -> None:
        d = self.group.moduli
        m = len(d)
        for i in range(m):
            for j in range(m):
                if self.M[i][j] != self.M[j][i]:
                    raise InvalidQuadraticError("M is not symmetric")
                if (d[j] * self.M[i][j]).denominator != 1:
                    raise InvalidQuadraticError(
                        f"d_{j} * M({i},{j}) is not an integer")
            if (d[i] * self.v[i]).denominator != 1:
                raise InvalidQuadraticError(f"v({i}) is not in (1/{d[i]})Z")

    @property
    def C(self) -> tuple[int, ...]:
        return tuple(int(self.M[i][i] * d) for i, d in enumerate(self.group.moduli))

    @cached_property
    def _int_form(self) -> tuple[list[list[int]], list[int]]:
        # n(g) = g^T K g + l^T g with K = |G| M and l = |G| (C + 2v)
        N = self.group.order
        K = [[int(N * x) for x in row] for row in self.M]
        lin = [int(N * (c + 2 * v)) for c, v in zip(self.C, self.v)]
        return K, lin

    def exponent(self, x: Sequence[int]) -> int:
        K, lin = self._int_form
        m = len(x)
        total = 0
        for i in range(m):
            if x[i]:
                row = K[i]
                total += x[i] * (sum(row[j] * x[j] for j in range(m) if x[j]) + lin[i])
        return total % self.group.phase_modulus

    def __call__(self, g: GroupElement) -> PhaseExp:
        return evaluate(self, g)


def evaluate(Q: QuadraticFunction, g: GroupElement) -> PhaseExp:
    if g.group != Q.group:
        raise GroupMismatchError(f"{g} is not in {Q.group}")
    return PhaseExp(Q.group, Q.exponent(g.residues))


def same_function(P: QuadraticFunction, Q: QuadraticFunction) -> bool:
    """Pointwise equality, by enumeration (small groups only)."""
    return P.group == Q.group and all(
        P.exponent(g.residues) == Q.exponent(g.residues) for g in P.group.elements())


def bicharacter_hom(Q: QuadraticFunction) -> HomMatrix:
    """beta with B(g, h) = chi_{beta(g)}(h); beta(i, j) = d_i M(i, j)."""
    d = Q.group.moduli
    entries = [[int(d[i] * Q.M[i][j]) for j in range(len(d))] for i in range(len(d))]
    return HomMatrix(Q.group, Q.group, entries)


def compose_with_automorphism(Q: QuadraticFunction, A: HomMatrix) -> QuadraticFunction:
    """Normal form of g -> Q(A g)."""
    G = Q.group
    if A.domain != G or A.codomain != G:
        raise GroupMismatchError("automorphism must act on the group of Q")
    m = len(G)
    a = A.entries
    MA = [[sum(Q.M[i][k] * a[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    Mp = [[sum(a[k][i] * MA[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    C = Q.C
    Cp = [Mp[i][i] * G.moduli[i] for i in range(m)]
    vp = []
    for i in range(m):
        atv = sum(a[k][i] * Q.v[k] for k in range(m))
        atc = sum(a[k][i] * C[k] for k in range(m))
        vp.append(atv + Fraction(atc - Cp[i], 2))
    return QuadraticFunction(G, Mp, _reduce_bullet(G, vp))


def _reduce_bullet(G: Group, v: Sequence[Fraction]) -> list[Fraction]:
    # v only matters mod 1
    return [x - (x.numerator // x.denominator) for x in v]


def fit_quadratic(q: Callable[[GroupElement], int | PhaseExp], G: Group,
                  samples: int = 32, rng: random.Random | None = None) -> QuadraticFunction:
    """Recover (M, v) from an exponent oracle q(g) = n(g) mod 2|G|.

    Off-diagonal M from q(e_i + e_j) - q(e_i) - q(e_j), diagonal from
    q(2 e_i) - 2 q(e_i), then v from the residual linear part at e_i.  The
    result is checked on random points.
    """
    n = G.phase_modulus
    N = G.order
    m = len(G)
    e = [G.basis(i) for i in range(m)]
    qe = [int(q(e[i])) % n for i in range(m)]
    M = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        M[i][i] = Fraction((int(q(e[i] + e[i])) - 2 * qe[i]) % n, n)
        for j in range(i):
            M[i][j] = Fraction((int(q(e[i] + e[j])) - qe[i] - qe[j]) % n, n)
            M[j][i] = M[i][j]
    v = []
    for i, d in enumerate(G.moduli):
        resid = int(qe[i] - N * (M[i][i] + M[i][i] * d))
        v.append(Fraction(resid % n, n))
    try:
        Q = QuadraticFunction(G, M, _reduce_bullet(G, v))
    except InvalidQuadraticError as exc:
        raise InvalidQuadraticError(f"oracle is not quadratic: {exc}") from exc
    rng = rng or random.Random(0)
    points = [G.zero()] + e
    points += [GroupElement(G, [rng.randrange(d) for d in G.moduli]) for _ in range(samples)]
    for g in points:
        if Q.exponent(g.residues) != int(q(g)) % n:
            raise InvalidQuadraticError(f"oracle disagrees with its fit at {g}")
    return Q

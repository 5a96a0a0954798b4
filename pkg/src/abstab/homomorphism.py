"""Matrix representations of homomorphisms between finite abelian groups."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .groups import Group, GroupElement, GroupMismatchError
from .linalg import IntegerSystem


class InvalidHomomorphismError(ValueError):
    pass


@dataclass(frozen=True)
class HomMatrix:
    """n x m integer matrix A with alpha(g) = A g (mod codomain).

    Rows are reduced into [0, d_i).  Two HomMatrix objects describe the same
    homomorphism iff they agree on the canonical generators; use
    :func:`same_action` rather than ``==`` for that question.
    """

    domain: Group
    codomain: Group
    entries: tuple[tuple[int, ...], ...]

    def __init__(self, domain: Group, codomain: Group, entries: Sequence[Sequence[int]]):
        rows = [list(r) for r in entries]
        if len(rows) != len(codomain) or any(len(r) != len(domain) for r in rows):
            raise InvalidHomomorphismError(
                f"shape {len(rows)}x{len(rows[0]) if rows else 0} does not match "
                f"{len(codomain)}x{len(domain)}")
        red = tuple(tuple(int(x) % d for x in row) for row, d in zip(rows, codomain.moduli))
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "entries", red)

    @classmethod
    def identity(cls, G: Group) -> "HomMatrix":
        m = len(G)
        return cls(G, G, [[int(i == j) for j in range(m)] for i in range(m)])

    @classmethod
    def zero(cls, domain: Group, codomain: Group) -> "HomMatrix":
        return cls(domain, codomain, [[0] * len(domain) for _ in codomain.moduli])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def apply_raw(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, x)) % d
                     for row, d in zip(self.entries, self.codomain.moduli))

    def __call__(self, g: GroupElement) -> GroupElement:
        return apply(self, g)


def validate(A: HomMatrix) -> bool:
    """c_j * A(i,j) = 0 mod d_i for every entry."""
    for row, d in zip(A.entries, A.codomain.moduli):
        for a, c in zip(row, A.domain.moduli):
            if (c * a) % d:
                return False
    return True


def _require_valid(A: HomMatrix) -> None:
    if not validate(A):
        raise InvalidHomomorphismError("matrix violates c_j A(i,j) = 0 mod d_i")


def apply(A: HomMatrix, g: GroupElement) -> GroupElement:
    if g.group != A.domain:
        raise GroupMismatchError(f"{g} is not in {A.domain}")
    _require_valid(A)
    return GroupElement(A.codomain, A.apply_raw(g.residues))


def compose(B: HomMatrix, A: HomMatrix) -> HomMatrix:
    """Matrix of B o A (A applied first)."""
    if A.codomain != B.domain:
        raise GroupMismatchError("codomain of A is not the domain of B")
    n, k, m = len(B.codomain), len(A.codomain), len(A.domain)
    entries = [[sum(B.entries[i][l] * A.entries[l][j] for l in range(k)) for j in range(m)]
               for i in range(n)]
    return HomMatrix(A.domain, B.codomain, entries)


def same_action(A: HomMatrix, B: HomMatrix) -> bool:
    if (A.domain, A.codomain) != (B.domain, B.codomain):
        return False
    return all(A.column(j) == B.column(j) for j in range(len(A.domain)))


def dual(A: HomMatrix) -> HomMatrix:
    """Dual alpha*: codomain -> domain, chi_{alpha*(mu)}(g) = chi_mu(alpha(g))."""
    c = A.domain.moduli
    d = A.codomain.moduli
    entries = []
    for j in range(len(c)):
        row = []
        for i in range(len(d)):
            q, r = divmod(c[j] * A.entries[i][j], d[i])
            if r:
                raise InvalidHomomorphismError("non-integral dual entry")
            row.append(q)
        entries.append(row)
    return HomMatrix(A.codomain, A.domain, entries)


def invert_automorphism(A: HomMatrix) -> HomMatrix:
    """Matrix X with X A = identity, column by column from A x_j = e_j."""
    G = A.domain
    if A.codomain != G:
        raise InvalidHomomorphismError("not an endomorphism")
    _require_valid(A)
    system = IntegerSystem(A.entries, G.moduli, G.moduli)
    if any(system.kernel()):
        raise InvalidHomomorphismError("matrix is not injective")
    cols = []
    for j in range(len(G)):
        x = system.particular(G.basis(j).residues)
        if x is None:
            raise InvalidHomomorphismError("matrix is not surjective")
        cols.append(x)
    return HomMatrix(G, G, [[cols[j][i] for j in range(len(G))] for i in range(len(G))])


def is_automorphism(A: HomMatrix) -> bool:
    try:
        invert_automorphism(A)
    except InvalidHomomorphismError:
        return False
    return True


def fit_automorphism(f: Callable[[GroupElement], GroupElement], G: Group,
                     samples: int = 32, rng: random.Random | None = None) -> HomMatrix:
    """Recover the matrix of an endomorphism oracle: column j is f(e_j).

    The fit is checked on random elements; a mismatch means the oracle is not
    a homomorphism.
    """
    cols = [f(G.basis(j)).residues for j in range(len(G))]
    A = HomMatrix(G, G, [[cols[j][i] for j in range(len(G))] for i in range(len(G))])
    if not validate(A):
        raise InvalidHomomorphismError("oracle images violate consistency conditions")
    rng = rng or random.Random(0)
    for _ in range(samples):
        g = GroupElement(G, [rng.randrange(d) for d in G.moduli])
        if apply(A, g) != f(g):
            raise InvalidHomomorphismError(f"oracle disagrees with its fit at {g}")
    return A


# bullet group G^. = (1/d_1)Z/Z x ... ; the scaling Upsilon(i,i) = 1/d_i


def bullet(g: GroupElement) -> tuple[Fraction, ...]:
    return tuple(Fraction(x, d) for x, d in zip(g.residues, g.group.moduli))


def unbullet(G: Group, v: Sequence[Fraction]) -> GroupElement:
    res = []
    for x, d in zip(v, G.moduli):
        y = Fraction(x) * d
        if y.denominator != 1:
            raise ValueError(f"{x} is not in (1/{d})Z")
        res.append(int(y))
    return GroupElement(G, res)

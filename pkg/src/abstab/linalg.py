"""Linear systems and subgroup algorithms over Z^a x Z_{d1} x ... x Z_{dm}.

Everything reduces to one primitive: the integer system

    A x + diag(D) y = b,    x in Z^n, y in Z^k,

solved through a Smith normal form of [A | diag(D)].  Domain factors with
modulus 0 are copies of Z; finite domain factors are handled by solving
over Z and reducing at the end (valid because A satisfies the
homomorphism consistency conditions).  Spans inside a finite group also
have a lighter echelon solver, :class:`SpanSystem`, for hot paths that
never need a kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

from .groups import Group, GroupElement, GroupMismatchError, PhaseExp
from .snf import SnfDecomposition, smith_normal_form

if TYPE_CHECKING:
    from .homomorphism import HomMatrix


class IntegerSystem:
    """Factorised system x -> A x (mod codomain) ready for many right-hand sides."""

    def __init__(self, A: Sequence[Sequence[int]], codomain: Sequence[int],
                 domain: Sequence[int]):
        self.codomain = tuple(int(d) for d in codomain)
        self.domain = tuple(int(c) for c in domain)
        k, n = len(self.codomain), len(self.domain)
        if len(A) != k or any(len(row) != n for row in A):
            raise ValueError(f"matrix shape does not match {k}x{n}")
        self.lift_cols = [i for i, d in enumerate(self.codomain) if d]
        B = []
        for i, row in enumerate(A):
            lift = [self.codomain[i] if i == j else 0 for j in self.lift_cols]
            B.append([int(x) for x in row] + lift)
        self.snf: SnfDecomposition = smith_normal_form(B, ncols=n + len(self.lift_cols),
                                                        want_U=False, want_V=False,
                                                        v_inv_rows=n)
        self._kernel = None

    @property
    def rank(self) -> int:
        return self.snf.rank

    def _reduce_x(self, z: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % c if c else x for x, c in zip(z, self.domain))

    def particular(self, b: Sequence[int]) -> tuple[int, ...] | None:
        """One solution x0 (free variables set to 0), or None."""
        snf = self.snf
        bp = [sum(u * y for u, y in zip(row, b)) for row in snf.U_inv]
        diag = snf.diagonal
        w = [0] * snf.ncols
        for i, bi in enumerate(bp):
            s = diag[i] if i < len(diag) else 0
            if s == 0:
                if bi:
                    return None
                continue
            q, rem = divmod(bi, s)
            if rem:
                return None
            w[i] = q
        n = len(self.domain)
        z = [sum(row[j] * w[j] for j in range(len(w)) if w[j]) for row in snf.V_inv[:n]]
        return self._reduce_x(z)

    def least_multiple(self, b: Sequence[int]) -> int | None:
        """Least k > 0 with k b in the image, or None if there is none."""
        snf = self.snf
        diag = snf.diagonal
        k = 1
        for i, row in enumerate(snf.U_inv):
            bi = sum(u * y for u, y in zip(row, b))
            s = diag[i] if i < len(diag) else 0
            if s == 0:
                if bi:
                    return None
                continue
            k = math.lcm(k, s // math.gcd(s, bi))
        return k

    def kernel(self) -> list[tuple[int, ...]]:
        """Generators of {x : A x = 0}, zero vectors dropped."""
        if self._kernel is None:
            n = len(self.domain)
            R = self.snf.V_inv
            gens = []
            for j in range(self.rank, self.snf.ncols):
                v = self._reduce_x([R[i][j] for i in range(n)])
                if any(v):
                    gens.append(v)
            self._kernel = gens
        return self._kernel

    def cokernel_order(self) -> int:
        """|codomain / image| for a finite codomain."""
        if not all(self.codomain):
            raise ValueError("codomain has infinite factors")
        diag = self.snf.diagonal
        return math.prod(diag[: len(self.codomain)]) if self.codomain else 1


@dataclass(frozen=True)
class GeneralSolution:
    """Solution set x0 + <kernel_gens> of a linear system over groups.

    ``kernel_structure`` lists the orders of an independent generating set
    of the kernel; it is None when the domain has Z factors.
    """

    domain: tuple[int, ...]
    x0: tuple[int, ...]
    kernel_gens: tuple[tuple[int, ...], ...]
    kernel_structure: tuple[int, ...] | None

    @property
    def count(self) -> int | None:
        if self.kernel_structure is None:
            return None
        return math.prod(self.kernel_structure)


def solve_system(A: Sequence[Sequence[int]], b: Sequence[int],
                 codomain: Sequence[int], domain: Sequence[int]) -> GeneralSolution | None:
    system = IntegerSystem(A, codomain, domain)
    x0 = system.particular(b)
    if x0 is None:
        return None
    kern = system.kernel()
    structure = None
    if all(domain):
        structure = tuple(order for _, _, order in independent_basis(domain, kern))
    return GeneralSolution(tuple(int(c) for c in domain), x0, tuple(kern), structure)


def count_system(A, b, codomain, domain) -> int | None:
    """Number of solutions; None stands for infinitely many."""
    system = IntegerSystem(A, codomain, domain)
    if system.particular(b) is None:
        return 0
    if not all(domain):
        return None
    image = math.prod(codomain) // system.cokernel_order()
    return math.prod(domain) // image


def solve(A: "HomMatrix", b: GroupElement) -> GeneralSolution | None:
    if b.group != A.codomain:
        raise GroupMismatchError("b is not in the codomain")
    return solve_system(A.entries, b.residues, A.codomain.moduli, A.domain.moduli)


def count_solutions(A: "HomMatrix", b: GroupElement) -> int:
    if b.group != A.codomain:
        raise GroupMismatchError("b is not in the codomain")
    return count_system(A.entries, b.residues, A.codomain.moduli, A.domain.moduli)


# --- subgroups ------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupGens:
    group: Group
    generators: tuple[GroupElement, ...]

    def __init__(self, group: Group, generators: Iterable[GroupElement | Sequence[int]] = ()):
        gens = []
        for g in generators:
            if isinstance(g, GroupElement):
                if g.group != group:
                    raise GroupMismatchError(f"{g} not in {group}")
            else:
                g = GroupElement(group, g)
            gens.append(g)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "generators", tuple(gens))

    @property
    def columns(self) -> list[list[int]]:
        """Generators as the columns of an m x r matrix."""
        m = len(self.group)
        return [[g.residues[i] for g in self.generators] for i in range(m)]

    def elements(self) -> set[tuple[int, ...]]:
        """Brute-force closure; small groups only."""
        seen = {self.group.zero().residues}
        frontier = list(seen)
        mods = self.group.moduli
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = tuple((a + b) % d for a, b, d in zip(x, g.residues, mods))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen


def _columns(moduli: Sequence[int], gens: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[g[i] for g in gens] for i in range(len(moduli))]


def span_system(moduli: Sequence[int], gens: Sequence[Sequence[int]]) -> IntegerSystem:
    """w in Z^r -> sum w_i g_i in G."""
    return IntegerSystem(_columns(moduli, gens), moduli, [0] * len(gens))


class SpanSystem:
    """Echelon form of the subgroup spanned by ``gens`` in a finite group.

    Cheaper than :class:`IntegerSystem` when no kernel is needed: the
    modulus vector d_t e_t lies in the span, so every working entry stays
    reduced mod d_t and never grows.  Pivot t is a span element with zeros
    above row t and g_t = gcd of everything reachable in row t, together
    with its coefficients over ``gens``.
    """

    def __init__(self, moduli: Sequence[int], gens: Sequence[Sequence[int]]):
        self.moduli = tuple(int(d) for d in moduli)
        if any(d <= 0 for d in self.moduli):
            raise ValueError("span systems need finite moduli")
        r = len(gens)
        # working columns: (vector, coefficients over gens)
        cols = [([x % d for x, d in zip(g, self.moduli)], [int(i == j) for j in range(r)])
                for i, g in enumerate(gens)]
        self.pivots: list[tuple[int, list[int], list[int]]] = []
        for t, d in enumerate(self.moduli):
            cols = [c for c in cols if any(c[0][t:])]
            live = [c for c in cols if c[0][t]]
            while len(live) > 1:
                live.sort(key=lambda c: c[0][t])
                pv, pc = live[0]
                for v, c in live[1:]:
                    q = v[t] // pv[t]
                    for i in range(t, len(v)):
                        v[i] = (v[i] - q * pv[i]) % self.moduli[i]
                    for i in range(r):
                        c[i] -= q * pc[i]
                live = [c for c in live if c[0][t]]
            if not live:
                self.pivots.append((d, [0] * len(self.moduli), [0] * r))
                continue
            v, c = live[0]
            g, x, _ = _egcd(v[t], d)
            pivot_v = [0] * t + [(x * v[i]) % self.moduli[i] for i in range(t, len(v))]
            pivot_v[t] = g
            self.pivots.append((g, pivot_v, [x * ci for ci in c]))
            # what is left of this column once row t is cleared
            m = d // g
            v[:] = [(m * vi) % di for vi, di in zip(v, self.moduli)]
            c[:] = [m * ci for ci in c]
        self.ngens = r

    def cokernel_order(self) -> int:
        return math.prod(g for g, _, _ in self.pivots)

    def _reduce(self, b: Sequence[int], scale_on_fail: bool):
        res = [int(x) % d for x, d in zip(b, self.moduli)]
        w = [0] * self.ngens
        k = 1
        for t, (g, pv, pc) in enumerate(self.pivots):
            rt = res[t]
            if rt % g:
                if not scale_on_fail:
                    return None, None
                m = g // math.gcd(g, rt)
                k *= m
                res = [(m * x) % d for x, d in zip(res, self.moduli)]
                w = [m * x for x in w]
                rt = res[t]
            q = rt // g
            if q:
                for i in range(t, len(res)):
                    res[i] = (res[i] - q * pv[i]) % self.moduli[i]
                for i in range(self.ngens):
                    w[i] += q * pc[i]
        return k, tuple(w)

    def particular(self, b: Sequence[int]) -> tuple[int, ...] | None:
        """Coefficients w with sum w_i gens_i = b, or None."""
        return self._reduce(b, False)[1]

    def least_multiple(self, b: Sequence[int]) -> int:
        """Least k > 0 with k b in the span (always exists in a finite group)."""
        return self._reduce(b, True)[0]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def membership_raw(moduli, gens, b) -> tuple[int, ...] | None:
    if all(moduli):
        return SpanSystem(moduli, gens).particular(b)
    return span_system(moduli, gens).particular(b)


def membership(b: GroupElement, H: SubgroupGens) -> tuple[int, ...] | None:
    """Integers w with sum w_i h_i = b, or None when b is not in <H>."""
    if b.group != H.group:
        raise GroupMismatchError("b is not in the ambient group of H")
    return membership_raw(H.group.moduli, [h.residues for h in H.generators], b.residues)


def subgroup_order_raw(moduli, gens) -> int:
    return math.prod(moduli) // SpanSystem(moduli, gens).cokernel_order()


def subgroup_order(H: SubgroupGens) -> int:
    return subgroup_order_raw(H.group.moduli, [h.residues for h in H.generators])


def intersect_raw(moduli, hs, ks) -> list[tuple[int, ...]]:
    r = len(hs)
    cols = list(hs) + [tuple(-x for x in k) for k in ks]
    system = span_system(moduli, cols)
    out = []
    for w in system.kernel():
        x = tuple(sum(w[i] * hs[i][j] for i in range(r)) % d for j, d in enumerate(moduli))
        if any(x) and x not in out:
            out.append(x)
    return out


def intersect(H: SubgroupGens, K: SubgroupGens) -> SubgroupGens:
    if H.group != K.group:
        raise GroupMismatchError("subgroups of different groups")
    gens = intersect_raw(H.group.moduli, [h.residues for h in H.generators],
                         [k.residues for k in K.generators])
    return SubgroupGens(H.group, gens)


def annihilator_raw(moduli, gens) -> list[tuple[int, ...]]:
    N = math.lcm(*moduli) if moduli else 1
    rows = [[(N // d) * g[i] for i, d in enumerate(moduli)] for g in gens]
    system = IntegerSystem(rows, [N] * len(gens), moduli)
    return system.kernel()


def annihilator(H: SubgroupGens) -> SubgroupGens:
    return SubgroupGens(H.group, annihilator_raw(H.group.moduli,
                                                 [h.residues for h in H.generators]))


def solve_character_system(pairs: Sequence[tuple[GroupElement, PhaseExp | int]],
                           group: Group | None = None) -> tuple[GroupElement, SubgroupGens] | None:
    """Solve chi_{h_i}(g) = gamma**{a_i} for g.

    Returns (g0, K) with solution set g0 + <K>, or None.  An odd a_i can never
    be met since characters only reach even exponents.
    """
    if group is None:
        if not pairs:
            raise ValueError("group required for an empty system")
        group = pairs[0][0].group
    n = group.phase_modulus
    rows, rhs = [], []
    for h, a in pairs:
        if h.group != group:
            raise GroupMismatchError("mixed groups in character system")
        a = int(a) % n
        if a % 2:
            return None
        rows.append([w * x for w, x in zip(group.char_weights, h.residues)])
        rhs.append(a)
    system = IntegerSystem(rows, [n] * len(rows), group.moduli)
    x0 = system.particular(rhs)
    if x0 is None:
        return None
    return GroupElement(group, x0), SubgroupGens(group, system.kernel())


def kernel_hom(H: SubgroupGens) -> "HomMatrix":
    """Omega : G -> Z_N^s whose kernel is exactly <H> (N = exponent of G)."""
    from .homomorphism import HomMatrix

    G = H.group
    N = G.exponent
    mus = annihilator_raw(G.moduli, [h.residues for h in H.generators])
    if not mus:
        return HomMatrix(G, Group([1]), [[0] * len(G)])
    rows = [[(N // d) * mu[i] for i, d in enumerate(G.moduli)] for mu in mus]
    return HomMatrix(G, Group([N] * len(mus)), rows)


def independent_basis(moduli: Sequence[int], gens: Sequence[Sequence[int]]
                      ) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Decompose <gens> = <x_1> + ... + <x_r> (direct sum).

    Returns triples (coefficients, x_i, order_i) with x_i = sum_j coeff_j gens_j
    and every order_i > 1.
    """
    r = len(gens)
    if r == 0:
        return []
    kern = span_system(moduli, gens).kernel()
    K = [[v[i] for v in kern] for i in range(r)]
    snf = smith_normal_form(K, ncols=len(kern), want_V=False)
    diag = snf.diagonal
    out = []
    for i in range(r):
        s = diag[i] if i < len(diag) else 0
        if s == 1:
            continue
        if s == 0:
            raise ValueError("generated subgroup is infinite")
        coeff = tuple(snf.U[j][i] for j in range(r))
        x = tuple(sum(c * g[k] for c, g in zip(coeff, gens)) % d
                  for k, d in enumerate(moduli))
        out.append((coeff, x, s))
    return out


def independent_generators(H: SubgroupGens) -> tuple[list[GroupElement], list[int]]:
    basis = independent_basis(H.group.moduli, [h.residues for h in H.generators])
    return ([GroupElement(H.group, x) for _, x, _ in basis],
            [order for _, _, order in basis])

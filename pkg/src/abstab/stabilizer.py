"""Stabilizer groups over G: label groups, structure, amplitudes, measurement.

A stabilizer group S is kept as a list of commuting generator labels.  Its
label group L = {(z, x)} sits in G x G and is isomorphic to S whenever S
stabilizes something, so most questions become linear algebra over G x G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from .groups import Group, GroupElement, GroupMismatchError, PhaseExp, char_exp_raw
from .linalg import (IntegerSystem, SpanSystem, SubgroupGens, independent_basis,
                     solve_character_system, span_system, subgroup_order_raw)
from .pauli import PauliOperator, adjoint, commute, multiply, power, product
from .rng import ShotRng


class InvalidStabilizerError(ValueError):
    """The generators do not stabilize any nonzero vector."""


class NotUniqueError(ValueError):
    """The operation needs a uniquely stabilized state."""


@dataclass(frozen=True)
class StabilizerGroup:
    group: Group
    generators: tuple[PauliOperator, ...]

    def __init__(self, group: Group, generators: Sequence[PauliOperator], check: bool = True):
        gens = tuple(g for g in generators if not g.is_identity())
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "generators", gens)
        if check:
            for g in gens:
                if g.group != group:
                    raise GroupMismatchError(f"{g} is not over {group}")
                if not any(g.z) and not any(g.x):
                    raise InvalidStabilizerError(f"{g} is a nontrivial multiple of I")
            for i, s in enumerate(gens):
                for t in gens[i + 1:]:
                    if not commute(s, t):
                        raise InvalidStabilizerError(f"{s} and {t} do not commute")

    # -- cached analysis --------------------------------------------------

    @cached_property
    def _x_parts(self) -> list[tuple[int, ...]]:
        return [g.x for g in self.generators]

    @cached_property
    def _h_system(self) -> IntegerSystem:
        return span_system(self.group.moduli, self._x_parts)

    @cached_property
    def _labels(self) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
        G = self.group
        return G.moduli + G.moduli, [g.z + g.x for g in self.generators]

    @cached_property
    def _label_system(self) -> SpanSystem:
        mods, labels = self._labels
        return SpanSystem(mods, labels)

    def lift(self, coeffs: Sequence[int]) -> PauliOperator:
        """prod_i generator_i ** coeffs_i."""
        return product(zip(self.generators, coeffs), self.group)

    @cached_property
    def _label_groups(self):
        G = self.group
        H = SubgroupGens(G, [x for x in self._x_parts if any(x)])
        diag = []
        for w in self._h_system.kernel():
            op = self.lift(w)
            if any(op.x):
                raise AssertionError("kernel element is not diagonal")
            if op.is_identity():
                continue
            diag.append((GroupElement(G, op.z), PhaseExp(G, op.a)))
        D = SubgroupGens(G, [g for g, _ in diag])
        return H, D, diag

    @cached_property
    def _structure(self):
        G = self.group
        _, D, diag = self._label_groups
        if not diag:
            return G.zero(), SubgroupGens(G, [G.basis(i) for i in range(len(G))
                                              if G.moduli[i] > 1])
        sol = solve_character_system([(g, -a.exponent) for g, a in diag], G)
        if sol is None:
            raise InvalidStabilizerError("diagonal stabilizers have no common +1 eigenvector")
        return sol

    @cached_property
    def h_order(self) -> int:
        return self.group.order // self._h_system.cokernel_order()

    @cached_property
    def order(self) -> int:
        """|S|, as the order of the label group."""
        return self.group.order ** 2 // self._label_system.cokernel_order()

    def __len__(self) -> int:
        return len(self.generators)


def label_groups(S: StabilizerGroup):
    """(H, D, [(g, phase) for each diagonal generator gamma^phase Z(g)])."""
    return S._label_groups


def structure_test(S: StabilizerGroup) -> tuple[GroupElement, SubgroupGens, int]:
    """Support g0 + D^perp and code dimension |D^perp| / |H|."""
    g0, Dperp = S._structure
    dperp_order = subgroup_order_raw(S.group.moduli, [g.residues for g in Dperp.generators])
    dim, rem = divmod(dperp_order, S.h_order)
    if rem:
        raise AssertionError("H is not contained in D^perp")
    return g0, Dperp, dim


def is_unique(S: StabilizerGroup) -> bool:
    try:
        return structure_test(S)[2] == 1
    except InvalidStabilizerError:
        return False


def _require_unique(S: StabilizerGroup) -> GroupElement:
    g0, _, dim = structure_test(S)
    if dim != 1:
        raise NotUniqueError(f"stabilizer code has dimension {dim}")
    return g0


def support_representative(S: StabilizerGroup) -> GroupElement:
    return _require_unique(S)


def amplitude(S: StabilizerGroup, x: GroupElement) -> tuple[PhaseExp, int] | None:
    """<x|psi> = gamma^a / sqrt(|H|), returned as (a, |H|); None off support.

    The global phase makes the amplitude at the support representative
    positive.
    """
    G = S.group
    if x.group != G:
        raise GroupMismatchError(f"{x} is not in {G}")
    s = _require_unique(S)
    h = [(p - q) % d for p, q, d in zip(x.residues, s.residues, G.moduli)]
    w = S._h_system.particular(h)
    if w is None:
        return None
    sigma = S.lift(w)
    a = sigma.a + char_exp_raw(G.char_weights, G.phase_modulus, x.residues, sigma.z)
    return PhaseExp(G, a), S.h_order


def amplitude_value(S: StabilizerGroup, x: GroupElement) -> complex:
    amp = amplitude(S, x)
    if amp is None:
        return 0j
    phase, h = amp
    return complex(phase) / math.sqrt(h)


def sample_support(S: StabilizerGroup, rng: ShotRng) -> GroupElement:
    """Uniform draw from the support s + H."""
    G = S.group
    s = _require_unique(S)
    out = list(s.residues)
    for _, x, order in independent_basis(G.moduli, S._x_parts):
        k = rng.randbelow(order)
        out = [p + k * q for p, q in zip(out, x)]
    return GroupElement(G, out)


def expectation(S: StabilizerGroup, t: PauliOperator) -> PhaseExp | None:
    """<psi|t|psi>; None stands for zero."""
    G = S.group
    s = _require_unique(S)
    w = S._h_system.particular(t.x)
    if w is None:
        return None
    sigma = S.lift(w)
    residue = multiply(t, adjoint(sigma))
    weights, n = G.char_weights, G.phase_modulus
    for h in S._x_parts:
        if char_exp_raw(weights, n, residue.z, h):
            return None
    return PhaseExp(G, residue.a + char_exp_raw(weights, n, residue.z, s.residues))


@dataclass(frozen=True)
class OutcomeDistribution:
    """Uniform distribution over eigenvalue exponents base + j * step, j < count."""

    group: Group
    base: int
    step: int
    count: int

    @property
    def probability_each(self) -> Fraction:
        return Fraction(1, self.count)

    def outcomes(self) -> Iterator[int]:
        n = self.group.phase_modulus
        for j in range(self.count):
            yield (self.base + j * self.step) % n

    def probability(self, e: int) -> Fraction:
        n = self.group.phase_modulus
        if ((int(e) - self.base) % n) % self.step == 0:
            return Fraction(1, self.count)
        return Fraction(0)

    def as_dict(self) -> dict[int, Fraction]:
        return {e: self.probability_each for e in self.outcomes()}

    def sample(self, rng: ShotRng) -> int:
        return (self.base + rng.randbelow(self.count) * self.step) % self.group.phase_modulus




def _smallest_power_in_group(S: StabilizerGroup, t: PauliOperator) -> tuple[int, list[int]]:
    """Least k > 0 with the label of t^k in L, and coefficients w with
    k * label(t) = sum w_i label_i."""
    lt = t.z + t.x
    system = S._label_system
    k = system.least_multiple(lt)
    if k is None:
        raise AssertionError("no power of t lies in the label group")
    w = system.particular([k * v for v in lt])
    return k, list(w)


def outcome_distribution(S: StabilizerGroup, t: PauliOperator,
                         check: bool = True) -> OutcomeDistribution:
    """Exact distribution of the eigenvalue gamma^e when measuring t.

    With k0 the least power for which t^k0 is proportional to a stabilizer,
    t^k0 = gamma^c s, exactly the k0 eigenvalues with lambda^k0 = gamma^c
    occur, each with probability 1/k0.  ``check=False`` skips the uniqueness
    test for callers that maintain it themselves.
    """
    G = S.group
    if t.group != G:
        raise GroupMismatchError(f"{t} is not over {G}")
    if check:
        _require_unique(S)
    k0, w = _smallest_power_in_group(S, t)
    tk = power(t, k0)
    s = S.lift(w)
    if (s.z, s.x) != (tk.z, tk.x):
        raise AssertionError("lifted stabilizer has the wrong label")
    n = G.phase_modulus
    c = (tk.a - s.a) % n
    if c % k0:
        raise AssertionError("phase of t^k0 is not divisible by k0")
    return OutcomeDistribution(G, c // k0, n // k0, k0)


def power_sum_distribution(S: StabilizerGroup, t: PauliOperator) -> dict[int, Fraction]:
    """P(lambda) = (1/N) sum_k lambda^{-k} <t^k>, summed exactly.

    Enumerates all N = order(t) powers, so only for small groups; kept as an
    independent cross-check of :func:`outcome_distribution`.
    """
    from .pauli import order as pauli_order

    G = S.group
    n = G.phase_modulus
    N = pauli_order(t)
    ev = []
    for k in range(N):
        e = expectation(S, power(t, k))
        ev.append(None if e is None else e.exponent)
    out = {}
    for j in range(N):
        e = j * (n // N)      # lambda = gamma^e, an N-th root of unity
        # sum_k gamma^{ev_k - k e}: a sum of n-th roots of unity, exact via counts
        counts = [0] * n
        for k, a in enumerate(ev):
            if a is not None:
                counts[(a - k * e) % n] += 1
        p = _cyclotomic_real_sum(counts, n)
        if p:
            out[e] = p / N
    return out


def _cyclotomic_real_sum(counts: list[int], n: int) -> Fraction:
    # the total is N * P(lambda), a nonnegative integer; recover it from
    # the float sum and confirm exactness by rounding distance
    import cmath

    total = sum(c * cmath.exp(2j * math.pi * k / n) for k, c in enumerate(counts) if c)
    r = round(total.real)
    if abs(total - r) > 1e-6:
        raise AssertionError(f"power sum {total} is not an integer")
    return Fraction(r)


def centralizer(S: StabilizerGroup, t: PauliOperator) -> list[PauliOperator]:
    """Generators of the elements of S commuting with t.

    prod s_i^{w_i} commutes with t iff sum_i w_i p_i = 0 mod 2|G| where p_i
    is the commutation phase of generator i with t.
    """
    G = S.group
    weights, n = G.char_weights, G.phase_modulus
    p = [(char_exp_raw(weights, n, g.z, t.x) - char_exp_raw(weights, n, t.z, g.x)) % n
         for g in S.generators]
    if not any(p):
        return list(S.generators)
    system = IntegerSystem([p], [n], [0] * len(p))
    out = []
    for w in system.kernel():
        op = S.lift(w)
        if not op.is_identity() and op not in out:
            out.append(op)
    return out


def reduce_generators(S: StabilizerGroup) -> StabilizerGroup:
    """Independent generating set (at most 2m elements) via the label group."""
    mods, labels = S._labels
    basis = independent_basis(mods, labels)
    return StabilizerGroup(S.group, [S.lift(c) for c, _, _ in basis], check=False)


@dataclass(frozen=True)
class MeasurementOutcome:
    eigenvalue_exp: PhaseExp
    probability: Fraction
    post_stabilizer: StabilizerGroup
    distribution: OutcomeDistribution = field(compare=False)


def post_measurement(S: StabilizerGroup, t: PauliOperator, e: int) -> StabilizerGroup:
    """< conj(lambda) t, C_S(t) > for lambda = gamma^e."""
    G = S.group
    top = PauliOperator(G, t.a - e, t.z, t.x)
    post = StabilizerGroup(G, [top] + centralizer(S, t), check=False)
    # every measurement adds a generator; trim once past the 2m bound
    if len(post) > 2 * len(G):
        post = reduce_generators(post)
    return post


def measure_pauli(S: StabilizerGroup, t: PauliOperator, rng: ShotRng | None = None,
                  outcome: int | None = None, check: bool = True) -> MeasurementOutcome:
    """Measure t; ``outcome`` forces a particular eigenvalue exponent."""
    dist = outcome_distribution(S, t, check)
    if outcome is None:
        if rng is None:
            raise ValueError("rng or outcome required")
        e = dist.sample(rng)
    else:
        e = int(outcome) % S.group.phase_modulus
        if not dist.probability(e):
            raise ValueError(f"outcome {e} has probability zero")
    post = post_measurement(S, t, e)
    return MeasurementOutcome(PhaseExp(S.group, e), dist.probability(e), post, dist)

"""Random generators and a dense reference runner shared by the tests."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from abstab import dense
from abstab.engine import (Circuit, CosetCorrect, EngineState, Gate, MeasurePauli,
                           MeasureRegister, initialize, step)
from abstab.groups import Group
from abstab.homomorphism import HomMatrix, apply, compose
from abstab.pauli import QFT, Automorphism, PauliGate, PauliOperator, QuadraticPhase
from abstab.quadratic import QuadraticFunction
from abstab.rng import ShotRng
from abstab.linalg import IntegerSystem
from abstab.stabilizer import StabilizerGroup, amplitude_value, outcome_distribution

SMALL_MODULI = [1, 2, 3, 4, 5, 6, 8, 9, 12]


def random_group(rng: random.Random, max_order: int = 64, max_regs: int = 4) -> Group:
    while True:
        m = rng.randint(1, max_regs)
        mods = [rng.choice(SMALL_MODULI) for _ in range(m)]
        if math.prod(mods) <= max_order:
            return Group(mods)


def random_element(rng: random.Random, G: Group) -> list[int]:
    return [rng.randrange(d) for d in G.moduli]


def random_hom(rng: random.Random, dom: Group, cod: Group) -> HomMatrix:
    rows = []
    for i, ci in enumerate(cod.moduli):
        row = []
        for dj in dom.moduli:
            step_ = ci // math.gcd(ci, dj)
            row.append(step_ * rng.randrange(max(ci, 1)))
        rows.append(row)
    return HomMatrix(dom, cod, rows)


def random_automorphism(rng: random.Random, G: Group, moves: int = 6) -> HomMatrix:
    """Product of shears, unit scalings and swaps of equal-modulus registers."""
    m = len(G)
    d = G.moduli
    A = HomMatrix.identity(G)
    for _ in range(moves):
        rows = [[int(i == j) for j in range(m)] for i in range(m)]
        kind = rng.randrange(3)
        i, j = rng.randrange(m), rng.randrange(m)
        if kind == 0 and i != j:
            rows[i][j] = (d[i] // math.gcd(d[i], d[j])) * rng.randrange(max(d[i], 1))
        elif kind == 1 and d[i] > 1:
            u = rng.randrange(1, d[i])
            while math.gcd(u, d[i]) != 1:
                u = rng.randrange(1, d[i])
            rows[i][i] = u
        elif kind == 2 and d[i] == d[j]:
            rows[i][i] = rows[j][j] = 0
            rows[i][j] = rows[j][i] = 1
        A = compose(HomMatrix(G, G, rows), A)
    return A


def random_quadratic(rng: random.Random, G: Group) -> QuadraticFunction:
    d = G.moduli
    m = len(G)
    M = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            g = math.gcd(d[i], d[j])
            M[i][j] = M[j][i] = Fraction(rng.randrange(2 * g), g)
    v = [Fraction(rng.randrange(d[i]), d[i]) for i in range(m)]
    return QuadraticFunction(G, M, v)


def random_pauli(rng: random.Random, G: Group) -> PauliOperator:
    return PauliOperator(G, rng.randrange(G.phase_modulus), random_element(rng, G),
                         random_element(rng, G))


def random_gate(rng: random.Random, G: Group):
    kind = rng.randrange(4)
    if kind == 0:
        regs = [i for i in range(len(G)) if rng.random() < 0.5] or [rng.randrange(len(G))]
        return QFT(G, regs)
    if kind == 1:
        return Automorphism(random_automorphism(rng, G))
    if kind == 2:
        return QuadraticPhase(random_quadratic(rng, G))
    return PauliGate(random_pauli(rng, G))


def random_circuit(rng: random.Random, G: Group, length: int) -> Circuit:
    ins = []
    for k in range(length):
        r = rng.random()
        if r < 0.15:
            ins.append(MeasureRegister(rng.randrange(len(G)), f"m{k}"))
        elif r < 0.3:
            ins.append(MeasurePauli(random_pauli(rng, G), f"m{k}"))
        else:
            ins.append(Gate(random_gate(rng, G)))
    return Circuit(G, G.element(random_element(rng, G)), ins)


def stabilizer_vector(S: StabilizerGroup) -> np.ndarray:
    return np.array([amplitude_value(S, g) for g in S.group.elements()])


def random_correction(rng: random.Random, G: Group, register: int, key: str) -> CosetCorrect:
    """Correction driven by the outcome of ``register``; always solvable.

    omega maps the leading block (which contains ``register``) onto
    Z_{d_register}, with a 1 in that register's column.
    """
    width = rng.randint(register + 1, len(G))
    sub = Group(G.moduli[:width])
    cod = Group([G.moduli[register]])
    row = random_hom(rng, sub, cod).entries[0]
    row = [1 if j == register else v for j, v in enumerate(row)]
    return CosetCorrect(sub.element(random_element(rng, sub)), HomMatrix(sub, cod, [row]),
                        (key,))


def random_adaptive_circuit(rng: random.Random, G: Group, length: int,
                            min_pauli: int = 2) -> Circuit:
    """Random gates and measurements with at least ``min_pauli`` Pauli
    measurements, plus corrections conditioned on register outcomes."""
    ins: list = []
    pauli_slots = set(rng.sample(range(length), min(min_pauli, length)))
    while len(ins) < length:
        k = len(ins)
        r = rng.random()
        if k in pauli_slots or r < 0.12:
            ins.append(MeasurePauli(random_pauli(rng, G), f"m{k}"))
        elif r < 0.27:
            i = rng.randrange(len(G))
            ins.append(MeasureRegister(i, f"m{k}"))
            # the correction must not take a reserved Pauli slot
            if k + 1 < length and k + 1 not in pauli_slots and rng.random() < 0.6:
                ins.append(random_correction(rng, G, i, f"m{k}"))
        else:
            ins.append(Gate(random_gate(rng, G)))
    return Circuit(G, G.element(random_element(rng, G)), ins)


def correction_shift(state: EngineState, ins: CosetCorrect) -> list[int]:
    """The X-shift a correction applies in ``state``, with omega(g) = b re-checked."""
    omega = ins.omega
    b = omega.codomain.reduce([state.classical[k] for k in ins.outcome])
    g = IntegerSystem(omega.entries, omega.codomain.moduli, omega.domain.moduli).particular(b)
    assert apply(omega, omega.domain.element(g)).residues == tuple(b)
    shift = [t - v for t, v in zip(ins.target.residues, g)]
    return shift + [0] * (len(state.group) - len(shift))


def check_against_dense(circuit: Circuit, seed: int = 0, shot: int = 0,
                        prob_tol: float = 1e-9, amp_tol: float = 1e-10) -> int:
    """Run the engine and the dense oracle side by side, following the
    engine's sampled branch; raise AssertionError on any disagreement.
    Returns the number of measurements compared."""
    from abstab.stabilizer import power_sum_distribution

    G = circuit.group
    state = initialize(G, circuit.input, ShotRng(seed, shot))
    psi = dense.basis_state(circuit.input)
    assert dense.equal_up_to_phase(stabilizer_vector(state.stabilizer), psi, amp_tol)
    measured = 0
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            psi = dense.gate_matrix(ins.gate) @ psi
            step(state, ins)
        elif isinstance(ins, CosetCorrect):
            shift = correction_shift(state, ins)
            psi = dense.pauli_matrix(PauliOperator.X(G, shift)) @ psi
            step(state, ins)
        else:
            t = ins.pauli if isinstance(ins, MeasurePauli) else PauliOperator.Z(
                G, G.basis(ins.register).residues)
            born = dense.born_distribution(psi, t)
            exact = power_sum_distribution(state.stabilizer, t)
            step(state, ins)
            rec = state.records[-1]
            table = rec.distribution.as_dict()
            assert table == {e: p for e, p in exact.items() if p}, (table, exact)
            assert sum(table.values()) == 1
            assert set(table) == set(born), (table, born)
            for e, p in born.items():
                assert abs(float(table[e]) - p) <= prob_tol, (table, born)
            psi = dense.project(psi, t, rec.exponent)
            measured += 1
        assert dense.equal_up_to_phase(stabilizer_vector(state.stabilizer), psi, amp_tol), ins
    return measured


def branches(state: EngineState, instructions, prob=Fraction(1)):
    """Every measurement branch with its exact probability."""
    if not instructions:
        yield prob, state
        return
    ins, rest = instructions[0], instructions[1:]
    if not isinstance(ins, (MeasurePauli, MeasureRegister)):
        step(state, ins)
        yield from branches(state, rest, prob)
        return
    t = ins.pauli if isinstance(ins, MeasurePauli) else PauliOperator.Z(
        state.group, state.group.basis(ins.register).residues)
    for e, p in outcome_distribution(state.stabilizer, t).as_dict().items():
        child = EngineState(state.stabilizer, state.rng, dict(state.classical),
                            list(state.records))
        step(child, ins, forced=e)
        yield from branches(child, rest, prob * p)


def random_state(rng: random.Random, G: Group, depth: int = 8) -> StabilizerGroup:
    """Stabilizer group of a random normalizer-circuit output on a basis input."""
    state = initialize(G, G.element(random_element(rng, G)))
    for _ in range(depth):
        step(state, Gate(random_gate(rng, G)))
    return state.stabilizer


def random_stabilizer_group(rng: random.Random, G: Group) -> StabilizerGroup:
    """Random subgroup of a random state's stabilizer (so it stabilizes something)."""
    S = random_state(rng, G)
    n = G.phase_modulus
    k = rng.randint(0, len(S.generators) + 1)
    gens = [S.lift([rng.randrange(n) for _ in S.generators]) for _ in range(k)]
    return StabilizerGroup(G, gens)


def closure(ops: list[PauliOperator], G: Group) -> set[PauliOperator]:
    """All products of ``ops`` (small groups only)."""
    from abstab.pauli import multiply

    seen = {PauliOperator.identity(G)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for s in frontier:
            for t in ops:
                u = multiply(s, t)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen

"""Acceptance suite: one test per criterion, summarised at the end of the run."""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from abstab import dense
from abstab.cli import main
from abstab.engine import (Circuit, CosetCorrect, Gate, MeasurePauli, MeasureRegister,
                           initialize, run)
from abstab.groups import Group
from abstab.homomorphism import HomMatrix, apply, fit_automorphism
from abstab.linalg import (SubgroupGens, annihilator, count_solutions, solve)
from abstab.pauli import (QFT, Automorphism, PauliGate, PauliOperator, QuadraticPhase, adjoint,
                          commute, conjugate, power, power_by_squaring)
from abstab.quadratic import QuadraticFunction, evaluate, fit_quadratic
from abstab.rng import ShotRng
from abstab.snf import det, matmul, smith_normal_form
from abstab.stabilizer import StabilizerGroup, is_unique, structure_test

from helpers import (branches, check_against_dense, closure, random_adaptive_circuit,
                     random_automorphism, random_element, random_group, random_hom,
                     random_pauli, random_quadratic, random_stabilizer_group, stabilizer_vector)


def residues(G: Group) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(d) for d in G.moduli], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


# ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "random adaptive circuits agree with the dense Born rule")
def test_oracle_equivalence():
    rng = random.Random(1)
    start = time.perf_counter()
    fixed = [Group([2, 3, 4]), Group([4, 4, 4]), Group([6, 9]), Group([8, 8])]
    measured = adaptive = 0
    for i in range(200):
        G = fixed[i % len(fixed)] if i < 40 else random_group(rng, max_order=64)
        assert G.order <= 64
        c = random_adaptive_circuit(rng, G, 30, min_pauli=2)
        assert len(c.instructions) <= 30
        assert sum(isinstance(i, MeasurePauli) for i in c.instructions) >= 2
        adaptive += any(isinstance(i, CosetCorrect) for i in c.instructions)
        measured += check_against_dense(c, seed=i, prob_tol=1e-12, amp_tol=1e-10)
    elapsed = time.perf_counter() - start
    assert measured >= 400
    assert adaptive >= 100
    assert elapsed < 60, f"{elapsed:.1f} s"


# ---------------------------------------------------------------------------


def _joint(c: Circuit, keys):
    dist: dict[tuple, Fraction] = {}
    for p, st in branches(initialize(c.group, c.input), c.instructions):
        k = tuple(st.classical[x] for x in keys)
        dist[k] = dist.get(k, 0) + p
    return dist


@pytest.mark.criterion(2, "Bell and GHZ circuits over qubits")
def test_qubit_clifford_recovery():
    G = Group([2, 2])
    cnot = Automorphism(HomMatrix(G, G, [[1, 0], [1, 1]]))
    bell = Circuit(G, G.zero(), [Gate(QFT(G, [0])), Gate(cnot),
                                 MeasureRegister(0, "a"), MeasureRegister(1, "b")])
    d = _joint(bell, "ab")
    assert d == {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}
    assert d.get((0, 1), 0) == 0 and d.get((1, 0), 0) == 0

    G3 = Group([2, 2, 2])
    fan = Automorphism(HomMatrix(G3, G3, [[1, 0, 0], [1, 1, 0], [1, 0, 1]]))
    ghz = Circuit(G3, G3.zero(), [Gate(QFT(G3, [0])), Gate(fan)]
                  + [MeasureRegister(i, f"q{i}") for i in range(3)])
    d = _joint(ghz, ["q0", "q1", "q2"])
    assert d == {(0, 0, 0): Fraction(1, 2), (1, 1, 1): Fraction(1, 2)}
    # every pair agrees in the computational basis
    assert all((k[0] + k[1]) % 2 == 0 and (k[1] + k[2]) % 2 == 0 for k in d)
    # and the total X-basis parity is even
    ghz_x = Circuit(G3, G3.zero(), [Gate(QFT(G3, [0])), Gate(fan), Gate(QFT(G3, [0, 1, 2]))]
                    + [MeasureRegister(i, f"q{i}") for i in range(3)])
    d = _joint(ghz_x, ["q0", "q1", "q2"])
    assert sum(p for k, p in d.items() if sum(k) % 2 == 0) == 1
    assert all(p == Fraction(1, 4) for p in d.values()) and len(d) == 4


# ---------------------------------------------------------------------------


def _z4_gates(G: Group):
    gates = [QFT(G, [0]), Automorphism(HomMatrix(G, G, [[3]])),
             PauliGate(PauliOperator.X(G, [1])), PauliGate(PauliOperator.Z(G, [1]))]
    for k in range(8):
        for j in range(4):
            gates.append(QuadraticPhase(QuadraticFunction(G, [[Fraction(k, 4)]],
                                                          [Fraction(j, 4)])))
    return gates


@pytest.mark.criterion(3, "Z4 coset state needs adaptivity and is prepared every shot")
def test_z4_adaptive_coset(tmp_path, capsys):
    request = tmp_path / "z4.json"
    request.write_text(json.dumps({"group": ["4"], "generators": [["2"]], "x": ["0"]}))
    circ = str(tmp_path / "circuit.json")
    assert main(["coset", str(request), "-o", circ]) == 0
    capsys.readouterr()
    for shot in range(20):
        amps = []
        for x in range(4):
            assert main(["amplitude", circ, str(x), "--shot", str(shot), "--format", "json"]) == 0
            r = json.loads(capsys.readouterr().out)
            amps.append(None if r["amplitude"] == "0" else (r["phase_exponent"], r["h_order"]))
        assert amps == [("0", "2"), None, ("0", "2"), None], (shot, amps)

    # No cyclic Pauli group stabilises the target, so no single label generates it.
    G = Group([4])
    target = StabilizerGroup(G, [PauliOperator.Z(G, [2]), PauliOperator.X(G, [2])])
    assert is_unique(target)
    vec = stabilizer_vector(target)
    assert np.allclose(vec, np.array([1, 0, 1, 0]) / math.sqrt(2), atol=1e-12)
    full = closure(list(target.generators), G)
    for a in range(G.phase_modulus):
        for z in range(4):
            for x in range(4):
                assert closure([PauliOperator(G, a, [z], [x])], G) != full

    # Unitary normalizer circuits of up to three gates never reach it.
    gates = _z4_gates(G)
    frontier = {tuple(initialize(G, G.element([x])).stabilizer.generators) for x in range(4)}
    reached = set(frontier)
    for _ in range(3):
        nxt = set()
        for gens in frontier:
            for gate in gates:
                new = tuple(conjugate(gate, s) for s in gens)
                if new not in reached:
                    nxt.add(new)
        reached |= nxt
        frontier = nxt
    assert len(reached) > 4
    for gens in reached:
        assert len(gens) == 1
        assert closure(list(gens), G) != full
        S = StabilizerGroup(G, list(gens))
        assert not dense.equal_up_to_phase(stabilizer_vector(S), vec)


# ---------------------------------------------------------------------------


@pytest.mark.criterion(4, "structure test dimension equals projector rank and |G|/|S|")
def test_structure_laws():
    rng = random.Random(4)
    for _ in range(500):
        G = random_group(rng, max_order=64)
        S = random_stabilizer_group(rng, G)
        _, _, dim = structure_test(S)
        if S.generators:
            P = dense.stabilizer_projector(list(S.generators))
            rank = int(round(np.trace(P).real))
            assert abs(np.trace(P).real - rank) < 1e-9
            assert rank == np.linalg.matrix_rank(P, tol=1e-8)
        else:
            rank = G.order
        size = len(closure(list(S.generators), G))
        assert S.order == size
        assert G.order % size == 0
        assert dim == rank == G.order // size


# ---------------------------------------------------------------------------


def _random_int_matrix(rng: random.Random):
    r, c = rng.randint(1, 8), rng.randint(1, 8)
    bound = 2 ** 64
    style = rng.randrange(3)
    A = [[rng.randint(-bound, bound) if (style != 1 or rng.random() < 0.3) else 0
          for _ in range(c)] for _ in range(r)]
    if style == 2 and r > 1:
        A[-1] = [x + 3 * y for x, y in zip(A[0], A[-2])]     # force a dependent row
    return A


def _check_snf(A):
    dec = smith_normal_form(A)
    r, c = len(A), len(A[0])
    assert matmul(matmul(dec.U, dec.S), dec.V) == A
    assert abs(det(dec.U)) == 1 and abs(det(dec.V)) == 1
    S = dec.S
    assert all(S[i][j] == 0 for i in range(r) for j in range(c) if i != j)
    diag = dec.diagonal
    assert all(s >= 0 for s in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else b % a == 0


def _subgroup_set(G: Group, gens, E_res: np.ndarray) -> set[int]:
    """Indices of <gens>, by breadth-first closure."""
    mods = np.array(G.moduli, dtype=np.int64)
    radix = np.array([math.prod(G.moduli[i + 1:]) for i in range(len(G))], dtype=np.int64)
    seen = {0}
    frontier = [np.zeros(len(G), dtype=np.int64)]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = (v + np.array(g, dtype=np.int64)) % mods
                k = int(w @ radix)
                if k not in seen:
                    seen.add(k)
                    nxt.append(w)
        frontier = nxt
    return seen


ANNIHILATOR_GROUPS = [[256], [2] * 8, [4, 4, 4, 4], [2, 2, 64], [12, 20], [6, 6, 7],
                      [3, 5, 17], [9, 27], [2, 4, 8, 4], [16, 16], [5, 5, 10], [1, 128, 2]]


@pytest.mark.criterion(5, "Smith normal form, solver counts and annihilator laws")
def test_group_linalg():
    rng = random.Random(5)
    for _ in range(1000):
        _check_snf(_random_int_matrix(rng))

    for _ in range(150):
        dom = random_group(rng, max_order=10 ** 4, max_regs=4)
        cod = random_group(rng, max_order=10 ** 4, max_regs=3)
        A = random_hom(rng, dom, cod)
        if rng.random() < 0.5:
            b = apply(A, dom.element(random_element(rng, dom)))
        else:
            b = cod.element(random_element(rng, cod))
        img = (residues(dom) @ np.array(A.entries, dtype=np.int64).T) % np.array(cod.moduli)
        expected = int(np.all(img == np.array(b.residues), axis=1).sum())
        assert count_solutions(A, b) == expected
        sol = solve(A, b)
        assert (sol is None) == (expected == 0)
        if sol is not None:
            assert apply(A, dom.element(sol.x0)) == b
            assert all(apply(A, dom.element(k)) == cod.zero() for k in sol.kernel_gens)
            assert math.prod(sol.kernel_structure) == expected

    for mods in ANNIHILATOR_GROUPS:
        G = Group(mods)
        assert G.order <= 256
        R = residues(G)
        n = G.phase_modulus
        weights = np.array(G.char_weights, dtype=object)
        chars = (R.astype(object) * weights) @ R.T.astype(object) % n   # chars[mu, g]
        trivial = chars == 0
        for _ in range(12):
            gens = [random_element(rng, G) for _ in range(rng.randint(0, 3))]
            H = SubgroupGens(G, gens)
            h_set = _subgroup_set(G, gens, R)
            brute = {mu for mu in range(G.order) if all(trivial[mu, h] for h in h_set)}
            perp = annihilator(H)
            assert _subgroup_set(G, [p.residues for p in perp.generators], R) == brute
            assert len(h_set) * len(brute) == G.order
            back = annihilator(perp)
            assert _subgroup_set(G, [p.residues for p in back.generators], R) == h_set


# ---------------------------------------------------------------------------


@pytest.mark.criterion(6, "Pauli powers, adjoints, commutation and conjugation rules")
def test_pauli_algebra():
    rng = random.Random(6)
    for _ in range(1000):
        G = random_group(rng, max_order=64)
        s = random_pauli(rng, G)
        n = G.phase_modulus
        assert power(s, n) == PauliOperator.identity(G)
        assert power_by_squaring(s, n) == PauliOperator.identity(G)
        assert adjoint(s) == power(s, n - 1) == power_by_squaring(s, n - 1)
        M = dense.pauli_matrix(s)
        assert np.allclose(dense.pauli_matrix(adjoint(s)), M.conj().T, atol=1e-12)

    for _ in range(400):
        G = random_group(rng, max_order=64)
        s, t = random_pauli(rng, G), random_pauli(rng, G)
        S, T = dense.pauli_matrix(s), dense.pauli_matrix(t)
        assert commute(s, t) == np.allclose(S @ T, T @ S, atol=1e-12)

    families = {
        "qft": lambda G: QFT(G, [i for i in range(len(G)) if rng.random() < 0.5] or [0]),
        "automorphism": lambda G: Automorphism(random_automorphism(rng, G)),
        "quadratic": lambda G: QuadraticPhase(random_quadratic(rng, G)),
        "pauli": lambda G: PauliGate(random_pauli(rng, G)),
    }
    for name, make in families.items():
        for _ in range(150):
            G = random_group(rng, max_order=64)
            gate, s = make(G), random_pauli(rng, G)
            U = dense.gate_matrix(gate)
            want = U @ dense.pauli_matrix(s) @ U.conj().T
            got = dense.pauli_matrix(conjugate(gate, s))
            assert np.allclose(got, want, atol=1e-12), name


# ---------------------------------------------------------------------------


@pytest.mark.criterion(7, "automorphism and quadratic fitting round trips")
def test_fitting_round_trips():
    rng = random.Random(7)
    for _ in range(60):
        G = random_group(rng, max_order=256, max_regs=4)
        elements = list(G.elements())
        for A in (random_automorphism(rng, G), random_hom(rng, G, G)):
            fit = fit_automorphism(lambda g: apply(A, g), G, rng=random.Random(0))
            assert all(apply(fit, g) == apply(A, g) for g in elements)
        Q = random_quadratic(rng, G)
        fitted = fit_quadratic(lambda g: evaluate(Q, g), G, rng=random.Random(0))
        assert all(evaluate(fitted, g) == evaluate(Q, g) for g in elements)


# ---------------------------------------------------------------------------


@pytest.mark.criterion(8, "1000-instruction adaptive circuit over Z_2^128 x Z_3^80 x Z_2^8 under 5 s")
def test_scaling():
    G = Group([2 ** 128, 3 ** 80] + [2] * 8)
    assert G.order == 2 ** 136 * 3 ** 80
    rng = random.Random(8)
    c = random_adaptive_circuit(rng, G, 1000, min_pauli=20)
    assert len(c.instructions) == 1000
    start = time.perf_counter()
    t = run(c, ShotRng(8, 0))
    elapsed = time.perf_counter() - start
    assert is_unique(t.stabilizer)
    n = G.phase_modulus
    for r in t.records:
        dist = r.distribution
        assert dist.count * dist.step == n
        assert r.probability == dist.probability(r.exponent) == Fraction(1, dist.count)
    assert elapsed < 5, f"{elapsed:.2f} s"

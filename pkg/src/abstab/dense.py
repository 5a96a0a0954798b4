"""Brute-force state vectors and operator matrices over C^|G| (|G| <= 4096).

Basis index of g is mixed-radix with register 0 most significant, matching
the tensor order F_{d1} (x) ... (x) F_{dm}.
"""

from __future__ import annotations

import numpy as np

from .groups import Group, GroupElement
from .pauli import QFT, Automorphism, NormalizerGate, PauliGate, PauliOperator, QuadraticPhase

MAX_DIM = 4096


def _check(G: Group) -> None:
    if G.order > MAX_DIM:
        raise ValueError(f"|G| = {G.order} is too large for the dense oracle")


def index(g: GroupElement | tuple) -> int:
    if isinstance(g, GroupElement):
        mods, res = g.group.moduli, g.residues
    else:
        raise TypeError("expected a GroupElement")
    i = 0
    for x, d in zip(res, mods):
        i = i * d + x
    return i


def element_at(G: Group, i: int) -> GroupElement:
    res = []
    for d in reversed(G.moduli):
        i, r = divmod(i, d)
        res.append(r)
    return GroupElement(G, reversed(res))


def basis_state(g: GroupElement) -> np.ndarray:
    _check(g.group)
    psi = np.zeros(g.group.order, dtype=complex)
    psi[index(g)] = 1.0
    return psi


def _all_residues(G: Group) -> np.ndarray:
    """|G| x m integer array of residues in index order."""
    grids = np.meshgrid(*[np.arange(d) for d in G.moduli], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def pauli_matrix(s: PauliOperator) -> np.ndarray:
    G = s.group
    _check(G)
    res = _all_residues(G)
    mods = np.array(G.moduli)
    shifted = (res + np.array(s.x)) % mods
    # phase of row |h + x>: gamma^a chi_z(h + x)
    ph = np.exp(2j * np.pi * ((shifted * np.array(s.z)) / mods).sum(axis=1))
    ph = ph * np.exp(1j * np.pi * s.a / G.order)
    radix = np.array([int(np.prod(G.moduli[i + 1:])) for i in range(len(G))])
    rows = shifted @ radix
    U = np.zeros((G.order, G.order), dtype=complex)
    U[rows, np.arange(G.order)] = ph
    return U


def _fourier(d: int) -> np.ndarray:
    x = np.arange(d)
    return np.exp(2j * np.pi * np.outer(x, x) / d) / np.sqrt(d)


def gate_matrix(gate: NormalizerGate) -> np.ndarray:
    G = gate.group
    _check(G)
    if isinstance(gate, QFT):
        U = np.ones((1, 1), dtype=complex)
        for i, d in enumerate(G.moduli):
            f = _fourier(d) if i in gate.registers else np.eye(d)
            U = np.kron(U, f)
        return U
    if isinstance(gate, Automorphism):
        U = np.zeros((G.order, G.order), dtype=complex)
        for g in G.elements():
            U[index(gate.matrix(g)), index(g)] = 1.0
        return U
    if isinstance(gate, QuadraticPhase):
        Q = gate.function
        diag = [np.exp(1j * np.pi * Q.exponent(g.residues) / G.order) for g in G.elements()]
        return np.diag(diag)
    if isinstance(gate, PauliGate):
        return pauli_matrix(gate.pauli)
    raise TypeError(f"unknown gate {gate!r}")


def operator_order(U: np.ndarray, limit: int) -> int:
    """Least N <= limit with U^N = I, found numerically."""
    P = np.eye(U.shape[0], dtype=complex)
    for k in range(1, limit + 1):
        P = U @ P
        if np.allclose(P, np.eye(U.shape[0]), atol=1e-9):
            return k
    raise ValueError("operator order exceeds limit")


def eigenprojectors(U: np.ndarray, limit: int) -> tuple[int, dict[int, np.ndarray]]:
    """Spectral projectors of a unitary of finite order N.

    Returns (N, {j: P_j}) where P_j projects onto the eigenvalue
    exp(2 pi i j / N); P_j = (1/N) sum_k exp(-2 pi i j k / N) U^k, which is a
    DFT along the power axis.  Zero projectors are dropped.
    """
    N = operator_order(U, limit)
    powers = np.empty((N,) + U.shape, dtype=complex)
    powers[0] = np.eye(U.shape[0])
    for k in range(1, N):
        powers[k] = U @ powers[k - 1]
    projs = np.fft.fft(powers, axis=0) / N
    return N, {j: projs[j] for j in range(N) if np.linalg.norm(projs[j]) > 1e-9}


def born_distribution(psi: np.ndarray, s: PauliOperator) -> dict[int, float]:
    """Outcome probabilities keyed by the eigenvalue exponent e (lambda = gamma^e)."""
    G = s.group
    n = G.phase_modulus
    N, projs = eigenprojectors(pauli_matrix(s), n)
    out = {}
    for j, P in projs.items():
        p = float(np.vdot(P @ psi, P @ psi).real)
        if p > 1e-12:
            out[j * (n // N)] = p
    return out


def project(psi: np.ndarray, s: PauliOperator, e: int) -> np.ndarray:
    """Normalised post-measurement state for outcome gamma^e."""
    G = s.group
    n = G.phase_modulus
    N, projs = eigenprojectors(pauli_matrix(s), n)
    j = (e % n) // (n // N)
    phi = projs[j] @ psi
    return phi / np.linalg.norm(phi)


def stabilizer_projector(gens: list[PauliOperator]) -> np.ndarray:
    """Projector onto the joint +1 eigenspace of commuting Paulis."""
    G = gens[0].group if gens else None
    if G is None:
        raise ValueError("need at least one generator")
    P = np.eye(G.order, dtype=complex)
    for s in gens:
        U = pauli_matrix(s)
        N = operator_order(U, G.phase_modulus)
        acc = np.zeros_like(P)
        Uk = np.eye(G.order, dtype=complex)
        for _ in range(N):
            acc += Uk
            Uk = U @ Uk
        P = P @ (acc / N)
    return P


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    i = int(np.argmax(np.abs(b)))
    if abs(b[i]) < tol:
        return np.allclose(a, 0, atol=tol)
    ph = a[i] / b[i]
    if abs(abs(ph) - 1) > tol:
        return False
    return bool(np.allclose(a, ph * b, atol=tol))

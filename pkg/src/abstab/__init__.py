"""Exact classical simulation of normalizer circuits over finite abelian groups."""

from .groups import Group, GroupElement, PhaseExp
from .homomorphism import HomMatrix
from .pauli import QFT, Automorphism, PauliGate, PauliOperator, QuadraticPhase, conjugate
from .quadratic import QuadraticFunction
from .stabilizer import StabilizerGroup, amplitude, measure_pauli

__all__ = [
    "Automorphism", "Group", "GroupElement", "HomMatrix", "PauliGate", "PauliOperator",
    "PhaseExp", "QFT", "QuadraticFunction", "QuadraticPhase", "StabilizerGroup",
    "amplitude", "conjugate", "measure_pauli",
]

"""Step-wise simulation of adaptive normalizer circuits on basis-state inputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .groups import Group, GroupElement, PhaseExp
from .homomorphism import HomMatrix
from .linalg import IntegerSystem, SubgroupGens, kernel_hom
from .pauli import QFT, Automorphism, NormalizerGate, PauliGate, PauliOperator, conjugate
from .rng import ShotRng
from .stabilizer import (OutcomeDistribution, StabilizerGroup, amplitude, is_unique,
                         measure_pauli)


class CircuitError(ValueError):
    """Malformed circuit (bad keys, shapes or groups)."""


class InconsistentCircuitError(RuntimeError):
    """A classical correction could not be computed at run time."""


@dataclass(frozen=True)
class Gate:
    gate: NormalizerGate


@dataclass(frozen=True)
class MeasurePauli:
    pauli: PauliOperator
    store: str


@dataclass(frozen=True)
class MeasureRegister:
    register: int
    store: str


@dataclass(frozen=True)
class CosetCorrect:
    """Apply X(target - g') on the leading registers, where omega(g') = b and
    b is read from the stored register outcomes."""

    target: GroupElement
    omega: HomMatrix
    outcome: tuple[str, ...]


Instruction = Union[Gate, MeasurePauli, MeasureRegister, CosetCorrect]


@dataclass
class Circuit:
    group: Group
    input: GroupElement
    instructions: list[Instruction] = field(default_factory=list)
    main_registers: int | None = None

    def __post_init__(self):
        validate_circuit(self)


def validate_circuit(c: Circuit) -> None:
    G = c.group
    if c.input.group != G:
        raise CircuitError("input is not an element of the circuit group")
    seen: set[str] = set()
    for k, ins in enumerate(c.instructions):
        where = f"instruction {k}"
        if isinstance(ins, Gate):
            if ins.gate.group != G:
                raise CircuitError(f"{where}: gate acts on {ins.gate.group}")
        elif isinstance(ins, (MeasurePauli, MeasureRegister)):
            if ins.store in seen:
                raise CircuitError(f"{where}: store key {ins.store!r} reused")
            seen.add(ins.store)
            if isinstance(ins, MeasurePauli) and ins.pauli.group != G:
                raise CircuitError(f"{where}: Pauli over {ins.pauli.group}")
            if isinstance(ins, MeasureRegister) and not 0 <= ins.register < len(G):
                raise CircuitError(f"{where}: register {ins.register} out of range")
        elif isinstance(ins, CosetCorrect):
            m = len(ins.omega.domain)
            if ins.omega.domain.moduli != G.moduli[:m]:
                raise CircuitError(f"{where}: omega domain is not a leading block")
            if ins.target.group != ins.omega.domain:
                raise CircuitError(f"{where}: target outside omega's domain")
            if len(ins.outcome) != len(ins.omega.codomain):
                raise CircuitError(f"{where}: need one outcome key per omega row")
            for key in ins.outcome:
                if key not in seen:
                    raise CircuitError(f"{where}: outcome {key!r} not measured before")
        else:
            raise CircuitError(f"{where}: unknown instruction {ins!r}")


@dataclass
class MeasurementRecord:
    key: str
    pauli: PauliOperator
    distribution: OutcomeDistribution
    exponent: int
    value: int
    probability: Fraction
    register: int | None = None

    def table(self) -> dict[int, Fraction]:
        """Exact outcome distribution keyed like ``value``.

        Enumerates every outcome; see :meth:`closed_form` for large groups.
        """
        dist = self.distribution.as_dict()
        if self.register is None:
            return dict(sorted(dist.items()))
        w = self.distribution.group.char_weights[self.register]
        return dict(sorted((e // w, p) for e, p in dist.items()))

    def closed_form(self) -> tuple[int, int, int, int]:
        """(base, step, count, modulus): outcomes base + j*step mod modulus for
        j < count, each with probability 1/count, keyed like ``value``."""
        d = self.distribution
        n = d.group.phase_modulus
        if self.register is None:
            return d.base % n, d.step, d.count, n
        w = d.group.char_weights[self.register]
        return (d.base % n) // w, d.step // w, d.count, n // w


@dataclass
class EngineState:
    stabilizer: StabilizerGroup
    rng: ShotRng
    classical: dict[str, int] = field(default_factory=dict)
    records: list[MeasurementRecord] = field(default_factory=list)

    @property
    def group(self) -> Group:
        return self.stabilizer.group


def initialize(group: Group, input: GroupElement, rng: ShotRng | None = None) -> EngineState:
    """Stabilizer of |input>: gamma^{-chi_{e_i}(input)} Z(e_i) for every i."""
    gens = []
    for i in range(len(group)):
        e = group.basis(i)
        if group.moduli[i] == 1:
            continue
        a = -group.char_weights[i] * input.residues[i]
        gens.append(PauliOperator(group, a, e.residues, group.zero().residues))
    return EngineState(StabilizerGroup(group, gens), rng or ShotRng())


def _measure(state: EngineState, t: PauliOperator, forced: int | None):
    # gates and measurements keep the state unique; run(check=True) re-verifies
    out = measure_pauli(state.stabilizer, t, state.rng, outcome=forced, check=False)
    state.stabilizer = out.post_stabilizer
    return out


def step(state: EngineState, ins: Instruction, forced: int | None = None) -> EngineState:
    """Advance ``state`` by one instruction (in place; also returned).

    ``forced`` pins the eigenvalue exponent of a measurement instead of
    sampling it; tests use it to follow a chosen branch.
    """
    G = state.group
    if isinstance(ins, Gate):
        S = state.stabilizer
        state.stabilizer = StabilizerGroup(G, [conjugate(ins.gate, s) for s in S.generators],
                                           check=False)
    elif isinstance(ins, MeasurePauli):
        out = _measure(state, ins.pauli, forced)
        e = out.eigenvalue_exp.exponent
        state.classical[ins.store] = e
        state.records.append(MeasurementRecord(ins.store, ins.pauli, out.distribution,
                                               e, e, out.probability))
    elif isinstance(ins, MeasureRegister):
        i = ins.register
        t = PauliOperator.Z(G, G.basis(i).residues)
        out = _measure(state, t, forced)
        e = out.eigenvalue_exp.exponent
        y = e // G.char_weights[i]
        state.classical[ins.store] = y
        state.records.append(MeasurementRecord(ins.store, t, out.distribution,
                                               e, y, out.probability, i))
    elif isinstance(ins, CosetCorrect):
        omega = ins.omega
        b = omega.codomain.reduce([state.classical[k] for k in ins.outcome])
        system = IntegerSystem(omega.entries, omega.codomain.moduli, omega.domain.moduli)
        g = system.particular(b)
        if g is None:
            raise InconsistentCircuitError(f"omega g = {list(b)} has no solution")
        m = len(omega.domain)
        shift = [(t - v) for t, v in zip(ins.target.residues, g)]
        shift += [0] * (len(G) - m)
        gate = PauliGate(PauliOperator.X(G, shift))
        S = state.stabilizer
        state.stabilizer = StabilizerGroup(G, [conjugate(gate, s) for s in S.generators],
                                           check=False)
    else:
        raise CircuitError(f"unknown instruction {ins!r}")
    return state


@dataclass
class Transcript:
    outcomes: dict[str, int]
    stabilizer: StabilizerGroup
    records: list[MeasurementRecord]


def run(circuit: Circuit, rng: ShotRng | None = None, check: bool = False) -> Transcript:
    """Fold :func:`step` over the circuit; ``check`` asserts uniqueness after each step."""
    state = initialize(circuit.group, circuit.input, rng)
    for ins in circuit.instructions:
        step(state, ins)
        if check and not is_unique(state.stabilizer):
            raise AssertionError(f"state lost uniqueness after {ins!r}")
    return Transcript(dict(state.classical), state.stabilizer, state.records)


def prepare_coset_state(H: SubgroupGens, x: GroupElement) -> Circuit:
    """Adaptive circuit leaving |x + H> on the leading registers.

    Ancilla registers Z_N^s carry omega with ker(omega) = H; they end in the
    measured basis state and can be discarded.
    """
    G = H.group
    if x.group != G:
        raise CircuitError("x is not in the group of H")
    omega = kernel_hom(H)
    anc = omega.codomain
    big = G.product(anc)
    m, s = len(G), len(anc)
    # alpha(g, h) = (g, h + omega g)
    rows = [[int(i == j) for j in range(m + s)] for i in range(m)]
    for k in range(s):
        rows.append(list(omega.entries[k]) + [int(k == j) for j in range(s)])
    alpha = Automorphism(HomMatrix(big, big, rows))
    keys = tuple(f"b{k}" for k in range(s))
    ins: list[Instruction] = [Gate(QFT(big, range(m))), Gate(alpha)]
    ins += [MeasureRegister(m + k, keys[k]) for k in range(s)]
    ins.append(CosetCorrect(x, omega, keys))
    return Circuit(big, big.zero(), ins, main_registers=m)


def block_amplitude(S: StabilizerGroup, m: int, x: Sequence[int]) -> tuple[PhaseExp, int] | None:
    """Amplitude on the leading m registers when the rest is a basis state."""
    from .stabilizer import label_groups, support_representative

    G = S.group
    H, _, _ = label_groups(S)
    if any(any(h.residues[m:]) for h in H.generators):
        raise CircuitError("trailing registers are entangled with the leading block")
    rest = support_representative(S).residues[m:]
    return amplitude(S, G.element(list(x) + list(rest)))


def holds_coset_state(S: StabilizerGroup, target: GroupElement, omega: HomMatrix) -> bool:
    """True iff the leading block of S is exactly |target + ker(omega)>.

    That state is the unique +1 eigenstate of X(h) for h in ker(omega) and
    conj(chi_mu(target)) Z(mu) for mu in ker(omega)^perp, so it suffices that
    each of those operators has expectation exactly 1.
    """
    from .linalg import annihilator_raw
    from .stabilizer import expectation

    G, sub = S.group, omega.domain
    pad = [0] * (len(G) - len(sub))
    kern = IntegerSystem(omega.entries, omega.codomain.moduli, sub.moduli).kernel()
    checks = [PauliOperator.X(G, list(h) + pad) for h in kern]
    for mu in annihilator_raw(sub.moduli, kern):
        a = -sum(w * u * t for w, u, t in zip(sub.char_weights, mu, target.residues))
        # exponents live mod 2|G|, so rescale from the block's 2|sub|
        checks.append(PauliOperator.Z(G, list(mu) + pad, a * (G.order // sub.order)))
    if not kern and not annihilator_raw(sub.moduli, kern):
        return True
    return all(e is not None and e.exponent == 0
               for e in (expectation(S, t) for t in checks))

"""JSON file formats for groups, matrices, Paulis, quadratic functions and circuits.

Integers are written as decimal strings so that moduli beyond 64 bits
survive round trips through any JSON reader; plain JSON integers are
accepted on input.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .engine import (Circuit, CircuitError, CosetCorrect, Gate, Instruction, MeasurePauli,
                     MeasureRegister)
from .groups import Group, GroupElement
from .homomorphism import HomMatrix, InvalidHomomorphismError
from .pauli import QFT, Automorphism, InvalidGateError, PauliGate, PauliOperator, QuadraticPhase
from .quadratic import InvalidQuadraticError, QuadraticFunction


class ParseError(ValueError):
    """Input is not well-formed for the expected file format."""


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _field(obj: Any, key: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object with key {key!r}, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"missing key {key!r}")
    return obj[key]


def parse_int(s: Any) -> int:
    if isinstance(s, bool):
        raise ParseError(f"expected an integer, got {s!r}")
    if isinstance(s, int):
        return s
    if isinstance(s, str):
        try:
            return int(s.strip(), 10)
        except ValueError:
            pass
    raise ParseError(f"expected a decimal integer, got {s!r}")


def parse_fraction(s: Any) -> Fraction:
    if isinstance(s, bool):
        raise ParseError(f"expected a rational, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"expected a rational 'p/q', got {s!r}")


def _int_list(obj: Any) -> list[int]:
    if not isinstance(obj, list):
        raise ParseError(f"expected an array, got {obj!r}")
    return [parse_int(v) for v in obj]


def parse_group(obj: Any) -> Group:
    mods = _int_list(obj)
    if any(d < 1 for d in mods):
        raise ParseError(f"moduli must be positive: {mods}")
    return Group(mods)


def parse_element(G: Group, obj: Any) -> GroupElement:
    res = _int_list(obj)
    if len(res) != len(G):
        raise ParseError(f"element {res} has {len(res)} entries, group has {len(G)}")
    return G.element(res)


def _rows(obj: Any, nrows: int, ncols: int, parse=parse_int) -> list[list]:
    """Row-major entries, given either flat or as a list of rows."""
    if not isinstance(obj, list):
        raise ParseError("matrix entries must be an array")
    if obj and all(isinstance(r, list) for r in obj):
        if len(obj) != nrows or any(len(r) != ncols for r in obj):
            raise ParseError(f"expected a {nrows}x{ncols} matrix")
        return [[parse(v) for v in r] for r in obj]
    if len(obj) != nrows * ncols:
        raise ParseError(f"expected {nrows * ncols} entries, got {len(obj)}")
    flat = [parse(v) for v in obj]
    return [flat[i * ncols:(i + 1) * ncols] for i in range(nrows)]


def parse_matrix(obj: Any) -> HomMatrix:
    dom = parse_group(_field(obj, "domain"))
    cod = parse_group(_field(obj, "codomain"))
    rows = _rows(_field(obj, "entries"), len(cod), len(dom))
    return HomMatrix(dom, cod, rows)


def parse_quadratic(G: Group, obj: Any) -> QuadraticFunction:
    m = len(G)
    M = _rows(_field(obj, "M"), m, m, parse_fraction)
    v = [parse_fraction(x) for x in obj.get("v", ["0"] * m)]
    if len(v) != m:
        raise ParseError(f"v must have {m} entries")
    return QuadraticFunction(G, M, v)


def parse_pauli(G: Group, obj: Any) -> PauliOperator:
    return PauliOperator(G, parse_int(_field(obj, "a")), parse_element(G, _field(obj, "z")),
                         parse_element(G, _field(obj, "x")))


def parse_instruction(G: Group, obj: Any) -> Instruction:
    op = _field(obj, "op")
    try:
        if op == "qft":
            return Gate(QFT(G, _int_list(_field(obj, "registers"))))
        if op == "automorphism":
            A = parse_matrix(_field(obj, "matrix"))
            if A.domain != G:
                raise InvalidGateError(f"automorphism over {A.domain}, circuit over {G}")
            return Gate(Automorphism(A))
        if op == "quadratic":
            return Gate(QuadraticPhase(parse_quadratic(G, obj)))
        if op == "pauli":
            return Gate(PauliGate(parse_pauli(G, obj)))
        if op == "measure_pauli":
            return MeasurePauli(parse_pauli(G, _field(obj, "pauli")), str(_field(obj, "store")))
        if op == "measure_register":
            return MeasureRegister(parse_int(_field(obj, "register")), str(_field(obj, "store")))
        if op == "coset_correct":
            omega = parse_matrix(_field(obj, "omega"))
            keys = _field(obj, "outcome")
            keys = (keys,) if isinstance(keys, str) else tuple(str(k) for k in keys)
            target = parse_element(omega.domain, _field(obj, "target"))
            return CosetCorrect(target, omega, keys)
    except (InvalidHomomorphismError, InvalidQuadraticError) as exc:
        raise InvalidGateError(str(exc)) from exc
    raise ParseError(f"unknown op {op!r}")


def parse_circuit(obj: Any) -> Circuit:
    G = parse_group(_field(obj, "group"))
    x = parse_element(G, obj.get("input", ["0"] * len(G)))
    raw = obj.get("instructions", [])
    if not isinstance(raw, list):
        raise ParseError("instructions must be an array")
    ins = [parse_instruction(G, r) for r in raw]
    main = obj.get("main_registers")
    return Circuit(G, x, ins, None if main is None else parse_int(main))


# --- emitting -------------------------------------------------------------


def _strs(xs) -> list[str]:
    return [str(int(v)) for v in xs]


def dump_group(G: Group) -> list[str]:
    return _strs(G.moduli)


def dump_matrix(A: HomMatrix) -> dict:
    return {"domain": dump_group(A.domain), "codomain": dump_group(A.codomain),
            "entries": [_strs(r) for r in A.entries]}


def dump_pauli(s: PauliOperator) -> dict:
    return {"a": str(s.a), "z": _strs(s.z), "x": _strs(s.x)}


def dump_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def dump_instruction(ins: Instruction) -> dict:
    if isinstance(ins, Gate):
        g = ins.gate
        if isinstance(g, QFT):
            return {"op": "qft", "registers": _strs(g.registers)}
        if isinstance(g, Automorphism):
            return {"op": "automorphism", "matrix": dump_matrix(g.matrix)}
        if isinstance(g, QuadraticPhase):
            Q = g.function
            return {"op": "quadratic", "M": [[dump_fraction(v) for v in r] for r in Q.M],
                    "v": [dump_fraction(v) for v in Q.v]}
        if isinstance(g, PauliGate):
            return {"op": "pauli", **dump_pauli(g.pauli)}
    if isinstance(ins, MeasurePauli):
        return {"op": "measure_pauli", "pauli": dump_pauli(ins.pauli), "store": ins.store}
    if isinstance(ins, MeasureRegister):
        return {"op": "measure_register", "register": str(ins.register), "store": ins.store}
    if isinstance(ins, CosetCorrect):
        return {"op": "coset_correct", "target": _strs(ins.target.residues),
                "omega": dump_matrix(ins.omega), "outcome": list(ins.outcome)}
    raise CircuitError(f"cannot serialise {ins!r}")


def dump_circuit(c: Circuit) -> dict:
    out = {"group": dump_group(c.group), "input": _strs(c.input.residues),
           "instructions": [dump_instruction(i) for i in c.instructions]}
    if c.main_registers is not None:
        out["main_registers"] = str(c.main_registers)
    return out

"""Command-line interface: abstab <subcommand> ...

Exit codes: 0 success, 2 usage error (argparse), 3 unreadable or malformed
input, 4 invalid gate or instruction, 5 unsolvable linear system,
6 inconsistent circuit at run time.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import io
from .engine import (Circuit, CircuitError, CosetCorrect, Gate, InconsistentCircuitError,
                     MeasurePauli, MeasureRegister, block_amplitude, holds_coset_state,
                     initialize, prepare_coset_state, run, step)
from .groups import GroupMismatchError
from .homomorphism import InvalidHomomorphismError
from .linalg import SubgroupGens, solve_system, subgroup_order
from .pauli import InvalidGateError
from .quadratic import InvalidQuadraticError
from .rng import ShotRng
from .snf import smith_normal_form
from .stabilizer import amplitude, label_groups, structure_test

EXIT_PARSE, EXIT_GATE, EXIT_UNSOLVABLE, EXIT_INCONSISTENT = 3, 4, 5, 6


class Unsolvable(Exception):
    def __init__(self, report: dict):
        self.report = report


def _workers(shots: int) -> int:
    cap = os.environ.get("ABSTAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, int(cap))
        except ValueError:
            raise io.ParseError(f"ABSTAB_THREADS={cap!r} is not an integer")
    return max(1, min(n, shots))


def _frac(p: Fraction) -> str:
    return io.dump_fraction(p)


TABLE_LIMIT = 1024


def _distribution(r) -> dict:
    """Outcome -> probability, or a closed form when there are too many outcomes."""
    base, step, count, modulus = r.closed_form()
    if count <= TABLE_LIMIT:
        return {str(v): _frac(p) for v, p in r.table().items()}
    return {"uniform": {"base": str(base), "step": str(step), "count": str(count),
                        "modulus": str(modulus), "probability": _frac(Fraction(1, count))}}


def _last_coset(c: Circuit) -> CosetCorrect | None:
    for ins in reversed(c.instructions):
        if isinstance(ins, CosetCorrect):
            return ins
    return None


def _run_shot(c: Circuit, seed: int, shot: int, probabilities: bool) -> dict:
    t = run(c, ShotRng(seed, shot))
    out = {"shot": shot, "outcomes": {k: str(v) for k, v in t.outcomes.items()}}
    if probabilities:
        out["probabilities"] = {r.key: _distribution(r) for r in t.records}
    cc = _last_coset(c)
    if cc is not None:
        out["coset_ok"] = holds_coset_state(t.stabilizer, cc.target, cc.omega)
    return out


def cmd_simulate(args) -> dict:
    c = io.parse_circuit(io.load_json(args.circuit))
    if args.shots < 0:
        raise io.ParseError("--shots must be non-negative")
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_workers(args.shots)) as pool:
        shots = list(pool.map(lambda k: _run_shot(c, args.seed, k, args.probabilities),
                              range(args.shots)))
    elapsed = time.perf_counter() - t0
    freq = Counter(tuple(sorted(s["outcomes"].items())) for s in shots)
    report = {"shots": shots,
              "frequencies": [{"outcomes": dict(k), "count": str(n)}
                              for k, n in sorted(freq.items())]}
    if _last_coset(c) is not None:
        ok = sum(1 for s in shots if s["coset_ok"])
        report["coset_success"] = f"{ok}/{len(shots)}"
    if args.timing:
        print(f"simulated {args.shots} shot(s) in {elapsed:.3f} s", file=sys.stderr)
    return report


def _table_simulate(r: dict) -> str:
    lines = []
    keys = sorted({k for s in r["shots"] for k in s["outcomes"]})
    lines.append("\t".join(["shot"] + keys + (["coset_ok"] if "coset_success" in r else [])))
    for s in r["shots"]:
        row = [str(s["shot"])] + [s["outcomes"].get(k, "") for k in keys]
        if "coset_ok" in s:
            row.append("yes" if s["coset_ok"] else "no")
        lines.append("\t".join(row))
        for key, table in s.get("probabilities", {}).items():
            if "uniform" in table:
                u = table["uniform"]
                lines.append(f"\t{key} ~ uniform on {u['base']} + j*{u['step']} "
                             f"mod {u['modulus']}, j < {u['count']}")
                continue
            probs = ", ".join(f"{v}: {p}" for v, p in table.items())
            lines.append(f"\t{key} ~ {{{probs}}}")
    lines.append("")
    lines.append("frequencies")
    for f in r["frequencies"]:
        label = " ".join(f"{k}={v}" for k, v in f["outcomes"].items()) or "(no outcomes)"
        lines.append(f"\t{label}\t{f['count']}")
    if "coset_success" in r:
        lines.append(f"coset state prepared: {r['coset_success']}")
    return "\n".join(lines)


def cmd_amplitude(args) -> dict:
    c = io.parse_circuit(io.load_json(args.circuit))
    S = run(c, ShotRng(args.seed, args.shot)).stabilizer
    G = c.group
    x = [io.parse_int(v) for v in args.element]
    m = c.main_registers
    if m is not None and len(x) == m and m != len(G):
        amp = block_amplitude(S, m, x)
    elif len(x) == len(G):
        amp = amplitude(S, G.element(x))
    else:
        raise io.ParseError(f"element needs {len(G)} entries")
    report = {"element": [str(v) for v in x]}
    if amp is None:
        report.update({"amplitude": "0"})
        return report
    phase, h = amp
    value = complex(phase) / math.sqrt(h)
    report.update({"phase_exponent": str(phase.exponent),
                   "phase_modulus": str(G.phase_modulus),
                   "h_order": str(h),
                   "amplitude": f"{value.real:.15g}{value.imag:+.15g}j"})
    return report


def _table_amplitude(r: dict) -> str:
    if r["amplitude"] == "0":
        return f"<{' '.join(r['element'])}|psi> = 0"
    return "\n".join([
        f"<{' '.join(r['element'])}|psi> = gamma^{r['phase_exponent']} / sqrt({r['h_order']})",
        f"gamma = exp(2 pi i / {r['phase_modulus']})",
        f"approx {r['amplitude']}",
    ])


def _describe(ins) -> str:
    if isinstance(ins, Gate):
        return io.dump_instruction(ins)["op"]
    return io.dump_instruction(ins)["op"] + (f" -> {ins.store}" if hasattr(ins, "store") else "")


def _summary(S) -> dict:
    H, D, _ = label_groups(S)
    _, _, dim = structure_test(S)
    d_order = subgroup_order(D)
    return {"generators": [repr(g) for g in S.generators],
            "H_order": str(S.h_order), "D_order": str(d_order), "dim": str(dim)}


def cmd_stabilizer_trace(args) -> dict:
    c = io.parse_circuit(io.load_json(args.circuit))
    state = initialize(c.group, c.input, ShotRng(args.seed, args.shot))
    steps = [{"step": "0", "op": "input", **_summary(state.stabilizer)}]
    for k, ins in enumerate(c.instructions, 1):
        step(state, ins)
        entry = {"step": str(k), "op": _describe(ins), **_summary(state.stabilizer)}
        if isinstance(ins, (MeasurePauli, MeasureRegister)):
            entry["outcome"] = str(state.classical[ins.store])
        steps.append(entry)
    return {"group": io.dump_group(c.group), "steps": steps}


def _table_trace(r: dict) -> str:
    lines = []
    for s in r["steps"]:
        extra = f" = {s['outcome']}" if "outcome" in s else ""
        lines.append(f"[{s['step']}] {s['op']}{extra}   |H|={s['H_order']} |D|={s['D_order']} "
                     f"dim={s['dim']}")
        lines.extend(f"    {g}" for g in s["generators"])
    return "\n".join(lines)


def cmd_solve(args) -> dict:
    obj = io.load_json(args.system)
    dom = io._int_list(io._field(obj, "domain"))
    cod = io._int_list(io._field(obj, "codomain"))
    if any(v < 0 for v in dom + cod):
        raise io.ParseError("moduli must be non-negative (0 stands for Z)")
    A = io._rows(io._field(obj, "matrix"), len(cod), len(dom))
    b = io._int_list(io._field(obj, "b"))
    if len(b) != len(cod):
        raise io.ParseError(f"b needs {len(cod)} entries")
    for i, d in enumerate(cod):
        for j, c in enumerate(dom):
            # consistency: c_j A(i,j) = 0 mod d_i
            if d and (c * A[i][j]) % d:
                raise io.ParseError(f"entry ({i},{j}) does not define a homomorphism")
    sol = solve_system(A, b, cod, dom)
    if sol is None:
        raise Unsolvable({"solvable": False, "x0": None, "kernel_gens": [], "count": "0"})
    return {"solvable": True, "x0": [str(v) for v in sol.x0],
            "kernel_gens": [[str(v) for v in g] for g in sol.kernel_gens],
            "count": "inf" if sol.count is None else str(sol.count)}


def _table_solve(r: dict) -> str:
    if not r["solvable"]:
        return "no solution"
    lines = [f"x0 = ({', '.join(r['x0'])})", f"count = {r['count']}", "kernel generators:"]
    lines.extend(f"    ({', '.join(g)})" for g in r["kernel_gens"])
    if not r["kernel_gens"]:
        lines.append("    (none)")
    return "\n".join(lines)


def cmd_snf(args) -> dict:
    obj = io.load_json(args.matrix)
    raw = obj.get("matrix", obj.get("entries")) if isinstance(obj, dict) else obj
    if raw is None or not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise io.ParseError("expected a nested integer matrix under 'matrix'")
    A = [io._int_list(r) for r in raw]
    if len({len(r) for r in A}) > 1:
        raise io.ParseError("ragged matrix")
    ncols = len(A[0]) if A else 0
    D = smith_normal_form(A, ncols=ncols)

    def dump(M):
        return [[str(v) for v in row] for row in M]

    return {"diagonal": [str(v) for v in D.diagonal], "U": dump(D.U), "S": dump(D.S),
            "V": dump(D.V)}


def _table_snf(r: dict) -> str:
    out = [f"diagonal: {' '.join(r['diagonal'])}"]
    for name in ("U", "S", "V"):
        out.append(f"{name} =")
        out.extend("    " + " ".join(row) for row in r[name])
    return "\n".join(out)


def cmd_coset(args) -> dict:
    obj = io.load_json(args.request)
    G = io.parse_group(io._field(obj, "group"))
    gens = [io.parse_element(G, g) for g in obj.get("generators", [])]
    x = io.parse_element(G, obj.get("x", ["0"] * len(G)))
    c = prepare_coset_state(SubgroupGens(G, gens), x)
    doc = io.dump_circuit(c)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return doc


TABLES = {"simulate": _table_simulate, "amplitude": _table_amplitude,
          "stabilizer-trace": _table_trace, "solve": _table_solve, "snf": _table_snf,
          "coset": lambda r: json.dumps(r, indent=2)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abstab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--format", choices=["table", "json"], default="table")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--shot", type=int, default=0, help="shot index to follow")

    s = sub.add_parser("simulate", help="sample measurement outcomes")
    s.add_argument("circuit")
    s.add_argument("--shots", type=int, default=1)
    s.add_argument("--probabilities", action="store_true",
                   help="print exact outcome distributions along each shot")
    s.add_argument("--timing", action="store_true", help="report wall time on stderr")
    common(s)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("amplitude", help="exact amplitude of the output state")
    s.add_argument("circuit")
    s.add_argument("element", nargs="+", help="basis element residues")
    common(s)
    s.set_defaults(func=cmd_amplitude)

    s = sub.add_parser("stabilizer-trace", help="stabilizer generators after every step")
    s.add_argument("circuit")
    common(s)
    s.set_defaults(func=cmd_stabilizer_trace)

    s = sub.add_parser("solve", help="solve A x = b over abelian groups")
    s.add_argument("system")
    common(s, seed=False)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("snf", help="Smith normal form A = U S V")
    s.add_argument("matrix")
    common(s, seed=False)
    s.set_defaults(func=cmd_snf)

    s = sub.add_parser("coset", help="emit a circuit preparing |x + H>")
    s.add_argument("request", help='{"group": [...], "generators": [[...]], "x": [...]}')
    s.add_argument("-o", "--output", help="write the circuit here instead of stdout")
    common(s, seed=False)
    s.set_defaults(func=cmd_coset)
    return p


def _emit(args, report: dict) -> None:
    if args.command == "coset" and args.output:
        return
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(TABLES[args.command](report))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except Unsolvable as exc:
        _emit(args, exc.report)
        return EXIT_UNSOLVABLE
    except io.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidGateError, InvalidHomomorphismError, InvalidQuadraticError, CircuitError,
            GroupMismatchError) as exc:
        print(f"error: invalid gate or instruction: {exc}", file=sys.stderr)
        return EXIT_GATE
    except InconsistentCircuitError as exc:
        print(f"error: inconsistent circuit: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    _emit(args, report)
    return 0

"""Command-line surface.

Every engine task is exposed as a subcommand emitting one JSON report object
on stdout (diagnostics go to stderr).  Exit codes: 0 success, 2 input error,
3 internal assertion failure.  Identical invocations produce byte-identical
reports apart from the wall-time field.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import engine, report
from .circuit import (
    CircuitParseError,
    GateSetError,
    builtin_gateset,
    generate_bv,
    generate_ghz,
    generate_linear_network,
    load_gateset,
    parse_circuit,
    serialize_circuit,
    validate_circuit,
)
from .exactnum import to_json
from .mtbdd import DEFAULT_GC_WATERMARK
from .oracle import sv_amplitude

_BUILTIN_SETS = ("z", "t", "g")


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_gateset_arg(arg: str):
    if arg in _BUILTIN_SETS:
        return builtin_gateset(arg), f"builtin:{arg}"
    with open(arg, "rb") as handle:
        raw = handle.read()
    return load_gateset(raw.decode()), _sha256(raw)


def _load_circuit_arg(path: str, fmt: str, gateset):
    with open(path, "rb") as handle:
        raw = handle.read()
    circuit = parse_circuit(raw.decode(), fmt, gateset)
    validate_circuit(circuit, gateset)
    return circuit, _sha256(raw)


def _sim_options(args) -> engine.SimOptions:
    order = args.order
    if order.startswith("file:"):
        with open(order[5:]) as handle:
            order = [int(tok) for tok in handle.read().split()]
    watermark = int(os.environ.get("FEYNDD_GC_WATERMARK", DEFAULT_GC_WATERMARK))
    return engine.SimOptions(order_strategy=order, sifting=args.sift,
                             simplify=not args.no_simplify,
                             seed=getattr(args, "seed", 0),
                             gc_watermark=watermark)


def _emit(reportobj: dict, quiet_value, args) -> None:
    if args.quiet:
        print(quiet_value)
    else:
        print(json.dumps(reportobj, sort_keys=True, indent=2))


def _base_report(task: str, args, stats: engine.TaskStats | None,
                 started: float) -> dict:
    out = {
        "task": task,
        "wall_time_s": round(time.monotonic() - started, 6),
        "options": {
            "order": args.order,
            "sift": bool(args.sift),
            "simplify": not args.no_simplify,
            "seed": getattr(args, "seed", 0),
        },
    }
    if stats is not None:
        out["dd_nodes"] = stats.dd_nodes
        out["peak_nodes"] = stats.peak_nodes
        out["variable_order"] = list(stats.order)
    return out


def _cmd_amplitude(args) -> int:
    started = time.monotonic()
    gateset, gs_digest = _load_gateset_arg(args.gateset)
    circuit, c_digest = _load_circuit_arg(args.circuit, args.format, gateset)
    if len(args.bitstring) != circuit.num_qubits or set(args.bitstring) - {"0", "1"}:
        raise ValueError(f"bitstring must be {circuit.num_qubits} bits of 0/1")
    opts = _sim_options(args)
    value, stats = engine.amplitude(circuit, gateset, args.bitstring, opts)
    out = _base_report("amplitude", args, stats, started)
    out["inputs"] = {"circuit_sha256": c_digest, "gateset": gs_digest,
                     "bitstring": args.bitstring}
    out["result"] = to_json(value)
    if args.oracle:
        ref = sv_amplitude(circuit, args.bitstring, gateset)
        err = abs(complex(out["result"]["re"], out["result"]["im"]) - ref)
        out["oracle"] = {"re": ref.real, "im": ref.imag, "abs_error": err}
        if err > 1e-9:
            raise AssertionError(f"oracle disagrees with pipeline by {err}")
    _emit(out, f'{out["result"]["re"]!r} {out["result"]["im"]!r}', args)
    return 0


def _cmd_prob(args) -> int:
    started = time.monotonic()
    gateset, gs_digest = _load_gateset_arg(args.gateset)
    circuit, c_digest = _load_circuit_arg(args.circuit, args.format, gateset)
    qubits = [int(tok) for tok in args.qubits.split(",") if tok]
    outcomes = [int(b) for b in args.outcomes]
    if len(qubits) != len(outcomes):
        raise ValueError("--qubits and --outcomes must have matching lengths")
    if len(set(qubits)) != len(qubits):
        raise ValueError("--qubits repeats a qubit")
    opts = _sim_options(args)
    prob, stats = engine.joint_probability(circuit, gateset,
                                           dict(zip(qubits, outcomes)), opts)
    out = _base_report("prob", args, stats, started)
    out["inputs"] = {"circuit_sha256": c_digest, "gateset": gs_digest,
                     "qubits": qubits, "outcomes": outcomes}
    out["result"] = {"probability": prob}
    _emit(out, repr(prob), args)
    return 0


def _cmd_sample(args) -> int:
    started = time.monotonic()
    gateset, gs_digest = _load_gateset_arg(args.gateset)
    circuit, c_digest = _load_circuit_arg(args.circuit, args.format, gateset)
    opts = _sim_options(args)
    samples, stats = engine.sample(circuit, gateset, args.shots, opts)
    out = _base_report("sample", args, stats, started)
    out["inputs"] = {"circuit_sha256": c_digest, "gateset": gs_digest,
                     "shots": args.shots}
    out["result"] = {"samples": samples}
    out["seed"] = args.seed
    if args.figure:
        report.render_histogram(samples, args.figure)
        out["figure"] = args.figure
    _emit(out, "\n".join(samples), args)
    return 0


def _cmd_equiv(args) -> int:
    started = time.monotonic()
    gateset, gs_digest = _load_gateset_arg(args.gateset)
    c0, d0 = _load_circuit_arg(args.c0, args.format, gateset)
    c1, d1 = _load_circuit_arg(args.c1, args.format, gateset)
    if args.mutate == "missing":
        c1 = engine.mutate_missing(c1, args.seed)
    elif args.mutate == "reverse":
        mutated = engine.mutate_reverse(c1, args.seed)
        if mutated is None:
            raise ValueError("circuit has no cnot gate to reverse")
        c1 = mutated
    opts = _sim_options(args)
    verdict, stats = engine.check_equivalence(c0, c1, gateset, opts)
    out = _base_report("equiv", args, stats, started)
    out["inputs"] = {"c0_sha256": d0, "c1_sha256": d1, "gateset": gs_digest,
                     "mutate": args.mutate}
    out["result"] = {
        "equivalent": verdict.equivalent,
        "trace": to_json(verdict.trace_value),
        "phase_index": verdict.phase_index,
    }
    _emit(out, "equivalent" if verdict.equivalent else "not-equivalent", args)
    return 0


def _cmd_gen(args) -> int:
    started = time.monotonic()
    poly = None
    if args.family == "ghz":
        circuit = generate_ghz(args.n)
    elif args.family == "bv":
        circuit = generate_bv(args.n)
    elif args.family == "linear":
        if args.k is None:
            raise ValueError("--k is required for the linear family")
        circuit, poly = generate_linear_network(args.n, args.k, args.seed)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    text = serialize_circuit(circuit)
    with open(args.out, "w") as handle:
        handle.write(text)
    out = _base_report("gen", args, None, started)
    out["inputs"] = {"family": args.family, "n": args.n, "k": args.k,
                     "seed": args.seed}
    out["result"] = {"path": args.out, "qubits": circuit.num_qubits,
                     "gates": len(circuit.gates)}
    if poly is not None:
        out["result"]["poly_terms"] = len(poly)
    _emit(out, args.out, args)
    return 0


def _cmd_scaling(args) -> int:
    started = time.monotonic()
    gateset, gs_digest = _load_gateset_arg(args.gateset)
    sizes = [int(tok) for tok in args.sizes.split(",") if tok]
    if not sizes:
        raise ValueError("--sizes must list at least one size")
    opts = _sim_options(args)
    rows = report.run_scan(args.family, sizes, args.k, args.seed, gateset, opts)
    report.write_csv(rows, args.csv)
    report.render_figure(rows, args.figure)
    out = _base_report("scaling", args, None, started)
    out["inputs"] = {"family": args.family, "sizes": sizes, "k": args.k,
                     "gateset": gs_digest}
    out["result"] = {
        "csv": args.csv,
        "figure": args.figure,
        "rows": [{"n": r.n, "gates": r.gates, "dd_nodes": r.dd_nodes,
                  "peak_nodes": r.peak_nodes} for r in rows],
    }
    _emit(out, args.csv, args)
    return 0


def _add_common(parser: argparse.ArgumentParser, circuit_arg: bool = True) -> None:
    if circuit_arg:
        parser.add_argument("--circuit", required=True, help="circuit file path")
    parser.add_argument("--format", choices=["simple", "grcs"], default="simple")
    parser.add_argument("--gateset", default="z",
                        help="builtin name (z|t|g) or a config file path")
    parser.add_argument("--order", default="qubit",
                        help="qubit | gate | file:PATH with an explicit variable list")
    parser.add_argument("--sift", action="store_true",
                        help="run the reordering heuristic before the final build")
    parser.add_argument("--no-simplify", action="store_true",
                        help="skip polynomial-level simplification (for A/B runs)")
    parser.add_argument("--quiet", action="store_true",
                        help="emit only the result value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feyndd",
        description="Exact circuit analysis via modular-terminal decision diagrams")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("amplitude", help="single output amplitude")
    _add_common(p)
    p.add_argument("--bitstring", required=True,
                   help="output bits; leftmost character is qubit 0")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the dense statevector reference")
    p.set_defaults(func=_cmd_amplitude, seed=0)

    p = sub.add_parser("prob", help="joint measurement probability")
    _add_common(p)
    p.add_argument("--qubits", required=True, help="comma-separated qubit list")
    p.add_argument("--outcomes", required=True, help="bit per listed qubit")
    p.set_defaults(func=_cmd_prob, seed=0)

    p = sub.add_parser("sample", help="draw measurement outcomes")
    _add_common(p)
    p.add_argument("--shots", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figure", help="optional histogram image path")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("equiv", help="equivalence up to global phase")
    _add_common(p, circuit_arg=False)
    p.add_argument("--c0", required=True)
    p.add_argument("--c1", required=True)
    p.add_argument("--mutate", choices=["missing", "reverse"],
                   help="apply a local rewrite to c1 before comparing")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("gen", help="write a generated benchmark circuit")
    p.add_argument("--family", choices=["ghz", "bv", "linear"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_gen, order="qubit", sift=False, no_simplify=False)

    p = sub.add_parser("scaling", help="family sweep: CSV plus a rendered figure")
    p.add_argument("--family", choices=["ghz", "bv", "linear"], required=True)
    p.add_argument("--sizes", required=True, help="comma-separated qubit counts")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gateset", default="z")
    p.add_argument("--csv", required=True)
    p.add_argument("--figure", required=True)
    p.add_argument("--order", default="qubit")
    p.add_argument("--sift", action="store_true")
    p.add_argument("--no-simplify", action="store_true")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_scaling)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CircuitParseError, GateSetError, FileNotFoundError, NotADirectoryError,
            PermissionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, ArithmeticError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Batch command-line front end.

Subcommands::

    run    circuit-file        simulate a circuit, emit the state as JSON
    steer  --preset/--input    assemblage + CJWR + CHSH + LHS verdict as JSON
    sweep  --sweep v           visibility sweep as CSV (v,cjwr,chsh_opt,lhs_verdict)
    report --preset            scenario report (Born table + assemblage) as JSON

Exit codes: 0 success, 2 circuit parse error (diagnostic with line/column on
stderr), 3 physics error, 4 usage error. Output is deterministic: identical
arguments (and seed) produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import scenarios, steering
from .circuit import parse_circuit, run_circuit
from .core import BasisDecl, BasisKet, StateVector
from .errors import CircuitSyntaxError, PhysicsError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PHYSICS = 3
EXIT_USAGE = 4


class _Parser(argparse.ArgumentParser):
    """argparse maps its own failures to exit code 2; we reserve 2 for circuit
    diagnostics, so usage problems leave with 4 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class UsageError(Exception):
    pass


def _write(path: str | None, payload: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(payload)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(payload)


def _complex_pairs(matrix) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def state_to_json_dict(state: StateVector) -> dict:
    return {
        "sites": list(state.decl.sites),
        "oam": list(state.decl.oam),
        "basis": ["vac"] + [
            [k.site, k.pol, k.oam] for k in state.decl.kets[1:]
        ],
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amps],
        "norm": state.norm(),
    }


def state_from_json_dict(doc: dict) -> StateVector:
    decl = BasisDecl(tuple(doc["sites"]), tuple(doc["oam"]))
    amplitudes = {}
    for entry, (re, im) in zip(doc["basis"], doc["amplitudes"]):
        ket = BasisKet.vacuum() if entry == "vac" else BasisKet.photon(entry[0], entry[1], entry[2])
        amplitudes[ket] = complex(re, im)
    return StateVector.from_amplitudes(decl, amplitudes)


def cmd_run(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"cannot read {args.input!r}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        state = run_circuit(parse_circuit(text))
    except CircuitSyntaxError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PhysicsError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    if args.format == "csv":
        lines = ["ket,re,im"]
        for ket, amp in zip(state.decl.kets, state.amps):
            lines.append(f"{ket.label()},{float(amp.real)!r},{float(amp.imag)!r}")
        _write(args.out, "\n".join(lines) + "\n")
    else:
        _write(args.out, json.dumps(state_to_json_dict(state), indent=2) + "\n")
    return EXIT_OK


def _load_steer_input(args):
    if (args.preset is None) == (args.input is None):
        raise UsageError("give exactly one of --preset or --input")
    if args.preset is not None:
        prepared = scenarios.preset(args.preset)
        return scenarios.steering_frame(prepared, bob_site=args.bob_site)
    with open(args.input, "r", encoding="utf-8") as handle:
        state = state_from_json_dict(json.load(handle))
    if args.registers == "occ-occ":
        sites = state.decl.sites
        bob = args.bob_site or sites[-1]
        alice = next(s for s in sites if s != bob)
        return steering.occupation_qubits(state, alice, bob), f"occ-occ({alice},{bob})"
    bob = args.bob_site or (scenarios.BOB_SITE if scenarios.BOB_SITE in state.decl.sites
                            else state.decl.sites[-1])
    return steering.pol_path_qubits(state, bob), f"pol-path(bob={bob})"


def cmd_steer(args) -> int:
    settings = tuple(s.strip() for s in args.settings.split(",") if s.strip())
    if len(settings) < 2:
        print("need at least two settings, e.g. --settings Z,X", file=sys.stderr)
        return EXIT_USAGE
    try:
        rho, frame = _load_steer_input(args)
        assemblage = steering.compute_assemblage(rho, settings)
        verdict = steering.lhs_feasibility(assemblage, args.grid)
        cjwr = steering.cjwr_value(rho, settings[:3] if len(settings) > 3 else settings)
        chsh = steering.chsh_value(rho, 0.0, 90.0, 45.0, 135.0)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except CircuitSyntaxError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except PhysicsError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PHYSICS

    members = {
        f"{x}{'+' if a > 0 else '-'}": _complex_pairs(assemblage.members[(x, a)])
        for x in assemblage.settings
        for a in (+1, -1)
    }
    doc = {
        "frame": frame,
        "settings": list(assemblage.settings),
        "assemblage": members,
        "no_signaling_residual": assemblage.no_signaling_residual(),
        "cjwr": cjwr,
        "chsh": {
            "value": chsh.value,
            "angles_deg": list(chsh.angles),
            "correlators": list(chsh.correlators),
        },
        "lhs_verdict": verdict.status,
        "grid_n": verdict.grid_n,
        "lhs_residual": verdict.residual,
    }
    if verdict.certificate is not None:
        doc["certificate"] = [
            {"strategy": list(strategy), "bloch": list(bloch), "weight": weight}
            for strategy, bloch, weight in verdict.certificate
        ]
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.sweep != "v":
        print(f"only the visibility sweep 'v' is supported, got {args.sweep!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        lo_text, _, hi_text = args.range.partition("..")
        lo, hi = float(lo_text), float(hi_text)
    except ValueError:
        print(f"bad --range {args.range!r}, expected like 0..1", file=sys.stderr)
        return EXIT_USAGE
    if args.step <= 0 or not 0.0 <= lo <= hi <= 1.0:
        print(f"bad sweep: range [{lo}, {hi}] must sit inside [0, 1] with step > 0",
              file=sys.stderr)
        return EXIT_USAGE

    values = []
    v = lo
    while v <= hi + 1e-12:
        values.append(round(v, 12))
        v += args.step

    rows = []
    for v in values:
        rho = scenarios.noisy_state(v)
        cjwr = steering.cjwr_value(rho, ("Z", "X"))
        chsh = steering.chsh_optimize(rho, args.chsh_step)
        verdict = steering.lhs_feasibility(
            steering.compute_assemblage(rho, ("Z", "X")), args.grid
        )
        rows.append((v, cjwr, chsh.value, verdict.status))
    if args.format == "json":
        doc = [
            {"v": v, "cjwr": cjwr, "chsh_opt": chsh_opt, "lhs_verdict": status}
            for v, cjwr, chsh_opt, status in rows
        ]
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        lines = ["v,cjwr,chsh_opt,lhs_verdict"]
        lines += [f"{v!r},{cjwr!r},{chsh_opt!r},{status}" for v, cjwr, chsh_opt, status in rows]
        _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        report = scenarios.scenario_report(args.preset, site=args.site, basis=args.basis)
    except PhysicsError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PHYSICS
    _write(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photonsteer", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a circuit file")
    p_run.add_argument("input", help="circuit text file")
    p_run.add_argument("--format", choices=("json", "csv"), default="json")
    p_run.add_argument("--out", default=None, help="output path (default stdout)")

    p_steer = sub.add_parser("steer", help="steering / Bell analysis")
    p_steer.add_argument("--preset", default=None,
                         help="eq1 | twc | hardy[:q,r] | qplate_tripartite | noisy:v")
    p_steer.add_argument("--input", default=None, help="state JSON emitted by 'run'")
    p_steer.add_argument("--settings", default="Z,X", help="comma list from Z,X,Y")
    p_steer.add_argument("--grid", type=int, default=20, help="LHS Bloch grid parameter")
    p_steer.add_argument("--registers", choices=("pol-path", "occ-occ"), default="pol-path",
                         help="two-qubit frame for --input states")
    p_steer.add_argument("--bob-site", default=None, help="override Bob's site")
    p_steer.add_argument("--seed", type=int, default=0, help="reserved; analyses are exact")
    p_steer.add_argument("--out", default=None)

    p_sweep = sub.add_parser("sweep", help="visibility sweep of the noisy preset")
    p_sweep.add_argument("--sweep", default="v", help="sweep variable (only 'v')")
    p_sweep.add_argument("--range", default="0..1", help="like 0..1")
    p_sweep.add_argument("--step", type=float, default=0.1)
    p_sweep.add_argument("--grid", type=int, default=20)
    p_sweep.add_argument("--chsh-step", type=float, default=5.0,
                         help="grid step for the CHSH angle search")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--seed", type=int, default=0, help="reserved; sweep is exact")
    p_sweep.add_argument("--out", default=None)

    p_report = sub.add_parser("report", help="scenario report for a preset")
    p_report.add_argument("--preset", required=True)
    p_report.add_argument("--site", default=None, help="detector site (photon presets)")
    p_report.add_argument("--basis", default=None,
                          help="ZHV | Xdiag | Ycirc | OAMpm | occupation")
    p_report.add_argument("--out", default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "steer": cmd_steer, "sweep": cmd_sweep, "report": cmd_report}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

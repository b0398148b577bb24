"""Command-line front end: ``photonloss {verify,gate,orbit,nogo,fidelity,export}``.

Exit codes: 0 success, 1 the checked property fails, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import codes, linopt, logic, loss
from .fock import DEFAULT_TOL

S_GRID = (0.1, 0.7, 2.0)


class InputError(Exception):
    """Unresolvable or malformed user input (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    code_source: str | None = None
    unitary_sources: list[str] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    output: str | None = None
    format: str | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError(f"--tol must be positive, got {self.tol}")


# -- resolution of sources -------------------------------------------------------

def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def resolve_code(source: str | None, tol: float) -> codes.CodePair:
    if not source:
        raise InputError("--code is required")
    try:
        if source.startswith("builtin:"):
            return codes.builtin_code(source[len("builtin:"):], tol=tol)
        return codes.code_from_json(_load_json(source), tol=tol, name=Path(source).stem)
    except InputError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot load code {source!r}: {exc}") from exc


def resolve_unitary(source: str, modes: int, tol: float) -> linopt.ModeUnitary:
    try:
        if source.startswith("builtin:"):
            gamma = linopt.builtin_unitary(source[len("builtin:"):], modes=modes)
        else:
            gamma = linopt.unitary_from_json(_load_json(source), tol=max(tol, 1e-10))
            gamma = linopt.ModeUnitary(gamma.mat, tol=gamma.tol, name=Path(source).stem)
    except InputError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot load unitary {source!r}: {exc}") from exc
    if gamma.dim != modes:
        raise InputError(f"unitary {source!r} acts on {gamma.dim} modes, code has {modes}")
    return gamma


def parse_gammas(text: str) -> list[float]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        gammas = [float(t) for t in items]
    except ValueError as exc:
        raise InputError(f"cannot parse --gammas: {exc}") from exc
    for g in gammas:
        if not 0.0 < g < 1.0:
            raise InputError(f"gamma {g} outside (0, 1)")
    return gammas


# -- output ------------------------------------------------------------------------

def _fmt12(x: float) -> str:
    if abs(x) < 1e-14:
        x = 0.0
    return f"{x + 0.0:.12g}"


def _matrix_json(m: np.ndarray) -> dict:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    # float repr is the shortest string that round-trips (at most 17 significant digits)
    return json.dumps(obj, indent=2) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- commands ----------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> tuple[int, codes.VerificationReport]:
    code = resolve_code(cfg.code_source, cfg.tol)
    report = codes.verify_code(code, tol=cfg.tol)
    payload = {"command": "verify", "code": cfg.code_source, **report.to_json()}
    _emit(_dump_json(payload), cfg.output)
    return (0 if report.correctable else 1), report


def cmd_gate(cfg: RunConfig) -> tuple[int, logic.LogicalGate]:
    code = resolve_code(cfg.code_source, cfg.tol)
    if len(cfg.unitary_sources) != 1:
        raise InputError("gate needs exactly one --unitary")
    gamma = resolve_unitary(cfg.unitary_sources[0], code.modes, cfg.tol)
    gate = logic.extract_gate(code, gamma)
    payload = {
        "command": "gate",
        "code": cfg.code_source,
        "unitary": cfg.unitary_sources[0],
        "leakage": gate.leakage,
        "preserves_code": gate.leakage < cfg.tol,
        "gate": _matrix_json(gate.u),
    }
    if gate.leakage < cfg.tol:
        image = gate.u[:, 1] / np.linalg.norm(gate.u[:, 1])
        p = logic.bloch(image[0], image[1], tol=1e-8)
        payload["bloch_of_H"] = [p.x, p.y, p.z]
    else:
        payload["bloch_of_H"] = None
    _emit(_dump_json(payload), cfg.output)
    return 0, gate


def cmd_orbit(
    cfg: RunConfig,
    max_elems: int = logic.DEFAULT_MAX_ELEMS,
    require_saturation: bool = False,
) -> tuple[int, logic.GroupClosure | None]:
    code = resolve_code(cfg.code_source, cfg.tol)
    if not cfg.unitary_sources:
        raise InputError("orbit needs at least one generator")
    gens = [resolve_unitary(s, code.modes, cfg.tol) for s in cfg.unitary_sources]
    try:
        closure = logic.group_closure(code, gens, max_elems=max_elems, tol=cfg.tol)
    except logic.LeakyGeneratorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, None
    if (cfg.format or "csv") == "json":
        _emit(_dump_json({"command": "orbit", "code": cfg.code_source, **closure.to_json()}), cfg.output)
    else:
        rows = [
            [_fmt12(p.x), _fmt12(p.y), _fmt12(p.z), closure.word_names(w)]
            for p, w in zip(closure.orbit, closure.orbit_words)
        ]
        _emit(_csv_text(["x", "y", "z", "word"], rows), cfg.output)
    print(
        f"group order {closure.order} (mod phase), orbit size {len(closure.orbit)}, "
        f"saturated {str(closure.saturated).lower()}",
        file=sys.stderr,
    )
    if require_saturation and not closure.saturated:
        return 1, closure
    return 0, closure


def _structured_generators(modes: int) -> dict[str, linopt.HermitianGenerator]:
    imbalance = np.zeros(modes)
    imbalance[0], imbalance[1 % modes] = 1.0, -1.0
    out = {"identity": linopt.HermitianGenerator(np.eye(modes))}
    if modes > 1:
        out["imbalance01"] = linopt.HermitianGenerator(np.diag(imbalance))
    return out


def _classify(code, lam, tol):
    rec = logic.obstruction_check(code, lam)
    entry = {
        "lambda": rec.lambda_scalar,
        "projection_residual": rec.projection_residual,
        "first_order_leakage": rec.first_order_leakage,
    }
    if rec.first_order_leakage >= tol:
        entry["kind"] = "leaky"
    elif logic.phase_theorem_check(code, lam, S_GRID, tol=tol):
        entry["kind"] = "phase-only"
    else:
        entry["kind"] = "violation"
    return rec, entry


def cmd_nogo(cfg: RunConfig, samples: int = 100) -> tuple[int, dict]:
    code = resolve_code(cfg.code_source, cfg.tol)
    try:
        codes.require_g(code)
    except codes.NotCorrectableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, {}
    if samples < 0:
        raise InputError("--samples must be non-negative")
    rng = np.random.default_rng(cfg.seed)
    tally = {"leaky": 0, "phase-only": 0, "violation": 0}
    max_residual = None
    for _ in range(samples):
        lam = linopt.random_hermitian(code.modes, rng)
        rec, entry = _classify(code, lam, cfg.tol)
        tally[entry["kind"]] += 1
        max_residual = rec.projection_residual if max_residual is None else max(max_residual, rec.projection_residual)
    structured = {}
    for name, lam in _structured_generators(code.modes).items():
        _, structured[name] = _classify(code, lam, cfg.tol)
    report = {
        "command": "nogo",
        "code": cfg.code_source,
        "seed": cfg.seed,
        "samples": samples,
        "tol": cfg.tol,
        "max_projection_residual": max_residual,
        "leaky": tally["leaky"],
        "phase_only": tally["phase-only"],
        "violations": tally["violation"],
        "structured": structured,
    }
    _emit(_dump_json(report), cfg.output)
    ok = tally["violation"] == 0 and (max_residual is None or max_residual < cfg.tol)
    return (0 if ok else 1), report


def cmd_fidelity(
    cfg: RunConfig,
    gammas: Sequence[float],
    corrected: bool = True,
    uncorrected: bool = False,
    worst_case: bool = False,
    kraus: bool = False,
) -> tuple[int, list[loss.FidelityCurve]]:
    code = resolve_code(cfg.code_source, cfg.tol)
    flags = [flag for flag, on in ((True, corrected), (False, uncorrected)) if on] or [True]
    try:
        curves = [loss.fidelity_curve(code, gammas, f, worst_case=worst_case) for f in flags]
    except codes.NotCorrectableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, []
    if (cfg.format or "csv") == "json":
        payload = {"command": "fidelity", "code": cfg.code_source, "curves": []}
        for curve in curves:
            entry = {
                "corrected": curve.corrected,
                "gamma": [g for g, _ in curve.points],
                "one_minus_F": [f for _, f in curve.points],
                "leakage_weight": curve.leakage,
            }
            if curve.worst_case is not None:
                entry["worst_one_minus_F"] = curve.worst_case
            if kraus:
                entry["kraus"] = [
                    [_matrix_json(m) for m in loss.logical_channel(code, g, curve.corrected).kraus]
                    for g in gammas
                ]
            payload["curves"].append(entry)
        _emit(_dump_json(payload), cfg.output)
        return 0, curves
    header = ["gamma", "one_minus_F", "leakage_weight"]
    if worst_case:
        header.append("worst_one_minus_F")
    if len(curves) > 1:
        header.append("corrected")
    rows = []
    for curve in curves:
        for i, (g, f) in enumerate(curve.points):
            row = [_fmt12(g), _fmt12(f), _fmt12(curve.leakage[i])]
            if worst_case:
                row.append(_fmt12(curve.worst_case[i]))
            if len(curves) > 1:
                row.append(str(curve.corrected).lower())
            rows.append(row)
    _emit(_csv_text(header, rows), cfg.output)
    return 0, curves


def cmd_export(cfg: RunConfig) -> tuple[int, dict]:
    code = resolve_code(cfg.code_source, cfg.tol)
    payload = codes.code_to_json(code)
    _emit(_dump_json(payload), cfg.output)
    return 0, payload


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--code", help="builtin:fourphoton, builtin:threephoton or a code JSON file")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"])

    parser = argparse.ArgumentParser(
        prog="photonloss",
        description="Photon-loss codes under passive linear optics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", parents=[common], help="check one-photon-loss correctability")

    p = sub.add_parser("gate", parents=[common], help="logical gate induced by a network")
    p.add_argument("--unitary", action="append", default=[], help="builtin:NAME or unitary JSON file")

    p = sub.add_parser("orbit", parents=[common], help="gate group closure and Bloch orbit of |H>")
    p.add_argument("--generators", nargs="+", default=[], help="builtin:NAME or unitary JSON files")
    p.add_argument("--unitary", action="append", default=[], help="additional generator")
    p.add_argument("--max-elems", type=int, default=logic.DEFAULT_MAX_ELEMS)
    p.add_argument("--require-saturation", action="store_true")

    p = sub.add_parser("nogo", parents=[common], help="sample generators and check the phase theorem")
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("fidelity", parents=[common], help="entanglement fidelity under photon loss")
    p.add_argument("--gammas", default="1e-3,1e-2", help="comma-separated loss probabilities")
    p.add_argument("--corrected", action="store_true")
    p.add_argument("--uncorrected", action="store_true")
    p.add_argument("--worst-case", action="store_true",
                   help="also report worst pure-state infidelity over a 200-point Bloch mesh")
    p.add_argument("--kraus", action="store_true", help="include logical Kraus sets (JSON only)")

    sub.add_parser("export", parents=[common], help="write a code as JSON")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            code_source=args.code,
            unitary_sources=list(getattr(args, "generators", [])) + list(getattr(args, "unitary", [])),
            tol=args.tol,
            output=args.out,
            format=args.format,
            seed=args.seed,
        )
        if args.command == "verify":
            code, _ = cmd_verify(cfg)
        elif args.command == "gate":
            code, _ = cmd_gate(cfg)
        elif args.command == "orbit":
            code, _ = cmd_orbit(cfg, args.max_elems, args.require_saturation)
        elif args.command == "nogo":
            code, _ = cmd_nogo(cfg, args.samples)
        elif args.command == "fidelity":
            code, _ = cmd_fidelity(
                cfg,
                parse_gammas(args.gammas),
                corrected=args.corrected,
                uncorrected=args.uncorrected,
                worst_case=args.worst_case,
                kraus=args.kraus,
            )
        else:
            code, _ = cmd_export(cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())

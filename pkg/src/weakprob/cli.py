"""Command-line interface.

Every command writes a JSON result envelope (or CSV for matrix and vector
payloads) to stdout.  Failures write one JSON object ``{"error": kind,
"message": ...}`` to stderr and exit with

    2  input error (parse/validation, bad flags)
    3  dimension mismatch
    4  domain error (overlap, undefined kernel cells, post-selection, zero weak value)

``scenario`` and ``predict --selftest`` exit 1 when a check fails.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__, kdq, scenarios
from .config import DEFAULT
from .errors import DimensionMismatch, DomainError, InputError, WeakProbError, ZeroWeakValue
from .formats import (
    SCHEMA_VERSION,
    c2j,
    cmat,
    cvec,
    dumps,
    file_digest,
    load_basis,
    load_density,
    load_kd,
    load_pure_state,
    real_list,
)
from .linalg import RNG_ALGORITHM, born_probabilities, haar_random_basis, random_density
from .weaksim import MeterConfig, estimate_kd

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_DIMENSION = 3
EXIT_DOMAIN = 4


class UsageError(InputError):
    kind = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class CommandResult:
    def __init__(self, payload, inputs=None, warnings=(), seed=None, exit_code=EXIT_OK, table=None):
        self.payload = payload
        self.inputs = inputs or {}
        self.warnings = list(warnings)
        self.seed = seed
        self.exit_code = exit_code
        self.table = table  # (header, rows) for CSV output


def _inputs(**paths):
    return {role: {"path": str(p), "sha256": file_digest(p)} for role, p in paths.items()}


def _tolerances(args):
    tol = DEFAULT
    if args.tolerance_overlap is not None:
        if not args.tolerance_overlap > 0:
            raise UsageError("--tolerance-overlap must be positive")
        tol = tol.replace(overlap_floor=args.tolerance_overlap)
    return tol


def _fmt(x):
    return repr(float(x) + 0.0)


def cmd_kd(args, tol):
    rho = load_density(args.state)
    A = load_basis(args.basis_a)
    B = load_basis(args.basis_b)
    kd = kdq.kd_distribution(rho, A, B)
    pa, pb = kdq.marginals(kd, tol)
    payload = {
        "basis_a": kd.basis_a_id,
        "basis_b": kd.basis_b_id,
        "labels_a": list(kd.labels_a),
        "labels_b": list(kd.labels_b),
        "kd": cmat(kd.values),
        "marginal_a": real_list(pa),
        "marginal_b": real_list(pb),
        "normalization": c2j(kd.total),
        "normalization_error": abs(kd.total - 1.0),
    }
    rows = [
        [la, lb, _fmt(kd.values[j, k].real), _fmt(kd.values[j, k].imag)]
        for j, la in enumerate(kd.labels_a)
        for k, lb in enumerate(kd.labels_b)
    ]
    return CommandResult(
        payload,
        _inputs(state=args.state, basis_a=args.basis_a, basis_b=args.basis_b),
        table=(["a_label", "b_label", "re", "im"], rows),
    )


def cmd_reconstruct(args, tol):
    kd = load_kd(args.kd)
    A = load_basis(args.basis_a)
    B = load_basis(args.basis_b)
    if kd.dim != A.dim or kd.dim != B.dim:
        raise DimensionMismatch(f"KD dim {kd.dim}, basis dims {A.dim}, {B.dim}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rho = kdq.reconstruct_density(kd, A, B, tol)
    notes = [str(w.message) for w in caught]
    notes.append(f"hermiticity deviation before symmetrization: {rho.hermiticity_deviation:.3e}")
    min_overlap = float(np.min(np.abs(kdq.overlap_matrix(A, B))))
    payload = {
        "basis_a": A.name,
        "basis_b": B.name,
        "rho": cmat(rho.matrix),
        "hermiticity_deviation": rho.hermiticity_deviation,
        "min_overlap": min_overlap,
    }
    d = rho.dim
    rows = [[str(i), str(j), _fmt(rho.matrix[i, j].real), _fmt(rho.matrix[i, j].imag)]
            for i in range(d) for j in range(d)]
    return CommandResult(
        payload,
        _inputs(kd=args.kd, basis_a=args.basis_a, basis_b=args.basis_b),
        warnings=notes,
        table=(["row", "col", "re", "im"], rows),
    )


def _predict_selftest(seed, tol, instances=20):
    worst = 0.0
    for n in range(instances):
        d = 2 + n % 3
        base = seed * 1000 + 4 * n
        rho = random_density(d, 1 + n % d, base)
        A, B, M = (haar_random_basis(d, base + i) for i in (1, 2, 3))
        kd = kdq.kd_distribution(rho, A, B)
        p = kdq.predict_probabilities(kd, kdq.conditional_kernel(A, B, M, tol), tol)
        worst = max(worst, float(np.max(np.abs(p - born_probabilities(rho, M)))))
    return worst


def cmd_predict(args, tol):
    if args.selftest:
        seed = 0 if args.seed is None else args.seed
        worst = _predict_selftest(seed, tol)
        passed = worst < tol.prediction
        payload = {"selftest": True, "instances": 20, "max_deviation": worst, "passed": passed}
        return CommandResult(payload, seed=seed, exit_code=EXIT_OK if passed else EXIT_CHECK_FAILED)
    missing = [n for n in ("state", "basis_a", "basis_b", "basis_m") if getattr(args, n) is None]
    if missing:
        raise UsageError(f"predict: missing arguments {missing} (or use --selftest)")
    rho = load_density(args.state)
    A, B, M = (load_basis(p) for p in (args.basis_a, args.basis_b, args.basis_m))
    kd = kdq.kd_distribution(rho, A, B)
    kernel = kdq.conditional_kernel(A, B, M, tol)
    p = kdq.predict_probabilities(kd, kernel, tol)
    born = born_probabilities(rho, M)
    payload = {
        "basis_m": M.name,
        "labels_m": list(M.labels),
        "predicted": real_list(p),
        "born": real_list(born),
        "max_deviation": float(np.max(np.abs(p - born))),
    }
    rows = [[lab, _fmt(p[i]), _fmt(born[i])] for i, lab in enumerate(M.labels)]
    return CommandResult(
        payload,
        _inputs(state=args.state, basis_a=args.basis_a, basis_b=args.basis_b, basis_m=args.basis_m),
        table=(["m_label", "predicted", "born"], rows),
    )


def cmd_weakvalue(args, tol):
    a, b, m = (load_pure_state(p) for p in (args.a, args.b, args.m))
    inputs = _inputs(a=args.a, b=args.b, m=args.m)
    w = kdq.conditional_weak_value(a, b, m, tol)
    payload = {"weak_value": c2j(w), "magnitude": abs(w), "hbar": args.hbar, "action": None, "phase": None}
    try:
        s = kdq.action_phase(a, b, m, args.hbar, tol)
    except ZeroWeakValue as exc:
        return CommandResult(payload, inputs, warnings=[str(exc)], exit_code=EXIT_DOMAIN)
    payload["action"] = s.value
    payload["phase"] = s.phase
    return CommandResult(payload, inputs)


def cmd_simulate(args, tol):
    seed = 0 if args.seed is None else args.seed
    cfg = MeterConfig(coupling=args.coupling, mode=args.mode, shots=args.shots, seed=seed)
    rho = load_density(args.state)
    A = load_basis(args.basis_a)
    B = load_basis(args.basis_b)
    est = estimate_kd(rho, A, B, cfg, tol)
    exact = kdq.kd_distribution(rho, A, B)
    dev = np.abs(est.values - exact.values)
    notes = []
    estimate, deviation = cmat(est.values), dev.tolist()
    for j, k in np.argwhere(est.null_cells):
        estimate[j][k] = None
        deviation[j][k] = None
        notes.append(f"PostselectionImpossible: cell ({A.labels[j]}, {B.labels[k]}) reported null")
    live = dev[~est.null_cells]
    payload = {
        "basis_a": A.name,
        "basis_b": B.name,
        "coupling": cfg.coupling,
        "mode": cfg.mode,
        "shots": cfg.shots if cfg.mode == "sampled" else None,
        "estimate": estimate,
        "std_errors_re": est.std_errors_re.tolist(),
        "std_errors_im": est.std_errors_im.tolist(),
        "postselect_probabilities": real_list(est.postselect_probabilities),
        "exact": cmat(exact.values),
        "deviation": deviation,
        "max_deviation": float(live.max()) if live.size else 0.0,
    }
    rows = []
    for j, la in enumerate(A.labels):
        for k, lb in enumerate(B.labels):
            z = est.values[j, k]
            null = bool(est.null_cells[j, k])
            rows.append([la, lb, "" if null else _fmt(z.real), "" if null else _fmt(z.imag),
                         _fmt(est.std_errors_re[j, k]), _fmt(est.std_errors_im[j, k]),
                         _fmt(exact.values[j, k].real), _fmt(exact.values[j, k].imag)])
    return CommandResult(
        payload,
        _inputs(state=args.state, basis_a=args.basis_a, basis_b=args.basis_b),
        warnings=notes,
        seed=seed,
        table=(["a_label", "b_label", "re", "im", "std_re", "std_im", "exact_re", "exact_im"], rows),
    )


def cmd_scenario(args, tol):
    if args.name not in scenarios.SCENARIOS:
        raise UsageError(f"unknown scenario {args.name!r}; available: {', '.join(scenarios.SCENARIOS)}")
    sc = scenarios.get(args.name)
    report = scenarios.verify(sc, coupling=args.coupling)
    entries = []
    for e, phase in zip(report.entries, sc.expected_phases):
        entries.append({
            "label": e.label,
            "expected": c2j(e.expected),
            "formula": c2j(e.formula),
            "formula_deviation": e.formula_deviation if math.isfinite(e.formula_deviation) else None,
            "simulated": c2j(e.simulated),
            "simulation_deviation": e.simulation_deviation if math.isfinite(e.simulation_deviation) else None,
            "passed": e.passed,
            "action": None if phase is None else args.hbar * phase,
        })
    payload = {
        "name": sc.name,
        "coupling": report.coupling,
        "hbar": args.hbar,
        "expected_weak_values": cvec(sc.expected_weak_values),
        "expected_sum": c2j(report.expected_sum),
        "entries": entries,
        "passed": report.passed,
        "provenance": sc.provenance_note,
    }
    return CommandResult(payload, exit_code=EXIT_OK if report.passed else EXIT_CHECK_FAILED)


COMMANDS = {
    "kd": cmd_kd,
    "reconstruct": cmd_reconstruct,
    "predict": cmd_predict,
    "weakvalue": cmd_weakvalue,
    "simulate": cmd_simulate,
    "scenario": cmd_scenario,
}


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--hbar", type=_positive_float, default=1.0)
    common.add_argument("--seed", type=_seed, default=None)
    common.add_argument("--tolerance-overlap", type=float, default=None)
    common.add_argument("--out", choices=("json", "csv"), default="json")
    common.add_argument("--selftest", action="store_true")

    parser = _Parser(prog="weakprob", description="Kirkwood-Dirac quasiprobabilities and weak values.")
    parser.add_argument("--version", action="version", version=f"weakprob {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("kd", parents=[common], help="KD distribution of a state over two bases")
    p.add_argument("state")
    p.add_argument("basis_a")
    p.add_argument("basis_b")

    p = sub.add_parser("reconstruct", parents=[common], help="density operator from a KD distribution")
    p.add_argument("kd")
    p.add_argument("basis_a")
    p.add_argument("basis_b")

    p = sub.add_parser("predict", parents=[common], help="complex Bayes rule prediction for a basis M")
    for name in ("state", "basis_a", "basis_b", "basis_m"):
        p.add_argument(name, nargs="?")

    p = sub.add_parser("weakvalue", parents=[common], help="p(m|a,b) and its action phase")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("m")

    p = sub.add_parser("simulate", parents=[common], help="weak-measurement estimate of the KD distribution")
    p.add_argument("state")
    p.add_argument("basis_a")
    p.add_argument("basis_b")
    p.add_argument("--coupling", type=float, default=0.01)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--shots", type=int, default=100_000)

    p = sub.add_parser("scenario", parents=[common], help="verify a built-in paradox scenario")
    p.add_argument("name")
    p.add_argument("--coupling", type=float, default=0.01)
    return parser


def exit_code_for(exc):
    if isinstance(exc, DimensionMismatch):
        return EXIT_DIMENSION
    if isinstance(exc, DomainError):
        return EXIT_DOMAIN
    return EXIT_INPUT


def envelope(argv, args, tol, result):
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": list(argv),
        "inputs": result.inputs,
        "seed": result.seed,
        "rng": RNG_ALGORITHM if result.seed is not None else None,
        "tolerances": tol.as_dict(),
        "payload": result.payload,
        "warnings": result.warnings,
    }


def render_csv(table):
    header, rows = table
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _report_error(stderr, exc):
    stderr.write(json.dumps({"error": getattr(exc, "kind", type(exc).__name__), "message": str(exc)}) + "\n")


def main(argv=None, stdout=None, stderr=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.selftest and args.command != "predict":
            raise UsageError("--selftest is only supported by 'predict'")
        tol = _tolerances(args)
        result = COMMANDS[args.command](args, tol)
        if args.out == "csv":
            if result.table is None:
                raise UsageError(f"--out csv is not available for '{args.command}' (JSON only)")
            text = render_csv(result.table)
        else:
            text = dumps(envelope(argv, args, tol, result))
    except WeakProbError as exc:
        _report_error(stderr, exc)
        return exit_code_for(exc)
    stdout.write(text)
    for note in result.warnings:
        stderr.write(json.dumps({"warning": note}) + "\n")
    if result.exit_code == EXIT_DOMAIN:
        stderr.write(json.dumps({"error": "ZeroWeakValue", "message": result.warnings[-1]}) + "\n")
    return result.exit_code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()

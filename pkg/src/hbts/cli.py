"""Command-line front end: validation, thermo solves, spectra, correlators, ED reports.

Every command is a thin wrapper over the library; outputs are deterministic
given the inputs (sorted keys, 17-significant-digit floats, atomic writes).
Exit codes: 0 success, 1 validation failure, 2 resource/argument error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

import numpy as np

from . import channels, correlators, finite_state, mera_bounds, parent_ham, thermo
from . import tensor_core as tc
from . import reporting
from .errors import DegenerateFixedPointError, ResourceLimitError, ValidationError

OBSERVABLES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "p0": np.array([[1, 0], [0, 0]], dtype=complex),
    "p1": np.array([[0, 0], [0, 1]], dtype=complex),
}


def paper_lambda_path() -> str:
    """Filesystem path of the bundled example isometry."""
    return str(resources.files("hbts").joinpath("data/paper_lambda.json"))


def _load_isometry(spec: str, d: int | None = None) -> tc.Isometry:
    if spec == "paper":
        return tc.load_isometry(paper_lambda_path())
    if spec == "product":
        return tc.product_isometry(d or 2)
    return tc.load_isometry(spec)


def _load_top(spec: str, d: int) -> tc.TopTensor:
    if spec == "diag":
        return tc.TopTensor(d, np.eye(d, dtype=complex) / np.sqrt(d))
    if spec == "corner":
        c = np.zeros((d, d), dtype=complex)
        c[0, 0] = 1.0
        return tc.TopTensor(d, c)
    return tc.load_top(spec)


def _load_observable(spec: str, d: int) -> tc.Observable:
    if spec in OBSERVABLES:
        if d != 2:
            raise ValueError("named observable %r is defined for d=2 only" % spec)
        return tc.Observable(2, OBSERVABLES[spec])
    return tc.load_observable(spec)


def _emit(args, report: dict, summary: str) -> None:
    if getattr(args, "output", None):
        reporting.write_report(args.output, report)
        print(summary)
    else:
        print(reporting.dumps(report))


def _re_im(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def cmd_validate(args) -> int:
    report = {}
    ok = True
    if args.isometry:
        lam = _load_isometry(args.isometry, args.d)
        rep = tc.validate_isometry(lam, args.tol)
        report["isometry"] = {"passed": rep.passed, "residual": rep.residual, "tol": rep.tol}
        ok = ok and rep.passed
    if args.top:
        d = args.d or (report and _load_isometry(args.isometry, args.d).d) or 2
        top = _load_top(args.top, d)
        rep = tc.validate_top(top, args.tol)
        report["top"] = {"passed": rep.passed, "residual": rep.residual, "tol": rep.tol}
        ok = ok and rep.passed
    if not report:
        raise ValueError("nothing to validate: pass --isometry and/or --top")
    _emit(args, report, "validate: %s" % ("pass" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_random_isometry(args) -> int:
    lam = tc.random_isometry(args.d, args.seed)
    tc.save_isometry(lam, args.output)
    residual = tc.validate_isometry(lam).residual
    print("wrote %s (d=%d, seed=%d, residual=%s)" % (args.output, args.d, args.seed, reporting.format_float(residual)))
    return 0


def cmd_thermo(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    report = thermo.thermo_report(lam, args.nu)
    _emit(args, report, "thermo nu=%d: rank %d, mixing %s" % (args.nu, report["rank"], report["mixing"]))
    return 0


def cmd_exponents(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    spec = correlators.exponent_spectrum(lam)
    entries = []
    for e in spec.entries:
        entry = {
            "kappa": _re_im(e.kappa),
            "modulus": float(abs(e.kappa)),
            "exponent": None if e.exponent is None else _re_im(e.exponent),
            "algebraic": e.algebraic,
            "geometric": e.geometric,
        }
        entries.append(entry)
    report = {"d": spec.d, "diagonalizable": spec.diagonalizable, "entries": entries}
    _emit(args, report, "exponents: %d distinct eigenvalues" % len(entries))
    return 0


def cmd_correlate(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    theta = _load_observable(args.theta, lam.d)
    theta_prime = _load_observable(args.theta_prime, lam.d)
    rows = []
    diff = correlators.pair_difference_infinity(lam)
    pair = channels.pair_descend_channel(lam)
    block = np.kron(theta.matrix, theta_prime.matrix)
    current = diff
    for m in range(args.m_max + 1):
        if m > 0:
            current = channels.unvec(pair.matrix @ channels.vec(current), pair.dim_out)
        value = complex(np.trace(block @ current))
        rows.append((2 ** m, float(value.real), float(value.imag)))
    header = ["delta_alpha", "re", "im"]
    if args.output:
        reporting.write_csv(args.output, header, rows)
        print("correlate: wrote %d rows" % len(rows))
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(reporting.csv_cell(v) for v in row))
    return 0


def cmd_finite_check(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    top = _load_top(args.top, lam.d)
    rep = finite_state.recursion_check(lam, top, args.n_max, max_amplitudes=args.max_amplitudes)
    report = {
        "n_max": rep.n_max,
        "single_site": rep.single_site,
        "pair": rep.pair,
        "triple": rep.triple,
        "quad": rep.quad,
        "max_residual": rep.max_residual,
        "tol": args.tol,
        "passed": rep.max_residual <= args.tol,
    }
    _emit(args, report, "finite-check: max residual %s" % reporting.format_float(rep.max_residual))
    return 0 if report["passed"] else 1


def _parse_weights(text: str | None):
    if not text:
        return None
    return [float(x) for x in text.split(",") if x.strip()]


def _interaction(args, lam):
    nu = args.nu if args.nu != "auto" else "auto"
    if nu != "auto":
        nu = int(nu)
    return parent_ham.build_interaction(lam, weights=_parse_weights(args.weights), nu=nu)


def cmd_parent(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    hs = _interaction(args, lam)
    flat = []
    for z in hs.h_term.reshape(-1):
        flat.extend([float(z.real), float(z.imag)])
    report = {
        "d": hs.d,
        "nu": hs.nu,
        "kernel_dim": hs.kernel_dim,
        "weights": [float(w) for w in hs.weights],
        "h_term": flat,
    }
    _emit(args, report, "parent: nu=%d, kernel dimension %d" % (hs.nu, hs.kernel_dim))
    return 0


def cmd_diag(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    hs = _interaction(args, lam)
    ham = parent_ham.assemble(hs, args.N, max_dim=args.max_dim)
    rep = parent_ham.diagonalize(ham, tau_gs=args.tau_gs, bins=args.bins)
    report = {
        "N": args.N,
        "nu": hs.nu,
        "kernel_dim": hs.kernel_dim,
        "ground_energy": rep.ground_energy,
        "degeneracy": rep.degeneracy,
        "tau_gs": rep.tau_gs,
        "spectrum": [float(x) for x in rep.spectrum],
        "histogram": [[left, right, count] for left, right, count in rep.histogram],
    }
    if args.eigenvalues_csv:
        reporting.write_csv(args.eigenvalues_csv, ["index", "energy"], list(enumerate(float(x) for x in rep.spectrum)))
    if args.histogram_csv:
        reporting.write_csv(args.histogram_csv, ["bin_left", "bin_right", "count"], list(rep.histogram))
    _emit(args, report, "diag N=%d: ground %s, degeneracy %d of %d" % (
        args.N, reporting.format_float(rep.ground_energy), rep.degeneracy, len(rep.spectrum)))
    return 0


def cmd_subspace_check(args) -> int:
    lam = _load_isometry(args.isometry, args.d)
    hs = _interaction(args, lam)
    rep = parent_ham.grown_subspace_check(lam, hs, args.N, tau_gs=args.tau_gs, max_dim=args.max_dim)
    report = {
        "N": rep.N,
        "nu": hs.nu,
        "dim_grown": rep.dim_grown,
        "dim_translated": rep.dim_translated,
        "dim_union": rep.dim_union,
        "max_h_residual": rep.max_h_residual,
        "max_local_energy": rep.max_local_energy,
        "unfrustrated": rep.unfrustrated,
    }
    _emit(args, report, "subspace-check N=%d: union dimension %d, unfrustrated %s" % (
        rep.N, rep.dim_union, rep.unfrustrated))
    return 0


def cmd_mera_bounds(args) -> int:
    bound = mera_bounds.mera_rank_bound(args.topology, args.d)
    report = {
        "topology": bound.topology,
        "d": bound.d,
        "nu": bound.nu,
        "bound": bound.bound,
        "max": bound.full_dim,
        "nonmaximal": bound.nonmaximal,
    }
    _emit(args, report, "mera-bounds: nu=%d, bound %d of %d" % (bound.nu, bound.bound, bound.full_dim))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbts",
        description="Homogeneous binary-tree state toolkit: channels, exponents, parent Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, isometry=True):
        if isometry:
            p.add_argument("--isometry", required=True,
                           help="isometry JSON file, or 'paper' / 'product'")
        p.add_argument("--d", type=int, default=None, help="local dimension for named inputs")
        p.add_argument("-o", "--output", default=None, help="write the report to this file")

    p = sub.add_parser("validate", help="check isometry/top-tensor invariants")
    p.add_argument("--isometry", default=None, help="isometry JSON file, or 'paper' / 'product'")
    p.add_argument("--top", default=None, help="top-tensor JSON file, or 'diag' / 'corner'")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--tol", type=float, default=tc.TAU_ISO)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("random-isometry", help="write a seeded random isometry file")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_random_isometry)

    p = sub.add_parser("thermo", help="infinite-depth reduced state report")
    add_common(p)
    p.add_argument("--nu", type=int, choices=(1, 2, 3, 4), default=2)
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("exponents", help="critical-exponent spectrum of the pair-descend adjoint")
    add_common(p)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("correlate", help="thermodynamic correlators at distances 2^m (CSV)")
    add_common(p)
    p.add_argument("--theta", required=True, help="x|y|z|p0|p1 or observable JSON file")
    p.add_argument("--theta-prime", required=True, help="x|y|z|p0|p1 or observable JSON file")
    p.add_argument("--m-max", type=int, default=10)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("finite-check", help="verify level recursions against brute force")
    add_common(p)
    p.add_argument("--top", required=True, help="top-tensor JSON file, or 'diag' / 'corner'")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-amplitudes", type=int, default=finite_state.DEFAULT_MAX_AMPLITUDES)
    p.set_defaults(func=cmd_finite_check)

    p = sub.add_parser("parent", help="build the kernel-projector interaction")
    add_common(p)
    p.add_argument("--nu", default="auto", help="interaction window: 2, 3, 4 or auto")
    p.add_argument("--weights", default=None, help="comma-separated positive kernel weights")
    p.set_defaults(func=cmd_parent)

    p = sub.add_parser("diag", help="assemble on N sites and diagonalize")
    add_common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--nu", default="auto")
    p.add_argument("--weights", default=None)
    p.add_argument("--tau-gs", type=float, default=parent_ham.TAU_GS)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--max-dim", type=int, default=parent_ham.DEFAULT_MAX_DIM)
    p.add_argument("--eigenvalues-csv", default=None)
    p.add_argument("--histogram-csv", default=None)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("subspace-check", help="verify the grown ground subspace and its translate")
    add_common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--nu", default="auto")
    p.add_argument("--weights", default=None)
    p.add_argument("--tau-gs", type=float, default=parent_ham.TAU_GS)
    p.add_argument("--max-dim", type=int, default=parent_ham.DEFAULT_MAX_DIM)
    p.set_defaults(func=cmd_subspace_check)

    p = sub.add_parser("mera-bounds", help="kernel-rank bounds for renormalization topologies")
    p.add_argument("--topology", required=True, choices=("binary", "ternary"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_mera_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DegenerateFixedPointError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (ValueError, ResourceLimitError, OSError, KeyError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``ruelle-torsion <command> --spec FILE ...``.

Exit status is 0 on success, 1 when a numerical or combinatorial check
fails, and 2 on input errors (bad spec, bad literal, out-of-domain argument).
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from dataclasses import replace
from fractions import Fraction

from . import flow_model as fm
from . import fuller_trace, spectrum, torsion_lab, zeta_engine
from .report import ComplexLiteralError, emit_report, parse_complex
from .specfun import PrecisionPolicy, SpecialFunctionError

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Result:
    """Rows to print plus the exit status they imply."""

    def __init__(self, rows, columns, status=EXIT_OK, text=None):
        self.rows = rows
        self.columns = columns
        self.status = status
        self.text = text


# ---------------------------------------------------------------------------
# argument helpers


def _rational(text: str) -> Fraction:
    try:
        return fm.parse_rational(text, "argument")
    except fm.SpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex(text: str) -> complex:
    try:
        return parse_complex(text)
    except ComplexLiteralError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def read_spec(ref: str, validate: bool = True) -> fm.FlowSpec:
    """A file path, or the name / file name of a builtin example."""
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
        name = ref
    else:
        try:
            text = fm.builtin_text(os.path.basename(ref))
        except KeyError:
            raise InputError(f"no such spec file or builtin example: {ref}") from None
        name = os.path.basename(ref)
    return fm.load_spec(text, name) if validate else fm.parse_spec(text, name)


def _policy(args) -> PrecisionPolicy:
    policy = PrecisionPolicy.from_env()
    overrides = {
        k: getattr(args, k)
        for k in ("em_terms", "em_order", "series_tol", "compare_tol")
        if getattr(args, k, None) is not None
    }
    return replace(policy, **overrides) if overrides else policy


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> Result:
    spec = read_spec(args.spec, validate=False)
    report = fm.validate_spec(spec)
    rows = [{"rule": r.rule, "passed": r.passed, "message": r.message} for r in report.results]
    return Result(rows, ["rule", "passed", "message"], EXIT_OK if report.valid else EXIT_CHECK)


def cmd_spectrum(args) -> Result:
    spec = read_spec(args.spec)
    if args.nonzero is not None:
        lines = spectrum.nonzero_lines(spec, args.nonzero)
    else:
        lines = spectrum.resonances(spec, args.window)
    rows = []
    for ln in lines:
        row = {"nu": ln.frequency, "z0": ln.z0}
        if args.degree is not None:
            if not 0 <= args.degree <= spec.manifold_dim:
                raise InputError(f"degree {args.degree} outside [0, {spec.manifold_dim}]")
            row["dim"] = ln.per_degree_dim[args.degree]
            row["kernel_dim"] = ln.per_degree_kernel_dim[args.degree]
        else:
            row["dim"] = list(ln.per_degree_dim)
            row["kernel_dim"] = list(ln.per_degree_kernel_dim)
        row["alternating_sum"] = sum((-1) ** k * d for k, d in enumerate(ln.per_degree_dim))
        row["contributors"] = [_contributor_label(k, c) for k, cs in enumerate(ln.contributors) for c in cs]
        rows.append(row)
    return Result(rows, ["nu", "z0", "dim", "kernel_dim", "alternating_sum", "contributors"])


def _contributor_label(k: int, c: spectrum.Contributor) -> str:
    where = f"{c.element},j={c.j}" if c.p is None else f"{c.element},j={c.j},p={c.p}"
    return f"{c.kind}({where})@{k}"


def cmd_morse(args) -> Result:
    spec = read_spec(args.spec)
    if spec.betti is None:
        raise InputError("morse needs betti numbers in the spec")
    rows = [
        {
            "k": r.k,
            "lhs": r.lhs,
            "relation": "=" if r.equality_required else ">=",
            "rhs": r.rhs,
            "passed": r.passed,
        }
        for r in spectrum.morse_report(spec)
    ]
    ok = all(r["passed"] for r in rows)
    return Result(rows, ["k", "lhs", "relation", "rhs", "passed"], EXIT_OK if ok else EXIT_CHECK)


def cmd_koszul(args) -> Result:
    spec = read_spec(args.spec)
    homology = spectrum.koszul_homology(spec)
    counts = spec.fixed_counts()
    rows = []
    for k, h in enumerate(homology):
        expected = spec.rank * counts[k]
        rows.append({"k": k, "homology_dim": h, "n_c_k": expected, "passed": h == expected})
    ok = all(r["passed"] for r in rows)
    return Result(rows, ["k", "homology_dim", "n_c_k", "passed"], EXIT_OK if ok else EXIT_CHECK)


def cmd_torsion(args) -> Result:
    columns = ["seed", "determinant", "closed_form", "rel_error", "cohomology", "empty", "passed"]
    if args.circle is not None:
        try:
            value = torsion_lab.cw_torsion(torsion_lab.circle_complex(args.circle))
        except torsion_lab.TorsionError as exc:
            raise InputError(str(exc)) from None
        return Result([{"u": args.circle, "torsion": value.value, "log_torsion": value.log_value}], ["u", "torsion", "log_torsion"])
    if args.spec is None or args.nu is None:
        raise InputError("torsion needs --spec and --nu (or --circle)")
    spec = read_spec(args.spec)
    policy = _policy(args)
    try:
        closed = torsion_lab.torsion_closed_form(spec, args.nu)
    except torsion_lab.TorsionError as exc:
        raise InputError(str(exc)) from None
    rows = []
    for t in range(args.trials):
        seed = args.seed + t
        cx = torsion_lab.model_complex(spec, args.nu, seed=seed)
        det = torsion_lab.torsion_determinant(cx)
        rel = abs(det.value - closed.value) / closed.value
        coh = torsion_lab.complex_cohomology(cx)
        rows.append(
            {
                "seed": seed,
                "determinant": det.value,
                "closed_form": closed.value,
                "rel_error": rel,
                "cohomology": list(coh.dims),
                "passed": rel <= policy.compare_tol and not any(coh.dims),
                "empty": cx.empty,
            }
        )
    ok = all(r["passed"] for r in rows)
    return Result(rows, columns, EXIT_OK if ok else EXIT_CHECK)


def cmd_zeta(args) -> Result:
    spec = read_spec(args.spec)
    policy = _policy(args)
    rows = []
    if args.s is not None:
        rows.append({"quantity": "zeta_v", "value": zeta_engine.zeta_v(spec, args.s, policy)})
    rt = zeta_engine.regularized_torsion(spec)
    rows += [
        {"quantity": "residue", "value": zeta_engine.zeta_v_residue(spec)},
        {"quantity": "regularized_torsion", "value": rt.value},
        {"quantity": "parity_value", "value": rt.parity_value},
        {"quantity": "lerch_value", "value": rt.lerch_value},
        {"quantity": "euler_characteristic", "value": fm.euler_characteristic(spec)},
        {"quantity": "fixed_point_fuller_term", "value": fm.fixed_point_fuller_term(spec)},
    ]
    status = EXIT_OK if rt.discrepancy <= policy.compare_tol * max(1.0, rt.value) else EXIT_CHECK
    return Result(rows, ["quantity", "value"], status)


ZFUN_WHAT = ("zrs", "zeta_rs", "zflat", "z", "all")


def cmd_zfun(args) -> Result:
    spec = read_spec(args.spec)
    policy = _policy(args)
    z, s = args.at, args.s
    conv = args.convention
    tol = policy.compare_tol
    rows = []
    what = args.what
    if what in ("zrs", "all"):
        a = zeta_engine.big_z_rs(spec, z)
        b = zeta_engine.z_rs_closed_form(spec, z, conv)
        rows.append({"quantity": "Z_RS", "value": a, "check": b, "discrepancy": abs(a - b)})
    if what in ("zeta_rs", "all"):
        rows.append({"quantity": "zeta_RS", "value": zeta_engine.zeta_rs(spec, s, z, policy)})
    if what in ("zflat", "all"):
        methods = ["spectral", "geometric"] if args.method == "both" else [args.method]
        vals = [zeta_engine.zeta_flat(spec, s, z, m, policy, conv) for m in methods]
        row = {"quantity": f"zeta_flat[{methods[0]}]", "value": vals[0]}
        if len(vals) == 2:
            row["check"] = vals[1]
            row["discrepancy"] = abs(vals[0] - vals[1])
        rows.append(row)
    if what in ("z", "all"):
        a = zeta_engine.torsion_function(spec, z, conv)
        row = {"quantity": "Z", "value": a}
        if z.real > 0:
            b = zeta_engine.torsion_function_spectral(spec, z)
            row.update(check=b, discrepancy=abs(a - b))
        rows.append(row)
    failed = any(r.get("discrepancy") is not None and r["discrepancy"] > tol * max(1.0, abs(r["value"])) for r in rows)
    return Result(rows, ["quantity", "value", "check", "discrepancy"], EXIT_CHECK if failed else EXIT_OK)


def cmd_fuller(args) -> Result:
    spec = read_spec(args.spec)
    policy = _policy(args)
    phi = fuller_trace.TestFunction(args.t0, args.sigma)
    rep = fuller_trace.fuller_identity_check(spec, phi, args.cutoff, args.horizon, args.convention, policy)
    rows = [
        {"quantity": "geometric", "value": rep.geometric.value, "bound": rep.geometric.bound, "passed": None},
        {"quantity": "spectral", "value": rep.spectral.value, "bound": rep.spectral.bound, "passed": None},
        {"quantity": "discrepancy", "value": rep.discrepancy, "bound": rep.allowance, "passed": rep.passed},
    ]
    return Result(rows, ["quantity", "value", "bound", "passed"], EXIT_OK if rep.passed else EXIT_CHECK)


def cmd_examples(args) -> Result:
    if args.dump:
        try:
            return Result([], [], text=fm.builtin_text(args.dump))
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    rows = []
    for name, spec in fm.builtin_examples().items():
        rows.append(
            {
                "name": name,
                "file": fm.BUILTIN_FILES[name],
                "n": spec.manifold_dim,
                "rank": spec.rank,
                "fixed_points": len(spec.fixed_points),
                "closed_orbits": len(spec.closed_orbits),
                "euler": fm.euler_characteristic(spec),
            }
        )
    return Result(rows, ["name", "file", "n", "rank", "fixed_points", "closed_orbits", "euler"])


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "morse": cmd_morse,
    "koszul": cmd_koszul,
    "torsion": cmd_torsion,
    "zeta": cmd_zeta,
    "zfun": cmd_zfun,
    "fuller": cmd_fuller,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "machine"], default="table")
    common.add_argument("--digits", type=int, default=6, help="digits shown in table output")
    common.add_argument("--convention", choices=[c.value for c in zeta_engine.MonodromyConvention], default="inverse")
    common.add_argument("--em-terms", type=int, help="direct terms before the Euler-Maclaurin tail (env RT_PRECISION_TERMS)")
    common.add_argument("--em-order", type=int)
    common.add_argument("--series-tol", type=float)
    common.add_argument("--compare-tol", type=float)

    parser = argparse.ArgumentParser(prog="ruelle-torsion", description="Imaginary-axis resonances, zeta functions and torsion of Morse-Smale flows.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, spec_required=True):
        p = sub.add_parser(name, parents=[common], help=help)
        if spec_required is not None:
            p.add_argument("--spec", required=spec_required, help="spec file, or builtin name such as s1-rotation / ex-c.json")
        return p

    add("validate", "check the invariants of a spec")
    p = add("spectrum", "list resonance lines")
    p.add_argument("--window", type=_rational, default=Fraction(1), help="list lines with |nu| <= window")
    p.add_argument("--nonzero", type=int, help="instead list the first N nonzero lines")
    p.add_argument("--degree", type=int)
    add("morse", "generalized Morse inequalities")
    add("koszul", "homology of the contraction complex at 0")
    p = add("torsion", "torsion of the resonant complex at a line", spec_required=False)
    p.add_argument("--nu", type=_rational)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--circle", type=_complex, help="torsion of the circle complex with holonomy u")
    p = add("zeta", "zeta_V, its residue and the regularized torsion")
    p.add_argument("--s", type=_complex)
    p = add("zfun", "zeta_RS, Z_RS, flat zeta and the torsion function")
    p.add_argument("--at", type=_complex, required=True, help='z as "x+yi"')
    p.add_argument("--s", type=_complex, default=complex(2))
    p.add_argument("--what", choices=ZFUN_WHAT, default="all")
    p.add_argument("--method", choices=["spectral", "geometric", "both"], default="both")
    p = add("fuller", "pair both sides of the Fuller trace identity with a Gaussian")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--cutoff", type=float, required=True, help="frequency cutoff Y")
    p.add_argument("--horizon", type=float, required=True, help="period horizon T")
    p = add("examples", "list or dump builtin specs", spec_required=None)
    p.add_argument("--dump", metavar="NAME")
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if getattr(args, "trials", 1) < 1:
            raise InputError("--trials must be >= 1")
        if args.digits < 1:
            raise InputError("--digits must be >= 1")
        result = COMMANDS[args.command](args)
    except (
        InputError,
        fm.SpecError,
        zeta_engine.ZetaDomainError,
        fuller_trace.TestFunctionError,
        SpecialFunctionError,
        torsion_lab.TorsionError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    if result.text is not None:
        out.write(result.text)
    else:
        out.write(emit_report(result.rows, args.format, result.columns, args.digits))
    return result.status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

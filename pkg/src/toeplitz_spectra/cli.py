"""Command-line interface: ``toeplitz-spectra <command> [options]``.

Exit status is 0 on success, 1 for invalid input (including orders in the
restricted B-construction regime) and 2 when a computation fails
(non-convergence, insufficient precision).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from contextlib import contextmanager

import gmpy2

from .errors import (
    ConvergenceError,
    PrecisionError,
    RestrictionError,
    ToeplitzSpectraError,
    ValidationError,
)
from .exact import build_Tng, char_poly, construct_B
from .mplinalg import DEFAULT_PRECISION, MIN_PRECISION
from .params import SymbolSpec, compute_params
from .spectrum import b_blocks, full_spectrum_f, full_spectrum_g
from .verify import VerificationReport, sweep, write_reports

PRECISION_ENV = "TOEPLITZ_SPECTRA_PRECISION"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this CLI reserves 2 for failed computations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)[ij]$")
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_NUM})(?:(?P<im>[+-](?:{_NUM})?)[ij])?$")


def parse_complex(text: str, precision: int):
    """``a+bi`` literal to ``gmpy2.mpc``: ``1.5``, ``2i``, ``1+2i``, ``-0.5-1i``, ``-i``."""
    s = text.strip().replace(" ", "")
    m = _IMAG_RE.match(s)
    if m is not None:
        re_txt, im_txt = None, m.group("im")
    else:
        m = _COMPLEX_RE.match(s)
        if m is None:
            raise ValidationError(f"malformed complex literal {text!r}")
        re_txt, im_txt = m.group("re"), m.group("im")
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    with gmpy2.context(precision=precision):
        return gmpy2.mpc(gmpy2.mpfr(re_txt or "0"), gmpy2.mpfr(im_txt or "0"))


def _int_list(text: str) -> list[int]:
    """``17``, ``12,15,17`` or an inclusive range ``12:17``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, _, hi = part.partition(":")
            a, b = int(lo), int(hi)
            if b < a:
                raise ValueError(part)
            out.extend(range(a, b + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError(text)
    return out


def _int_list_arg(text):
    try:
        return _int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, list a,b,c or range a:b, got {text!r}")


def _default_precision() -> int:
    env = os.environ.get(PRECISION_ENV)
    if env is None or not env.strip():
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise _UsageError(f"{PRECISION_ENV}={env!r} is not an integer")


def _single(values, name):
    if len(values) != 1:
        raise _UsageError(f"--{name} takes a single value for this command")
    return values[0]


def _check_precision(p):
    if p < MIN_PRECISION:
        raise _UsageError(f"precision must be >= {MIN_PRECISION} bits, got {p}")
    return p


def _orient(r, s, transpose_ok, symbol=None):
    """Swap offsets (and symbol coefficients) when ``r > s`` and the user allows it."""
    if r <= s:
        return r, s, symbol
    if not transpose_ok:
        raise _UsageError(f"r={r} > s={s}; pass --transpose-ok to study the transposed matrix")
    print(f"notice: r={r} > s={s}, using the transpose (r={s}, s={r}); "
          "the spectrum is unchanged", file=sys.stderr)
    return s, r, (symbol.transposed() if symbol is not None else None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="toeplitz-spectra",
        description="Spectra of Toeplitz matrices with two off-diagonals via small integer B matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, sweep_ok=False):
        kind = _int_list_arg if sweep_ok else int
        p.add_argument("--n", type=kind, required=True, help="matrix order" +
                       (" (list a,b or range a:b allowed)" if sweep_ok else ""))
        p.add_argument("--r", type=kind, required=True, help="subdiagonal offset")
        p.add_argument("--s", type=kind, required=True, help="superdiagonal offset")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--transpose-ok", action="store_true",
                       help="allow r > s by swapping the offsets")

    p = sub.add_parser("params", help="integer parameters of the reduction")
    common(p)

    p = sub.add_parser("spectrum", help="all eigenvalues of T_n(g) or T_n(f)")
    common(p)
    p.add_argument("--precision", type=int, help=f"mantissa bits (default 256, env {PRECISION_ENV})")
    p.add_argument("--f0", help="diagonal coefficient, e.g. 1+2i")
    p.add_argument("--fr", help="coefficient on the r-th subdiagonal")
    p.add_argument("--fms", help="coefficient on the s-th superdiagonal")

    p = sub.add_parser("bmatrix", help="dump the integer B matrix")
    common(p)

    p = sub.add_parser("charpoly", help="exact characteristic polynomial of T_n(g) or of B")
    common(p)
    p.add_argument("--bmatrix", action="store_true", help="use the B matrix instead of T_n(g)")

    for name, helptext in (("verify", "exact identity plus numeric cross-check (JSON lines)"),
                           ("bench", "timing of the reduction against the dense oracle (JSON lines)")):
        p = sub.add_parser(name, help=helptext)
        common(p, sweep_ok=True)
        p.add_argument("--precision", type=_int_list_arg,
                       help="mantissa bits; a list such as 53,256 for bench")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        p.add_argument("--nonzero-only", action="store_true",
                       help="drop the zero cluster from the error metric")
        if name == "bench":
            p.add_argument("--repetitions", type=int, default=3)
            p.add_argument("--no-oracle", action="store_true", help="time the reduction only")
    return parser


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_csv(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _cmd_params(args, out):
    r, s, _ = _orient(args.r, args.s, args.transpose_ok)
    ps = compute_params(args.n, r, s)
    d = ps.as_dict()
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
    else:
        _emit_csv(out, list(d), [list(d.values())])


def _cmd_spectrum(args, out):
    prec = _check_precision(args.precision if args.precision is not None else _default_precision())
    has_symbol = any(v is not None for v in (args.f0, args.fr, args.fms))
    symbol = None
    if has_symbol:
        symbol = SymbolSpec(
            args.r, args.s,
            f0=parse_complex(args.f0 or "0", prec),
            fr=parse_complex(args.fr or "1", prec),
            fms=parse_complex(args.fms or "1", prec),
        )
    r, s, symbol = _orient(args.r, args.s, args.transpose_ok, symbol)
    params = compute_params(args.n, r, s)
    if symbol is not None:
        spec = full_spectrum_f(args.n, symbol, prec)
    else:
        spec = full_spectrum_g(args.n, r, s, prec)
    for flag in spec.flags:
        print(f"warning: {flag}", file=sys.stderr)
    records = spec.to_records()
    if args.format == "json":
        doc = {"params": params.as_dict(), "precision_bits": prec, "eigenvalues": records}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        _emit_csv(out, ["re", "im"], [[e["re"], e["im"]] for e in records])


def _cmd_bmatrix(args, out):
    r, s, _ = _orient(args.r, args.s, args.transpose_ok)
    B = construct_B(args.n, r, s)
    if args.format == "json":
        out.write(B.dumps() + "\n")
    else:
        csv.writer(out, lineterminator="\n").writerows(B.to_list())


def _cmd_charpoly(args, out):
    r, s, _ = _orient(args.r, args.s, args.transpose_ok)
    compute_params(args.n, r, s)
    A = construct_B(args.n, r, s) if args.bmatrix else build_Tng(args.n, r, s)
    q = char_poly(A)
    coeffs = [str(c) for c in q.coeffs]
    if args.format == "json":
        doc = {
            "matrix": "B" if args.bmatrix else "T",
            "n": args.n, "r": r, "s": s,
            "degree": q.degree,
            "coefficients": coeffs,
            "polynomial": str(q),
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        _emit_csv(out, ["power", "coefficient"], [[k, c] for k, c in enumerate(coeffs)])


def _report_rows(reports: list[VerificationReport]):
    header = ["n", "r", "s", "n_zero", "precision", "exact_identity_holds", "numeric_error",
              "oracle_runtime", "algorithm_runtime", "condition_numbers"]
    rows = []
    for rep in reports:
        d = rep.to_dict()
        p = d["params"]
        rows.append([p["n"], p["r"], p["s"], p["n_zero"], d["precision"], d["exact_identity_holds"],
                     d["numeric_error"], d["oracle_runtime"], d["algorithm_runtime"],
                     ";".join(d["condition_numbers"])])
    return header, rows


def _cmd_sweep(args, out):
    precisions = args.precision if args.precision is not None else [_default_precision()]
    for p in precisions:
        _check_precision(p)
    if args.command == "verify":
        _single(precisions, "precision")
    if args.jobs < 1:
        raise _UsageError("--jobs must be >= 1")
    points = []
    for n in args.n:
        for r0 in args.r:
            for s0 in args.s:
                r, s, _ = _orient(r0, s0, args.transpose_ok)
                compute_params(n, r, s)
                points.append((n, r, s))
    single = len(points) == 1
    if args.command == "verify":
        reports = sweep(points, precisions, 1, jobs=args.jobs, nonzero_only=args.nonzero_only)
    else:
        if args.repetitions < 1:
            raise _UsageError("--repetitions must be >= 1")
        reports = sweep(points, precisions, args.repetitions, jobs=args.jobs,
                        nonzero_only=args.nonzero_only, oracle=not args.no_oracle)
    if single and not reports:
        # the only point was skipped by the sweep: surface the reason
        b_blocks(compute_params(*points[0]))
    if args.format == "json":
        write_reports(reports, out)
    else:
        header, rows = _report_rows(reports)
        _emit_csv(out, header, rows)


_COMMANDS = {
    "params": _cmd_params,
    "spectrum": _cmd_spectrum,
    "bmatrix": _cmd_bmatrix,
    "charpoly": _cmd_charpoly,
    "verify": _cmd_sweep,
    "bench": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        # render to a buffer first so a failure never leaves a partial file
        buf = io.StringIO()
        _COMMANDS[args.command](args, buf)
        with _output(args.out) as out:
            out.write(buf.getvalue())
    except (_UsageError, ValidationError, RestrictionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, PrecisionError, ArithmeticError, ToeplitzSpectraError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``rsoscert certify | verify | generate``.

Exit codes: 0 certified/accepted, 1 verification rejected, 2 inconclusive,
3 precision exhausted, 64 usage, 65 bad certificate file, 70 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from .certificate import CertificateFormatError, dumps, loads
from .pipeline import CertifyStatus, certify
from .polyring import (
    Polynomial,
    PolynomialSyntaxError,
    TermSet,
    ess_polynomial,
    illposed,
    motzkin,
    parse_polynomial,
    terms_up_to,
)
from .sdpbuild import MissingMomentError
from .solver import SolverParams
from .verify import spot_check_linear_form, verify_certificate

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_PRECISION = 3
EXIT_USAGE = 64
EXIT_BAD_FILE = 65
EXIT_INTERNAL = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _family(name: str, params: Sequence[str]) -> Polynomial:
    if name == "ess":
        if len(params) != 2:
            raise UsageError("ess takes two parameters: N K")
        try:
            n, k = int(params[0]), int(params[1])
        except ValueError:
            raise UsageError("ess parameters must be integers") from None
        try:
            return ess_polynomial(n, k)
        except ValueError as exc:
            raise UsageError(f"ess: {exc}") from None
    if name == "motzkin":
        if params:
            raise UsageError("motzkin takes no parameters")
        return motzkin()
    if name == "illposed":
        if len(params) != 1:
            raise UsageError("illposed takes one parameter: EPS")
        try:
            return illposed(Fraction(params[0]))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"EPS must be rational, got {params[0]!r}") from None
    raise UsageError(f"unknown family {name!r} (expected ess, motzkin or illposed)")


def _read_terms(path: str, n: int, e: int) -> TermSet:
    members = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            alpha = tuple(int(v) for v in line.replace(",", " ").split())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: exponent entries must be integers") from None
        if len(alpha) != n or any(a < 0 for a in alpha):
            raise UsageError(f"{path}:{lineno}: expected {n} nonnegative integers")
        if sum(alpha) > e:
            raise UsageError(f"{path}:{lineno}: term of degree {sum(alpha)} exceeds e = {e}")
        members.append(alpha)
    if not members:
        raise UsageError(f"{path}: no denominator terms listed")
    return TermSet(n, members)


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=".rsoscert-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_certify(args) -> int:
    if args.den_degree < 0 or args.den_degree % 2:
        raise UsageError("--den-degree must be an even nonnegative integer 2e")
    e = args.den_degree // 2
    if args.input is not None:
        if args.vars is None:
            raise UsageError("--input needs --vars N")
        f = parse_polynomial(_read_text(args.input).strip(), args.vars)
    elif args.ess is not None:
        f = _family("ess", args.ess)
    elif args.motzkin:
        f = motzkin()
    else:
        f = _family("illposed", [args.illposed])
    if args.vars is not None and args.vars != f.n:
        raise UsageError(f"--vars {args.vars} does not match the {f.n}-variable input")
    if f.is_zero():
        raise UsageError("f is the zero polynomial")
    n = f.n
    T = _read_terms(args.den_terms, n, e) if args.den_terms else terms_up_to(n, e)
    g = parse_polynomial(_read_text(args.rational_den).strip(), n) if args.rational_den else None
    if g is not None and g.is_zero():
        raise UsageError("rational denominator g is zero")

    params = SolverParams(
        big_m=args.big_m,
        precision_digits=args.digits,
        max_iterations=args.max_iters,
        verbose=args.verbose,
    )
    result = certify(f, T, e=e, g=g, params=params)
    if result.status is CertifyStatus.INCONCLUSIVE:
        print("inconclusive: no certificate found (this does not show f is a sum of squares)")
        if result.message:
            print(f"  solver: {result.message}")
        return EXIT_INCONCLUSIVE
    if result.status is CertifyStatus.PRECISION_EXHAUSTED:
        print(f"precision exhausted: {result.message}")
        return EXIT_PRECISION

    cert = result.certificate
    # never write anything the exact verifier has not accepted
    report = verify_certificate(cert)
    if not report.accepted:
        print(f"internal error: produced certificate failed verification: {report.summary}", file=sys.stderr)
        return EXIT_INTERNAL
    spot = spot_check_linear_form(cert, trials=args.spot_checks, seed=args.seed)
    if not spot.ok:
        print("internal error: spot checks failed: " + "; ".join(spot.violations[:3]), file=sys.stderr)
        return EXIT_INTERNAL
    if args.timestamp:
        cert.provenance["created"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    _atomic_write(args.out, dumps(cert))
    print(f"certified: {report.summary}")
    print(f"  {spot.trials} linear-form spot checks passed (seed {spot.seed})")
    print(f"  certificate written to {args.out}")
    return EXIT_OK


def _format_vector(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def cmd_verify(args) -> int:
    try:
        text = Path(args.cert).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    try:
        cert = loads(text)
        report = verify_certificate(cert)
    except (CertificateFormatError, MissingMomentError) as exc:
        print(f"malformed certificate: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    if not report.accepted:
        print(report.summary)
        for label, check in (("numerator block", report.psd_block), ("f-localizing block", report.nd_block)):
            if check is not None and not check.ok:
                print(f"  {label} witness z = {_format_vector(check.witness)}")
        if report.support_check is False:
            print(f"  claimed witness monomial {cert.witness}")
        return EXIT_REJECTED
    print(report.summary)
    if args.spot_checks:
        spot = spot_check_linear_form(cert, trials=args.spot_checks, seed=args.seed)
        if not spot.ok:
            print("rejected: linear-form spot check failed")
            for line in spot.violations[:5]:
                print(f"  {line}")
            return EXIT_REJECTED
        print(f"{spot.trials} linear-form spot checks passed (seed {spot.seed})")
    return EXIT_OK


def cmd_generate(args) -> int:
    print(_family(args.family, args.params).to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rsoscert", description="Exact certificates that a polynomial is not a ratio of sums of squares.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver iterations")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="search for and write a verified certificate")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="FILE", help="file holding the polynomial f")
    src.add_argument("--ess", nargs=2, metavar=("N", "K"), help="even symmetric sextic f_{N,K}")
    src.add_argument("--motzkin", action="store_true", help="the Motzkin polynomial")
    src.add_argument("--illposed", metavar="EPS", help="(1-EPS^2) x1^2 + x2^2 - 2 x1 x2")
    c.add_argument("--vars", type=_positive_int, metavar="N", help="number of variables")
    c.add_argument("--den-degree", type=int, required=True, metavar="2E", help="denominator degree 2e")
    c.add_argument("--den-terms", metavar="FILE", help="explicit denominator terms, one exponent vector per line")
    c.add_argument("--rational-den", metavar="FILE", help="certify f/g for the polynomial g in FILE")
    c.add_argument("--digits", type=_positive_int, default=16, help="working decimal digits (default 16)")
    c.add_argument("--big-m", type=_rational, metavar="M", help="trace bound (default 10^6 (1 + max |coef|))")
    c.add_argument("--max-iters", type=_positive_int, default=150, metavar="I")
    c.add_argument("--seed", type=int, default=0, help="seed for the linear-form spot checks")
    c.add_argument("--spot-checks", type=int, default=100, metavar="T")
    c.add_argument("--timestamp", action="store_true", help="record the creation time (breaks byte-reproducibility)")
    c.add_argument("--out", required=True, metavar="CERT")
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", help="check a certificate exactly")
    v.add_argument("--cert", required=True, metavar="CERT")
    v.add_argument("--spot-checks", type=int, default=0, metavar="T")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    gen = sub.add_parser("generate", help="print a polynomial from a named family")
    gen.add_argument("family", help="ess, motzkin or illposed")
    gen.add_argument("params", nargs="*")
    gen.set_defaults(func=cmd_generate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, PolynomialSyntaxError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

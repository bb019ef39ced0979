"""Certificates and their line-oriented text format.

Example file::

    rsoscert-certificate 1
    n 2
    e 0
    f x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1
    terms all-terms-deg<=e
    basis newton
    order grlex
    kind moments
    y 0 0 +0/1
    y 2 2 +300/1
    provenance digits 16
    end

Rationals are written in lowest terms with an explicit sign on the numerator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .polyring import Exponent, PolynomialSyntaxError, TermSet, parse_polynomial, sorted_grlex, terms_up_to
from .sdpbuild import MonomialIndex, ProblemFingerprint

__all__ = [
    "Certificate",
    "CertificateFormatError",
    "FORMAT_VERSION",
    "format_rational",
    "parse_rational",
    "dumps",
    "loads",
]

FORMAT_VERSION = 1
MAGIC = "rsoscert-certificate"
ALL_TERMS = "all-terms-deg<=e"


@dataclass(frozen=True)
class Certificate:
    """A refutation: either exact moments ``y_hat`` or a support-obstruction ``witness``."""

    fingerprint: ProblemFingerprint
    y_hat: Optional[Mapping[Exponent, Fraction]] = None
    witness: Optional[Exponent] = None
    # basis the producer used; the verifier recomputes its own and compares
    numerator_basis: Optional[MonomialIndex] = field(default=None, compare=False)
    provenance: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.y_hat is None) == (self.witness is None):
            raise ValueError("a certificate carries exactly one of y_hat or witness")
        if self.y_hat is not None:
            object.__setattr__(
                self, "y_hat", {tuple(a): Fraction(v) for a, v in self.y_hat.items()}
            )
        else:
            object.__setattr__(self, "witness", tuple(self.witness))

    @property
    def kind(self) -> str:
        return "moments" if self.y_hat is not None else "support-obstruction"


class CertificateFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    sign = "-" if q < 0 else "+"
    return f"{sign}{abs(q.numerator)}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    if not text or text[0] not in "+-":
        raise ValueError(f"rational {text!r} lacks an explicit sign")
    num, sep, den = text[1:].partition("/")
    if not sep or not num.isdigit() or not den.isdigit():
        raise ValueError(f"malformed rational {text!r}")
    q = Fraction(int(num), int(den))
    if q.numerator != int(num) or q.denominator != int(den):
        raise ValueError(f"rational {text!r} is not in lowest terms")
    return -q if text[0] == "-" else q


def _exp_text(alpha: Exponent) -> str:
    return " ".join(str(a) for a in alpha)


def dumps(cert: Certificate) -> str:
    fp = cert.fingerprint
    lines = [f"{MAGIC} {FORMAT_VERSION}", f"n {fp.n}", f"e {fp.e}", f"f {fp.f.to_text()}"]
    if fp.g is not None:
        lines.append(f"g {fp.g.to_text()}")
    if fp.T == terms_up_to(fp.n, fp.e):
        lines.append(f"terms {ALL_TERMS}")
    else:
        lines.append("terms explicit")
        lines.extend(f"t {_exp_text(a)}" for a in sorted_grlex(fp.T))
    lines += [f"basis {fp.basis}", f"order {fp.order}", f"kind {cert.kind}"]
    if cert.y_hat is not None:
        for alpha in sorted_grlex(cert.y_hat):
            lines.append(f"y {_exp_text(alpha)} {format_rational(cert.y_hat[alpha])}")
    else:
        lines.append(f"witness {_exp_text(cert.witness)}")
    for key in sorted(cert.provenance):
        value = str(cert.provenance[key]).replace("\n", " ")
        lines.append(f"provenance {key} {value}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _exponent(fields, n, lineno) -> Exponent:
    if len(fields) != n:
        raise CertificateFormatError(f"expected {n} exponent entries, got {len(fields)}", lineno)
    try:
        alpha = tuple(int(x) for x in fields)
    except ValueError:
        raise CertificateFormatError("exponent entries must be integers", lineno) from None
    if any(a < 0 for a in alpha):
        raise CertificateFormatError("negative exponent", lineno)
    return alpha


def loads(text: str) -> Certificate:
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    if not raw or raw[-1].strip() != "end":
        raise CertificateFormatError("file is truncated (missing final 'end' line)")
    header = raw[0].split()
    if header != [MAGIC, str(FORMAT_VERSION)]:
        raise CertificateFormatError(f"expected header '{MAGIC} {FORMAT_VERSION}'", 1)

    scalars: Dict[str, Tuple[str, int]] = {}
    ys: Dict[Exponent, Fraction] = {}
    y_lines, t_lines, provenance = [], [], {}
    witness_line = None
    for lineno, line in enumerate(raw[1:-1], start=2):
        if not line.strip():
            continue
        key, _, rest = line.strip().partition(" ")
        if key == "y":
            y_lines.append((rest.split(), lineno))
        elif key == "t":
            t_lines.append((rest.split(), lineno))
        elif key == "witness":
            witness_line = (rest.split(), lineno)
        elif key == "provenance":
            pkey, _, pval = rest.partition(" ")
            provenance[pkey] = pval
        elif key in ("n", "e", "f", "g", "terms", "basis", "order", "kind"):
            if key in scalars:
                raise CertificateFormatError(f"duplicate key {key!r}", lineno)
            scalars[key] = (rest.strip(), lineno)
        else:
            raise CertificateFormatError(f"unknown key {key!r}", lineno)

    for key in ("n", "e", "f", "terms", "basis", "order", "kind"):
        if key not in scalars:
            raise CertificateFormatError(f"missing key {key!r}")
    try:
        n = int(scalars["n"][0])
        e = int(scalars["e"][0])
    except ValueError:
        raise CertificateFormatError("n and e must be integers") from None
    if n < 1 or e < 0:
        raise CertificateFormatError("need n >= 1 and e >= 0")

    def poly(key):
        value, lineno = scalars[key]
        try:
            return parse_polynomial(value, n)
        except PolynomialSyntaxError as exc:
            raise CertificateFormatError(str(exc), lineno) from None

    f = poly("f")
    g = poly("g") if "g" in scalars else None
    terms_mode, lineno = scalars["terms"]
    if terms_mode == ALL_TERMS:
        if t_lines:
            raise CertificateFormatError("explicit terms given with all-terms tag", t_lines[0][1])
        T = terms_up_to(n, e)
    elif terms_mode == "explicit":
        T = TermSet(n, [_exponent(fl, n, ln) for fl, ln in t_lines])
        if not T:
            raise CertificateFormatError("explicit term set is empty", lineno)
        if T.max_degree() > e:
            raise CertificateFormatError(f"term of degree > e={e} in explicit term set", lineno)
    else:
        raise CertificateFormatError(f"unknown terms mode {terms_mode!r}", lineno)

    try:
        fp = ProblemFingerprint(f=f, g=g, e=e, T=T, basis=scalars["basis"][0], order=scalars["order"][0])
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from None

    kind, lineno = scalars["kind"]
    if kind == "moments":
        if witness_line is not None:
            raise CertificateFormatError("witness line in a moments certificate", witness_line[1])
        for fields, ln in y_lines:
            if len(fields) != n + 1:
                raise CertificateFormatError(f"expected {n} exponents and a value", ln)
            alpha = _exponent(fields[:n], n, ln)
            if alpha in ys:
                raise CertificateFormatError(f"duplicate moment {alpha}", ln)
            try:
                ys[alpha] = parse_rational(fields[n])
            except ValueError as exc:
                raise CertificateFormatError(str(exc), ln) from None
        return Certificate(fp, y_hat=ys, provenance=provenance)
    if kind == "support-obstruction":
        if witness_line is None:
            raise CertificateFormatError("missing witness line")
        if y_lines:
            raise CertificateFormatError("moment lines in an obstruction certificate", y_lines[0][1])
        fields, ln = witness_line
        return Certificate(fp, witness=_exponent(fields, n, ln), provenance=provenance)
    raise CertificateFormatError(f"unknown certificate kind {kind!r}", lineno)

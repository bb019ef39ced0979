"""Turn a numeric dual point into an exact, verified certificate.

The numeric point is pulled toward the strictly feasible Gaussian-moment
point, each coordinate is replaced by a nearby rational, and the exact
verifier decides whether the result is a certificate. Denominator bounds grow
until it is, or until they exceed what the working precision can support.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

import mpmath

from .certificate import Certificate
from .polyring import Exponent
from .sdpbuild import SdpInstance, localizing_matrix
from .solver import DOUBLE_DIGITS, normalization, numeric_pd
from .verify import VerificationReport, verify_certificate

log = logging.getLogger(__name__)

__all__ = [
    "RoundingPolicy",
    "RoundingFailed",
    "to_fraction",
    "rationalize_value",
    "denominator_schedule",
    "blend_parameter",
    "blend_and_round",
]


class RoundingFailed(RuntimeError):
    def __init__(self, message: str, tightest: Optional[str] = None, attempts: int = 0):
        self.tightest = tightest
        self.attempts = attempts
        super().__init__(message if tightest is None else f"{message}; tightest failure: {tightest}")


def to_fraction(v) -> Fraction:
    """Exact value of a float, mpf, int, Fraction or decimal string."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, mpmath.mpf):
        if not mpmath.isfinite(v):
            raise ValueError(f"non-finite value {v}")
        sign, man, exp, _ = v._mpf_
        man = -int(man) if sign else int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    return Fraction(v)


def rationalize_value(v, max_denominator: int) -> Fraction:
    """Closest rational to v with denominator at most max_denominator."""
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    return to_fraction(v).limit_denominator(max_denominator)


def denominator_schedule(digits: int) -> Tuple[int, ...]:
    """10^3, 10^6, ... up to roughly the number of trustworthy digits (at least 10^12)."""
    top = max(12, digits - 3)
    return tuple(10**k for k in range(3, top + 1, 3))


@dataclass(frozen=True)
class RoundingPolicy:
    denominators: Optional[Sequence[int]] = None
    max_blend_exponent: int = 16
    direct_first: bool = True


def _shift(M, s):
    return [[v + (s if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(M)]


def _combine(A, B, a, b):
    return [[a * x + b * z for x, z in zip(ra, rb)] for ra, rb in zip(A, B)]


def _trace(M) -> Fraction:
    return sum((M[i][i] for i in range(len(M))), Fraction(0))


def blend_parameter(
    num: list, den: list, s: Fraction, strict_num: list, strict_den: list, strict_s: Fraction,
    digits: int, max_exponent: int = 16,
) -> Fraction:
    """Largest t in {1, 1/2, ..., 1/2^max_exponent} keeping the blend negative and strictly feasible; else 0.

    All matrices are exact; ``strict_*`` must already be rescaled.
    """
    for k in range(max_exponent + 1):
        t = Fraction(1, 2**k)
        sb = (1 - t) * s + t * strict_s
        if not sb < s / 2:
            continue
        bn = _combine(num, strict_num, 1 - t, t)
        bd = _shift(_combine(den, strict_den, 1 - t, t), sb)
        if numeric_pd(bn, digits) and numeric_pd(bd, digits):
            return t
    return Fraction(0)


def blend_and_round(
    numeric: Tuple[Mapping[Exponent, object], object],
    strict: Tuple[Mapping[Exponent, Fraction], Fraction],
    instance: SdpInstance,
    policy: RoundingPolicy = RoundingPolicy(),
    digits: int = DOUBLE_DIGITS,
    provenance: Optional[Mapping[str, str]] = None,
) -> Certificate:
    """Blend, round and verify; the returned certificate has passed exact verification."""
    y_num, s_num = numeric
    s = to_fraction(s_num)
    if not s < 0:
        raise ValueError("blend_and_round needs a numeric point with s < 0")
    monos = instance.constraint_monomials
    y = {a: to_fraction(y_num[a]) for a in monos}
    fp = instance.fingerprint
    if all(isinstance(y_num[a], (int, Fraction)) for a in monos):
        # already exact: nothing to blend or round if it verifies as is
        prov = dict(provenance or {}, blend_t="0", max_denominator="exact")
        cert = Certificate(fp, y_hat=y, numerator_basis=instance.numerator_basis, provenance=prov)
        if verify_certificate(cert).accepted:
            return cert
    # certificates are invariant under positive scaling; work at unit size
    scale = max((abs(v) for v in y.values()), default=Fraction(0))
    if scale == 0:
        raise RoundingFailed("numeric moment vector is zero")
    y = {a: v / scale for a, v in y.items()}
    s = s / scale

    # the same normalized blocks the solver used, so s is on the right scale
    cg, cf = normalization(instance)
    mult = instance.multiplier() * (1 / cg)
    neg_f = fp.f * (-1 / cf)
    num = localizing_matrix(mult, y, instance.numerator_basis)
    den = localizing_matrix(neg_f, y, instance.denominator_basis)

    y_tilde, s_tilde = strict
    s_tilde = s_tilde / cf
    st_num = localizing_matrix(mult, y_tilde, instance.numerator_basis)
    st_den = localizing_matrix(neg_f, y_tilde, instance.denominator_basis)
    # match the strict point's trace to the iterate's before blending
    lam = (_trace(num) + _trace(den) + len(den) * s) / (_trace(st_num) + _trace(st_den) + len(st_den) * s_tilde)
    if lam <= 0:
        lam = Fraction(1)
    st_num = [[lam * v for v in row] for row in st_num]
    st_den = [[lam * v for v in row] for row in st_den]
    s_st = lam * s_tilde

    t = blend_parameter(num, den, s, st_num, st_den, s_st, digits, policy.max_blend_exponent)
    candidates = []
    if policy.direct_first or t == 0:
        candidates.append(Fraction(0))
    if t > 0:
        candidates.append(t)

    points: Dict[Fraction, Dict[Exponent, Fraction]] = {}
    for tc in candidates:
        sb = (1 - tc) * s + tc * s_st
        assert sb < 0, "blending must keep s negative"
        points[tc] = {a: (1 - tc) * y[a] + tc * lam * Fraction(y_tilde[a]) for a in monos}

    denominators = policy.denominators or denominator_schedule(digits)
    tightest: Optional[Tuple[Fraction, str]] = None
    attempts = 0
    for bound in denominators:
        for tc in candidates:
            y_hat = {a: v.limit_denominator(bound) for a, v in points[tc].items()}
            attempts += 1
            prov = dict(provenance or {})
            prov.update({"blend_t": str(tc), "max_denominator": str(bound)})
            cert = Certificate(fp, y_hat=y_hat, numerator_basis=instance.numerator_basis, provenance=prov)
            report = verify_certificate(cert)
            if report.accepted:
                log.info("rounded certificate accepted (t=%s, denominator bound %d)", tc, bound)
                return cert
            tightest = _tighter(tightest, report, tc, bound)
    raise RoundingFailed(
        f"no rounding accepted after {attempts} attempts (denominators up to {denominators[-1]})",
        tightest[1] if tightest else None,
        attempts,
    )


def _tighter(current, report: VerificationReport, t: Fraction, bound: int):
    best = current
    for name, check in (("numerator block", report.psd_block), ("f-localizing block", report.nd_block)):
        if check is None or check.ok or check.pivot_value is None:
            continue
        size = abs(check.pivot_value)
        text = f"{name} pivot {check.pivot} = {float(check.pivot_value):.3e} (t={t}, bound {bound})"
        if best is None or size < best[0]:
            best = (size, text)
    return best

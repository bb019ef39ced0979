"""End-to-end certification: assemble, solve, round, verify."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from math import ceil
from typing import Optional

from .certificate import Certificate
from .polyring import Polynomial, TermSet
from .rationalize import RoundingFailed, RoundingPolicy, blend_and_round
from .sdpbuild import SupportObstruction, assemble_polynomial_instance, assemble_rational_instance
from .solver import SolveOutcome, SolverParams, SolveStatus, solve_with_escalation, strictly_feasible_point
from .verify import VerificationReport, verify_certificate

log = logging.getLogger(__name__)

__all__ = ["CertifyStatus", "CertifyResult", "certify"]


class CertifyStatus(enum.Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    PRECISION_EXHAUSTED = "precision exhausted"


@dataclass
class CertifyResult:
    status: CertifyStatus
    certificate: Optional[Certificate] = None
    report: Optional[VerificationReport] = None
    outcome: Optional[SolveOutcome] = None
    message: str = ""


def certify(
    f: Polynomial,
    T: TermSet,
    e: Optional[int] = None,
    g: Optional[Polynomial] = None,
    params: SolverParams = SolverParams(),
    use_sparsity: bool = True,
    policy: RoundingPolicy = RoundingPolicy(),
    max_precision_escalations: int = 3,
) -> CertifyResult:
    """Try to prove f (or f/g) is not in RSOS_T.

    Only a certificate that passed exact verification is ever returned.
    """
    if g is None:
        instance = assemble_polynomial_instance(f, T, use_sparsity=use_sparsity, e=e)
    else:
        instance = assemble_rational_instance(f, g, T, e=e)
    if isinstance(instance, SupportObstruction):
        cert = Certificate(instance.fingerprint, witness=instance.witness, provenance={"method": "support"})
        report = verify_certificate(cert)
        if not report.accepted:
            raise AssertionError("support obstruction failed its own verification")
        return CertifyResult(CertifyStatus.CERTIFIED, cert, report, message=report.summary)

    current = params
    last_error = ""
    for round_ in range(max_precision_escalations + 1):
        outcome = solve_with_escalation(instance, current, max_precision_escalations=max_precision_escalations)
        if outcome.status is SolveStatus.NO_CERTIFICATE:
            return CertifyResult(CertifyStatus.INCONCLUSIVE, outcome=outcome, message=outcome.message)
        if outcome.status is SolveStatus.PRECISION_EXHAUSTED:
            return CertifyResult(CertifyStatus.PRECISION_EXHAUSTED, outcome=outcome, message=outcome.message)
        strict = strictly_feasible_point(instance, outcome.digits)
        provenance = {
            "solver_digits": str(outcome.digits),
            "big_m": str(outcome.big_m),
            "iterations": str(len(outcome.log)),
        }
        try:
            cert = blend_and_round(
                (outcome.y, outcome.s), strict, instance, policy, digits=outcome.digits, provenance=provenance
            )
        except RoundingFailed as exc:
            last_error = str(exc)
            log.info("rounding failed at %d digits: %s", outcome.digits, exc)
            current = replace(current, precision_digits=ceil(outcome.digits * 3 / 2))
            continue
        report = verify_certificate(cert)
        return CertifyResult(CertifyStatus.CERTIFIED, cert, report, outcome, report.summary)
    return CertifyResult(CertifyStatus.PRECISION_EXHAUSTED, message=last_error)

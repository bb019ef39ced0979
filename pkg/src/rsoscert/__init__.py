"""Rational certificates that a polynomial is not a fraction of sums of squares."""

from .certificate import Certificate, dumps, loads
from .pipeline import CertifyResult, CertifyStatus, certify
from .polyring import Polynomial, TermSet, parse_polynomial, terms_up_to
from .verify import verify_certificate

__all__ = [
    "Certificate",
    "CertifyResult",
    "CertifyStatus",
    "Polynomial",
    "TermSet",
    "certify",
    "dumps",
    "loads",
    "parse_polynomial",
    "terms_up_to",
    "verify_certificate",
]

__version__ = "0.1.0"

"""Exact verification of refutation certificates.

Everything here runs over ``fractions.Fraction``. The verifier rebuilds the
numerator basis from the certificate fingerprint and never looks at solver
state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple

from .certificate import Certificate
from .polyring import Exponent, Polynomial, add_exp
from .sdpbuild import (
    MissingMomentError,
    localizing_matrix,
    moment_matrix,
    numerator_basis,
    support_sets,
)

__all__ = [
    "AsymmetricMatrixError",
    "FingerprintMismatchError",
    "LdlFactorization",
    "BlockCheck",
    "VerificationReport",
    "SpotCheckReport",
    "ldl_pivoted",
    "psd_check_exact",
    "nd_check_exact",
    "verify_certificate",
    "linear_form",
    "spot_check_linear_form",
]

Matrix = List[List[Fraction]]


class AsymmetricMatrixError(ValueError):
    pass


class FingerprintMismatchError(ValueError):
    """The certificate's recorded basis differs from the one its fingerprint implies."""


def _as_symmetric(M: Sequence[Sequence]) -> Matrix:
    A = [[Fraction(v) for v in row] for row in M]
    k = len(A)
    for i, row in enumerate(A):
        if len(row) != k:
            raise AsymmetricMatrixError(f"row {i} has length {len(row)}, expected {k}")
        for j in range(i):
            if row[j] != A[j][i]:
                raise AsymmetricMatrixError(f"entries ({i},{j}) and ({j},{i}) differ")
    return A


@dataclass(frozen=True)
class LdlFactorization:
    """``P M P^T = L diag(D, R) L^T`` where ``L`` is unit lower triangular.

    ``perm[i]`` is the original index of row i of ``P M P^T``. The first
    ``len(D)`` columns of ``L`` hold multipliers; the rest are identity.
    ``remainder`` is the untouched Schur complement (empty when fully factored).
    """

    perm: Tuple[int, ...]
    L: Tuple[Tuple[Fraction, ...], ...]
    D: Tuple[Fraction, ...]
    remainder: Tuple[Tuple[Fraction, ...], ...]

    @property
    def size(self) -> int:
        return len(self.perm)

    def recompose(self) -> Matrix:
        """Rebuild the original (unpermuted) matrix exactly."""
        k, r = self.size, len(self.D)
        mid = [[Fraction(0)] * k for _ in range(k)]
        for i in range(r):
            mid[i][i] = self.D[i]
        for i, row in enumerate(self.remainder):
            for j, v in enumerate(row):
                mid[r + i][r + j] = v
        L = self.L
        # P M P^T = L mid L^T
        LM = [[sum((L[i][t] * mid[t][j] for t in range(k) if L[i][t]), Fraction(0)) for j in range(k)] for i in range(k)]
        PMP = [[sum((LM[i][t] * L[j][t] for t in range(k) if L[j][t]), Fraction(0)) for j in range(k)] for i in range(k)]
        out = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                out[self.perm[i]][self.perm[j]] = PMP[i][j]
        return out


@dataclass(frozen=True)
class BlockCheck:
    """Outcome of one exact definiteness test.

    When ``ok`` is false, ``pivot`` is the elimination step that failed (in the
    permuted order) and ``witness`` is a rational vector z with z^T M z < 0
    (PSD test) or z^T M z >= 0 (negative-definiteness test).
    """

    ok: bool
    pivot: Optional[int] = None
    pivot_value: Optional[Fraction] = None
    witness: Optional[Tuple[Fraction, ...]] = None
    factorization: Optional[LdlFactorization] = None
    reason: str = ""


def ldl_pivoted(M: Sequence[Sequence], pivoting: bool = True):
    """Symmetric LDL^T elimination until a non-positive pivot is met.

    Returns ``(factorization, failed_step, failed_value)``. ``failed_step`` is
    None when every pivot was positive.
    """
    A = _as_symmetric(M)
    k = len(A)
    perm = list(range(k))
    L = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    D: List[Fraction] = []
    failed, failed_value = None, None
    for r in range(k):
        if pivoting:
            p = max(range(r, k), key=lambda i: (A[i][i], -i))
            if p != r:
                A[r], A[p] = A[p], A[r]
                for row in A:
                    row[r], row[p] = row[p], row[r]
                perm[r], perm[p] = perm[p], perm[r]
                for c in range(r):
                    L[r][c], L[p][c] = L[p][c], L[r][c]
        piv = A[r][r]
        if piv <= 0:
            failed, failed_value = r, piv
            break
        D.append(piv)
        rowr = A[r]
        for i in range(r + 1, k):
            lir = A[i][r] / piv
            L[i][r] = lir
            if lir:
                rowi = A[i]
                for j in range(r + 1, k):
                    if rowr[j]:
                        rowi[j] -= lir * rowr[j]
    r = len(D)
    remainder = tuple(tuple(A[i][r:]) for i in range(r, k))
    fact = LdlFactorization(tuple(perm), tuple(map(tuple, L)), tuple(D), remainder)
    return fact, failed, failed_value


def _lift_witness(fact: LdlFactorization, z: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Vector x with x^T M x == z^T R z, R the remainder block."""
    k, r = fact.size, len(fact.D)
    x = [Fraction(0)] * r + [Fraction(v) for v in z]
    # solve L11^T x1 = -L21^T z, back substitution
    for i in range(r - 1, -1, -1):
        acc = Fraction(0)
        for j in range(i + 1, k):
            if fact.L[j][i] and x[j]:
                acc += fact.L[j][i] * x[j]
        x[i] = -acc
    out = [Fraction(0)] * k
    for i in range(k):
        out[fact.perm[i]] = x[i]
    return tuple(out)


def _quad(M: Matrix, x: Sequence[Fraction]) -> Fraction:
    return sum((x[i] * M[i][j] * x[j] for i in range(len(x)) if x[i] for j in range(len(x)) if x[j]), Fraction(0))


def psd_check_exact(M: Sequence[Sequence]) -> BlockCheck:
    """Decide M >= 0 by LDL^T with largest-diagonal pivoting."""
    fact, step, value = ldl_pivoted(M, pivoting=True)
    if step is None:
        return BlockCheck(True, factorization=fact, reason="all pivots positive")
    R = fact.remainder
    m = len(R)
    if value < 0:
        z = [Fraction(int(i == 0)) for i in range(m)]
        return BlockCheck(False, step, value, _lift_witness(fact, z), fact, f"negative pivot {value} at step {step}")
    # zero pivot is the largest diagonal: PSD iff the whole remainder vanishes
    for i in range(m):
        for j in range(m):
            if R[i][j]:
                z = [Fraction(0)] * m
                if R[i][i] < 0:
                    z[i] = Fraction(1)
                elif R[j][j] < 0:
                    z[j] = Fraction(1)
                else:
                    z[i], z[j] = Fraction(1), Fraction(-1 if R[i][j] > 0 else 1)
                return BlockCheck(
                    False, step + i, Fraction(0), _lift_witness(fact, z), fact,
                    f"zero pivot with nonzero entry {R[i][j]} remaining in row {step + i}",
                )
    return BlockCheck(True, factorization=fact, reason=f"PSD with rank {len(fact.D)}")


def nd_check_exact(M: Sequence[Sequence]) -> BlockCheck:
    """Decide M < 0 (strict) by unpivoted LDL^T of -M."""
    A = _as_symmetric(M)
    neg = [[-v for v in row] for row in A]
    fact, step, value = ldl_pivoted(neg, pivoting=False)
    if step is None:
        return BlockCheck(True, factorization=fact, reason="all pivots of -M positive")
    m = len(fact.remainder)
    z = [Fraction(int(i == 0)) for i in range(m)]
    return BlockCheck(
        False, step, -value, _lift_witness(fact, z), fact,
        f"pivot {value} of -M at step {step} is not positive",
    )


@dataclass(frozen=True)
class VerificationReport:
    accepted: bool
    psd_block: Optional[BlockCheck] = None
    nd_block: Optional[BlockCheck] = None
    support_check: Optional[bool] = None
    summary: str = ""
    numerator_basis: Tuple[Exponent, ...] = field(default=(), repr=False)


def verify_certificate(cert: Certificate) -> VerificationReport:
    fp = cert.fingerprint
    if cert.witness is not None:
        if fp.g is None:
            return VerificationReport(False, support_check=False, summary="support obstruction needs a denominator g")
        gamma1, gamma2 = support_sets(fp)
        w = cert.witness
        ok = w in gamma2 and w not in gamma1
        if ok:
            summary = f"accepted: monomial {w} lies in the f-side support but not the g-side support"
        elif w in gamma1:
            summary = f"rejected: witness {w} is reachable on the g side"
        else:
            summary = f"rejected: witness {w} is not reachable on the f side"
        return VerificationReport(ok, support_check=ok, summary=summary)

    basis = numerator_basis(fp)
    if cert.numerator_basis is not None and tuple(cert.numerator_basis) != tuple(basis):
        raise FingerprintMismatchError("certificate basis differs from the basis implied by its fingerprint")
    y = cert.y_hat
    if fp.g is None:
        num = moment_matrix(y, basis)
    else:
        num = localizing_matrix(fp.g, y, basis)
    den = localizing_matrix(fp.f, y, sorted(fp.T, key=lambda a: (sum(a), a)))
    psd = psd_check_exact(num)
    nd = nd_check_exact(den)
    ok = psd.ok and nd.ok
    parts = []
    label = "moment block" if fp.g is None else "g-localizing block"
    parts.append(f"{label} {len(basis)}x{len(basis)}: {'PSD' if psd.ok else 'NOT PSD (' + psd.reason + ')'}")
    parts.append(f"f-localizing block {len(den)}x{len(den)}: {'negative definite' if nd.ok else 'NOT negative definite (' + nd.reason + ')'}")
    summary = ("accepted; " if ok else "rejected; ") + "; ".join(parts)
    return VerificationReport(ok, psd, nd, None, summary, tuple(basis))


def linear_form(y: Mapping[Exponent, Fraction], p: Polynomial) -> Fraction:
    """L_y(p) = sum_a p_a y_a."""
    total = Fraction(0)
    for alpha, c in p.items():
        try:
            total += c * y[alpha]
        except KeyError:
            raise MissingMomentError(alpha) from None
    return total


@dataclass(frozen=True)
class SpotCheckReport:
    trials: int
    seed: int
    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _random_poly(rng: random.Random, n: int, terms: Sequence[Exponent], nonzero: bool) -> Polynomial:
    while True:
        coeffs = {a: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for a in terms}
        p = Polynomial(n, coeffs)
        if not (nonzero and p.is_zero()):
            return p


def spot_check_linear_form(cert: Certificate, trials: int = 100, seed: int = 0) -> SpotCheckReport:
    """Evaluate L(f v^2) < 0 and L(u^2) >= 0 (or L(g u^2) >= 0) on random v, u."""
    fp = cert.fingerprint
    if cert.y_hat is None:
        return SpotCheckReport(0, seed)
    rng = random.Random(seed)
    T = sorted(fp.T, key=lambda a: (sum(a), a))
    basis = list(numerator_basis(fp))
    mult = fp.g if fp.g is not None else Polynomial.constant(fp.n, 1)
    violations = []
    for t in range(trials):
        v = _random_poly(rng, fp.n, T, nonzero=True)
        u = _random_poly(rng, fp.n, basis, nonzero=False)
        lf = linear_form(cert.y_hat, fp.f * v * v)
        lu = linear_form(cert.y_hat, mult * u * u)
        if lf >= 0:
            violations.append(f"trial {t}: L(f v^2) = {lf} >= 0 for v = {v.to_text()}")
        if lu < 0:
            violations.append(f"trial {t}: L(g u^2) = {lu} < 0 for u = {u.to_text()}")
    return SpotCheckReport(trials, seed, tuple(violations))

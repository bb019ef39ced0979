"""Big-M interior-point solver for the dual (moment) side of the SDP.

The dual is written as a linear matrix inequality in x = (y, s):

    minimize s  subject to  S(x) = F0 + sum_i x_i F_i  >= 0

with three diagonal blocks: the numerator moment (or g-localizing) matrix,
the (-f)-localizing matrix plus s*I, and the scalar ``big_m - Tr M(y, s)``.
f and g enter divided by their largest absolute coefficient, so ``s`` and
``big_m`` refer to that normalized problem.
Only the dual iterate is needed for a certificate, and it stays exactly
feasible throughout; the primal Gram matrices start infeasible.

Two arithmetics are available: hardware doubles (``precision_digits <= 16``)
and mpmath floats at the requested number of decimal digits.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np
import scipy.linalg

from .polyring import Exponent, Polynomial
from .sdpbuild import SdpInstance, localizing_matrix

log = logging.getLogger(__name__)

__all__ = [
    "SolverParams",
    "SolveStatus",
    "SolveOutcome",
    "IterationRecord",
    "SolverError",
    "IterationLimitError",
    "LinearSolveError",
    "StrictFeasibilityError",
    "default_big_m",
    "gaussian_moment",
    "strictly_feasible_point",
    "normalization",
    "numeric_pd",
    "numeric_min_eig",
    "solve_big_m",
    "solve_with_escalation",
]

FRACTION_TO_BOUNDARY = 0.98
DOUBLE_DIGITS = 16


class SolverError(RuntimeError):
    pass


class IterationLimitError(SolverError):
    def __init__(self, outcome: "SolveOutcome"):
        self.outcome = outcome
        super().__init__(f"no decision after {len(outcome.log)} iterations")


class LinearSolveError(SolverError):
    def __init__(self, message: str, condition: float):
        self.condition = condition
        super().__init__(f"{message} (condition estimate {condition:.3e})")


class StrictFeasibilityError(SolverError):
    pass


def default_big_m(f: Polynomial) -> Fraction:
    """10^6 * (1 + largest |coefficient| of f)."""
    return Fraction(10**6) * (1 + max(abs(c) for _, c in f.items()))


@dataclass(frozen=True)
class SolverParams:
    big_m: Optional[Fraction] = None
    precision_digits: int = DOUBLE_DIGITS
    max_iterations: int = 150
    # early stop once s < -negativity_margin * big_m
    negativity_margin: Fraction = Fraction(1, 1000)
    # relative primal residual and relative gap that count as converged
    feasibility_tolerance: float = 1e-9
    verbose: bool = False

    def __post_init__(self):
        if self.big_m is not None and self.big_m <= 0:
            raise ValueError("big_m must be positive")
        if self.negativity_margin <= 0:
            raise ValueError("negativity_margin must be positive")
        if self.precision_digits < DOUBLE_DIGITS:
            raise ValueError(f"precision_digits must be >= {DOUBLE_DIGITS}")

    def resolved_big_m(self, instance: SdpInstance) -> Fraction:
        return Fraction(self.big_m) if self.big_m is not None else default_big_m(instance.fingerprint.f)


class SolveStatus(enum.Enum):
    CERTIFICATE_CANDIDATE = "CertificateCandidateFound"
    NO_CERTIFICATE = "NoCertificateFound"
    PRECISION_EXHAUSTED = "PrecisionExhausted"


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    s: float
    residual: float
    gap: float
    step_primal: float
    step_dual: float

    def line(self) -> str:
        return (
            f"iter={self.iteration} s={self.s:.12e} residual={self.residual:.3e} "
            f"gap={self.gap:.3e} step_p={self.step_primal:.4f} step_d={self.step_dual:.4f}"
        )


@dataclass
class SolveOutcome:
    status: SolveStatus
    y: Dict[Exponent, object]
    s: object
    big_m: Fraction
    digits: int
    log: List[IterationRecord] = field(default_factory=list)
    message: str = ""
    # dual infeasibility of the returned point: max(0, -lambda_min) over blocks
    dual_residual: float = 0.0

    @property
    def s_float(self) -> float:
        return float(self.s)


# --------------------------------------------------------------------------
# arithmetic backends


class _Float64:
    digits = DOUBLE_DIGITS
    dtype = np.float64

    def __init__(self, digits: int = DOUBLE_DIGITS):
        self.eps = np.finfo(np.float64).eps

    def num(self, v):
        return float(v)

    def array(self, values):
        return np.array(values, dtype=np.float64)

    def zeros(self, shape):
        return np.zeros(shape)

    def chol(self, A):
        return np.linalg.cholesky(A)

    def chol_inv(self, L):
        Linv = scipy.linalg.solve_triangular(L, np.eye(L.shape[0]), lower=True)
        return Linv.T @ Linv

    def chol_solve(self, L, b):
        return scipy.linalg.cho_solve((L, True), b)

    def lower_solve(self, L, B):
        return scipy.linalg.solve_triangular(L, B, lower=True)

    def eigvalsh(self, A):
        return np.linalg.eigvalsh(A)

    def scatter(self, idx, weights, size):
        return np.bincount(idx, weights=weights, minlength=size)

    def condition(self, A) -> float:
        try:
            return float(np.linalg.cond(A))
        except np.linalg.LinAlgError:
            return float("inf")

    def context(self):
        return _NullContext()


class _NullContext:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


class _MpFloat:
    """mpmath floats held in numpy object arrays."""

    dtype = object

    def __init__(self, digits: int):
        self.digits = digits
        self.eps = mpmath.mpf(10) ** (-digits)

    def context(self):
        return mpmath.workdps(self.digits)

    def num(self, v):
        if isinstance(v, Fraction):
            return mpmath.mpf(v.numerator) / v.denominator
        return mpmath.mpf(v)

    def array(self, values):
        arr = np.asarray(values, dtype=object)
        flat = [self.num(v) for v in arr.ravel()]
        return np.array(flat, dtype=object).reshape(arr.shape)

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.fill(mpmath.mpf(0))
        return out

    def chol(self, A):
        k = A.shape[0]
        L = self.zeros((k, k))
        for j in range(k):
            d = A[j, j] - np.dot(L[j, :j], L[j, :j]) if j else A[j, j]
            if not d > 0:
                raise np.linalg.LinAlgError("matrix is not positive definite")
            L[j, j] = mpmath.sqrt(d)
            if j + 1 < k:
                col = A[j + 1 :, j]
                if j:
                    col = col - L[j + 1 :, :j] @ L[j, :j]
                L[j + 1 :, j] = col / L[j, j]
        return L

    def lower_solve(self, L, B):
        B = np.array(B, dtype=object)
        vec = B.ndim == 1
        if vec:
            B = B[:, None]
        X = self.zeros(B.shape)
        for i in range(L.shape[0]):
            row = B[i]
            if i:
                row = row - L[i, :i] @ X[:i]
            X[i] = row / L[i, i]
        return X[:, 0] if vec else X

    def upper_solve_t(self, L, B):
        """Solve L^T X = B."""
        B = np.array(B, dtype=object)
        vec = B.ndim == 1
        if vec:
            B = B[:, None]
        k = L.shape[0]
        X = self.zeros(B.shape)
        for i in range(k - 1, -1, -1):
            row = B[i]
            if i + 1 < k:
                row = row - L[i + 1 :, i] @ X[i + 1 :]
            X[i] = row / L[i, i]
        return X[:, 0] if vec else X

    def chol_inv(self, L):
        k = L.shape[0]
        eye = self.zeros((k, k))
        for i in range(k):
            eye[i, i] = mpmath.mpf(1)
        Linv = self.lower_solve(L, eye)
        return Linv.T @ Linv

    def chol_solve(self, L, b):
        return self.upper_solve_t(L, self.lower_solve(L, b))

    def eigvalsh(self, A):
        if A.shape[0] == 1:
            return np.array([A[0, 0]], dtype=object)
        ev = mpmath.eigsy(mpmath.matrix(A.tolist()), eigvals_only=True)
        return np.array([ev[i] for i in range(A.shape[0])], dtype=object)

    def scatter(self, idx, weights, size):
        out = self.zeros(size)
        np.add.at(out, idx, weights)
        return out

    def condition(self, A) -> float:
        try:
            return float(np.linalg.cond(np.array(A, dtype=float)))
        except np.linalg.LinAlgError:
            return float("inf")


def _backend(digits: int):
    return _Float64() if digits <= DOUBLE_DIGITS else _MpFloat(digits)


# --------------------------------------------------------------------------
# LMI data


@dataclass
class _Block:
    size: int
    var: np.ndarray  # which x-component each stored entry belongs to
    row: np.ndarray
    col: np.ndarray
    val: np.ndarray
    const: np.ndarray  # F0 restricted to this block (dense)


def normalization(instance: SdpInstance) -> Tuple[Fraction, Fraction]:
    """Largest |coefficient| of the multiplier g and of f.

    The solver works with g/c_g and f/c_f. This changes neither which y are
    certificates nor the status, but keeps both blocks on the same scale.
    """
    g = instance.multiplier()
    f = instance.fingerprint.f
    return max(abs(c) for _, c in g.items()), max(abs(c) for _, c in f.items())


def _lmi_entries(instance: SdpInstance):
    """Per-block (var, i, j, value) lists of F_1..F_{m+1}; block 3 is the trace bound."""
    m = instance.m
    k2 = instance.block_sizes[1]
    cg, cf = normalization(instance)
    index = {a: i for i, a in enumerate(instance.constraint_monomials)}
    num, den, trace = [], [], []
    for alpha in instance.constraint_monomials:
        t = Fraction(0)
        for (i, j), v in instance.G[alpha].items():
            v = v / cg
            num.append((index[alpha], i, j, v))
            t += v if i == j else 0
        for (i, j), v in instance.H[alpha].items():
            v = v / cf
            den.append((index[alpha], i, j, v))
            t += v if i == j else 0
        if t:
            trace.append((index[alpha], 0, 0, -t))
    den.extend((m, i, i, Fraction(1)) for i in range(k2))
    trace.append((m, 0, 0, Fraction(-k2)))
    return num, den, trace


def redundant_variables(instance: SdpInstance):
    """Variables of x = (y, s) whose matrices are combinations of the others.

    A variable that owns a matrix position no other variable touches can never
    take part in a linear dependency, so only the remaining ("loose") columns
    go through a pivoted QR. Returns ``(dropped, transfer, kernel)``: the
    dropped y-indices, for each of them the coefficients expressing its matrix
    through kept variables, and, when F_s itself is dependent, a direction
    (dy, -1) that leaves M(y, s) unchanged.
    """
    m = instance.m
    cols: Dict[int, Dict[tuple, float]] = {i: {} for i in range(m + 1)}
    for b, entries in enumerate(_lmi_entries(instance)):
        for var, i, j, v in entries:
            if i <= j:
                cols[var][(b, i, j)] = cols[var].get((b, i, j), 0.0) + float(v)
    owners: Dict[tuple, int] = {}
    for col in cols.values():
        for pos in col:
            owners[pos] = owners.get(pos, 0) + 1
    loose = [var for var, col in cols.items() if not any(owners[p] == 1 for p in col)]
    if not loose:
        return [], {}, None
    positions = sorted({p for var in loose for p in cols[var]})
    prow = {p: r for r, p in enumerate(positions)}
    # s is listed first; if the pivoted QR still drops it, it becomes a kernel direction
    order = sorted(loose, key=lambda v: (v != m, v))
    A = np.zeros((len(positions), len(order)))
    for c, var in enumerate(order):
        for p, v in cols[var].items():
            A[prow[p], c] = v
    _, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > 1e-9 * max(diag[0], 1.0))) if len(diag) else 0
    kept = [order[i] for i in sorted(piv[:rank])]
    dropped = [v for v in order if v not in kept]
    B = A[:, [order.index(v) for v in kept]]
    transfer = {}
    for v in dropped:
        coef, *_ = np.linalg.lstsq(B, A[:, order.index(v)], rcond=None)
        transfer[v] = [(k, cf) for k, cf in zip(kept, coef) if abs(cf) > 1e-12]
    kernel = None
    if m in transfer:
        kernel = np.zeros(m + 1)
        for k, cf in transfer.pop(m):
            kernel[k] = cf
        kernel[m] = -1.0
        dropped.remove(m)
    return sorted(dropped), transfer, kernel


def _lmi_blocks(instance: SdpInstance, big_m: Fraction, bk, dropped=()) -> List[_Block]:
    """Blocks of F0 + sum x_i F_i with x = (y_1..y_m, s); full symmetric COO storage."""
    k1, k2 = instance.block_sizes
    dropped = set(dropped)
    blocks = []
    for entries, size, const in zip(_lmi_entries(instance), (k1, k2, 1), (0, 0, big_m)):
        if not size:
            continue
        # G and H already store both (i, j) and (j, i)
        full = [e for e in entries if e[0] not in dropped]
        C = bk.zeros((size, size))
        if const:
            C[0, 0] = bk.num(const)
        blocks.append(
            _Block(
                size,
                np.array([e[0] for e in full], dtype=np.int64),
                np.array([e[1] for e in full], dtype=np.int64),
                np.array([e[2] for e in full], dtype=np.int64),
                bk.array([e[3] for e in full]),
                C,
            )
        )
    return blocks


def _assemble(block: _Block, x, bk, with_const=True):
    k = block.size
    flat = bk.scatter(block.row * k + block.col, block.val * x[block.var], k * k).reshape(k, k)
    return flat + block.const if with_const else flat


def _trace_with(block: _Block, M, nvars: int, bk):
    """Vector of Tr(F_i M) over all x-components i, for one block."""
    return bk.scatter(block.var, block.val * M[block.col, block.row], nvars)


def _schur(block: _Block, Sinv, Z, nvars: int, bk, chunk_entries: int = 4_000_000):
    """Matrix H_ij = Tr(F_i Sinv F_j Z) restricted to one block."""
    E = len(block.var)
    H = bk.zeros(nvars * nvars)
    rows = max(1, chunk_entries // max(E, 1))
    P_all = Sinv[np.ix_(block.col, block.row)]
    Q_all = Z[np.ix_(block.row, block.col)]
    for start in range(0, E, rows):
        sl = slice(start, start + rows)
        T = (block.val[sl, None] * block.val[None, :]) * P_all[sl] * Q_all[sl]
        idx = (block.var[sl, None] * nvars + block.var[None, :]).ravel()
        H = H + bk.scatter(idx, T.ravel(), nvars * nvars)
    return H.reshape(nvars, nvars)


def _max_step(X, D, bk, L=None):
    """Largest a with X + a*D >= 0 (inf when D >= 0); X must be positive definite."""
    if L is None:
        L = bk.chol(X)
    W = bk.lower_solve(L, D)
    W = bk.lower_solve(L, W.T)
    W = (W + W.T) / 2
    lam = min(bk.eigvalsh(W))
    if lam >= 0:
        return float("inf")
    return -1 / lam


# --------------------------------------------------------------------------
# strictly feasible point


def _regularized_chol(H, bk, attempts: int = 4):
    """Cholesky of H, adding eps * 100^k * max|diag| to the diagonal if needed."""
    try:
        return bk.chol(H)
    except np.linalg.LinAlgError:
        pass
    top = max(abs(v) for v in np.diag(H))
    for k in range(attempts):
        shift = bk.num(bk.eps) * bk.num(100) ** k * top
        try:
            return bk.chol(H + shift * bk.array(np.eye(H.shape[0])))
        except np.linalg.LinAlgError:
            continue
    return None


def gaussian_moment(alpha: Exponent) -> int:
    """E[x^alpha] under the standard Gaussian on R^n: product of (a-1)!! over even a."""
    out = 1
    for a in alpha:
        if a % 2:
            return 0
        for t in range(a - 1, 0, -2):
            out *= t
    return out


def numeric_min_eig(M: list, digits: int):
    bk = _backend(digits)
    with bk.context():
        arr = bk.array(M)
        return min(bk.eigvalsh(arr)) if len(M) else None


def numeric_pd(M: list, digits: int) -> bool:
    if not M:
        return True
    bk = _backend(digits)
    with bk.context():
        try:
            bk.chol(bk.array(M))
            return True
        except np.linalg.LinAlgError:
            return False


def strictly_feasible_point(
    instance: SdpInstance, digits: int = DOUBLE_DIGITS
) -> Tuple[Dict[Exponent, Fraction], Fraction]:
    """Gaussian moments y~ and an integer s~ with M(y~, s~) positive definite."""
    y = {a: Fraction(gaussian_moment(a)) for a in instance.constraint_monomials}
    num = localizing_matrix(instance.multiplier(), y, instance.numerator_basis)
    den = localizing_matrix(-instance.fingerprint.f, y, instance.denominator_basis)
    for attempt_digits in (digits, max(2 * digits, 32)):
        lam = numeric_min_eig(den, attempt_digits)
        s = Fraction(max(1, ceil(-float(lam)) + 1))
        shifted = [[v + (s if i == j else 0) for j, v in enumerate(r)] for i, r in enumerate(den)]
        if numeric_pd(num, attempt_digits) and numeric_pd(shifted, attempt_digits):
            return y, s
    raise StrictFeasibilityError("could not confirm strict feasibility of the Gaussian moment point")


# --------------------------------------------------------------------------
# the interior-point iteration


def solve_big_m(instance: SdpInstance, params: SolverParams = SolverParams()) -> SolveOutcome:
    """Minimize s over M(y, s) >= 0, Tr M(y, s) <= big_m; see module docstring."""
    bk = _backend(params.precision_digits)
    with bk.context():
        return _solve(instance, params, bk)


def _solve(instance: SdpInstance, params: SolverParams, bk) -> SolveOutcome:
    big_m = params.resolved_big_m(instance)
    m = instance.m
    BM = bk.num(big_m)
    # decisions are made against this floor, far above rounding noise
    noise = BM * bk.num(10) ** (-(bk.digits - 3))
    margin = BM * bk.num(params.negativity_margin)
    tol = params.feasibility_tolerance
    if bk.digits > DOUBLE_DIGITS:
        tol = min(tol, float(mpmath.mpf(10) ** (-(bk.digits // 2))))

    y0, s0 = strictly_feasible_point(instance, bk.digits)
    _, cf = normalization(instance)
    full = bk.array([y0[a] for a in instance.constraint_monomials] + [s0 / cf])
    dropped, transfer, kernel = redundant_variables(instance)
    for d, terms in transfer.items():
        for k, cf in terms:
            full[k] = full[k] + bk.num(cf) * full[d]
        full[d] = bk.num(0)
    active = [i for i in range(m + 1) if i not in set(dropped)]
    blocks = _lmi_blocks(instance, big_m, bk, dropped)
    remap = np.full(m + 1, -1, dtype=np.int64)
    remap[active] = np.arange(len(active))
    for b in blocks:
        b.var = remap[b.var]
    nvars = len(active)
    x = full[active]
    N = sum(b.size for b in blocks)
    c = bk.zeros(nvars)
    c[nvars - 1] = bk.num(1)
    # scale so the main blocks use half the trace budget
    S_tr = sum(np.trace(_assemble(b, x, bk, with_const=False)) for b in blocks[:-1])
    x = x * (BM / (2 * S_tr))
    Z = [bk.array(np.eye(b.size)) for b in blocks]

    history: List[IterationRecord] = []

    def outcome(status, message=""):
        xf = bk.zeros(m + 1)
        xf[active] = x
        y = {a: xf[i] for i, a in enumerate(instance.constraint_monomials)}
        return SolveOutcome(status, y, xf[m], big_m, bk.digits, history, message)

    if kernel is not None:
        # F_s is a combination of moment matrices: s is unbounded below at fixed M
        xf = bk.zeros(m + 1)
        xf[active] = x
        t = (xf[m] + 2 * margin) if xf[m] > 0 else 2 * margin
        xf = xf + t * bk.array(kernel)
        x = xf[active]
        y = {a: xf[i] for i, a in enumerate(instance.constraint_monomials)}
        return SolveOutcome(SolveStatus.CERTIFICATE_CANDIDATE, y, xf[m], big_m, bk.digits, history,
                            "s is unbounded along a direction that leaves M(y, s) fixed")

    for it in range(params.max_iterations):
        S = [_assemble(b, x, bk) for b in blocks]
        try:
            LS = [bk.chol(Sb) for Sb in S]
        except np.linalg.LinAlgError:
            return outcome(SolveStatus.PRECISION_EXHAUSTED, "dual slack lost definiteness")
        Sinv = [bk.chol_inv(L) for L in LS]
        gap = sum(np.sum(Sb * Zb) for Sb, Zb in zip(S, Z))
        mu = gap / N
        AZ = sum(_trace_with(b, Zb, nvars, bk) for b, Zb in zip(blocks, Z))
        r = c - AZ
        rnorm = float(max(abs(v) for v in r))
        g = sum(_trace_with(b, Si, nvars, bk) for b, Si in zip(blocks, Sinv))
        H = sum(_schur(b, Si, Zb, nvars, bk) for b, Si, Zb in zip(blocks, Sinv, Z))
        H = (H + H.T) / 2
        s_now = x[nvars - 1]

        converged = rnorm <= tol and float(gap) <= tol * float(BM)
        if s_now < -margin or (converged and s_now < -noise):
            return outcome(SolveStatus.CERTIFICATE_CANDIDATE)
        if converged:
            return outcome(SolveStatus.NO_CERTIFICATE, "converged with s >= 0 up to working precision")

        LH = _regularized_chol(H, bk)
        if LH is None:
            cond = bk.condition(H)
            if history and history[-1].step_dual < 1e-6:
                return outcome(SolveStatus.PRECISION_EXHAUSTED, f"Schur complement singular (cond {cond:.2e})")
            raise LinearSolveError("Schur complement is not positive definite", cond)

        def direction(target_mu, corr=None):
            rhs = target_mu * g - c
            if corr is not None:
                rhs = rhs - corr
            dx = bk.chol_solve(LH, rhs)
            dS = [_assemble(b, dx, bk, with_const=False) for b in blocks]
            dZ = []
            for idx, (Si, Zb, dSb) in enumerate(zip(Sinv, Z, dS)):
                T = Si @ dSb @ Zb
                if corr is not None:
                    T = T + Si @ corr_terms[idx]
                D = target_mu * Si - Zb - T
                dZ.append((D + D.T) / 2)
            return dx, dS, dZ

        def steps(dS, dZ):
            ap = min([1.0] + [FRACTION_TO_BOUNDARY * _max_step(Zb, dZb, bk) for Zb, dZb in zip(Z, dZ)])
            ad = min([1.0] + [FRACTION_TO_BOUNDARY * _max_step(Sb, dSb, bk, L) for Sb, dSb, L in zip(S, dS, LS)])
            return ap, ad

        corr_terms = None
        dx_a, dS_a, dZ_a = direction(bk.num(0))
        ap, ad = steps(dS_a, dZ_a)
        gap_a = sum(np.sum((Sb + ad * dSb) * (Zb + ap * dZb)) for Sb, dSb, Zb, dZb in zip(S, dS_a, Z, dZ_a))
        sigma = min(1.0, max(0.0, float(gap_a / gap))) ** 3
        corr_terms = [dSb @ dZb for dSb, dZb in zip(dS_a, dZ_a)]
        corr = sum(_trace_with(b, Si @ ct, nvars, bk) for b, Si, ct in zip(blocks, Sinv, corr_terms))
        dx, dS, dZ = direction(sigma * mu, corr)
        ap, ad = steps(dS, dZ)
        # keep the dual objective monotone: never accept a dual step that raises s
        if dx[nvars - 1] > 0:
            ad = 0.0
        x = x + ad * dx
        Z = [Zb + ap * dZb for Zb, dZb in zip(Z, dZ)]
        rec = IterationRecord(it, float(x[nvars - 1]), rnorm, float(gap), float(ap), float(ad))
        history.append(rec)
        if params.verbose:
            log.info(rec.line())
        if ap < 1e-10 and ad < 1e-10:
            return outcome(SolveStatus.PRECISION_EXHAUSTED, "step lengths collapsed")

    raise IterationLimitError(outcome(SolveStatus.PRECISION_EXHAUSTED, "iteration limit"))


def solve_with_escalation(
    instance: SdpInstance,
    params: SolverParams = SolverParams(),
    max_precision_escalations: int = 3,
    escalate_big_m: bool = False,
    max_big_m_doublings: int = 6,
) -> SolveOutcome:
    """Retry at 1.5x the digits on stalls; optionally double big_m on NoCertificateFound."""
    current = params
    doublings = 0
    escalations = 0
    while True:
        try:
            out = solve_big_m(instance, current)
        except (IterationLimitError, LinearSolveError) as exc:
            out = getattr(exc, "outcome", None) or SolveOutcome(
                SolveStatus.PRECISION_EXHAUSTED, {}, 0, current.resolved_big_m(instance), current.precision_digits,
                message=str(exc),
            )
            out.status = SolveStatus.PRECISION_EXHAUSTED
        if out.status is SolveStatus.PRECISION_EXHAUSTED and escalations < max_precision_escalations:
            escalations += 1
            current = replace(current, precision_digits=ceil(current.precision_digits * 3 / 2))
            log.info("stalled; raising working precision to %d digits", current.precision_digits)
            continue
        if (
            out.status is SolveStatus.NO_CERTIFICATE
            and escalate_big_m
            and doublings < max_big_m_doublings
        ):
            doublings += 1
            current = replace(current, big_m=2 * current.resolved_big_m(instance))
            continue
        return out

"""Block SDP data for the Hilbert-Artin feasibility problem.

The primal asks for PSD Gram matrices W1 (numerator, indexed by the numerator
basis B) and W2 (denominator, indexed by the term set T) with

    g * m_B^T W1 m_B - f * m_T^T W2 m_T == 0,      Tr(W2) == 1,

where g == 1 for plain polynomials. Matching the coefficient of every
monomial a gives one constraint ``G[a] . W1 + H[a] . W2 == 0``. The dual
matrices are the moment / localizing matrices of a moment vector y:
``sum_a y_a G[a]`` and ``sum_a y_a H[a]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from .newton import restricted_basis
from .polyring import Exponent, Polynomial, TermSet, add_exp, sorted_grlex, support, terms_up_to

__all__ = [
    "MonomialIndex",
    "ProblemFingerprint",
    "SdpInstance",
    "SupportObstruction",
    "MissingMomentError",
    "assemble_polynomial_instance",
    "assemble_rational_instance",
    "rational_degree",
    "product_monomials",
    "moment_matrix",
    "localizing_matrix",
]

SparseSym = Dict[Tuple[int, int], Fraction]


class MissingMomentError(KeyError):
    """A moment y_a needed by a matrix entry has not been assigned."""

    def __init__(self, alpha):
        self.alpha = alpha
        super().__init__(f"moment vector has no entry for exponent {alpha}")


@dataclass(frozen=True)
class MonomialIndex:
    """Graded-lex ordered labels for the rows/columns of a Gram block."""

    exps: Tuple[Exponent, ...]
    pos: Mapping[Exponent, int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        exps = tuple(sorted_grlex(set(map(tuple, self.exps))))
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "pos", {a: i for i, a in enumerate(exps)})

    @classmethod
    def of(cls, terms) -> "MonomialIndex":
        return cls(tuple(terms))

    def __len__(self):
        return len(self.exps)

    def __iter__(self):
        return iter(self.exps)

    def __getitem__(self, i):
        return self.exps[i]

    def index(self, alpha: Exponent) -> int:
        return self.pos[tuple(alpha)]


@dataclass(frozen=True)
class ProblemFingerprint:
    """Everything needed to rebuild an instance: f, optional g, e, T and the basis rule.

    ``basis`` is ``"newton"`` (Newton-polytope restricted numerator basis) or
    ``"dense"`` (all terms of degree <= d).
    """

    f: Polynomial
    e: int
    T: TermSet
    g: Optional[Polynomial] = None
    basis: str = "newton"
    order: str = "grlex"

    def __post_init__(self):
        if self.basis not in ("newton", "dense"):
            raise ValueError(f"unknown basis rule {self.basis!r}")
        if self.order != "grlex":
            raise ValueError(f"unsupported monomial order {self.order!r}")
        if self.g is not None and self.basis != "dense":
            raise ValueError("rational-function instances use the dense numerator basis")

    @property
    def n(self) -> int:
        return self.f.n


@dataclass(frozen=True)
class SupportObstruction:
    """A monomial reachable on the f side but never on the g side."""

    fingerprint: ProblemFingerprint
    witness: Exponent


@dataclass(frozen=True)
class SdpInstance:
    fingerprint: ProblemFingerprint
    numerator_basis: MonomialIndex
    denominator_basis: MonomialIndex
    constraint_monomials: Tuple[Exponent, ...]
    G: Mapping[Exponent, SparseSym]
    H: Mapping[Exponent, SparseSym]

    @property
    def m(self) -> int:
        return len(self.constraint_monomials)

    @property
    def block_sizes(self) -> Tuple[int, int]:
        return len(self.numerator_basis), len(self.denominator_basis)

    @property
    def trace_row(self) -> SparseSym:
        """The normalization Tr(W2) = 1 as a sparse identity on the denominator block."""
        return {(i, i): Fraction(1) for i in range(len(self.denominator_basis))}

    def multiplier(self) -> Polynomial:
        fp = self.fingerprint
        return fp.g if fp.g is not None else Polynomial.constant(fp.n, 1)

    @staticmethod
    def dense(entries: SparseSym, k: int) -> list[list[Fraction]]:
        out = [[Fraction(0)] * k for _ in range(k)]
        for (i, j), v in entries.items():
            out[i][j] = v
        return out


def _add_entry(mats: Dict[Exponent, SparseSym], alpha: Exponent, i: int, j: int, v) -> None:
    block = mats.setdefault(alpha, {})
    block[(i, j)] = block.get((i, j), Fraction(0)) + v


def _gram_products(
    mult: Polynomial, basis: MonomialIndex, scale: int = 1
) -> Dict[Exponent, SparseSym]:
    """Coefficient matrices of ``scale * mult * m^T W m`` per monomial."""
    mats: Dict[Exponent, SparseSym] = {}
    for gamma, c in mult.items():
        c = scale * c
        for i, a in enumerate(basis):
            ga = add_exp(gamma, a)
            for j, b in enumerate(basis):
                _add_entry(mats, add_exp(ga, b), i, j, c)
    for alpha in list(mats):
        mats[alpha] = {ij: v for ij, v in mats[alpha].items() if v}
        if not mats[alpha]:
            del mats[alpha]
    return mats


def product_monomials(mult: Polynomial, terms) -> set:
    """{gamma + a + b : gamma in supp(mult), a, b in terms}."""
    terms = list(terms)
    pairs = {add_exp(a, b) for a in terms for b in terms}
    return {add_exp(gamma, p) for gamma in support(mult) for p in pairs}


def _build(fp: ProblemFingerprint, num_basis: MonomialIndex) -> SdpInstance:
    den_basis = MonomialIndex.of(fp.T)
    mult = fp.g if fp.g is not None else Polynomial.constant(fp.n, 1)
    G = _gram_products(mult, num_basis)
    H = _gram_products(fp.f, den_basis, scale=-1)
    monos = tuple(sorted_grlex(set(G) | set(H)))
    return SdpInstance(
        fingerprint=fp,
        numerator_basis=num_basis,
        denominator_basis=den_basis,
        constraint_monomials=monos,
        G={a: G.get(a, {}) for a in monos},
        H={a: H.get(a, {}) for a in monos},
    )


def _check_inputs(f: Polynomial, T: TermSet) -> None:
    if f.is_zero():
        raise ValueError("f must be a nonzero polynomial")
    if not T:
        raise ValueError("denominator term set must be nonempty")
    if T.n != f.n:
        raise ValueError(f"term set has {T.n} variables, f has {f.n}")


def assemble_polynomial_instance(
    f: Polynomial, T: TermSet, use_sparsity: bool = True, e: Optional[int] = None
) -> SdpInstance:
    _check_inputs(f, T)
    e = T.max_degree() if e is None else e
    if T.max_degree() > e:
        raise ValueError(f"term set contains terms of degree > {e}")
    fp = ProblemFingerprint(f=f, e=e, T=T, basis="newton" if use_sparsity else "dense")
    return _build(fp, numerator_basis(fp))


def rational_degree(f: Polynomial, g: Polynomial, e: int) -> int:
    """Numerator degree bound e + max(0, ceil((deg f - deg g) / 2))."""
    return e + max(0, ceil((f.degree() - g.degree()) / 2))


def numerator_basis(fp: ProblemFingerprint) -> MonomialIndex:
    """Numerator basis implied by a fingerprint; recomputed from scratch each call."""
    t_deg = fp.T.max_degree()
    if fp.g is not None:
        return MonomialIndex.of(terms_up_to(fp.n, rational_degree(fp.f, fp.g, t_deg)))
    if fp.basis == "newton":
        return MonomialIndex.of(restricted_basis(fp.f, fp.T))
    return MonomialIndex.of(terms_up_to(fp.n, t_deg + ceil(fp.f.degree() / 2)))


def support_sets(fp: ProblemFingerprint) -> Tuple[set, set]:
    """The two product-monomial sets (g side, f side) of a rational-function problem."""
    mult = fp.g if fp.g is not None else Polynomial.constant(fp.n, 1)
    return product_monomials(mult, numerator_basis(fp)), product_monomials(fp.f, fp.T)


def assemble_rational_instance(
    f: Polynomial, g: Polynomial, T: TermSet, e: Optional[int] = None
) -> Union[SdpInstance, SupportObstruction]:
    """Instance for f/g, or a SupportObstruction when the g side cannot reach an f-side monomial.

    g must be nonnegative on R^n; this is not checked.
    """
    _check_inputs(f, T)
    if g.is_zero():
        raise ValueError("g must be a nonzero polynomial")
    if g.n != f.n:
        raise ValueError("f and g have different variable counts")
    e = T.max_degree() if e is None else e
    if T.max_degree() > e:
        raise ValueError(f"term set contains terms of degree > {e}")
    fp = ProblemFingerprint(f=f, g=g, e=e, T=T, basis="dense")
    gamma1, gamma2 = support_sets(fp)
    missing = gamma2 - gamma1
    if missing:
        return SupportObstruction(fp, sorted_grlex(missing)[0])
    return _build(fp, numerator_basis(fp))


def _moment(y: Mapping[Exponent, object], alpha: Exponent):
    try:
        return y[alpha]
    except KeyError:
        raise MissingMomentError(alpha) from None


def moment_matrix(y: Mapping[Exponent, object], basis: Sequence[Exponent]) -> list[list]:
    """Entry (i, j) is y[basis[i] + basis[j]]."""
    basis = list(basis)
    k = len(basis)
    out = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            out[i][j] = out[j][i] = _moment(y, add_exp(basis[i], basis[j]))
    return out


def localizing_matrix(
    q: Polynomial, y: Mapping[Exponent, object], basis: Sequence[Exponent]
) -> list[list]:
    """Entry (i, j) is sum_g q_g * y[g + basis[i] + basis[j]]."""
    basis = list(basis)
    k = len(basis)
    out = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            ab = add_exp(basis[i], basis[j])
            total = Fraction(0)
            for gamma, c in q.items():
                total += c * _moment(y, add_exp(gamma, ab))
            out[i][j] = out[j][i] = total
    return out

"""Newton-polytope reduction of the numerator monomial basis.

A monomial x^a can appear in a square u^2 of an identity
``sum u_i^2 = f * sum v_j^2`` only if 2a lies in the convex hull of the
points ``b + c1 + c2`` with b in supp(f) and c1, c2 in the denominator term
set. Membership is decided exactly with a rational phase-one simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

from .polyring import Polynomial, TermSet, add_exp, support, terms_up_to

__all__ = ["HullQuery", "hull_membership", "hull_generators", "restricted_basis", "basis_degree"]


@dataclass(frozen=True)
class HullQuery:
    generators: tuple
    point: tuple

    def __post_init__(self):
        gens = tuple(tuple(Fraction(c) for c in g) for g in self.generators)
        point = tuple(Fraction(c) for c in self.point)
        if not gens:
            raise ValueError("hull query needs at least one generator")
        dim = len(point)
        for g in gens:
            if len(g) != dim:
                raise ValueError(f"generator {g} has dimension {len(g)}, point has {dim}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "point", point)


def _phase_one_feasible(A: list[list[Fraction]], b: list[Fraction]) -> bool:
    """Is {x >= 0 : A x = b} nonempty?  Tableau phase one with Bland's rule."""
    rows, cols = len(A), len(A[0])
    # make rhs nonnegative, then append one artificial per row
    tab = []
    for i in range(rows):
        sgn = -1 if b[i] < 0 else 1
        row = [sgn * a for a in A[i]] + [Fraction(int(j == i)) for j in range(rows)]
        row.append(sgn * b[i])
        tab.append(row)
    basis = [cols + i for i in range(rows)]
    width = cols + rows
    # reduced costs of the phase-one objective (sum of artificials)
    cost = [Fraction(0)] * (width + 1)
    for row in tab:
        for j in range(cols):
            cost[j] -= row[j]
        cost[width] -= row[width]

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        leaving, best = None, None
        for i in range(rows):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    leaving, best = i, ratio
        if leaving is None:
            # phase one is bounded below by zero, so this cannot happen
            raise ArithmeticError("unbounded phase-one problem")
        prow = tab[leaving]
        piv = prow[entering]
        if piv != 1:
            prow = [v / piv for v in prow]
            tab[leaving] = prow
        for i in range(rows):
            if i != leaving:
                factor = tab[i][entering]
                if factor:
                    tab[i] = [v - factor * p for v, p in zip(tab[i], prow)]
        factor = cost[entering]
        cost = [v - factor * p for v, p in zip(cost, prow)]
        basis[leaving] = entering
    return cost[width] == 0


def hull_membership(q: HullQuery) -> bool:
    """True iff ``q.point`` is a convex combination of ``q.generators`` (exact)."""
    gens, point = q.generators, q.point
    dim = len(point)
    unique = list(dict.fromkeys(gens))
    if len(unique) == 1:
        return unique[0] == point
    if point in unique:
        return True
    for k in range(dim):
        coords = [g[k] for g in unique]
        if not min(coords) <= point[k] <= max(coords):
            return False
    A = [[g[k] for g in unique] for k in range(dim)]
    A.append([Fraction(1)] * len(unique))
    b = list(point) + [Fraction(1)]
    return _phase_one_feasible(A, b)


def hull_generators(f: Polynomial, T: TermSet) -> list[tuple]:
    """Distinct points b + c1 + c2 over supp(f) x T x T."""
    pair_sums = {add_exp(c1, c2) for c1 in T for c2 in T}
    return sorted({add_exp(b, c) for b in support(f) for c in pair_sums})


def basis_degree(f: Polynomial, e: int) -> int:
    """d = ceil(e + deg(f)/2)."""
    return e + ceil(f.degree() / 2)


def restricted_basis(f: Polynomial, T: TermSet) -> TermSet:
    """Candidate numerator terms {a : 2a in conv(supp(f) + T + T)}."""
    if f.is_zero():
        raise ValueError("restricted basis of the zero polynomial is undefined")
    if not T:
        raise ValueError("denominator term set is empty")
    if T.n != f.n:
        raise ValueError("term set and polynomial have different variable counts")
    gens = hull_generators(f, T)
    lo = [min(g[k] for g in gens) for k in range(f.n)]
    hi = [max(g[k] for g in gens) for k in range(f.n)]
    deg_lo = min(sum(g) for g in gens)
    deg_hi = max(sum(g) for g in gens)
    d = basis_degree(f, T.max_degree())
    keep = []
    for alpha in terms_up_to(f.n, d):
        doubled = tuple(2 * a for a in alpha)
        if not deg_lo <= sum(doubled) <= deg_hi:
            continue
        if any(not lo[k] <= doubled[k] <= hi[k] for k in range(f.n)):
            continue
        if hull_membership(HullQuery(gens, doubled)):
            keep.append(alpha)
    return TermSet(f.n, keep)

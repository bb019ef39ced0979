"""Exact sparse multivariate polynomials over the rationals.

Exponent vectors are plain tuples of nonnegative ints. All coefficients are
:class:`fractions.Fraction`; floats never enter this module.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Iterator, Mapping, Tuple

Exponent = Tuple[int, ...]

__all__ = [
    "Exponent",
    "Polynomial",
    "TermSet",
    "PolynomialSyntaxError",
    "grlex_key",
    "sorted_grlex",
    "parse_polynomial",
    "support",
    "terms_up_to",
    "power_sum",
    "ess_polynomial",
    "motzkin",
    "illposed",
]


def grlex_key(alpha: Exponent) -> tuple:
    """Sort key for graded lexicographic order (x1 > x2 > ... within a degree)."""
    return (sum(alpha), alpha)


def sorted_grlex(exps: Iterable[Exponent]) -> list[Exponent]:
    return sorted(exps, key=grlex_key)


def add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(i + j for i, j in zip(a, b))


class PolynomialSyntaxError(ValueError):
    """Raised by :func:`parse_polynomial`; ``pos`` is a 0-based column."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class TermSet(frozenset):
    """A frozen set of exponent vectors sharing one length ``n``."""

    def __new__(cls, n: int, members: Iterable[Exponent] = ()):
        members = [tuple(int(a) for a in m) for m in members]
        for m in members:
            if len(m) != n:
                raise ValueError(f"exponent {m} does not have length {n}")
            if any(a < 0 for a in m):
                raise ValueError(f"negative entry in exponent {m}")
        self = super().__new__(cls, members)
        self.n = n
        return self

    def __reduce__(self):
        return (TermSet, (self.n, list(self)))

    def sorted(self) -> list[Exponent]:
        return sorted_grlex(self)

    def max_degree(self) -> int:
        return max((sum(m) for m in self), default=-1)

    def __repr__(self):
        return f"TermSet(n={self.n}, {self.sorted()!r})"


class Polynomial:
    """Immutable sparse polynomial in ``n`` variables with rational coefficients."""

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | None = None):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        clean: Dict[Exponent, Fraction] = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n:
                raise ValueError(f"exponent {alpha} does not have length {n}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative entry in exponent {alpha}")
            c = Fraction(c)
            if c:
                clean[alpha] = clean.get(alpha, Fraction(0)) + c
                if not clean[alpha]:
                    del clean[alpha]
        self._n = n
        self._terms = clean
        self._hash = None

    # -- construction helpers
    @classmethod
    def constant(cls, n: int, c) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        """The variable x_i, 1-based."""
        if not 1 <= i <= n:
            raise ValueError(f"variable index {i} out of range 1..{n}")
        alpha = [0] * n
        alpha[i - 1] = 1
        return cls(n, {tuple(alpha): 1})

    @classmethod
    def _raw(cls, n: int, terms: Dict[Exponent, Fraction]) -> "Polynomial":
        p = cls.__new__(cls)
        p._n = n
        p._terms = terms
        p._hash = None
        return p

    # -- accessors
    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, alpha: Exponent) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    # -- arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other._n != self._n:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self._n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for a, c in other._terms.items():
            v = out.get(a, 0) + c
            if v:
                out[a] = v
            else:
                out.pop(a, None)
        return Polynomial._raw(self._n, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self._n, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Fraction] = {}
        for a, c in self._terms.items():
            for b, d in other._terms.items():
                k = add_exp(a, b)
                out[k] = out.get(k, 0) + c * d
        return Polynomial._raw(self._n, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        result = Polynomial.constant(self._n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._n == other._n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self._n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, *point):
        """Evaluate at a point; exact when the point is rational."""
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        if len(point) != self._n:
            raise ValueError(f"expected {self._n} coordinates, got {len(point)}")
        total = 0
        for alpha, c in self._terms.items():
            term = c
            for x, a in zip(point, alpha):
                if a:
                    term = term * x**a
            total = total + term
        return total

    # -- text
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for alpha in reversed(sorted_grlex(self._terms)):
            c = self._terms[alpha]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = [
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}"
                for i, a in enumerate(alpha)
                if a
            ]
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = to_text

    def __repr__(self):
        return f"Polynomial({self._n}, {self.to_text()!r})"


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>x(?P<idx>\d+))|(?P<op>[-+*^])|(?P<bad>\S))"
)


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse ``text`` such as ``"3/2*x1^2*x2 - x3 + 1"`` into a Polynomial in n variables."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastgroup)
        if m.group("bad") is not None:
            ch = m.group("bad")
            if ch == "." or ch in "eE":
                raise PolynomialSyntaxError(
                    "non-rational coefficient (use integers or p/q)", text, start
                )
            raise PolynomialSyntaxError(f"unexpected character {ch!r}", text, start)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), start))
        elif m.group("var") is not None:
            idx = int(m.group("idx"))
            if not 1 <= idx <= n:
                raise PolynomialSyntaxError(
                    f"variable x{idx} outside x1..x{n}", text, start
                )
            tokens.append(("var", idx, start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))

    i = 0

    def peek():
        return tokens[i]

    def take(kind, value=None):
        nonlocal i
        tok = tokens[i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise PolynomialSyntaxError(f"unexpected {what}", text, tok[2])
        i += 1
        return tok

    def factor(alpha):
        _, idx, _ = take("var")
        exp = 1
        if peek()[:2] == ("op", "^"):
            take("op", "^")
            tok = take("num")
            if "/" in tok[1]:
                raise PolynomialSyntaxError("exponent must be an integer", text, tok[2])
            exp = int(tok[1])
        alpha[idx - 1] += exp

    terms: Dict[Exponent, Fraction] = {}
    first = True
    while True:
        sign = 1
        tok = peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            take("op")
        elif not first:
            raise PolynomialSyntaxError("expected '+' or '-'", text, tok[2])
        first = False
        coef = Fraction(1)
        alpha = [0] * n
        tok = peek()
        if tok[0] == "num":
            take("num")
            num, _, den = tok[1].partition("/")
            if den and int(den) == 0:
                raise PolynomialSyntaxError("zero denominator", text, tok[2])
            coef = Fraction(int(num), int(den) if den else 1)
            if peek()[:2] == ("op", "*"):
                take("op", "*")
                factor(alpha)
            elif peek()[0] == "var":
                factor(alpha)
        else:
            factor(alpha)
        while peek()[:2] == ("op", "*"):
            take("op", "*")
            factor(alpha)
        key = tuple(alpha)
        terms[key] = terms.get(key, 0) + sign * coef
        if peek()[0] == "end":
            break
    return Polynomial(n, terms)


def support(f: Polynomial) -> TermSet:
    return TermSet(f.n, f.terms.keys())


def _compositions(n: int, total: int) -> Iterator[Exponent]:
    """All exponent vectors of length n with coordinate sum exactly ``total``."""
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest


def terms_up_to(n: int, e: int) -> TermSet:
    if n < 1 or e < 0:
        raise ValueError("need n >= 1 and e >= 0")
    out = TermSet(n, itertools.chain.from_iterable(_compositions(n, t) for t in range(e + 1)))
    assert len(out) == comb(n + e, e)
    return out


def power_sum(n: int, r: int) -> Polynomial:
    terms = {}
    for i in range(n):
        alpha = [0] * n
        alpha[i] = r
        terms[tuple(alpha)] = 1
    return Polynomial(n, terms)


def ess_polynomial(n: int, k: int) -> Polynomial:
    """Even symmetric sextic f_{n,k} built from the power sums M_{n,2}, M_{n,4}, M_{n,6}."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not 0 <= k <= n - 1:
        raise ValueError(f"need 0 <= k <= n-1, got k={k} for n={n}")
    m2, m4, m6 = power_sum(n, 2), power_sum(n, 4), power_sum(n, 6)
    if k == 0:
        return -n * m6 + (n + 1) * m2 * m4 - m2**3
    return (k * k + k) * m6 - (2 * k + 1) * m2 * m4 + m2**3


def motzkin() -> Polynomial:
    return parse_polynomial("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", 2)


def illposed(eps) -> Polynomial:
    """(1 - eps^2) x1^2 + x2^2 - 2 x1 x2, exact for rational eps."""
    eps = Fraction(eps)
    return Polynomial(2, {(2, 0): 1 - eps * eps, (0, 2): 1, (1, 1): -2})

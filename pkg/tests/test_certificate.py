from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rsoscert.certificate import Certificate, CertificateFormatError, dumps, format_rational, loads, parse_rational
from rsoscert.polyring import TermSet, illposed, motzkin, parse_polynomial, terms_up_to
from rsoscert.sdpbuild import ProblemFingerprint

from conftest import EPS, ILLPOSED_Y, MOTZKIN_Y

ONE2 = TermSet(2, [(0, 0)])


def test_format_rational():
    assert format_rational(Fraction(300)) == "+300/1"
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(Fraction(0)) == "+0/1"


@pytest.mark.parametrize("bad", ["3/1", "+6/4", "+1", "+a/2", "+1/0", "", "-1/-2"])
def test_parse_rational_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_motzkin_roundtrip(motzkin_cert):
    text = dumps(motzkin_cert)
    assert "terms all-terms-deg<=e" in text
    assert "y 2 2 +300/1" in text
    again = loads(text)
    assert again == motzkin_cert
    assert dumps(again) == text


def test_illposed_roundtrip_keeps_big_rationals():
    cert = Certificate(ProblemFingerprint(f=illposed(EPS), e=0, T=ONE2), y_hat=ILLPOSED_Y, provenance={"solver_digits": "45"})
    text = dumps(cert)
    assert "y 2 0 +46635362642387337096986/1731626131338905851065" in text
    again = loads(text)
    assert again.y_hat == ILLPOSED_Y and again.provenance == {"solver_digits": "45"}
    assert dumps(again) == text


def test_explicit_terms_and_denominator_roundtrip():
    T = TermSet(2, [(0, 0), (1, 0)])
    fp = ProblemFingerprint(f=motzkin(), g=parse_polynomial("x1^2 + 1", 2), e=1, T=T, basis="dense")
    cert = Certificate(fp, y_hat={(0, 0): Fraction(1, 3)})
    text = dumps(cert)
    assert "terms explicit" in text and "t 1 0" in text and "g x1^2 + 1" in text
    assert loads(text) == cert


def test_obstruction_roundtrip():
    fp = ProblemFingerprint(f=parse_polynomial("x1", 2), g=parse_polynomial("x2^2", 2), e=0, T=ONE2, basis="dense")
    cert = Certificate(fp, witness=(1, 0))
    text = dumps(cert)
    assert "kind support-obstruction" in text and "witness 1 0" in text
    assert loads(text) == cert


def test_exactly_one_payload():
    fp = ProblemFingerprint(f=motzkin(), e=0, T=ONE2)
    with pytest.raises(ValueError):
        Certificate(fp)
    with pytest.raises(ValueError):
        Certificate(fp, y_hat={}, witness=(0, 0))


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 6), st.integers(0, 6)),
                       st.fractions(min_value=-10**9, max_value=10**9, max_denominator=10**12), max_size=15),
       st.sampled_from([0, 1, 2]))
def test_roundtrip_random(y, e):
    fp = ProblemFingerprint(f=motzkin(), e=e, T=terms_up_to(2, e))
    cert = Certificate(fp, y_hat=y)
    text = dumps(cert)
    assert loads(text) == cert
    assert dumps(loads(text)) == text


def _mutate(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


@pytest.mark.parametrize(
    "mutation, message",
    [
        (lambda t: t[: t.rindex("end")], "truncated"),
        (lambda t: _mutate(t, "rsoscert-certificate 1", "rsoscert-certificate 9"), "header"),
        (lambda t: _mutate(t, "y 2 2 +300/1", "y 2 2 +600/2"), "lowest terms"),
        (lambda t: _mutate(t, "y 2 2 +300/1", "y 2 2 300/1"), "explicit sign"),
        (lambda t: _mutate(t, "y 2 2 +300/1", "y 2 2 2 +300/1"), "exponents"),
        (lambda t: _mutate(t, "y 2 2 +300/1", "y 2 2 +300/1\ny 2 2 +1/1"), "duplicate"),
        (lambda t: _mutate(t, "order grlex\n", ""), "missing key"),
        (lambda t: _mutate(t, "kind moments", "kind banana"), "kind"),
        (lambda t: _mutate(t, "f x1^4", "f 0.5*x1^4"), "non-rational"),
        (lambda t: _mutate(t, "n 2", "n two"), "integers"),
        (lambda t: _mutate(t, "basis newton", "basis fancy"), "basis"),
        (lambda t: _mutate(t, "kind moments", "kind moments\nwitness 1 0"), "witness"),
        (lambda t: _mutate(t, "order grlex", "order grlex\ncolour blue"), "unknown key"),
    ],
)
def test_parse_errors(motzkin_cert, mutation, message):
    with pytest.raises(CertificateFormatError, match=message):
        loads(mutation(dumps(motzkin_cert)))

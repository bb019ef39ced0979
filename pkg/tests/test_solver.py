from fractions import Fraction

import mpmath
import pytest

from rsoscert.polyring import Polynomial, TermSet, ess_polynomial, illposed, motzkin, parse_polynomial, terms_up_to
from rsoscert.sdpbuild import assemble_polynomial_instance, assemble_rational_instance, localizing_matrix
from rsoscert.solver import (
    IterationLimitError,
    SolverParams,
    SolveStatus,
    default_big_m,
    gaussian_moment,
    normalization,
    solve_big_m,
    solve_with_escalation,
    strictly_feasible_point,
)
from rsoscert.verify import ldl_pivoted

ONE2 = TermSet(2, [(0, 0)])
EPS = Fraction(1, 10**8)


def inst(text_or_poly, n=2, e=0):
    f = parse_polynomial(text_or_poly, n) if isinstance(text_or_poly, str) else text_or_poly
    return assemble_polynomial_instance(f, terms_up_to(f.n, e))


CORPUS = {
    "motzkin": (lambda c: assemble_polynomial_instance(c * motzkin(), ONE2), SolveStatus.CERTIFICATE_CANDIDATE),
    "sos": (lambda c: inst(c * parse_polynomial("x1^2 + x2^2", 2)), SolveStatus.NO_CERTIFICATE),
    "square": (lambda c: inst(c * parse_polynomial("x1^2 - 2*x1*x2 + x2^2", 2)), SolveStatus.NO_CERTIFICATE),
    "f31": (lambda c: inst(c * ess_polynomial(3, 1)), SolveStatus.NO_CERTIFICATE),
    "rational motzkin": (
        lambda c: assemble_rational_instance(c * motzkin(), parse_polynomial("x1^2 + 1", 2), terms_up_to(2, 1)),
        SolveStatus.CERTIFICATE_CANDIDATE,
    ),
}


def test_motzkin_candidate():
    out = solve_big_m(assemble_polynomial_instance(motzkin(), ONE2))
    assert out.status is SolveStatus.CERTIFICATE_CANDIDATE
    assert out.s < 0


def test_sos_no_certificate():
    out = solve_big_m(inst("x1^2 + x2^2"))
    assert out.status is SolveStatus.NO_CERTIFICATE


def test_illposed_at_45_digits():
    out = solve_big_m(assemble_polynomial_instance(illposed(EPS), ONE2), SolverParams(precision_digits=45))
    assert out.status is SolveStatus.CERTIFICATE_CANDIDATE
    assert out.digits == 45
    assert isinstance(out.s, mpmath.mpf)


def _lmi_matrices(instance, y, s, normalized=False):
    cg, cf = normalization(instance) if normalized else (1, 1)
    num = localizing_matrix(instance.multiplier() * Fraction(1, cg), y, instance.numerator_basis)
    den = localizing_matrix(instance.fingerprint.f * Fraction(-1, cf), y, instance.denominator_basis)
    den = [[v + (s if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(den)]
    return num, den


@pytest.mark.parametrize("name", ["motzkin", "rational motzkin"])
def test_candidate_postconditions(name):
    instance = CORPUS[name][0](1)
    out = solve_big_m(instance)
    assert out.status is SolveStatus.CERTIFICATE_CANDIDATE
    y = {a: mpmath.mpf(v) for a, v in out.y.items()}
    num, den = _lmi_matrices(instance, y, mpmath.mpf(out.s), normalized=True)
    scale = float(out.big_m)
    for M in (num, den):
        lam = min(mpmath.eigsy(mpmath.matrix(M))[0])
        assert lam >= -1e-9 * scale
    trace = sum(num[i][i] for i in range(len(num))) + sum(den[i][i] for i in range(len(den)))
    assert trace <= out.big_m * (1 + 1e-9)
    assert out.s < -float(SolverParams().negativity_margin) * scale
    assert out.dual_residual <= SolverParams().feasibility_tolerance


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_dual_objective_monotone(name):
    out = solve_big_m(CORPUS[name][0](1))
    values = [r.s for r in out.log]
    assert all(b <= a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("factor", [Fraction(1, 7), Fraction(3), Fraction(1000)])
@pytest.mark.parametrize("name", sorted(CORPUS))
def test_scaling_keeps_status(name, factor):
    build, expected = CORPUS[name]
    assert solve_big_m(build(factor)).status is expected


def test_small_big_m_still_finds_candidate():
    instance = assemble_polynomial_instance(motzkin(), ONE2)
    out = solve_with_escalation(instance, SolverParams(big_m=Fraction(1)), escalate_big_m=True)
    assert out.status is SolveStatus.CERTIFICATE_CANDIDATE


def test_escalation_on_corpus_positives():
    for name in ("motzkin", "rational motzkin"):
        out = solve_with_escalation(CORPUS[name][0](1), SolverParams(big_m=Fraction(1, 100)), escalate_big_m=True)
        assert out.status is SolveStatus.CERTIFICATE_CANDIDATE


def test_big_m_escalation_on_inconclusive_input_doubles():
    out = solve_with_escalation(inst("x1^2 + x2^2"), SolverParams(big_m=Fraction(10)), escalate_big_m=True,
                                max_big_m_doublings=2)
    assert out.status is SolveStatus.NO_CERTIFICATE
    assert out.big_m == 40


def test_default_big_m():
    assert default_big_m(motzkin()) == 4 * 10**6
    assert default_big_m(parse_polynomial("1/2*x1", 1)) == Fraction(3, 2) * 10**6


def test_iteration_limit():
    with pytest.raises(IterationLimitError) as info:
        solve_big_m(inst("x1^2 + x2^2"), SolverParams(max_iterations=1))
    assert info.value.outcome.status is SolveStatus.PRECISION_EXHAUSTED


@pytest.mark.parametrize("kwargs", [dict(big_m=Fraction(0)), dict(negativity_margin=Fraction(0)),
                                    dict(precision_digits=8)])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        SolverParams(**kwargs)


def test_deterministic():
    a = solve_big_m(CORPUS["rational motzkin"][0](1))
    b = solve_big_m(CORPUS["rational motzkin"][0](1))
    assert a.y == b.y and a.s == b.s


def test_verbose_log_lines(caplog):
    caplog.set_level("INFO", logger="rsoscert.solver")
    out = solve_big_m(inst("x1^2 + x2^2"), SolverParams(verbose=True))
    lines = [r.getMessage() for r in caplog.records if r.name == "rsoscert.solver"]
    assert len(lines) == len(out.log)
    assert lines[0].startswith("iter=0 s=")


def test_gaussian_moments():
    assert [gaussian_moment((k,)) for k in range(7)] == [1, 0, 1, 0, 3, 0, 15]
    assert gaussian_moment((2, 4)) == 3


def test_strict_point_univariate():
    instance = assemble_polynomial_instance(parse_polynomial("x1^2", 1), TermSet(1, [(0,)]), use_sparsity=False)
    y, s = strictly_feasible_point(instance)
    assert [y[(0,)], y[(1,)], y[(2,)]] == [1, 0, 1]
    num, _ = _lmi_matrices(instance, y, s)
    assert num == [[1, 0], [0, 1]]


def test_strict_point_constant():
    instance = assemble_polynomial_instance(Polynomial.constant(2, 5), ONE2)
    y, s = strictly_feasible_point(instance)
    assert -5 * y[(0, 0)] + s > 0


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_strict_point_exactly_positive_definite(name):
    instance = CORPUS[name][0](1)
    y, s = strictly_feasible_point(instance)
    assert all(isinstance(v, Fraction) for v in y.values())
    for M in _lmi_matrices(instance, y, s):
        _, failed, _ = ldl_pivoted(M)
        assert failed is None

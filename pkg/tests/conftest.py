from fractions import Fraction

import pytest

from rsoscert.polyring import TermSet, motzkin

EPS = Fraction(1, 10**8)

# ŷ published for the Motzkin polynomial: only the (2,2) moment is nonzero
MOTZKIN_Y = {
    (0, 0): 0, (1, 1): 0, (1, 2): 0, (2, 1): 0, (2, 2): 300,
    (3, 2): 0, (2, 3): 0, (4, 2): 0, (3, 3): 0, (2, 4): 0,
}

# ŷ published for f_eps with eps = 1e-8, computed at 45 digits
ILLPOSED_Y = {
    (2, 0): Fraction(46635362642387337096986, 1731626131338905851065),
    (1, 1): Fraction(53470001073377890290267, 1985404333861113854675),
    (0, 2): Fraction(19926414238854847715525, 739891310902398542446),
}


@pytest.fixture
def one2():
    return TermSet(2, [(0, 0)])


@pytest.fixture
def motzkin_cert():
    from rsoscert.certificate import Certificate
    from rsoscert.sdpbuild import ProblemFingerprint

    fp = ProblemFingerprint(f=motzkin(), e=0, T=TermSet(2, [(0, 0)]))
    return Certificate(fp, y_hat=dict(MOTZKIN_Y))

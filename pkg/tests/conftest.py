import random
from fractions import Fraction

import pytest

from esc.family import FamilySpec, Pmf, bernoulli_pmf

DYADIC_P = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8))


@pytest.fixture
def dyadic_pmf():
    return Pmf(2, DYADIC_P)


@pytest.fixture
def dyadic_family(dyadic_pmf):
    return FamilySpec.explicit([dyadic_pmf])


def two_bernoulli(n):
    return FamilySpec.explicit([bernoulli_pmf(n, Fraction(1, 4)), bernoulli_pmf(n, Fraction(3, 4))])


def random_family(rng: random.Random, max_n=6, max_members=8) -> FamilySpec:
    """Explicit family with strictly positive rational members."""
    n = rng.randint(1, max_n)
    members = []
    for _ in range(rng.randint(1, max_members)):
        w = [rng.randint(1, 40) for _ in range(1 << n)]
        total = sum(w)
        members.append(Pmf(n, [Fraction(x, total) for x in w]))
    return FamilySpec.explicit(members)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

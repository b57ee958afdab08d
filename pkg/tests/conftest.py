from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from liegerm import RingCtx, Variety, parse_field, parse_poly
from liegerm.poly import Poly, VField

R2 = RingCtx(("x", "y"))
R3 = RingCtx(("x", "y", "z"))

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, tuple[str, bool]] = {}


def P(text: str, ring: RingCtx = R2) -> Poly:
    return parse_poly(text, ring)


def F(text: str, ring: RingCtx = R2) -> VField:
    return parse_field(text, ring)


def V(ring: RingCtx, *gens: str) -> Variety:
    return Variety.of(ring, [parse_poly(g, ring) for g in gens])


CORPUS = {
    "hyperplane": (R2, "x"),
    "node": (R2, "x*y"),
    "cusp": (R2, "y^2 - x^3"),
    "cone": (R3, "x^2 + y^2 + z^2"),
    "umbrella": (R3, "x^2 - y^2*z"),
    "cross": (R3, "x*y*z"),
}


@pytest.fixture(params=list(CORPUS))
def corpus_item(request):
    ring, f = CORPUS[request.param]
    return request.param, V(ring, f)


def polys(ring: RingCtx, max_deg: int = 3, max_terms: int = 4, coeff: int = 5):
    mono = st.tuples(*[st.integers(0, max_deg)] * ring.n).filter(lambda e: sum(e) <= max_deg)
    c = st.fractions(min_value=-coeff, max_value=coeff, max_denominator=3)
    return st.dictionaries(mono, c, max_size=max_terms).map(lambda d: Poly(ring, d))


def fields(ring: RingCtx, **kw):
    return st.lists(polys(ring, **kw), min_size=ring.n, max_size=ring.n).map(lambda cs: VField(ring, cs))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    num, title = mark.args
    prev = ACCEPTANCE_LINES.get(num, (title, True))
    ACCEPTANCE_LINES[num] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            title, ok = ACCEPTANCE_LINES[num]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {title}")

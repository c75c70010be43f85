from fractions import Fraction

from hypothesis import strategies as st

from tensorhull.exactpoly import DyadicPiecewisePoly

small_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=16)


@st.composite
def dyadic_polys(draw, max_level=4, max_pieces=4, max_degree=3):
    k = draw(st.integers(1, max_level))
    n = 1 << k
    inner = draw(st.sets(st.integers(1, n - 1), max_size=max_pieces - 1))
    bps = [Fraction(0)] + [Fraction(j, n) for j in sorted(inner)] + [Fraction(1)]
    pieces = [tuple(draw(st.lists(small_fracs, max_size=max_degree + 1))) for _ in bps[:-1]]
    return DyadicPiecewisePoly(tuple(bps), tuple(pieces))


# --- acceptance summary: one line per criterion ------------------------------

import pytest  # noqa: E402

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        number, title = marker.args
        _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL", getattr(item, "detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[number]
        line = f"criterion {number:>2} {status}: {title}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)

import pytest

from ubrep import ball_enumerate, full_ball, parse_group

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, name, ok, detail=""):
        _CRITERIA.append((number, name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_CRITERIA, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {name}  {detail}")


@pytest.fixture(scope="session")
def z1():
    return parse_group("z:1")


@pytest.fixture(scope="session")
def z2():
    return parse_group("z:2")


@pytest.fixture(scope="session")
def f2():
    return parse_group("free:2")


@pytest.fixture(scope="session")
def c24_ball():
    return full_ball(parse_group("cyclic:24"))


@pytest.fixture(scope="session")
def torus16_ball():
    return full_ball(parse_group("torus:16,2"))


@pytest.fixture(scope="session")
def f2_ball4(f2):
    return ball_enumerate(f2, 4)

"""End-to-end acceptance checks, one test per criterion at its stated tolerance.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line; the lines are also
collected and repeated in the terminal summary.
"""
import pytest

from triangle_cyclicity import checks as ck

SUMMARY = []


@pytest.fixture(scope="module")
def tolerances():
    return ck.tolerances_from_env()


@pytest.mark.parametrize("key", list(ck.CHECKS), ids=[f"{k}-{ck.CHECKS[k].__name__[6:]}" for k in ck.CHECKS])
def test_acceptance(key, tolerances):
    result = ck.CHECKS[key](tolerances)
    SUMMARY.append(result.line())
    for note in result.notes:
        SUMMARY.append(f"       note: {note}")
    print(result.line())
    failing = [f"{p.name}: {p.value!r} vs {p.limit!r}" for p in result.parts if not p.passed]
    assert result.passed, "; ".join(failing)

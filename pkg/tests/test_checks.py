import math

import pytest

from triangle_cyclicity import checks as ck


def test_tolerances_from_env():
    tol = ck.tolerances_from_env({"TRIANGLE_TOL_W_SEPARATRIX": "0.5", "OTHER": "1"})
    assert tol["w_separatrix"] == 0.5
    assert tol["pf_residual"] == ck.TOLERANCES["pf_residual"]
    with pytest.raises(ValueError):
        ck.tolerances_from_env({"TRIANGLE_TOL_PF_RESIDUAL": "0"})
    with pytest.raises(ValueError):
        ck.tolerances_from_env({"TRIANGLE_TOL_PF_RESIDUAL": "x"})


def test_finite_difference_stencils_are_exact_on_polynomials():
    f = lambda x: x ** 4 - 2 * x ** 3 + x
    assert ck._fd1(f, 0.7, 1e-2) == pytest.approx(4 * 0.7 ** 3 - 6 * 0.7 ** 2 + 1, rel=1e-11)
    g = lambda x: x ** 6 - 2 * x ** 3
    assert ck._fd3(g, 0.7, 1e-2) == pytest.approx(120 * 0.7 ** 3 - 12, rel=1e-10)
    assert ck._fd3(lambda x: x ** 3, 0.3, 1e-1) == pytest.approx(6.0, rel=1e-12)


def test_check_line_format():
    r = ck.CheckResult("C0", "demo", "x = x", [ck.Part("a", True, 1.0, 2.0), ck.Part("b", False, 3.0, 2.0)], 0.0, [])
    assert not r.passed
    assert r.line().startswith("[FAIL] C0 demo")
    assert "b" in r.line()
    d = r.as_dict()
    assert d["anchor"] == "x = x" and d["parts"][1]["passed"] is False


def test_discrepancy_count_mismatch():
    assert ck._discrepancy([-1.0], [-1.0, -2.0]) == math.inf
    # detected levels are sorted before matching the increasing targets
    assert ck._discrepancy([-1.1, -2.0], [-2.0, -1.0]) == pytest.approx(0.1)

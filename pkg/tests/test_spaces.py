import math

import numpy as np
import pytest
from scipy.optimize import brentq

from symspace import families, spaces
from symspace.stepfn import StepFunction, decreasing_rearrangement, inner
from symspace.spaces import (
    ORLICZ_G,
    ORLICZ_L1,
    ORLICZ_M,
    PHI,
    PSI,
    SQRT,
    OrliczFunction,
    convexify2_norm,
    equivalence_ratio,
    fundamental_function,
    get_norm,
    kfunctional_mphi_linfty,
    lorentz_norm,
    lpq_norms,
    marcinkiewicz_norm,
    orlicz_containment_gate,
    orlicz_norm,
    phi_derivative,
)


def chi(t):
    return StepFunction.indicator(0.0, t, 1.0)


# -- weights ----------------------------------------------------------------------


def test_weights_closed_forms():
    t = np.geomspace(1e-9, 1.0, 50)
    np.testing.assert_allclose(PSI(t), 1.0 / (1.0 - np.log(t)), rtol=1e-15)
    np.testing.assert_allclose(PHI(t), t * (1.0 - np.log(t)), rtol=1e-15)
    np.testing.assert_allclose(PSI(t) * PHI(t), t, rtol=1e-14)
    assert PSI(3.0) == 3.0 and PHI(3.0) == 1.0
    assert PSI(0.0) == 0.0 and PHI(0.0) == 0.0
    assert math.isclose(PSI(math.exp(-1.0)), 0.5)


def test_psi_inverse_round_trip():
    t = np.geomspace(1e-12, 5.0, 40)
    np.testing.assert_allclose(PSI.inverse(PSI(t)), t, rtol=1e-12)


def test_phi_derivative_matches_finite_differences():
    t = np.linspace(0.01, 0.99, 100)
    h = 1e-6
    fd = (PHI(t + h) - PHI(t - h)) / (2 * h)
    np.testing.assert_allclose(phi_derivative(t), fd, atol=1e-6)


def test_phi_derivative_orlicz_norm_tends_to_two():
    # int G(log(1/t) / lam) = lam / (lam - 1) - 1 equals 1 at lam = 2; cell
    # averages of log(1/t) are minorants in the Jensen sense, so the norms rise to 2
    norms = []
    for m in (100, 200, 400):
        b = np.concatenate(([0.0], np.geomspace(1e-14, 1.0, m + 1)))
        anti = PHI(b)
        f = StepFunction(b, np.diff(anti) / np.diff(b))
        norms.append(orlicz_norm(f, ORLICZ_G))
    assert norms[0] <= norms[1] <= norms[2] <= 2.0 + 1e-12
    assert abs(norms[-1] - 2.0) < 1e-3
    assert abs(norms[-1] - norms[-2]) < 0.01 * norms[-1]


# -- Lorentz and Marcinkiewicz ----------------------------------------------------


def test_lorentz_examples():
    for t in (1e-6, 0.1, 0.5, 1.0):
        assert math.isclose(lorentz_norm(chi(t), PSI), PSI(t), rel_tol=1e-14)
    assert math.isclose(lorentz_norm(chi(math.exp(-1.0)), PSI), 0.5, rel_tol=1e-14)
    assert lorentz_norm(StepFunction.zero(), PSI) == 0.0
    f = StepFunction([0, 0.1, 0.5, 1.0], [2.0, 1.0, 0.0])
    want = 2 * PHI(0.1) + (PHI(0.5) - PHI(0.1))
    assert math.isclose(lorentz_norm(f, PHI), want, rel_tol=1e-14)


def test_marcinkiewicz_examples_against_grid_max():
    s = np.geomspace(1e-12, 1.0, 200001)
    for t0 in (1e-4, 0.05, 0.3, 0.9, 1.0):
        grid = float(np.max(np.minimum(s, t0) / PSI(s)))
        got = marcinkiewicz_norm(chi(t0), PSI)
        assert math.isclose(got, PHI(t0), rel_tol=1e-13)
        assert got >= grid * (1 - 1e-12)
        assert got - grid < 1e-4 * got
    assert math.isclose(marcinkiewicz_norm(StepFunction.constant(1.0), PSI), 1.0)
    assert marcinkiewicz_norm(StepFunction.zero(), PSI) == 0.0


def test_marcinkiewicz_interior_peaks_against_grid():
    rng = np.random.default_rng(3)
    s = np.geomspace(1e-10, 2.0, 400001)
    for _ in range(20):
        f = families.random_step(rng, 8, L=2.0)
        mu = decreasing_rearrangement(f)
        for w in (PSI, PHI, SQRT):
            grid = float(np.max(mu.cumulative(s) / w(s)))
            got = marcinkiewicz_norm(f, w)
            assert grid <= got * (1 + 1e-12)
            assert got - grid <= 1e-5 * got


def test_lorentz_marcinkiewicz_duality():
    rng = np.random.default_rng(4)
    for _ in range(200):
        f = families.random_step(rng, 15)
        g = families.random_step(rng, 15)
        lhs = inner(abs(f), abs(g))
        assert lhs <= lorentz_norm(f, PSI) * marcinkiewicz_norm(g, PSI) * (1 + 1e-12)


def test_marcinkiewicz_lorentz_sandwich():
    # Lambda_psi has fundamental function psi; its Marcinkiewicz partner uses t / psi = phi
    rng = np.random.default_rng(5)
    for _ in range(200):
        f = families.random_step(rng, 15)
        assert marcinkiewicz_norm(f, PHI) <= lorentz_norm(f, PSI) * (1 + 1e-12)


# -- Orlicz -----------------------------------------------------------------------


def test_orlicz_indicator_identity():
    for t0 in (1e-8, 1e-3, 0.2, 0.7, 1.0):
        inv = brentq(lambda v: v * math.log(math.e + v) - 1.0 / t0, 0.0, 2.0 / t0 + 2.0, xtol=1e-300, rtol=1e-15)
        assert math.isclose(orlicz_norm(chi(t0), ORLICZ_M), 1.0 / inv, rel_tol=1e-12)
        assert math.isclose(orlicz_norm(chi(t0), ORLICZ_G), 1.0 / math.log1p(1.0 / t0), rel_tol=1e-12)
        assert math.isclose(orlicz_norm(chi(t0), ORLICZ_L1), t0, rel_tol=1e-12)
    assert orlicz_norm(StepFunction.zero(), ORLICZ_M) == 0.0


def test_orlicz_norm_has_unit_modular():
    rng = np.random.default_rng(6)
    for _ in range(20):
        f = families.random_step(rng, 10)
        lam = orlicz_norm(f, ORLICZ_M)
        assert math.isclose(spaces.modular(f, ORLICZ_M, lam), 1.0, rel_tol=1e-9)


def test_orlicz_inverse():
    y = np.geomspace(1e-6, 1e6, 30)
    np.testing.assert_allclose(ORLICZ_G(ORLICZ_G.inverse(y)), y, rtol=1e-12)
    np.testing.assert_allclose(ORLICZ_G.inverse(y), np.log1p(y), rtol=1e-12)
    assert ORLICZ_M.inverse(0.0) == 0.0


def test_orlicz_from_csv(tmp_path):
    t = np.linspace(0.0, 50.0, 2001)
    path = tmp_path / "N.csv"
    path.write_text("t,N(t)\n" + "\n".join(f"{a:.17g},{b:.17g}" for a, b in zip(t, t * np.log(np.e + t))))
    N = OrliczFunction.from_csv(path)
    N.check_convex()
    f = families.random_step(np.random.default_rng(7), 10)
    assert math.isclose(orlicz_norm(f, N), orlicz_norm(f, ORLICZ_M), rel_tol=1e-3)
    assert math.isclose(get_norm(f"orlicz:file={path}")(f), orlicz_norm(f, N))
    bad = tmp_path / "bad.csv"
    bad.write_text("t,N(t)\n0,0\n1,2\n2,3\n")
    with pytest.raises(ValueError, match="convex"):
        OrliczFunction.from_csv(bad)


def test_check_convex_rejects():
    with pytest.raises(ValueError, match="convex"):
        OrliczFunction("sqrt", np.sqrt).check_convex()
    with pytest.raises(ValueError, match="vanish"):
        OrliczFunction("shift", lambda t: t + 1.0).check_convex()


# -- L_{2,1}, L_{2,inf} and derived norms -----------------------------------------


def test_lpq_examples():
    n = lpq_norms(StepFunction.constant(1.0))
    assert math.isclose(n.l21, 1.0) and math.isclose(n.l2inf, 1.0)
    n = lpq_norms(StepFunction.zero())
    assert n == (0.0, 0.0, 0.0)
    x = families.power_approximant(-0.5, 400)
    # sup t^{-1/2} int_0^t s^{-1/2} ds = 2 for the minorant's limit
    assert 1.95 < lpq_norms(x).l2inf <= 2.0


def test_convexification_examples():
    assert math.isclose(convexify2_norm(StepFunction.constant(1.0), "lambda:psi"), 1.0)
    f = StepFunction.indicator(0.0, math.exp(-1.0), 1.0, height=2.0)
    assert math.isclose(convexify2_norm(f, "lambda:psi"), math.sqrt(2.0), rel_tol=1e-14)


def test_fundamental_functions():
    for t in (1e-5, 0.2, 1.0):
        assert math.isclose(fundamental_function("lambda:psi", t), PSI(t), rel_tol=1e-14)
        assert math.isclose(fundamental_function("marc:psi", t), PHI(t), rel_tol=1e-13)
        assert math.isclose(fundamental_function("orlicz:G", t), 1.0 / math.log1p(1.0 / t), rel_tol=1e-12)
    with pytest.raises(ValueError):
        fundamental_function("lambda:psi", 0.0)
    with pytest.raises(ValueError):
        fundamental_function("lambda:psi", 1.5)


def test_get_norm_rejects_unknown():
    with pytest.raises(ValueError):
        get_norm("lambda:nope")
    with pytest.raises(ValueError):
        get_norm("orlicz:Q")
    with pytest.raises(ValueError):
        get_norm("frobenius")


# -- K-functional -----------------------------------------------------------------


def test_kfunctional_zero_and_domain():
    k = kfunctional_mphi_linfty(0.5, StepFunction.zero())
    assert k.upper == 0.0 and k.paper_lower == 0.0
    with pytest.raises(ValueError):
        kfunctional_mphi_linfty(1.0, StepFunction.constant(1.0))
    with pytest.raises(ValueError):
        kfunctional_mphi_linfty(np.array([0.5, 0.0]), StepFunction.constant(1.0))


def test_kfunctional_bracket_and_trivial_decompositions():
    rng = np.random.default_rng(8)
    ts = np.linspace(0.01, 0.99, 25)
    for _ in range(30):
        x = families.random_decreasing(rng, 15)
        k = kfunctional_mphi_linfty(ts, x)
        assert np.all(k.paper_lower <= k.upper)
        # x = x + 0 and x = 0 + x
        assert np.all(k.upper <= marcinkiewicz_norm(x, PHI) + 1e-15)
        assert np.all(k.upper <= ts * x.lp_norm(math.inf) * (1 + 1e-15))
        scalar = kfunctional_mphi_linfty(float(ts[3]), x)
        assert math.isclose(scalar.upper, k.upper[3]) and math.isclose(scalar.paper_lower, k.paper_lower[3])


# -- gate and equivalence ---------------------------------------------------------


def test_orlicz_gate():
    m = orlicz_containment_gate(ORLICZ_M)
    assert m.contained_in_Mpsi and m.dominates_M and m.c_prime >= 1.0 - 1e-12
    l1 = orlicz_containment_gate(ORLICZ_L1)
    assert not l1.contained_in_Mpsi
    assert l1.c_N_refined > 1.5 * l1.c_N
    g = orlicz_containment_gate(ORLICZ_G)
    assert g.contained_in_Mpsi and g.dominates_M
    with pytest.raises(ValueError):
        orlicz_containment_gate(OrliczFunction("sqrt", np.sqrt))


def test_equivalence_ratio():
    family = [chi(t) for t in np.geomspace(1e-8, 1.0, 60)] + [StepFunction.zero()]
    band = equivalence_ratio("marc:phi", "orlicz:G", family)
    assert 0 < band.min_ratio <= band.max_ratio < 10
    same = equivalence_ratio("lambda:psi", "lambda:psi", family)
    assert same == (1.0, 1.0)
    with pytest.raises(ValueError):
        equivalence_ratio("l1", "l2", [StepFunction.zero()])

"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured figures.
Run ``pytest tests/test_acceptance.py -v -s`` to see them, or execute this
file directly for a compact table.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from symspace import euclid, families, hardy, spaces, suites, torus
from symspace.stepfn import StepFunction

pytestmark = pytest.mark.acceptance


def _report(number: int, ok: bool, detail: str, elapsed: float, budget: float) -> bool:
    in_time = elapsed < budget
    verdict = "PASS" if ok and in_time else "FAIL"
    print(f"criterion {number:2d}: {verdict}  {detail}  [{elapsed:.2f}s / {budget:g}s]")
    return ok and in_time


def criterion_1() -> bool:
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    hs_err = abs(hardy.hs_norm_T() - math.sqrt(2.0))
    worst = -math.inf
    for _ in range(100):
        x = families.random_step(rng, int(rng.integers(1, 30)))
        worst = max(worst, hardy.l2_norm_T(x) / (math.sqrt(2.0) * x.lp_norm(2)))
    ok = hs_err <= 1e-10 and worst <= 1.0
    return _report(1, ok, f"|HS - sqrt2| = {hs_err:.1e}, max ||Tx||/(sqrt2 ||x||) = {worst:.4f}",
                   time.perf_counter() - start, 1.0)


def criterion_2() -> bool:
    start = time.perf_counter()
    t = hardy.log_grid(1000, 1e-6)
    chi_err = float(np.max(np.abs(hardy.apply_T(StepFunction.constant(1.0), t) - (2.0 - np.sqrt(t)))))
    target = np.log(math.e**2 / t)
    errs = []
    for m in (100, 200, 400, 800):
        tx = hardy.apply_T(families.power_approximant(-0.5, m), t)
        errs.append(float(np.max(np.abs(tx - target))))
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    ok = chi_err <= 1e-12 and all(abs(r / 2.0 - 1.0) <= 0.2 for r in ratios)
    return _report(2, ok, f"T chi err = {chi_err:.1e}, error ratios per doubling = "
                   + ", ".join(f"{r:.3f}" for r in ratios), time.perf_counter() - start, 2.0)


def criterion_3() -> bool:
    start = time.perf_counter()
    out = suites.run_suite("extremizer", suites.Options(trials=500, seed=3, tol=1e-9))
    fails = sum(c.status != "pass" for c in out.cases)
    worst = min(c.parameters["pointwise_margin"] for c in out.cases)
    ratio = max(c.lhs / c.rhs for c in out.cases if c.rhs > 0)
    ok = fails == 0 and len(out.cases) == 500
    return _report(3, ok, f"{fails} failures / {len(out.cases)}, max ||x||/bound = {ratio:.3f}, "
                   f"min pointwise margin = {worst:.3e}", time.perf_counter() - start, 30.0)


def criterion_4() -> bool:
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    ws = [families.random_indicator(rng) for _ in range(100)]
    ws += [families.random_step(rng, int(rng.integers(1, 30)), signed=False) for _ in range(100)]
    bound_fails = 0
    for w in ws:
        v = hardy.sup_cesaro_claim(w)
        bound_fails += v.lhs > v.rhs
    # closed form as printed, against the computed left side
    us = np.linspace(0.38, 0.98, 25)
    gaps = [abs(hardy.sup_cesaro_claim(StepFunction.indicator(0.0, float(u), 1.0)).lhs
                - hardy.cesaro_indicator_paper_form(float(u))) for u in us]
    gap = max(gaps)
    ok = bound_fails == 0 and gap <= 1e-9
    return _report(4, ok, f"bound violations = {bound_fails} / {len(ws)}, "
                   f"max |lhs - printed closed form| on u in (1/e, 1) = {gap:.3e}",
                   time.perf_counter() - start, 10.0)


def criterion_5() -> bool:
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    ts = np.linspace(0.01, 0.99, 50)
    violations = 0
    for _ in range(200):
        k = spaces.kfunctional_mphi_linfty(ts, families.random_decreasing(rng, int(rng.integers(1, 30))))
        violations += int(np.sum(k.paper_lower > k.upper))
    return _report(5, violations == 0, f"violations = {violations} / {200 * ts.size}",
                   time.perf_counter() - start, 10.0)


def criterion_6() -> bool:
    start = time.perf_counter()
    r = np.geomspace(1e-3, 20.0, 1000)
    k_err = float(np.max(np.abs(euclid.bessel_K(0.5, r) / (np.sqrt(np.pi / (2 * r)) * np.exp(-r)) - 1.0)))
    mass_err = max(abs(euclid.MacdonaldKernel(d).mass_within(1e6) - 1.0) for d in (1, 2, 3, 4))
    lower = [euclid.kernel_lower_constant(d) for d in (1, 2, 3, 4)]
    ok = k_err <= 1e-8 and mass_err <= 1e-6 and min(lower) > 0
    return _report(6, ok, f"K_1/2 rel err = {k_err:.1e}, |int g - 1| = {mass_err:.1e}, lower constants = "
                   + ", ".join(f"{c:.4f}" for c in lower), time.perf_counter() - start, 5.0)


def criterion_7() -> bool:
    start = time.perf_counter()
    statuses = []
    margins = []
    for name in ("oneil", "sobolev"):
        for d, n, trials in ((1, 2**14, 20), (2, 512, 10)):
            out = suites.run_suite(name, suites.Options(d=d, n=n, L=16.0, trials=trials, seed=7))
            statuses += [c.status for c in out.cases]
            margins += [c.margin for c in out.cases]
    fails = sum(s == "fail" for s in statuses)
    unsettled = sum(s == "inconclusive" for s in statuses)
    ok = fails == 0 and unsettled == 0 and len(statuses) == 60
    return _report(7, ok, f"{fails} failures, {unsettled} unstable of {len(statuses)}, "
                   f"min margin = {min(margins):.3f}", time.perf_counter() - start, 120.0)


def criterion_8() -> bool:
    start = time.perf_counter()
    statuses, margins = [], []
    for d in (1, 2):
        out = suites.run_suite("from-below", suites.Options(d=d, seed=8))
        statuses += [c.status for c in out.cases]
        margins += [c.margin for c in out.cases]
    fails = sum(s != "pass" for s in statuses)
    ok = fails == 0 and len(statuses) == 10
    return _report(8, ok, f"{fails} non-passing of {len(statuses)} (d = 1, 2), min margin = {min(margins):.3f}",
                   time.perf_counter() - start, 60.0)


def criterion_9() -> bool:
    start = time.perf_counter()
    rng = np.random.default_rng(9)
    unit = torus.cwikel_norm(torus.TorusField.constant(1, 64), 0.25).norm
    unit2 = torus.cwikel_norm(torus.TorusField.constant(2, 32), 0.5).norm
    unit_err = max(abs(unit - 1.0), abs(unit2 - 1.0))
    dense_err, trivial_ok = 0.0, True
    for _ in range(20):
        f = torus.TorusField(1, rng.uniform(0.0, 1.0, 64) ** rng.uniform(1, 4))
        got = torus.cwikel_norm(f, 0.25).norm
        want = float(np.max(np.abs(np.linalg.eigvalsh(torus.dense_cwikel_matrix(f, 0.25)))))
        dense_err = max(dense_err, abs(got - want) / want)
        trivial_ok &= got >= f.integral() * (1 - 1e-9)
    out = suites.run_suite("postcritical", suites.Options(d=1, n=4096, trials=50, seed=9))
    post_fails = sum(c.status != "pass" for c in out.cases)
    trivial_ok &= all(c.lhs >= c.parameters["h_l1"] * (1 - 1e-9) for c in out.cases if "h_l1" in c.parameters)
    lattice_err = abs(torus.lattice_sum_d1_infinite() - math.pi / math.tanh(math.pi))
    ok = unit_err <= 1e-9 and dense_err <= 1e-8 and trivial_ok and post_fails == 0 and lattice_err <= 1e-6
    return _report(9, ok, f"|norm(1) - 1| = {unit_err:.1e}, dense rel err = {dense_err:.1e}, "
                   f"postcritical failures = {post_fails} / {len(out.cases)}, lattice err = {lattice_err:.1e}",
                   time.perf_counter() - start, 60.0)


def criterion_10() -> bool:
    start = time.perf_counter()
    family = suites.invphi_family(10)
    up = torus.upper_ratio_suite(family, 1, 4096)
    lo = torus.lower_ratio_suite(family, 1, 4096)
    trivial = all(r.norm >= r.l1 * (1 - 1e-8) for r in up.rows + up.rows_refined + lo.rows + lo.rows_refined)
    ok = (math.isfinite(up.value) and lo.value > 0 and up.drift < 0.10 and lo.drift < 0.10 and trivial)
    return _report(10, ok, f"upper max = {up.value:.4f} (drift {up.drift:.2%}), "
                   f"lower min = {lo.value:.4f} (drift {lo.drift:.2%})", time.perf_counter() - start, 120.0)


def criterion_11() -> bool:
    start = time.perf_counter()
    m = spaces.orlicz_containment_gate(spaces.ORLICZ_M)
    l1 = spaces.orlicz_containment_gate(spaces.ORLICZ_L1)
    g = spaces.orlicz_containment_gate(spaces.ORLICZ_G)
    ok = (m.contained_in_Mpsi and m.dominates_M and not l1.contained_in_Mpsi
          and l1.c_N_refined > l1.c_N and g.contained_in_Mpsi and g.dominates_M)
    return _report(11, ok, f"M: c_N={m.c_N:.4f}, c'={m.c_prime:.3f}; t: sup {l1.c_N:.1f} -> {l1.c_N_refined:.1f}; "
                   f"G: c_N={g.c_N:.4f}, c'={g.c_prime:.3f}", time.perf_counter() - start, 5.0)


def criterion_12() -> bool:
    start = time.perf_counter()
    rng = np.random.default_rng(12)
    violations = 0
    for norm_id in suites.NORM_IDS:
        for case in suites.norm_axiom_cases(norm_id, rng, 500, 1e-10):
            violations += case.parameters["violations"]
    return _report(12, violations == 0, f"violations = {violations} over {len(suites.NORM_IDS)} norms x 500 cases",
                   time.perf_counter() - start, 30.0)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1:02d}" for i in range(len(CRITERIA))])
def test_acceptance(criterion, capsys):
    with capsys.disabled():
        print()
        ok = criterion()
    assert ok


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)} / {len(results)} criteria pass")

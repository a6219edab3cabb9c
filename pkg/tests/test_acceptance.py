"""The twelve acceptance criteria, each at its stated size and tolerance.

Every test records one PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``conftest.py``) and when this file is executed
directly.
"""

import math
import time

import numpy as np
import pytest

from hallmhd import checks
from hallmhd import diagnostics as dg
from hallmhd import spectral as sp
from hallmhd.experiments import (ScenarioConfig, inequality_probe, log_sobolev_ensemble,
                                 relative_divergence, run_scenario)
from hallmhd.timestepper import StepControl

RESULTS = {}


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title} ({detail})"
    RESULTS[number] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def random_run():
    t0 = time.perf_counter()
    res = checks.energy_and_divergence(n=32, T=1.0, amplitude=0.5, seed=0, m=3)
    return res, time.perf_counter() - t0


def test_01_energy_inequality(random_run):
    res, elapsed = random_run
    rep = dg.energy_budget(res.measured["records"])
    ok = rep.min_deficit_rel >= -1e-6 and elapsed < 60
    report(1, "energy inequality", ok,
           f"min deficit {rep.min_deficit_rel:.2e} relative, {res.measured['steps']} steps, {elapsed:.1f} s")


def test_02_divergence(random_run):
    res, _ = random_run
    wu, wb = relative_divergence(res.measured["records"])
    report(2, "divergence propagation", max(wu, wb) <= 1e-12,
           f"worst div/linf u {wu:.2e}, B {wb:.2e}")


def test_03_hall_antisymmetry():
    t0 = time.perf_counter()
    res = checks.hall_antisymmetry(n=32, count=100, seed=0, tol=1e-12)
    elapsed = time.perf_counter() - t0
    report(3, "Hall antisymmetry", res.passed and elapsed < 30,
           f"worst |<H(B),B>|/|B|_H1^2 {res.measured['worst_ratio']:.2e}, {elapsed:.1f} s")


def test_04_exact_decay():
    runs = [checks.exact_decay(n=32, dt=0.01), checks.exact_decay(n=16, dt=0.003)]
    worst = max(max(r.measured.values()) for r in runs)
    report(4, "exact linear decay", all(r.passed for r in runs) and worst <= 1e-12,
           f"worst relative error {worst:.2e} at dt 0.01 and 0.003")


def test_05_temporal_order():
    res = checks.temporal_order(n=16, h=0.005, T=0.2, threshold=3.5)
    errs = ", ".join(f"{e:.2e}" for e in res.measured["errors"])
    report(5, "temporal order", res.passed, f"observed order {res.measured['order']:.3f}; errors {errs}")


def test_06_small_data_monotone():
    t0 = time.perf_counter()
    c = ScenarioConfig("small_data_global", n=32, m=3, amplitude=1e-3,
                       control=StepControl(t_end=5.0))
    v = run_scenario(c)
    elapsed = time.perf_counter() - t0
    report(6, "small-data monotone decay", v.passed and elapsed < 120,
           f"criteria {sorted(k for k, ok in v.criteria.items() if ok)}, {elapsed:.1f} s")


def test_07_mollifier_consistency():
    c = ScenarioConfig("mollifier_convergence", n=16, family="beltrami+single_mode_b", amplitude=1.0,
                       eps_list=(0.2, 0.1, 0.05), control=StepControl(t_end=0.5))
    v = run_scenario(c)
    devs = v.measured["deviation_by_eps"]
    vals = [devs[e] for e in (0.2, 0.1, 0.05)]
    ok = v.passed and vals[0] > vals[1] > vals[2]
    report(7, "mollifier consistency", ok,
           "deviations " + ", ".join(f"eps {e}: {d:.3e}" for e, d in zip((0.2, 0.1, 0.05), vals)))


def test_08_blowup_functionals():
    c_hat = {}
    samples = {}
    for n in (16, 32):
        c = ScenarioConfig("blowup_monitor", n=n, family="taylor_green", amplitude=0.2,
                           control=StepControl(dt_max=0.005, t_end=1.0))
        v = run_scenario(c)
        assert v.passed, v.violations
        c_hat[n], samples[n] = v.measured["c_hat"], v.measured["samples"]
    ratio = max(c_hat.values()) / min(c_hat.values())
    ok = all(np.isfinite(list(c_hat.values()))) and ratio <= 4 and min(samples.values()) >= 200
    report(8, "A/X stable across grids", ok,
           f"max A/X n=16 {c_hat[16]:.4f}, n=32 {c_hat[32]:.4f}, ratio {ratio:.3f}, "
           f"samples {samples[16]}/{samples[32]}")


def test_09_lemma_brute_force():
    t0 = time.perf_counter()
    res = checks.lemma_cases(count=100, seed=0)
    elapsed = time.perf_counter() - t0
    report(9, "comparison lemma", res.passed and elapsed < 10,
           f"{res.measured['failures']} failures in 100 cases, max excess {res.measured['max_excess']:.1e}, "
           f"{elapsed:.1f} s")


def test_10_generalized_regression():
    res = checks.generalized_regression(n=32, T=0.1, tol=1e-12)
    report(10, "generalized Hall regression", res.passed,
           f"worst relative difference {res.measured['worst_rel']:.2e} over {res.measured['samples']} samples")


def test_11_liouville():
    main = ScenarioConfig("liouville_decay", n=32, amplitude=0.5, seed=0,
                          control=StepControl(t_end=20.0, dt_max=0.05, record_every=10))
    ensemble = ScenarioConfig("liouville_decay", n=16, amplitude=0.5, seeds=(1, 2, 3),
                              control=StepControl(t_end=20.0, dt_max=0.05, record_every=10))
    verdicts = [run_scenario(main), run_scenario(ensemble)]
    r0 = verdicts[0].measured["initial_residual_seed0"]
    r1 = verdicts[0].measured["final_residual_seed0"]
    ok = all(v.passed for v in verdicts)
    report(11, "Liouville decay", ok,
           f"n=32 residual ratios {r1[0] / r0[0]:.1e}, {r1[1] / r0[1]:.1e}; "
           f"seeds 1-3 at n=16 {'pass' if verdicts[1].passed else 'fail'}")


def test_12_log_sobolev_probe():
    g = sp.get_grid(32)
    stats = inequality_probe(log_sobolev_ensemble(g, 500, seed=0, amp_range=(1e-2, 1e2)), g, 3)
    slope = stats.large_amp_slope
    ok = math.isfinite(stats.max_ratio) and slope is not None and abs(slope) <= 0.1
    report(12, "log-Sobolev probe", ok,
           f"max r {stats.max_ratio:.4f}, mean r {stats.mean_ratio:.4f}, "
           f"slope of log r vs log amplitude (amplitude >= 10) {slope:.4f}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))

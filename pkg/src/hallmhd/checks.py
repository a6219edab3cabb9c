"""Self-contained invariant checks shared by ``hallmhd check`` and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from . import spectral as sp
from .experiments import (DIV_TOL_REL, integrate, lemma_ode_check, make_initial,
                          random_lemma_case, relative_divergence)
from .model import PhysParams, State, hall_term
from .timestepper import StepControl, step


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        detail = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<22} {detail}"


def _short(v):
    return f"{v:.3e}" if isinstance(v, float) else str(v)


def energy_and_divergence(n=32, T=1.0, amplitude=0.5, seed=0, m=3) -> CheckResult:
    g = sp.get_grid(n)
    s0 = make_initial("random_band_limited", amplitude, seed, g)
    run = integrate(s0, PhysParams(), StepControl(t_end=T), m)
    rep = dg.energy_budget(run.records)
    wu, wb = relative_divergence(run.records)
    ok = not rep.violated and wu <= DIV_TOL_REL and wb <= DIV_TOL_REL
    return CheckResult("energy_divergence", ok, {
        "min_deficit_rel": rep.min_deficit_rel, "div_u_rel": wu, "div_b_rel": wb,
        "steps": run.steps, "records": run.records})


def hall_antisymmetry(n=32, count=100, seed=0, tol=1e-12) -> CheckResult:
    """|<hall_term(B), B>| against ||B||_{H^1}^2 over random solenoidal B."""
    g = sp.get_grid(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        kmax = rng.uniform(1.0, g.kcut * math.sqrt(3.0))
        b = sp.leray_project(sp.real_random(g, rng, kmax, (3,)), g)
        b *= float(np.exp(rng.uniform(np.log(1e-2), np.log(1e2)))) / sp.l2_norm(b, g)
        ratio = abs(sp.inner(hall_term(b, g), b, g)) / dg.sobolev_norm(b, g, 1) ** 2
        worst = max(worst, ratio)
    return CheckResult("hall_antisymmetry", worst <= tol, {"worst_ratio": worst, "samples": count})


def exact_decay(n=32, dt=0.01, T=1.0, amplitude=1.0, tol=1e-12) -> CheckResult:
    """Single-mode B and Beltrami u decay as exp(-k^2 t) with k = 1."""
    g = sp.get_grid(n)
    p = PhysParams(nu=1.0, eta=1.0)
    errs = {}
    for fam in ("single_mode_b", "beltrami"):
        s = make_initial(fam, amplitude, 0, g)
        s0 = s.copy()
        while s.t < T - 1e-12:
            s = step(s, min(dt, T - s.t), p)
        decay = math.exp(-T)
        err = math.hypot(sp.l2_norm(s.u - decay * s0.u, g), sp.l2_norm(s.b - decay * s0.b, g))
        errs[fam] = err / math.hypot(sp.l2_norm(s0.u, g), sp.l2_norm(s0.b, g))
    return CheckResult("exact_decay", max(errs.values()) <= tol,
                       {f"rel_err_{k}": v for k, v in errs.items()})


def _fixed_run(s: State, p: PhysParams, dt: float, T: float) -> State:
    nsteps = int(round(T / dt))
    for _ in range(nsteps):
        s = step(s, dt, p)
    return s


def temporal_order(n=16, h=0.005, T=0.2, amplitude=0.5, seed=1, threshold=3.5) -> CheckResult:
    """Observed order from dt = 4h, 2h, h against a dt = h/8 reference."""
    g = sp.get_grid(n)
    p = PhysParams()
    s0 = make_initial("random_band_limited", amplitude, seed, g)
    ref = _fixed_run(s0, p, h / 8, T)
    dts = [4 * h, 2 * h, h]
    errs = []
    for dt in dts:
        s = _fixed_run(s0, p, dt, T)
        errs.append(math.hypot(sp.l2_norm(s.u - ref.u, g), sp.l2_norm(s.b - ref.b, g)))
    order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    return CheckResult("temporal_order", order >= threshold, {"order": order, "errors": errs})


def generalized_regression(n=32, T=0.2, amplitude=0.5, seed=0, tol=1e-12, m=3) -> CheckResult:
    """(alpha, beta) = (0, 2) against the full solver with u held at zero."""
    g = sp.get_grid(n)
    b = make_initial("random_band_limited", amplitude, seed, g).b
    c = StepControl(t_end=T)
    out = {}
    for model in ("hall", "generalized"):
        p = PhysParams(model=model, alpha=0.0, beta=2.0)
        snaps = []
        integrate(State(np.zeros_like(b), b.copy()), p, c, m,
                  on_step=lambda s, k, du, db: snaps.append((s.t, s.b.copy())))
        out[model] = snaps
    worst = 0.0
    same_times = len(out["hall"]) == len(out["generalized"])
    for (ta, ba), (tb, bb) in zip(out["hall"], out["generalized"]):
        same_times &= ta == tb
        worst = max(worst, sp.l2_norm(ba - bb, g) / sp.l2_norm(ba, g))
    return CheckResult("generalized_regression", same_times and worst <= tol,
                       {"worst_rel": worst, "samples": len(out["hall"])})


def lemma_cases(count=100, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    fails, worst = 0, -math.inf
    for _ in range(count):
        a, x0, y0, prof = random_lemma_case(rng)
        res = lemma_ode_check(a, x0, y0, prof)
        fails += res.status != "pass"
        worst = max(worst, res.max_excess)
    return CheckResult("lemma_bound", fails == 0, {"failures": fails, "max_excess": worst})


def quick_suite() -> list[CheckResult]:
    """Reduced-size versions of the acceptance properties, for ``hallmhd check``."""
    results = [
        hall_antisymmetry(n=16, count=20),
        exact_decay(n=16),
        temporal_order(n=16),
        generalized_regression(n=16, T=0.1),
        lemma_cases(count=20),
        energy_and_divergence(n=16, T=0.2),
    ]
    results[-1].measured.pop("records", None)
    return results

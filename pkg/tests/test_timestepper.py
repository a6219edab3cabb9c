import math

import numpy as np
import pytest
from scipy.integrate import quad

from hallmhd import checks
from hallmhd import spectral as sp
from hallmhd.diagnostics import energy
from hallmhd.experiments import make_initial
from hallmhd.model import PhysParams, State, nonlinear_terms
from hallmhd.timestepper import (InstabilityError, StepControl, _psi, advance,
                                 dissipation_increment, stable_dt, step)


def single_mode_b(g, amp=1.0):
    return make_initial("single_mode_b", amp, 0, g)


class TestStepControl:
    @pytest.mark.parametrize("kw", [{"dt_max": 0}, {"cfl_advective": -1}, {"cfl_hall": 0},
                                    {"t_end": -1}, {"record_every": 0}])
    def test_rejected(self, kw):
        with pytest.raises(ValueError):
            StepControl(**kw)


class TestStableDt:
    def test_rest_state(self, g16):
        c = StepControl(dt_max=0.03)
        assert stable_dt(State.zeros(g16), PhysParams(), c) == 0.03

    def test_hall_limited(self, g32):
        c = StepControl(dt_max=10.0, cfl_advective=0.5, cfl_hall=0.2)
        assert stable_dt(single_mode_b(g32), PhysParams(), c) == pytest.approx(0.002, rel=1e-12)

    def test_grid_scaling(self, g16, g32):
        adv = StepControl(dt_max=10.0, cfl_hall=1e9)
        hall = StepControl(dt_max=10.0, cfl_advective=1e9)
        p = PhysParams()
        r_adv = stable_dt(single_mode_b(g16), p, adv) / stable_dt(single_mode_b(g32), p, adv)
        r_hall = stable_dt(single_mode_b(g16), p, hall) / stable_dt(single_mode_b(g32), p, hall)
        assert r_adv == pytest.approx(2.0) and r_hall == pytest.approx(4.0)

    def test_generalized_exponent(self, g32):
        c = StepControl(dt_max=10.0, cfl_advective=1e9, cfl_hall=0.2)
        p = PhysParams(model="generalized", alpha=1.0, beta=3.0)
        assert stable_dt(single_mode_b(g32), p, c) == pytest.approx(0.2 / 1000)


class TestStep:
    @pytest.mark.parametrize("family,params", [
        ("single_mode_b", PhysParams(eta=2.0)),
        ("beltrami", PhysParams(nu=2.0)),
    ])
    def test_exact_linear_decay(self, g16, family, params):
        s0 = make_initial(family, 0.7, 0, g16)
        s = s0
        for _ in range(37):
            s = step(s, 0.01, params)
        rate = math.exp(-2.0 * 0.37)
        err = sp.l2_norm(s.u - rate * s0.u, g16) + sp.l2_norm(s.b - rate * s0.b, g16)
        assert err < 1e-12 * (sp.l2_norm(s0.u, g16) + sp.l2_norm(s0.b, g16))
        assert s.t == pytest.approx(0.37)

    def test_exact_decay_check(self):
        assert checks.exact_decay(n=16).passed

    def test_rejects_nonpositive_dt(self, g16):
        with pytest.raises(ValueError):
            step(State.zeros(g16), 0.0, PhysParams())

    def test_nonfinite_raises(self, g16):
        s = single_mode_b(g16)
        s.b[2, 1, 0, 0] = np.nan
        with pytest.raises(InstabilityError):
            step(s, 0.01, PhysParams())

    def test_divergence_preserved(self, g16):
        s = make_initial("random_band_limited", 0.5, 3, g16)
        for _ in range(5):
            s = step(s, 0.005, PhysParams())
        for v in (s.u, s.b):
            assert np.max(np.abs(sp.divergence(v, g16))) < 1e-13 * np.max(np.abs(v))

    def test_reused_tendency_is_identical(self, g16):
        s = make_initial("random_band_limited", 0.5, 3, g16)
        p = PhysParams()
        s1, _, n1 = advance(s, 0.004, p)
        a, _, _ = advance(s1, 0.004, p, n0=n1)
        b, _, _ = advance(s1, 0.004, p)
        assert np.array_equal(a.u, b.u) and np.array_equal(a.b, b.b)

    def test_hall_model_keeps_u_zero(self, g16):
        s = make_initial("random_band_limited", 0.5, 3, g16)
        out = step(s, 0.004, PhysParams(model="hall"))
        assert not np.any(out.u)

    def test_fourth_order(self):
        r = checks.temporal_order(n=8, h=0.01, T=0.2)
        assert r.measured["order"] >= 3.5


class TestDissipation:
    @pytest.mark.parametrize("j", [0, 1, 2, 3])
    @pytest.mark.parametrize("x", [0.0, 1e-6, 0.3, 0.999, 1.0, 5.0, 80.0])
    def test_psi_moments(self, j, x):
        want = quad(lambda t: math.exp(-x * t) * t**j, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)[0]
        assert float(_psi(j, np.array(x))) == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_linear_decay_is_exact(self, g16):
        s0 = make_initial("single_mode_b", 1.0, 0, g16)
        p = PhysParams()
        s1, n0, n1 = advance(s0, 0.05, p)
        du, db = dissipation_increment(s0, s1, 0.05, p, n0, n1)
        lost = energy(s0.b, g16) - energy(s1.b, g16)
        assert du == 0.0
        assert db == pytest.approx(lost, rel=1e-12)

    def test_nonlinear_budget_closes(self, g16):
        s = make_initial("random_band_limited", 0.5, 2, g16)
        p = PhysParams()
        e0 = energy(s.u, g16) + energy(s.b, g16)
        total, tend = 0.0, None
        for _ in range(20):
            s1, n0, tend = advance(s, 0.005, p, n0=tend)
            total += sum(dissipation_increment(s, s1, 0.005, p, n0, tend))
            s = s1
        e1 = energy(s.u, g16) + energy(s.b, g16)
        assert abs(e0 - e1 - total) < 1e-7 * e0

    def test_end_tendency_matches_fresh_evaluation(self, g16):
        s = make_initial("random_band_limited", 0.5, 2, g16)
        p = PhysParams()
        s1, _, n1 = advance(s, 0.005, p)
        fresh = nonlinear_terms(s1.u, s1.b, g16, p)
        assert np.array_equal(n1[0], fresh[0]) and np.array_equal(n1[1], fresh[1])

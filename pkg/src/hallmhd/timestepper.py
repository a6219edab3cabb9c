"""Integrating-factor RK4 time stepping with a Hall-aware step-size rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .model import PhysParams, State, linear_rates, nonlinear_terms

TINY = 1e-30


class InstabilityError(RuntimeError):
    """A step produced non-finite coefficients."""

    def __init__(self, t: float, dt: float):
        super().__init__(f"non-finite state after step t={t:.6g}, dt={dt:.3g}")
        self.t = t
        self.dt = dt


@dataclass(frozen=True)
class StepControl:
    dt_max: float = 0.01
    cfl_advective: float = 0.5
    cfl_hall: float = 0.2
    t_end: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        for name in ("dt_max", "cfl_advective", "cfl_hall"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if int(self.record_every) < 1:
            raise ValueError("record_every must be >= 1")


def max_magnitude(v: np.ndarray, grid) -> float:
    vp = sp.inverse(v, grid)
    return float(np.sqrt(np.max(np.sum(vp**2, axis=0))))


def stable_dt(s: State, p: PhysParams, c: StepControl) -> float:
    grid = s.grid
    kmax = float(grid.kcut)
    umax = max_magnitude(s.u, grid) if p.model == "mhd" else 0.0
    bmax = max_magnitude(s.b, grid)
    hall_power = 2.0 + (p.alpha if p.model == "generalized" else 0.0)
    dt_adv = c.cfl_advective / ((umax + bmax) * kmax + TINY)
    dt_hall = c.cfl_hall / (p.hall * bmax * kmax**hall_power + TINY)
    return min(c.dt_max, dt_adv, dt_hall)


def _decay(lam: np.ndarray, h: float) -> np.ndarray:
    return np.exp(-lam * h)


def step(s: State, dt: float, p: PhysParams) -> State:
    """One Lawson RK4 step; the linear dissipation is integrated exactly."""
    return advance(s, dt, p, with_end_tendency=False)[0]


def advance(s: State, dt: float, p: PhysParams, n0=None, with_end_tendency: bool = True):
    """Step ``s`` by ``dt`` and return ``(new_state, n0, n1)``.

    ``n0``/``n1`` are the nonlinear tendencies at the start and end states;
    passing the previous ``n1`` back as ``n0`` saves one evaluation.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    grid = s.grid
    lam_u, lam_b = linear_rates(grid, p)
    eu, eb = _decay(lam_u, dt), _decay(lam_b, dt)
    hu, hb = _decay(lam_u, 0.5 * dt), _decay(lam_b, 0.5 * dt)

    def N(u, b):
        return nonlinear_terms(u, b, grid, p)

    u0, b0 = s.u, s.b
    k1u, k1b = N(u0, b0) if n0 is None else n0
    k2u, k2b = N(hu * (u0 + 0.5 * dt * k1u), hb * (b0 + 0.5 * dt * k1b))
    k3u, k3b = N(hu * u0 + 0.5 * dt * k2u, hb * b0 + 0.5 * dt * k2b)
    k4u, k4b = N(eu * u0 + dt * hu * k3u, eb * b0 + dt * hb * k3b)
    u1 = eu * u0 + dt / 6.0 * (eu * k1u + 2.0 * hu * (k2u + k3u) + k4u)
    b1 = eb * b0 + dt / 6.0 * (eb * k1b + 2.0 * hb * (k2b + k3b) + k4b)

    if p.model == "mhd":
        u1 = sp.dealias(sp.leray_project(u1, grid), grid)
    else:
        u1 = np.zeros_like(u0)
    b1 = sp.dealias(b1, grid)
    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(b1))):
        raise InstabilityError(s.t, dt)
    n1 = N(u1, b1) if with_end_tendency else None
    return State(u1, b1, s.t + dt), (k1u, k1b), n1


def dissipation_increment(before: State, after: State, dt: float, p: PhysParams,
                          n0, n1) -> tuple[float, float]:
    """Energy removed by the linear dissipation of u and B over one step.

    Each modal energy is written as ``exp(-2 lam s) w(s)``; ``w`` varies only
    through the nonlinear terms and is interpolated by a cubic Hermite
    polynomial whose end slopes come from the tendencies ``n0`` and ``n1``.
    The exponential weight is integrated exactly.
    """
    grid = before.grid
    lam_u, lam_b = linear_rates(grid, p)
    out = []
    pairs = ((lam_u, before.u, after.u, n0[0], n1[0]), (lam_b, before.b, after.b, n0[1], n1[1]))
    for lam, a, b, na, nb in pairs:
        x = 2.0 * lam * dt
        g = np.exp(np.minimum(x, 700.0))
        w0 = np.sum(np.abs(a) ** 2, axis=0)
        w1 = np.sum(np.abs(b) ** 2, axis=0) * g
        d0 = dt * 2.0 * np.sum((np.conj(a) * na).real, axis=0)
        d1 = dt * 2.0 * np.sum((np.conj(b) * nb).real, axis=0) * g
        m0, m1, m2, m3 = (_psi(j, x) for j in range(4))
        # Hermite basis integrated against exp(-x tau) on [0, 1]
        c00 = 2 * m3 - 3 * m2 + m0
        c10 = m3 - 2 * m2 + m1
        c01 = -2 * m3 + 3 * m2
        c11 = m3 - m2
        integral = dt * lam * (w0 * c00 + d0 * c10 + w1 * c01 + d1 * c11)
        out.append(float(grid.volume * np.sum(integral)))
    return out[0], out[1]


def _psi(j: int, x: np.ndarray) -> np.ndarray:
    """int_0^1 exp(-x tau) tau^j d tau, elementwise and stable for all x >= 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1.0
    if np.any(small):
        xs = x[small]
        acc = np.zeros_like(xs)
        term = np.ones_like(xs)
        for i in range(30):
            acc += term / (i + j + 1)
            term = term * (-xs) / (i + 1)
        out[small] = acc
    if np.any(~small):
        xl = x[~small]
        e = np.exp(-xl)
        val = -np.expm1(-xl) / xl
        for i in range(1, j + 1):
            val = (i * val - e) / xl
        out[~small] = val
    return out

"""Norms, blow-up functionals, energy budgets and stationary residuals."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import spectral as sp
from .model import PhysParams, State, hall_term, induction_term, lorentz_term, advection_term
from .spectral import Grid

ENERGY_TOL_REL = 1e-6


@dataclass
class DiagnosticsRecord:
    t: float
    energy_u: float
    energy_b: float
    hm_u: float
    hm_b: float
    x: float
    a: float
    besov_omega: float
    linf_u: float
    linf_b: float
    linf_grad_b: float
    div_u_max: float
    div_b_max: float
    diss_u: float
    diss_b: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_row(self) -> list[float]:
        return [float(v) for v in asdict(self).values()]


def sobolev_norm(f: np.ndarray, grid: Grid, m: int) -> float:
    """Equivalent H^m norm with Fourier weight (1 + |k|^2)^m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    w = (1.0 + grid.k2) ** m
    e = np.abs(f) ** 2
    if f.ndim == 4:
        e = e.sum(axis=0)
    return float(np.sqrt(grid.volume * np.sum(w * e)))


def shell_index(grid: Grid) -> np.ndarray:
    """Dyadic shell label j per mode (2^{j-1} <= |k| < 2^j); 0 marks k = 0."""
    key = "shells"
    j = grid._cache.get(key)
    if j is None:
        kabs = grid.kabs
        j = np.zeros(grid.shape, dtype=int)
        nz = kabs > 0
        j[nz] = np.floor(np.log2(kabs[nz])).astype(int) + 1
        # guard log2 rounding right at powers of two
        j[nz & (kabs >= 2.0**j)] += 1
        j[nz & (kabs < 2.0 ** (j - 1))] -= 1
        grid._cache[key] = j
    return j


def shell_count(grid: Grid) -> int:
    kmax = float(np.max(grid.kabs))
    return int(math.floor(math.log2(kmax))) + 1


def shell_decomposition(grid: Grid) -> list[np.ndarray]:
    """Boolean masks, shell j = 1..J, partitioning the nonzero modes."""
    j = shell_index(grid)
    return [j == s for s in range(1, shell_count(grid) + 1)]


def besov_norm_b0(f: np.ndarray, grid: Grid) -> float:
    """Sup over dyadic shells of the sup-norm of the shell-restricted field.

    Vector input returns the max over components.
    """
    j = shell_index(grid)
    occupied = np.any(np.abs(f).reshape((-1,) + grid.shape) > 0, axis=0)
    best = 0.0
    for s in range(1, shell_count(grid) + 1):
        mask = j == s
        if not np.any(mask & occupied):
            continue
        piece = sp.inverse(np.where(mask, f, 0.0), grid)
        best = max(best, float(np.max(np.abs(piece))))
    return best


def linf(f: np.ndarray, grid: Grid) -> float:
    """Max-abs over grid points and components."""
    return float(np.max(np.abs(sp.inverse(f, grid)), initial=0.0))


def grad_linf(b: np.ndarray, grid: Grid) -> float:
    return linf(sp.grad(b, grid), grid)


def functional_X(s: State, m: int) -> float:
    if m <= 2:
        raise ValueError(f"X(t) needs m > 5/2, got m={m}")
    g = s.grid
    return 1.0 + sobolev_norm(s.b, g, m) ** 2 + sobolev_norm(s.u, g, m) ** 2


def functional_A(s: State) -> float:
    g = s.grid
    omega = sp.curl(s.u, g)
    lu, lb, lgb = linf(s.u, g), linf(s.b, g), grad_linf(s.b, g)
    quotient = (1.0 + lu**2 + lb**2 + lgb**2) / (1.0 + math.log(1.0 + lu + lb + lgb))
    return besov_norm_b0(omega, g) + quotient


def divergence_linf(v: np.ndarray, grid: Grid) -> float:
    return linf(sp.divergence(v, grid), grid)


def energy(v: np.ndarray, grid: Grid) -> float:
    return 0.5 * sp.l2_norm(v, grid) ** 2


def record(s: State, m: int, diss_u: float = 0.0, diss_b: float = 0.0) -> DiagnosticsRecord:
    g = s.grid
    omega = sp.curl(s.u, g)
    lu, lb, lgb = linf(s.u, g), linf(s.b, g), grad_linf(s.b, g)
    besov = besov_norm_b0(omega, g)
    quotient = (1.0 + lu**2 + lb**2 + lgb**2) / (1.0 + math.log(1.0 + lu + lb + lgb))
    hm_u, hm_b = sobolev_norm(s.u, g, m), sobolev_norm(s.b, g, m)
    return DiagnosticsRecord(
        t=s.t,
        energy_u=energy(s.u, g),
        energy_b=energy(s.b, g),
        hm_u=hm_u,
        hm_b=hm_b,
        x=1.0 + hm_u**2 + hm_b**2,
        a=besov + quotient,
        besov_omega=besov,
        linf_u=lu,
        linf_b=lb,
        linf_grad_b=lgb,
        div_u_max=divergence_linf(s.u, g),
        div_b_max=divergence_linf(s.b, g),
        diss_u=diss_u,
        diss_b=diss_b,
    )


@dataclass
class EnergyReport:
    deficit: np.ndarray
    min_deficit: float
    initial_energy: float
    violated: bool
    worst_t: float

    @property
    def min_deficit_rel(self) -> float:
        return self.min_deficit / self.initial_energy if self.initial_energy > 0 else 0.0


def energy_budget(history, tol_rel: float = ENERGY_TOL_REL) -> EnergyReport:
    """Energy deficit E(0) - [E(t) + dissipated(t)] along a recorded run."""
    history = list(history)
    if not history:
        raise ValueError("energy_budget needs a non-empty history")
    e = np.array([r.energy_u + r.energy_b for r in history])
    diss = np.array([r.diss_u + r.diss_b for r in history])
    deficit = e[0] - (e + diss)
    i = int(np.argmin(deficit))
    e0 = float(e[0])
    return EnergyReport(
        deficit=deficit,
        min_deficit=float(deficit[i]),
        initial_energy=e0,
        violated=bool(deficit[i] < -tol_rel * e0),
        worst_t=float(history[i].t),
    )


def pressure_recover(u: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    """Pressure from -Lap(p + |B|^2/2) = sum_jk d_j d_k (u_j u_k - B_j B_k)."""
    up, bp = sp.inverse(u, grid), sp.inverse(b, grid)
    t = np.einsum("ixyz,jxyz->ijxyz", up, up) - np.einsum("ixyz,jxyz->ijxyz", bp, bp)
    th = sp.dealias(sp.forward(t, grid), grid)
    k = grid.k
    src = -np.einsum("ixyz,jxyz,ijxyz->xyz", k, k, th)  # sum d_j d_k T_jk
    total = src / grid.k2_safe
    total[0, 0, 0] = 0.0
    mag = sp.dealias(sp.forward(0.5 * np.sum(bp**2, axis=0), grid), grid)
    p = total - mag
    p[0, 0, 0] = 0.0
    return p


def stationary_residual(u: np.ndarray, b: np.ndarray, grid: Grid, p: PhysParams) -> tuple[float, float]:
    """L2 residuals of the stationary momentum and induction equations."""
    ru = sp.leray_project(advection_term(u, grid) - lorentz_term(b, grid), grid) + p.nu * grid.k2 * u
    rb = -induction_term(u, b, grid) + p.hall * hall_term(b, grid) + p.eta * grid.k2 * b
    return sp.l2_norm(ru, grid), sp.l2_norm(rb, grid)

"""Right-hand sides of the incompressible resistive Hall-MHD system.

Three variants share one code path:

* ``"mhd"``: the full system in (u, B);
* ``"hall"``: the magnetic equation alone with u held at zero;
* ``"generalized"``: the B-only problem with ``Lambda^alpha`` inside the Hall
  term and ``Lambda^beta`` dissipation.

Every RHS is split into a diagonal linear part (returned by
:func:`linear_rates`) and the remaining nonlinear part, which is what the
integrating-factor stepper consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import spectral as sp
from .spectral import Grid

MODELS = ("mhd", "hall", "generalized")


@dataclass(frozen=True)
class PhysParams:
    nu: float = 1.0
    eta: float = 1.0
    hall: float = 1.0
    eps: float = 0.0
    alpha: float = 0.0
    beta: float = 2.0
    model: str = "mhd"

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0 (resistivity is required), got {self.eta}")
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.hall < 0:
            raise ValueError(f"hall must be >= 0, got {self.hall}")
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")

    def with_(self, **kw) -> "PhysParams":
        return replace(self, **kw)


@dataclass
class State:
    """Velocity and magnetic field coefficients at time ``t``."""

    u: np.ndarray
    b: np.ndarray
    t: float = 0.0

    @property
    def grid(self) -> Grid:
        return sp.get_grid(self.u.shape[-1])

    def copy(self) -> "State":
        return State(self.u.copy(), self.b.copy(), self.t)

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> "State":
        z = np.zeros((3,) + grid.shape, dtype=complex)
        return cls(z, z.copy(), t)


def lorentz_term(b: np.ndarray, grid: Grid) -> np.ndarray:
    """(curl b) x b, dealiased."""
    return sp.cross_physical(sp.curl(b, grid), b, grid)


def hall_term(b: np.ndarray, grid: Grid) -> np.ndarray:
    """curl((curl b) x b)."""
    return sp.curl(lorentz_term(b, grid), grid)


def induction_term(u: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    """curl(u x b)."""
    return sp.curl(sp.cross_physical(u, b, grid), grid)


def advection_term(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Convective derivative (u . grad) u, dealiased."""
    up = sp.inverse(u, grid)
    gu = sp.inverse(sp.grad(u, grid), grid)  # [i, j] = d_j u_i
    return sp.dealias(sp.forward(np.einsum("jxyz,ijxyz->ixyz", up, gu), grid), grid)


def mollifier_symbol(grid: Grid, eps: float) -> np.ndarray:
    key = ("moll", float(eps))
    m = grid._cache.get(key)
    if m is None:
        m = np.exp(-0.5 * eps**2 * grid.k2)
        grid._cache[key] = m
    return m


def mollify(f: np.ndarray, grid: Grid, eps: float) -> np.ndarray:
    """Gaussian approximate identity exp(-|eps k|^2 / 2) as a Fourier multiplier."""
    if eps < 0:
        raise ValueError(f"mollifier width must be >= 0, got {eps}")
    if eps == 0:
        return f.copy()
    return mollifier_symbol(grid, eps) * f


def linear_rates(grid: Grid, p: PhysParams) -> tuple[np.ndarray, np.ndarray]:
    """Decay rates ``(lam_u, lam_b)`` with linear part ``-lam * coeffs``."""
    m2 = mollifier_symbol(grid, p.eps) ** 2 if p.eps > 0 else 1.0
    if p.model == "generalized":
        lam_b = p.eta * sp.fractional_symbol(grid, p.beta) * m2
    else:
        lam_b = p.eta * grid.k2 * m2
    lam_u = p.nu * grid.k2 * m2 if p.model == "mhd" else np.zeros(grid.shape)
    return lam_u * np.ones(grid.shape), lam_b * np.ones(grid.shape)


def nonlinear_terms(u: np.ndarray, b: np.ndarray, grid: Grid, p: PhysParams):
    """Nonlinear tendencies ``(Nu, Nb)`` of the chosen model."""
    eps = p.eps
    J = (lambda f: mollify(f, grid, eps)) if eps > 0 else (lambda f: f)
    if p.model == "generalized":
        return np.zeros_like(b), -p.hall * generalized_hall_term(J(b), grid, p.alpha, outer=J)
    bj = J(b)
    jp = sp.inverse(sp.curl(bj, grid), grid)
    bp = sp.inverse(bj, grid)
    lor = J(sp.cross_of_physical(jp, bp, grid))
    nb = -p.hall * sp.curl(lor, grid)
    if p.model == "hall":
        return np.zeros_like(u), nb
    uj = J(u)
    up = sp.inverse(uj, grid)
    nb = nb + sp.curl(J(sp.cross_of_physical(up, bp, grid)), grid)
    gu = sp.inverse(sp.grad(uj, grid), grid)
    adv = J(sp.dealias(sp.forward(np.einsum("jxyz,ijxyz->ixyz", up, gu), grid), grid))
    nu_ = sp.leray_project(lor - adv, grid)
    return nu_, nb


def generalized_hall_term(b: np.ndarray, grid: Grid, alpha: float, outer=None) -> np.ndarray:
    """curl((Lambda^alpha curl b) x b); ``outer`` wraps the product (mollifier)."""
    jcur = sp.fractional_laplacian(sp.curl(b, grid), grid, alpha)
    prod = sp.cross_physical(jcur, b, grid)
    if outer is not None:
        prod = outer(prod)
    return sp.curl(prod, grid)


def assemble_rhs(s: State, p: PhysParams) -> tuple[np.ndarray, np.ndarray]:
    """Full time derivatives ``(du, db)`` for state ``s``."""
    grid = s.grid
    sp.check_grid(grid, s.u, s.b)
    nu_, nb = nonlinear_terms(s.u, s.b, grid, p)
    lam_u, lam_b = linear_rates(grid, p)
    du = nu_ - lam_u * s.u
    db = nb - lam_b * s.b
    if p.model != "mhd":
        du = np.zeros_like(s.u)
    return du, db


def generalized_hall_rhs(b: np.ndarray, grid: Grid, p: PhysParams) -> np.ndarray:
    """-hall * curl((Lambda^alpha curl b) x b) - eta * Lambda^beta b."""
    if p.alpha < 0:
        raise ValueError("alpha must be >= 0")
    return -p.hall * generalized_hall_term(b, grid, p.alpha) - p.eta * sp.fractional_laplacian(
        b, grid, p.beta
    )

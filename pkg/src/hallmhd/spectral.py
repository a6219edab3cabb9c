"""Fourier-space machinery on the periodic box [0, 2*pi)^3.

Scalar fields are complex arrays of shape ``(n, n, n)`` holding the
coefficients ``f_hat(k)`` of ``f(x) = sum_k f_hat(k) exp(i k.x)``, indexed in
numpy FFT order along each axis. Vector fields stack three components into an
array of shape ``(3, n, n, n)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft

AXES = (-3, -2, -1)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("HALLMHD_THREADS", "1")))
    except ValueError:
        return 1


class GridMismatchError(ValueError):
    pass


class HermitianError(ValueError):
    """Raised when an inverse transform is requested for non-real data."""


@dataclass(frozen=True)
class Grid:
    """Uniform collocation grid with ``n`` points per dimension."""

    n: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(f"grid size n must be a power of two >= 8, got {n!r}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @cached_property
    def kmode(self) -> np.ndarray:
        """Integer wavenumbers per axis, FFT order: 0..n/2-1, -n/2..-1."""
        return np.fft.fftfreq(self.n, 1.0 / self.n)

    @cached_property
    def k(self) -> np.ndarray:
        """Wavenumber vectors, shape (3, n, n, n)."""
        kk = self.kmode
        return np.stack(np.meshgrid(kk, kk, kk, indexing="ij"))

    @cached_property
    def kd(self) -> np.ndarray:
        """Wavenumbers for odd derivatives, with the Nyquist row zeroed."""
        kk = self.kmode.copy()
        kk[self.n // 2] = 0.0
        return np.stack(np.meshgrid(kk, kk, kk, indexing="ij"))

    @cached_property
    def k2(self) -> np.ndarray:
        return np.sum(self.k**2, axis=0)

    @cached_property
    def kabs(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @cached_property
    def k2_safe(self) -> np.ndarray:
        k2 = self.k2.copy()
        k2[0, 0, 0] = 1.0
        return k2

    @property
    def kcut(self) -> int:
        """Largest retained wavenumber component under the 2/3 rule."""
        return self.n // 3

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return np.all(np.abs(self.k) <= self.kcut, axis=0)

    @cached_property
    def x(self) -> np.ndarray:
        """Physical coordinates, shape (3, n, n, n)."""
        xs = 2.0 * np.pi * np.arange(self.n) / self.n
        return np.stack(np.meshgrid(xs, xs, xs, indexing="ij"))

    @cached_property
    def conj_index(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index arrays mapping each mode k to -k."""
        idx = (-np.arange(self.n)) % self.n
        return np.ix_(idx, idx, idx)

    @property
    def volume(self) -> float:
        return (2.0 * np.pi) ** 3


@lru_cache(maxsize=None)
def get_grid(n: int) -> Grid:
    """Shared Grid instance for ``n`` so cached operator arrays are reused."""
    return Grid(int(n))


def check_grid(grid: Grid, *fields: np.ndarray) -> None:
    for f in fields:
        if f.shape[-3:] != grid.shape:
            raise GridMismatchError(
                f"field of shape {f.shape} does not live on grid n={grid.n}"
            )


def reflect(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Return ``c(-k)`` for every k (leading axes untouched)."""
    i, j, l = grid.conj_index
    return coeffs[..., i, j, l]


def hermitian_defect(coeffs: np.ndarray, grid: Grid) -> float:
    return float(np.max(np.abs(coeffs - np.conj(reflect(coeffs, grid))), initial=0.0))


def forward(samples: np.ndarray, grid: Grid) -> np.ndarray:
    """Physical samples -> Fourier coefficients (normalized by n^3)."""
    samples = np.asarray(samples)
    check_grid(grid, samples)
    if np.iscomplexobj(samples):
        raise TypeError("forward transform expects real samples")
    return sfft.fftn(samples, axes=AXES, norm="forward", workers=_workers())


def inverse(coeffs: np.ndarray, grid: Grid, check: bool = False, rtol: float = 1e-13) -> np.ndarray:
    """Fourier coefficients -> real physical samples.

    With ``check=True`` the coefficients must be Hermitian to ``rtol``
    relative to their largest magnitude.
    """
    check_grid(grid, coeffs)
    if check:
        scale = max(1.0, float(np.max(np.abs(coeffs), initial=0.0)))
        defect = hermitian_defect(coeffs, grid)
        if defect > rtol * scale:
            raise HermitianError(
                f"coefficients are not Hermitian (defect {defect:.3e}); state is corrupted"
            )
    # Hermitian data is fully described by the non-negative k_z half.
    half = coeffs[..., : grid.n // 2 + 1]
    return sfft.irfftn(half, s=grid.shape, axes=AXES, norm="forward", workers=_workers())


def transform(data: np.ndarray, grid: Grid, direction: str = "forward") -> np.ndarray:
    if direction == "forward":
        return forward(data, grid)
    if direction == "inverse":
        return inverse(data, grid, check=True)
    raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")


def dealias(f: np.ndarray, grid: Grid) -> np.ndarray:
    return np.where(grid.dealias_mask, f, 0.0)


def grad(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral gradient of a scalar; of a vector, returns d_j v_i as [i, j]."""
    if f.ndim == 3:
        return 1j * grid.kd * f
    return 1j * grid.kd[None, :] * f[:, None]


def divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    return 1j * np.sum(grid.kd * v, axis=0)


def curl(v: np.ndarray, grid: Grid) -> np.ndarray:
    check_grid(grid, v)
    kx, ky, kz = grid.kd
    vx, vy, vz = v
    return 1j * np.stack((ky * vz - kz * vy, kz * vx - kx * vz, kx * vy - ky * vx))


def laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    return -grid.k2 * f


def leray_project(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Remove the gradient part of ``v``; the mean (k = 0) is left alone."""
    check_grid(grid, v)
    k = grid.kd
    kdotv = np.sum(k * v, axis=0)
    k2 = np.sum(k**2, axis=0)
    k2[k2 == 0] = 1.0
    return v - k * (kdotv / k2)


def fractional_laplacian(f: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    """Apply the multiplier |k|^s; the mean is zeroed for s > 0."""
    if s < 0:
        raise ValueError(f"fractional exponent must be >= 0, got {s}")
    if s == 0:
        return f.copy()
    return fractional_symbol(grid, s) * f


def fractional_symbol(grid: Grid, s: float) -> np.ndarray:
    key = ("frac", float(s))
    sym = grid._cache.get(key)
    if sym is None:
        sym = grid.k2 ** (0.5 * s) if s != 2 else grid.k2.copy()
        grid._cache[key] = sym
    return sym


def to_physical(v: np.ndarray, grid: Grid) -> np.ndarray:
    return inverse(v, grid)


def cross_physical(a: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    """Dealiased pseudospectral cross product ``a x b``."""
    check_grid(grid, a, b)
    return dealias(forward(np.cross(inverse(a, grid), inverse(b, grid), axis=0), grid), grid)


def cross_of_physical(ap: np.ndarray, bp: np.ndarray, grid: Grid) -> np.ndarray:
    """Cross product of fields already in physical space, returned dealiased."""
    return dealias(forward(np.cross(ap, bp, axis=0), grid), grid)


def inner(a: np.ndarray, b: np.ndarray, grid: Grid) -> float:
    """L2 inner product over the box, evaluated by Parseval."""
    return float(grid.volume * np.sum(a * np.conj(b)).real)


def l2_norm(a: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.volume * np.sum(np.abs(a) ** 2)))


def real_random(grid: Grid, rng: np.random.Generator, kmax: float, shape=()) -> np.ndarray:
    """Random real band-limited coefficients with 0 < |k| <= kmax."""
    c = rng.standard_normal(shape + grid.shape) + 1j * rng.standard_normal(shape + grid.shape)
    c = 0.5 * (c + np.conj(reflect(c, grid)))
    keep = (grid.kabs <= kmax) & (grid.k2 > 0) & grid.dealias_mask
    return np.where(keep, c, 0.0)

"""Uniform periodic grids, complex wavefields, and Fourier primitives.

The whole package works on a periodic interval [x_min, x_max) standing in
for the real line; domains are sized so that boundary mass is negligible
for every scheduled run.  Fields are complex amplitude samples u(x_j) with
x_j = x_min + j*dx.  Norms follow the Riemann sum dx*sum(...), and the
half-line masses that define the transmission functional split the x = 0
node half to each side.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "WaveField",
    "make_grid",
    "l2_norm_sq",
    "half_line_mass",
    "spectral_derivative",
    "free_fourier_multiply",
    "origin_index",
    "reflect",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic spatial grid with its discrete Fourier wavenumbers."""

    n_points: int
    x_min: float
    x_max: float
    dx: float
    x: np.ndarray = field(repr=False)
    wavenumbers: np.ndarray = field(repr=False)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


@dataclass
class WaveField:
    """Complex amplitudes sampled on a Grid, units of sqrt(mass density)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"field length {self.values.shape} does not match grid "
                f"n_points={self.grid.n_points}"
            )
        if not np.all(np.isfinite(self.values.view(np.float64))):
            raise ValueError("field contains non-finite amplitudes")


def make_grid(n_points: int, x_min: float, x_max: float) -> Grid:
    """Build a periodic grid of n_points samples on [x_min, x_max).

    Parameters
    ----------
    n_points : power of two, at least 2.
    x_min, x_max : spatial extent; x_max must exceed x_min.
    """
    if n_points < 2 or (n_points & (n_points - 1)) != 0:
        raise ValueError(f"n_points must be a power of two >= 2, got {n_points}")
    if not x_max > x_min:
        raise ValueError(f"degenerate extent: x_min={x_min}, x_max={x_max}")
    dx = (x_max - x_min) / n_points
    x = x_min + dx * np.arange(n_points)
    k = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dx)
    return Grid(n_points=n_points, x_min=x_min, x_max=x_max, dx=dx, x=x, wavenumbers=k)


def l2_norm_sq(fieldv: WaveField) -> float:
    """Squared L2 norm dx*sum(|u|^2), the mass of the field."""
    v = fieldv.values
    return float(fieldv.grid.dx * np.real(np.vdot(v, v)))


def half_line_mass(fieldv: WaveField, side: str) -> float:
    """Mass restricted to one side of the origin.

    The node nearest 0 is assigned by the sign of x_j; a node exactly at
    x = 0 contributes half its mass to each side, which removes an O(dx)
    bias from the transmission functional.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    g = fieldv.grid
    if not (g.x_min < 0.0 < g.x_max):
        raise ValueError("half_line_mass requires 0 strictly inside the domain")
    w = np.abs(fieldv.values) ** 2
    sgn = np.sign(g.x)
    target = 1.0 if side == "right" else -1.0
    weights = np.where(sgn == target, 1.0, 0.0) + np.where(sgn == 0.0, 0.5, 0.0)
    return float(g.dx * np.sum(w * weights))


def spectral_derivative(fieldv: WaveField, order: int) -> WaveField:
    """Differentiate by multiplying Fourier coefficients with (i*k)^order."""
    if order < 1:
        raise ValueError(f"order must be a positive integer, got {order}")
    k = fieldv.grid.wavenumbers
    coeff = (1j * k) ** order
    out = np.fft.ifft(coeff * np.fft.fft(fieldv.values))
    return WaveField(fieldv.grid, out)


def free_fourier_multiply(
    fieldv: WaveField, symbol: Callable[[np.ndarray], np.ndarray] | np.ndarray
) -> WaveField:
    """Apply a Fourier multiplier: transform, multiply by symbol(k), invert."""
    k = fieldv.grid.wavenumbers
    sym = np.asarray(symbol(k) if callable(symbol) else symbol, dtype=np.complex128)
    if sym.shape != k.shape:
        raise ValueError("symbol must provide one value per grid wavenumber")
    if not np.all(np.isfinite(sym.view(np.float64))):
        raise ValueError("symbol takes a non-finite value on the grid")
    out = np.fft.ifft(sym * np.fft.fft(fieldv.values))
    return WaveField(fieldv.grid, out)


def origin_index(grid: Grid) -> int:
    """Index of the grid node lying exactly at x = 0.

    Operations that couple to the point impurity need the origin on-grid;
    standard domains [-L, L) with power-of-two n_points satisfy this.
    """
    j = int(round(-grid.x_min / grid.dx))
    if not 0 <= j < grid.n_points or abs(grid.x[j]) > 1e-9 * grid.dx:
        raise ValueError("grid has no node at x = 0")
    return j


def reflect(fieldv: WaveField) -> WaveField:
    """Spatial reflection u(x) -> u(-x) as an exact grid index permutation."""
    g = fieldv.grid
    m_real = -2.0 * g.x_min / g.dx
    m = int(round(m_real))
    if abs(m_real - m) > 1e-9:
        raise ValueError("domain does not map onto itself under x -> -x")
    idx = (m - np.arange(g.n_points)) % g.n_points
    return WaveField(g, fieldv.values[idx])


def write_field_csv(fieldv: WaveField, path: str) -> None:
    """Serialize a field as CSV rows `x,re,im,abs` with 17 significant digits."""
    v = fieldv.values
    with open(path, "w", newline="") as fh:
        fh.write("x,re,im,abs\n")
        for xj, vj in zip(fieldv.grid.x, v):
            fh.write(
                f"{xj:.17g},{vj.real:.17g},{vj.imag:.17g},{abs(vj):.17g}\n"
            )


def read_field_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a field CSV back as (x, complex values); inverse of write_field_csv."""
    xs: list[float] = []
    vs: list[complex] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[:3] != ["x", "re", "im"]:
            raise ValueError(f"{path}: expected header x,re,im,abs")
        for row in reader:
            xs.append(float(row["x"]))
            vs.append(complex(float(row["re"]), float(row["im"])))
    return np.asarray(xs), np.asarray(vs, dtype=np.complex128)

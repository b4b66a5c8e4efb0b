"""Nonlinear Schrodinger evolution across the impurity by Strang splitting.

The equation is i u_t + 1/2 u_xx - q*delta_0(x) u + u|u|^2 = 0.  One step
alternates the exact cubic sub-flow (a pointwise phase rotation, since the
modulus is frozen) with a full linear step.  The linear substep for q > 0
is the Cayley (Crank-Nicolson) step of the lattice Hamiltonian built from
the centered second difference plus an on-site impurity spike q/dx: it is
a function of a real-symmetric operator, hence exactly norm-preserving,
and its scattering states are the lattice eigenstates, so the measured
transmission is independent of dt.  For q = 0 the substep is the exact
spectral free flow.  Conserved quantities (mass, energy, and the
polynomial hierarchy) serve as correctness monitors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import LocalizationError, StabilityError
from .grids import Grid, WaveField, l2_norm_sq, origin_index

__all__ = [
    "SolitonParams",
    "EvolutionConfig",
    "ConservedReport",
    "make_soliton",
    "nls_step",
    "evolve",
    "conserved_mass",
    "conserved_energy",
    "conserved_hierarchy",
]


@dataclass(frozen=True)
class SolitonParams:
    """Parameters of a sech soliton A*sech(A(x-x0))*exp(i(v*x + phase))."""

    amplitude: float
    velocity: float
    center: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.amplitude, self.velocity, self.center, self.phase)
        if not all(np.isfinite(vals)):
            raise ValueError(f"soliton parameters must be finite, got {vals}")
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-integration schedule for one trajectory."""

    dt: float
    t_end: float
    q: float
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if self.q < 0:
            raise ValueError(f"q must be >= 0, got {self.q}")
        times = tuple(float(t) for t in self.snapshot_times)
        if list(times) != sorted(times):
            raise ValueError("snapshot_times must be sorted ascending")
        if times and (times[0] < -1e-12 or times[-1] > self.t_end + 1e-12):
            raise ValueError("snapshot_times must lie within [0, t_end]")
        object.__setattr__(self, "snapshot_times", times)


@dataclass(frozen=True)
class ConservedReport:
    """Conserved-quantity snapshot: mass, energy, and hierarchy integrals."""

    mass: float
    energy: float
    hierarchy: tuple[complex, ...] = ()
    warnings: tuple[str, ...] = ()


def _sech(y: np.ndarray) -> np.ndarray:
    """Overflow-safe sech."""
    a = np.abs(y)
    e = np.exp(-a)
    return 2.0 * e / (1.0 + e * e)


def make_soliton(params: SolitonParams, grid: Grid) -> WaveField:
    """Sample a boosted soliton on the grid.

    The envelope must be well localized: A * distance(center, boundary)
    >= 40, which keeps the boundary tail mass below 1e-30 and makes the
    periodic domain indistinguishable from the line.
    """
    a, v, x0 = params.amplitude, params.velocity, params.center
    margin = a * min(x0 - grid.x_min, grid.x_max - x0)
    if margin < 40.0:
        raise LocalizationError(
            f"soliton too close to the boundary: A*distance = {margin:.3g} < 40"
        )
    envelope = a * _sech(a * (grid.x - x0))
    carrier = np.exp(1j * (v * grid.x + params.phase))
    return WaveField(grid, envelope * carrier)


class _FreeStepper:
    """Strang step with exact spectral free linear substep (q = 0)."""

    def __init__(self, grid: Grid, dt: float) -> None:
        self.dt = dt
        k = grid.wavenumbers
        self.symbol = np.exp(-0.5j * dt * k * k)

    def step(self, u: np.ndarray) -> np.ndarray:
        u = u * np.exp(0.5j * self.dt * np.abs(u) ** 2)
        u = np.fft.ifft(self.symbol * np.fft.fft(u))
        return u * np.exp(0.5j * self.dt * np.abs(u) ** 2)


class _ImpurityStepper:
    """Strang step whose linear substep is the Cayley step of the lattice
    Hamiltonian (centered second difference + on-site spike q/dx), solved
    spectrally with a rank-one Sherman-Morrison correction.  Exactly
    norm-preserving at any dt."""

    def __init__(self, grid: Grid, dt: float, q: float) -> None:
        self.dt = dt
        self.i0 = origin_index(grid)
        self.rho = q / grid.dx
        self.theta = 0.5 * dt
        k = grid.wavenumbers
        fd_symbol = (1.0 - np.cos(k * grid.dx)) / grid.dx**2
        self.a_diag = 1.0 + 1j * self.theta * fd_symbol
        self.b_diag = 1.0 - 1j * self.theta * fd_symbol
        e0 = np.zeros(grid.n_points, dtype=np.complex128)
        e0[self.i0] = 1.0
        self.w = np.fft.ifft(np.fft.fft(e0) / self.a_diag)
        self.denom = 1.0 + 1j * self.theta * self.rho * self.w[self.i0]

    def _linear(self, u: np.ndarray) -> np.ndarray:
        b = np.fft.ifft(self.b_diag * np.fft.fft(u))
        b[self.i0] -= 1j * self.theta * self.rho * u[self.i0]
        y = np.fft.ifft(np.fft.fft(b) / self.a_diag)
        return y - self.w * (1j * self.theta * self.rho * y[self.i0] / self.denom)

    def step(self, u: np.ndarray) -> np.ndarray:
        u = u * np.exp(0.5j * self.dt * np.abs(u) ** 2)
        u = self._linear(u)
        return u * np.exp(0.5j * self.dt * np.abs(u) ** 2)


def _make_stepper(grid: Grid, dt: float, q: float):
    if q == 0.0:
        return _FreeStepper(grid, dt)
    return _ImpurityStepper(grid, dt, q)


def nls_step(fieldv: WaveField, dt: float, q: float) -> WaveField:
    """One Strang step of the nonlinear flow: half kick, linear step, half kick."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    stepper = _make_stepper(fieldv.grid, dt, q)
    return WaveField(fieldv.grid, stepper.step(fieldv.values.copy()))


def evolve(
    initial: WaveField, config: EvolutionConfig
) -> list[tuple[float, WaveField]]:
    """Integrate the flow, landing exactly on each snapshot time.

    Full steps of config.dt are taken until the remaining gap to the next
    snapshot is shorter than dt; one partial step then closes the gap.
    Mass is monitored every step; relative drift above 1e-4 aborts with a
    stability error identifying the offending step.
    """
    grid = initial.grid
    times = config.snapshot_times or (config.t_end,)
    guide = config.dt * max(config.q**2, float(np.max(np.abs(initial.values))) ** 2)
    if guide / 2.0 > 0.1:
        warnings.warn(
            f"dt={config.dt} under-resolves the fastest phase "
            f"(dt*max(q^2,|u|^2)/2 = {guide / 2.0:.3g} > 0.1)",
            stacklevel=2,
        )
    u = initial.values.copy()
    mass0 = l2_norm_sq(initial)
    stepper = _make_stepper(grid, config.dt, config.q)
    out: list[tuple[float, WaveField]] = []
    t_cur = 0.0
    step_index = 0

    def _advance(active, n_checked: int) -> int:
        nonlocal u
        u = active.step(u)
        m = float(grid.dx * np.real(np.vdot(u, u)))
        drift = abs(m - mass0) / mass0 if mass0 > 0 else 0.0
        if drift > 1e-4:
            raise StabilityError(n_checked, drift)
        return n_checked + 1

    for t_snap in times:
        while t_snap - t_cur > config.dt * (1.0 + 1e-9):
            step_index = _advance(stepper, step_index)
            t_cur += config.dt
        remainder = t_snap - t_cur
        if remainder > 1e-12:
            step_index = _advance(_make_stepper(grid, remainder, config.q), step_index)
        t_cur = t_snap
        out.append((t_snap, WaveField(grid, u.copy())))
    return out


def conserved_mass(fieldv: WaveField) -> float:
    """Total mass, the squared L2 norm."""
    return l2_norm_sq(fieldv)


def conserved_energy(fieldv: WaveField, q: float) -> float:
    """Energy -int(|u'|^2 - |u|^4) - 2q|u(0)|^2 of the flow.

    For q = 0 the derivative is spectral (exact on smooth fields).  For
    q > 0 the field carries a derivative jump 2q*u(0) at the origin, where
    a spectral derivative converges only O(dx) and would mask true
    conservation; the kinetic term instead uses the centered difference
    quotient, which is the quadratic form the discrete evolution itself
    preserves.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    g = fieldv.grid
    v = fieldv.values
    quartic = float(g.dx * np.sum(np.abs(v) ** 4))
    if q == 0.0:
        dv = np.fft.ifft(1j * g.wavenumbers * np.fft.fft(v))
    else:
        dv = (np.roll(v, -1) - v) / g.dx
    kinetic = float(g.dx * np.real(np.vdot(dv, dv)))
    point = 2.0 * q * float(np.abs(v[origin_index(g)]) ** 2) if q > 0 else 0.0
    return -(kinetic - quartic) - point


def conserved_hierarchy(fieldv: WaveField, k_max: int) -> ConservedReport:
    """Polynomial conserved densities of the free flow by recursion.

    f_0 = |h|^2 and f_{k+1} = d(f_k) - f_k * (dh/h) + sum_{j1+j2=k-1}
    f_{j1} f_{j2}, integrated to E_k.  The 1/h factor is evaluated only
    where |h| > 1e-8 * max|h| and zeroed elsewhere; if the masked set
    carries more than 1e-3 of some |f_k| mass, a reliability warning is
    attached to the report.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    if k_max > 6:
        raise ValueError(f"hierarchy unsupported beyond k=6 (expression growth), got {k_max}")
    g = fieldv.grid
    h = fieldv.values
    ik = 1j * g.wavenumbers

    def deriv(a: np.ndarray) -> np.ndarray:
        return np.fft.ifft(ik * np.fft.fft(a))

    eps = 1e-8 * float(np.max(np.abs(h))) if np.any(h) else 0.0
    masked = np.abs(h) <= eps
    ratio = np.zeros_like(h)
    np.divide(deriv(h), h, out=ratio, where=~masked)

    depth = max(k_max, 2)
    f_list = [np.abs(h) ** 2 + 0j]
    for k in range(depth):
        nxt = deriv(f_list[k]) - f_list[k] * ratio
        for j1 in range(k):
            nxt = nxt + f_list[j1] * f_list[k - 1 - j1]
        f_list.append(nxt)

    notes: list[str] = []
    energies: list[complex] = []
    for k in range(k_max + 1):
        fk = f_list[k]
        total = float(np.sum(np.abs(fk)))
        if total > 0 and np.any(masked):
            frac = float(np.sum(np.abs(fk[masked]))) / total
            if frac > 1e-3:
                notes.append(
                    f"f_{k}: {frac:.2e} of density mass on masked near-zeros of h"
                )
        energies.append(complex(g.dx * np.sum(fk)))

    mass = float(np.real(g.dx * np.sum(f_list[0])))
    energy = float(np.real(g.dx * np.sum(f_list[2])))
    return ConservedReport(
        mass=mass,
        energy=energy,
        hierarchy=tuple(energies),
        warnings=tuple(notes),
    )

"""Closed-form predictions for soliton scattering off the impurity.

Three ingredient families: the quantum transmission rate v^2/(v^2+q^2);
the outgoing-soliton parameters A = (2|t|-1)_+ with the phase quadrature
phi0; and the inverse-scattering data of the rescaled profile alpha*sech
(transition coefficient a, reflection b/a, discrete eigenvalue, norming
constant) built on a complex log-Gamma.  The asymptotic soliton that
alpha*sech relaxes to under the free nonlinear flow is reconstructed from
that data.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import SolitonParams
from .linear import scattering_coefficients

__all__ = [
    "OutgoingPrediction",
    "ZSData",
    "ZSDiscreteData",
    "PhaseScalingReport",
    "transmission_theory",
    "phi0",
    "outgoing_prediction",
    "zs_scattering_data",
    "zs_discrete_data",
    "asymptotic_soliton",
    "complex_log_gamma",
    "phase_scaling_report",
]

_TAIL_CUT = 12.0

# Lanczos approximation, g = 7, 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma via the Lanczos approximation.

    Uses g = 7 with 9 coefficients for Re z >= 1/2 and the reflection
    formula otherwise; relative accuracy about 1e-13 for |z| <= 20.  The
    imaginary part on the reflected half-plane is defined up to the 2*pi*i
    ambiguity of the logarithm, which cancels wherever exp(log Gamma)
    combinations are formed.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real):
        raise ValueError(f"log-gamma pole at z = {z}")
    if z.real < 0.5:
        sin_piz = cmath.sin(cmath.pi * z)
        if sin_piz == 0:
            raise ValueError(f"log-gamma pole at z = {z}")
        return (
            cmath.log(cmath.pi)
            - cmath.log(sin_piz)
            - complex_log_gamma(1.0 - z)
        )
    w = z - 1.0
    acc = complex(_LANCZOS_COEFFS[0])
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (w + i)
    t = w + _LANCZOS_G + 0.5
    return (
        0.5 * math.log(2.0 * math.pi)
        + (w + 0.5) * cmath.log(t)
        - t
        + cmath.log(acc)
    )


def transmission_theory(q: float, v: float) -> float:
    """Quantum transmission rate v^2/(v^2+q^2) at carrier velocity v."""
    if v <= 0:
        raise ValueError(f"velocity must be positive, got {v}")
    if q < 0:
        raise ValueError(f"impurity strength must be >= 0, got {q}")
    return v * v / (v * v + q * q)


def _bounded_quadrature(
    integrand, tail_bound: float, tol: float, singular_scale: float | None
) -> float:
    """Adaptive quadrature on [0, _TAIL_CUT] with an analytic tail budget."""
    tol = max(tol, 1e-13)
    points = None
    if singular_scale is not None and 0.0 < singular_scale < _TAIL_CUT:
        points = [singular_scale]
    for limit in (200, 800):
        val, err = quad(
            integrand,
            0.0,
            _TAIL_CUT,
            epsabs=0.5 * tol,
            epsrel=1e-12,
            limit=limit,
            points=points,
        )
        if err + tail_bound <= tol:
            return float(val)
    raise RuntimeError(
        f"quadrature failed to reach tol={tol:.1e} (error {err:.1e}, "
        f"tail {tail_bound:.1e})"
    )


def phi0(omega: float, tol: float = 1e-10) -> float:
    """Phase quadrature of the outgoing-soliton theorem.

    phi0(omega) = int_0^inf log(1 + sin^2(pi*omega)/cosh^2(pi*zeta)) *
    zeta/(zeta^2 + (2*omega-1)^2) dzeta.  At omega = 1/2 the Lorentzian
    degenerates to 1/zeta and the integral diverges logarithmically, which
    is reported as an error; elsewhere the integrand decays like
    exp(-2*pi*zeta) and is truncated at Z = 12 with a tail bound
    sin^2(pi*omega)*exp(-2*pi*Z)/(2*pi*Z).
    """
    if not 0.0 < omega <= 1.0:
        raise ValueError(f"omega must lie in (0, 1], got {omega}")
    if omega == 0.5:
        raise ValueError("phi0 diverges at omega = 1/2 (threshold amplitude)")
    s = math.sin(math.pi * omega) ** 2
    half_width_sq = (2.0 * omega - 1.0) ** 2

    def integrand(z: float) -> float:
        return math.log1p(s / math.cosh(math.pi * z) ** 2) * z / (z * z + half_width_sq)

    tail = s * math.exp(-2.0 * math.pi * _TAIL_CUT) / (2.0 * math.pi * _TAIL_CUT)
    return _bounded_quadrature(integrand, tail, tol, abs(2.0 * omega - 1.0))


@dataclass(frozen=True)
class OutgoingPrediction:
    """Predicted asymptotic transmitted/reflected soliton parameters."""

    A_T: float
    A_R: float
    phi_T: float | None
    phi_R: float | None
    t_coeff: complex
    r_coeff: complex
    phi_T_status: str = "ok"
    phi_R_status: str = "ok"


def _channel_phase(
    coeff: complex, amplitude: float, x0: float, v: float
) -> tuple[float | None, str]:
    magnitude = abs(coeff)
    if abs(magnitude - 0.5) <= 1e-12:
        return None, "undefined-at-threshold"
    if amplitude == 0.0:
        return None, "absent"
    phase = (
        cmath.phase(coeff)
        + phi0(magnitude)
        + (1.0 - amplitude * amplitude) * abs(x0) / (2.0 * v)
    )
    return phase, "ok"


def outgoing_prediction(q: float, v: float, x0: float) -> OutgoingPrediction:
    """Asymptotic soliton amplitudes and phases after crossing the impurity.

    Amplitudes are A = (2|coeff|-1)_+ per channel.  Each phase combines the
    argument of the scattering coefficient, the phi0 quadrature at its
    modulus, and the launch-position term (1-A^2)|x0|/(2v).  A channel with
    zero amplitude reports its phase as absent; at the threshold modulus
    1/2 the phase is undefined (phi0 diverges) and flagged as such.
    """
    if v <= 0:
        raise ValueError(f"velocity must be positive, got {v}")
    sc = scattering_coefficients(q, v)
    a_t = max(0.0, 2.0 * abs(sc.t) - 1.0)
    a_r = max(0.0, 2.0 * abs(sc.r) - 1.0)
    phi_t, status_t = _channel_phase(sc.t, a_t, x0, v)
    phi_r, status_r = _channel_phase(sc.r, a_r, x0, v)
    return OutgoingPrediction(
        A_T=a_t,
        A_R=a_r,
        phi_T=phi_t,
        phi_R=phi_r,
        t_coeff=complex(sc.t),
        r_coeff=complex(sc.r),
        phi_T_status=status_t,
        phi_R_status=status_r,
    )


@dataclass(frozen=True)
class ZSData:
    """Spectral scattering data of the profile alpha*sech at frequency lam."""

    alpha: float
    a: complex
    b: complex
    r: complex
    lam: complex


def _near_nonpositive_integer(z: complex) -> bool:
    return abs(z.imag) < 1e-12 and z.real < 0.5 and abs(z.real - round(z.real)) < 1e-12


def zs_scattering_data(alpha: float, lam: complex) -> ZSData:
    """Transition and reflection data a, b, r = b/a for alpha*sech.

    a(lam) = Gamma(1/2 - i*lam)^2 / (Gamma(1/2 + alpha - i*lam) *
    Gamma(1/2 - alpha - i*lam)) and b(lam) = i*sin(pi*alpha)/cosh(pi*lam).
    For real lam, |a|^2 + |b|^2 = 1 and b is purely imaginary.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    lam = complex(lam)
    z_num = 0.5 - 1j * lam
    z_plus = 0.5 + alpha - 1j * lam
    z_minus = 0.5 - alpha - 1j * lam
    if _near_nonpositive_integer(z_plus) or _near_nonpositive_integer(z_minus):
        raise ValueError(
            f"a vanishes at lam = {lam} (denominator Gamma pole); r is undefined"
        )
    a = cmath.exp(
        2.0 * complex_log_gamma(z_num)
        - complex_log_gamma(z_plus)
        - complex_log_gamma(z_minus)
    )
    ch = cmath.cosh(cmath.pi * lam)
    if abs(ch) < 1e-300:
        raise ValueError(f"b has a pole at lam = {lam}")
    b = 1j * math.sin(math.pi * alpha) / ch
    return ZSData(alpha=alpha, a=a, b=b, r=b / a, lam=lam)


@dataclass(frozen=True)
class ZSDiscreteData:
    """Discrete eigenvalue data of alpha*sech for 1/2 < alpha < 1."""

    alpha: float
    lambda0: complex
    gamma0: complex
    a_prime: complex


def zs_discrete_data(alpha: float) -> ZSDiscreteData:
    """Eigenvalue lambda0 = i(alpha-1/2), norming constant, and a'(lambda0).

    lambda0 is the zero of a(lam) where the denominator Gamma argument
    1/2 - alpha - i*lam hits its pole at 0; gamma0 = b(lambda0) evaluates
    to i.  The derivative a'(lambda0) comes from the logarithmic-derivative
    (digamma) form of a'/a taken in the limit sense at the zero: the
    numerator Gamma(alpha)^2 survives, and d/dlam of the reciprocal
    denominator Gamma contributes exactly -i/Gamma(2*alpha), so
    a'(lambda0) = -i * Gamma(alpha)^2 / Gamma(2*alpha).
    """
    if not 0.5 < alpha < 1.0:
        raise ValueError(
            f"no discrete eigenvalue: alpha must lie in (1/2, 1), got {alpha}"
        )
    lambda0 = 1j * (alpha - 0.5)
    gamma0 = 1j * math.sin(math.pi * alpha) / cmath.cosh(cmath.pi * lambda0)
    a_prime = -1j * cmath.exp(
        2.0 * complex_log_gamma(alpha) - complex_log_gamma(2.0 * alpha)
    )
    return ZSDiscreteData(
        alpha=alpha, lambda0=lambda0, gamma0=gamma0, a_prime=a_prime
    )


def _reflection_log_integral(alpha: float, tol: float = 1e-10) -> float:
    """(1/pi) * int_0^inf log(1+|r(zeta)|^2) zeta/(zeta^2+(alpha-1/2)^2) dzeta.

    |r|^2 = sin^2(pi*alpha) / (cosh^2(pi*zeta) - sin^2(pi*alpha)) from the
    unitarity relation, decaying like exp(-2*pi*zeta).
    """
    s = math.sin(math.pi * alpha) ** 2
    kappa_sq = (alpha - 0.5) ** 2

    def integrand(z: float) -> float:
        denom = math.cosh(math.pi * z) ** 2 - s
        return math.log1p(s / denom) * z / (z * z + kappa_sq) / math.pi

    tail = s * math.exp(-2.0 * math.pi * _TAIL_CUT) / (2.0 * math.pi * _TAIL_CUT)
    return _bounded_quadrature(integrand, tail, tol, abs(alpha - 0.5))


def asymptotic_soliton(alpha: float) -> SolitonParams | None:
    """Soliton that alpha*sech relaxes to under the free nonlinear flow.

    For alpha < 1/2 the data is pure radiation and None is returned.  For
    alpha > 1/2 the amplitude is 2*alpha - 1 = 2*Im(lambda0), the center
    is 0, and the phase combines arg(gamma0), arg(a'(lambda0)), and the
    reflection-data integral on the positive half-line; the sign
    conventions are fixed so the phase is continuous to 0 at alpha = 1
    (the exact soliton) and match direct long-time simulation.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if alpha == 0.5:
        raise ValueError(
            "threshold case alpha = 1/2: (log t / t)^(1/2) decay, no soliton"
        )
    if alpha < 0.5:
        return None
    data = zs_discrete_data(alpha)
    phase = (
        cmath.phase(data.gamma0)
        + cmath.phase(data.a_prime)
        + _reflection_log_integral(alpha)
    )
    return SolitonParams(
        amplitude=2.0 * alpha - 1.0, velocity=0.0, center=0.0, phase=phase
    )


@dataclass(frozen=True)
class PhaseScalingReport:
    """Comparison of the two printed phase quadratures for alpha*sech."""

    alpha: float
    spectral_integral: float
    theorem_integral: float
    ratio: float
    kernel_gap: float
    verdict: str


def phase_scaling_report(alpha: float, tol: float = 1e-10) -> PhaseScalingReport:
    """Measure how the two phase-quadrature conventions relate.

    The spectral-data integral uses the Lorentzian zeta^2 + (alpha-1/2)^2
    and kernel log(1+|r|^2); the theorem quadrature uses zeta^2 +
    (2*alpha-1)^2 and kernel log(1+|b|^2) without the 1/pi prefactor.
    Substituting zeta -> zeta/2 in the former aligns the Lorentzians
    exactly (the theorem frequency variable is twice the spectral one),
    while the kernels remain genuinely different functions, so the two
    values agree only in limits; both are evaluated and compared rather
    than assumed.
    """
    if not 0.0 < alpha < 1.0 or alpha == 0.5:
        raise ValueError(f"alpha must lie in (0,1) excluding 1/2, got {alpha}")
    spectral = _reflection_log_integral(alpha, tol)
    theorem = phi0(alpha, tol)
    s = math.sin(math.pi * alpha) ** 2
    gap = 0.0
    for z in np.linspace(0.25, 3.0, 12):
        kernel_r = math.log1p(s / (math.cosh(math.pi * z / 2.0) ** 2 - s))
        kernel_b = math.log1p(s / math.cosh(math.pi * z) ** 2)
        gap = max(gap, abs(kernel_r - kernel_b))
    ratio = spectral / theorem if theorem != 0 else math.inf
    verdict = (
        "2*zeta substitution aligns the Lorentzian denominators (theorem "
        "variable = twice the spectral variable); kernels log(1+|r|^2) vs "
        f"log(1+|b|^2) stay distinct (max gap {gap:.3g}), values ratio "
        f"{ratio:.4f} at alpha={alpha}"
    )
    return PhaseScalingReport(
        alpha=alpha,
        spectral_integral=spectral,
        theorem_integral=theorem,
        ratio=ratio,
        kernel_gap=gap,
        verdict=verdict,
    )

"""Closed-form asymptotics of the phononic and electromagnetic Casimir energies.

Material 0 is the gap, material 1 the plates.  Energies are per unit area
(J/m^2), pressures in Pa.  Every function here is an explicit formula; the
only numerics are the x-integrals over [0, 1] and the polylogarithm.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, KB
from .materials import ElasticMaterial, SoundSpeeds, SpeedMode, sound_speeds
from .numerics import QuadratureSpec, integrate, polylog

_X_SPEC = QuadratureSpec(rel_tol=1e-11)


def _check_d(d):
    if not d > 0:
        raise ValueError(f"separation must be positive, got {d!r}")


def _check_T(T):
    if not T >= 0:
        raise ValueError(f"temperature must be non-negative, got {T!r}")


def shear_contrast(gap: ElasticMaterial, plate: ElasticMaterial) -> float:
    """r_mu = (mu0 - mu1) / (mu0 + mu1)."""
    return (gap.mu - plate.mu) / (gap.mu + plate.mu)


def permittivity_contrast(eps_gap: float, eps_plate: float) -> float:
    """r_eps = (eps0 - eps1) / (eps0 + eps1), with conductors as +-1 and 0 for two conductors."""
    g, p = math.isinf(eps_gap), math.isinf(eps_plate)
    if g and p:
        return 0.0
    if g:
        return 1.0
    if p:
        return -1.0
    return (eps_gap - eps_plate) / (eps_gap + eps_plate)


def _sq_clip(x):
    return np.clip(np.square(x), 0.0, 1.0)


# --- phononic ------------------------------------------------------------

def e_perfect(speeds: SoundSpeeds, d: float) -> float:
    """Perfect-reflector energy -(pi^2/1440) hbar (c_l + 2 c_t) / d^3."""
    _check_d(d)
    return -math.pi**2 / 1440.0 * HBAR * (speeds.c_l + 2.0 * speeds.c_t) / d**3


def b_constant(gap: ElasticMaterial, plate: ElasticMaterial) -> float:
    """|8 mu0 (mu0 - mu1) / (lambda0 (mu0 + mu1) + mu0 (mu0 + 3 mu1))|."""
    m0, m1, l0 = gap.mu, plate.mu, gap.lam
    den = l0 * (m0 + m1) + m0 * (m0 + 3.0 * m1)
    if den == 0:
        raise ZeroDivisionError("B denominator vanishes")
    return abs(8.0 * m0 * (m0 - m1) / den)


def e_ln_quantum(gap: ElasticMaterial, plate: ElasticMaterial, d: float,
                 mode: SpeedMode = "c11") -> float:
    """Repulsive T = 0 estimate of the L,N channel, 4 hbar c_l0 sqrt(B) / (pi d^3).

    Diagnostic only: it stems from the omega -> 0 bound state and is never
    added to a total.
    """
    _check_d(d)
    c_l0 = sound_speeds(gap, mode).c_l
    return 4.0 * HBAR * c_l0 * math.sqrt(b_constant(gap, plate)) / (math.pi * d**3)


def e_ln_thermal(gap: ElasticMaterial, plate: ElasticMaterial, d: float, T: float,
                 mode: SpeedMode = "c11") -> float:
    """High-temperature L,N energy, exponentially suppressed in T d."""
    _check_d(d)
    if not T > 0:
        raise ValueError("e_ln_thermal needs T > 0")
    s = sound_speeds(gap, mode)
    b = b_constant(gap, plate)
    pref = -16.0 * HBAR * s.c_l * b**2 / (math.pi**2 * d**3) * (s.c_l / s.c_t) ** 3
    return pref * math.exp(-ln_suppression_exponent(gap, d, T))


def ln_suppression_exponent(gap: ElasticMaterial, d: float, T: float) -> float:
    """4 pi k_B T d / (hbar c_t0)."""
    c_t0 = math.sqrt(gap.mu / gap.rho)
    return 4.0 * math.pi * KB * T * d / (HBAR * c_t0)


def e_m_quantum(gap: ElasticMaterial, plate: ElasticMaterial, d: float,
                spec: QuadratureSpec = _X_SPEC) -> float:
    """T = 0 energy of the SH channel as a single x-integral of Li4."""
    _check_d(d)
    c0 = math.sqrt(gap.mu / gap.rho)
    c1 = math.sqrt(plate.mu / plate.rho)
    m0, m1 = gap.mu, plate.mu
    a = c0**2 / c1**2 - 1.0

    def f(x):
        g = np.sqrt(a * x * x + 1.0)
        return polylog(4, _sq_clip((m0 - m1 * g) / (m0 + m1 * g)))

    if m0 == m1 and a == 0.0:
        return 0.0
    val, _ = integrate(f, 0.0, 1.0, spec)
    return -HBAR * c0 / (16.0 * math.pi**2 * d**3) * val


def e_m_thermal(gap: ElasticMaterial, plate: ElasticMaterial, d: float, T: float) -> float:
    """High-temperature SH energy -(k_B T / 16 pi d^2) Li3(r_mu^2)."""
    _check_d(d)
    _check_T(T)
    return -KB * T / (16.0 * math.pi * d**2) * polylog(3, shear_contrast(gap, plate) ** 2)


# --- electromagnetic comparison -----------------------------------------

def e_em_quantum(eps_gap: float, eps_plate: float, d: float,
                 spec: QuadratureSpec = _X_SPEC) -> float:
    """Static-permittivity T = 0 electromagnetic energy (two Li4 brackets)."""
    _check_d(d)
    for e in (eps_gap, eps_plate):
        if not e >= 1.0:
            raise ValueError(f"permittivity must be >= 1 or infinite, got {e!r}")
    if math.isinf(eps_plate) and math.isinf(eps_gap):
        return 0.0
    if math.isinf(eps_plate):
        # both brackets sit at -1
        val = 2.0 * polylog(4, 1.0)
    else:
        ratio = 0.0 if math.isinf(eps_gap) else eps_plate / eps_gap
        r_eps = permittivity_contrast(eps_gap, eps_plate)

        def f(x):
            g = np.sqrt(1.0 + (ratio - 1.0) * x * x)
            if math.isinf(eps_gap):
                first = np.ones_like(g)
            else:
                first = _sq_clip((eps_gap - eps_plate * g) / (eps_gap + eps_plate * g))
            return polylog(4, first) + polylog(4, _sq_clip((1.0 - g) / (1.0 + g)))

        if r_eps == 0.0:
            return 0.0
        val, _ = integrate(f, 0.0, 1.0, spec)
    return -HBAR * C_LIGHT / (16.0 * math.pi**2 * d**3) * val


def e_em_quantum_small_contrast(eps_gap: float, eps_plate: float, d: float) -> float:
    """Leading small-contrast form -(hbar c / 16 pi^2 d^3) r_eps^2."""
    _check_d(d)
    return -HBAR * C_LIGHT / (16.0 * math.pi**2 * d**3) * permittivity_contrast(eps_gap, eps_plate) ** 2


def e_em_thermal(eps_gap: float, eps_plate: float, d: float, T: float) -> float:
    """High-temperature electromagnetic energy -(k_B T / 16 pi d^2) Li3(r_eps^2)."""
    _check_d(d)
    _check_T(T)
    return -KB * T / (16.0 * math.pi * d**2) * polylog(3, permittivity_contrast(eps_gap, eps_plate) ** 2)


def gamma_ratio(gap: ElasticMaterial, plate: ElasticMaterial) -> float:
    """Gamma = (r_mu / r_eps)^2; math.inf when only the permittivities match."""
    r_mu = shear_contrast(gap, plate)
    r_eps = permittivity_contrast(gap.eps0, plate.eps0)
    if r_mu == 0.0:
        return 0.0
    if r_eps == 0.0:
        return math.inf
    return (r_mu / r_eps) ** 2


def ratio_estimate(gap: ElasticMaterial, plate: ElasticMaterial, d: float, T: float) -> float:
    """Phononic-to-electromagnetic energy ratio (pi k_B T d / hbar c) Gamma."""
    _check_d(d)
    _check_T(T)
    g = gamma_ratio(gap, plate)
    pre = math.pi * KB * T * d / (HBAR * C_LIGHT)
    if pre == 0.0:
        return 0.0
    return pre * g


# --- mechanics -----------------------------------------------------------

def casimir_pressure(gap: ElasticMaterial, plate: ElasticMaterial, d: float, T: float) -> float:
    """Interface pressure -(k_B T / 8 pi d^3) Li3(r_mu^2) = -d e_m_thermal / dd."""
    _check_d(d)
    _check_T(T)
    return -KB * T / (8.0 * math.pi * d**3) * polylog(3, shear_contrast(gap, plate) ** 2)


def apparent_young_modulus(e_bulk: float, gap: ElasticMaterial, plate: ElasticMaterial,
                           d: float, T: float) -> float:
    """Young's modulus seen in a stress-strain test on a film of thickness d, E - 3 p_C."""
    if not e_bulk > 0:
        raise ValueError("bulk Young's modulus must be positive")
    return e_bulk - 3.0 * casimir_pressure(gap, plate, d, T)


# --- bundle --------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormSet:
    """All closed forms at one (d, T).

    ``e_ln_qm`` is a diagnostic and never part of a total.  ``e_ln_T`` is
    NaN at T = 0, where the high-temperature form does not apply.
    """

    e_pr: float
    b: float
    e_ln_qm: float
    e_ln_T: float
    e_m_qm: float
    e_m_T: float
    e_em_qm: float
    e_em_T: float
    gamma: float
    ratio_estimate: float
    pressure: float

    def as_dict(self) -> dict:
        return asdict(self)


def closed_form_set(gap: ElasticMaterial, plate: ElasticMaterial, d: float, T: float,
                    mode: SpeedMode = "c11") -> ClosedFormSet:
    _check_d(d)
    _check_T(T)
    return ClosedFormSet(
        e_pr=e_perfect(sound_speeds(gap, mode), d),
        b=b_constant(gap, plate),
        e_ln_qm=e_ln_quantum(gap, plate, d, mode),
        e_ln_T=e_ln_thermal(gap, plate, d, T, mode) if T > 0 else math.nan,
        e_m_qm=e_m_quantum(gap, plate, d),
        e_m_T=e_m_thermal(gap, plate, d, T),
        e_em_qm=e_em_quantum(gap.eps0, plate.eps0, d),
        e_em_T=e_em_thermal(gap.eps0, plate.eps0, d, T),
        gamma=gamma_ratio(gap, plate),
        ratio_estimate=ratio_estimate(gap, plate, d, T),
        pressure=casimir_pressure(gap, plate, d, T),
    )

r"""Elastic plane-wave reflection and transmission at a planar interface.

Medium ``alpha`` fills z < 0 and carries the incident and reflected waves,
medium ``beta`` fills z > 0.  Waves are expanded on the vector functions

    L = (i/|k|) (k_par, 0, k_z) phi          (P wave)
    M = (0, -i, 0) phi                        (SH wave)
    N = (1/|k|) (-k_z, 0, k_par) phi          (SV wave)

with phi = exp(i(k_par x + k_z z - omega t)) and |k| = omega / c for the
respective sound speed.  The coefficient matrices act on incident amplitude
column vectors ordered (L, M, N):  A_r = R A_i,  A_t = T A_i.

Frequencies may be real (propagating problem) or purely imaginary
(omega = i xi, Matsubara evaluation).  All public functions broadcast over
numpy arrays of ``k_par``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .materials import ElasticMaterial, SoundSpeeds, SpeedMode, sound_speeds

L, M, N = 0, 1, 2


class DegeneratePointError(ValueError):
    pass


class SingularDenominatorError(ArithmeticError):
    """The shared denominator vanishes: a surface-mode pole (Rayleigh/Stoneley)."""


@dataclass(frozen=True)
class SpectralPoint:
    """One (frequency, k_par) point with the axial wavenumbers of both media.

    ``k`` holds (k_L, k_M, k_N) in the incidence medium, ``q`` the same in the
    transmission medium.  Entries are complex and broadcast like ``k_par``.
    """

    freq: complex
    k_par: np.ndarray
    k: tuple
    q: tuple
    speeds_alpha: SoundSpeeds
    speeds_beta: SoundSpeeds
    n: Optional[int] = None

    @property
    def imaginary(self) -> bool:
        return self.freq.real == 0.0 and self.freq.imag > 0.0


@dataclass(frozen=True)
class ScatteringMatrices:
    R: np.ndarray  # (..., 3, 3)
    T: np.ndarray
    point: SpectralPoint
    alpha: ElasticMaterial
    beta: ElasticMaterial


@dataclass(frozen=True)
class IncidentWave:
    amplitudes: np.ndarray  # (A_L, A_M, A_N)
    point: SpectralPoint


def axial(freq: complex, k_par, c: float):
    """k_z = sqrt(omega^2/c^2 - k_par^2) on the outgoing/decaying branch.

    For omega = i xi the result is exactly i * sqrt(xi^2/c^2 + k_par^2).
    """
    k_par = np.asarray(k_par, dtype=float)
    freq = complex(freq)
    if freq.real == 0.0 and freq.imag > 0.0:
        return 1j * np.sqrt((freq.imag / c) ** 2 + k_par**2)
    kz = np.sqrt(np.asarray((freq / c) ** 2 - k_par**2, dtype=complex))
    # principal sqrt already has Re >= 0; flip onto Im >= 0 where needed
    return np.where(kz.imag < 0, -kz, kz)


def axial_wavenumbers(freq, k_par, alpha: ElasticMaterial, beta: ElasticMaterial,
                      mode: SpeedMode = "c11", n: Optional[int] = None) -> SpectralPoint:
    freq = complex(freq)
    k_par = np.asarray(k_par, dtype=float)
    if np.any(k_par < 0):
        raise ValueError("k_par must be non-negative")
    if freq == 0 and np.any(k_par == 0):
        raise DegeneratePointError("freq = 0 and k_par = 0 simultaneously")
    if not (freq.imag == 0 and freq.real > 0) and not (freq.real == 0 and freq.imag > 0) and freq != 0:
        raise ValueError("freq must be real positive or purely imaginary with positive imaginary part")
    sa, sb = sound_speeds(alpha, mode), sound_speeds(beta, mode)
    kl, kt = axial(freq, k_par, sa.c_l), axial(freq, k_par, sa.c_t)
    ql, qt = axial(freq, k_par, sb.c_l), axial(freq, k_par, sb.c_t)
    return SpectralPoint(freq, k_par, (kl, kt, kt), (ql, qt, qt), sa, sb, n)


def matsubara_point(xi, k_par, alpha, beta, mode: SpeedMode = "c11", n=None) -> SpectralPoint:
    return axial_wavenumbers(1j * float(xi), k_par, alpha, beta, mode, n)


def r_mm(mu_a, mu_b, kM, qM):
    """SH reflection (mu_a k_M - mu_b q_M) / (mu_a k_M + mu_b q_M)."""
    return (mu_a * kM - mu_b * qM) / (mu_a * kM + mu_b * qM)


def r_mm_imag(alpha: ElasticMaterial, beta: ElasticMaterial, xi, k_par):
    """Real-valued R_MM at omega = i xi (transverse speeds do not depend on the mode)."""
    ka = np.sqrt(xi**2 * (alpha.rho / alpha.mu) + k_par**2)
    kb = np.sqrt(xi**2 * (beta.rho / beta.mu) + k_par**2)
    return r_mm(alpha.mu, beta.mu, ka, kb)


def _knott(w, kp, kL, kN, qL, qN, cLa, cNa, cLb, cNb, la, ma, lb, mb):
    """Shared denominator and all L/N numerators, transcribed term by term.

    Returns (delta, delta_scale, coefficient dict).  ``delta_scale`` is the
    largest magnitude among the grouped terms of the denominator.
    """
    w2 = w * w
    w4 = w2 * w2
    kp2 = kp * kp
    kL2, kN2, qL2, qN2 = kL * kL, kN * kN, qL * qL, qN * qN
    cLa2, cNa2, cLb2, cNb2 = cLa**2, cNa**2, cLb**2, cNb**2

    d_mm = ma * mb * (
        w4 * (kL * qN / (cLb2 * cNa2) + kN * qL / (cLa2 * cNb2))
        + kp2 * (kL2 * (kp2 - qN2 + 2 * qL * qN) + kL * kN * (2 * qL2 + qN2 - kp2 - 4 * qL * qN)
                 + qL * (kp2 - kN2) * (qL - qN))  # closes the determinant; checked against a direct 4x4 solve
    )
    d_aa = kL * ma**2 * (kL * (kN2 - kp2) + 2 * kN * kp2) * (kp2 + qL * qN)
    d_bb = qL * mb**2 * (qL * (qN2 - kp2) + 2 * kp2 * qN) * (kp2 + kL * kN)
    d_lb = w2 * lb * (ma * (kL * qN * w2 / cNa2 + kp2 * (kp2 + 2 * kL * kN - kN2))
                      + mb * (qN2 - kp2) * (kp2 + kL * kN)) / cLb2
    d_la = w2 * la * (mb * (kN * qL * w2 / cNb2 + kp2 * (kp2 + 2 * qL * qN - qN2))
                      + ma * (kN2 - kp2) * (kp2 + qL * qN)) / cLa2
    delta = 2 * (d_mm + d_aa + d_bb) + d_lb + d_la
    scale = np.max(np.abs(np.stack(np.broadcast_arrays(2 * d_mm, 2 * d_aa, 2 * d_bb, d_lb, d_la))), axis=0)

    rll = -2 * (
        ma * mb * (
            w4 * (kN * qL / (cLa2 * cNb2) - kL * qN / (cLb2 * cNa2))
            + kp2 * (kL2 * (kp2 + 2 * qL * qN) + kL * kN * (kp2 + 3 * qL * qN)
                     - (kL + kN) * (kL * qN2 + kN * qL2) + qL * qN * (kN2 - kp2) + kp2 * qL2
                     - kL * kN * qL * (qL - qN))  # closes the determinant; checked against a direct 4x4 solve
        )
        - kL * ma**2 * (kp2 * (kL + 2 * kN) - kL * kN2) * (kp2 + qL * qN)
        + qL * mb**2 * (kL * kN - kp2) * (kp2 * (qL - 2 * qN) - qL * qN2)
    ) + w2 * lb * (ma * (kL * qN * w2 / cNa2 + kp2 * (2 * kL * kN + kN2 - kp2))
                   + mb * (qN2 - kp2) * (kL * kN - kp2)) / cLb2 \
      - w2 * la * (mb * (kN * qL * w2 / cNb2 + kp2 * (2 * qL * qN - qN2 + kp2))
                   + ma * (kN2 - kp2) * (qL * qN + kp2)) / cLa2

    rln = (
        (kp2 - kN2) * ma * (w2 * lb / cLb2 + 2 * ma * (kp2 + qL * qN))
        + mb * (w2 * (qN2 - kp2) * lb / cLb2 - 2 * mb * (qL2 * (kp2 - qN2) - 2 * kp2 * qL * qN))
        - 2 * ma * mb * (kN2 * qL * (qL - qN) - kp2 * (-kp2 + qL2 - 3 * qL * qN + qN2))
    ) * (-2j * cNa * kN * kp / cLa)

    rnl = (
        w2 * la * (2 * ma * (kp2 + qL * qN) + mb * (-kp2 - 2 * qL * qN + qN2)) / cLa2
        - w2 * lb * (2 * kp2 * ma + (qN2 - kp2) * mb) / cLb2
        + 2 * ma * mb * (2 * qL * qN * (kp2 - kL2) + kL2 * (qN2 - kp2) - 2 * kp2 * qL2)
        + 4 * kL2 * ma**2 * (kp2 + qL * qN)
        + 2 * qL * mb**2 * (qL * (kp2 - qN2) - 2 * kp2 * qN)
    ) * (2j * cLa * kL * kp / cNa)

    rnn = -2 * (
        ma * mb * (
            w4 * (kL * qN / (cLb2 * cNa2) - kN * qL / (cLa2 * cNb2))
            + kp2 * (kL2 * (kp2 + 2 * qL * qN - qN2) + kL * kN * (kp2 - 2 * qL2 + 4 * qL * qN - qN2)
                     + qL * (kp2 - kN2) * (qL - qN))
        )
        + kL * ma**2 * (qL * qN + kp2) * (kL * (kN2 - kp2) - 2 * kN * kp2)
        + qL * mb**2 * (kL * kN - kp2) * (qL * (kp2 - qN2) - 2 * kp2 * qN)
    ) - w2 * lb * (ma * (kL * (qN * w2 / cNa2 - 2 * kN * kp2) + kp2 * (kp2 - kN2))
                   + (kp2 - qN2) * mb * (kL * kN - kp2)) / cLb2 \
      + w2 * la * (mb * (kN * qL * w2 / cNb2 + kp2 * (qN2 - kp2 - 2 * qL * qN))
                   + (kp2 - kN2) * ma * (qL * qN + kp2)) / cLa2

    tll = (
        2 * w2 * ma * (kN * (2 * kp2 * ma + (qN2 - kp2) * mb) / cLa2 + qN * (kL2 * ma + kp2 * mb) / cNa2)
        + w2 * la * (ma * (qN * w2 / cNa2 + 2 * kN * kp2) + kN * (qN2 - kp2) * mb) / cLa2
    ) * (2 * cLa * kL / cLb)

    tln = w2 * (
        (la + 2 * ma) * ((kN2 - kp2) * ma + (kp2 - qN2) * mb) / cLa2
        + 2 * kL * qN * ma * (mb - ma) / cNa2
    ) * (2j * cNa * kN * kp / cLb)

    tnl = (
        2 * w2 * (kN * qL * (la + 2 * ma) * (mb - ma) / cLa2 + ma * (kL2 * ma - qL2 * mb) / cNa2)
        + w4 * ma * (la / (cLa2 * cNa2) - lb / (cLb2 * cNa2))
    ) * (2j * cLa * kL * kp / cNb)

    tnn = (w2 / cNa2) * (
        cNa2 * qL * (la + 2 * ma) * ((kN2 - kp2) * ma + 2 * kp2 * mb) / cLa2
        + kL * w2 * ma * lb / cLb2
        + 2 * kL * ma * (kp2 * ma + qL2 * mb)
    ) * (2 * cNa * kN / cNb)

    return delta, scale, dict(LL=rll, LN=rln, NL=rnl, NN=rnn, TLL=tll, TLN=tln, TNL=tnl, TNN=tnn)


def _scale(point: SpectralPoint):
    """Wavenumber scale making the dimensionless inputs order one."""
    sa, sb = point.speeds_alpha, point.speeds_beta
    c_min = min(sa.c_t, sb.c_t)
    s = np.maximum(np.asarray(point.k_par, dtype=float), abs(point.freq) / c_min)
    return s


def reflection_transmission(alpha: ElasticMaterial, beta: ElasticMaterial,
                            point: SpectralPoint, tol: float = 64 * np.finfo(float).eps) -> ScatteringMatrices:
    """Full 3x3 reflection and transmission matrices at ``point``.

    Raises SingularDenominatorError where the shared denominator cancels to
    rounding level, and DegeneratePointError at omega = 0.
    """
    if point.freq == 0:
        raise DegeneratePointError("omega = 0: use static_mode_limits or bound_state")
    sa, sb = point.speeds_alpha, point.speeds_beta
    if (alpha.lam, alpha.mu, sa.c_l, sa.c_t) == (beta.lam, beta.mu, sb.c_l, sb.c_t):
        # no interface: exact zeros instead of cancelled rounding
        shape = np.broadcast(np.asarray(point.k_par), point.k[L]).shape
        T = np.zeros(shape + (3, 3), dtype=complex)
        T[...] = np.eye(3)
        return ScatteringMatrices(np.zeros(shape + (3, 3), dtype=complex), T, point, alpha, beta)
    s = _scale(point)
    w = point.freq / s
    kp = np.asarray(point.k_par) / s
    kL, kM, kN = (x / s for x in point.k)
    qL, qM, qN = (x / s for x in point.q)

    delta, dscale, num = _knott(w, kp, kL, kN, qL, qN, sa.c_l, sa.c_t, sb.c_l, sb.c_t,
                                alpha.lam, alpha.mu, beta.lam, beta.mu)
    if np.any(np.abs(delta) <= tol * dscale):
        raise SingularDenominatorError("shared denominator vanishes at this point (surface-mode pole)")

    shape = np.broadcast(kp, kL, qL).shape
    R = np.zeros(shape + (3, 3), dtype=complex)
    T = np.zeros(shape + (3, 3), dtype=complex)
    R[..., L, L] = num["LL"] / delta
    R[..., L, N] = num["LN"] / delta
    R[..., N, L] = num["NL"] / delta
    R[..., N, N] = num["NN"] / delta
    R[..., M, M] = r_mm(alpha.mu, beta.mu, kM, qM)
    T[..., L, L] = num["TLL"] / delta
    T[..., L, N] = num["TLN"] / delta
    T[..., N, L] = num["TNL"] / delta
    T[..., N, N] = num["TNN"] / delta
    T[..., M, M] = 2 * alpha.mu * kM / (alpha.mu * kM + beta.mu * qM)
    return ScatteringMatrices(R, T, point, alpha, beta)


def scattering(alpha: ElasticMaterial, beta: ElasticMaterial, freq, k_par,
               mode: SpeedMode = "c11") -> ScatteringMatrices:
    return reflection_transmission(alpha, beta, axial_wavenumbers(freq, k_par, alpha, beta, mode))


# --- boundary conditions -------------------------------------------------

def _basis(freq, kp, kz, c_l, c_t):
    """Cartesian amplitude vectors of L, M, N for a wave with axial number kz."""
    kl_mag = freq / c_l
    kt_mag = freq / c_t
    z = np.zeros_like(kz)
    one = np.ones_like(kz)
    kp = kp * one
    Lv = np.stack([1j * kp / kl_mag, z, 1j * kz / kl_mag], axis=-1)
    Mv = np.stack([z, -1j * one, z], axis=-1)
    Nv = np.stack([-kz / kt_mag, z, kp / kt_mag], axis=-1)
    return Lv, Mv, Nv


def _traction(a, kp, kz, lam, mu):
    """sigma_{i3} of a plane wave a * exp(i(kp x + kz z))."""
    K = np.stack(np.broadcast_arrays(kp * np.ones_like(kz), np.zeros_like(kz), kz), axis=-1)
    div = 1j * np.sum(K * a, axis=-1)
    t = 1j * mu * (K * a[..., 2:3] + kz[..., None] * a)
    t[..., 2] += lam * div
    return t


def interface_fields(inc: IncidentWave, sm: ScatteringMatrices):
    """Displacement and traction on both sides of z = 0.

    Returns a list of (side, kind, vectors) where vectors is an array of the
    individual wave contributions with shape (n_waves, 3).
    """
    p = inc.point
    a = np.asarray(inc.amplitudes, dtype=complex)
    R = np.asarray(sm.R).reshape(3, 3)
    T = np.asarray(sm.T).reshape(3, 3)
    ar, at = R @ a, T @ a
    kp = np.asarray(p.k_par, dtype=float).reshape(())
    kL, _, kN = (np.asarray(x).reshape(()) for x in p.k)
    qL, _, qN = (np.asarray(x).reshape(()) for x in p.q)
    kM, qM = np.asarray(p.k[M]).reshape(()), np.asarray(p.q[M]).reshape(())
    sa, sb = p.speeds_alpha, p.speeds_beta
    w = p.freq

    alpha_waves, beta_waves = [], []
    for sign, amps in ((+1, a), (-1, ar)):
        kzs = (sign * kL, sign * kM, sign * kN)
        vecs = [_basis(w, kp, kz, sa.c_l, sa.c_t)[j] for j, kz in enumerate(kzs)]
        for j in range(3):
            alpha_waves.append((amps[j] * vecs[j], kp, kzs[j]))
    kzs = (qL, qM, qN)
    for j, kz in enumerate(kzs):
        vec = _basis(w, kp, kz, sb.c_l, sb.c_t)[j]
        beta_waves.append((at[j] * vec, kp, kz))

    def disp(waves):
        return np.array([v for v, _, _ in waves])

    def trac(waves, mat):
        return np.array([_traction(v, kx, kz, mat.lam, mat.mu) for v, kx, kz in waves])

    return {
        "u_alpha": disp(alpha_waves), "u_beta": disp(beta_waves),
        "t_alpha": trac(alpha_waves, sm.alpha), "t_beta": trac(beta_waves, sm.beta),
    }


def projectors(point: SpectralPoint):
    """Rows projecting Cartesian vectors onto (L, M, N) of the incident P direction."""
    kp = float(np.asarray(point.k_par).reshape(()))
    kL = complex(np.asarray(point.k[L]).reshape(()))
    return np.array([[kp, 0, kL], [0, 1, 0], [-kL, 0, kp]], dtype=complex)


def boundary_residual(inc: IncidentWave, sm: ScatteringMatrices, floor: float = 1e-300):
    """Relative residuals (no_slip, stress) of the projected interface conditions.

    Each projected equation is compared as |lhs - rhs| / max(|lhs|, |rhs|,
    largest single contribution, floor); the maximum over each triplet is
    returned.
    """
    f = interface_fields(inc, sm)
    P = projectors(inc.point)
    out = []
    for a_key, b_key in (("u_alpha", "u_beta"), ("t_alpha", "t_beta")):
        lhs_terms = f[a_key] @ P.T  # (waves, 3)
        rhs_terms = f[b_key] @ P.T
        lhs, rhs = lhs_terms.sum(axis=0), rhs_terms.sum(axis=0)
        biggest = np.max(np.abs(np.concatenate([lhs_terms, rhs_terms])), axis=0)
        scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs), biggest, np.full(3, floor)])
        out.append(float(np.max(np.abs(lhs - rhs) / scale)))
    return tuple(out)


# --- omega -> 0 ----------------------------------------------------------

def static_mode_limits(alpha: ElasticMaterial, beta: ElasticMaterial):
    """(R_MM(0), prefactor of the omega^-2 divergence of the L/N block)."""
    ma, mb, la = alpha.mu, beta.mu, alpha.lam
    r0 = (ma - mb) / (ma + mb)
    b = 4 * ma * (ma - mb) / (la * (ma + mb) + ma * (ma + 3 * mb))
    return r0, b


def static_ln_matrix(alpha: ElasticMaterial, beta: ElasticMaterial, k_par: float,
                     mode: SpeedMode = "c11") -> np.ndarray:
    """Leading omega^2 * R_LN block as omega -> 0 at fixed k_par."""
    sa = sound_speeds(alpha, mode)
    _, b = static_mode_limits(alpha, beta)
    ratio = sa.c_t / sa.c_l
    shape = np.array([[1.0, -ratio], [-1.0 / ratio, 1.0]])
    return (sa.c_l * k_par) ** 2 * b * shape


@dataclass(frozen=True)
class BoundState:
    """omega = 0 interface state built from the one-sided states psi_alpha, psi_beta."""

    k_par: float
    speeds_alpha: SoundSpeeds
    speeds_beta: SoundSpeeds
    C_alpha: float
    C_beta: float
    phi: float = 0.0

    def psi_alpha(self, z):
        z = np.asarray(z, dtype=float)
        k, cl, cn = self.k_par, self.speeds_alpha.c_l, self.speeds_alpha.c_t
        norm = math.sqrt(2 * k / (cl**4 + cn**4))
        a = np.array([1j * math.cos(self.phi) * cl**2, 1j * math.sin(self.phi) * cl**2, -cn**2])
        b = (cl**2 - cn**2) * np.array([1j * math.cos(self.phi), 1j * math.sin(self.phi), 1.0])
        env = np.where(z < 0, np.exp(k * np.minimum(z, 0.0)), 0.0)
        return norm * env[..., None] * (a + (k * z)[..., None] * b)

    def psi_beta(self, z):
        z = np.asarray(z, dtype=float)
        k, cl, cn = self.k_par, self.speeds_beta.c_l, self.speeds_beta.c_t
        norm = math.sqrt(2 * k / (cl**4 + cn**4))
        a = np.array([1j * math.cos(self.phi) * cl**2, 1j * math.sin(self.phi) * cl**2, cn**2])
        b = (cn**2 - cl**2) * np.array([1j * math.cos(self.phi), 1j * math.sin(self.phi), -1.0])
        env = np.where(z > 0, np.exp(-k * np.maximum(z, 0.0)), 0.0)
        return norm * env[..., None] * (a + (k * z)[..., None] * b)

    def profile(self, z):
        """Normalised combination (C_a psi_a - C_b psi_b) / sqrt(C_a^2 + C_b^2)."""
        ca, cb = self.C_alpha, self.C_beta
        return (ca * self.psi_alpha(z) - cb * self.psi_beta(z)) / math.hypot(ca, cb)

    def velocity(self, z):
        # d/dt of an omega = 0 state
        return 0j * self.profile(z)


def bound_state(alpha: ElasticMaterial, beta: ElasticMaterial, k_par: float,
                mode: SpeedMode = "c11", phi: float = 0.0) -> BoundState:
    if not k_par > 0:
        raise ValueError("k_par must be positive")
    sa, sb = sound_speeds(alpha, mode), sound_speeds(beta, mode)

    def weight(mat, s):
        return mat.mu * math.sqrt(s.c_l**4 + s.c_t**4) / (s.c_l**2 - s.c_t**2)

    return BoundState(k_par, sa, sb, weight(alpha, sa), weight(beta, sb), phi)

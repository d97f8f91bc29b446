"""Lifshitz-type free energy of an elastic gap between two identical plates.

The energy per unit area splits into the SH channel (M) and the coupled P/SV
channel (L, N).  Transverse integrals run over u = k_par d, frequencies are
measured as v = xi d / c.  With these variables every integrand depends on
d only through the overall prefactor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .closedforms import ClosedFormSet, closed_form_set, e_perfect
from .constants import HBAR, KB
from .materials import ElasticMaterial, SpeedMode, sound_speeds
from .numerics import (ConvergenceError, QuadratureSpec, SumSpec, det_small, integrate,
                       matsubara_sum)
from .scattering import L, M, N, SpectralPoint, matsubara_point, r_mm_imag, reflection_transmission

MAX_PREDICTED_TERMS = 2_000_000
INNER_SPEC = QuadratureSpec(rel_tol=1e-10, abs_floor=0.0, max_subdivisions=4000)
OUTER_SPEC = QuadratureSpec(rel_tol=1e-9, max_subdivisions=4000)
SUM_SPEC = SumSpec()
IMAG_TOL = 1e-10
_LN = [L, N]


@dataclass(frozen=True)
class LayerStack:
    plate: ElasticMaterial
    gap: ElasticMaterial
    d: float
    T: float
    mode: SpeedMode = "c11"

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"d > 0 violated (d={self.d!r})")
        if not self.T >= 0:
            raise ValueError(f"T >= 0 violated (T={self.T!r})")
        sound_speeds(self.gap, self.mode)
        sound_speeds(self.plate, self.mode)

    @property
    def trivial(self) -> bool:
        """No interface: the plates are made of the gap material."""
        return self.plate == self.gap


@dataclass(frozen=True)
class TranslationMatrix:
    diag: np.ndarray  # (..., 3), entries exp(-d kappa_P) ordered (L, M, N)
    point: SpectralPoint

    def matrix(self) -> np.ndarray:
        out = np.zeros(self.diag.shape + (3,))
        for j in range(3):
            out[..., j, j] = self.diag[..., j]
        return out


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energies per unit area (J/m^2) with bookkeeping.

    ``e_total`` is ``e_m + e_ln``; the closed forms ride along in ``closed``.
    """

    e_m: float
    e_ln: float
    e_total: float
    closed: ClosedFormSet
    meta: dict = field(default_factory=dict)


# --- building blocks -----------------------------------------------------

def matsubara_frequency(n: int, T: float) -> float:
    return 2.0 * math.pi * KB * T * n / HBAR


def translation(point: SpectralPoint, gap: ElasticMaterial, d: float) -> TranslationMatrix:
    """Diagonal propagation factors exp(-d sqrt(xi^2/c_P^2 + k_par^2)) across the gap."""
    if not point.imaginary and point.freq != 0:
        raise ValueError("translation needs an imaginary-frequency point")
    s = sound_speeds(gap, point.speeds_alpha.mode)
    xi = point.freq.imag
    kp = np.asarray(point.k_par, dtype=float)
    kap_l = np.sqrt((xi / s.c_l) ** 2 + kp**2)
    kap_t = np.sqrt((xi / s.c_t) ** 2 + kp**2)
    diag = np.stack([np.exp(-d * kap_l), np.exp(-d * kap_t), np.exp(-d * kap_t)], axis=-1)
    return TranslationMatrix(diag, point)


def round_trip(stack: LayerStack, point: SpectralPoint) -> np.ndarray:
    """N = R U R U for waves in the gap bouncing off two identical plates."""
    sm = reflection_transmission(stack.gap, stack.plate, point)
    u = translation(point, stack.gap, stack.d).diag
    RU = sm.R * u[..., None, :]
    return RU @ RU


def _real_part(z, what: str):
    z = np.asarray(z)
    scale = np.maximum(np.abs(z.real), np.finfo(float).tiny)
    bad = np.abs(z.imag) > IMAG_TOL * scale
    if np.any(bad):
        worst = float(np.max(np.abs(z.imag) / scale))
        raise ArithmeticError(f"{what}: imaginary part {worst:.3g} relative exceeds tolerance")
    return z.real


# --- M channel -----------------------------------------------------------

def _m_integrand(stack: LayerStack, v: float):
    """u -> u ln(1 - R_MM^2 exp(-2 kappa d)) at v = xi d / c_t0."""
    c0 = math.sqrt(stack.gap.mu / stack.gap.rho)
    xi = v * c0 / stack.d

    def f(u):
        r = r_mm_imag(stack.gap, stack.plate, xi, u / stack.d)
        return u * np.log1p(-(r * r) * np.exp(-2.0 * np.sqrt(v * v + u * u)))

    return f


def _predicted_terms(T: float, d: float, c: float, tol: float) -> float:
    """Matsubara terms needed before exp(-2 xi_n d / c) falls below ``tol``."""
    v1 = 2.0 * math.pi * KB * T * d / (HBAR * c)
    return math.inf if v1 == 0 else math.log(1.0 / tol) / (2.0 * v1)


def energy_m(stack: LayerStack, spec: SumSpec = SUM_SPEC, meta: dict | None = None) -> float:
    """SH-channel free energy, n = 0 at half weight.

    Falls back to the T = 0 double integral when the Matsubara sum would need
    more than MAX_PREDICTED_TERMS terms (including T = 0 itself).
    """
    meta = {} if meta is None else meta
    c0 = math.sqrt(stack.gap.mu / stack.gap.rho)
    if _predicted_terms(stack.T, stack.d, c0, spec.rel_tol) > MAX_PREDICTED_TERMS:
        meta["m_path"] = "quantum"
        return energy_m_quantum(stack, meta=meta)
    meta["m_path"] = "matsubara"
    if stack.plate.mu == stack.gap.mu and stack.plate.rho == stack.gap.rho:
        meta["m_terms"], meta["m_quad_err"] = 0, 0.0
        return 0.0
    v1 = 2.0 * math.pi * KB * stack.T * stack.d / (HBAR * c0)
    errs = []

    def term(n):
        val, err = integrate(_m_integrand(stack, n * v1), 0.0, math.inf, INNER_SPEC)
        errs.append(err)
        return val

    total, used = matsubara_sum(term, "half", spec)
    pre = KB * stack.T / (2.0 * math.pi * stack.d**2)
    meta["m_terms"] = used
    meta["m_quad_err"] = pre * math.fsum(errs)
    return pre * total


def _double_integral(inner_factory, spec_outer=OUTER_SPEC, spec_inner=INNER_SPEC, v_min=0.0):
    """int_{v_min}^inf dv int_0^inf du f_v(u), with the inner error summed in."""
    inner_err = []

    def outer(vs):
        out = np.empty(len(vs))
        for i, v in enumerate(vs):
            out[i], e = integrate(inner_factory(float(v)), 0.0, math.inf, spec_inner)
            inner_err.append(e)
        return out

    val, err = integrate(outer, v_min, math.inf, spec_outer)
    return val, err + max(inner_err, default=0.0)


def energy_m_quantum(stack: LayerStack, meta: dict | None = None) -> float:
    """T = 0 SH energy, (hbar / 4 pi^2) int dxi int k dk ln(1 - R_MM^2 e^{-2 d kappa})."""
    meta = {} if meta is None else meta
    if stack.plate.mu == stack.gap.mu and stack.plate.rho == stack.gap.rho:
        meta["m_quad_err"] = 0.0
        return 0.0
    c0 = math.sqrt(stack.gap.mu / stack.gap.rho)
    val, err = _double_integral(lambda v: _m_integrand(stack, v))
    pre = HBAR * c0 / (4.0 * math.pi**2 * stack.d**3)
    meta["m_quad_err"] = abs(pre) * err
    return pre * val


# --- L, N channel --------------------------------------------------------

class _LNIntegrand:
    """u -> u Re ln det(1 - N_LN) at one imaginary frequency, with diagnostics."""

    def __init__(self, stack: LayerStack, xi: float):
        self.stack, self.xi = stack, xi
        self.max_radius = 0.0
        self.nonpositive = 0

    def __call__(self, u):
        st = self.stack
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        # beyond this the round trip is below double precision relative to 1
        live = u < 400.0
        if not np.any(live):
            return out
        pt = matsubara_point(self.xi, u[live] / st.d, st.gap, st.plate, st.mode)
        nmat = round_trip(st, pt)[..., _LN, :][..., :, _LN]
        # det(1 - N) - 1 = det N - tr N for 2x2, kept apart from the 1 for precision
        tr = nmat[..., 0, 0] + nmat[..., 1, 1]
        x = _real_part(det_small(nmat) - tr, "det(1 - N)")
        eig = np.linalg.eigvals(nmat.real)
        self.max_radius = max(self.max_radius, float(np.max(np.abs(eig))))
        self.nonpositive += int(np.sum(x <= -1.0))
        out[live] = u[live] * np.log(np.abs(1.0 + x)) if np.any(x <= -1.0) else u[live] * np.log1p(x)
        return out


def energy_ln(stack: LayerStack, spec: SumSpec = SUM_SPEC, meta: dict | None = None) -> float:
    """Coupled P/SV free energy, Matsubara sum from n = 1 (the n = 0 term is excluded).

    At low temperature (more than MAX_PREDICTED_TERMS terms) the sum becomes
    (hbar / 2 pi) int_{xi_1 / 2}^inf dxi, dropping the n = 0 cell.
    """
    meta = {} if meta is None else meta
    if not stack.T > 0:
        raise ValueError("energy_ln needs T > 0")
    if stack.trivial:
        meta.update(ln_terms=0, ln_quad_err=0.0, max_spectral_radius=0.0, nonpositive_det=0)
        return 0.0
    c_l0 = sound_speeds(stack.gap, stack.mode).c_l
    run = _LNRunner(stack)
    try:
        result = _ln_sum(stack, spec, meta, run, c_l0)
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"L,N channel did not converge ({exc}); largest round-trip spectral radius "
            f"{run.max_radius:.3g}, {run.nonpositive} points with det(1 - N) <= 0",
            exc.value, exc.error) from None
    meta["max_spectral_radius"] = run.max_radius
    meta["nonpositive_det"] = run.nonpositive
    return result


class _LNRunner:
    """xi -> transverse integral of the L,N integrand, collecting diagnostics."""

    def __init__(self, stack: LayerStack):
        self.stack = stack
        self.max_radius = 0.0
        self.nonpositive = 0
        self.errors: list[float] = []

    def __call__(self, xi: float) -> float:
        f = _LNIntegrand(self.stack, xi)
        try:
            val, err = integrate(f, 0.0, math.inf, INNER_SPEC)
        finally:
            self.max_radius = max(self.max_radius, f.max_radius)
            self.nonpositive += f.nonpositive
        self.errors.append(err)
        return val


def _ln_sum(stack: LayerStack, spec: SumSpec, meta: dict, run: _LNRunner, c_l0: float) -> float:
    xi1 = matsubara_frequency(1, stack.T)
    if _predicted_terms(stack.T, stack.d, c_l0, spec.rel_tol) > MAX_PREDICTED_TERMS:
        meta["ln_path"] = "integral"
        scale = c_l0 / stack.d
        val, err = integrate(lambda vs: np.array([run(float(v) * scale) for v in vs]),
                             0.5 * xi1 / scale, math.inf, OUTER_SPEC)
        pre = HBAR * c_l0 / (4.0 * math.pi**2 * stack.d**3)
        meta["ln_terms"] = 0
        meta["ln_quad_err"] = abs(pre) * err
        return pre * val
    meta["ln_path"] = "matsubara"
    total, used = matsubara_sum(lambda n: run(n * xi1), "zero", spec)
    pre = KB * stack.T / (2.0 * math.pi * stack.d**2)
    meta["ln_terms"] = used
    meta["ln_quad_err"] = pre * math.fsum(run.errors)
    return pre * total


# --- perfect reflectors --------------------------------------------------

@lru_cache(maxsize=1)
def _unit_reflector_integral() -> tuple[float, float]:
    """int_0^inf dv int_0^inf u ln(1 - exp(-2 sqrt(u^2 + v^2))) du (R = 1)."""
    def factory(v):
        def f(u):
            return u * np.log1p(-np.exp(-2.0 * np.sqrt(v * v + u * u)))
        return f

    return _double_integral(factory)


def energy_perfect_reflector(gap: ElasticMaterial, d: float, mode: SpeedMode = "c11",
                             per_channel: bool = False):
    """Numeric energy with R = identity for all three polarizations.

    Returns the total, or the (L, M, N) contributions when ``per_channel``.
    """
    if not d > 0:
        raise ValueError("d must be positive")
    s = sound_speeds(gap, mode)
    val, _ = _unit_reflector_integral()
    parts = tuple(HBAR * c / (4.0 * math.pi**2 * d**3) * val for c in (s.c_l, s.c_t, s.c_t))
    return parts if per_channel else math.fsum(parts)


# --- total ---------------------------------------------------------------

def energy_total(stack: LayerStack) -> EnergyBreakdown:
    """E_M + E_LN with closed forms and convergence metadata.

    At T = 0 the L,N contribution is zero: without the excluded n = 0 term
    there is no thermal L,N sector left.
    """
    meta: dict = {"d": stack.d, "T": stack.T, "mode": stack.mode}
    closed = closed_form_set(stack.gap, stack.plate, stack.d, stack.T, stack.mode)
    if stack.trivial:
        meta.update(m_path="trivial", ln_path="trivial")
        return EnergyBreakdown(0.0, 0.0, 0.0, closed, meta)
    e_m = energy_m(stack, meta=meta)
    if stack.T > 0:
        e_ln = energy_ln(stack, meta=meta)
    else:
        e_ln = 0.0
        meta["ln_path"] = "absent"
    return EnergyBreakdown(e_m, e_ln, e_m + e_ln, closed, meta)


__all__ = [
    "LayerStack", "TranslationMatrix", "EnergyBreakdown", "ConvergenceError",
    "matsubara_frequency", "translation", "round_trip", "energy_m", "energy_m_quantum",
    "energy_ln", "energy_perfect_reflector", "energy_total", "e_perfect",
]

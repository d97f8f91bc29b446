"""Polylogarithms, adaptive quadrature, Matsubara sums and small determinants."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.special import bernoulli


class ConvergenceError(ArithmeticError):
    """Raised when a quadrature or a sum misses its tolerance.

    ``value`` and ``error`` carry the best estimate reached.
    """

    def __init__(self, msg, value=math.nan, error=math.inf):
        super().__init__(msg)
        self.value = value
        self.error = error


# --- polylogarithm -------------------------------------------------------

_ZETA = {3: 1.2020569031595942854, 4: math.pi**4 / 90}
_BERN = bernoulli(40)
_SERIES_SWITCH = 0.5


def _zeta_int(m: int) -> float:
    """Riemann zeta at an integer m <= 4, m != 1."""
    if m in _ZETA:
        return _ZETA[m]
    if m == 2:
        return math.pi**2 / 6
    if m == 0:
        return -0.5
    # m < 0: zeta(-n) = (-1)^n B_{n+1} / (n + 1)
    n = -m
    return (-1) ** n * _BERN[n + 1] / (n + 1)


def _li_series(s, z, nterms=60):
    k = np.arange(1, nterms + 1, dtype=float)
    return np.sum(np.power.outer(z, k) / k**s, axis=-1)


def _li_near_one(s, z, nterms=40):
    # Li_s(e^m) = sum_{k != s-1} zeta(s-k) m^k/k! + m^(s-1)/(s-1)! (H_{s-1} - ln(-m))
    m = np.log(z)
    out = np.zeros_like(z)
    term = np.ones_like(z)  # m^k / k!
    for k in range(nterms):
        if k != s - 1:
            out += _zeta_int(s - k) * term
        term = term * m / (k + 1)
    harmonic = sum(1.0 / j for j in range(1, s))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_part = np.where(m < 0, harmonic - np.log(-np.where(m < 0, m, -1.0)), 0.0)
    out += m ** (s - 1) / math.factorial(s - 1) * log_part
    return out


def polylog(s: int, z):
    """Real polylogarithm Li_s(z) for s in {3, 4} and 0 <= z <= 1.

    Power series below 1/2, the expansion in ln z about z = 1 above.
    Accepts scalars or arrays.
    """
    if s not in (3, 4):
        raise ValueError("only orders 3 and 4 are supported")
    arr = np.asarray(z, dtype=float)
    if np.any(~((arr >= 0) & (arr <= 1))):
        raise ValueError("polylog argument must lie in [0, 1]")
    out = np.empty_like(arr)
    lo = arr <= _SERIES_SWITCH
    out[lo] = _li_series(s, arr[lo])
    hi = ~lo
    if np.any(hi):
        zh = arr[hi]
        vals = _li_near_one(s, zh)
        vals[zh == 1.0] = _ZETA[s]
        out[hi] = vals
    return out if out.ndim else float(out)


# --- quadrature ----------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_floor: float = 0.0
    max_subdivisions: int = 2000
    transform: Literal["none", "semi-infinite-map"] = "none"

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-2):
            raise ValueError("rel_tol must lie in (0, 1e-2]")
        if self.max_subdivisions < 8:
            raise ValueError("max_subdivisions must be >= 8")


# 21-point Kronrod rule with embedded 10-point Gauss rule on [-1, 1].
_XK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478226, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(21)
_WEIGHTS_G[1:10:2] = _WG
_WEIGHTS_G[11:20:2] = _WG[::-1]


def _gk21(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * _NODES), dtype=float)
    k = half * np.dot(_WEIGHTS_K, vals)
    g = half * np.dot(_WEIGHTS_G, vals)
    return k, abs(k - g)


def integrate(f: Callable, a: float, b: float = math.inf, spec: QuadratureSpec = QuadratureSpec()):
    """Globally adaptive Gauss-Kronrod (G10/K21) quadrature.

    ``f`` must accept a 1-D array of nodes and return an array of values.
    An infinite upper limit is mapped onto [0, 1) with x = a + t/(1-t).
    Returns (value, error estimate); raises ConvergenceError with the best
    estimate when ``max_subdivisions`` is exhausted.
    """
    if math.isinf(b) or spec.transform == "semi-infinite-map":
        if not math.isinf(b):
            raise ValueError("semi-infinite-map requires an infinite upper limit")
        g0 = f

        def g(t, g0=g0, a=a):
            one_m = 1.0 - t
            return g0(a + t / one_m) / (one_m * one_m)

        func, lo, hi = g, 0.0, 1.0
    else:
        func, lo, hi = f, float(a), float(b)
    if lo == hi:
        return 0.0, 0.0

    val, err = _gk21(func, lo, hi)
    heap = [(-err, lo, hi, val, err)]
    total, total_err = val, err
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.rel_tol * abs(total), spec.abs_floor):
            break
        _, x0, x1, v, e = heapq.heappop(heap)
        xm = 0.5 * (x0 + x1)
        v1, e1 = _gk21(func, x0, xm)
        v2, e2 = _gk21(func, xm, x1)
        heapq.heappush(heap, (-e1, x0, xm, v1, e1))
        heapq.heappush(heap, (-e2, xm, x1, v2, e2))
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        if len(heap) % 64 == 0:
            # resum to stop drift in the running totals
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(item[4] for item in heap)
    else:
        if total_err > max(spec.rel_tol * abs(total), spec.abs_floor):
            raise ConvergenceError(
                f"quadrature did not converge: estimate {float(total)!r} +- {float(total_err)!r}",
                float(total), float(total_err))
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(item[4] for item in heap)
    if not math.isfinite(total):
        raise ConvergenceError("non-finite quadrature result", total, total_err)
    return float(total), float(total_err)


# --- Matsubara sums ------------------------------------------------------

@dataclass(frozen=True)
class SumSpec:
    rel_tol: float = 1e-10
    min_terms: int = 2
    max_terms: int = 2_000_000
    tail_acceleration: bool = True

    def __post_init__(self):
        if self.min_terms < 2:
            raise ValueError("min_terms must be >= 2")
        if self.max_terms < self.min_terms:
            raise ValueError("max_terms must be >= min_terms")


_WEIGHT0 = {"zero": 0.0, "half": 0.5, "one": 1.0}


def matsubara_sum(term: Callable[[int], float], weight0: str = "half", spec: SumSpec = SumSpec()):
    """Primed sum  w0 * term(0) + sum_{n >= 1} term(n).

    ``weight0`` is one of "zero", "half" or "one".  Terms must eventually
    decrease monotonically in magnitude.  The tail after term n is estimated
    geometrically from the last two terms and compared with sum_{n>=1} |term(n)|.
    Returns (value, terms used).
    """
    w0 = _WEIGHT0[weight0]
    head = [w0 * term(0)] if w0 != 0.0 else []
    terms: list[float] = []
    abs_sum = 0.0
    prev = None
    n = 1
    while True:
        t = term(n)
        terms.append(t)
        abs_sum += abs(t)
        used = n + len(head)
        # the stop rule looks at n >= 1 only, so it is the same for every weight0
        if used >= spec.min_terms:
            if t == 0.0:
                # the decaying factor underflowed; later terms vanish too
                break
            if prev:
                r = abs(t / prev)
                if r < 1.0:
                    tail = abs(t) * r / (1.0 - r) if spec.tail_acceleration else abs(t)
                    if tail <= spec.rel_tol * abs_sum:
                        break
        if used >= spec.max_terms:
            raise ConvergenceError(f"Matsubara sum not converged after {used} terms",
                                   math.fsum(head + terms), abs(t))
        prev = t
        n += 1
    return math.fsum(head + terms), used


# --- determinants --------------------------------------------------------

def det_small(m):
    """Cofactor determinant of a 2x2 or 3x3 matrix (batched over leading axes)."""
    m = np.asarray(m)
    if m.shape[-2:] == (2, 2):
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    if m.shape[-2:] == (3, 3):
        return (m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
                - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
                + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0]))
    raise ValueError(f"det_small supports 2x2 and 3x3 only, got {m.shape[-2:]}")


def extrapolate_to_zero(h, values):
    """Neville extrapolation of values(h) to h = 0 (values may be arrays)."""
    h = [float(x) for x in h]
    p = [np.asarray(v, dtype=complex) for v in values]
    n = len(h)
    for k in range(1, n):
        p = [(h[i] * p[i + 1] - h[i + k] * p[i]) / (h[i] - h[i + k]) for i in range(n - k)]
    return p[0]

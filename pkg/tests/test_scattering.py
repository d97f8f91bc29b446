import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import solve_interface, static_limits_numeric
from phononic_casimir import scattering as sc
from phononic_casimir.closedforms import b_constant
from phononic_casimir.materials import ElasticMaterial, builtin_table, sound_speeds
from phononic_casimir.numerics import integrate

MATS = builtin_table()
PAIRS = list(itertools.permutations(MATS, 2))
OFF_BLOCK = [(sc.L, sc.M), (sc.M, sc.L), (sc.M, sc.N), (sc.N, sc.M)]
LN = np.ix_([sc.L, sc.N], [sc.L, sc.N])

pair_st = st.sampled_from(PAIRS)
mode_st = st.sampled_from(["lame", "c11"])


# --- axial wavenumbers ---------------------------------------------------

def test_normal_incidence_wavenumbers(db):
    w = 3e11
    pt = sc.axial_wavenumbers(w, 0.0, db["Ge"], db["Si"], "c11")
    kL, kM, kN = pt.k
    assert kL == pytest.approx(w / 4865.27, rel=1e-4)
    assert kN == pytest.approx(w / 3539.85, rel=1e-4)
    assert all(np.isreal(k) for k in pt.k + pt.q)


def test_transverse_wavenumbers_coincide(db):
    pt = sc.axial_wavenumbers(1e11, 3e7, db["Ge"], db["Si"])
    assert pt.k[sc.M] is pt.k[sc.N] or np.array_equal(pt.k[sc.M], pt.k[sc.N])
    assert np.array_equal(pt.q[sc.M], pt.q[sc.N])


@given(xi=st.floats(1e6, 1e14), kp=st.floats(0.0, 1e10))
def test_imaginary_branch(xi, kp):
    ge = MATS[0]
    c = sound_speeds(ge).c_l
    k = sc.axial(1j * xi, kp, c)
    ref = np.sqrt(complex((1j * xi / c) ** 2 - kp**2))
    ref = ref if ref.imag >= 0 else -ref
    assert k.real == 0.0 and k.imag > 0
    assert complex(k) == pytest.approx(ref, rel=1e-12)


def test_evanescent_beyond_critical_angle(db):
    w = 1e11
    kp = 1.2 * w / sound_speeds(db["Ge"]).c_t
    pt = sc.axial_wavenumbers(w, kp, db["Ge"], db["Si"])
    kN = complex(pt.k[sc.N])
    assert kN.real == 0.0 and kN.imag > 0


def test_degenerate_point(db):
    with pytest.raises(sc.DegeneratePointError):
        sc.axial_wavenumbers(0.0, 0.0, db["Ge"], db["Si"])
    pt = sc.axial_wavenumbers(0.0, 1e8, db["Ge"], db["Si"])
    with pytest.raises(sc.DegeneratePointError):
        sc.reflection_transmission(db["Ge"], db["Si"], pt)


def test_negative_k_par_rejected(db):
    with pytest.raises(ValueError):
        sc.axial_wavenumbers(1e10, -1.0, db["Ge"], db["Si"])


# --- matrices ------------------------------------------------------------

@pytest.mark.parametrize("mat", MATS, ids=lambda m: m.name)
@pytest.mark.parametrize("freq", [2e11, 5e11j])
def test_identical_media(mat, freq):
    sm = sc.scattering(mat, mat, freq, np.array([0.0, 1e7, 3e8]))
    assert np.max(np.abs(sm.R)) < 1e-14
    np.testing.assert_allclose(sm.T, np.broadcast_to(np.eye(3), sm.T.shape), atol=1e-14)


def _random_points(rng, n, imaginary):
    out = []
    for _ in range(n):
        a, b = PAIRS[rng.integers(len(PAIRS))]
        w = 10 ** rng.uniform(8, 13)
        kp = rng.uniform(0, 3) * w / sound_speeds(a).c_t
        out.append((a, b, 1j * w if imaginary else w, kp))
    return out


def test_block_structure_many_points():
    rng = np.random.default_rng(7)
    count = 0
    for imaginary in (False, True):
        for a, b, w, kp in _random_points(rng, 600, imaginary):
            try:
                sm = sc.scattering(a, b, w, kp)
            except sc.SingularDenominatorError:
                continue
            count += 1
            for i, j in OFF_BLOCK:
                assert sm.R[i, j] == 0 and sm.T[i, j] == 0
    assert count >= 1000


@given(pair=pair_st, mode=mode_st, xi=st.floats(1e8, 1e14), ratio=st.floats(0.0, 5.0))
def test_real_at_imaginary_frequency(pair, mode, xi, ratio):
    a, b = pair
    kp = ratio * xi / sound_speeds(a, mode).c_t
    sm = sc.scattering(a, b, 1j * xi, kp, mode)
    for m in (sm.R, sm.T):
        big = np.max(np.abs(m))
        assert np.max(np.abs(m.imag)) <= 1e-10 * big


@given(pair=pair_st, mode=mode_st, w=st.floats(1e8, 1e13), s=st.floats(0.0, 0.999),
       amp=st.tuples(*[st.complex_numbers(max_magnitude=1.0)] * 3))
def test_boundary_residuals_below_critical(pair, mode, w, s, amp):
    a, b = pair
    c_min = min(sound_speeds(m, mode).c_t for m in (a, b))
    kp = s * w / max(sound_speeds(m, mode).c_l for m in (a, b))
    kp = min(kp, s * w / c_min)
    try:
        sm = sc.scattering(a, b, w, kp, mode)
    except sc.SingularDenominatorError:
        return
    amp = np.array(amp)
    big = np.max(np.abs(amp))
    amp = amp / big if big > 1e-100 else np.array([1.0, 0.0, 0.0])
    amp[np.abs(amp) < 1e-12] = 0  # subnormal partners carry no digits
    slip, stress = sc.boundary_residual(sc.IncidentWave(amp, sm.point), sm)
    assert slip < 1e-9 and stress < 1e-9


@given(pair=pair_st, mode=mode_st, w=st.floats(1e8, 1e13), s=st.floats(1.001, 4.0))
def test_boundary_residuals_evanescent(pair, mode, w, s):
    a, b = pair
    kp = s * w / max(sound_speeds(m, mode).c_l for m in (a, b))
    try:
        sm = sc.scattering(a, b, w, kp, mode)
    except sc.SingularDenominatorError:
        return
    for amp in np.eye(3):
        slip, stress = sc.boundary_residual(sc.IncidentWave(amp, sm.point), sm)
        assert slip < 1e-9 and stress < 1e-9


def test_near_identical_media_through_formulas(db):
    si = db["Si"]
    kp = np.array([0.0, 1e7, 3e8])

    def r_norm(eps):
        twin = ElasticMaterial("twin", si.rho, si.lam, si.mu * (1 + eps), si.c11)
        return np.max(np.abs(sc.scattering(si, twin, 2e11, kp).R), axis=(-2, -1))

    # reflection is linear in a small contrast, with no rounding floor at 1e-9
    np.testing.assert_allclose(r_norm(1e-9) / r_norm(1e-6), 1e-3, rtol=1e-3)


def test_residual_floor_for_identical_media(db):
    sm = sc.scattering(db["Si"], db["Si"], 1e11, 1e7)
    slip, stress = sc.boundary_residual(sc.IncidentWave(np.array([1.0, 0.5, 0.2j]), sm.point), sm)
    assert slip < 1e-15 and stress < 1e-15


@given(pair=pair_st, mode=mode_st, w=st.floats(1e8, 1e13), s=st.floats(0.0, 3.0))
def test_against_linear_solve(pair, mode, w, s):
    a, b = pair
    kp = s * w / sound_speeds(a, mode).c_t
    speeds = [c for m in (a, b) for c in (sound_speeds(m, mode).c_l, sound_speeds(m, mode).c_t)]
    if any(abs(1 - (kp * c / w) ** 2) < 1e-4 for c in speeds):
        return  # grazing: the dense system is singular there
    try:
        sm = sc.scattering(a, b, w, kp, mode)
    except sc.SingularDenominatorError:
        return
    R, T = solve_interface(a, b, w, kp, mode)
    scale = max(1.0, np.max(np.abs(R)), np.max(np.abs(T)))
    assert np.max(np.abs(sm.R[LN] - R)) < 1e-9 * scale
    assert np.max(np.abs(sm.T[LN] - T)) < 1e-9 * scale


@given(pair=pair_st, w=st.floats(1e8, 1e13), s=st.floats(0.0, 1.0))
def test_sh_reflection_bounded(pair, w, s):
    a, b = pair
    kp = s * w / max(sound_speeds(a).c_t, sound_speeds(b).c_t)
    sm = sc.scattering(a, b, w, kp)
    assert abs(sm.R[sc.M, sc.M]) <= 1 + 1e-15


def test_vectorised_matches_scalar(db):
    kps = np.array([0.0, 2e7, 5e8])
    vec = sc.scattering(db["Ge"], db["Diamond"], 3e12j, kps)
    for i, kp in enumerate(kps):
        one = sc.scattering(db["Ge"], db["Diamond"], 3e12j, kp)
        np.testing.assert_allclose(vec.R[i], one.R, rtol=1e-14, atol=0)


def test_singular_denominator_reported(db):
    pt = sc.axial_wavenumbers(1e11, 1e7, db["Ge"], db["Si"])
    with pytest.raises(sc.SingularDenominatorError):
        sc.reflection_transmission(db["Ge"], db["Si"], pt, tol=10.0)


def test_r_mm_imag_matches_matrix(db):
    xi, kp = 4e12, np.array([1e7, 1e9])
    sm = sc.scattering(db["Si"], db["Ge"], 1j * xi, kp)
    np.testing.assert_allclose(sc.r_mm_imag(db["Si"], db["Ge"], xi, kp), sm.R[:, sc.M, sc.M].real, rtol=1e-14)


# --- omega -> 0 ----------------------------------------------------------

def test_static_limits_values(db):
    r0, _ = sc.static_mode_limits(db["Ge"], db["Si"])
    assert r0 == pytest.approx(-0.088175, abs=5e-7)
    m = ElasticMaterial("m", 1000.0, 2e9, 3e9)
    assert sc.static_mode_limits(m, ElasticMaterial("n", 2000.0, 5e9, 3e9)) == (0.0, 0.0)
    hard = ElasticMaterial("hard", 1000.0, 1e9, 3e15)
    assert sc.static_mode_limits(m, hard)[0] == pytest.approx(-1.0, abs=1e-5)


@pytest.mark.parametrize("gap, plate", PAIRS, ids=lambda m: m.name)
def test_b_is_twice_prefactor_with_gap_incident(gap, plate):
    _, pref = sc.static_mode_limits(gap, plate)
    assert b_constant(gap, plate) == pytest.approx(abs(2 * pref), rel=1e-14)


@pytest.mark.parametrize("a, b", PAIRS[::5], ids=lambda m: m.name)
def test_numeric_static_limits(a, b):
    kp = 1e8
    r_mm, block = static_limits_numeric(a, b, kp, "lame")
    r0, _ = sc.static_mode_limits(a, b)
    assert abs(r_mm - r0) < 1e-8
    ref = sc.static_ln_matrix(a, b, kp, "lame")
    np.testing.assert_allclose(block.real, ref, rtol=1e-6)
    # one-sided state: A_N / A_L = -c_L / c_N for either incident wave
    s = sound_speeds(a, "lame")
    for col in (0, 1):
        assert block[1, col] / block[0, col] == pytest.approx(-s.c_l / s.c_t, rel=1e-6)


# --- bound state ---------------------------------------------------------

@pytest.fixture
def state(db):
    return sc.bound_state(db["Si"], db["Ge"], 2e8, "lame")


def test_one_sided_states_normalised(state):
    k = state.k_par

    def norm2(f):
        # t = k |z|
        val, _ = integrate(lambda t: np.sum(np.abs(f(t / k)) ** 2, axis=-1) / k, 0.0)
        return val

    assert norm2(lambda z: state.psi_alpha(-z)) == pytest.approx(1.0, rel=1e-9)
    assert norm2(state.psi_beta) == pytest.approx(1.0, rel=1e-9)
    total = norm2(lambda z: state.profile(-z)) + norm2(state.profile)
    assert total == pytest.approx(1.0, rel=1e-9)


def test_bound_state_decays(state):
    k = state.k_par
    near = np.linalg.norm(state.profile(-1.0 / k))
    far = np.linalg.norm(state.profile(-3.0 / k))
    assert far < near
    # envelope e^{-2} times a ratio of linear prefactors
    a1 = np.linalg.norm(state.psi_alpha(-1.0 / k))
    a3 = np.linalg.norm(state.psi_alpha(-3.0 / k))
    assert a3 / a1 == pytest.approx(math.exp(-2) * _poly_ratio(state), rel=1e-12)


def _poly_ratio(state):
    s = state.speeds_alpha
    cl2, cn2 = s.c_l**2, s.c_t**2
    d = cl2 - cn2

    def poly(t):
        return math.hypot(cl2 + t * d, t * d - cn2)

    return poly(-3.0) / poly(-1.0)


def test_bound_state_sides(state):
    assert np.all(state.psi_alpha(np.array([0.5, 2.0]) / state.k_par) == 0)
    assert np.all(state.psi_beta(-np.array([0.5, 2.0]) / state.k_par) == 0)


def test_bound_state_velocity_continuous(state):
    eps = 1e-12 / state.k_par
    np.testing.assert_array_equal(state.velocity(-eps), state.velocity(eps))


def test_one_sided_state_traction_free(db):
    # sigma_zz of psi_alpha e^{i k x} vanishes at the interface
    st_ = sc.bound_state(db["Si"], db["Ge"], 1.0, "lame")
    lam, mu, k = db["Si"].lam, db["Si"].mu, 1.0
    h = 1e-6
    u0 = st_.psi_alpha(-h)
    du = (st_.psi_alpha(-h) - st_.psi_alpha(-2 * h)) / h
    szz = lam * (1j * k * u0[0] + du[2]) + 2 * mu * du[2]
    assert abs(szz) < 1e-4 * (lam + 2 * mu) * np.linalg.norm(u0)


def test_bound_state_needs_positive_k(db):
    with pytest.raises(ValueError):
        sc.bound_state(db["Si"], db["Ge"], 0.0)

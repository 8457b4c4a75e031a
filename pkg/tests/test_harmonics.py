import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import eval_jacobi, gamma

from lpbody import harmonics as H
from lpbody import quadrature as Q
from lpbody import transforms as T
from lpbody.geometry import PlanarConvexBody

DISK = PlanarConvexBody.disk()
SEGMENT = PlanarConvexBody.segment()
SQUARE = PlanarConvexBody.square()
TRIANGLE = PlanarConvexBody.triangle()

phases = st.floats(0, 2 * np.pi)


def kink_breaks(C):
    a = C.descriptor.edge_normal_angles()
    return np.concatenate([a, -a])


def unit(v):
    v = np.asarray(v, complex)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# Jacobi polynomials


def test_jacobi_examples():
    t = np.linspace(0, 1, 7)
    assert np.allclose(H.jacobi_Q(0, 2, 1, t), 1.0)
    assert np.allclose(H.jacobi_Q(1, 0, 0, t), 2 * t - 1, atol=1e-15)


@given(st.integers(0, 8), st.integers(0, 5), st.integers(0, 3))
def test_jacobi_matches_scipy(l, a, b):
    # weight t^a (1-t)^b on [0,1] is (1+x)^a (1-x)^b at x = 2t-1
    t = np.linspace(0, 1, 11)
    want = eval_jacobi(l, b, a, 2 * t - 1) / eval_jacobi(l, b, a, 1.0)
    assert np.allclose(H.jacobi_Q(l, a, b, t), want, atol=1e-10)
    assert H.jacobi_Q(l, a, b, 1.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("a,b", [(0, 0), (1, 0), (3, 1), (2, 2)])
def test_jacobi_orthogonality(a, b):
    x, w = Q.gauss_jacobi01(16, a, b)
    for i in range(6):
        for j in range(i):
            got = np.sum(w * H.jacobi_Q(i, a, b, x) * H.jacobi_Q(j, a, b, x))
            assert abs(got) <= 1e-10


def test_jacobi_rejects_negative():
    with pytest.raises(ValueError):
        H.jacobi_Q_coefficients(1, -1, 0)


# ---------------------------------------------------------------------------
# zonal harmonics


def test_zonal_examples():
    u = unit([0.6 + 0.3j, 0.5 - 0.2j])
    z = np.conj(u[0])
    assert H.zonal_eval(H.ZonalHarmonic(0, 0, 2), u) == pytest.approx(1.0)
    assert H.ZonalHarmonic(1, 0, 2)(u) == pytest.approx(np.conj(z))
    assert H.ZonalHarmonic(1, 1, 2)(u) == pytest.approx(2 * abs(z) ** 2 - 1)
    for k, l in [(2, 0), (1, 3), (3, 3)]:
        assert H.ZonalHarmonic(k, l, 3)(np.array([1, 0, 0], complex)) == pytest.approx(1.0)


@settings(max_examples=40)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(2, 3), phases,
       st.lists(st.floats(-1, 1), min_size=6, max_size=6).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_bidegree_law(k, l, n, phi, v):
    v = np.asarray(v[:2 * n] + [0.0] * (2 * n - len(v)))
    if np.linalg.norm(v) < 0.1:
        v[0] = 1.0
    u = v.view(complex) / np.linalg.norm(v)
    Y = H.ZonalHarmonic(k, l, n)
    c = np.exp(1j * phi)
    assert Y(c * u) == pytest.approx(c ** k * np.conj(c) ** l * Y(u), abs=1e-12)


@given(st.integers(0, 5), st.integers(0, 5), st.complex_numbers(max_magnitude=1))
def test_conjugation_symmetry(k, l, z):
    assert H.P_kl(k, l, 2, np.conj(z)) == pytest.approx(np.conj(H.P_kl(k, l, 2, z)), abs=1e-12)


@pytest.mark.parametrize("k,l,n", [(1, 1, 2), (2, 1, 2), (2, 2, 2), (3, 1, 3), (0, 3, 2)])
def test_solid_extension_is_harmonic(k, l, n):
    Y = H.ZonalHarmonic(k, l, n)
    rng = np.random.default_rng(k + 7 * l)
    h = 1e-2
    for _ in range(3):
        x = rng.normal(size=2 * n)
        lap = 0.0
        for i in range(2 * n):
            e = np.zeros(2 * n)
            e[i] = h
            f = lambda s: Y.solid((x + s * e).view(complex))
            # fourth-order central second difference
            lap += (-f(2) + 16 * f(1) - 30 * f(0) + 16 * f(-1) - f(-2)) / (12 * h * h)
        scale = np.linalg.norm(x) ** (k + l - 2)
        assert abs(lap) <= 1e-6 * scale


def test_zonal_orthogonality():
    r = Q.sphere_rule(2, 16)
    keys = [(k, l) for k in range(6) for l in range(6) if k + l <= 5]
    vals = {key: H.ZonalHarmonic(*key, 2)(r.nodes) for key in keys}
    for a in keys:
        for b in keys:
            if a < b:
                assert abs(np.sum(r.weights * vals[a] * np.conj(vals[b]))) <= 1e-12


# ---------------------------------------------------------------------------
# Fourier coefficients


def test_fourier_constant():
    one = lambda c: np.ones(len(c))
    assert H.fourier_coeff(one, 0) == pytest.approx(1.0)
    for k in (1, 2, 5):
        assert abs(H.fourier_coeff(one, k)) <= 1e-14


def test_fourier_examples():
    half = lambda c: np.maximum(c.real, 0.0)
    got = H.fourier_coeff(half, 2, breaks=(np.pi / 2, -np.pi / 2))
    assert got == pytest.approx(2 / (3 * np.pi), rel=1e-12)
    assert H.half_cosine_fourier_coeff(1.0, 2) == pytest.approx(2 / (3 * np.pi), rel=1e-12)
    absre = lambda c: np.abs(c.real)
    assert H.fourier_coeff(absre, 0, breaks=(np.pi / 2, -np.pi / 2)) == pytest.approx(2 / np.pi, rel=1e-12)


@pytest.mark.parametrize("p", [0.5, 1.0, -0.5])
@pytest.mark.parametrize("k", [0, 1, 2, 3, 6])
def test_half_cosine_closed_form(p, k):
    # c_k = (1/pi) int_{-pi/2}^{pi/2} cos(t)^p cos(k t) dt, halved for k = 0
    f = lambda t: math.cos(t) ** p * math.cos(k * t)
    want = 2 * quad(lambda t: f(t), 0, np.pi / 2, limit=200, epsabs=1e-14)[0]
    want /= 2 * np.pi if k == 0 else np.pi
    assert H.half_cosine_fourier_coeff(p, k) == pytest.approx(want, rel=1e-8, abs=1e-12)


def test_fourier_rejects_divergent():
    with np.errstate(divide="ignore"):
        with pytest.raises(ValueError):
            H.fourier_coeff(lambda c: 1.0 / (c.real - 1), 0, m=64)


@pytest.mark.parametrize("C", [SQUARE, TRIANGLE])
@pytest.mark.parametrize("p", [1.0, 0.5])
def test_kernel_fourier_matches_panels(C, p):
    g = lambda c: C.support(c) ** p
    for k in range(5):
        want = H.fourier_coeff(g, k, m=512, breaks=kink_breaks(C))
        assert H.kernel_fourier_coeff(C, p, k) == pytest.approx(want, abs=1e-11)


def test_kernel_fourier_disk():
    assert H.kernel_fourier_coeff(DISK, -1.5, 0) == pytest.approx(1.0)
    assert abs(H.kernel_fourier_coeff(DISK, -1.5, 3)) <= 1e-14


# ---------------------------------------------------------------------------
# multipliers


@given(st.floats(-1.9, 0.9).filter(lambda p: min(abs(p - round(p)), abs(p)) > 1e-3),
       st.integers(0, 5), st.integers(0, 5))
def test_alpha_matches_gamma_formula(p, k, l):
    d = abs(k - l)
    want = (math.pi ** 2 * gamma((p + d) / 2 + 1) * gamma((p - d) / 2 + 1)
            / (gamma((p + k + l) / 2 + 2) * gamma((p - k - l) / 2 + 1)))
    assert H.alpha_coefficient(2, p, k, l) == pytest.approx(want, rel=1e-10)


def test_multiplier_J_examples():
    assert H.multiplier_J(DISK, 1.0, 2, 0, 0) == pytest.approx(4 * math.pi ** 2 / 3, rel=1e-12)
    assert H.multiplier_J(DISK, 1.0, 2, 0, 0) == pytest.approx(T.eval_J(DISK, 1.0, 1.0, unit([1, 2j])))
    for k, l in [(1, 0), (2, 0), (3, 1)]:
        assert abs(H.multiplier_J(DISK, 0.5, 2, k, l)) <= 1e-12


@pytest.mark.parametrize("C,p,k,l,n", [
    (SEGMENT, 0.5, 2, 0, 2), (SEGMENT, 0.5, 1, 1, 2), (SEGMENT, 0.5, 0, 2, 2),
    (SQUARE, -0.5, 2, 2, 2), (TRIANGLE, 0.5, 3, 0, 2), (TRIANGLE, -1.5, 4, 1, 2),
    (TRIANGLE, 0.5, 0, 3, 3), (DISK, -1.5, 3, 3, 2),
])
def test_multiplier_J_funk_hecke(C, p, k, l, n):
    closed = H.multiplier_J(C, p, n, k, l)
    ev = H.funk_hecke_eigenvalue(("J", C, p), n, k, l)
    assert ev.spread <= 1e-6 * max(abs(closed), 1e-12)
    assert ev.value == pytest.approx(closed, rel=1e-6)


def test_triangle_threefold_symmetry():
    for k, l in [(1, 0), (2, 1), (0, 2), (3, 1)]:
        assert abs(H.multiplier_J(TRIANGLE, 0.5, 2, k, l)) <= 1e-12
        ev = H.funk_hecke_eigenvalue(("J", TRIANGLE, 0.5), 2, k, l)
        assert abs(ev.value) <= 1e-10


def test_symmetric_body_real_multipliers():
    for k in range(4):
        for l in range(4):
            assert abs(H.multiplier_J(SQUARE, 0.5, 2, k, l).imag) <= 1e-12


@pytest.mark.parametrize("C", [DISK, SQUARE, TRIANGLE, SEGMENT])
def test_diagonal_non_vanishing(C):
    for k in range(7):
        assert abs(H.multiplier_J(C, 0.5, 2, k, k)) > 0


@pytest.mark.parametrize("C", [DISK, SQUARE, TRIANGLE])
def test_multiplier_limit(C):
    kc = C.kernel_integral(-2.0)
    for k in range(4):
        target = kc * H.multiplier_radon(2, k)
        errs = [abs(H.multiplier_J(C, p, 2, k, k) / gamma(p + 2) - target) / abs(target)
                for p in (-1.9, -1.99, -1.999)]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] <= 1e-2


def test_multiplier_cosine_examples():
    assert H.multiplier_cosine(1.0, 2, 0, 0) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    # half of int_{S^3} |<v, e_1>| dv, from the Beta law of <v, e_1>^2
    full = Q.sphere_area(3) * gamma(2) * gamma(1) / (gamma(0.5) * gamma(2.5))
    assert H.multiplier_cosine(1.0, 2, 0, 0) == pytest.approx(full / 2, rel=1e-14)
    for k, l in [(1, 0), (2, 1), (0, 3)]:
        v = H.multiplier_cosine(0.5, 2, k, l)
        assert np.isfinite(v) and v != 0
    with pytest.raises(ValueError):
        H.multiplier_cosine(-1.0, 2, 0, 0)


@pytest.mark.parametrize("p", [0.5, -0.5])
def test_multiplier_cosine_decay(p):
    mags = [abs(H.multiplier_cosine(p, 2, s, 0)) for s in range(11)]
    assert all(a > b for a, b in zip(mags, mags[1:]))


@pytest.mark.parametrize("k,l", [(0, 0), (1, 0), (1, 1), (2, 1)])
def test_multiplier_cosine_funk_hecke(k, l):
    ev = H.funk_hecke_eigenvalue(("cosine", 0.5), 2, k, l)
    assert ev.value == pytest.approx(H.multiplier_cosine(0.5, 2, k, l), rel=1e-6)


def test_multiplier_radon_examples():
    assert H.multiplier_radon(2, 0) == pytest.approx(2 * math.pi)
    assert H.multiplier_radon(2, 0) == pytest.approx(T.complex_radon(1.0, unit([1, 1])))
    assert H.multiplier_radon(2, 1) == pytest.approx(-2 * math.pi)
    assert H.multiplier_radon(3, 2) == pytest.approx(2 * math.pi ** 2 / 3)
    assert H.multiplier_radon(2, 2, 1) == 0.0
    with pytest.raises(ValueError):
        H.multiplier_radon(1, 0)


def test_radon_funk_hecke():
    ev = H.funk_hecke_eigenvalue(("radon",), 2, 1, 0)
    assert abs(ev.value) <= 1e-8
    for n, k in [(2, 2), (3, 1)]:
        ev = H.funk_hecke_eigenvalue(("radon",), n, k, k)
        assert ev.value == pytest.approx(H.multiplier_radon(n, k), rel=1e-8)


def test_funk_hecke_constant_harmonic():
    ev = H.funk_hecke_eigenvalue(("J", TRIANGLE, -0.5), 2, 0, 0)
    assert ev.value == pytest.approx(T.eval_J(TRIANGLE, -0.5, 1.0, unit([1, 0])), rel=1e-12)
    with pytest.raises(ValueError):
        H.funk_hecke_eigenvalue(("bogus",), 2, 0, 0)


# ---------------------------------------------------------------------------
# tables


def test_table_csv():
    t = H.multiplier_table(("J", SQUARE, 0.5), 2, 2, 1, numeric=True)
    lines = t.to_csv().strip().splitlines()
    assert lines[0] == "k,l,re,im,method,numeric_re,numeric_im,error"
    assert len(lines) == 1 + 3 * 2
    for (k, l), c, num, err in t.rows():
        assert np.isfinite(c)
        assert err <= 1e-6


def test_table_limits():
    with pytest.raises(ValueError):
        H.multiplier_table(("radon",), 2, 11, 0)
    t = H.multiplier_table(("radon",), 2, 3, 3, numeric=False)
    assert t.tag == "Rc" and not t.numeric
    assert ",," in t.to_csv().splitlines()[1]

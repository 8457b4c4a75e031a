import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import gammaln

from lpbody import quadrature as Q
from lpbody import transforms as T
from lpbody.geometry import PlanarConvexBody, StarBody, hermitian_ellipsoid, output_grid
from lpbody.verify import random_body, random_s1_body

DISK = PlanarConvexBody.disk()
SEGMENT = PlanarConvexBody.segment()
SQUARE = PlanarConvexBody.square()
TRIANGLE = PlanarConvexBody.triangle()
BALL = StarBody.ball(2)


def ball_moment(p, n=2):
    """``int_{S^{2n-1}} |v_1|^p dv`` from the Dirichlet law of ``|v_1|^2``."""
    log = gammaln(n) + gammaln(1 + p / 2) - gammaln(n + p / 2)
    return Q.sphere_area(2 * n - 1) * math.exp(log)


def samples(body):
    return body.descriptor.samples


def unit(v):
    v = np.asarray(v, complex)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# J_{C,p}


@pytest.mark.parametrize("p", [1.0, 0.5, -0.5, -1.0, -1.5])
def test_eval_J_disk_constant(p):
    U = output_grid(2, 8).nodes
    vals = T.eval_J(DISK, p, 1.0, U)
    assert np.allclose(vals, ball_moment(p), rtol=1e-12)


def test_eval_J_example_values():
    u = unit([1, 1j])
    assert T.eval_J(DISK, 1.0, 1.0, u) == pytest.approx(4 * math.pi ** 2 / 3, rel=1e-12)
    assert T.eval_J(DISK, -1.0, 1.0, u) == pytest.approx(4 * math.pi ** 2, rel=1e-12)
    assert T.eval_J(SQUARE, 0.5, 0.0, u) == 0.0


@pytest.mark.parametrize("C", [SQUARE, TRIANGLE, PlanarConvexBody.segment(0.5 + 1j)])
@pytest.mark.parametrize("p", [1.0, 0.5, -0.5])
def test_eval_J_one_matches_lemma_constant(C, p):
    U = output_grid(2, 8).nodes
    vals = T.eval_J(C, p, 1.0, U)
    want = T.lemma_constant(2, p) * C.kernel_integral(p)
    assert np.allclose(vals, want, rtol=1e-10)


def test_eval_J_strictly_positive():
    f = lambda V: 0.1 + np.abs(V[:, 0]) ** 2
    vals = T.eval_J(TRIANGLE, -0.5, f, output_grid(2, 8).nodes)
    assert np.all(vals > 0)


def test_eval_J_rejects_bad_p():
    u = unit([1, 0])
    for p in (0.0, 1.5, -2.0):
        with pytest.raises(ValueError):
            T.eval_J(DISK, p, 1.0, u)
    with pytest.raises(ValueError):
        T.eval_J(SEGMENT, -1.0, 1.0, u)


def test_eval_J_propagates_nonfinite():
    with pytest.raises(FloatingPointError, match="node"):
        T.eval_J(DISK, 1.0, lambda V: np.full(len(V), np.nan), unit([1, 0]))


def test_eval_J_quadratic_oracle():
    # J_{D,1} |v_2|^2 at e_1: int |v_1| |v_2|^2 over S^3
    log = gammaln(2) + gammaln(1.5) + gammaln(2) - gammaln(3.5)
    want = Q.sphere_area(3) * math.exp(log)
    got = T.eval_J(DISK, 1.0, lambda V: np.abs(V[:, 1]) ** 2, unit([1, 0]))
    assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# body maps


@pytest.mark.parametrize("p", [1.0, 0.5, -0.5, -1.5])
def test_ball_lp_body_closed_form(p):
    body = T.complex_lp_intersection_body(DISK, p, BALL, grid=8)
    want = (ball_moment(p) / (4 + p)) ** (-1 / p)
    assert np.allclose(samples(body), want, rtol=1e-12)


def test_ball_lp_body_example():
    body = T.complex_lp_intersection_body(DISK, 1.0, BALL, grid=8)
    assert np.allclose(samples(body), 15 / (4 * math.pi ** 2), rtol=1e-12)
    assert body.is_s1_invariant


def test_scaling_example():
    u = output_grid(2, 8).nodes
    a = T.lp_radial(SQUARE, 1.0, StarBody.ball(2, 2.0), u)
    b = T.lp_radial(SQUARE, 1.0, BALL, u)
    assert np.allclose(a / b, 2.0 ** -5, rtol=1e-12)


@pytest.mark.parametrize("p", [0.5, -0.5])
def test_real_scaling(p):
    u = output_grid(2, 8).nodes
    K = random_body(2, 3)
    lam = 1.7
    a = T.real_lp_radial(p, K.linear_image(lam * np.eye(4)), u)
    b = T.real_lp_radial(p, K, u)
    assert np.allclose(a / b, lam ** (-(4 + p) / p), rtol=1e-10)


@pytest.mark.parametrize("p", [1.0, 0.5, -0.5])
def test_segment_reduction(p):
    K = random_body(2, 1)
    a = T.complex_lp_intersection_body(SEGMENT, p, K, grid=8, method="complex")
    b = T.real_lp_intersection_body(p, K, grid=8)
    assert np.allclose(samples(a), samples(b), rtol=1e-10)


def test_real_ball_oracle():
    k3 = Q.ball_volume(3)
    want = quad(lambda t: abs(t) * k3 * (1 - t * t) ** 1.5, -1, 1, epsabs=1e-15)[0]
    body = T.real_lp_intersection_body(1.0, BALL, grid=8)
    assert np.allclose(samples(body), 1 / want, rtol=1e-12)


def test_classical_intersection_body_of_ball():
    body = T.intersection_body(BALL, grid=8)
    assert np.allclose(samples(body), Q.ball_volume(3), rtol=1e-12)


def test_real_kernel_rejects_below_minus_one():
    with pytest.raises(ValueError):
        T.real_lp_intersection_body(-1.5, BALL, grid=8)
    with pytest.raises(ValueError):
        T.real_lp_intersection_body(0.0, BALL, grid=8)
    with pytest.raises(ValueError):
        T.complex_lp_intersection_body(DISK, 0.0, BALL, grid=8)


@pytest.mark.parametrize("C", [DISK, SQUARE, TRIANGLE])
@pytest.mark.parametrize("p", [1.0, -0.5, -1.5])
def test_hermitian_ellipsoid_exact(C, p):
    M = np.array([[1.5, 0.3j], [0.2, 0.8 - 0.1j]])
    K = hermitian_ellipsoid(M)
    U = output_grid(2, 6).nodes
    want = T.ellipsoid_lp_radial(C, p, M, U)
    got = T.lp_radial(C, p, K, U)
    assert np.allclose(got, want, rtol=1e-7)


def test_valuation_property():
    K = hermitian_ellipsoid(np.diag([1.5, 0.7]))
    L = hermitian_ellipsoid(np.array([[0.8, 0.2], [0.0, 1.3]]))
    U = StarBody.from_function(2, lambda V: np.maximum(K._eval(V), L._eval(V)))
    N = StarBody.from_function(2, lambda V: np.minimum(K._eval(V), L._eval(V)))
    p = -0.5
    u = output_grid(2, 6).nodes
    r = lambda B: T.lp_radial(TRIANGLE, p, B, u) ** (-p)
    assert np.allclose(r(U) + r(N), r(K) + r(L), rtol=1e-12)


@pytest.mark.parametrize("p", [0.5, -0.5, -1.5])
def test_monotonicity(p):
    K = random_body(2, 4)
    L = StarBody.from_function(2, lambda V: K._eval(V) * (1.05 + 0.05 * np.abs(V[:, 0]) ** 2))
    u = output_grid(2, 6).nodes
    a = T.lp_radial(SQUARE, p, K, u)
    b = T.lp_radial(SQUARE, p, L, u)
    assert np.all(np.sign(-p) * (b - a) > 0)


# ---------------------------------------------------------------------------
# complex Radon transform and I_c


def test_radon_of_one():
    assert T.complex_radon(1.0, unit([1, 2j])) == pytest.approx(2 * math.pi, rel=1e-14)


def test_ic_ball():
    body = T.complex_intersection_body(BALL, grid=8)
    assert np.allclose(samples(body), 1.0, rtol=1e-14)
    assert body.is_s1_invariant


@pytest.mark.parametrize("u,want", [([0, 1], 8 * math.pi), ([1, 1], 16 * math.pi / 5)])
def test_radon_linear_image(u, want):
    K = hermitian_ellipsoid(np.diag([2.0, 1.0]))
    u = unit(u)
    w = unit([-np.conj(u[1]), np.conj(u[0])])        # unit vector spanning u^perp
    th = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    circle = np.exp(1j * th)[:, None] * w[None, :]
    oracle = 2 * np.pi * np.mean(K.radial(circle) ** 2)
    got = T.complex_radon(lambda V: K._eval(V) ** 2, u)
    assert got == pytest.approx(oracle, rel=1e-12)
    assert got == pytest.approx(want, rel=1e-12)


def test_radon_rejects_n1():
    with pytest.raises(ValueError):
        T.complex_radon(1.0, np.array([1.0 + 0j]), n=1)
    with pytest.raises(ValueError):
        T.complex_intersection_body(StarBody.ball(1))


@settings(max_examples=15)
@given(st.floats(0, 2 * np.pi), st.integers(0, 20))
def test_ic_phase_invariance(phi, seed):
    K = random_body(2, seed)
    u = unit(np.random.default_rng(seed).normal(size=2) + 1j)
    a = T.ic_radial(K, u)
    b = T.ic_radial(K, np.exp(1j * phi) * u)
    assert b == pytest.approx(a, rel=1e-10)


# ---------------------------------------------------------------------------
# section profiles and moments


def test_ball_sections():
    S = T.section_profile(BALL, [1, 0])
    assert S(0) == pytest.approx(math.pi, rel=1e-12)
    assert S(0.5) == pytest.approx(0.75 * math.pi, rel=1e-8)
    assert S(0.5j) == pytest.approx(0.75 * math.pi, rel=1e-8)
    assert S(1.1) == 0.0
    assert S.support_radius() == pytest.approx(1.0, rel=1e-10)


def test_s1_section_radial_dependence():
    K = random_s1_body(2, 3)
    S = T.section_profile(K, unit([1, 0.5j]))
    vals = [S(0.4 * np.exp(1j * a)) for a in (0.0, 1.0, 2.5)]
    assert np.allclose(vals, vals[0], rtol=1e-7)


def test_fubini_identity():
    M = np.diag([1.4, 0.8]).astype(complex)
    K = hermitian_ellipsoid(M)
    u = unit([1, 1])
    S = T.section_profile(K, u)
    R = S.support_radius()
    x, w = Q.gauss_jacobi01(8, 0.0, 0.0)
    # int_C |z| A(|z|) dz; A(r) r^2 is a polynomial in r
    lhs = 2 * np.pi * R * sum(wi * (R * xi) ** 2 * S(R * xi) for xi, wi in zip(x, w))
    rhs = T.ellipsoid_lp_radial(DISK, 1.0, M, u) ** -1
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_volume_from_sections():
    S = T.section_profile(BALL, [0, 1])
    x, w = Q.gauss_jacobi01(6, 0.0, 0.0)
    vol = 2 * np.pi * sum(wi * xi * S(xi) for xi, wi in zip(x, w))
    assert vol == pytest.approx(math.pi ** 2 / 2, rel=1e-8)


def test_nonconvex_sections_rejected():
    S = T.section_profile(random_body(2, 0), [1, 0], convex=False)
    assert S(0) > 0
    with pytest.raises(ValueError):
        S(0.2)
    with pytest.raises(ValueError):
        T.section_profile(StarBody.ball(1), [1])


def test_ball_moments():
    S = T.section_profile(BALL, [1, 0])
    e2 = np.array([0, 1], complex)
    assert S.moment_sym(e2, 0) == pytest.approx(math.pi / 2, rel=1e-12)
    assert S.moment_asym(0.0, e2, 0) == pytest.approx(math.pi / 2, rel=1e-12)
    assert S.moment_asym(2.0, e2, 0) == pytest.approx(math.pi / 8, rel=1e-12)
    assert S.moment_sym(e2, 1.5) == 0.0
    assert S.moment_asym(1.0, e2, 1.5) == 0.0
    with pytest.raises(ValueError):
        S.moment_sym(np.array([1j, 0]), 0)


@pytest.mark.parametrize("z", [0.0, 0.3, 0.2 + 0.2j])
def test_sym_moment_is_sum_of_four(z):
    K = hermitian_ellipsoid(np.array([[1.2, 0.2], [0.1, 0.9]]))
    S = T.section_profile(K, unit([1, 0.4]))
    w = unit([0.3, -1 + 0.5j])
    parts = sum(S.moment_asym(2.0, c * w, z, num=32) for c in (1, -1, 1j, -1j))
    assert parts == pytest.approx(S.moment_sym(w, z), rel=1e-8)


def test_asym_moment_oracle():
    # ball section at z: disk of radius s; int_{Re y >= 0} Re(y)^p dy
    p, z = 1.0, 0.6
    s = math.sqrt(1 - z * z)
    want = quad(lambda t: t ** p * 2 * math.sqrt(s * s - t * t), 0, s)[0]
    S = T.section_profile(BALL, [1, 0])
    assert S.moment_asym(p, np.array([0, 1], complex), z) == pytest.approx(want, rel=1e-7)


# ---------------------------------------------------------------------------
# finite part


def test_finite_part_examples():
    bump = lambda r: max(1 - r * r, 0.0)
    assert T.finite_part_moment(-0.5, bump, 1.0) == pytest.approx(-8 / 3, rel=1e-12)
    assert T.finite_part_moment(-1.5, bump, 1.0) == pytest.approx(-8 / 3, rel=1e-9)   # cancellation in Phi - Phi(0)
    # a constant is its own Taylor part
    assert T.finite_part_moment(-1.5, lambda r: 1.0, 2.0) == pytest.approx(2 ** -1.5 / -1.5, rel=1e-12)
    with pytest.raises(ValueError):
        T.finite_part_moment(-1.5, lambda r: r, 1.0)
    with pytest.raises(ValueError):
        T.finite_part_moment(-2.5, bump, 1.0)


@given(st.floats(-1.95, -1.05), st.floats(0.5, 2.0))
def test_finite_part_gaussian_oracle(p, a):
    # int_0^inf r^q (e^{-a r^2} - 1) dr = Gamma((q+1)/2) a^{-(q+1)/2} / 2 for q in (-3, -1)
    q = p - 1
    want = 0.5 * math.gamma((q + 1) / 2) * a ** (-(q + 1) / 2)
    R = 12.0 / math.sqrt(a)
    phi = lambda r: math.exp(-a * r * r)
    got = T.finite_part_moment(p, phi, R, num=96)
    assert got == pytest.approx(want, rel=1e-8)

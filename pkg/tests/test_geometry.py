import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import IntegrationWarning, quad

from lpbody import quadrature as Q
from lpbody.geometry import (PlanarConvexBody, PlanarStarBody, SpecError, StarBody, as_points,
                             complex_to_real_matrix, convexity_probe_2d, hermitian_ellipsoid,
                             output_grid, power_sum_body, volume)


def random_units(n, k, seed=0):
    g = np.random.default_rng(seed).standard_normal((k, 2 * n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return g[:, 0::2] + 1j * g[:, 1::2]


# ---------------------------------------------------------------------------
# star bodies


def test_ball_radial_and_validation():
    B = StarBody.ball(2, 1.5)
    assert np.allclose(B.radial(random_units(2, 5)), 1.5)
    with pytest.raises(ValueError, match="unit"):
        B.radial(np.array([[1.0, 1.0]], complex))
    with pytest.raises(ValueError):
        StarBody.ball(2, -1.0)


def test_interleaved_input_is_the_same_point():
    U = random_units(2, 4, 1)
    real = U.view(float).reshape(4, 4)
    a, _ = as_points(real, 2)
    assert np.array_equal(a, U)
    with pytest.raises(ValueError):
        as_points(np.ones((3, 5)), 2)


def test_linear_image_radial_oracle():
    rng = np.random.default_rng(2)
    A = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
    K = StarBody.ball(2).linear_image(A)
    U = random_units(2, 20, 3)
    X = U.view(float).reshape(20, 4)
    want = 1.0 / np.linalg.norm(np.linalg.solve(A, X.T), axis=0)
    assert np.allclose(K.radial(U), want, rtol=1e-13)


@given(st.integers(0, 10_000))
def test_complex_image_matches_real_image(seed):
    rng = np.random.default_rng(seed)
    M = np.eye(2) + 0.4 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    K = power_sum_body(2)
    U = random_units(2, 8, seed)
    a = K.complex_linear_image(M).radial(U)
    b = K.linear_image(complex_to_real_matrix(M)).radial(U)
    assert np.allclose(a, b, rtol=1e-12)


def test_complex_to_real_matrix_acts_like_multiplication():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert np.allclose(complex_to_real_matrix(M) @ z.view(float), (M @ z).view(float))


def test_singular_matrices_are_rejected():
    with pytest.raises(ValueError):
        StarBody.ball(2).linear_image(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        StarBody.ball(2).complex_linear_image(np.eye(3))


def test_volumes():
    assert volume(StarBody.ball(2)) == pytest.approx(math.pi ** 2 / 2, rel=1e-13)
    assert volume(StarBody.ball(3)) == pytest.approx(math.pi ** 3 / 6, rel=1e-12)
    # {|z1|^4 + |z2|^4 <= 1}: substituting s_j = |z_j|^2 leaves a quarter disk
    assert volume(power_sum_body(2), Q.sphere_rule(2, 64)) == pytest.approx(math.pi ** 3 / 4, rel=1e-8)
    M = np.array([[1.2, 0.3j], [0.1, 0.7]])
    E = hermitian_ellipsoid(M)
    want = abs(np.linalg.det(M)) ** 2 * math.pi ** 2 / 2
    assert volume(E, Q.sphere_rule(2, 64)) == pytest.approx(want, rel=1e-10)


def test_gauge_and_extension_are_homogeneous():
    K = StarBody.ball(2).linear_image(np.diag([2.0, 1.0, 1.0, 0.5]))
    x = np.array([[0.3 + 0.1j, -0.2 + 0.4j]])
    assert K.gauge(3 * x) == pytest.approx(3 * K.gauge(x))
    assert K.radial_extended(3 * x) == pytest.approx(K.radial_extended(x) / 3)
    assert K.gauge(np.zeros((1, 2), complex)) == 0.0
    assert K.gauge(x) * K.radial_extended(x) == pytest.approx(1.0)


def test_s1_invariance_flags():
    assert StarBody.ball(2).is_s1_invariant
    assert power_sum_body(2).is_s1_invariant
    assert not StarBody.ball(2).linear_image(np.diag([2.0, 1, 1, 1])).is_s1_invariant
    assert hermitian_ellipsoid(np.diag([2.0, 1.0])).is_s1_invariant


def test_s1_average_oracle():
    K = StarBody.ball(2).linear_image(np.diag([2.0, 1.0, 1.0, 1.0]))
    A = K.s1_average(256)
    u = random_units(2, 3, 7)
    for v in u:
        f = lambda t: K.radial(np.exp(1j * t) * v[None])[0] ** 2
        want = math.sqrt(quad(f, 0, 2 * math.pi, epsabs=0, epsrel=1e-13)[0] / (2 * math.pi))
        assert A.radial(v[None])[0] == pytest.approx(want, rel=1e-12)
    c = np.exp(0.7j)
    assert np.allclose(A.radial(c * u), A.radial(u), rtol=1e-12)


def test_tabulated_reproduces_nodes_and_interpolates():
    K = StarBody.ball(2).linear_image(np.diag([1.2, 0.9, 1.0, 1.1]))
    T = K.tabulate(16)
    nodes = output_grid(2, 16).nodes
    assert np.array_equal(T.radial(nodes), K.radial(nodes))
    U = random_units(2, 200, 11)
    assert np.max(np.abs(T.radial(U) - K.radial(U))) < 5e-3
    T32 = K.tabulate(32)
    assert np.max(np.abs(T32.radial(U) - K.radial(U))) < 1e-3


def test_tabulated_volume_uses_its_grid():
    K = StarBody.ball(2).linear_image(np.diag([1.2, 0.9, 1.0, 1.1]))
    want = 1.2 * 0.9 * 1.1 * math.pi ** 2 / 2
    assert volume(K.tabulate(32)) == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("make", [
    lambda: StarBody.ball(2, 2.0),
    lambda: StarBody.ball(2).linear_image(np.diag([2.0, 1, 1, 1])),
    lambda: hermitian_ellipsoid(np.array([[1, 0.2j], [0, 1.5]])),
    lambda: power_sum_body(2, 3.0).s1_average(32),
    lambda: StarBody.closed_form(2, "polynomial", epsilon=0.1, exponents=[[1, 0, 0, 1]],
                                 coefficients=[1.0]),
    lambda: power_sum_body(2).tabulate(8),
])
def test_spec_round_trip(make):
    K = make()
    spec = json.loads(json.dumps(K.to_spec()))
    back = StarBody.from_spec(spec)
    U = random_units(2, 10, 4)
    assert np.allclose(back.radial(U), K.radial(U), rtol=1e-14)


def test_spec_errors_name_the_field():
    with pytest.raises(SpecError, match=r"\$\.descriptor\.inner"):
        StarBody.from_spec({"ambient_complex_dim": 2, "descriptor": {"type": "S1Average"}})
    with pytest.raises(SpecError, match="type"):
        StarBody.from_spec({"ambient_complex_dim": 2, "descriptor": {"type": "Cube"}})
    with pytest.raises(SpecError, match="ambient_complex_dim"):
        StarBody.from_spec({"descriptor": {"type": "Ball"}})


def test_non_positive_radial_function_is_rejected():
    with pytest.raises(ValueError):
        StarBody.from_function(2, lambda U: U[:, 0].real)
    with pytest.raises(ValueError):
        StarBody.closed_form(2, "no_such_form")


# ---------------------------------------------------------------------------
# planar bodies


def support_oracle(vertices, z):
    return max((v * np.conj(z)).real for v in vertices)


@given(st.floats(0, 2 * math.pi))
def test_named_support_functions(t):
    c = np.exp(1j * t)
    assert PlanarConvexBody.disk(2.0).support(c) == pytest.approx(2.0)
    assert PlanarConvexBody.segment(1j).support(c) == pytest.approx(abs(c.imag), abs=1e-15)
    assert PlanarConvexBody.square().support(c) == pytest.approx(abs(c.real) + abs(c.imag))
    tri = [np.exp(2j * math.pi * k / 3) for k in range(3)]
    assert PlanarConvexBody.triangle().support(c) == pytest.approx(support_oracle(tri, c))


def test_polygon_validation():
    with pytest.raises(ValueError):
        PlanarConvexBody.polygon([1, -1j, -1])           # clockwise
    with pytest.raises(ValueError):
        PlanarConvexBody.polygon([1, 1j])
    with pytest.raises(ValueError):
        PlanarConvexBody.from_support(lambda c: -np.abs(c))


def test_symmetry_and_dimension():
    assert PlanarConvexBody.square().is_origin_symmetric
    assert not PlanarConvexBody.triangle().is_origin_symmetric
    assert PlanarConvexBody.segment().dim == 1
    assert not PlanarConvexBody.segment().origin_interior
    assert PlanarConvexBody.disk().dim == 2


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_rotation(a, t):
    c0, c = np.exp(1j * a), np.exp(1j * t)
    for C in (PlanarConvexBody.triangle(), PlanarConvexBody.segment(1 + 1j)):
        assert C.rotate(c0).support(c) == pytest.approx(C.support(np.conj(c0) * c), abs=1e-14)


BODIES = {
    "disk": PlanarConvexBody.disk(),
    "segment": PlanarConvexBody.segment(0.5 + 1j),
    "square": PlanarConvexBody.square(),
    "triangle": PlanarConvexBody.triangle(),
    "offset": PlanarConvexBody.polygon([-0.5 - 0.25j, 1.5 - 0.25j, 0.2 + 1j]),
    "ellipse": PlanarConvexBody.disk().dual_image(np.array([[2.0, 0.3], [0.1, 0.7]])),
}


def quad_kernel(C, p, g=lambda t: 1.0):
    kinks = list(C.kink_angles())
    pts = sorted(set([0.0, 2 * math.pi] + [k for k in kinks if 0 < k < 2 * math.pi]))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        f = lambda t: C.support(np.exp(1j * t)) ** p * g(t)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)   # endpoint singularities
            total += quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return total


@pytest.mark.parametrize("name", BODIES)
@pytest.mark.parametrize("p", [1.0, 0.5, -0.5, -1.5])
def test_kernel_integral_against_adaptive_quadrature(name, p):
    C = BODIES[name]
    if p <= -1 and not C.origin_interior:
        assert C.kernel_integral(p) == np.inf
        return
    want = quad_kernel(C, p)
    assert C.kernel_integral(p) == pytest.approx(want, rel=1e-10)
    theta, w = C.weighted_circle_rule(p, 128)
    g = lambda t: np.cos(3 * t) + 2
    assert np.sum(w * g(theta)) == pytest.approx(quad_kernel(C, p, g), rel=1e-9)


def test_segment_rule_rejects_strong_singularity():
    with pytest.raises(ValueError):
        PlanarConvexBody.segment().weighted_circle_rule(-1.0)


def test_dual_image_support():
    M = np.array([[1.0, 0.4], [-0.2, 0.8]])
    for C in (PlanarConvexBody.triangle(), PlanarConvexBody.square(), PlanarConvexBody.disk()):
        D = C.dual_image(M)
        for t in np.linspace(0, 6, 7):
            w = np.exp(1j * t)
            x = M @ np.array([w.real, w.imag])
            assert D.support(w) == pytest.approx(C.support(complex(x[0], x[1])), rel=1e-13)


def test_polar_and_probe():
    S = PlanarConvexBody.square()
    P = S.polar()
    assert P.radial(np.exp(0.25j * math.pi)) == pytest.approx(1 / math.sqrt(2))
    ok, margin = convexity_probe_2d(P, 256)
    assert ok and abs(margin) < 1e-12
    ok, margin = convexity_probe_2d(PlanarStarBody(lambda c: 1 + 0.3 * np.cos(4 * np.angle(c))))
    assert not ok and margin < -1e-2
    with pytest.raises(ValueError):
        PlanarConvexBody.segment().polar()
    with pytest.raises(ValueError):
        convexity_probe_2d(P, 8)


def test_planar_spec_round_trip():
    for C in (PlanarConvexBody.disk(2.0), PlanarConvexBody.segment(1j), PlanarConvexBody.triangle()):
        back = PlanarConvexBody.from_spec(json.loads(json.dumps(C.to_spec())))
        c = np.exp(1j * np.linspace(0, 6, 11))
        assert np.allclose(back.support(c), C.support(c))
    with pytest.raises(SpecError):
        PlanarConvexBody.from_spec({"type": "Blob"})
    with pytest.raises(ValueError):
        PlanarConvexBody.from_support(np.abs).to_spec()

"""Kernel transforms on S^{2n-1} and the body maps built from them.

Every transform is ``(T f)(u) = sum_i w_i f(Theta_u v_i)`` for a fixed
rule ``(v_i, w_i)`` adapted to the pole ``e_1``, where ``Theta_u`` is the
unitary of :func:`lpbody.quadrature.unitary_to_e1`.  Singular factors of
the kernel live in the weights.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import beta

from lpbody import quadrature as Q
from lpbody.geometry import (StarBody, as_points, output_grid,
                             _require_unit, complex_to_real_matrix)
from lpbody.kernels import weighted_rowsum

CHUNK = 65_536
DEFAULT_GRID = {1: 64, 2: 16, 3: 8}
DEFAULT_RESOLUTION = {1: 64, 2: 32, 3: 12}


def default_grid(n):
    return DEFAULT_GRID.get(n, 8)


@dataclass(frozen=True, eq=False)
class KernelRule:
    """e_1-adapted rule for one kernel; ``apply`` rotates it to each ``u``."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def apply(self, f, U):
        U = np.atleast_2d(np.asarray(U, complex))
        N = len(self.weights)
        step = max(1, CHUNK // max(N, 1))
        out = np.empty(len(U))
        for s in range(0, len(U), step):
            R = Q.rotate_nodes(U[s:s + step], self.nodes)
            b = R.shape[0]
            vals = np.asarray(f(R.reshape(-1, self.n)), float).reshape(b, N)
            bad = ~np.isfinite(vals)
            if bad.any():
                i, j = np.argwhere(bad)[0]
                raise FloatingPointError(f"non-finite integrand at node {R[i, j]}")
            out[s:s + b] = weighted_rowsum(self.weights, vals)
        return out


def _planar_key(C):
    try:
        import json
        return json.dumps(C.to_spec(), sort_keys=True)
    except ValueError:
        return f"id:{id(C)}"


_RULES: dict = {}


def _cached(key, build):
    if key not in _RULES:
        _RULES[key] = build()
    return _RULES[key]


def _resolution(n, resolution):
    if resolution is not None:
        return int(resolution)
    return DEFAULT_RESOLUTION.get(n, 8)


def check_complex_p(C, p):
    """Admissible exponents for ``h_C^p``: ``-dim C < p <= 1``, ``p != 0``."""
    p = float(p)
    if p == 0:
        raise ValueError("p = 0 is excluded")
    if p > 1:
        raise ValueError("p must be at most 1")
    if p <= -C.dim:
        raise ValueError(f"p must exceed -dim C = {-C.dim}")
    if not C.origin_interior and p <= -1:
        raise ValueError("h_C vanishes on S^1, so p must exceed -1")
    return p


def j_rule(C, p, n, resolution=None):
    """Rule with ``sum w f(Theta_u v) ~ int h_C(v . u)^p f(v) dv``."""
    p = check_complex_p(C, p)
    m = _resolution(n, resolution)

    def build():
        theta, cw = C.weighted_circle_rule(p, m)
        if n == 1:
            return KernelRule(1, np.exp(1j * theta)[:, None], cw, {"kind": "J", "p": p})
        r = Q.jacobi_sphere_rule(n, p, m, phases=theta, phase_weights=cw)
        return KernelRule(n, r.nodes, r.weights, {"kind": "J", "p": p, "resolution": m})

    return _cached(("J", _planar_key(C), p, n, m), build)


def cosine_rule(p, n, resolution=None):
    """Rule for the kernel ``<v, u>_+^p`` (absorbed on the half circle)."""
    p = float(p)
    if not p > -1:
        raise ValueError("the one-sided cosine kernel needs p > -1")
    m = _resolution(n, resolution)

    def build():
        y, wy = Q.gauss_jacobi(max(8, m // 2), p, p)
        theta = 0.5 * np.pi * y
        cw = 0.5 * np.pi * wy * (np.cos(theta) / (1 - y * y)) ** p
        r = Q.jacobi_sphere_rule(n, p, m, phases=theta, phase_weights=cw)
        return KernelRule(n, r.nodes, r.weights, {"kind": "cosine", "p": p, "resolution": m})

    return _cached(("cos", p, n, m), build)


def real_rule(p, n, resolution=None):
    """Rule for the kernel ``|<v, u>|^p``, ``p > -1``."""
    m = _resolution(n, resolution)

    def build():
        r = Q.real_jacobi_sphere_rule(n, p, m)
        return KernelRule(n, r.nodes, r.weights, {"kind": "real", "p": float(p), "resolution": m})

    return _cached(("real", float(p), n, m), build)


def radon_rule(n, resolution=None):
    """Surface rule on ``S^{2n-1} ∩ {v . e_1 = 0}``."""
    if n < 2:
        raise ValueError("the complex Radon transform needs n >= 2")
    m = _resolution(n, resolution)

    def build():
        r = Q.complex_hyperplane_rule(n, m)
        return KernelRule(n, r.nodes, r.weights, {"kind": "radon", "resolution": m})

    return _cached(("radon", n, m), build)


def hyperplane_rule(n, resolution=None):
    """Surface rule on the real great sphere ``S^{2n-1} ∩ e_1^perp``."""
    m = _resolution(n, resolution)

    def build():
        r = Q.real_hyperplane_rule(n, m)
        return KernelRule(n, r.nodes, r.weights, {"kind": "hyperplane", "resolution": m})

    return _cached(("hyper", n, m), build)


def _directions(u, n, unit=True):
    U, shape = as_points(u, n)
    if unit:
        _require_unit(U)
    return U, shape


def _shape_out(vals, shape):
    return float(vals[0]) if shape == () else vals.reshape(shape)


def _as_function(f):
    if callable(f):
        return f
    c = float(f)
    return lambda V: np.full(len(V), c)


# ---------------------------------------------------------------------------
# transforms of sphere functions


def eval_J(C, p, f, u, n=None, resolution=None):
    """``(J_{C,p} f)(u) = int h_C(v . u)^p f(v) dv``."""
    U0 = np.asarray(u)
    n = n or (U0.shape[-1] if np.iscomplexobj(U0) else U0.shape[-1] // 2)
    U, shape = _directions(u, n)
    rule = j_rule(C, p, n, resolution)
    return _shape_out(rule.apply(_as_function(f), U), shape)


def eval_cosine(p, f, u, n, resolution=None):
    """``(C_p^+ f)(u) = int <v, u>_+^p f(v) dv``."""
    U, shape = _directions(u, n)
    return _shape_out(cosine_rule(p, n, resolution).apply(_as_function(f), U), shape)


def eval_real(p, f, u, n, resolution=None):
    """``int |<v, u>|^p f(v) dv``."""
    U, shape = _directions(u, n)
    return _shape_out(real_rule(p, n, resolution).apply(_as_function(f), U), shape)


def complex_radon(f, u, n=None, resolution=None):
    """``(R_c f)(u)``: integral of ``f`` over the unit sphere of ``u^perp`` (complex)."""
    U0 = np.asarray(u)
    n = n or (U0.shape[-1] if np.iscomplexobj(U0) else U0.shape[-1] // 2)
    if n < 2:
        raise ValueError("the complex Radon transform needs n >= 2")
    U, shape = _directions(u, n)
    return _shape_out(radon_rule(n, resolution).apply(_as_function(f), U), shape)


def lemma_constant(n, p):
    """``c(n, p)`` with ``(J_{C,p} 1)(u) = c(n, p) int_{S^1} h_C^p``."""
    return float((2 * n + p) * Q.ball_volume(2 * n - 2) * beta(0.5 * (p + 2), n) / 2)


# ---------------------------------------------------------------------------
# radial functions of the body maps, at arbitrary unit directions


def lp_radial(C, p, K, u, resolution=None, method="auto"):
    """``rho_{I_{C,p} K}(u)`` by direct quadrature (no tabulation)."""
    U, shape = _directions(u, K.n)
    return _shape_out(_lp_radial(C, p, K, U, resolution, method), shape)


def _lp_radial(C, p, K, U, resolution, method):
    p = check_complex_p(C, p)
    if method not in ("auto", "complex"):
        raise ValueError("method must be 'auto' or 'complex'")
    if method == "auto" and C.is_segment:
        w = complex(C.descriptor.w)
        if w == 1:
            return _real_lp_radial(p, K, U, resolution)
        return _real_lp_radial(p, K, U * (w / abs(w)), resolution) / abs(w)
    e = 2 * K.n + p
    vals = j_rule(C, p, K.n, resolution).apply(lambda V: K._eval(V) ** e, U) / e
    return vals ** (-1.0 / p)


def real_lp_radial(p, K, u, resolution=None):
    """``rho_{I_p K}(u)``; ``p = -1`` gives the classical intersection body."""
    U, shape = _directions(u, K.n)
    return _shape_out(_real_lp_radial(p, K, U, resolution), shape)


def _check_real_p(p):
    p = float(p)
    if p == 0:
        raise ValueError("p = 0 is excluded")
    if p > 1:
        raise ValueError("p must be at most 1")
    if p < -1:
        raise ValueError("the real kernel needs p >= -1")
    return p


def _real_lp_radial(p, K, U, resolution):
    p = _check_real_p(p)
    if p == -1:
        return _intersection_radial(K, U, resolution)
    e = 2 * K.n + p
    vals = real_rule(p, K.n, resolution).apply(lambda V: K._eval(V) ** e, U) / e
    return vals ** (-1.0 / p)


def intersection_radial(K, u, resolution=None):
    """Classical ``rho_{IK}(u) = V_{2n-1}(K ∩ u^perp)``."""
    U, shape = _directions(u, K.n)
    return _shape_out(_intersection_radial(K, U, resolution), shape)


def _intersection_radial(K, U, resolution):
    e = 2 * K.n - 1
    return hyperplane_rule(K.n, resolution).apply(lambda V: K._eval(V) ** e, U) / e


def ic_radial(K, u, resolution=None):
    """``rho_{I_c K}(u) = ((1/((2n-2) pi)) R_c rho_K^{2n-2}(u))^{1/2}``."""
    U, shape = _directions(u, K.n)
    return _shape_out(_ic_radial(K, U, resolution), shape)


def _ic_radial(K, U, resolution):
    n = K.n
    e = 2 * n - 2
    r = radon_rule(n, resolution).apply(lambda V: K._eval(V) ** e, U)
    return np.sqrt(r / (e * np.pi))


# ---------------------------------------------------------------------------
# tabulated body maps


def _tabulate(n, grid, values, provenance, s1_invariant=None):
    body = StarBody.tabulated(n, grid, values, s1_invariant=s1_invariant)
    body.provenance = provenance
    return body


def _provenance(operator, start, **params):
    out = {"operator": operator}
    out.update(params)
    out["wall_time"] = time.perf_counter() - start
    return out


def complex_lp_intersection_body(C, p, K, resolution=None, grid=None, method="auto"):
    """Tabulated ``I_{C,p} K``.

    ``method="auto"`` evaluates segments ``C = [-w, w]`` through the real
    kernel, so ``I_{[-1,1],p}`` and ``I_p`` agree bit for bit;
    ``method="complex"`` always uses the complex rule.
    """
    t0 = time.perf_counter()
    grid = grid or default_grid(K.n)
    nodes = output_grid(K.n, grid).nodes
    vals = _lp_radial(C, p, K, nodes, resolution, method)
    prov = _provenance("complex_lp_intersection_body", t0, p=float(p), C=_planar_key(C),
                       resolution=_resolution(K.n, resolution), grid=grid, method=method)
    inv = True if (C.is_disk and K.is_s1_invariant) else None
    return _tabulate(K.n, grid, vals, prov, inv)


def real_lp_intersection_body(p, K, resolution=None, grid=None):
    """Tabulated ``I_p K`` (``p = -1`` gives the classical ``IK``)."""
    t0 = time.perf_counter()
    grid = grid or default_grid(K.n)
    vals = _real_lp_radial(p, K, output_grid(K.n, grid).nodes, resolution)
    prov = _provenance("real_lp_intersection_body", t0, p=float(p),
                       resolution=_resolution(K.n, resolution), grid=grid)
    return _tabulate(K.n, grid, vals, prov)


def intersection_body(K, resolution=None, grid=None):
    """Tabulated classical intersection body."""
    return real_lp_intersection_body(-1, K, resolution, grid)


def complex_intersection_body(K, resolution=None, grid=None):
    """Tabulated ``I_c K``; S^1-invariant by construction."""
    if K.n < 2:
        raise ValueError("the complex intersection body needs n >= 2")
    t0 = time.perf_counter()
    grid = grid or default_grid(K.n)
    vals = _ic_radial(K, output_grid(K.n, grid).nodes, resolution)
    prov = _provenance("complex_intersection_body", t0,
                       resolution=_resolution(K.n, resolution), grid=grid)
    return _tabulate(K.n, grid, vals, prov, True)


def radon_body(K, resolution=None, grid=None):
    """Tabulated sphere function ``R_c rho_K^{2n-2}`` stored as a body."""
    t0 = time.perf_counter()
    grid = grid or default_grid(K.n)
    e = 2 * K.n - 2
    nodes = output_grid(K.n, grid).nodes
    vals = radon_rule(K.n, resolution).apply(lambda V: K._eval(V) ** e, nodes)
    prov = _provenance("complex_radon", t0, resolution=_resolution(K.n, resolution), grid=grid)
    return _tabulate(K.n, grid, vals, prov, True)


# ---------------------------------------------------------------------------
# exact evaluation for linear images of the ball


def ellipsoid_lp_radial(C, p, A, u):
    """``rho_{I_{C,p}(A B)}(u)`` for a real invertible ``2n x 2n`` matrix ``A``.

    Pushing the ball measure onto the complex line gives
    ``rho^{-p} = |det A| kappa_{2n-2} B((p+2)/2, n)/2 int_{S^1} h_C(M w)^p dw``
    with ``M`` the 2x2 matrix of ``y -> (<y, A^T u>, <y, A^T iu>)`` on the
    plane those two vectors span; the circle integral is exact.
    """
    A = np.asarray(A)
    if np.iscomplexobj(A):
        A = complex_to_real_matrix(A)
    n = A.shape[0] // 2
    p = check_complex_p(C, p)
    U, shape = _directions(u, n)
    det = abs(np.linalg.det(A))
    const = det * Q.ball_volume(2 * n - 2) * beta(0.5 * (p + 2), n) / 2
    Ur = U.view(float).reshape(len(U), -1)
    Ui = (1j * U).view(float).reshape(len(U), -1)
    out = np.empty(len(U))
    for i in range(len(U)):
        a1 = A.T @ Ur[i]
        a2 = A.T @ Ui[i]
        e1 = a1 / np.linalg.norm(a1)
        r2 = a2 - (a2 @ e1) * e1
        e2 = r2 / np.linalg.norm(r2)
        M = np.array([[a1 @ e1, a1 @ e2], [a2 @ e1, a2 @ e2]])
        out[i] = const * C.dual_image(M).kernel_integral(p)
    return _shape_out(out ** (-1.0 / p), shape)


# ---------------------------------------------------------------------------
# sections in complex hyperplanes


def finite_part_moment(p, phi, R, num=64, tol=1e-6):
    """``<r_+^q, Phi>`` with ``q = p - 1`` for ``Phi`` supported in ``[0, R]``.

    Equals ``int_0^R r^q (Phi - Phi(0)) dr + Phi(0) R^{q+1}/(q+1)``; the
    first integral is computed as a Gauss-Jacobi integral of
    ``(Phi(r) - Phi(0))/r^2`` against ``r^{q+2}``.  ``Phi'(0)`` must vanish.
    """
    p = float(p)
    if not -2 < p < 0:
        raise ValueError("p must lie in (-2, 0)")
    q = p - 1
    f0 = float(phi(0.0))
    h = 1e-5 * R
    d1 = (float(phi(h)) - f0) / h
    d2 = (float(phi(0.5 * h)) - f0) / (0.5 * h)
    slope = 2 * d2 - d1                         # Richardson: removes the O(h) curvature term
    scale = max(abs(f0), abs(float(phi(0.5 * R))), 1e-300)
    if abs(slope) * R > tol * scale:
        raise ValueError(f"Phi'(0) must vanish (estimated {slope:.3e})")
    x, w = Q.gauss_jacobi01(num, q + 2, 0.0)
    r = R * x
    vals = np.array([float(phi(t)) for t in r])
    inner = R ** (q + 1) * np.sum(w * (vals - f0) / (x * x))
    return float(inner + f0 * R ** (q + 1) / (q + 1))


class SectionProfile:
    """Sections ``K ∩ {x . u = z}`` of a star body by complex hyperplanes.

    For ``z != 0`` the body must be convex so each section is star-shaped
    about the point of smallest gauge, found by minimization.
    """

    def __init__(self, K, u, convex=True, resolution=None, bisect=60):
        if K.n < 2:
            raise ValueError("sections need n >= 2")
        u = np.asarray(as_points(u, K.n)[0][0])
        _require_unit(u[None])
        self.K = K
        self.u = u
        self.convex = convex
        self.theta = Q.unitary_to_e1(u)
        self.basis = self.theta[:, 1:]          # columns span u^perp (complex)
        m = resolution or (256 if K.n == 2 else 16)
        r = Q.sphere_rule(K.n - 1, m) if K.n - 1 <= 3 else Q.sphere_rule(K.n - 1, m, layout="random")
        self.dirs = r.nodes @ self.basis.T      # unit directions inside u^perp
        self.dir_w = r.weights
        self.bisect = bisect
        self.rmax = 1.0 / np.min(K.gauge(Q.sphere_rule(K.n, 8).nodes)) if K.n <= 3 else None
        self._centers = {}

    # geometry of one section ------------------------------------------------

    def _flat(self, eta):
        k = self.K.n - 1
        return self.basis @ (eta[:k] + 1j * eta[k:])

    def center(self, z):
        """Point of ``H_{u,z}`` of smallest gauge and that gauge."""
        z = complex(z)
        if z == 0:
            return np.zeros(self.K.n, complex), 0.0
        if z in self._centers:
            return self._centers[z]
        if not self.convex:
            raise ValueError("sections off the origin need a convex body")
        base = z * self.u
        g = lambda eta: self.K.gauge(base + self._flat(eta))
        k = self.K.n - 1
        res = minimize(g, np.zeros(2 * k), method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        c = base + self._flat(res.x)
        out = (c, float(res.fun))
        self._centers[z] = out
        return out

    def _radii(self, c, D=None):
        """Boundary distances from ``c`` along ``D`` (default ``self.dirs``)."""
        D = self.dirs if D is None else D
        if np.all(c == 0):
            return self.K._eval(D)
        hi = np.full(len(D), 1.0)
        for _ in range(200):
            out = self.K.gauge(c[None, :] + hi[:, None] * D) < 1
            if not out.any():
                break
            hi[out] *= 2
        lo = np.zeros(len(D))
        for _ in range(self.bisect):
            mid = 0.5 * (lo + hi)
            inside = self.K.gauge(c[None, :] + mid[:, None] * D) < 1
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)

    def _section(self, z):
        c, g = self.center(z)
        if g >= 1:
            return None
        return c, self._radii(c)

    def area(self, z):
        """``A(z) = V_{2n-2}(K ∩ H_{u,z})``."""
        sec = self._section(z)
        if sec is None:
            return 0.0
        d = 2 * self.K.n - 2
        return float(np.sum(self.dir_w * sec[1] ** d) / d)

    __call__ = area

    def support_radius(self, alpha=0.0):
        """Largest ``s`` with a nonempty section at ``z = s e^{i alpha}``."""
        c = np.exp(1j * alpha)
        f = lambda s: self.center(s * c)[1] - 1.0
        hi = 1.0
        while f(hi) < 0:
            hi *= 2
        return brentq(f, 1e-12 * hi, hi, xtol=1e-13)

    # moments ---------------------------------------------------------------

    def _check_direction(self, v):
        v = np.asarray(v, complex)
        perp = v - np.vdot(self.u, v) * self.u
        if np.linalg.norm(perp) <= 1e-10 * max(np.linalg.norm(v), 1e-300):
            raise ValueError("v must not lie in the complex line of u")
        return v

    def moment_stats(self, w, z):
        """``(A, int x . w dx, int |x . w|^2 dx)`` over ``K ∩ H_{u,z}``."""
        w = self._check_direction(w)
        sec = self._section(z)
        if sec is None:
            return 0.0, 0.0j, 0.0
        c, R = sec
        d = 2 * self.K.n - 2
        a = np.vdot(w, c)                       # c . w
        b = self.dirs @ w.conj()                # theta . w
        A = np.sum(self.dir_w * R ** d) / d
        S1 = np.sum(self.dir_w * (a * R ** d / d + b * R ** (d + 1) / (d + 1)))
        S2 = np.sum(self.dir_w * (abs(a) ** 2 * R ** d / d + 2 * (a * b.conj()).real * R ** (d + 1) / (d + 1)
                                  + np.abs(b) ** 2 * R ** (d + 2) / (d + 2)))
        return float(A), complex(S1), float(S2)

    def moment_sym(self, w, z):
        """``int_{K ∩ H_{u,z}} |x . w|^2 dx``."""
        return self.moment_stats(w, z)[2]

    def moment_asym(self, p, v, z, num=24):
        """``int over {Re(x . v) >= 0} of the section of Re(x . v)^p dx``."""
        p = float(p)
        if p < 0:
            raise ValueError("the one-sided moment needs p >= 0")
        v = self._check_direction(v)
        sec = self._section(z)
        if sec is None:
            return 0.0
        c, R = sec
        a0 = float(np.vdot(v, c).real)
        if self.K.n == 2:
            D, wd, R = self._split_circle(v, c, a0, R, num)
        else:
            D, wd = self.dirs, self.dir_w
        b = (D @ v.conj()).real
        return float(np.sum(wd * _ray_asym(p, a0, b, R, 2 * self.K.n - 3, num)))

    def _split_circle(self, v, c, a0, R, num):
        """Gauss-Legendre arcs between the kinks of the one-sided integrand.

        For ``n = 2`` the section is planar; the ray integrals are smooth in
        the angle except where ``Re(theta . v) = 0`` or where the line
        ``Re(x . v) = 0`` meets the boundary of the section.
        """
        e = self.basis[:, 0]
        beta_ = np.vdot(v, e)                   # b(t) = Re(e^{it} beta_)
        m = len(self.dirs)
        t = np.angle(self.dirs @ e.conj())      # angles of the stored directions
        order = np.argsort(t)
        t, Rs = t[order], R[order]
        cuts = [(s * 0.5 * np.pi - np.angle(beta_)) % (2 * np.pi) - np.pi for s in (1, -1)]
        if a0 != 0.0:
            g = a0 + (np.exp(1j * t) * beta_).real * Rs
            radius = lambda th: self._radii(c, (np.exp(1j * th) * e)[None, :])[0]
            gf = lambda th: a0 + (np.exp(1j * th) * beta_).real * radius(th)
            for i in np.nonzero(np.sign(g) != np.sign(np.roll(g, -1)))[0]:
                lo, hi = t[i], t[(i + 1) % m] + (2 * np.pi if i == m - 1 else 0.0)
                cuts.append((brentq(gf, lo, hi, xtol=1e-14) + np.pi) % (2 * np.pi) - np.pi)
        cuts = np.sort(np.asarray(cuts))
        edges = np.append(cuts, cuts[0] + 2 * np.pi)
        x, w = Q.gauss_jacobi01(num, 0.0, 0.0)
        th = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]).ravel()
        wt = (np.diff(edges)[:, None] * w[None, :]).ravel()
        D = np.exp(1j * th)[:, None] * e[None, :]
        return D, wt, self._radii(c, D)


def _ray_asym(p, a0, b, R, d, num):
    """``int_0^R (a0 + b r)_+^p r^d dr`` per ray."""
    total = np.zeros_like(R)
    if a0 == 0.0:
        pos = b > 0
        total[pos] = b[pos] ** p * R[pos] ** (p + d + 1) / (p + d + 1)
        return total
    with np.errstate(divide="ignore", invalid="ignore"):
        rstar = np.where(b != 0, -a0 / b, np.inf)
    cross = (rstar > 0) & (rstar < R)
    # no sign change along the ray: smooth integrand
    xl, wl = Q.gauss_jacobi01(num, 0.0, 0.0)
    whole = ~cross & (a0 + 0.5 * b * R > 0)
    r = R[whole, None] * xl[None, :]
    lin = a0 + b[whole, None] * r
    total[whole] = R[whole] * np.sum(wl * lin ** p * r ** d, axis=1)
    # sign change at rstar: Jacobi weight t^p in the distance to rstar
    xg, wg = Q.gauss_jacobi01(num, p, 0.0)
    rs, bb, RR = rstar[cross], b[cross], R[cross]
    if a0 > 0:
        L = rs
        r = rs[:, None] - L[:, None] * xg[None, :]
    else:
        L = RR - rs
        r = rs[:, None] + L[:, None] * xg[None, :]
    total[cross] = L * (np.abs(bb) * L) ** p * np.sum(wg * r ** d, axis=1)
    return total


def section_profile(K, u, **kw):
    return SectionProfile(K, u, **kw)

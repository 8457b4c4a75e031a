"""Integration rules on S^1, S^{2n-1} and singularity-absorbing rules.

Points of ``S^{2n-1}`` are stored as complex arrays of shape ``(N, n)``;
the real picture is the interleaved vector
``(Re z_1, Im z_1, Re z_2, ...)``.

Product rules use the splitting ``v = (c x, sqrt(1 - x^2) w)`` with
``c`` in S^1, ``w`` in S^{2n-3} and ``x = |v_1|`` in [0, 1], for which
``dv = x (1 - x^2)^(n-2) dx dc dw``.  Gauss-Jacobi rules in ``x`` absorb
the factor ``|v . e_1|^p = x^p``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy.special import gammaln, roots_jacobi

from lpbody.kernels import weighted_rowsum, weighted_rowsum_complex

DEFAULT_RESOLUTION = {1: 64, 2: 64, 3: 16}
CACHE_ENV = "LPBODY_CACHE_DIR"


def sphere_area(m):
    """Surface measure of the unit sphere S^m in R^{m+1}."""
    return float(2.0 * np.exp(0.5 * (m + 1) * np.log(np.pi) - gammaln(0.5 * (m + 1))))


def ball_volume(d):
    """Volume kappa_d of the d-dimensional Euclidean unit ball."""
    return float(np.exp(0.5 * d * np.log(np.pi) - gammaln(0.5 * d + 1)))


def _jacobi_and_derivative(num, al, be, y):
    """``P_num^{(al, be)}(y)`` and its derivative by the three-term recurrence."""
    p0, p1 = mp.mpf(1), (al + 1) + (al + be + 2) * (y - 1) / 2
    if num == 0:
        return p0, mp.mpf(0)
    for k in range(1, num):
        c = 2 * k + al + be
        p0, p1 = p1, ((c + 1) * ((c + 2) * c * y + al * al - be * be) * p1
                      - 2 * (k + al) * (k + be) * (c + 2) * p0) / (2 * (k + 1) * (k + al + be + 1) * c)
    c = 2 * num + al + be
    d = (num * ((al - be) - c * y) * p1 + 2 * (num + al) * (num + be) * p0) / (c * (1 - y * y))
    return p1, d


@lru_cache(maxsize=None)
def _gauss_jacobi_polished(num, a, b):
    # Golub-Welsch nodes from scipy, then Newton steps and Christoffel weights
    # in 40-digit arithmetic; double precision alone loses up to 1e-8 when
    # an exponent is close to -1.
    y0, _ = roots_jacobi(num, b, a)
    with mp.workdps(40):
        al, be = mp.mpf(b), mp.mpf(a)
        const = mp.exp(mp.loggamma(num + al + 1) + mp.loggamma(num + be + 1)
                       - mp.loggamma(num + al + be + 1) - mp.loggamma(num + 1))
        xs, ws = [], []
        for y in y0:
            y = mp.mpf(float(y))
            for _ in range(8):
                f, d = _jacobi_and_derivative(num, al, be, y)
                step = f / d
                y -= step
                if abs(step) < mp.mpf(10) ** -36:
                    break
            _, d = _jacobi_and_derivative(num, al, be, y)
            xs.append(float((y + 1) / 2))
            ws.append(float(const / ((1 - y * y) * d * d)))   # already scaled to [0, 1]
    return np.array(xs), np.array(ws)


def gauss_jacobi01(num, a, b):
    """Gauss rule on [0, 1] for the weight ``x^a (1 - x)^b``."""
    if num < 1:
        raise ValueError("need at least one node")
    x, w = _gauss_jacobi_polished(int(num), float(a), float(b))
    return x.copy(), w.copy()


def gauss_jacobi(num, alpha, beta):
    """Gauss rule on [-1, 1] for ``(1 - y)^alpha (1 + y)^beta`` (scipy's convention)."""
    x, w = gauss_jacobi01(num, beta, alpha)
    return 2.0 * x - 1.0, w * 2.0 ** (alpha + beta + 1.0)


@dataclass(frozen=True)
class CircleRule:
    """``m`` equally spaced nodes on S^1 with weight ``2 pi / m``."""

    m: int

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.m) / self.m

    @property
    def points(self):
        return np.exp(1j * self.angles)

    @property
    def weights(self):
        return np.full(self.m, 2.0 * np.pi / self.m)

    def integrate(self, values):
        return weighted_rowsum_complex(self.weights, values)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights on S^{2n-1}.

    ``kind`` is ``"plain"`` for the surface measure, ``"jacobi"`` when the
    weights absorb ``|v . e_1|^p``, ``"real-jacobi"`` when they absorb
    ``|<v, e_1>|^p``.  Product rules carry their coordinate axes so that
    tabulated bodies can interpolate on them.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    kind: str = "plain"
    p: float | None = None
    resolution: int = 0
    axes: tuple | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.weights)

    @property
    def total_weight(self):
        return weighted_rowsum(self.weights, self.weights * 0 + 1.0)

    @property
    def key(self):
        return (self.n, self.p, self.resolution, self.kind)

    @property
    def is_product(self):
        return self.axes is not None


def _check_resolution(resolution):
    if resolution is None:
        return None
    resolution = int(resolution)
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    return resolution


def _default_resolution(n):
    return DEFAULT_RESOLUTION.get(n, 8)


def _compose(n, phases, phase_w, x, x_w, inner_nodes, inner_w):
    c = np.exp(1j * np.asarray(phases))
    cx = (c[:, None] * x[None, :]).reshape(-1)
    cw = np.sqrt(1.0 - x * x)
    nc, nx, ni = len(c), len(x), len(inner_w)
    first = np.repeat(cx, ni)
    rest = (cw[None, :, None, None] * inner_nodes[None, None, :, :])
    rest = np.broadcast_to(rest, (nc, nx, ni, n - 1)).reshape(-1, n - 1)
    nodes = np.concatenate([first[:, None], rest], axis=1)
    w = (np.asarray(phase_w)[:, None, None] * x_w[None, :, None]
         * inner_w[None, None, :]).reshape(-1)
    return nodes, w


def _x_rule(n, p, num):
    """Rule on [0, 1] for ``x^(p+1) (1 - x^2)^(n-2)``."""
    x, w = gauss_jacobi01(num, p + 1.0, float(n - 2))
    if n > 2:
        w = w * (1.0 + x) ** (n - 2)
    return x, w


def _phase_axis(m):
    return 2.0 * np.pi * np.arange(m) / m


def sphere_rule(n, resolution=None, seed=0, layout=None):
    """Plain rule for the surface measure on S^{2n-1}.

    ``resolution`` nodes per S^1 factor and ``resolution // 2`` Gauss
    nodes in each ``x`` direction.  For ``n >= 4`` the default layout is a
    seeded Monte Carlo rule of ``resolution**3`` points.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    m = _check_resolution(resolution) or _default_resolution(n)
    if layout is None:
        layout = "product" if n <= 3 else "random"
    if layout == "random":
        rng = np.random.default_rng(seed)
        num = m ** 3
        g = rng.standard_normal((num, 2 * n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        nodes = g[:, 0::2] + 1j * g[:, 1::2]
        w = np.full(num, sphere_area(2 * n - 1) / num)
        return QuadratureRule(n, nodes, w, 0, "plain", None, m, None,
                              {"layout": "random", "seed": int(seed)})
    if n == 1:
        ph = _phase_axis(m)
        nodes = np.exp(1j * ph)[:, None]
        w = np.full(m, 2.0 * np.pi / m)
        return QuadratureRule(1, nodes, w, m - 1, "plain", None, m,
                              (("phase", ph),), {"layout": "product"})
    inner = sphere_rule(n - 1, m, seed, "product")
    nx = max(2, m // 2)
    x, xw = _x_rule(n, 0.0, nx)
    ph = _phase_axis(m)
    nodes, w = _compose(n, ph, np.full(m, 2.0 * np.pi / m), x, xw,
                        inner.nodes, inner.weights)
    degree = min(m - 1, 2 * nx - 1 - (n - 2), inner.degree)
    axes = (("phase", ph), ("sin", x)) + inner.axes
    return QuadratureRule(n, nodes, w, degree, "plain", None, m, axes,
                          {"layout": "product"})


def jacobi_sphere_rule(n, p, resolution=None, phases=None, phase_weights=None):
    """Rule with ``sum w_i f(v_i) ~ int f(v) |v . e_1|^p dv``.

    The x-direction uses Gauss-Jacobi nodes for the weight
    ``x^(p+1) (1-x^2)^(n-2)``; supply the integrand without the singular
    factor.  ``phases``/``phase_weights`` replace the equally spaced phase
    rule of the first coordinate, which lets callers fold an extra
    phase-dependent factor into the weights.
    """
    n = int(n)
    p = float(p)
    if n < 2:
        raise ValueError("n must be >= 2")
    if not -2.0 < p:
        raise ValueError("p must exceed -2 (dimension of the kernel body)")
    m = _check_resolution(resolution) or _default_resolution(n)
    if phases is None:
        phases = _phase_axis(m)
        phase_weights = np.full(m, 2.0 * np.pi / m)
    inner = sphere_rule(n - 1, m)
    nx = max(2, m // 2)
    x, xw = _x_rule(n, p, nx)
    nodes, w = _compose(n, phases, phase_weights, x, xw, inner.nodes, inner.weights)
    return QuadratureRule(n, nodes, w, min(m - 1, 2 * nx - 1), "jacobi", p, m,
                          None, {"layout": "product"})


def real_sphere_rule(m, resolution=None):
    """Plain rule on the real sphere S^m; returns ``(nodes (N, m+1), weights)``."""
    res = _check_resolution(resolution) or 64
    if m == 1:
        ph = _phase_axis(res)
        return np.stack([np.cos(ph), np.sin(ph)], axis=1), np.full(res, 2 * np.pi / res)
    inner, iw = real_sphere_rule(m - 1, res)
    a = 0.5 * (m - 2)
    s, sw = roots_jacobi(max(2, res // 2), a, a)
    r = np.sqrt(1.0 - s * s)
    nodes = np.concatenate([
        np.repeat(s, len(iw))[:, None],
        (r[:, None, None] * inner[None, :, :]).reshape(-1, m)], axis=1)
    return nodes, (sw[:, None] * iw[None, :]).reshape(-1)


def _real_to_complex(x):
    return x[:, 0::2] + 1j * x[:, 1::2]


def real_jacobi_sphere_rule(n, p, resolution=None):
    """Rule with ``sum w_i f(v_i) ~ int f(v) |<v, e_1>|^p dv`` (real kernel).

    Splits ``<v, e_1> = s`` into the halves ``[0, 1]`` and ``[-1, 0]``
    with Gauss-Jacobi weights ``|s|^p (1 - s^2)^((2n-3)/2)``.
    """
    n = int(n)
    p = float(p)
    if not p > -1.0:
        raise ValueError("the real kernel needs p > -1")
    m = _check_resolution(resolution) or _default_resolution(n)
    inner, iw = real_sphere_rule(2 * n - 2, m)
    b = 0.5 * (2 * n - 3)
    s, sw = gauss_jacobi01(max(2, m // 2), p, b)
    sw = sw * (1.0 + s) ** b
    s = np.concatenate([s, -s])
    sw = np.concatenate([sw, sw])
    r = np.sqrt(1.0 - s * s)
    real = np.concatenate([
        np.repeat(s, len(iw))[:, None],
        (r[:, None, None] * inner[None, :, :]).reshape(-1, 2 * n - 1)], axis=1)
    w = (sw[:, None] * iw[None, :]).reshape(-1)
    return QuadratureRule(n, _real_to_complex(real), w, 2 * len(sw) // 2 - 1,
                          "real-jacobi", p, m, None, {"layout": "product"})


def real_hyperplane_rule(n, resolution=None):
    """Plain rule on ``S^{2n-1} ∩ e_1^⊥`` (real hyperplane ``Re v_1 = 0``)."""
    m = _check_resolution(resolution) or _default_resolution(n)
    inner, iw = real_sphere_rule(2 * n - 2, m)
    real = np.concatenate([np.zeros((len(iw), 1)), inner], axis=1)
    return QuadratureRule(n, _real_to_complex(real), iw, m - 1, "plain", None, m,
                          None, {"layout": "hyperplane"})


def complex_hyperplane_rule(n, resolution=None):
    """Plain rule on ``S^{2n-1} ∩ {v_1 = 0}`` (a copy of S^{2n-3})."""
    if n < 2:
        raise ValueError("the complex hyperplane needs n >= 2")
    m = _check_resolution(resolution) or _default_resolution(n)
    inner = sphere_rule(n - 1, m) if n - 1 <= 3 else sphere_rule(n - 1, m, layout="random")
    nodes = np.concatenate([np.zeros((len(inner), 1), complex), inner.nodes], axis=1)
    return QuadratureRule(n, nodes, inner.weights, inner.degree, "plain", None, m,
                          None, {"layout": "complex-hyperplane"})


def integrate(rule, f):
    """Return ``sum_i w_i f(v_i)``; ``f`` maps an ``(N, n)`` node array to values.

    Non-finite values raise ``FloatingPointError`` naming the first bad node.
    """
    values = np.asarray(f(rule.nodes) if callable(f) else f)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad.reshape(-1))[0])
        raise FloatingPointError(f"non-finite integrand at node {i}: {rule.nodes[i]}")
    return weighted_rowsum_complex(rule.weights, values)


def unitary_to_e1(u):
    """Unitary ``Theta`` with ``Theta e_1 = u`` (phase times a Householder map)."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("u must be a unit vector")
    n = u.size
    alpha = u[0] / abs(u[0]) if abs(u[0]) > 0 else 1.0
    w = -u.copy()
    w[0] += alpha
    nw = np.vdot(w, w).real
    H = np.eye(n, dtype=complex)
    if nw > 1e-30:
        H -= 2.0 * np.outer(w, w.conj()) / nw
    return alpha * H


def unitaries_to_e1(U):
    """Batched :func:`unitary_to_e1`: array ``(B, n, n)`` for unit rows of ``U``."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    B, n = U.shape
    a = np.abs(U[:, 0])
    alpha = np.where(a > 0, U[:, 0] / np.where(a > 0, a, 1.0), 1.0)
    W = -U.copy()
    W[:, 0] += alpha
    nw = np.einsum("bi,bi->b", W.conj(), W).real
    scale = np.where(nw > 1e-30, 2.0 / np.where(nw > 1e-30, nw, 1.0), 0.0)
    H = np.broadcast_to(np.eye(n, dtype=complex), (B, n, n)).copy()
    H -= scale[:, None, None] * W[:, :, None] * W.conj()[:, None, :]
    return alpha[:, None, None] * H


def rotate_nodes(U, V):
    """``out[b] = Theta_{U[b]} V`` for a batch of unit vectors ``U``."""
    T = unitaries_to_e1(U)
    return np.matmul(V[None, :, :], T.transpose(0, 2, 1))


def rule_to_json(rule):
    doc = {
        "n": rule.n, "kind": rule.kind, "p": rule.p, "resolution": rule.resolution,
        "degree": rule.degree, "meta": rule.meta,
        "nodes": np.stack([rule.nodes.real, rule.nodes.imag], -1).reshape(-1).tolist(),
        "weights": rule.weights.tolist(),
    }
    if rule.axes is not None:
        doc["axes"] = [[k, list(map(float, a))] for k, a in rule.axes]
    return json.dumps(doc)


def rule_from_json(text):
    doc = json.loads(text)
    n = doc["n"]
    flat = np.asarray(doc["nodes"], float).reshape(-1, n, 2)
    axes = None
    if "axes" in doc:
        axes = tuple((k, np.asarray(a, float)) for k, a in doc["axes"])
    return QuadratureRule(n, flat[..., 0] + 1j * flat[..., 1],
                          np.asarray(doc["weights"], float), doc["degree"],
                          doc["kind"], doc["p"], doc["resolution"], axes, doc["meta"])


def cached_rule(kind, n, resolution=None, p=None):
    """Build a rule, reading and writing the JSON cache in ``$LPBODY_CACHE_DIR``."""
    builders = {
        "plain": lambda: sphere_rule(n, resolution),
        "jacobi": lambda: jacobi_sphere_rule(n, p, resolution),
        "real-jacobi": lambda: real_jacobi_sphere_rule(n, p, resolution),
    }
    if kind not in builders:
        raise ValueError(f"unknown rule kind {kind!r}")
    root = os.environ.get(CACHE_ENV)
    if not root:
        return builders[kind]()
    path = Path(root) / f"rule_{kind}_n{n}_r{resolution}_p{p}.json"
    if path.exists():
        return rule_from_json(path.read_text())
    rule = builders[kind]()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rule_to_json(rule))
    return rule

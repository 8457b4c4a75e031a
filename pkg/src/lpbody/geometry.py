"""Star bodies in C^n and planar convex bodies in C.

A star body is stored as an immutable descriptor tree; ``radial`` walks
the tree.  Directions may be passed as complex arrays of shape
``(..., n)`` or as interleaved real arrays of shape ``(..., 2n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import beta, hyp2f1

from lpbody import quadrature as Q
from lpbody.kernels import chord_margin, stencil_contract

UNIT_TOL = 1e-12
SNAP_TOL = 1e-12


def as_points(u, n):
    """Return ``u`` as a complex ``(N, n)`` array plus the batch shape."""
    a = np.asarray(u)
    if not np.iscomplexobj(a) and a.shape[-1] == 2 * n and n != 0:
        a = np.asarray(a, float)
        a = a[..., 0::2] + 1j * a[..., 1::2]
    elif a.shape[-1] != n:
        raise ValueError(f"expected last axis of length {n} (complex) or {2 * n} (real)")
    a = np.asarray(a, complex)
    shape = a.shape[:-1]
    return a.reshape(-1, n), shape


def _require_unit(U):
    err = np.abs(np.linalg.norm(U, axis=1) - 1.0)
    if err.size and err.max() > UNIT_TOL:
        i = int(err.argmax())
        raise ValueError(f"direction {i} is not a unit vector (| |u| - 1 | = {err[i]:.3e})")


def complex_to_real_matrix(M):
    """Real 2n x 2n matrix of the complex-linear map ``M`` (interleaved)."""
    M = np.asarray(M, complex)
    n = M.shape[0]
    R = np.empty((2 * n, 2 * n))
    R[0::2, 0::2] = M.real
    R[0::2, 1::2] = -M.imag
    R[1::2, 0::2] = M.imag
    R[1::2, 1::2] = M.real
    return R


def _check_invertible(A):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise ValueError("matrix is not invertible")


def _mat_to_json(M):
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return [[float(x) for x in row] for row in M]


def _mat_from_json(data, complex_=False):
    a = np.asarray(data, float)
    if complex_:
        return a[..., 0] + 1j * a[..., 1]
    return a


# ---------------------------------------------------------------------------
# radial closed forms


def _power_sum(U, q=4.0):
    """Radial function of ``{sum |z_j|^q <= 1}``."""
    return np.sum(np.abs(U) ** q, axis=1) ** (-1.0 / q)


def _real_power_sum(U, q=4.0):
    """Radial function of ``{sum |x_j|^q <= 1}`` over the 2n real coordinates."""
    X = U.view(float).reshape(len(U), -1)
    return np.sum(np.abs(X) ** q, axis=1) ** (-1.0 / q)


def _polynomial(U, epsilon, exponents, coefficients):
    """``1 + epsilon * sum_a c_a x^a`` in the interleaved real coordinates."""
    X = np.ascontiguousarray(U).view(float).reshape(len(U), -1).T
    powers = {}                                   # (coordinate, degree) -> array

    def power(i, k):
        if (i, k) not in powers:
            powers[i, k] = X[i] if k == 1 else power(i, k - 1) * X[i]
        return powers[i, k]

    total = np.zeros(len(U))
    for e, c in zip(exponents, coefficients):
        term = np.full(len(U), float(c))
        for i, k in enumerate(e):
            if k:
                term *= power(i, int(k))
        total += term
    return 1.0 + epsilon * total


def _hermitian_sum(U, epsilon, terms):
    """``1 + epsilon * sum_t c_t (u* H_t u)^{d_t}``; invariant under ``u -> cu``."""
    n = U.shape[1]
    sq = [U[:, i].real ** 2 + U[:, i].imag ** 2 for i in range(n)]
    cross = {}                                    # conj(u_i) u_j for i < j
    for i in range(n):
        for j in range(i + 1, n):
            cross[i, j] = np.conj(U[:, i]) * U[:, j]
    total = np.zeros(len(U))
    for t in terms:
        H = _mat_from_json(t["matrix"], complex_=True)
        form = sum(H[i, i].real * sq[i] for i in range(n))
        for (i, j), z in cross.items():
            form = form + 2 * (H[i, j].real * z.real - H[i, j].imag * z.imag)
        d = int(t["power"])
        total += t["coef"] * (form if d == 1 else form ** d)
    return 1.0 + epsilon * total


def _axis_ellipsoid(U, a, b):
    """Ellipsoid ``(Re z_1)^2/a^2 + (|z|^2 - (Re z_1)^2)/b^2 <= 1``."""
    x = U[:, 0].real
    return ((x * x) / a ** 2 + (1.0 - x * x) / b ** 2) ** -0.5


RADIAL_FORMS: dict[str, Callable] = {
    "power_sum": _power_sum,
    "real_power_sum": _real_power_sum,
    "polynomial": _polynomial,
    "hermitian_sum": _hermitian_sum,
    "axis_ellipsoid": _axis_ellipsoid,
}

S1_INVARIANT_FORMS = {"power_sum", "hermitian_sum"}


# ---------------------------------------------------------------------------
# product-grid interpolation


def product_coordinates(U):
    """Coordinates ``(phi_1, x_1, phi_2, x_2, ..., phi_n)`` of unit vectors.

    ``x_j = |r_1|`` and ``phi_j = arg r_1`` where ``r`` is the normalized
    tail ``(u_j, ..., u_n)``; this inverts the node layout of
    :func:`lpbody.quadrature.sphere_rule`.
    """
    N, n = U.shape
    R = U.copy()
    coords = []
    for _ in range(n - 1):
        z = R[:, 0]
        x = np.minimum(np.abs(z), 1.0)
        coords.append(np.mod(np.angle(z), 2 * np.pi))
        coords.append(x)
        tail = R[:, 1:]
        r = np.linalg.norm(tail, axis=1)
        safe = r > 1e-300
        nxt = np.zeros_like(tail)
        nxt[safe] = tail[safe] / r[safe, None]
        nxt[~safe, 0] = 1.0
        R = nxt
    coords.append(np.mod(np.angle(R[:, 0]), 2 * np.pi))
    return coords


def _lagrange4(s):
    """Cubic Lagrange weights at local coordinate ``s`` on nodes 0,1,2,3."""
    s = s[:, None]
    w = np.ones((len(s), 4))
    for j in range(4):
        for i in range(4):
            if i != j:
                w[:, j] *= (s[:, 0] - i) / (j - i)
    return w


def _lagrange_nodes(x, nodes):
    """Lagrange weights at ``x`` for four non-uniform ``nodes`` per row."""
    w = np.ones_like(nodes)
    for j in range(4):
        for i in range(4):
            if i != j:
                w[:, j] *= (x - nodes[:, i]) / (nodes[:, j] - nodes[:, i])
    return w


class GridInterpolator:
    """Order-3 tensor Lagrange interpolation on a product sphere grid."""

    def __init__(self, rule):
        if not rule.is_product:
            raise ValueError("interpolation needs a product rule")
        self.rule = rule
        self.axes = rule.axes
        sizes = [len(a) for _, a in self.axes]
        if min(sizes) < 4:
            raise ValueError("interpolation needs at least 4 nodes per axis")
        self.sizes = sizes
        strides = np.ones(len(sizes), dtype=np.int64)
        for d in range(len(sizes) - 2, -1, -1):
            strides[d] = strides[d + 1] * sizes[d + 1]
        self.strides = strides

    def stencils(self, U):
        coords = product_coordinates(U)
        N = len(U)
        index = np.empty((N, len(self.axes), 4), dtype=np.int64)
        weight = np.empty((N, len(self.axes), 4))
        for d, ((kind, nodes), c) in enumerate(zip(self.axes, coords)):
            m = len(nodes)
            if kind == "phase":
                h = 2 * np.pi / m
                t = c / h
                near = np.abs(t - np.round(t)) < SNAP_TOL / h
                t = np.where(near, np.round(t), t)
                i0 = np.floor(t).astype(np.int64)
                index[:, d, :] = np.mod(i0[:, None] - 1 + np.arange(4)[None, :], m)
                weight[:, d, :] = _lagrange4(t - i0 + 1.0)
            else:
                pos = np.searchsorted(nodes, c)
                lo = np.clip(pos - 1, 0, m - 1)
                hi = np.clip(pos, 0, m - 1)
                nearest = np.where(np.abs(nodes[lo] - c) <= np.abs(nodes[hi] - c), lo, hi)
                snap = np.abs(nodes[nearest] - c) < SNAP_TOL
                c = np.where(snap, nodes[nearest], c)
                start = np.clip(pos - 2, 0, m - 4)
                idx = start[:, None] + np.arange(4)[None, :]
                index[:, d, :] = idx
                weight[:, d, :] = _lagrange_nodes(c, nodes[idx])
        return index, weight

    def __call__(self, samples, U):
        index, weight = self.stencils(U)
        return stencil_contract(samples, index, weight, self.strides)


_GRID_CACHE: dict = {}


def output_grid(n, resolution):
    """Product rule used as the tabulation grid (cached per process)."""
    key = (n, resolution)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = Q.sphere_rule(n, resolution, layout="product")
    return _GRID_CACHE[key]


def _interpolator(n, resolution):
    key = ("interp", n, resolution)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = GridInterpolator(output_grid(n, resolution))
    return _GRID_CACHE[key]


# ---------------------------------------------------------------------------
# star body descriptors


@dataclass(frozen=True, eq=False)
class Ball:
    radius: float = 1.0

    def evaluate(self, U):
        return np.full(len(U), float(self.radius))

    def to_dict(self):
        return {"type": "Ball", "radius": float(self.radius)}


@dataclass(frozen=True, eq=False)
class LinearImage:
    """``A K`` for a real invertible ``2n x 2n`` matrix ``A`` (interleaved)."""

    matrix: np.ndarray
    inner: "StarBody"

    def __post_init__(self):
        _check_invertible(self.matrix)
        object.__setattr__(self, "_inv", np.linalg.inv(self.matrix))

    def evaluate(self, U):
        X = U.view(float).reshape(len(U), -1) @ self._inv.T
        r = np.linalg.norm(X, axis=1)
        V = np.ascontiguousarray(X / r[:, None]).view(complex)
        return self.inner._eval(V) / r

    def to_dict(self):
        return {"type": "LinearImage", "matrix": _mat_to_json(self.matrix),
                "inner": self.inner.to_spec()}


@dataclass(frozen=True, eq=False)
class ComplexLinearImage:
    """``M K`` for a complex invertible ``n x n`` matrix ``M``."""

    matrix: np.ndarray
    inner: "StarBody"

    def __post_init__(self):
        _check_invertible(self.matrix)
        object.__setattr__(self, "_inv", np.linalg.inv(self.matrix))

    def evaluate(self, U):
        X = U @ self._inv.T
        r = np.linalg.norm(X, axis=1)
        return self.inner._eval(X / r[:, None]) / r

    def to_dict(self):
        return {"type": "ComplexLinearImage", "matrix": _mat_to_json(self.matrix),
                "inner": self.inner.to_spec()}


@dataclass(frozen=True, eq=False)
class RadialClosedForm:
    """Registered closed form ``name(**params)`` or an arbitrary callable."""

    name: str | None
    params: dict
    func: Callable | None = None

    def evaluate(self, U):
        if self.func is not None:
            return np.asarray(self.func(U), float).reshape(len(U))
        return RADIAL_FORMS[self.name](U, **self.params)

    def to_dict(self):
        if self.func is not None:
            raise ValueError("bodies built from raw callables cannot be serialized")
        return {"type": "RadialClosedForm", "name": self.name, "params": self.params}


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Samples on the product grid ``output_grid(n, resolution)``."""

    n: int
    resolution: int
    samples: np.ndarray
    order: int = 3

    def __post_init__(self):
        if self.order != 3:
            raise ValueError("only order-3 interpolation is implemented")
        grid = output_grid(self.n, self.resolution)
        if self.samples.shape != (len(grid),):
            raise ValueError(f"expected {len(grid)} samples, got {self.samples.shape}")

    def evaluate(self, U):
        return _interpolator(self.n, self.resolution)(self.samples, U)

    def to_dict(self):
        return {"type": "Tabulated", "resolution": int(self.resolution), "order": self.order,
                "samples": [float(x) for x in self.samples]}


@dataclass(frozen=True, eq=False)
class S1Average:
    """``K^{S^1}`` with ``rho^{2n-2} = (1/2pi) int rho_K(cu)^{2n-2} dc``."""

    inner: "StarBody"
    m: int = 64

    def evaluate(self, U):
        n = U.shape[1]
        c = np.exp(2j * np.pi * np.arange(self.m) / self.m)
        vals = self.inner._eval((U[None, :, :] * c[:, None, None]).reshape(-1, n))
        vals = vals.reshape(self.m, len(U))
        if n == 1:
            return np.exp(np.mean(np.log(vals), axis=0))
        e = 2 * n - 2
        return np.mean(vals ** e, axis=0) ** (1.0 / e)

    def to_dict(self):
        return {"type": "S1Average", "m": self.m, "inner": self.inner.to_spec()}


class StarBody:
    """Star body in C^n given by a positive continuous radial function."""

    def __init__(self, n, descriptor, validate=True, s1_invariant=None):
        n = int(n)
        if n < 1:
            raise ValueError("ambient complex dimension must be >= 1")
        self.n = n
        self.descriptor = descriptor
        self._s1 = s1_invariant
        if validate:
            self._validate()

    @property
    def ambient_complex_dim(self):
        return self.n

    def _validate(self):
        grid = Q.sphere_rule(self.n, 8) if self.n <= 3 else Q.sphere_rule(self.n, 4)
        vals = self._eval(grid.nodes)
        bad = ~(np.isfinite(vals) & (vals > 0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(f"radial function not positive/finite at {grid.nodes[i]}: {vals[i]}")

    def __repr__(self):
        return f"StarBody(n={self.n}, {type(self.descriptor).__name__})"

    # evaluation -----------------------------------------------------------

    def _eval(self, U):
        return self.descriptor.evaluate(U)

    def radial(self, u):
        """``rho_K(u)`` for unit directions; rejects non-unit input."""
        U, shape = as_points(u, self.n)
        _require_unit(U)
        out = self._eval(U)
        return float(out[0]) if shape == () else out.reshape(shape)

    def radial_extended(self, x):
        """Degree -1 homogeneous extension ``rho_K(x/|x|)/|x|``."""
        X, shape = as_points(x, self.n)
        r = np.linalg.norm(X, axis=1)
        out = self._eval(X / r[:, None]) / r
        return float(out[0]) if shape == () else out.reshape(shape)

    def gauge(self, x):
        """Minkowski functional ``|x| / rho_K(x/|x|)`` (0 at the origin)."""
        X, shape = as_points(x, self.n)
        r = np.linalg.norm(X, axis=1)
        out = np.zeros(len(X))
        nz = r > 0
        if nz.any():
            out[nz] = r[nz] / self._eval(X[nz] / r[nz, None])
        return float(out[0]) if shape == () else out.reshape(shape)

    @property
    def is_s1_invariant(self):
        """Structural S^1-invariance (True only when known by construction)."""
        if self._s1 is not None:
            return self._s1
        d = self.descriptor
        if isinstance(d, (Ball, S1Average)):
            return True
        if isinstance(d, RadialClosedForm):
            return d.name in S1_INVARIANT_FORMS
        if isinstance(d, ComplexLinearImage):
            return d.inner.is_s1_invariant
        return False

    # constructors ---------------------------------------------------------

    @classmethod
    def ball(cls, n, radius=1.0):
        if not radius > 0:
            raise ValueError("radius must be positive")
        return cls(n, Ball(float(radius)), validate=False)

    @classmethod
    def closed_form(cls, n, name, **params):
        if name not in RADIAL_FORMS:
            raise ValueError(f"unknown closed form {name!r}; known: {sorted(RADIAL_FORMS)}")
        return cls(n, RadialClosedForm(name, params))

    @classmethod
    def from_function(cls, n, func, s1_invariant=None):
        """Wrap ``func``: complex ``(N, n)`` unit vectors -> radii (not serializable)."""
        return cls(n, RadialClosedForm(None, {}, func), s1_invariant=s1_invariant)

    @classmethod
    def tabulated(cls, n, resolution, samples, s1_invariant=None):
        return cls(n, Tabulated(int(n), int(resolution), np.asarray(samples, float)),
                   s1_invariant=s1_invariant)

    def linear_image(self, A):
        A = np.asarray(A, float)
        if A.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"expected a {2 * self.n}x{2 * self.n} real matrix")
        return StarBody(self.n, LinearImage(A, self), validate=False)

    def complex_linear_image(self, M):
        M = np.asarray(M, complex)
        if M.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} complex matrix")
        return StarBody(self.n, ComplexLinearImage(M, self), validate=False)

    def s1_average(self, m=64):
        if self.n < 2:
            raise ValueError("S^1-averaging needs n >= 2")
        return StarBody(self.n, S1Average(self, int(m)), validate=False)

    def tabulate(self, resolution):
        grid = output_grid(self.n, resolution)
        return StarBody.tabulated(self.n, resolution, self._eval(grid.nodes),
                                  s1_invariant=self._s1)

    # serialization --------------------------------------------------------

    def to_spec(self):
        return {"ambient_complex_dim": self.n, "descriptor": self.descriptor.to_dict()}

    @classmethod
    def from_spec(cls, spec, path="$"):
        try:
            n = int(spec["ambient_complex_dim"])
            d = spec["descriptor"]
            kind = d["type"]
        except (KeyError, TypeError) as exc:
            raise SpecError(f"{path}: missing field {exc}") from None
        p = f"{path}.descriptor"
        try:
            if kind == "Ball":
                return cls.ball(n, d.get("radius", 1.0))
            if kind == "LinearImage":
                inner = cls.from_spec(d["inner"], p + ".inner")
                return inner.linear_image(_mat_from_json(d["matrix"]))
            if kind == "ComplexLinearImage":
                inner = cls.from_spec(d["inner"], p + ".inner")
                return inner.complex_linear_image(_mat_from_json(d["matrix"], True))
            if kind == "RadialClosedForm":
                return cls.closed_form(n, d["name"], **d.get("params", {}))
            if kind == "Tabulated":
                return cls.tabulated(n, d["resolution"], d["samples"])
            if kind == "S1Average":
                return cls.from_spec(d["inner"], p + ".inner").s1_average(d.get("m", 64))
        except SpecError:
            raise
        except KeyError as exc:
            raise SpecError(f"{p}.{exc.args[0]}: missing field") from None
        except (TypeError, ValueError) as exc:
            raise SpecError(f"{p}: {exc}") from None
        raise SpecError(f"{p}.type: unknown descriptor {kind!r}")


class SpecError(ValueError):
    """Malformed body specification; the message names the offending field."""


# ---------------------------------------------------------------------------
# free functions


def radial(K, u):
    return K.radial(u)


def s1_invariantize(K, m=64):
    return K.s1_average(m)


def volume(K, rule=None):
    """``V_{2n}(K) = (1/2n) int rho_K^{2n}`` by the given sphere rule.

    Tabulated bodies default to their own grid, so no interpolation occurs.
    """
    d = K.descriptor
    if rule is None and isinstance(d, Tabulated):
        grid = output_grid(K.n, d.resolution)
        return Q.integrate(grid, d.samples ** (2 * K.n)) / (2 * K.n)
    if rule is None:
        rule = Q.sphere_rule(K.n)
    if rule.n != K.n:
        raise ValueError(f"rule is for n={rule.n}, body for n={K.n}")
    if rule.kind != "plain":
        raise ValueError("volume needs a plain rule")
    return Q.integrate(rule, lambda V: K._eval(V) ** (2 * K.n)) / (2 * K.n)


def hermitian_ellipsoid(M):
    """Image of the unit ball under the complex matrix ``M``."""
    M = np.asarray(M, complex)
    return StarBody.ball(M.shape[0]).complex_linear_image(M)


def power_sum_body(n, q=4.0):
    """``{|z_1|^q + ... + |z_n|^q <= 1}``."""
    return StarBody.closed_form(n, "power_sum", q=float(q))


# ---------------------------------------------------------------------------
# planar bodies


def _dot(a, b):
    """Real inner product of complex numbers viewed in R^2."""
    return (a * np.conj(b)).real


@dataclass(frozen=True, eq=False)
class Disk:
    radius: float = 1.0

    def support(self, z):
        return self.radius * np.abs(z)

    def to_dict(self):
        return {"type": "Disk", "radius": float(self.radius)}

    def rotated(self, c0):
        return self


@dataclass(frozen=True, eq=False)
class Segment:
    """Segment with endpoints ``+-w``."""

    w: complex = 1.0

    def support(self, z):
        return np.abs(_dot(z, self.w))

    def to_dict(self):
        return {"type": "Segment", "w": [float(np.real(self.w)), float(np.imag(self.w))]}

    def rotated(self, c0):
        return Segment(complex(c0 * self.w))


@dataclass(frozen=True, eq=False)
class Polygon:
    """Convex polygon, vertices in counterclockwise order."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, complex)
        if v.size < 3:
            raise ValueError("polygon needs at least 3 vertices")
        e = np.roll(v, -1) - v
        cross = (np.conj(e) * np.roll(e, -1)).imag
        if not np.all(cross > 0):
            raise ValueError("polygon vertices must be strictly convex and counterclockwise")

    @property
    def array(self):
        return np.asarray(self.vertices, complex)

    def support(self, z):
        z = np.asarray(z, complex)
        return np.max(_dot(z[..., None], self.array), axis=-1)

    def to_dict(self):
        return {"type": "Polygon", "vertices": [[float(v.real), float(v.imag)] for v in self.array]}

    def rotated(self, c0):
        return Polygon(tuple(complex(c0 * v) for v in self.array))

    def edge_normal_angles(self):
        v = self.array
        normals = -1j * (np.roll(v, -1) - v)
        return np.mod(np.angle(normals), 2 * np.pi)


@dataclass(frozen=True, eq=False)
class SupportClosedForm:
    """Support function given by a callable on complex values (1-homogeneous)."""

    func: Callable

    def support(self, z):
        z = np.asarray(z, complex)
        r = np.abs(z)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, r * np.asarray(self.func(z / safe), float), 0.0)

    def to_dict(self):
        raise ValueError("support functions given by callables cannot be serialized")

    def rotated(self, c0):
        f = self.func
        return SupportClosedForm(lambda c: f(np.conj(c0) * c))


class PlanarConvexBody:
    """Convex body ``C`` in C = R^2 given by its support function."""

    def __init__(self, descriptor, validate=True):
        self.descriptor = descriptor
        self.origin_interior = self._origin_interior()
        if validate:
            self._validate()

    def __repr__(self):
        return f"PlanarConvexBody({self.descriptor})"

    def _origin_interior(self):
        d = self.descriptor
        if isinstance(d, Segment):
            return False
        theta = 2 * np.pi * np.arange(1024) / 1024
        if isinstance(d, Polygon):
            theta = d.edge_normal_angles()      # h is smallest at edge normals
        return bool(np.all(self.support(np.exp(1j * theta)) > 1e-14))

    def _validate(self):
        rng = np.random.default_rng(12345)
        a = np.exp(2j * np.pi * rng.random(200)) * rng.random(200)
        b = np.exp(2j * np.pi * rng.random(200)) * rng.random(200)
        ha, hb, hab = self.support(a), self.support(b), self.support(a + b)
        if np.any(ha < -1e-14) or np.any(~np.isfinite(ha)):
            raise ValueError("support function must be finite and non-negative")
        if np.any(hab > ha + hb + 1e-10 * (1 + ha + hb)):
            raise ValueError("support function is not sublinear on sampled directions")

    # basic ----------------------------------------------------------------

    def support(self, z):
        z = np.asarray(z, complex)
        out = np.asarray(self.descriptor.support(z), float)
        return float(out) if out.ndim == 0 else out

    @property
    def dim(self):
        return 1 if isinstance(self.descriptor, Segment) else 2

    @property
    def is_origin_symmetric(self):
        theta = 2 * np.pi * (np.arange(97) + 0.31) / 97
        c = np.exp(1j * theta)
        return bool(np.allclose(self.support(c), self.support(-c), rtol=1e-12, atol=1e-14))

    @property
    def is_disk(self):
        return isinstance(self.descriptor, Disk)

    @property
    def is_segment(self):
        return isinstance(self.descriptor, Segment)

    # constructors ---------------------------------------------------------

    @classmethod
    def disk(cls, radius=1.0):
        if not radius > 0:
            raise ValueError("radius must be positive")
        return cls(Disk(float(radius)))

    @classmethod
    def segment(cls, w=1.0):
        if w == 0:
            raise ValueError("segment endpoint must be nonzero")
        return cls(Segment(complex(w)))

    @classmethod
    def polygon(cls, vertices):
        return cls(Polygon(tuple(complex(v) for v in vertices)))

    @classmethod
    def from_support(cls, func):
        return cls(SupportClosedForm(func))

    @classmethod
    def square(cls):
        """Square with ``h(+-1) = h(+-i) = 1``."""
        return cls.polygon([1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j])

    @classmethod
    def triangle(cls):
        """Equilateral triangle, vertices ``1, e^{2 pi i/3}, e^{4 pi i/3}``."""
        return cls.polygon([np.exp(2j * np.pi * k / 3) for k in range(3)])

    def to_spec(self):
        return self.descriptor.to_dict()

    @classmethod
    def from_spec(cls, d, path="$"):
        try:
            kind = d["type"]
            if kind == "Disk":
                return cls.disk(d.get("radius", 1.0))
            if kind == "Segment":
                w = d.get("w", [1.0, 0.0])
                return cls.segment(complex(w[0], w[1]))
            if kind == "Polygon":
                return cls.polygon([complex(a, b) for a, b in d["vertices"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"{path}: {exc}") from None
        raise SpecError(f"{path}.type: unknown planar body {d.get('type')!r}")

    # operations -----------------------------------------------------------

    def rotate(self, c0):
        """``c0 C`` for a unit complex ``c0``: ``h_{c0 C}(c) = h_C(conj(c0) c)``."""
        c0 = complex(c0)
        if abs(abs(c0) - 1) > UNIT_TOL:
            raise ValueError("rotation must be by a unit complex number")
        return PlanarConvexBody(self.descriptor.rotated(c0), validate=False)

    def polar(self):
        return polar_planar(self)

    def kink_angles(self):
        """Angles where ``h_C`` on S^1 fails to be smooth."""
        d = self.descriptor
        if isinstance(d, Polygon):
            return np.sort(d.edge_normal_angles())
        if isinstance(d, Segment):
            a = np.angle(d.w)
            return np.sort(np.mod([a + np.pi / 2, a - np.pi / 2], 2 * np.pi))
        return np.zeros(0)

    def weighted_circle_rule(self, p, m=64):
        """Angles and weights with ``sum w g(theta) ~ int h_C(e^{i theta})^p g dtheta``.

        Disks get the equispaced rule.  Polygons and segments are split
        into panels between kink angles; on each panel ``h`` is
        ``|v| cos(theta - arg v)``, and panel ends where ``h`` vanishes get
        a Gauss-Jacobi weight of exponent ``p``.
        """
        p = float(p)
        d = self.descriptor
        if isinstance(d, Disk) or isinstance(d, SupportClosedForm):
            theta = 2 * np.pi * np.arange(m) / m
            return theta, (2 * np.pi / m) * self.support(np.exp(1j * theta)) ** p
        if isinstance(d, Segment):
            if p <= -1:
                raise ValueError("segment kernels need p > -1")
            k = max(8, m // 2)
            y, wy = Q.gauss_jacobi(k, p, p)
            corr = (np.cos(0.5 * np.pi * y) / (1 - y * y)) ** p
            base = 0.5 * np.pi * wy * corr * abs(d.w) ** p
            psi = np.angle(d.w)
            theta = np.concatenate([psi + 0.5 * np.pi * y, psi + np.pi + 0.5 * np.pi * y])
            return np.mod(theta, 2 * np.pi), np.concatenate([base, base])
        v = d.array
        kinks = d.edge_normal_angles()          # normal of edge (v_k, v_{k+1})
        thetas, weights = [], []
        for k in range(len(v)):
            a = kinks[k - 1]
            b = kinks[k]
            if b <= a:
                b += 2 * np.pi
            vk = v[k]
            psi = np.angle(vk)
            width = b - a
            num = max(12, int(math.ceil(m * width / (2 * np.pi))))
            ends = np.cos(np.array([a, b]) - psi) * abs(vk)
            za = 1.0 if ends[0] <= 1e-14 else 0.0
            zb = 1.0 if ends[1] <= 1e-14 else 0.0
            if (za or zb) and p <= -1:
                raise ValueError("h_C vanishes on S^1; the kernel needs p > -1")
            y, wy = Q.gauss_jacobi(num, p * zb, p * za)
            t = a + 0.5 * (y + 1) * width
            s = np.cos(t - psi) * abs(vk)
            w = 0.5 * width * wy * (s / ((1 - y) ** zb * (1 + y) ** za)) ** p
            thetas.append(t)
            weights.append(w)
        return np.mod(np.concatenate(thetas), 2 * np.pi), np.concatenate(weights)

    def kernel_integral(self, p, m=256):
        """``int_{S^1} h_C(c)^p dc``; closed form for disks, segments, polygons."""
        p = float(p)
        d = self.descriptor
        if isinstance(d, Disk):
            return 2 * np.pi * d.radius ** p
        if isinstance(d, Segment):
            if p <= -1:
                return np.inf
            return 2 * abs(d.w) ** p * float(beta(0.5, 0.5 * (p + 1)))
        if isinstance(d, Polygon):
            return _polygon_kernel_integral(d.array, p)
        if isinstance(d, SupportClosedForm) and hasattr(d, "quadratic"):
            return _quadratic_kernel_integral(d.quadratic, p)
        _, w = self.weighted_circle_rule(p, m)
        return float(np.sum(w))

    def dual_image(self, M):
        """Body with support ``h(w) = h_C(M w)`` for a real 2x2 matrix ``M``.

        This is ``M^T C``; complex numbers are read as real 2-vectors.
        """
        M = np.asarray(M, float)
        if abs(np.linalg.det(M)) <= 1e-300:
            raise ValueError("matrix must be invertible")
        d = self.descriptor
        Mt = M.T

        def act(z):
            x = Mt @ np.array([np.real(z), np.imag(z)])
            return complex(x[0], x[1])

        if isinstance(d, Polygon):
            v = [act(z) for z in d.array]
            if np.linalg.det(M) < 0:
                v = v[::-1]
            return PlanarConvexBody(Polygon(tuple(v)), validate=False)
        if isinstance(d, Segment):
            return PlanarConvexBody(Segment(act(d.w)), validate=False)
        if isinstance(d, Disk):
            G = d.radius ** 2 * (M.T @ M)
            return PlanarConvexBody(_QuadraticSupport(G), validate=False)
        f = self.support

        def h(c):
            c = np.asarray(c, complex)
            mapped = M @ np.stack([c.real.ravel(), c.imag.ravel()])
            return np.asarray(f(mapped[0] + 1j * mapped[1])).reshape(c.shape)

        return PlanarConvexBody(SupportClosedForm(h), validate=False)


def _arc_cos_power(phi, p):
    """``int_0^phi cos(t)^p dt`` for ``|phi| < pi/2``."""
    s = np.sin(phi)
    return s * hyp2f1(0.5, 0.5 * (1 - p), 1.5, s * s)


def _polygon_kernel_integral(v, p):
    """Exact ``int_{S^1} h_P^p`` for a convex polygon with the origin inside."""
    normals = np.mod(np.angle(-1j * (np.roll(v, -1) - v)), 2 * np.pi)
    total = 0.0
    for k in range(len(v)):
        a, b = normals[k - 1], normals[k]
        if b <= a:
            b += 2 * np.pi
        psi = np.angle(v[k])
        lo = np.mod(a - psi + np.pi, 2 * np.pi) - np.pi
        hi = lo + (b - a)
        if lo <= -np.pi / 2 or hi >= np.pi / 2:
            if p <= -1:
                return np.inf
        total += abs(v[k]) ** p * (_arc_cos_power(hi, p) - _arc_cos_power(lo, p))
    return float(total)


def _quadratic_kernel_integral(G, p):
    """``int_0^{2 pi} (w^T G w)^{p/2}`` for positive definite ``G``."""
    ev = np.linalg.eigvalsh(G)
    a, b = ev[-1], ev[0]
    return float(2 * np.pi * a ** (0.5 * p) * hyp2f1(-0.5 * p, 0.5, 1.0, 1.0 - b / a))


@dataclass(frozen=True, eq=False)
class _QuadraticSupport(SupportClosedForm):
    """``h(w) = sqrt(w^T G w)``: support of an ellipse."""

    func: Callable = None
    quadratic: np.ndarray = None

    def __init__(self, G):
        G = np.asarray(G, float)
        object.__setattr__(self, "quadratic", G)

        def h(c):
            x, y = np.real(c), np.imag(c)
            return np.sqrt(G[0, 0] * x * x + 2 * G[0, 1] * x * y + G[1, 1] * y * y)

        object.__setattr__(self, "func", h)

    def rotated(self, c0):
        R = np.array([[c0.real, -c0.imag], [c0.imag, c0.real]])
        return _QuadraticSupport(R @ self.quadratic @ R.T)


def support_planar(C, z):
    return C.support(z)


def rotate_planar(C, c0):
    return C.rotate(c0)


class PlanarStarBody:
    """Planar star body given by a positive radial evaluator on S^1."""

    def __init__(self, func, validate=True):
        self.func = func
        if validate:
            c = np.exp(2j * np.pi * np.arange(64) / 64)
            r = self.radial(c)
            if not np.all(np.isfinite(r) & (r > 0)):
                raise ValueError("radial function must be positive and finite")

    def radial(self, c):
        c = np.asarray(c, complex)
        if np.any(np.abs(np.abs(c) - 1) > UNIT_TOL):
            raise ValueError("planar radial function takes unit complex numbers")
        out = np.asarray(self.func(c), float)
        return float(out) if out.ndim == 0 else out

    def rotate(self, c0):
        f = self.func
        return PlanarStarBody(lambda c: f(np.conj(c0) * c), validate=False)


def polar_planar(C):
    """``C°`` with ``rho_{C°} = 1/h_C``; needs the origin in the interior of ``C``."""
    if not C.origin_interior:
        raise ValueError("polar needs the origin in the interior (h_C vanishes somewhere)")
    return PlanarStarBody(lambda c: 1.0 / C.support(c), validate=False)


def convexity_probe_2d(body, m=256, tol=1e-12):
    """Chord test of ``{r rho(c) c : r <= 1}``; returns ``(is_convex, margin)``.

    ``margin`` is the most negative relative radial gap between a sampled
    boundary vertex and the chord joining two other vertices around it.
    """
    if m < 16:
        raise ValueError("need m >= 16 samples")
    theta = 2 * np.pi * np.arange(m) / m
    rho = body.radial(np.exp(1j * theta)) if isinstance(body, PlanarStarBody) else \
        np.asarray(body(np.exp(1j * theta)), float)
    margin = chord_margin(theta, rho)
    return bool(margin >= -tol), margin

"""Bidegree harmonics on S^{2n-1}, Fourier coefficients and multipliers.

A harmonic of bidegree ``(k, l)`` satisfies ``Y(cu) = c^k conj(c)^l Y(u)``.
The zonal one with pole ``e_1`` is ``Y(u) = P_{k,l}(e_1 . u)`` where
``e_1 . u = conj(u_1)`` and, for ``k >= l``,
``P_{k,l}(z) = conj(z)^{k-l} Q_l(k-l, n-2, |z|^2)`` (``z^{l-k}`` for
``l > k``).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, rgamma, roots_legendre

from lpbody import transforms as T
from lpbody.geometry import as_points


@lru_cache(maxsize=None)
def jacobi_Q_coefficients(l, a, b):
    """Monomial coefficients of ``Q_l(a, b, t)`` as exact fractions.

    Gram-Schmidt on ``1, t, t^2, ...`` for the weight ``t^a (1-t)^b`` on
    [0, 1] with moments ``B(a+j+1, b+1)``, normalized by ``Q_l(1) = 1``.
    """
    if l < 0 or a < 0 or b < 0:
        raise ValueError("need l, a, b >= 0")
    a, b = int(a), int(b)

    def moment(j):  # B(a+j+1, b+1) = (a+j)! b! / (a+j+b+1)!
        return Fraction(math.factorial(a + j) * math.factorial(b), math.factorial(a + j + b + 1))

    def inner(p, q):
        return sum(pc * qc * moment(i + j) for i, pc in enumerate(p) for j, qc in enumerate(q))

    basis = []
    for d in range(l + 1):
        v = [Fraction(0)] * d + [Fraction(1)]
        for q in basis:
            c = inner(v, q) / inner(q, q)
            v = [vi - c * (q[i] if i < len(q) else 0) for i, vi in enumerate(v)]
        basis.append(v)
    q = basis[l]
    norm = sum(q)
    return tuple(c / norm for c in q)


def jacobi_Q(l, a, b, t):
    """``Q_l(a, b, t)``: orthogonal for ``t^a (1-t)^b`` on [0, 1], ``Q_l(1) = 1``.

    Evaluated by the three-term recurrence of ``P_l^{(b, a)}(2t - 1)``,
    which stays accurate where the monomial form cancels.
    """
    l, al, be = int(l), int(b), int(a)
    if l < 0 or al < 0 or be < 0:
        raise ValueError("need l, a, b >= 0")
    t = np.asarray(t, float)
    x = 2 * t - 1
    prev, cur = np.ones_like(x), 0.5 * (al - be + (al + be + 2) * x)
    if l == 0:
        cur = prev
    for m in range(2, l + 1):
        s = 2 * m + al + be
        c1 = 2 * m * (m + al + be) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + al * al - be * be)
        c3 = 2 * (m + al - 1) * (m + be - 1) * s
        prev, cur = cur, (c2 * cur - c3 * prev) / c1
    out = cur / math.comb(l + al, l)              # P_l^{(al, be)}(1)
    return float(out) if out.ndim == 0 else out


def P_kl(k, l, n, z):
    """``P_{k,l}(z)`` for ``|z| <= 1`` (see module docstring)."""
    z = np.asarray(z, complex)
    d = k - l
    Qv = jacobi_Q(min(k, l), abs(d), n - 2, np.abs(z) ** 2)
    return (np.conj(z) ** d if d >= 0 else z ** (-d)) * Qv


@dataclass(frozen=True)
class ZonalHarmonic:
    """Zonal harmonic of bidegree ``(k, l)`` on S^{2n-1} with pole ``e_1``."""

    k: int
    l: int
    n: int

    def __call__(self, u):
        U, shape = as_points(u, self.n)
        out = P_kl(self.k, self.l, self.n, np.conj(U[:, 0]))
        return complex(out[0]) if shape == () else out.reshape(shape)

    def solid(self, X):
        """Homogeneous extension of degree ``k + l`` (for harmonicity tests)."""
        X = np.asarray(X, complex)
        r = np.linalg.norm(X, axis=-1)
        U = X / r[..., None]
        return r ** (self.k + self.l) * P_kl(self.k, self.l, self.n, np.conj(U[..., 0]))


def zonal_eval(Y, u):
    return Y(u)


# ---------------------------------------------------------------------------
# Fourier coefficients on S^1


def fourier_coeff(g, k, m=256, breaks=()):
    """``c_k(g) = (1/pi) int g(c) c^k dc`` (``1/(2 pi)`` for ``k = 0``).

    ``g`` takes unit complex numbers.  With ``breaks`` (angles where ``g``
    is not smooth) the circle is split into Gauss-Legendre panels.
    """
    if len(breaks) == 0:
        theta = 2 * np.pi * np.arange(m) / m
        w = np.full(m, 2 * np.pi / m)
    else:
        b = np.sort(np.mod(np.asarray(breaks, float), 2 * np.pi))
        ends = np.append(b, b[0] + 2 * np.pi)
        y, wy = roots_legendre(max(16, m // len(b)))
        theta = np.concatenate([lo + 0.5 * (hi - lo) * (y + 1) for lo, hi in zip(ends[:-1], ends[1:])])
        w = np.concatenate([0.5 * (hi - lo) * wy for lo, hi in zip(ends[:-1], ends[1:])])
    vals = np.asarray(g(np.exp(1j * theta)), float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite on the circle")
    s = np.sum(w * vals * np.exp(1j * k * theta))
    return complex(s / (2 * np.pi if k == 0 else np.pi))


def kernel_fourier_coeff(C, p, k, m=512):
    """``c_k(h_C^p)`` using the kink-adapted weighted rule of ``C``."""
    T.check_complex_p(C, p)
    theta, w = C.weighted_circle_rule(p, m)
    s = np.sum(w * np.exp(1j * k * theta))
    return complex(s / (2 * np.pi if k == 0 else np.pi))


def half_cosine_fourier_coeff(p, k):
    """Closed form of ``c_k((Re c)^p 1_{Re c >= 0})``."""
    p = float(p)
    g = math.exp(gammaln(p + 1) - p * math.log(2))
    if k == 0:
        return g * float(rgamma(p / 2 + 1)) ** 2 / 2
    return g * float(rgamma((p + k) / 2 + 1) * rgamma((p - k) / 2 + 1))


# ---------------------------------------------------------------------------
# closed-form multipliers


def alpha_coefficient(n, p, k, l):
    """``alpha^{(n,p)}_{k,l}`` with the gamma poles cancelled.

    ``Gamma((p-|d|)/2+1)/Gamma((p-k-l)/2+1)`` is the finite product
    ``prod_{j=1}^{min(k,l)} ((p-|d|)/2 + 1 - j)``.
    """
    d = abs(k - l)
    a = (p - d) / 2 + 1
    prod = 1.0
    for j in range(1, min(k, l) + 1):
        prod *= a - j
    logs = gammaln((p + d) / 2 + 1) - gammaln((p + k + l) / 2 + n)
    return math.pi ** n * math.exp(logs) * prod


def multiplier_J(C, p, n, k, l, m=512):
    """``lambda_{k,l}[J_{C,p}]``; uses the Fourier coefficient of index ``k - l``."""
    T.check_complex_p(C, p)
    a = alpha_coefficient(n, p, k, l)
    if k == l:
        return complex(kernel_fourier_coeff(C, p, 0, m) * 2 * a)
    return complex(kernel_fourier_coeff(C, p, k - l, m) * a)


def multiplier_cosine(p, n, k, l):
    """``lambda_{k,l}[C_p^+] = (pi^n/2^p) Gamma(p+1) / (Gamma(n+(p+k+l)/2) Gamma((p-k-l)/2+1))``."""
    p = float(p)
    if not p > -1:
        raise ValueError("the one-sided cosine kernel needs p > -1")
    val = math.exp(n * math.log(math.pi) - p * math.log(2) + gammaln(p + 1) - gammaln(n + (p + k + l) / 2))
    return float(val * rgamma((p - k - l) / 2 + 1))


def multiplier_radon(n, k, l=None):
    """``lambda_{k,k}[R_c] = (-1)^k 2 pi^{n-1} k!/(n+k-2)!``; zero off the diagonal."""
    if n < 2:
        raise ValueError("needs n >= 2")
    if l is not None and l != k:
        return 0.0
    return float((-1) ** k * 2 * math.pi ** (n - 1) * math.exp(gammaln(k + 1) - gammaln(n + k - 1)))


# ---------------------------------------------------------------------------
# numerical Funk-Hecke extraction


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    spread: float
    points: int


def _kernel_apply(kernel, n, resolution):
    kind = kernel[0]
    if kind == "J":
        _, C, p = kernel
        rule = T.j_rule(C, p, n, resolution)
    elif kind == "cosine":
        rule = T.cosine_rule(kernel[1], n, resolution)
    elif kind == "radon":
        rule = T.radon_rule(n, resolution)
    else:
        raise ValueError(f"unknown kernel {kind!r}")
    return rule


def funk_hecke_eigenvalue(kernel, n, k, l, resolution=None, points=4, seed=0):
    """Eigenvalue of a zonal kernel transform on bidegree ``(k, l)``.

    ``kernel`` is ``("J", C, p)``, ``("cosine", p)`` or ``("radon",)``.
    The transform of the zonal harmonic is divided by the harmonic at
    random ``u`` with ``|Y(u)| > 0.1`` and averaged; ``spread`` is the
    largest deviation between points.
    """
    Y = ZonalHarmonic(k, l, n)
    rule = _kernel_apply(kernel, n, resolution)
    rng = np.random.default_rng(seed)
    us = []
    while len(us) < points:
        g = rng.standard_normal(2 * n)
        u = (g[0::2] + 1j * g[1::2]) / np.linalg.norm(g)
        if abs(Y(u)) > 0.1:
            us.append(u)
    U = np.array(us)
    re = rule.apply(lambda V: Y(V).real, U)
    im = rule.apply(lambda V: Y(V).imag, U)
    ratios = (re + 1j * im) / Y(U)
    value = complex(np.mean(ratios))
    return Eigenvalue(value, float(np.max(np.abs(ratios - value))), points)


# ---------------------------------------------------------------------------
# tables


@dataclass
class MultiplierTable:
    """Multipliers ``(k, l) -> value`` of one transform, closed form and numeric."""

    tag: str
    n: int
    closed: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)

    def rows(self):
        for key in sorted(self.closed):
            c = self.closed[key]
            num = self.numeric.get(key)
            if num is None:
                err = ""
            else:
                scale = abs(c)
                err = abs(num - c) / scale if scale > 1e-12 else abs(num - c)
            yield key, c, num, err

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "re", "im", "method", "numeric_re", "numeric_im", "error"])
        for (k, l), c, num, err in self.rows():
            w.writerow([k, l, repr(float(np.real(c))), repr(float(np.imag(c))), "closed-form",
                        "" if num is None else repr(float(np.real(num))),
                        "" if num is None else repr(float(np.imag(num))),
                        "" if err == "" else f"{err:.3e}"])
        return buf.getvalue()


def multiplier_table(kernel, n, kmax, lmax, numeric=True, resolution=None):
    """Closed-form (and optionally numeric) multipliers for ``k <= kmax, l <= lmax``."""
    if kmax > 10 or lmax > 10:
        raise ValueError("kmax and lmax are limited to 10")
    kind = kernel[0]
    tag = {"J": "J", "cosine": "C+", "radon": "Rc"}[kind]
    table = MultiplierTable(tag, n)
    for k in range(kmax + 1):
        for l in range(lmax + 1):
            if kind == "J":
                c = multiplier_J(kernel[1], kernel[2], n, k, l)
            elif kind == "cosine":
                c = multiplier_cosine(kernel[1], n, k, l)
            else:
                c = multiplier_radon(n, k, l)
            table.closed[(k, l)] = complex(c)
            if numeric:
                table.numeric[(k, l)] = funk_hecke_eigenvalue(kernel, n, k, l, resolution).value
    return table


__all__ = [
    "jacobi_Q", "jacobi_Q_coefficients", "P_kl", "ZonalHarmonic", "zonal_eval",
    "fourier_coeff", "kernel_fourier_coeff", "half_cosine_fourier_coeff",
    "alpha_coefficient", "multiplier_J", "multiplier_cosine", "multiplier_radon",
    "funk_hecke_eigenvalue", "Eigenvalue", "MultiplierTable", "multiplier_table",
]

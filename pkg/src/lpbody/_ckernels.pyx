# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: compensated weighted sums, chord margins and
product-grid Lagrange contraction."""
import numpy as np

from libc.math cimport fabs, cos, sin, M_PI


def weighted_rowsum(const double[::1] w, const double[:, ::1] f):
    """Neumaier-compensated sum of ``w * f[b]`` for every row ``b``."""
    cdef Py_ssize_t nb = f.shape[0], n = f.shape[1], b, i
    cdef double s, c, x, t
    out = np.empty(nb)
    cdef double[::1] o = out
    if w.shape[0] != n:
        raise ValueError("weight length does not match row length")
    for b in range(nb):
        s = 0.0
        c = 0.0
        for i in range(n):
            x = w[i] * f[b, i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        o[b] = s + c
    return out


def chord_margin(const double[::1] theta, const double[::1] rho):
    """Smallest relative radial margin of sampled vertices against chords.

    ``theta`` must be strictly increasing in [0, 2*pi).  For each chord
    between vertices i and j spanning an angle below pi, every vertex k
    strictly between them is compared with the point where its ray meets
    the chord.
    """
    cdef Py_ssize_t m = theta.shape[0], i, j, k, step, off
    cdef double xi, yi, xj, yj, dx, dy, ex, ey, den, t, span, worst, marg
    worst = np.inf
    for i in range(m):
        xi = rho[i] * cos(theta[i])
        yi = rho[i] * sin(theta[i])
        for step in range(2, m):
            j = (i + step) % m
            span = theta[j] - theta[i]
            if span < 0:
                span += 2.0 * M_PI
            if span >= M_PI - 1e-12:
                break
            xj = rho[j] * cos(theta[j])
            yj = rho[j] * sin(theta[j])
            dx = xj - xi
            dy = yj - yi
            for off in range(1, step):
                k = (i + off) % m
                ex = cos(theta[k])
                ey = sin(theta[k])
                den = ex * dy - ey * dx
                if den == 0.0:
                    continue
                t = (xi * dy - yi * dx) / den
                marg = (rho[k] - t) / rho[k]
                if marg < worst:
                    worst = marg
    return worst


def stencil_contract(const double[::1] samples, const long[:, :, ::1] index,
                     const double[:, :, ::1] weight, const long[::1] strides):
    """Contract tensor-product stencils against flat grid samples.

    ``index[q, d, s]`` and ``weight[q, d, s]`` hold the stencil of query
    ``q`` along axis ``d``; ``strides`` are the flat strides of each axis.
    """
    cdef Py_ssize_t nq = index.shape[0], nd = index.shape[1], ns = index.shape[2]
    cdef Py_ssize_t q, d, total, lin, rem, flat, sd
    cdef double acc, wprod
    total = 1
    for d in range(nd):
        total *= ns
    out = np.empty(nq)
    cdef double[::1] o = out
    for q in range(nq):
        acc = 0.0
        for lin in range(total):
            rem = lin
            flat = 0
            wprod = 1.0
            for d in range(nd - 1, -1, -1):
                sd = rem % ns
                rem = rem // ns
                flat += index[q, d, sd] * strides[d]
                wprod *= weight[q, d, sd]
            if wprod != 0.0:
                acc += wprod * samples[flat]
        o[q] = acc
    return out

"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""
import itertools

import numpy as np


def weighted_rowsum(w, f):
    """Compensated sum of ``w * f[b]`` per row by a pairwise TwoSum tree."""
    w = np.ascontiguousarray(w, dtype=float)
    f = np.ascontiguousarray(f, dtype=float)
    if f.ndim != 2 or f.shape[1] != w.shape[0]:
        raise ValueError("weight length does not match row length")
    x = f * w
    err = np.zeros(x.shape[0])
    while x.shape[1] > 1:
        if x.shape[1] % 2:
            x = np.concatenate([x, np.zeros((x.shape[0], 1))], axis=1)
        a = x[:, 0::2]
        b = x[:, 1::2]
        s = a + b
        bb = s - a
        err += ((a - (s - bb)) + (b - bb)).sum(axis=1)
        x = s
    if x.shape[1] == 0:
        return err
    return x[:, 0] + err


def chord_margin(theta, rho):
    theta = np.asarray(theta, dtype=float)
    rho = np.asarray(rho, dtype=float)
    m = theta.size
    px = rho * np.cos(theta)
    py = rho * np.sin(theta)
    ex = np.cos(theta)
    ey = np.sin(theta)
    worst = np.inf
    for step in range(2, m):
        i = np.arange(m)
        j = (i + step) % m
        span = np.mod(theta[j] - theta[i], 2 * np.pi)
        ok = span < np.pi - 1e-12
        if not ok.any():
            break
        i, j = i[ok], j[ok]
        dx = px[j] - px[i]
        dy = py[j] - py[i]
        for off in range(1, step):
            k = (i + off) % m
            den = ex[k] * dy - ey[k] * dx
            good = den != 0.0
            if not good.any():
                continue
            t = (px[i] * dy - py[i] * dx)[good] / den[good]
            marg = (rho[k][good] - t) / rho[k][good]
            worst = min(worst, float(marg.min()))
    return worst


def stencil_contract(samples, index, weight, strides):
    samples = np.asarray(samples, dtype=float)
    nq, nd, ns = index.shape
    out = np.zeros(nq)
    for combo in itertools.product(range(ns), repeat=nd):
        flat = np.zeros(nq, dtype=np.int64)
        wprod = np.ones(nq)
        for d, s in enumerate(combo):
            flat += index[:, d, s] * strides[d]
            wprod *= weight[:, d, s]
        out += wprod * samples[flat]
    return out

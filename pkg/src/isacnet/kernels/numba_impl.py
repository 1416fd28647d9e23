"""numba-compiled versions of the hot quadrature kernels (same contracts as
numpy_impl)."""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def direct_suffix(s, r, w, starts, wl, wn, kl, kn, m_los, m_nlos):
    n_s, n_r, n_k = s.size, r.size, starts.size
    out = np.empty((n_s, n_k))
    for i in range(n_s):
        acc = 0.0
        k = n_k - 1
        for q in range(n_r - 1, -1, -1):
            gl = -math.expm1(-m_los * math.log1p(s[i] * kl[q]))
            gn = -math.expm1(-m_nlos * math.log1p(s[i] * kn[q]))
            acc += (wl[q] * gl + wn[q] * gn) * w[q]
            while k >= 0 and starts[k] == q:
                out[i, k] = acc
                k -= 1
    return out


@njit(cache=True)
def clutter_reflection_sum(kappa, psi, base, w, starts, e1w, scale):
    n_v, n_b = kappa.shape
    _, n_j, n_r = psi.shape
    n_k = starts.size
    bw = base * w
    out = np.zeros((n_v, n_b))
    for v in range(n_v):
        for b in range(n_b):
            kv = kappa[v, b]
            tot = 0.0
            for j in range(n_j):
                acc = 0.0
                k = n_k - 1
                for q in range(n_r - 1, -1, -1):
                    acc += -math.expm1(-kv * psi[b, j, q]) * bw[q]
                    while k >= 0 and starts[k] == q:
                        tot += e1w[b, j, k] * math.exp(-scale * acc)
                        k -= 1
            out[v, b] = tot
    return out

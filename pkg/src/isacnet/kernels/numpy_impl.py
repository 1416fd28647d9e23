"""Pure-numpy reference implementations of the hot quadrature kernels."""
from __future__ import annotations

import numpy as np


def _suffix(contrib: np.ndarray, starts: np.ndarray) -> np.ndarray:
    tail = np.cumsum(contrib[..., ::-1], axis=-1)[..., ::-1]
    return tail[..., starts]


def direct_suffix(s, r, w, starts, wl, wn, kl, kn, m_los, m_nlos):
    """Radial LoS+NLoS Nakagami PGFL integrals from every lower limit.

    Returns shape (len(s), len(starts)).
    """
    sk_l = s[:, None] * kl[None, :]
    sk_n = s[:, None] * kn[None, :]
    g = wl * -np.expm1(-m_los * np.log1p(sk_l)) + wn * -np.expm1(-m_nlos * np.log1p(sk_n))
    return _suffix(g * w, starts)


def clutter_reflection_sum(kappa, psi, base, w, starts, e1w, scale):
    """sum_{j,k} e1w[b,j,k] * exp(-scale * int_{R_k} base (1 - e^{-kappa[v,b] psi[b,j,r]}) dr).

    kappa: (V, B); psi: (B, J, R); e1w: (B, J, K). Returns (V, B).
    """
    bw = base * w
    n_v = kappa.shape[0]
    b, j, r = psi.shape
    step = max(1, int(4e6 // max(1, b * j * r)))
    out = np.empty(kappa.shape)
    for i in range(0, n_v, step):
        kv = kappa[i:i + step, :, None, None]
        g = -np.expm1(-kv * psi[None]) * bw
        f2 = _suffix(g, starts)
        out[i:i + step] = np.einsum("vbjk,bjk->vb", np.exp(-scale * f2), e1w)
    return out

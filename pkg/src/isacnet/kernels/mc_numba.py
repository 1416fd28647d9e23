"""numba Monte Carlo trial kernel. Mirrors mc_numpy draw for draw."""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..sysconfig import SPEED_OF_LIGHT
from . import rng as _r
from .mc_layout import (C_DESIRED, C_DIRECT_LOS, C_DIRECT_NLOS, C_INTER_CLUTTER, C_INTER_TARGET,
                        C_INTRA, C_NOISE, C_SI, K_DESIRED, K_LOS, K_NLOS, K_NOISE, MAX_FADE,
                        MAX_LINKS, P_A2, P_BW, P_CL, P_CN, P_D, P_ETA_L, P_ETA_N, P_GAMMA, P_GM,
                        P_K_W, P_LAM_BS, P_LAM_CL, P_M, P_M_L, P_M_N, P_NLINKS, P_NOISE, P_PC,
                        P_PS, P_R1, P_RCUT, P_RWIN, P_SIDE, P_SIG_CL, P_SIG_T, P_THETA_M,
                        P_TX_DIRECT, P_WAVE, P_ZETA, RX_MARGIN)

U_C1 = np.uint64(_r.C1)
U_C2 = np.uint64(_r.C2)
U_GOLDEN = np.uint64(_r.GOLDEN)
INV_2_53 = _r.INV_2_53

S_COUNT, S_POS, S_ROT, S_FBLK = _r.S_COUNT, _r.S_POS, _r.S_ROT, _r.S_FBLK
S_LOS_T, S_LOS_D, S_FADE_D, S_RCS_T = _r.S_LOS_T, _r.S_LOS_D, _r.S_FADE_D, _r.S_RCS_T
S_RCS_I, S_CL_COUNT, S_CL_POS, S_RCS_Q = _r.S_RCS_I, _r.S_CL_COUNT, _r.S_CL_POS, _r.S_RCS_Q
S_RCS_QI, S_MIS, S_FADE_C, S_FADE_CI, S_B1 = _r.S_RCS_QI, _r.S_MIS, _r.S_FADE_C, _r.S_FADE_CI, _r.S_B1
S_COUNT_OUT, S_POS_OUT = _r.S_COUNT_OUT, _r.S_POS_OUT


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * U_C1
    z = (z ^ (z >> np.uint64(27))) * U_C2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def trial_key(skey, trial, attempt):
    return mix64(skey + mix64(np.uint64(trial) * U_GOLDEN + np.uint64(attempt)))


@njit(cache=True)
def uniform(key, stream, idx):
    z = (np.uint64(stream) << np.uint64(48)) + np.uint64(idx)
    h = mix64(key ^ mix64(z))
    return (np.float64(h >> np.uint64(11)) + 0.5) * INV_2_53


@njit(cache=True)
def poisson(mean, key, stream):
    if mean <= 0.0:
        return 0
    if mean < 10.0:
        k = 0
        p = math.exp(-mean)
        s = p
        u = uniform(key, stream, 0)
        while u > s and k < 1000:
            k += 1
            p *= mean / k
            s += p
        return k
    slam = math.sqrt(mean)
    loglam = math.log(mean)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    i = 0
    while True:
        u = uniform(key, stream, i) - 0.5
        v = uniform(key, stream, i + 1)
        i += 2
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -mean + k * loglam - math.lgamma(k + 1.0)):
            return int(k)


@njit(cache=True)
def gamma_unit(key, stream, base, m):
    """Unit-mean Gamma(m, 1/m) for integer m as a sum of exponentials."""
    acc = 0.0
    for i in range(m):
        acc += -math.log(uniform(key, stream, base + i))
    return acc / m


@njit(cache=True)
def weibull(key, stream, idx, scale, k):
    return scale * (-math.log(uniform(key, stream, idx))) ** (1.0 / k)


@njit(cache=True)
def place_stations(key, r0, r_in, side, n_in, n_out):
    """BS positions: the conditioned nearest BS at distance r0 (if r0 > 0),
    n_in points uniform in the annulus r0 < r < r_in, then n_out points
    uniform in the square outside the disk."""
    n_fix = 1 if r0 > 0.0 else 0
    n = n_fix + n_in + n_out
    xs = np.empty(n)
    ys = np.empty(n)
    two_pi = 2.0 * math.pi
    if n_fix:
        ang = two_pi * uniform(key, S_B1, 0)
        xs[0] = r0 * math.cos(ang)
        ys[0] = r0 * math.sin(ang)
    span = r_in * r_in - r0 * r0
    for i in range(n_in):
        rr = math.sqrt(r0 * r0 + span * uniform(key, S_POS, 2 * i))
        ang = two_pi * uniform(key, S_POS, 2 * i + 1)
        xs[n_fix + i] = rr * math.cos(ang)
        ys[n_fix + i] = rr * math.sin(ang)
    for i in range(n_out):
        a = 0
        while True:
            base = (i * 64 + a) * 2
            x = (uniform(key, S_POS_OUT, base) - 0.5) * side
            y = (uniform(key, S_POS_OUT, base + 1) - 0.5) * side
            if x * x + y * y > r_in * r_in or a >= 63:
                break
            a += 1
        xs[n_fix + n_in + i] = x
        ys[n_fix + n_in + i] = y
    return xs, ys


@njit(cache=True)
def nearest_links(xs, ys, swap_nearest, order, odist):
    """Fill order/odist with index 0 followed by the nearest other BSs
    (-1 / inf when missing). With swap_nearest the nearest BS is first
    moved to index 0. Returns all distances to the origin."""
    n = xs.size
    n_links = order.size
    if n == 0:
        order[:] = -1
        odist[:] = math.inf
        return np.empty(0)
    if swap_nearest:
        best = 0
        bd = math.inf
        for j in range(n):
            dd = xs[j] * xs[j] + ys[j] * ys[j]
            if dd < bd:
                bd = dd
                best = j
        xs[0], xs[best] = xs[best], xs[0]
        ys[0], ys[best] = ys[best], ys[0]
    dist = np.sqrt(xs * xs + ys * ys)
    for l in range(n_links):
        order[l] = -1
        odist[l] = math.inf
    order[0] = 0
    odist[0] = dist[0]
    for j in range(1, n):
        dj = dist[j]
        if n_links > 1 and dj < odist[n_links - 1]:
            pos = n_links - 1
            while pos > 1 and odist[pos - 1] > dj:
                order[pos] = order[pos - 1]
                odist[pos] = odist[pos - 1]
                pos -= 1
            order[pos] = j
            odist[pos] = dj
    return dist


@njit(cache=True, nogil=True)
def run_trials(skey, first, count, par, comps, comm, r1_out, beta_out, rerolls):
    r1_fixed = par[P_R1]
    side = par[P_SIDE]
    lam_bs, lam_cl = par[P_LAM_BS], par[P_LAM_CL]
    n_beams, d_spread = par[P_M], par[P_D]
    gm, c_los, c_nlos = par[P_GM], par[P_CL], par[P_CN]
    eta_l, eta_n = par[P_ETA_L], par[P_ETA_N]
    m_l, m_n = int(par[P_M_L]), int(par[P_M_N])
    gamma, bw = par[P_GAMMA], par[P_BW]
    sig_t, sig_cl, k_w = par[P_SIG_T], par[P_SIG_CL], par[P_K_W]
    p_s, p_c, zeta, noise = par[P_PS], par[P_PC], par[P_ZETA], par[P_NOISE]
    a_sd = math.sqrt(par[P_A2])
    theta_m = par[P_THETA_M]
    n_links = int(par[P_NLINKS])
    r_cut, r_win_cap = par[P_RCUT], par[P_RWIN]
    tx_direct = par[P_TX_DIRECT] > 0.5

    two_pi = 2.0 * math.pi
    cos_sector = math.cos(math.pi / n_beams)
    tan_sector = math.tan(math.pi / n_beams)
    cos_lobe = math.cos(math.pi / d_spread)
    half_mono = SPEED_OF_LIGHT / (4.0 * bw)
    half_bi = SPEED_OF_LIGHT / (2.0 * bw)
    radar = p_s * gm * gm * par[P_WAVE] ** 2 / (4.0 * math.pi) ** 3
    direct_l = p_c * gm * gm * c_los
    direct_n = p_c * gm * gm * c_nlos

    r0 = r1_fixed if r1_fixed > 0.0 else 0.0
    n_fix = 1 if r1_fixed > 0.0 else 0
    r_in = min(r_cut + RX_MARGIN, 0.5 * side)
    order = np.empty(n_links, np.int64)
    odist = np.empty(n_links)
    member = np.empty(0, np.int64)

    for t in range(count):
        trial = first + t
        attempt = 0
        while True:
            key = trial_key(skey, trial, attempt)
            n_in = poisson(lam_bs * math.pi * (r_in * r_in - r0 * r0), key, S_COUNT)
            n_out = poisson(lam_bs * (side * side - math.pi * r_in * r_in), key, S_COUNT_OUT)
            if n_in + n_out + n_fix >= 1:
                break
            attempt += 1
            rerolls[t] += 1

        xs, ys = place_stations(key, r0, r_in, side, n_in, 0)
        dist = nearest_links(xs, ys, n_fix == 0, order, odist)
        if n_fix + n_in < n_links or odist[n_links - 1] > r_in - r_cut:
            xs, ys = place_stations(key, r0, r_in, side, n_in, n_out)
            dist = nearest_links(xs, ys, n_fix == 0, order, odist)
        n_bs = xs.size
        r1 = dist[0]
        r1_out[t] = r1

        max_rx = 0.0
        for l in range(n_links):
            if order[l] >= 0 and odist[l] > max_rx:
                max_rx = odist[l]
        lim = r_cut + max_rx
        cand = np.empty(n_bs, np.int64)
        nc = 0
        for j in range(n_bs):
            if dist[j] <= lim:
                cand[nc] = j
                nc += 1

        ex = np.zeros(n_bs)
        ey = np.zeros(n_bs)
        cov_t = np.zeros(n_bs, np.bool_)
        los_t = np.zeros(n_bs, np.bool_)
        for ci in range(nc):
            j = cand[ci]
            if j == 0:
                psi = math.atan2(-ys[0], -xs[0])
            else:
                blk = math.floor(uniform(key, S_FBLK, j) * n_beams)
                psi = two_pi * (uniform(key, S_ROT, j) + blk) / n_beams
            ex[j] = math.cos(psi)
            ey[j] = math.sin(psi)
            if j == 0:
                cov_t[j] = True
                los_t[j] = True
            else:
                cov_t[j] = -(xs[j] * ex[j] + ys[j] * ey[j]) >= dist[j] * cos_sector
                los_t[j] = uniform(key, S_LOS_T, j) < math.exp(-gamma * dist[j])

        # clutter window around the target
        ext = half_mono + r1 * tan_sector
        for l in range(1, n_links):
            rx = order[l]
            if rx < 0:
                beta_out[t, l] = math.nan
                continue
            cb2 = 0.5 * (1.0 + (xs[0] * xs[rx] + ys[0] * ys[rx]) / (r1 * dist[rx]))
            cb2 = min(max(cb2, 0.0), 1.0)
            beta_out[t, l] = 2.0 * math.acos(math.sqrt(cb2))
            h = 1.5 * half_bi / (2.0 * max(cb2, 1e-12))
            e = h + (dist[rx] + h) * tan_sector
            if e > ext:
                ext = e
        beta_out[t, 0] = 0.0
        r_win = min(ext + 1.0, r_win_cap)
        n_q = poisson(lam_cl * math.pi * r_win * r_win, key, S_CL_COUNT) if lam_cl > 0.0 else 0
        qx = np.empty(n_q)
        qy = np.empty(n_q)
        for q in range(n_q):
            rq = r_win * math.sqrt(uniform(key, S_CL_POS, 2 * q))
            aq = two_pi * uniform(key, S_CL_POS, 2 * q + 1)
            qx[q] = rq * math.cos(aq)
            qy[q] = rq * math.sin(aq)
        if member.size < n_q:
            member = np.empty(n_q, np.int64)

        for l in range(n_links):
            rx = order[l]
            for c in range(8):
                comps[t, l, c] = 0.0
            if rx < 0:
                continue
            bx, by = xs[rx], ys[rx]
            rr = dist[rx]
            ux, uy = -bx / rr, -by / rr

            # desired echo
            sigma = -sig_t * math.log(uniform(key, S_RCS_T, l))
            if l == 0:
                comps[t, l, C_DESIRED] = radar * sigma / r1 ** (2.0 * eta_l)
            else:
                c1 = los_t[rx] and not cov_t[rx]
                if c1:
                    cb = math.cos(0.5 * beta_out[t, l])
                    comps[t, l, C_DESIRED] = radar * sigma * cb / (r1 ** eta_l * rr ** eta_l)

            # clutter inside the resolution cell
            n_mem = 0
            intra = 0.0
            for q in range(n_q):
                dx1, dy1 = qx[q] - xs[0], qy[q] - ys[0]
                d1 = math.sqrt(dx1 * dx1 + dy1 * dy1)
                if l == 0:
                    if abs(d1 - r1) > half_mono:
                        continue
                    if -(dx1 * xs[0] + dy1 * ys[0]) / r1 < d1 * cos_sector:
                        continue
                    sq = weibull(key, S_RCS_Q, q * MAX_LINKS + l, sig_cl, k_w)
                    intra += radar * sq / d1 ** (2.0 * eta_l)
                else:
                    dxn, dyn = qx[q] - bx, qy[q] - by
                    dn = math.sqrt(dxn * dxn + dyn * dyn)
                    if abs(d1 + dn - r1 - rr) > half_bi:
                        continue
                    if dxn * ux + dyn * uy < dn * cos_sector:
                        continue
                    cq = 0.5 * (1.0 + (dx1 * dxn + dy1 * dyn) / (d1 * dn))
                    sq = weibull(key, S_RCS_Q, q * MAX_LINKS + l, sig_cl, k_w)
                    intra += radar * sq * math.sqrt(min(max(cq, 0.0), 1.0)) / (d1 ** eta_l * dn ** eta_l)
                member[n_mem] = q
                n_mem += 1
            comps[t, l, C_INTRA] = intra

            # reflections of other BSs' beams off the target and the cell
            it = 0.0
            ic = 0.0
            for ci in range(nc):
                v = cand[ci]
                if v == 0 or v == rx or not cov_t[v] or not los_t[v]:
                    continue
                rv = dist[v]
                if rv > r_cut:
                    continue
                cbv = 0.5 * (1.0 + (xs[v] * bx + ys[v] * by) / (rv * rr))
                cbv = math.sqrt(min(max(cbv, 0.0), 1.0))
                sv = -sig_t * math.log(uniform(key, S_RCS_I, v * MAX_LINKS + l))
                it += radar * sv * cbv / (rv ** eta_l * rr ** eta_l)
                for mi in range(n_mem):
                    q = member[mi]
                    dvx, dvy = xs[v] - qx[q], ys[v] - qy[q]
                    drx, dry = bx - qx[q], by - qy[q]
                    dv = math.sqrt(dvx * dvx + dvy * dvy)
                    dr = math.sqrt(drx * drx + dry * dry)
                    cq = 0.5 * (1.0 + (dvx * drx + dvy * dry) / (dv * dr))
                    sq = weibull(key, S_RCS_QI, (q * MAX_LINKS + l) * 65536 + v, sig_cl, k_w)
                    ic += radar * sq * math.sqrt(min(max(cq, 0.0), 1.0)) / (dv ** eta_l * dr ** eta_l)
            comps[t, l, C_INTER_TARGET] = it
            comps[t, l, C_INTER_CLUTTER] = ic

            # direct BS-to-BS interference into the receive beam
            dl = 0.0
            dn_ = 0.0
            for ci in range(nc):
                j = cand[ci]
                if j == rx or (j == 0 and not tx_direct):
                    continue
                vx, vy = xs[j] - bx, ys[j] - by
                dv = math.sqrt(vx * vx + vy * vy)
                if dv > r_cut or dv == 0.0:
                    continue
                if vx * ux + vy * uy < dv * cos_sector:
                    continue
                if -(vx * ex[j] + vy * ey[j]) < dv * cos_sector:
                    continue
                idx = j * MAX_LINKS + l
                if uniform(key, S_LOS_D, idx) < math.exp(-gamma * dv):
                    dl += direct_l * dv ** -eta_l * gamma_unit(key, S_FADE_D, idx * MAX_FADE, m_l)
                else:
                    dn_ += direct_n * dv ** -eta_n * gamma_unit(key, S_FADE_D, idx * MAX_FADE, m_n)
            comps[t, l, C_DIRECT_LOS] = dl
            comps[t, l, C_DIRECT_NLOS] = dn_
            comps[t, l, C_SI] = p_c * zeta if l == 0 else 0.0
            comps[t, l, C_NOISE] = noise

        # downlink to a user at the target position, served by the nearest BS
        a = 0
        while True:
            u1 = uniform(key, S_MIS, 2 * a)
            u2 = uniform(key, S_MIS, 2 * a + 1)
            z = a_sd * math.sqrt(-2.0 * math.log(u1)) * math.cos(two_pi * u2)
            if abs(z) <= theta_m or a >= 100000:
                break
            a += 1
        g_serv = gm * math.cos(0.5 * d_spread * z) ** 2 if abs(z) <= math.pi / d_spread else 0.0
        comm[t, K_DESIRED] = (p_c * g_serv * c_los * r1 ** -eta_l
                              * gamma_unit(key, S_FADE_C, 0, m_l))
        il = 0.0
        inl = 0.0
        for ci in range(nc):
            j = cand[ci]
            if j == 0 or dist[j] > r_cut:
                continue
            cth = -(xs[j] * ex[j] + ys[j] * ey[j]) / dist[j]
            if cth < cos_lobe:
                continue
            th = math.acos(min(cth, 1.0))
            gj = gm * math.cos(0.5 * d_spread * th) ** 2
            if los_t[j]:
                il += p_c * gj * c_los * dist[j] ** -eta_l * gamma_unit(key, S_FADE_CI, j * MAX_FADE, m_l)
            else:
                inl += p_c * gj * c_nlos * dist[j] ** -eta_n * gamma_unit(key, S_FADE_CI, j * MAX_FADE, m_n)
        comm[t, K_LOS] = il
        comm[t, K_NLOS] = inl
        comm[t, K_NOISE] = noise

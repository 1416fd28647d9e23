"""Pure-numpy Monte Carlo trial kernel.

Loops over trials in Python and vectorises within a trial. Consumes exactly
the same counter-based draws as mc_numba, so both give the same samples up
to floating-point summation order.
"""
from __future__ import annotations

import math

import numpy as np

from ..sysconfig import SPEED_OF_LIGHT
from . import rng as _r
from .mc_layout import (C_DESIRED, C_DIRECT_LOS, C_DIRECT_NLOS, C_INTER_CLUTTER, C_INTER_TARGET,
                        C_INTRA, C_NOISE, C_SI, K_DESIRED, K_LOS, K_NLOS, K_NOISE, MAX_FADE,
                        MAX_LINKS, P_A2, P_BW, P_CL, P_CN, P_D, P_ETA_L, P_ETA_N, P_GAMMA, P_GM,
                        P_K_W, P_LAM_BS, P_LAM_CL, P_M, P_M_L, P_M_N, P_NLINKS, P_NOISE, P_PC,
                        P_PS, P_R1, P_RCUT, P_RWIN, P_SIDE, P_SIG_CL, P_SIG_T, P_THETA_M,
                        P_TX_DIRECT, P_WAVE, P_ZETA, RX_MARGIN)



def _gamma_unit(key, stream, base, m):
    base = np.asarray(base, dtype=np.int64)
    acc = np.zeros(base.shape)
    for i in range(m):
        acc += -np.log(_r.uniforms(key, stream, base + i))
    return acc / m


def _weibull(key, stream, idx, scale, k):
    return scale * (-np.log(_r.uniforms(key, stream, idx))) ** (1.0 / k)


def _half_cos(c):
    return np.sqrt(np.clip(0.5 * (1.0 + c), 0.0, 1.0))


def place_stations(key, r0, r_in, side, n_in, n_out):
    n_fix = 1 if r0 > 0.0 else 0
    two_pi = 2.0 * math.pi
    xs = np.empty(n_fix + n_in + n_out)
    ys = np.empty_like(xs)
    if n_fix:
        ang = two_pi * _r.uniform(key, _r.S_B1, 0)
        xs[0] = r0 * math.cos(ang)
        ys[0] = r0 * math.sin(ang)
    i = np.arange(n_in)
    rr = np.sqrt(r0 * r0 + (r_in * r_in - r0 * r0) * _r.uniforms(key, _r.S_POS, 2 * i))
    ang = two_pi * _r.uniforms(key, _r.S_POS, 2 * i + 1)
    xs[n_fix:n_fix + n_in] = rr * np.cos(ang)
    ys[n_fix:n_fix + n_in] = rr * np.sin(ang)
    todo = np.arange(n_out)
    off = n_fix + n_in
    for a in range(64):
        if todo.size == 0:
            break
        base = (todo * 64 + a) * 2
        xs[off + todo] = (_r.uniforms(key, _r.S_POS_OUT, base) - 0.5) * side
        ys[off + todo] = (_r.uniforms(key, _r.S_POS_OUT, base + 1) - 0.5) * side
        todo = todo[xs[off + todo] ** 2 + ys[off + todo] ** 2 <= r_in * r_in]
    return xs, ys


def nearest_links(xs, ys, swap_nearest, n_links):
    order = np.full(n_links, -1, dtype=np.int64)
    odist = np.full(n_links, np.inf)
    if xs.size == 0:
        return order, odist, np.empty(0)
    if swap_nearest:
        best = int(np.argmin(xs * xs + ys * ys))
        xs[[0, best]] = xs[[best, 0]]
        ys[[0, best]] = ys[[best, 0]]
    dist = np.sqrt(xs * xs + ys * ys)
    order[0] = 0
    rest = 1 + np.argsort(dist[1:], kind="stable")[: n_links - 1]
    order[1:1 + rest.size] = rest
    odist[: 1 + rest.size] = dist[order[: 1 + rest.size]]
    return order, odist, dist


def run_trials(skey, first, count, par, comps, comm, r1_out, beta_out, rerolls):
    skey = int(skey)
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

    for t in range(count):
        trial = first + t
        attempt = 0
        while True:
            key = _r.trial_key(skey, trial, attempt)
            n_in = _r.poisson(lam_bs * math.pi * (r_in * r_in - r0 * r0), key, _r.S_COUNT)
            n_out = _r.poisson(lam_bs * (side * side - math.pi * r_in * r_in), key, _r.S_COUNT_OUT)
            if n_in + n_out + n_fix >= 1:
                break
            attempt += 1
            rerolls[t] += 1

        xs, ys = place_stations(key, r0, r_in, side, n_in, 0)
        order, odist, dist = nearest_links(xs, ys, n_fix == 0, n_links)
        if n_fix + n_in < n_links or odist[-1] > r_in - r_cut:
            xs, ys = place_stations(key, r0, r_in, side, n_in, n_out)
            order, odist, dist = nearest_links(xs, ys, n_fix == 0, n_links)
        n_bs = xs.size
        r1 = dist[0]
        r1_out[t] = r1
        valid = order[order >= 0]
        lim = r_cut + dist[valid].max()
        cand = np.nonzero(dist <= lim)[0]

        ex = np.zeros(n_bs)
        ey = np.zeros(n_bs)
        cov_t = np.zeros(n_bs, dtype=bool)
        los_t = np.zeros(n_bs, dtype=bool)
        others = cand[cand != 0]
        blk = np.floor(_r.uniforms(key, _r.S_FBLK, others) * n_beams)
        psi = two_pi * (_r.uniforms(key, _r.S_ROT, others) + blk) / n_beams
        ex[others] = np.cos(psi)
        ey[others] = np.sin(psi)
        psi0 = math.atan2(-ys[0], -xs[0])
        ex[0], ey[0] = math.cos(psi0), math.sin(psi0)
        cov_t[others] = -(xs[others] * ex[others] + ys[others] * ey[others]) >= dist[others] * cos_sector
        los_t[others] = _r.uniforms(key, _r.S_LOS_T, others) < np.exp(-gamma * dist[others])
        cov_t[0] = los_t[0] = True

        ext = half_mono + r1 * tan_sector
        beta_out[t, 0] = 0.0
        for l in range(1, n_links):
            rx = order[l]
            if rx < 0:
                beta_out[t, l] = math.nan
                continue
            cb2 = 0.5 * (1.0 + (xs[0] * xs[rx] + ys[0] * ys[rx]) / (r1 * dist[rx]))
            cb2 = min(max(cb2, 0.0), 1.0)
            beta_out[t, l] = 2.0 * math.acos(math.sqrt(cb2))
            h = 1.5 * half_bi / (2.0 * max(cb2, 1e-12))
            ext = max(ext, h + (dist[rx] + h) * tan_sector)
        r_win = min(ext + 1.0, r_win_cap)
        n_q = _r.poisson(lam_cl * math.pi * r_win * r_win, key, _r.S_CL_COUNT) if lam_cl > 0.0 else 0
        qi = np.arange(n_q)
        rq = r_win * np.sqrt(_r.uniforms(key, _r.S_CL_POS, 2 * qi))
        aq = two_pi * _r.uniforms(key, _r.S_CL_POS, 2 * qi + 1)
        qx, qy = rq * np.cos(aq), rq * np.sin(aq)
        dx1, dy1 = qx - xs[0], qy - ys[0]
        d1 = np.sqrt(dx1 * dx1 + dy1 * dy1)

        for l in range(n_links):
            rx = order[l]
            comps[t, l, :] = 0.0
            if rx < 0:
                continue
            bx, by = xs[rx], ys[rx]
            rr = dist[rx]
            ux, uy = -bx / rr, -by / rr

            sigma = -sig_t * math.log(_r.uniform(key, _r.S_RCS_T, l))
            if l == 0:
                comps[t, l, C_DESIRED] = radar * sigma / r1 ** (2.0 * eta_l)
            elif los_t[rx] and not cov_t[rx]:
                cb = math.cos(0.5 * beta_out[t, l])
                comps[t, l, C_DESIRED] = radar * sigma * cb / (r1 ** eta_l * rr ** eta_l)

            if l == 0:
                inside = (np.abs(d1 - r1) <= half_mono) & (-(dx1 * xs[0] + dy1 * ys[0]) / r1 >= d1 * cos_sector)
                mem = qi[inside]
                sq = _weibull(key, _r.S_RCS_Q, mem * MAX_LINKS + l, sig_cl, k_w)
                intra = radar * sq / d1[mem] ** (2.0 * eta_l)
            else:
                dxn, dyn = qx - bx, qy - by
                dn = np.sqrt(dxn * dxn + dyn * dyn)
                inside = (np.abs(d1 + dn - r1 - rr) <= half_bi) & (dxn * ux + dyn * uy >= dn * cos_sector)
                mem = qi[inside]
                cq = _half_cos((dx1[mem] * dxn[mem] + dy1[mem] * dyn[mem]) / (d1[mem] * dn[mem]))
                sq = _weibull(key, _r.S_RCS_Q, mem * MAX_LINKS + l, sig_cl, k_w)
                intra = radar * sq * cq / (d1[mem] ** eta_l * dn[mem] ** eta_l)
            comps[t, l, C_INTRA] = intra.sum()

            v = cand[(cand != 0) & (cand != rx)]
            v = v[cov_t[v] & los_t[v] & (dist[v] <= r_cut)]
            rv = dist[v]
            cbv = _half_cos((xs[v] * bx + ys[v] * by) / (rv * rr))
            sv = -sig_t * np.log(_r.uniforms(key, _r.S_RCS_I, v * MAX_LINKS + l))
            comps[t, l, C_INTER_TARGET] = np.sum(radar * sv * cbv / (rv ** eta_l * rr ** eta_l))
            if mem.size and v.size:
                dvx = xs[v][:, None] - qx[mem][None, :]
                dvy = ys[v][:, None] - qy[mem][None, :]
                drx, dry = bx - qx[mem], by - qy[mem]
                dv = np.sqrt(dvx * dvx + dvy * dvy)
                dr = np.sqrt(drx * drx + dry * dry)
                cq = _half_cos((dvx * drx + dvy * dry) / (dv * dr))
                idx = (mem[None, :] * MAX_LINKS + l) * 65536 + v[:, None]
                sq = _weibull(key, _r.S_RCS_QI, idx, sig_cl, k_w)
                comps[t, l, C_INTER_CLUTTER] = np.sum(radar * sq * cq / (dv ** eta_l * dr ** eta_l))

            j = cand[cand != rx]
            if not tx_direct:
                j = j[j != 0]
            vx, vy = xs[j] - bx, ys[j] - by
            dv = np.sqrt(vx * vx + vy * vy)
            keep = ((dv <= r_cut) & (dv > 0.0) & (vx * ux + vy * uy >= dv * cos_sector)
                    & (-(vx * ex[j] + vy * ey[j]) >= dv * cos_sector))
            j, dv = j[keep], dv[keep]
            idx = j * MAX_LINKS + l
            los = _r.uniforms(key, _r.S_LOS_D, idx) < np.exp(-gamma * dv)
            hl = _gamma_unit(key, _r.S_FADE_D, idx[los] * MAX_FADE, m_l)
            hn = _gamma_unit(key, _r.S_FADE_D, idx[~los] * MAX_FADE, m_n)
            comps[t, l, C_DIRECT_LOS] = np.sum(direct_l * dv[los] ** -eta_l * hl)
            comps[t, l, C_DIRECT_NLOS] = np.sum(direct_n * dv[~los] ** -eta_n * hn)
            comps[t, l, C_SI] = p_c * zeta if l == 0 else 0.0
            comps[t, l, C_NOISE] = noise

        a = 0
        while True:
            u1 = _r.uniform(key, _r.S_MIS, 2 * a)
            u2 = _r.uniform(key, _r.S_MIS, 2 * a + 1)
            z = a_sd * math.sqrt(-2.0 * math.log(u1)) * math.cos(two_pi * u2)
            if abs(z) <= theta_m or a >= 100000:
                break
            a += 1
        g_serv = gm * math.cos(0.5 * d_spread * z) ** 2 if abs(z) <= math.pi / d_spread else 0.0
        h0 = float(_gamma_unit(key, _r.S_FADE_C, np.array([0]), m_l)[0])
        comm[t, K_DESIRED] = p_c * g_serv * c_los * r1 ** -eta_l * h0
        j = others[dist[others] <= r_cut]
        cth = -(xs[j] * ex[j] + ys[j] * ey[j]) / dist[j]
        j, cth = j[cth >= cos_lobe], cth[cth >= cos_lobe]
        gj = gm * np.cos(0.5 * d_spread * np.arccos(np.minimum(cth, 1.0))) ** 2
        lo = los_t[j]
        hl = _gamma_unit(key, _r.S_FADE_CI, j[lo] * MAX_FADE, m_l)
        hn = _gamma_unit(key, _r.S_FADE_CI, j[~lo] * MAX_FADE, m_n)
        comm[t, K_LOS] = np.sum(p_c * gj[lo] * c_los * dist[j[lo]] ** -eta_l * hl)
        comm[t, K_NLOS] = np.sum(p_c * gj[~lo] * c_nlos * dist[j[~lo]] ** -eta_n * hn)
        comm[t, K_NOISE] = noise

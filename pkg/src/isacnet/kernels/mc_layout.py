"""Shared layout of the Monte Carlo parameter vector and output columns."""
from __future__ import annotations

# parameter vector slots
(P_R1, P_SIDE, P_LAM_BS, P_LAM_CL, P_M, P_D, P_GM, P_CL, P_CN, P_ETA_L, P_ETA_N,
 P_M_L, P_M_N, P_GAMMA, P_BW, P_SIG_T, P_SIG_CL, P_K_W, P_PS, P_PC, P_ZETA, P_NOISE,
 P_WAVE, P_A2, P_THETA_M, P_NLINKS, P_RCUT, P_RWIN, P_TX_DIRECT) = range(29)
N_PARAMS = 29

# per-link component columns
(C_DESIRED, C_DIRECT_LOS, C_DIRECT_NLOS, C_INTRA, C_INTER_TARGET, C_INTER_CLUTTER,
 C_SI, C_NOISE) = range(8)
N_COMP = 8
COMPONENT_NAMES = ("desired", "direct_los", "direct_nlos", "intra_clutter",
                   "inter_clutter_target", "inter_clutter_scatter", "residual_si", "noise")

# communication columns
(K_DESIRED, K_LOS, K_NLOS, K_NOISE) = range(4)
N_COMM = 4
COMM_NAMES = ("desired", "interference_los", "interference_nlos", "noise")

MAX_LINKS = 64
MAX_FADE = 16

# BSs are drawn in a disk of radius cull + RX_MARGIN around the target; the
# rest of the region is only filled in when a receiver lies farther out.
RX_MARGIN = 200.0

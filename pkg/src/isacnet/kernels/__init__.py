"""Hot kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import from the environment:
``ISACNET_BACKEND=numpy`` (or ``ISACNET_DISABLE_NUMBA=1``) forces numpy;
otherwise numba is used when importable. ``set_backend`` switches at runtime
(used by the benchmark and the cross-backend tests).
"""
from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

from . import numpy_impl

try:
    from . import numba_impl
except ImportError:  # numba not installed
    numba_impl = None

_IMPLS = {"numpy": numpy_impl}
if numba_impl is not None:
    _IMPLS["numba"] = numba_impl


def _initial_backend() -> str:
    if os.environ.get("ISACNET_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    wanted = os.environ.get("ISACNET_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in ("numpy", "numba"):
            raise ValueError(f"ISACNET_BACKEND must be numpy or numba, got {wanted!r}")
        if wanted == "numba" and numba_impl is None:
            raise ImportError("ISACNET_BACKEND=numba but numba is not installed")
        return wanted
    return "numba" if numba_impl is not None else "numpy"


_active = _initial_backend()


def backend() -> str:
    return _active


def available() -> tuple[str, ...]:
    return tuple(_IMPLS)


def set_backend(name: str) -> None:
    global _active
    if name not in _IMPLS:
        raise ValueError(f"backend {name!r} unavailable (have {available()})")
    _active = name


@contextmanager
def using(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def impl(name: str | None = None):
    return _IMPLS[name or _active]


def direct_suffix(s, r, w, starts, wl, wn, kl, kn, m_los, m_nlos):
    return impl().direct_suffix(np.ascontiguousarray(s, dtype=np.float64), r, w,
                                np.asarray(starts, dtype=np.int64), wl, wn, kl, kn,
                                float(m_los), float(m_nlos))


def clutter_reflection_sum(kappa, psi, base, w, starts, e1w, scale):
    return impl().clutter_reflection_sum(
        np.ascontiguousarray(kappa, dtype=np.float64), np.ascontiguousarray(psi),
        base, w, np.asarray(starts, dtype=np.int64), np.ascontiguousarray(e1w), float(scale))


def run_trials(skey, first, count, par, comps, comm, r1_out, beta_out, rerolls):
    """Fill the output arrays for trials first .. first+count-1 in place."""
    if _active == "numba":
        from . import mc_numba as mod
        skey = np.uint64(skey)
    else:
        from . import mc_numpy as mod
    mod.run_trials(skey, int(first), int(count), par, comps, comm, r1_out, beta_out, rerolls)

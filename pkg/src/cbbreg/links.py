"""Link functions tying linear predictors to distribution parameters.

Three links cover the four regression parameters:

* ``logit`` for pi and delta: x = e^t / (1 + e^t)
* ``log`` for sigma: x = e^t
* ``shifted_log`` for eta: x = e^t + 1, keeping eta > 1 for any real t

Inverse links clamp into the admissible numeric box of the distributions
module so that any real-valued linear predictor yields a usable parameter.
The logistic inverse is evaluated branch-wise (never forming e^t for large
positive t) and is overflow-safe for arbitrarily large |t|.
"""

from __future__ import annotations

import numpy as np

from .distributions import (DELTA_MAX, DELTA_MIN, ETA_MAX, ETA_MIN, PI_MAX,
                            PI_MIN, SIGMA_MAX, SIGMA_MIN)

LINK_KINDS = ("logit", "log", "shifted_log")

_LINK_BOX = {
    "logit": (PI_MIN, PI_MAX),
    "log": (SIGMA_MIN, SIGMA_MAX),
    "shifted_log": (ETA_MIN, ETA_MAX),
}
# delta shares the logit box with pi by construction
assert (DELTA_MIN, DELTA_MAX) == (PI_MIN, PI_MAX)


def _stable_expit(t):
    out = np.empty_like(t)
    pos = t >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def apply_inverse_link(kind, t):
    """Map a linear predictor to the parameter scale, clamped into the box."""
    if kind not in _LINK_BOX:
        raise ValueError(f"unknown link kind {kind!r}")
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if kind == "logit":
        out = _stable_expit(t_arr)
    elif kind == "log":
        with np.errstate(over="ignore"):
            out = np.exp(t_arr)
    else:
        with np.errstate(over="ignore"):
            out = np.exp(t_arr) + 1.0
    lo, hi = _LINK_BOX[kind]
    out = np.clip(out, lo, hi)
    return float(out[0]) if scalar else out


def apply_link(kind, value):
    """Map a parameter value to the linear-predictor scale.

    Domain errors: logit needs value in (0, 1), log needs value > 0,
    shifted_log needs value > 1.
    """
    if kind not in _LINK_BOX:
        raise ValueError(f"unknown link kind {kind!r}")
    v = np.asarray(value, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    if not np.all(np.isfinite(v)):
        raise ValueError("value must be finite")
    if kind == "logit":
        if np.any(v <= 0.0) or np.any(v >= 1.0):
            raise ValueError("logit is defined on (0, 1)")
        out = np.log(v) - np.log1p(-v)
    elif kind == "log":
        if np.any(v <= 0.0):
            raise ValueError("log link is defined on (0, inf)")
        out = np.log(v)
    else:
        if np.any(v <= 1.0):
            raise ValueError("shifted log link is defined on (1, inf)")
        out = np.log(v - 1.0)
    return float(out[0]) if scalar else out

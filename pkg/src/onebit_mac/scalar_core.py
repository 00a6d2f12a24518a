"""Gaussian tail, binary entropy and the two convexity primitives.

All logarithms are base 2.  The public functions validate their inputs and
accept scalars or arrays; the underscore-prefixed versions skip validation and
are used on hot paths inside the information measures.
"""

import math

import numpy as np
from scipy.special import erfc, erfcx

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""


def _finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _q(x):
    return 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)


def _log2_q(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0
    xp = x[pos]
    # log Q(x) = log(erfcx(x/sqrt2)/2) - x^2/2 has no underflow for x > 0
    out[pos] = (np.log(0.5 * erfcx(xp / _SQRT2)) - 0.5 * xp * xp) / LN2
    xn = x[~pos]
    out[~pos] = np.log1p(-0.5 * erfc(-xn / _SQRT2)) / LN2
    return out


def _phi(x):
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _hb_from_logs(l0, l1):
    """Entropy of the pmf (2**l0, 2**l1) given its base-2 logs."""
    l0 = np.asarray(l0, dtype=float)
    l1 = np.asarray(l1, dtype=float)
    return -(np.exp2(l0) * l0 + np.exp2(l1) * l1)


def q(x):
    """Gaussian upper-tail probability Q(x)."""
    return _out(_q(_finite(x)))


def log2_q(x):
    """log2 Q(x), free of underflow for large positive x."""
    return _out(_log2_q(_finite(x)))


def h_b(t):
    """Binary entropy in bits, with 0 log 0 = 0."""
    t = _finite(t, "t")
    if np.any((t < 0.0) | (t > 1.0)):
        raise DomainError(f"t must lie in [0, 1], got {t!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(t > 0.0, -t * np.log2(np.where(t > 0.0, t, 1.0)), 0.0)
        s = 1.0 - t
        b = np.where(s > 0.0, -s * np.log2(np.where(s > 0.0, s, 1.0)), 0.0)
    return _out(a + b)


def hb_q(x):
    """H_b(Q(x)) computed from both tails, accurate where Q(x) is near 1."""
    x = _finite(x)
    return _out(_hb_from_logs(_log2_q(x), _log2_q(-x)))


def hessian_q_sqrtsum(u, v):
    """Hessian of f(u, v) = Q(sqrt(u) + sqrt(v)) for u, v > 0.

    The first diagonal entry is phi(s) * (1/(4 u^1.5) + s/(4u)) with
    s = sqrt(u) + sqrt(v); the coefficient 1/4 is what direct differentiation
    gives (a 1/2 there does not match finite differences).
    """
    u = float(_finite(u, "u"))
    v = float(_finite(v, "v"))
    if u <= 0.0 or v <= 0.0:
        raise DomainError(f"u and v must be positive, got ({u}, {v})")
    su, sv = math.sqrt(u), math.sqrt(v)
    s = su + sv
    pref = float(_phi(s))
    huu = 1.0 / (4.0 * u * su) + s / (4.0 * u)
    hvv = 1.0 / (4.0 * v * sv) + s / (4.0 * v)
    huv = s / (4.0 * su * sv)
    return pref * np.array([[huu, huv], [huv, hvv]])


def log_q_shift_second_difference(a, x, h):
    """Central second difference of t -> log2 Q(a + sqrt(t)) at t = x."""
    a = float(_finite(a, "a"))
    x = float(_finite(x, "x"))
    h = float(_finite(h, "h"))
    if a < 0.0:
        raise DomainError("a must be non-negative")
    if h <= 0.0 or x - h <= 0.0:
        raise DomainError(f"need h > 0 and x - h > 0, got x={x}, h={h}")
    t = np.array([x - h, x, x + h])
    f = _log2_q(a + np.sqrt(t))
    return float((f[0] - 2.0 * f[1] + f[2]) / (h * h))

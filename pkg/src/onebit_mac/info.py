"""Information measures of the two-user Gaussian MAC with a one-bit receiver.

The channel is p(0 | x1, x2) = Q(x1 + x2 - threshold).  For mass-point
inputs every quantity below is a finite sum; all values are in bits.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dist import MassPointDistribution
from .scalar_core import LN2, DomainError, _hb_from_logs, _log2_q, _phi


@dataclass(frozen=True)
class ChannelParams:
    threshold: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise DomainError("threshold must be finite")


@dataclass(frozen=True)
class ProductInput:
    f1: MassPointDistribution
    f2: MassPointDistribution

    def swapped(self):
        return ProductInput(self.f2, self.f1)


@dataclass(frozen=True)
class RateTuple:
    r1_given_2: float  # I(X1;Y|X2)
    r2_given_1: float  # I(X2;Y|X1)
    r1: float  # I(X1;Y)
    r2: float  # I(X2;Y)
    sum: float  # I(X1,X2;Y)

    def as_dict(self):
        return {
            "r1_given_2": self.r1_given_2,
            "r2_given_1": self.r2_given_1,
            "r1": self.r1,
            "r2": self.r2,
            "sum": self.sum,
        }


DEFAULT_CHANNEL = ChannelParams()


def _logs(s):
    """Base-2 logs of p(0|s) and p(1|s)."""
    return _log2_q(s), _log2_q(-s)


def _log2_mix(logs, weights, axis=-1):
    """log2 of sum_k weights_k 2**logs_k along an axis."""
    # plain numpy: scipy's logsumexp costs more in dispatch than in arithmetic here
    m = np.max(logs, axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        return np.squeeze(m, axis=axis) + np.log2(np.sum(weights * np.exp2(logs - m), axis=axis))


def _mix_pair(l0, l1, weights, axis=-1):
    """Base-2 logs of a mixture of binary pmfs.

    The larger mass is recomputed as log1p of minus the smaller one, which
    keeps its complement when the smaller mass is below machine epsilon.
    """
    m0 = _log2_mix(l0, weights, axis)
    m1 = _log2_mix(l1, weights, axis)
    small0 = m0 <= m1
    m1 = np.where(small0, np.log1p(-np.exp2(np.minimum(m0, -1.0))) / LN2, m1)
    m0 = np.where(small0, m0, np.log1p(-np.exp2(np.minimum(m1, -1.0))) / LN2)
    return m0, m1


def transition(x1, x2, ch=DEFAULT_CHANNEL):
    """Output pmf (p(0), p(1)) for a single input pair."""
    s = float(x1) + float(x2) - ch.threshold
    if not math.isfinite(s):
        raise DomainError("inputs must be finite")
    l0, l1 = _logs(np.array([s]))
    return np.array([2.0 ** l0[0], 2.0 ** l1[0]])


class _Joint:
    """Per-pair channel logs and derived pmfs for one product input."""

    def __init__(self, inp, ch):
        self.x1, self.w1 = inp.f1.points, inp.f1.weights
        self.x2, self.w2 = inp.f2.points, inp.f2.weights
        s = self.x1[:, None] + self.x2[None, :] - ch.threshold
        self.l0, self.l1 = _logs(s)
        self.h = _hb_from_logs(self.l0, self.l1)
        ww = self.w1[:, None] * self.w2[None, :]
        self.ly0, self.ly1 = _mix_pair(self.l0.ravel(), self.l1.ravel(), ww.ravel())
        # conditional output logs given X2 = x2_j (mix over X1) and given X1 = x1_i
        self.lc2_0, self.lc2_1 = _mix_pair(self.l0.T, self.l1.T, self.w1)
        self.lc1_0, self.lc1_1 = _mix_pair(self.l0, self.l1, self.w2)

    def entropies(self):
        hy = float(_hb_from_logs(self.ly0, self.ly1))
        hy_x2 = float(np.dot(self.w2, _hb_from_logs(self.lc2_0, self.lc2_1)))
        hy_x1 = float(np.dot(self.w1, _hb_from_logs(self.lc1_0, self.lc1_1)))
        hy_x12 = float(self.w1 @ self.h @ self.w2)
        return hy, hy_x1, hy_x2, hy_x12


def output_pmf(inp, ch=DEFAULT_CHANNEL):
    j = _Joint(inp, ch)
    return np.array([2.0 ** j.ly0, 2.0 ** j.ly1])


def cond_output_pmf(f1, x2, ch=DEFAULT_CHANNEL):
    """Output pmf given X2 = x2 with X1 ~ f1."""
    s = f1.points + float(x2) - ch.threshold
    l0, l1 = _logs(s)
    m0, m1 = _mix_pair(l0, l1, f1.weights)
    return np.array([2.0 ** m0, 2.0 ** m1])


def _clip(v):
    return min(max(v, 0.0), 1.0)


def rate_tuple(inp, ch=DEFAULT_CHANNEL):
    hy, hy_x1, hy_x2, hy_x12 = _Joint(inp, ch).entropies()
    return RateTuple(
        r1_given_2=_clip(hy_x2 - hy_x12),
        r2_given_1=_clip(hy_x1 - hy_x12),
        r1=_clip(hy - hy_x1),
        r2=_clip(hy - hy_x2),
        sum=_clip(hy - hy_x12),
    )


def _check_lambda(lam):
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError(f"lambda must be positive, got {lam!r}")


def weighted_value(rates, lam):
    """R1 + lam R2 at the pentagon corner that supports direction (1, lam)."""
    if lam <= 1.0:
        return rates.r1_given_2 + lam * rates.r2
    return rates.r1 + lam * rates.r2_given_1


def i_lambda(inp, lam, ch=DEFAULT_CHANNEL):
    """Weighted rate objective.

    For lam <= 1 this is I(X1;Y|X2) + lam I(X2;Y); for lam > 1 it is
    I(X1;Y) + lam I(X2;Y|X1), the value of R1 + lam R2 at the other corner.
    """
    _check_lambda(lam)
    return weighted_value(rate_tuple(inp, ch), lam)


# -- densities -------------------------------------------------------------
#
# "a" is the user whose conditional rate enters the objective (user 1 when
# lam <= 1), "b" the other one.  Both helpers take 0 < lam <= 1.


def _tilde(x, fa, fb, lam, tau, deriv=False):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xa, wa = fa.points, fa.weights
    xb, wb = fb.points, fb.weights
    la0, la1 = _logs(xa[:, None] + xb[None, :] - tau)
    ww = (wa[:, None] * wb[None, :]).ravel()
    ly0, ly1 = _mix_pair(la0.ravel(), la1.ravel(), ww)
    lb0, lb1 = _mix_pair(la0.T, la1.T, wa)
    a0 = lam * ly0 + (1.0 - lam) * lb0
    a1 = lam * ly1 + (1.0 - lam) * lb1
    s = x[:, None] + xb[None, :] - tau
    l0, l1 = _logs(s)
    term = -_hb_from_logs(l0, l1) - np.exp2(l0) * a0 - np.exp2(l1) * a1
    val = term @ wb
    if not deriv:
        return val
    dterm = _phi(s) * ((l1 - l0) + a0 - a1)
    return val, dterm @ wb


def _plain(x, fa, fb, lam, tau, deriv=False):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xa, wa = fa.points, fa.weights
    xb, wb = fb.points, fb.weights
    la0, la1 = _logs(xa[:, None] + xb[None, :] - tau)
    ww = (wa[:, None] * wb[None, :]).ravel()
    ly0, ly1 = _mix_pair(la0.ravel(), la1.ravel(), ww)
    s = x[:, None] + xa[None, :] - tau
    l0, l1 = _logs(s)
    m0, m1 = _mix_pair(l0, l1, wa)
    p0, p1 = np.exp2(m0), np.exp2(m1)
    val = -(_hb_from_logs(l0, l1) @ wa) - lam * (p0 * ly0 + p1 * ly1) + (1.0 - lam) * _hb_from_logs(m0, m1)
    if not deriv:
        return val
    ph = _phi(s)
    dp0 = -(ph @ wa)
    dval = (ph * (l1 - l0)) @ wa + dp0 * (-lam * (ly0 - ly1) + (1.0 - lam) * (m1 - m0))
    return val, dval


def _check_unit_lambda(lam):
    if not (math.isfinite(lam) and 0.0 < lam <= 1.0):
        raise DomainError(f"density functions need 0 < lambda <= 1, got {lam!r}")


def _out(v, x):
    return float(v[0]) if np.ndim(x) == 0 else v


def density_tilde(x1, inp, lam, ch=DEFAULT_CHANNEL):
    """Density of the objective over F_X1 given F_X2, evaluated at x1."""
    _check_unit_lambda(lam)
    return _out(_tilde(x1, inp.f1, inp.f2, lam, ch.threshold), x1)


def density_i(x2, inp, lam, ch=DEFAULT_CHANNEL):
    """Density of the objective over F_X2 given F_X1, evaluated at x2."""
    _check_unit_lambda(lam)
    return _out(_plain(x2, inp.f1, inp.f2, lam, ch.threshold), x2)


def side_density(side, x, inp, lam, ch=DEFAULT_CHANNEL, deriv=False):
    """Density of the objective over user `side`'s input, for any lam > 0.

    For lam > 1 the users swap roles with weight 1/lam and the result is
    scaled by lam, so the mixture identity holds against i_lambda.
    """
    _check_lambda(lam)
    tau = ch.threshold
    if lam <= 1.0:
        fn = _tilde if side == 1 else _plain
        return fn(x, inp.f1, inp.f2, lam, tau, deriv)
    fn = _tilde if side == 2 else _plain
    out = fn(x, inp.f2, inp.f1, 1.0 / lam, tau, deriv)
    if deriv:
        return lam * out[0], lam * out[1]
    return lam * out


def side_density_limits(side, inp, lam, ch=DEFAULT_CHANNEL):
    """Limits of side_density as x -> -inf and x -> +inf."""
    _check_lambda(lam)
    j = _Joint(inp, ch)
    a_is_1 = lam <= 1.0
    lam_eff = lam if a_is_1 else 1.0 / lam
    scale = 1.0 if a_is_1 else lam
    tilde_role = (side == 1) == a_is_1
    if tilde_role:
        # conditional output logs of the other user ("b") atoms
        if a_is_1:
            wb, lb0, lb1 = j.w2, j.lc2_0, j.lc2_1
        else:
            wb, lb0, lb1 = j.w1, j.lc1_0, j.lc1_1
        lo = -j.ly0 + (1.0 - lam_eff) * (j.ly0 - np.dot(wb, lb0))
        hi = -j.ly1 + (1.0 - lam_eff) * (j.ly1 - np.dot(wb, lb1))
    else:
        lo = -lam_eff * j.ly0
        hi = -lam_eff * j.ly1
    return scale * float(lo), scale * float(hi)


def hb_ratio(f1, x2, ch=DEFAULT_CHANNEL):
    """sum_i w_i H_b(Q(x_i + x2)) divided by H_b(sum_i w_i Q(x_i + x2))."""
    s = f1.points + float(x2) - ch.threshold
    l0, l1 = _logs(s)
    num = float(np.dot(f1.weights, _hb_from_logs(l0, l1)))
    den = float(_hb_from_logs(*_mix_pair(l0, l1, f1.weights)))
    if den <= 0.0:
        raise FloatingPointError(f"denominator of hb_ratio underflows at x2={x2}")
    if len(f1) == 1:
        return 1.0
    return num / den

"""Finitely supported distributions on the real line."""

import json
import math
from dataclasses import dataclass

import numpy as np

from .scalar_core import DomainError

SQRT2 = math.sqrt(2.0)
WEIGHT_SUM_TOL = 1e-10


class DistributionFormatError(ValueError):
    """A distribution file or mapping could not be parsed or validated."""


class MassPointDistribution:
    """Immutable mass-point distribution with sorted, distinct atoms.

    Atoms with exactly zero weight are dropped; coincident atoms are combined.
    Weights must be non-negative and sum to one within 1e-10, after which
    they are renormalized exactly.
    """

    __slots__ = ("_x", "_w")

    def __init__(self, points, weights):
        x = np.asarray(points, dtype=float).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if x.shape != w.shape or x.size == 0:
            raise DomainError("points and weights must be non-empty and of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise DomainError("points and weights must be finite")
        if np.any(w < 0.0):
            raise DomainError("weights must be non-negative")
        total = w.sum()
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"weights sum to {float(total)!r}, not 1")
        keep = w > 0.0
        x, w = x[keep], w[keep]
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        ux, inv = np.unique(x, return_inverse=True)
        uw = np.zeros(ux.size)
        np.add.at(uw, inv, w)
        uw = uw / uw.sum()
        ux.setflags(write=False)
        uw.setflags(write=False)
        self._x = ux
        self._w = uw

    @property
    def points(self):
        return self._x

    @property
    def weights(self):
        return self._w

    def __len__(self):
        return self._x.size

    def __eq__(self, other):
        if not isinstance(other, MassPointDistribution):
            return NotImplemented
        return np.array_equal(self._x, other._x) and np.array_equal(self._w, other._w)

    def __hash__(self):
        return hash((self._x.tobytes(), self._w.tobytes()))

    def __repr__(self):
        atoms = ", ".join(f"{w:.6g}@{x:.6g}" for x, w in zip(self._x, self._w))
        return f"MassPointDistribution({atoms})"

    def cdf(self, t):
        """Right-continuous CDF evaluated at t (scalar or array)."""
        cw = np.concatenate([[0.0], np.cumsum(self._w)])
        idx = np.searchsorted(self._x, np.asarray(t, dtype=float), side="right")
        return cw[idx]

    def to_dict(self):
        return {"points": [float(v) for v in self._x], "weights": [float(v) for v in self._w]}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise DistributionFormatError("distribution must be a JSON object")
        extra = set(data) - {"points", "weights"}
        missing = {"points", "weights"} - set(data)
        if missing:
            raise DistributionFormatError(f"missing field(s): {sorted(missing)}")
        if extra:
            raise DistributionFormatError(f"unknown field(s): {sorted(extra)}")
        pts, wts = data["points"], data["weights"]
        for name, seq in (("points", pts), ("weights", wts)):
            if not isinstance(seq, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq
            ):
                raise DistributionFormatError(f"'{name}' must be a list of numbers")
        try:
            return cls(pts, wts)
        except DomainError as exc:
            raise DistributionFormatError(str(exc)) from exc

    @classmethod
    def point(cls, x=0.0):
        return cls([x], [1.0])

    @classmethod
    def antipodal(cls, power):
        """Equiprobable atoms at +-sqrt(power) (a point mass at 0 if power is 0)."""
        if power < 0:
            raise DomainError("power must be non-negative")
        if power == 0:
            return cls.point(0.0)
        a = math.sqrt(power)
        return cls([-a, a], [0.5, 0.5])


def load_distribution(path):
    """Read a distribution from a JSON file {"points": [...], "weights": [...]}."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DistributionFormatError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return MassPointDistribution.from_dict(data)
    except DistributionFormatError as exc:
        raise DistributionFormatError(f"{path}: {exc}") from exc


def save_distribution(d, path):
    with open(path, "w") as fh:
        json.dump(d.to_dict(), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class PowerBudget:
    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"{name} must be finite and non-negative, got {v!r}")

    def __iter__(self):
        return iter((self.p1, self.p2))


def second_moment(d):
    return float(np.dot(d.weights, d.points ** 2))


def _piece_probes(breaks):
    # one probe inside every constant piece of a step function with these breakpoints
    b = np.unique(breaks)
    return np.concatenate([[b[0] - 1.0], 0.5 * (b[:-1] + b[1:]), [b[-1] + 1.0]])


def _levy_feasible(f, g, eps):
    # F(x - eps) - eps <= G(x) <= F(x + eps) + eps for all x
    t = _piece_probes(np.concatenate([g.points, f.points - eps]))
    if np.any(g.cdf(t) > f.cdf(t + eps) + eps):
        return False
    t = _piece_probes(np.concatenate([g.points, f.points + eps]))
    return not np.any(f.cdf(t - eps) - eps > g.cdf(t))


def levy_distance(f, g, tol=1e-12):
    """Levy distance between two mass-point CDFs.

    For step CDFs the distance is either a gap between atom locations or a
    gap between CDF levels, so a binary search over those candidates (each
    tested with a slack of ``tol``) finds it exactly.
    """
    if f == g:
        return 0.0
    fl = np.concatenate([[0.0], np.cumsum(f.weights)])
    gl = np.concatenate([[0.0], np.cumsum(g.weights)])
    cand = np.concatenate([
        np.abs(f.points[:, None] - g.points[None, :]).ravel(),
        np.abs(fl[:, None] - gl[None, :]).ravel(),
        [1.0],
    ])
    cand = np.unique(cand[(cand > 0.0) & (cand <= 1.0)])
    lo, hi = 0, cand.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _levy_feasible(f, g, cand[mid] + tol):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def _check_quarter(*ps):
    for p in ps:
        if not (0.0 <= p <= 0.25):
            raise DomainError(f"parameter must lie in [0, 1/4], got {p!r}")


def hat_star(p, q):
    """Pseudo-convolution coefficient p(1 - 2q) + q(1 - 2p)."""
    _check_quarter(p, q)
    return p * (1.0 - 2.0 * q) + q * (1.0 - 2.0 * p)


def ternary(p):
    """Zero-mean ternary law p, 1-2p, p on -sqrt2, 0, sqrt2 (unit power at p = 1/4)."""
    _check_quarter(p)
    return MassPointDistribution([-SQRT2, 0.0, SQRT2], [p, 1.0 - 2.0 * p, p])


def remark2_sum_distribution(p, q):
    """Law of X1 + X2 for independent ternary X1 ~ ternary(p), X2 ~ ternary(q)."""
    _check_quarter(p, q)
    pq = p * q
    hs = hat_star(p, q)
    pts = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * SQRT2
    wts = np.array([pq, hs, 1.0 - 2.0 * (pq + hs), hs, pq])
    return MassPointDistribution(pts, wts)


def prune_merge(d, weight_floor=1e-7, merge_tol=1e-3):
    """Drop atoms lighter than weight_floor, then coalesce atoms closer than merge_tol.

    Coalesced atoms sit at their weight-weighted mean.  Clusters are formed by
    single linkage over sorted positions.
    """
    x, w = np.array(d.points), np.array(d.weights)
    keep = w >= weight_floor
    if not np.any(keep):
        raise DomainError("pruning removed every atom")
    x, w = x[keep], w[keep] / w[keep].sum()
    while x.size > 1:
        gaps = np.diff(x)
        i = int(np.argmin(gaps))
        if gaps[i] >= merge_tol:
            break
        wt = w[i] + w[i + 1]
        xm = (w[i] * x[i] + w[i + 1] * x[i + 1]) / wt
        x = np.concatenate([x[:i], [xm], x[i + 2:]])
        w = np.concatenate([w[:i], [wt], w[i + 2:]])
    return MassPointDistribution(x, w / w.sum())

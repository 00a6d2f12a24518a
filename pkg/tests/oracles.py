"""Independent reference computations used by the tests.

Nothing here imports the package's information measures: the oracles build
pmfs and entropies from scratch with mpmath or cvxpy.
"""

import math
import warnings

import cvxpy as cp
import mpmath as mp
import numpy as np
from scipy.special import erfc

LN2 = math.log(2.0)


# -- high precision scalars ----------------------------------------------------


def mp_q(x, dps=60):
    with mp.workdps(dps):
        return mp.erfc(mp.mpf(x) / mp.sqrt(2)) / 2


def mp_log2_q(x, dps=60):
    with mp.workdps(dps):
        return mp.log(mp_q(x, dps)) / mp.log(2)


def mp_hb(t, dps=60):
    with mp.workdps(dps):
        t = mp.mpf(t)
        if t == 0 or t == 1:
            return mp.mpf(0)
        return -(t * mp.log(t) + (1 - t) * mp.log(1 - t)) / mp.log(2)


def mp_hb_ratio(points, weights, x2, dps=300):
    """Ratio of mixed binary entropies at high precision (needs many digits at x2 ~ 20)."""
    with mp.workdps(dps):
        qs = [mp_q(mp.mpf(x) + x2, dps) for x in points]
        num = sum(mp.mpf(w) * mp_hb(qv, dps) for w, qv in zip(weights, qs))
        den = mp_hb(sum(mp.mpf(w) * qv for w, qv in zip(weights, qs)), dps)
        return num / den


def mp_rates(p1, w1, p2, w2, dps=50):
    """All five mutual informations of a product input, in bits, via mpmath."""
    with mp.workdps(dps):
        q = [[mp_q(mp.mpf(a) + mp.mpf(b), dps) for b in p2] for a in p1]
        w1 = [mp.mpf(v) for v in w1]
        w2 = [mp.mpf(v) for v in w2]
        hy = mp_hb(sum(w1[i] * w2[j] * q[i][j] for i in range(len(p1)) for j in range(len(p2))), dps)
        hy_x1 = sum(w1[i] * mp_hb(sum(w2[j] * q[i][j] for j in range(len(p2))), dps) for i in range(len(p1)))
        hy_x2 = sum(w2[j] * mp_hb(sum(w1[i] * q[i][j] for i in range(len(p1))), dps) for j in range(len(p2)))
        hy_x12 = sum(w1[i] * w2[j] * mp_hb(q[i][j], dps) for i in range(len(p1)) for j in range(len(p2)))
        return {
            "r1_given_2": float(hy_x2 - hy_x12),
            "r2_given_1": float(hy_x1 - hy_x12),
            "r1": float(hy - hy_x1),
            "r2": float(hy - hy_x2),
            "sum": float(hy - hy_x12),
        }


# -- grid oracle for the weighted sum rate ---------------------------------------


def _q(x):
    return 0.5 * erfc(x / math.sqrt(2.0))


def _hb(t):
    t = np.clip(t, 1e-300, 1.0)
    s = np.clip(1.0 - t, 1e-300, 1.0)
    return -(t * np.log2(t) + s * np.log2(s))


def _hb_expr(t):
    return (cp.entr(t) + cp.entr(1.0 - t)) / LN2


def objective(x1, w1, x2, w2, lam):
    """R1 + lam R2 at the corner that supports direction (1, lam), from entropies."""
    qm = _q(x1[:, None] + x2[None, :])
    hy = _hb(w1 @ qm @ w2)
    hy_x1 = w1 @ _hb(qm @ w2)
    hy_x2 = w2 @ _hb(w1 @ qm)
    hy_x12 = w1 @ _hb(qm) @ w2
    if lam <= 1.0:
        return lam * hy + (1.0 - lam) * hy_x2 - hy_x12
    return hy + (lam - 1.0) * hy_x1 - lam * hy_x12


# Clarabel occasionally stalls on these exponential-cone programs; these variants rescue it
_CLARABEL_RETRIES = ({}, {"equilibrate_enable": False}, {"max_step_fraction": 0.9})


def _best_response(side, grid, x_other, w_other, lam, power):
    """Global optimum of one user's concave subproblem over every grid location."""
    if side == 1:
        qm = _q(grid[:, None] + x_other[None, :])  # rows: own grid, cols: other atoms
    else:
        qm = _q(x_other[:, None] + grid[None, :]).T
    h = _hb(qm) @ w_other  # H(Y | X_own = g, X_other) averaged over the other user
    w = cp.Variable(grid.size, nonneg=True)
    py0 = (qm @ w_other) @ w
    hy = _hb_expr(py0)
    # conditional on the other user's atom: p(0 | x_other_j) = sum_g w_g q[g, j]
    cond = qm.T @ w
    own_cond = _hb(qm @ w_other)  # H(Y | X_own = g), other user averaged
    if lam <= 1.0:
        if side == 1:
            obj = lam * hy + (1.0 - lam) * (w_other @ _hb_expr(cond)) - h @ w
        else:
            obj = lam * hy + (1.0 - lam) * (own_cond @ w) - h @ w
    else:
        if side == 1:
            obj = hy + (lam - 1.0) * (own_cond @ w) - lam * (h @ w)
        else:
            obj = hy + (lam - 1.0) * (w_other @ _hb_expr(cond)) - lam * (h @ w)
    cons = [cp.sum(w) == 1, (grid ** 2) @ w <= power]
    with warnings.catch_warnings():
        # "solution may be inaccurate" at 1e-8 gaps is far below the test tolerances
        warnings.simplefilter("ignore", UserWarning)
        for opts in _CLARABEL_RETRIES:
            try:
                cp.Problem(cp.Maximize(obj), cons).solve(solver=cp.CLARABEL, **opts)
                break
            except cp.error.SolverError:
                continue
        else:
            cp.Problem(cp.Maximize(obj), cons).solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
    wv = np.clip(np.asarray(w.value).ravel(), 0.0, None)
    keep = wv > 1e-7  # interior-point smear; dropping it costs far less than the test tolerance
    return grid[keep], wv[keep] / wv[keep].sum()


def grid_oracle(lam, p1, p2, step=0.05, halfwidth=None, n_random=3, seed=0, max_rounds=60, tol=1e-9):
    """Best R1 + lam R2 found by alternating exact best responses on a location grid.

    Each user's subproblem is concave in its weights, so every half-step is
    a global optimum over all distributions supported on the grid.
    """
    if halfwidth is None:
        halfwidth = max(4.0, 3.0 * (math.sqrt(p1) + math.sqrt(p2)))
    grid = np.round(np.arange(-halfwidth, halfwidth + step / 2, step), 10)
    zero = (np.array([0.0]), np.array([1.0]))

    def anti(p):
        if p == 0:
            return zero
        a = math.sqrt(p)
        return np.array([-a, a]), np.array([0.5, 0.5])

    starts = [(anti(p1), anti(p2)), (anti(p1), zero), (zero, anti(p2))]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        pair = []
        for p in (p1, p2):
            if p == 0:
                pair.append(zero)
                continue
            x = rng.uniform(-halfwidth, halfwidth, 3)
            m = np.mean(x ** 2)
            if m > p:
                x = x * math.sqrt(p / m)
            pair.append((x, np.full(3, 1.0 / 3.0)))
        starts.append(tuple(pair))
    best = (-math.inf, None)
    for (x1, w1), (x2, w2) in starts:
        val = objective(x1, w1, x2, w2, lam)
        for _ in range(max_rounds):
            if p1 > 0:
                x1, w1 = _best_response(1, grid, x2, w2, lam, p1)
            if p2 > 0:
                x2, w2 = _best_response(2, grid, x1, w1, lam, p2)
            new = objective(x1, w1, x2, w2, lam)
            if abs(new - val) < tol:
                val = new
                break
            val = new
        if val > best[0]:
            best = (val, ((x1, w1), (x2, w2)))
    return best


# -- distribution oracles ---------------------------------------------------------


def _cdf(points, weights, t):
    t = np.asarray(t, dtype=float)
    return np.sum(np.where(np.asarray(points)[None, :] <= t[..., None], weights, 0.0), axis=-1)


def levy_bisect(f, g, iters=80):
    """Levy distance by plain bisection on eps, checking the two defining
    inequalities at every breakpoint and just left of it."""
    fx, fw = np.asarray(f.points), np.asarray(f.weights)
    gx, gw = np.asarray(g.points), np.asarray(g.weights)

    def ok(eps):
        br = np.concatenate([gx, fx - eps, fx + eps])
        t = np.concatenate([br, br - 1e-13, [br.min() - 1.0, br.max() + 1.0]])
        gt = _cdf(gx, gw, t)
        return bool(np.all(_cdf(fx, fw, t - eps) - eps <= gt + 1e-15)
                    and np.all(gt <= _cdf(fx, fw, t + eps) + eps + 1e-15))

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def convolve(f, g):
    """Law of the sum of independent mass-point variables, by enumeration."""
    acc = {}
    for x, w in zip(f.points, f.weights):
        for y, v in zip(g.points, g.weights):
            key = round(float(x + y), 12)
            acc[key] = acc.get(key, 0.0) + float(w * v)
    keys = sorted(acc)
    return np.array(keys), np.array([acc[k] for k in keys])


def _compositions(n, total):
    if n == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in _compositions(n - 1, total - k):
            yield (k,) + rest


def simplex_grid(n, res):
    """All weight vectors of length n with entries on a 1/res lattice."""
    for c in _compositions(n, res):
        yield tuple(k / res for k in c)


def brute_force_weights(support, other, lam, power, res=1000):
    """Best weights on a fixed support (user 1) by exhaustive search over the simplex lattice."""
    x = np.asarray(support, dtype=float)
    best = (-math.inf, None)
    for w in simplex_grid(len(x), res):
        w = np.array(w)
        if w @ x ** 2 > power + 1e-12:
            continue
        val = objective(x, w, np.asarray(other.points), np.asarray(other.weights), lam)
        if val > best[0]:
            best = (val, w)
    return best

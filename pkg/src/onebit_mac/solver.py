"""Maximize the weighted rate objective over product mass-point inputs.

For a fixed lambda and per-user power budget the objective is concave in each
user's distribution separately, so the search alternates between the two
users.  Each half-step is solved by column generation: the support is
polished by a local ascent over (locations, weights), the power multiplier
is fitted, and any grid point where density + theta (P - x^2) exceeds the
current value is added to the support.
"""

import logging
import math
import warnings
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog, minimize

from .dist import MassPointDistribution, PowerBudget, prune_merge, second_moment
from .info import (
    DEFAULT_CHANNEL,
    ProductInput,
    _check_lambda,
    _hb_from_logs,
    _logs,
    _mix_pair,
    i_lambda,
    rate_tuple,
    side_density,
    side_density_limits,
)
from .scalar_core import DomainError, log2_q

log = logging.getLogger(__name__)

_Atoms = namedtuple("_Atoms", "points weights")
ThetaFit = namedtuple("ThetaFit", "theta residual determinate")

# density levels are flat beyond this distance from the other user's atoms
_FLAT_TAIL = 40.0


class InfeasibleError(ValueError):
    """No distribution on the given support meets the power constraint."""


@dataclass(frozen=True)
class SolverConfig:
    max_alternations: int = 500
    rate_tol: float = 1e-9
    multistarts: int = 16
    rng_seed: int = 0
    kkt_grid_halfwidth: float | None = None
    kkt_grid_step: float = 1e-2
    kkt_tol: float = 1e-6
    weight_floor: float = 1e-7
    merge_tol: float | None = None
    search_step: float = 0.02
    max_column_rounds: int = 30
    workers: int = 1

    def __post_init__(self):
        if self.multistarts < 1 or self.max_alternations < 1:
            raise DomainError("multistarts and max_alternations must be at least 1")
        for name in ("rate_tol", "kkt_grid_step", "kkt_tol", "weight_floor", "search_step"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")

    def merge_tol_for(self, power):
        if self.merge_tol is not None:
            return self.merge_tol
        return 1e-3 * max(1.0, math.sqrt(power))


@dataclass
class KktReport:
    theta1: float | None
    theta2: float | None
    max_grid_violation_1: float
    max_grid_violation_2: float
    atom_slack_1: list
    atom_slack_2: list
    passed: bool
    fit_residual_1: float = 0.0
    fit_residual_2: float = 0.0
    theta_determinate_1: bool = True
    theta_determinate_2: bool = True
    halfwidth_1: float = 0.0
    halfwidth_2: float = 0.0
    tol: float = 1e-6

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class SolveResult:
    input: ProductInput
    lam: float
    value: float
    rates: object
    kkt: KktReport | None
    converged: bool
    budget: PowerBudget
    start_index: int = 0
    alternations: int = 0
    history: list = field(default_factory=list, repr=False)

    @property
    def caps(self):
        return cardinality_cap(self.lam)

    def as_dict(self):
        return {
            "lambda": self.lam,
            "value": self.value,
            "rates": self.rates.as_dict(),
            "input": {"f1": self.input.f1.to_dict(), "f2": self.input.f2.to_dict()},
            "budget": {"p1": self.budget.p1, "p2": self.budget.p2},
            "caps": list(self.caps),
            "tangent_slope": -1.0 / self.lam,
            "converged": self.converged,
            "start_index": self.start_index,
            "alternations": self.alternations,
            "tie_break": "highest value; within rate_tol, fewest atoms then lowest start index",
            "kkt": None if self.kkt is None else self.kkt.as_dict(),
        }


def cardinality_cap(lam):
    """Maximum number of atoms (n1, n2) of an optimal input pair for this lambda."""
    _check_lambda(lam)
    if lam < 1.0:
        return (5, 3)
    if lam == 1.0:
        return (3, 3)
    return (3, 5)


def _tail_constant(budget, lam):
    # bound on the limiting density for |x| -> inf, both users
    c = -log2_q(math.sqrt(budget.p1) + math.sqrt(budget.p2))
    return (2.0 - lam) * c if lam <= 1.0 else (2.0 * lam - 1.0) * c


def search_floor(budget):
    return max(4.0, 3.0 * (math.sqrt(budget.p1) + math.sqrt(budget.p2)))


def support_bound(budget, lam, theta_lower):
    """Half-width beyond which density + theta (P - x^2) is negative."""
    _check_lambda(lam)
    if not theta_lower > 0:
        raise DomainError("theta_lower must be positive")
    floor = search_floor(budget)
    if budget.p1 == 0.0 and budget.p2 == 0.0:
        return floor
    p = max(budget.p1, budget.p2)
    return max(floor, math.sqrt(p + _tail_constant(budget, lam) / theta_lower))


# -- one user's subproblem ----------------------------------------------------


class _SideProblem:
    def __init__(self, side, other, lam, ch):
        self.side = side
        self.other = other
        self.lam = lam
        self.ch = ch
        # the "tilde" user's conditional rate appears in the objective
        self.tilde = (side == 1) == (lam <= 1.0)
        self.lam_eff = lam if lam <= 1.0 else 1.0 / lam
        self.scale = 1.0 if lam <= 1.0 else lam

    def pair(self, atoms):
        return ProductInput(atoms, self.other) if self.side == 1 else ProductInput(self.other, atoms)

    def density(self, xs, atoms, deriv=False):
        return side_density(self.side, xs, self.pair(atoms), self.lam, self.ch, deriv)

    def value(self, atoms):
        return float(np.dot(atoms.weights, self.density(atoms.points, atoms)))

    def flat_radius(self):
        return _FLAT_TAIL + float(np.max(np.abs(self.other.points))) + abs(self.ch.threshold)


def _objective_and_grad(z, prob, n):
    x, w = z[:n], z[n:]
    s = w.sum()
    u = w / s
    d, dd = prob.density(x, _Atoms(x, u), deriv=True)
    val = float(np.dot(u, d))
    grad = np.concatenate([u * dd, (d - val) / s])
    return -val, -grad


def _polish(prob, x, w, power, halfwidth, fix_locations=False):
    """Local ascent over locations and weights with the power constraint."""
    n = x.size
    if n == 1 and fix_locations:
        return x, np.ones(1)
    z0 = np.concatenate([x, w])
    lb = np.concatenate([np.full(n, -halfwidth), np.zeros(n)])
    ub = np.concatenate([np.full(n, halfwidth), np.ones(n)])
    if fix_locations:
        lb[:n] = ub[:n] = x
    cons = [
        {"type": "eq", "fun": lambda z: np.array([z[n:].sum() - 1.0]),
         "jac": lambda z: np.concatenate([np.zeros(n), np.ones(n)])[None, :]},
        {"type": "ineq", "fun": lambda z: np.array([power - np.dot(z[n:], z[:n] ** 2)]),
         "jac": lambda z: np.concatenate([-2.0 * z[n:] * z[:n], -z[:n] ** 2])[None, :]},
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # SLSQP clips its own steps to the bounds
        res = minimize(
            _objective_and_grad, z0, args=(prob, n), jac=True, method="SLSQP",
            bounds=list(zip(lb, ub)), constraints=cons,
            options={"maxiter": 1000, "ftol": 1e-16},
        )
    z = res.x
    xn, wn = np.clip(z[:n], -halfwidth, halfwidth), np.clip(z[n:], 0.0, None)
    if wn.sum() <= 0 or np.dot(wn / wn.sum(), xn ** 2) > power * (1 + 1e-9) + 1e-12:
        return x, w
    wn = wn / wn.sum()
    if prob.value(_Atoms(xn, wn)) < prob.value(_Atoms(x, w)):
        return x, w
    return xn, wn


def _feasible_weights(x, power):
    if np.min(x ** 2) > power:
        raise InfeasibleError("every support point exceeds the power budget")
    return _restore_power(x, np.full(x.size, 1.0 / x.size), power)


def _restore_power(x, w, power):
    # mix toward the lowest-power atom until E[X^2] <= power
    c = x ** 2
    m = float(np.dot(w, c))
    if m <= power:
        return w
    k = int(np.argmin(c))
    e = np.zeros_like(w)
    e[k] = 1.0
    alpha = (power - c[k]) / (m - c[k])
    return alpha * w + (1.0 - alpha) * e


def _clean(x, w, weight_floor, merge_tol):
    d = prune_merge(MassPointDistribution(x, w / w.sum()), weight_floor, merge_tol)
    return np.array(d.points), np.array(d.weights)


def _fit_theta(prob, x, w, power, value):
    """Least-squares power multiplier from the atom equalities and stationarity."""
    d, dd = prob.density(x, _Atoms(x, w), deriv=True)
    if np.dot(w, x ** 2) < power * (1.0 - 1e-6) - 1e-9:
        resid = np.concatenate([d - value, dd])
        return ThetaFit(0.0, float(np.max(np.abs(resid))), True)
    a = np.concatenate([power - x ** 2, -2.0 * x])
    b = np.concatenate([value - d, -dd])
    aa = float(np.dot(a, a))
    if aa < 1e-14:
        return ThetaFit(0.0, float(np.max(np.abs(b))), False)
    theta = max(float(np.dot(a, b)) / aa, 0.0)
    return ThetaFit(theta, float(np.max(np.abs(a * theta - b))), True)


def _minimal_theta(lhs_density, xs, power, value):
    # smallest theta >= 0 with density(x) + theta (P - x^2) <= value on xs
    gap = xs ** 2 - power
    sel = gap > 1e-12
    if not np.any(sel):
        return 0.0
    return max(0.0, float(np.max((lhs_density[sel] - value) / gap[sel])))


def _reduce_support(prob, x, w, power_target):
    """Move to a vertex of the set of distributions on x that keep the
    objective's nonlinear statistics fixed; the objective can only rise."""
    oth = prob.other
    tau = prob.ch.threshold
    s = x[:, None] + oth.points[None, :] - tau
    l0, l1 = _logs(s)
    h = _hb_from_logs(l0, l1) @ oth.weights
    q0 = np.exp2(l0)
    rows = []
    if prob.tilde and prob.lam_eff < 1.0:
        rows.extend(q0.T)  # p(0 | other atom) for every atom of the other user
        cost = h
    elif prob.tilde:
        rows.append(q0 @ oth.weights)  # p_Y(0)
        cost = h
    else:
        rows.append(q0 @ oth.weights)
        m0, m1 = _mix_pair(l0, l1, oth.weights)
        cost = h - (1.0 - prob.lam_eff) * _hb_from_logs(m0, m1)
    rows.append(x ** 2)
    rows.append(np.ones_like(x))
    a_eq = np.array(rows)
    b_eq = a_eq @ w
    b_eq[-2] = min(b_eq[-2], power_target)
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * x.size, method="highs-ds")
    if res.status != 0:
        return x, w
    wn = np.clip(res.x, 0.0, None)
    keep = wn > 1e-12
    return x[keep], wn[keep] / wn[keep].sum()


def optimize_weights(support, other, lam, power, cfg=None, side=1, ch=DEFAULT_CHANNEL):
    """Best weights on a fixed support under E[X^2] <= power.

    Returns the weight vector aligned with ``support``.
    """
    cfg = cfg or SolverConfig()
    x = np.asarray(support, dtype=float)
    prob = _SideProblem(side, other, lam, ch)
    w = _feasible_weights(x, power)
    halfwidth = float(np.max(np.abs(x))) + 1.0
    _, w = _polish(prob, x, w, power, halfwidth, fix_locations=True)
    return w


def optimize_side(side, other, lam, power, cfg=None, ch=DEFAULT_CHANNEL, init=None, halfwidth=None):
    """Best distribution for user `side` against a fixed distribution of the other user."""
    cfg = cfg or SolverConfig()
    _check_lambda(lam)
    if power == 0.0:
        return MassPointDistribution.point(0.0)
    prob = _SideProblem(side, other, lam, ch)
    cap = cardinality_cap(lam)[side - 1]
    W = halfwidth or max(4.0, 3.0 * math.sqrt(power))
    mtol = cfg.merge_tol_for(power)
    if init is None:
        init = MassPointDistribution.antipodal(power)
    x = np.clip(np.array(init.points), -W, W)
    w = np.array(init.weights)
    if np.dot(w, x ** 2) > power:
        x = x * math.sqrt(power / np.dot(w, x ** 2))
    grid = np.arange(-W, W + 0.5 * cfg.search_step, cfg.search_step)
    for _ in range(cfg.max_column_rounds):
        x, w = _polish(prob, x, w, power, W)
        x, w = _clean(x, w, cfg.weight_floor, mtol)
        atoms = _Atoms(x, w)
        val = prob.value(atoms)
        fit = _fit_theta(prob, x, w, power, val)
        lhs = prob.density(grid, atoms)
        theta = fit.theta if fit.determinate else _minimal_theta(lhs, grid, power, val)
        excess = lhs + theta * (power - grid ** 2) - val
        k = int(np.argmax(excess))
        if excess[k] <= 1e-10 or np.any(np.abs(x - grid[k]) < 0.5 * cfg.search_step):
            break
        x = np.append(x, grid[k])
        w = _restore_power(x, np.append(w * 0.99, 0.01), power)
        order = np.argsort(x)
        x, w = x[order], w[order]
    if x.size > cap:
        x, w = _reduce_support(prob, x, w, power)
        x, w = _polish(prob, x, w, power, W)
        x, w = _clean(x, w, cfg.weight_floor, mtol)
    return MassPointDistribution(x, w)


def _joint_polish(f1, f2, lam, budget, ch, halfwidth):
    """Local ascent over both users at once, used to finish an alternation."""
    n1, n2 = len(f1), len(f2)
    sizes = np.cumsum([0, n1, n1, n2, n2])

    def split(z):
        return [z[sizes[i]:sizes[i + 1]] for i in range(4)]

    def fg(z):
        x1, w1, x2, w2 = split(z)
        u1, u2 = w1 / w1.sum(), w2 / w2.sum()
        inp = ProductInput(_Atoms(x1, u1), _Atoms(x2, u2))
        d1, dd1 = side_density(1, x1, inp, lam, ch, deriv=True)
        d2, dd2 = side_density(2, x2, inp, lam, ch, deriv=True)
        val = float(np.dot(u1, d1))
        return -val, -np.concatenate([u1 * dd1, (d1 - val) / w1.sum(), u2 * dd2, (d2 - val) / w2.sum()])

    def sel(i, vec):
        out = np.zeros(sizes[-1])
        out[sizes[i]:sizes[i + 1]] = vec
        return out

    cons = []
    for k, p in ((0, budget.p1), (2, budget.p2)):
        cons.append({"type": "eq", "fun": lambda z, k=k: np.array([split(z)[k + 1].sum() - 1.0]),
                     "jac": lambda z, k=k: sel(k + 1, 1.0)[None, :]})
        cons.append({"type": "ineq",
                     "fun": lambda z, k=k, p=p: np.array([p - np.dot(split(z)[k + 1], split(z)[k] ** 2)]),
                     "jac": lambda z, k=k: (sel(k, -2.0 * split(z)[k + 1] * split(z)[k])
                                            + sel(k + 1, -split(z)[k] ** 2))[None, :]})
    z0 = np.concatenate([f1.points, f1.weights, f2.points, f2.weights])
    bounds = []
    for k, d in ((0, f1), (2, f2)):
        fixed = (budget.p1, budget.p2)[k // 2] == 0.0
        for xv in d.points:
            bounds.append((xv, xv) if fixed else (-halfwidth, halfwidth))
        bounds.extend([(0.0, 1.0)] * len(d))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(fg, z0, jac=True, method="SLSQP", bounds=bounds, constraints=cons,
                       options={"maxiter": 1000, "ftol": 1e-16})
    x1, w1, x2, w2 = split(res.x)
    try:
        g1 = MassPointDistribution(np.clip(x1, -halfwidth, halfwidth), np.clip(w1, 0, None) / np.clip(w1, 0, None).sum())
        g2 = MassPointDistribution(np.clip(x2, -halfwidth, halfwidth), np.clip(w2, 0, None) / np.clip(w2, 0, None).sum())
    except (DomainError, ZeroDivisionError):
        return f1, f2
    ok = (second_moment(g1) <= budget.p1 * (1 + 1e-9) + 1e-12 and second_moment(g2) <= budget.p2 * (1 + 1e-9) + 1e-12)
    if ok and i_lambda(ProductInput(g1, g2), lam, ch) >= i_lambda(ProductInput(f1, f2), lam, ch):
        return g1, g2
    return f1, f2


# -- alternation ----------------------------------------------------------------


def _random_start(rng, cap, power, halfwidth):
    if power == 0.0:
        return MassPointDistribution.point(0.0)
    x = rng.uniform(-halfwidth, halfwidth, size=cap)
    w = np.full(cap, 1.0 / cap)
    m = np.dot(w, x ** 2)
    if m > power:
        x = x * math.sqrt(power / m)
    return MassPointDistribution(x, w)


def _starts(lam, budget, cfg):
    caps = cardinality_cap(lam)
    W = search_floor(budget)
    a1, a2 = MassPointDistribution.antipodal(budget.p1), MassPointDistribution.antipodal(budget.p2)
    zero = MassPointDistribution.point(0.0)
    out = [(a1, a2)]
    # one user silent: these optima are easy to miss from random starts
    for pair in ((a1, zero), (zero, a2)):
        if len(out) < cfg.multistarts and pair not in out:
            out.append(pair)
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.multistarts - len(out))
    for ss in seeds:
        rng = np.random.default_rng(ss)
        out.append((_random_start(rng, caps[0], budget.p1, W), _random_start(rng, caps[1], budget.p2, W)))
    return out


def _run_start(args):
    idx, f1, f2, lam, budget, ch, cfg = args
    W = search_floor(budget)
    order = (1, 2) if lam <= 1.0 else (2, 1)
    powers = (budget.p1, budget.p2)
    cur = {1: f1, 2: f2}
    prev = i_lambda(ProductInput(f1, f2), lam, ch)
    history = [prev]
    converged = False
    k = 0
    for k in range(1, cfg.max_alternations + 1):
        for side in order:
            other = cur[2 if side == 1 else 1]
            new = optimize_side(side, other, lam, powers[side - 1], cfg, ch, init=cur[side], halfwidth=W)
            trial = dict(cur)
            trial[side] = new
            if i_lambda(ProductInput(trial[1], trial[2]), lam, ch) >= i_lambda(ProductInput(cur[1], cur[2]), lam, ch):
                cur = trial
        if k % 3 == 0:
            # a joint step shortcuts the slow zigzag of plain alternation
            cur[1], cur[2] = _joint_polish(cur[1], cur[2], lam, budget, ch, W)
        val = i_lambda(ProductInput(cur[1], cur[2]), lam, ch)
        history.append(val)
        if abs(val - prev) < cfg.rate_tol:
            converged = True
            break
        prev = val
    cur[1], cur[2] = _joint_polish(cur[1], cur[2], lam, budget, ch, W)
    val = i_lambda(ProductInput(cur[1], cur[2]), lam, ch)
    return idx, cur[1], cur[2], val, converged, k, history


def _pick(runs, rate_tol):
    best_val = max(r[3] for r in runs)
    tied = [r for r in runs if r[3] >= best_val - rate_tol]
    return min(tied, key=lambda r: (len(r[1]) + len(r[2]), r[0]))


def alternate_maximize(lam, budget, ch=DEFAULT_CHANNEL, cfg=None, extra_starts=()):
    """Multistart alternating maximization of the weighted rate objective.

    ``extra_starts`` are (f1, f2) pairs tried after the built-in starts; they
    must be feasible for the budget.
    """
    cfg = cfg or SolverConfig()
    _check_lambda(lam)
    if not isinstance(budget, PowerBudget):
        budget = PowerBudget(*budget)
    starts = _starts(lam, budget, cfg) + list(extra_starts)
    tasks = [(i, f1, f2, lam, budget, ch, cfg) for i, (f1, f2) in enumerate(starts)]
    if budget.p1 == 0.0 and budget.p2 == 0.0:
        tasks = tasks[:1]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            runs = list(ex.map(_run_start, tasks))
    else:
        runs = [_run_start(t) for t in tasks]
    runs.sort(key=lambda r: r[0])
    idx, f1, f2, val, converged, k, history = _pick(runs, cfg.rate_tol)
    inp = ProductInput(f1, f2)
    caps = cardinality_cap(lam)
    if len(f1) > caps[0] or len(f2) > caps[1]:
        log.warning("solution exceeds cardinality caps %s: (%d, %d)", caps, len(f1), len(f2))
        converged = False
    result = SolveResult(
        input=inp, lam=lam, value=i_lambda(inp, lam, ch), rates=rate_tuple(inp, ch), kkt=None,
        converged=converged, budget=budget, start_index=idx, alternations=k, history=history,
    )
    result.kkt = verify_kkt(result, cfg, ch)
    log.info("lambda=%g budget=(%g,%g) value=%.12g start=%d kkt=%s", lam, budget.p1, budget.p2,
             result.value, idx, result.kkt.passed)
    return result


# -- certification --------------------------------------------------------------


def estimate_theta(inp, lam, budget, ch=DEFAULT_CHANNEL, value=None):
    """Fitted power multipliers (one ThetaFit per user; None for a zero budget)."""
    if value is None:
        value = i_lambda(inp, lam, ch)
    fits = []
    for side, d, p in ((1, inp.f1, budget.p1), (2, inp.f2, budget.p2)):
        if p == 0.0:
            fits.append(None)
            continue
        other = inp.f2 if side == 1 else inp.f1
        prob = _SideProblem(side, other, lam, ch)
        fits.append(_fit_theta(prob, np.array(d.points), np.array(d.weights), p, value))
    return tuple(fits)


def verify_kkt(result, cfg=None, ch=DEFAULT_CHANNEL):
    """Check both users' optimality conditions on a grid and at the atoms."""
    cfg = cfg or SolverConfig()
    inp, lam, budget, value = result.input, result.lam, result.budget, result.value
    fits = estimate_theta(inp, lam, budget, ch, value)
    out = {}
    ok = True
    for side, d, p, fit in ((1, inp.f1, budget.p1, fits[0]), (2, inp.f2, budget.p2, fits[1])):
        if fit is None:
            # zero budget: the point mass at 0 is the only feasible input
            out[side] = (None, 0.0, [], 0.0, True, 0.0)
            continue
        other = inp.f2 if side == 1 else inp.f1
        prob = _SideProblem(side, other, lam, ch)
        theta = fit.theta
        flat = prob.flat_radius()
        if cfg.kkt_grid_halfwidth is not None:
            B = cfg.kkt_grid_halfwidth
        elif theta > 0:
            B = min(support_bound(budget, lam, theta), flat)
        else:
            B = flat
        B = max(B, float(np.max(np.abs(d.points))) + 1.0)
        grid = np.arange(-B, B + 0.5 * cfg.kkt_grid_step, cfg.kkt_grid_step)
        xs = np.concatenate([grid, d.points])
        dens = prob.density(xs, d)
        if not fit.determinate:
            theta = _minimal_theta(dens, xs, p, value)
        lhs = dens + theta * (p - xs ** 2)
        viol = max(float(np.max(lhs[: grid.size] - value)), 0.0)
        slack = list(map(float, lhs[grid.size:] - value))
        if theta == 0.0:
            lo, hi = side_density_limits(side, inp, lam, ch)
            viol = max(viol, lo - value, hi - value)
        side_ok = viol <= cfg.kkt_tol and all(abs(s) <= cfg.kkt_tol for s in slack)
        ok = ok and side_ok
        out[side] = (theta, viol, slack, fit.residual, fit.determinate, B)
    return KktReport(
        theta1=out[1][0], theta2=out[2][0],
        max_grid_violation_1=out[1][1], max_grid_violation_2=out[2][1],
        atom_slack_1=out[1][2], atom_slack_2=out[2][2],
        passed=ok,
        fit_residual_1=out[1][3], fit_residual_2=out[2][3],
        theta_determinate_1=out[1][4], theta_determinate_2=out[2][4],
        halfwidth_1=out[1][5], halfwidth_2=out[2][5],
        tol=cfg.kkt_tol,
    )


def with_input(result, inp, ch=DEFAULT_CHANNEL, cfg=None):
    """A copy of ``result`` re-evaluated (and re-certified) at another input."""
    new = replace(result, input=inp, value=i_lambda(inp, result.lam, ch), rates=rate_tuple(inp, ch), kkt=None)
    new.kkt = verify_kkt(new, cfg, ch)
    return new

"""Capacity-region assembly: power-allocation envelopes, corners and the
ternary-input separation example."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linprog

from .dist import (
    SQRT2,
    MassPointDistribution,
    PowerBudget,
    levy_distance,
    remark2_sum_distribution,
    ternary,
)
from .info import DEFAULT_CHANNEL, ProductInput, _check_lambda, i_lambda, rate_tuple
from .scalar_core import DomainError, hb_q
from .solver import SolverConfig, SolveResult, alternate_maximize, with_input

log = logging.getLogger(__name__)

_ENVELOPE_TIE = 1e-12


@dataclass(frozen=True)
class UAtom:
    """One value of the time-sharing variable: its probability and the inputs used."""

    prob: float
    input: ProductInput | None
    rates: object
    powers: tuple
    value: float
    kkt_passed: bool | None = None


@dataclass(frozen=True)
class TimeSharedSolution:
    atoms: tuple
    lam: float

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("a time-shared solution needs at least one atom")
        if abs(sum(a.prob for a in self.atoms) - 1.0) > 1e-9:
            raise DomainError("time-sharing probabilities must sum to 1")
        if len(self.atoms) > 5:
            raise DomainError("more than five time-sharing atoms")

    @property
    def value(self):
        return sum(a.prob * a.value for a in self.atoms)

    @property
    def powers(self):
        return tuple(sum(a.prob * a.powers[k] for a in self.atoms) for k in (0, 1))

    @property
    def kkt_passed(self):
        flags = [a.kkt_passed for a in self.atoms if a.kkt_passed is not None]
        return all(flags)

    def as_dict(self):
        return {
            "lambda": self.lam,
            "value": self.value,
            "atoms": [
                {
                    "prob": a.prob,
                    "powers": list(a.powers),
                    "value": a.value,
                    "kkt_passed": a.kkt_passed,
                    "rates": None if a.rates is None else a.rates.as_dict(),
                    "f1": None if a.input is None else a.input.f1.to_dict(),
                    "f2": None if a.input is None else a.input.f2.to_dict(),
                }
                for a in self.atoms
            ],
        }


@dataclass(frozen=True)
class RegionPoint:
    lam: float
    corner: tuple  # the corner supporting R1 + lam R2
    corner_a: tuple  # (I(X1;Y|X2,U), I(X2;Y|U))
    corner_b: tuple  # (I(X1;Y|U), I(X2;Y|X1,U))
    solution: TimeSharedSolution
    kkt_passed: bool

    def as_dict(self):
        return {
            "lambda": self.lam,
            "corner": list(self.corner),
            "corner_a": list(self.corner_a),
            "corner_b": list(self.corner_b),
            "kkt_passed": self.kkt_passed,
            "solution": self.solution.as_dict(),
        }


def power_axis(p, n):
    """0 plus n-1 geometrically spaced levels ending at 2p (just [0] when p is 0).

    The budget p itself is always included; for n >= 6 it is already one of
    the levels, for smaller n it is added.
    """
    if n < 2:
        raise DomainError("grid needs at least two levels per axis")
    if p == 0.0:
        return [0.0]
    levels = [2.0 * p * 2.0 ** (-m / 4.0) for m in range(n - 2, -1, -1)]
    return [0.0] + sorted(set(levels) | {p})


def power_grid(budget, n=17):
    return [(a, b) for a in power_axis(budget.p1, n) for b in power_axis(budget.p2, n)]


def _solve_cell(args):
    lam, cell, ch, cfg, extra = args
    return alternate_maximize(lam, PowerBudget(*cell), ch, cfg, extra_starts=extra)


def solve_power_grid(lam, grid, ch=DEFAULT_CHANNEL, cfg=None, workers=1):
    """Best I_lambda for every power cell, as a dict keyed by (p1, p2).

    After the independent solves, a cell whose value falls below a cell with
    no more power in either coordinate is re-solved from that cell's input,
    so the table is nondecreasing along both axes.
    """
    _check_lambda(lam)
    cfg = cfg or SolverConfig()
    cells = sorted({(float(a), float(b)) for a, b in grid})
    for a, b in cells:
        if a < 0 or b < 0 or not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"power cell ({a}, {b}) is not a nonnegative finite pair")
    tasks = [(lam, c, ch, cfg, ()) for c in cells]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_solve_cell, tasks))
    else:
        results = [_solve_cell(t) for t in tasks]
    table = dict(zip(cells, results))
    for c in cells:
        below = [d for d in cells if d != c and d[0] <= c[0] and d[1] <= c[1]]
        if not below:
            continue
        best = max(below, key=lambda d: table[d].value)
        if table[best].value > table[c].value + cfg.rate_tol:
            inp = table[best].input
            redo = _solve_cell((lam, c, ch, replace(cfg, multistarts=1), ((inp.f1, inp.f2),)))
            table[c] = redo if redo.value >= table[best].value else _reuse(table[best], c, ch, cfg)
    return table


def _reuse(result, cell, ch, cfg):
    moved = replace(result, budget=PowerBudget(*cell))
    return with_input(moved, result.input, ch, cfg)


def _cell_value(entry):
    return entry.value if isinstance(entry, SolveResult) else float(entry)


def concave_envelope(table, budget, lam=1.0):
    """Best time-sharing of table cells within the average power budget.

    The linear program has three constraints (two power rows and the
    normalization), so a basic optimum uses at most three cells.  A single
    cell is returned when it is as good as the LP optimum.
    """
    if not table:
        raise DomainError("empty table")
    cells = sorted(table)
    g = np.array([_cell_value(table[c]) for c in cells])
    pw = np.array(cells, dtype=float)
    res = linprog(
        -g, A_ub=pw.T, b_ub=[budget.p1, budget.p2], A_eq=np.ones((1, len(cells))), b_eq=[1.0],
        bounds=[(0, None)] * len(cells), method="highs-ds",
    )
    if res.status != 0:
        raise DomainError(f"envelope LP failed: {res.message}")
    best = -res.fun
    single = [i for i, c in enumerate(cells) if c[0] <= budget.p1 and c[1] <= budget.p2]
    i1 = max(single, key=lambda i: g[i]) if single else None
    if i1 is not None and g[i1] >= best - _ENVELOPE_TIE:
        weights = {i1: 1.0}
    else:
        p = np.clip(res.x, 0.0, None)
        keep = np.flatnonzero(p > 1e-12)
        weights = {int(i): p[i] / p[keep].sum() for i in keep}
    atoms = []
    for i, prob in sorted(weights.items()):
        entry = table[cells[i]]
        if isinstance(entry, SolveResult):
            atoms.append(UAtom(float(prob), entry.input, entry.rates, cells[i], entry.value,
                               None if entry.kkt is None else entry.kkt.passed))
        else:
            atoms.append(UAtom(float(prob), None, None, cells[i], float(entry)))
    return TimeSharedSolution(tuple(atoms), lam)


def pentagon_corners(sol):
    """Both corner points of the pentagon of a time-shared solution."""
    a = [0.0, 0.0]
    b = [0.0, 0.0]
    for atom in sol.atoms:
        if atom.rates is None:
            raise DomainError("corner points need the rates of every atom")
        r = atom.rates
        a[0] += atom.prob * r.r1_given_2
        a[1] += atom.prob * r.r2
        b[0] += atom.prob * r.r1
        b[1] += atom.prob * r.r2_given_1
    return tuple(a), tuple(b)


def trace_boundary(lambdas, budget, ch=DEFAULT_CHANNEL, cfg=None, grid_n=17, workers=1):
    """Boundary points of the capacity region for each lambda, sorted by lambda."""
    cfg = cfg or SolverConfig()
    if not isinstance(budget, PowerBudget):
        budget = PowerBudget(*budget)
    lams = sorted(set(float(v) for v in lambdas))
    for lam in lams:
        _check_lambda(lam)
    grid = power_grid(budget, grid_n)
    out = []
    for lam in lams:
        table = solve_power_grid(lam, grid, ch, cfg, workers)
        sol = concave_envelope(table, budget, lam)
        ca, cb = pentagon_corners(sol)
        out.append(RegionPoint(lam, ca if lam <= 1.0 else cb, ca, cb, sol, sol.kkt_passed))
        log.info("lambda=%g corner=(%.6f, %.6f) atoms=%d", lam, *out[-1].corner, len(sol.atoms))
    return out


def boundary_rows(points):
    """CSV rows: the supporting corner for every lambda plus the second
    sum-rate endpoint at lambda = 1."""
    rows = []
    for pt in points:
        name = "A" if pt.lam <= 1.0 else "B"
        rows.append((pt.lam, pt.corner[0], pt.corner[1], name, len(pt.solution.atoms), pt.kkt_passed))
        if pt.lam == 1.0:
            rows.append((pt.lam, pt.corner_b[0], pt.corner_b[1], "B", len(pt.solution.atoms), pt.kkt_passed))
    return rows


def upper_boundary(points):
    """Distinct corner points ordered by increasing r1 (points within 1e-9 count as one)."""
    pts = {}
    for pt in points:
        for c in (pt.corner, pt.corner_b) if pt.lam == 1.0 else (pt.corner,):
            pts.setdefault((round(c[0], 9), round(c[1], 9)), tuple(c))
    return sorted(pts.values())


def chord_violations(curve):
    """How far each interior point sits below the chord of its neighbours.

    Positive entries mean the curve bends the wrong way there.
    """
    out = []
    for (x0, y0), (x1, y1), (x2, y2) in zip(curve, curve[1:], curve[2:]):
        if x2 - x0 <= 0:
            out.append(0.0)
            continue
        chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0)
        out.append(chord - y1)
    return out


# -- separation example with ternary inputs -----------------------------------


def on_off_construction(ch=DEFAULT_CHANNEL):
    """U ~ Bern(1/2): one user sends +-sqrt2 while the other is silent, then swap."""
    a = MassPointDistribution.antipodal(2.0)
    z = MassPointDistribution.point(0.0)
    atoms = []
    for inp, powers in ((ProductInput(a, z), (2.0, 0.0)), (ProductInput(z, a), (0.0, 2.0))):
        r = rate_tuple(inp, ch)
        atoms.append(UAtom(0.5, inp, r, powers, r.sum))
    return TimeSharedSolution(tuple(atoms), 1.0)


def remark2_scan(grid_n=101, ch=DEFAULT_CHANNEL):
    """Sum rates of unit-power ternary product inputs against the on/off scheme."""
    if grid_n < 2:
        raise DomainError("grid_n must be at least 2")
    ps = np.linspace(0.0, 0.25, grid_n)
    benchmark = 1.0 - float(hb_q(SQRT2))
    target = MassPointDistribution.antipodal(2.0)
    best, arg = -1.0, None
    min_levy, arg_levy = math.inf, None
    for p in ps:
        f1 = ternary(p)
        for pp in ps:
            s = rate_tuple(ProductInput(f1, ternary(pp)), ch).sum
            if s > best:
                best, arg = s, (float(p), float(pp))
            dl = levy_distance(remark2_sum_distribution(p, pp), target)
            if dl < min_levy:
                min_levy, arg_levy = dl, (float(p), float(pp))
    u = on_off_construction(ch)
    u_rate = sum(a.prob * a.rates.sum for a in u.atoms)
    return {
        "grid_n": grid_n,
        "product_max_sum_rate": best,
        "product_argmax": list(arg),
        "benchmark": benchmark,
        "gap": benchmark - best,
        "min_levy_distance": min_levy,
        "levy_argmin": list(arg_levy),
        "u_construction_sum_rate": u_rate,
        "u_construction": u.as_dict(),
    }

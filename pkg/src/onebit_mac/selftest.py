"""Invariant checks runnable from the command line.

Each check returns a CheckResult with a margin: how far the worst case sits
inside the bound (positive means pass).
"""

import math
from dataclasses import dataclass

import numpy as np

from .dist import MassPointDistribution, PowerBudget, second_moment
from .info import ProductInput, cond_output_pmf, hb_ratio, i_lambda, output_pmf, rate_tuple, side_density, transition
from .scalar_core import h_b, hb_q, hessian_q_sqrtsum, log2_q, log_q_shift_second_difference, q
from .solver import SolverConfig, alternate_maximize

CHECKS = ("hessian", "log_q_shift", "per_letter", "hb_ratio", "mixture", "lower_bound", "single_user")


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.margin = float(self.margin)

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "margin": self.margin, "detail": self.detail}


def random_distribution(rng, power, max_atoms=4, spread=3.0):
    """Random mass-point law with second moment at most ``power``."""
    n = int(rng.integers(1, max_atoms + 1))
    x = rng.normal(scale=spread, size=n)
    w = rng.dirichlet(np.ones(n))
    m = float(np.dot(w, x ** 2))
    if m > power:
        x = x * math.sqrt(power / m) if power > 0 else np.zeros(n)
    if n > 1 and np.unique(x).size < n:
        return MassPointDistribution.point(0.0)
    return MassPointDistribution(x, w / w.sum())


def kl_bits(p, r):
    """D(p || r) in bits for binary pmfs."""
    return float(sum(pi * math.log2(pi / ri) for pi, ri in zip(p, r) if pi > 0))


def per_letter_margins(inp, budget, x1, x2):
    """Slack of the three per-letter bounds used for the support argument."""
    lq = log2_q(math.sqrt(budget.p1) + math.sqrt(budget.p2))
    lq2 = log2_q(math.sqrt(budget.p1) + abs(x2))
    py = output_pmf(inp)
    pyx = transition(x1, x2)
    pc = cond_output_pmf(inp.f1, x2)
    kl = kl_bits(pyx, py)
    cross = float(sum(pyx[y] * math.log2(py[y] / pc[y]) for y in (0, 1)))
    return (
        (1.0 - 2.0 * lq) - abs(kl),
        float(np.min(pc)) - q(math.sqrt(budget.p1) + abs(x2)),
        (-2.0 * lq - 2.0 * lq2) - abs(cross),
    )


def lower_bound_gap(m, f2, p2):
    """Rate of the +-2M input minus the Chebyshev-based lower bound."""
    f1 = MassPointDistribution([-2.0 * m, 2.0 * m], [0.5, 0.5])
    bound = (1.0 - p2 / m ** 2) * h_b(0.5 - 0.5 * (q(3 * m) + q(m))) - float(hb_q(2 * m))
    return rate_tuple(ProductInput(f1, f2)).r1_given_2 - bound


def _check_hessian(rng, fault):
    worst = math.inf
    for _ in range(200):
        u, v = rng.uniform(1e-3, 50.0, size=2)
        h = hessian_q_sqrtsum(u, v)
        if fault:
            h = -h
        det, tr = np.linalg.det(h), np.trace(h)
        worst = min(worst, det / tr ** 2 if tr > 0 else -1.0)
    return CheckResult("hessian", worst > 0, worst, "min det/trace^2 over 200 random (u, v)")


def _check_log_q_shift(rng, fault):
    worst = math.inf
    for _ in range(200):
        a, x = rng.uniform(0.0, 5.0), rng.uniform(0.01, 20.0)
        d = log_q_shift_second_difference(a, x, 1e-3)
        worst = min(worst, -d if fault else d)
    return CheckResult("log_q_shift", worst > 0, worst, "min second difference over 200 random (a, x)")


def _check_per_letter(rng, fault):
    worst = math.inf
    for _ in range(200):
        budget = PowerBudget(*rng.uniform(0.0, 4.0, size=2))
        f1, f2 = random_distribution(rng, budget.p1), random_distribution(rng, budget.p2)
        inp = ProductInput(f1, f2)
        x1, x2 = rng.uniform(-10.0, 10.0, size=2)
        if fault:
            budget = PowerBudget(0.0, 0.0)  # bounds evaluated with the wrong powers
        worst = min(worst, *per_letter_margins(inp, budget, x1, x2))
    # the second bound is tight for a point mass at -sqrt(P1)
    margin = worst + 1e-12
    return CheckResult("per_letter", margin >= 0, margin, "min slack of the three per-letter bounds (tol 1e-12)")


def _check_hb_ratio(rng, fault):
    f1 = MassPointDistribution([-2.0, 2.0], [0.5, 0.5])
    vals = [hb_ratio(f1, x2) for x2 in (5.0, 10.0, 15.0, 20.0)]
    if fault:
        vals = vals[::-1]
    steps = np.diff(vals)
    single = hb_ratio(MassPointDistribution.point(0.7), 3.0)
    margin = min(float(np.min(steps)), 1.0 - vals[-1])
    ok = margin > 0 and single == 1.0
    return CheckResult("hb_ratio", ok, margin, "ratios " + ", ".join(f"{v:.12g}" for v in vals))


def _check_mixture(rng, fault):
    worst = 0.0
    for _ in range(200):
        budget = PowerBudget(*rng.uniform(0.0, 4.0, size=2))
        inp = ProductInput(random_distribution(rng, budget.p1), random_distribution(rng, budget.p2))
        lam = float(rng.uniform(0.05, 3.0))
        val = i_lambda(inp, lam)
        for side, d in ((1, inp.f1), (2, inp.f2)):
            mix = float(np.dot(d.weights, side_density(side, d.points, inp, lam)))
            if fault:
                mix += 1e-6
            worst = max(worst, abs(mix - val))
    return CheckResult("mixture", worst <= 1e-9, 1e-9 - worst, f"max |mixture - objective| = {worst:.3g}")


def _check_lower_bound(rng, fault):
    worst = math.inf
    for m in (2.0, 4.0, 8.0):
        for _ in range(20):
            p2 = float(rng.uniform(0.1, 2.0))
            f2 = random_distribution(rng, p2)
            f2 = MassPointDistribution(np.clip(f2.points, -m, m), f2.weights)
            gap = lower_bound_gap(m, f2, p2)
            worst = min(worst, -abs(gap) - 1.0 if fault else gap)
    return CheckResult("lower_bound", worst >= 0, worst, "min rate minus bound, M in {2, 4, 8}")


def _check_single_user(rng, fault):
    res = alternate_maximize(1.0, PowerBudget(2.0 if not fault else 0.5, 0.0), cfg=SolverConfig(multistarts=2))
    target = 1.0 - float(hb_q(math.sqrt(2.0)))
    f1 = res.input.f1
    err = abs(res.value - target)
    loc = float(np.max(np.abs(np.abs(f1.points) - math.sqrt(2.0)))) if len(f1) == 2 else math.inf
    wt = float(np.max(np.abs(f1.weights - 0.5))) if len(f1) == 2 else math.inf
    ok = err <= 1e-4 and loc <= 1e-2 and wt <= 1e-3 and res.kkt.passed
    return CheckResult("single_user", ok, 1e-4 - err, f"value {res.value:.12g}, second moment {second_moment(f1):.6g}")


_RUNNERS = {
    "hessian": _check_hessian,
    "log_q_shift": _check_log_q_shift,
    "per_letter": _check_per_letter,
    "hb_ratio": _check_hb_ratio,
    "mixture": _check_mixture,
    "lower_bound": _check_lower_bound,
    "single_user": _check_single_user,
}


def run_selftest(inject=None, seed=0):
    """Run every check; ``inject`` names one check to run with a deliberate fault."""
    if inject is not None and inject not in _RUNNERS:
        raise ValueError(f"unknown check {inject!r}; choose from {', '.join(CHECKS)}")
    out = []
    for i, name in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        out.append(_RUNNERS[name](rng, name == inject))
    return out

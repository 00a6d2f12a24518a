"""Static figures written next to the numeric outputs."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dist import MassPointDistribution, remark2_sum_distribution  # noqa: E402
from .region import upper_boundary  # noqa: E402

_META = {"Software": None}  # keep files byte-identical across runs


def plot_region(points, path, budget=None):
    """Upper boundary of the traced region with each lambda's pentagon face."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for pt in points:
        (a1, a2), (b1, b2) = pt.corner_a, pt.corner_b
        ax.plot([0, b1, a1, a1], [b2, b2, a2, 0], color="0.8", lw=0.8)
    curve = upper_boundary(points)
    if curve:
        r1, r2 = zip(*curve)
        r1 = (0.0,) + r1 + (max(r1),)
        r2 = (max(r2),) + r2 + (0.0,)
        ax.plot(r1, r2, "o-", color="C0", ms=4, label="traced boundary")
    ax.set_xlabel("R1 [bits]")
    ax.set_ylabel("R2 [bits]")
    if budget is not None:
        ax.set_title(f"P1 = {budget.p1:g}, P2 = {budget.p2:g}")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    ax.set_aspect("equal", adjustable="box")
    ax.grid(alpha=0.3)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)


def plot_remark2(report, path):
    """CDF of the ternary sum closest in Levy distance to the antipodal optimum."""
    p, pp = report["levy_argmin"]
    fig, ax = plt.subplots(figsize=(6, 4))
    lo, hi = -3.5, 3.5
    for d, label, style in (
        (remark2_sum_distribution(p, pp), f"X1 + X2, p = {p:g}, p' = {pp:g}", "-"),
        (MassPointDistribution.antipodal(2.0), "antipodal +-sqrt(2)", "--"),
    ):
        xs = np.linspace(lo, hi, 2001)
        ax.step(xs, d.cdf(xs), where="post", ls=style, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("CDF")
    ax.set_title(f"Levy distance {report['min_levy_distance']:.6g}")
    ax.grid(alpha=0.3)
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from onebit_mac.dist import (
    SQRT2,
    DistributionFormatError,
    MassPointDistribution,
    PowerBudget,
    hat_star,
    levy_distance,
    load_distribution,
    prune_merge,
    remark2_sum_distribution,
    save_distribution,
    second_moment,
    ternary,
)
from onebit_mac.scalar_core import DomainError
from oracles import convolve, levy_bisect
from strategies import distributions

quarter = st.floats(0.0, 0.25)
ANTI = MassPointDistribution.antipodal(2.0)


def test_construction_sorts_merges_and_drops_zeros():
    d = MassPointDistribution([1.0, -1.0, 1.0, 3.0], [0.25, 0.5, 0.25, 0.0])
    assert list(d.points) == [-1.0, 1.0]
    assert list(d.weights) == [0.5, 0.5]


@pytest.mark.parametrize("pts,wts", [([0.0], [0.9]), ([0.0, 1.0], [1.2, -0.2]), ([], []),
                                     ([math.nan], [1.0]), ([0.0, 1.0], [1.0])])
def test_construction_rejects(pts, wts):
    with pytest.raises(DomainError):
        MassPointDistribution(pts, wts)


def test_immutable_points():
    d = MassPointDistribution.antipodal(1.0)
    with pytest.raises(ValueError):
        d.points[0] = 3.0


def test_second_moment_examples():
    assert second_moment(MassPointDistribution.point(0.0)) == 0.0
    assert second_moment(ANTI) == pytest.approx(2.0, abs=1e-15)
    assert second_moment(ternary(0.25)) == pytest.approx(1.0, abs=1e-15)


def test_power_budget_validation():
    with pytest.raises(DomainError):
        PowerBudget(-1.0, 0.0)
    assert tuple(PowerBudget(1.0, 2.0)) == (1.0, 2.0)


def test_cdf_right_continuous():
    d = MassPointDistribution([0.0, 1.0], [0.3, 0.7])
    np.testing.assert_allclose(d.cdf([-1e-9, 0.0, 0.5, 1.0]), [0.0, 0.3, 0.3, 1.0])


# -- file format ------------------------------------------------------------------


def test_file_round_trip(tmp_path):
    d = MassPointDistribution([-1.5, 0.2, 2.0], [0.2, 0.5, 0.3])
    save_distribution(d, tmp_path / "d.json")
    assert load_distribution(tmp_path / "d.json") == d


@pytest.mark.parametrize("payload", [
    "not json",
    json.dumps([1, 2]),
    json.dumps({"points": [0.0]}),
    json.dumps({"points": [0.0], "weights": [1.0], "extra": 1}),
    json.dumps({"points": ["a"], "weights": [1.0]}),
    json.dumps({"points": [0.0, 1.0], "weights": [0.5, 0.4]}),
    json.dumps({"points": [True], "weights": [1.0]}),
])
def test_file_format_errors(tmp_path, payload):
    p = tmp_path / "bad.json"
    p.write_text(payload)
    with pytest.raises(DistributionFormatError):
        load_distribution(p)


# -- Levy distance --------------------------------------------------------------------


def test_levy_examples():
    d = MassPointDistribution([0.0, 1.0], [0.5, 0.5])
    assert levy_distance(d, d) == 0.0
    assert levy_distance(remark2_sum_distribution(0.25, 0.25), ANTI) == pytest.approx(3 / 16, abs=1e-9)
    assert levy_distance(remark2_sum_distribution(0.0, 0.0), ANTI) == pytest.approx(0.5, abs=1e-9)


def test_levy_point_masses():
    # two point masses closer than 1 apart: the distance is their gap
    a, b = MassPointDistribution.point(0.0), MassPointDistribution.point(0.3)
    assert levy_distance(a, b) == pytest.approx(0.3, abs=1e-12)
    assert levy_distance(a, MassPointDistribution.point(5.0)) == pytest.approx(1.0, abs=1e-12)


def test_levy_matches_bisection_oracle():
    rng = np.random.default_rng(3)
    for _ in range(150):
        f = _rand(rng)
        g = _rand(rng)
        assert levy_distance(f, g) == pytest.approx(levy_bisect(f, g), abs=1e-9)


def _rand(rng):
    n = int(rng.integers(1, 5))
    x = np.round(rng.normal(scale=1.5, size=n), 3)
    if np.unique(x).size < n:
        return MassPointDistribution.point(float(x[0]))
    return MassPointDistribution(x, rng.dirichlet(np.ones(n)))


@given(distributions(max_atoms=3), distributions(max_atoms=3), distributions(max_atoms=3))
def test_levy_metric_axioms(f, g, h):
    dfg, dgf = levy_distance(f, g), levy_distance(g, f)
    assert dfg >= 0.0
    assert dfg == pytest.approx(dgf, abs=1e-9)
    assert dfg <= levy_distance(f, h) + levy_distance(h, g) + 1e-9


@given(quarter, quarter)
def test_levy_closed_form_on_ternary_sums(p, pp):
    d = levy_distance(remark2_sum_distribution(p, pp), ANTI)
    assert d == pytest.approx(0.5 - p * pp - hat_star(p, pp), abs=1e-9)


def test_levy_grid_minimum():
    ps = np.linspace(0.0, 0.25, 101)
    vals = np.array([[levy_distance(remark2_sum_distribution(p, pp), ANTI) for pp in ps] for p in ps])
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    assert vals[i, j] == pytest.approx(3 / 16, abs=1e-9)
    assert (ps[i], ps[j]) == (0.25, 0.25)


# -- ternary family --------------------------------------------------------------------


def test_hat_star_examples():
    assert hat_star(0.0, 0.0) == 0.0
    assert hat_star(0.25, 0.25) == 0.25
    assert hat_star(0.1, 0.0) == 0.1


@pytest.mark.parametrize("p,q", [(-0.01, 0.1), (0.3, 0.1), (0.1, 0.26)])
def test_quarter_domain(p, q):
    with pytest.raises(DomainError):
        hat_star(p, q)
    with pytest.raises(DomainError):
        remark2_sum_distribution(p, q)


def test_sum_distribution_examples():
    assert remark2_sum_distribution(0.0, 0.0) == MassPointDistribution.point(0.0)
    d = remark2_sum_distribution(0.25, 0.25)
    np.testing.assert_allclose(d.points, np.array([-2, -1, 0, 1, 2]) * SQRT2)
    np.testing.assert_allclose(d.weights, [1 / 16, 1 / 4, 3 / 8, 1 / 4, 1 / 16], atol=1e-15)


@given(quarter, quarter)
def test_sum_distribution_is_convolution(p, pp):
    d = remark2_sum_distribution(p, pp)
    x, w = convolve(ternary(p), ternary(pp))
    keep = w > 0
    np.testing.assert_allclose(d.points, x[keep], atol=1e-12)
    np.testing.assert_allclose(d.weights, w[keep], atol=1e-12)


# -- pruning ------------------------------------------------------------------------


def test_prune_removes_light_atom():
    d = MassPointDistribution([0.0, 1.0, 2.0], [0.5, 0.5 - 1e-12, 1e-12])
    out = prune_merge(d)
    assert list(out.points) == [0.0, 1.0]


def test_merge_close_atoms():
    d = MassPointDistribution([1.0, 1.0005], [0.25, 0.75])
    out = prune_merge(d, merge_tol=1e-2)
    assert len(out) == 1
    assert out.points[0] == pytest.approx(0.25 * 1.0 + 0.75 * 1.0005, abs=1e-15)


def test_prune_everything_raises():
    d = MassPointDistribution([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(DomainError):
        prune_merge(d, weight_floor=0.9)


@given(distributions(max_atoms=5), st.floats(1e-9, 0.1), st.floats(1e-6, 0.5))
def test_prune_merge_idempotent(d, floor, tol):
    if np.max(d.weights) < floor:
        return
    once = prune_merge(d, floor, tol)
    twice = prune_merge(once, floor, tol)
    np.testing.assert_allclose(twice.points, once.points, atol=1e-12)
    np.testing.assert_allclose(twice.weights, once.weights, atol=1e-12)

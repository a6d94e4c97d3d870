import pytest

from threshold_aoi.absorption import update_rate
from threshold_aoi.model import validate_params as vp
from threshold_aoi.planner import min_update_rate, sweep


def test_sweep_single_slot():
    (row,) = sweep(0.5, 0.5, 1, 1, 1e-6)
    assert (row.T, row.lambda_, row.emse) == (1, 1.0, 0.0)
    assert row.nsaoi.value == pytest.approx(1.0, abs=1e-14)
    assert 1.0 in row.nsaoi


def test_sweep_t2():
    (row,) = sweep(0.5, 0.5, 2, 2, 1e-6)
    assert row.lambda_ == 0.25
    assert row.emse == pytest.approx(0.5, abs=1e-14)
    assert 3.5 in row.nsaoi
    assert row.nsaoi.width < 1e-6
    assert row.periodic


def test_sweep_rates():
    rows = sweep(0.5, 0.5, 4, 5, 1e-6)
    assert [r.T for r in rows] == [4, 5]
    assert [r.lambda_ for r in rows] == [0.0625, 0.04]


@pytest.mark.parametrize("args", [(0.5, 0.5, 3, 2), (0.5, 0.5, 0, 2), (0.5, 0.5, 1, 129)])
def test_sweep_rejects_bad_range(args):
    with pytest.raises(ValueError):
        sweep(*args)


def test_sweep_flags_truncated_rows():
    # the requested width is below what double precision can certify here
    (row,) = sweep(0.5, 0.5, 128, 128, 1e-6)
    assert row.truncated
    assert row.nsaoi.lower <= row.nsaoi.upper


@pytest.mark.parametrize("p, q", [(0.3, 0.3), (0.4, 0.4), (0.5, 0.5), (0.6, 0.2)])
def test_sweep_trends(p, q):
    rows = sweep(p, q, 1, 10)
    lam = [r.lambda_ for r in rows]
    ns = [r.nsaoi.value for r in rows]
    em = [r.emse for r in rows]
    assert all(a > b for a, b in zip(lam, lam[1:]))
    assert all(a < b for a, b in zip(ns, ns[1:]))
    assert all(a <= b for a, b in zip(em, em[1:]))


def test_plan_tight_emse():
    res = min_update_rate(0.5, 0.5, 21, 2.5, 20, 1e-6)
    assert res.feasible
    assert (res.chosen_T, res.lambda_min) == (4, 0.0625)
    assert res.binding_constraint == "emse"
    assert res.feasible_T == (1, 2, 3, 4)
    assert res.gaps == ()


def test_plan_tight_nsaoi():
    res = min_update_rate(0.5, 0.5, 21, 8, 20, 1e-6)
    assert (res.chosen_T, res.lambda_min) == (5, 0.04)
    assert res.binding_constraint in ("nsaoi", "both")


def test_plan_trivial():
    res = min_update_rate(0.5, 0.5, 1.0, 0.0, 20, 1e-6)
    assert res.feasible
    assert (res.chosen_T, res.lambda_min) == (1, 1.0)


def test_plan_infeasible():
    # T = 1 has NSAoI 1/(p+q) = 2.5 here
    res = min_update_rate(0.2, 0.2, 2.0, 10.0, 5)
    assert not res.feasible
    assert res.chosen_T is None
    assert res.binding_constraint == "nsaoi"


def test_plan_search_ceiling():
    res = min_update_rate(0.5, 0.5, 1e6, 1e6, 6)
    assert res.chosen_T == 6
    assert res.binding_constraint == "none"


@pytest.mark.parametrize("nsaoi_max, emse_max", [(0.5, 1.0), (2.0, -0.1)])
def test_plan_rejects_bad_ceilings(nsaoi_max, emse_max):
    with pytest.raises(ValueError):
        min_update_rate(0.5, 0.5, nsaoi_max, emse_max, 5)


@pytest.mark.parametrize("p, q, nsaoi_max, emse_max", [
    (0.5, 0.5, 21, 2.5), (0.3, 0.3, 30, 5), (0.6, 0.2, 12, 3),
])
def test_plan_consistency_with_sweep(p, q, nsaoi_max, emse_max):
    res = min_update_rate(p, q, nsaoi_max, emse_max, 20)
    rows = {r.T: r for r in sweep(p, q, 1, 20)}
    assert res.lambda_min == rows[res.chosen_T].lambda_ == update_rate(vp(p, q, res.chosen_T))
    assert rows[res.chosen_T].nsaoi.lower <= nsaoi_max
    assert rows[res.chosen_T].emse <= emse_max + 1e-9
    nxt = rows[res.chosen_T + 1]
    assert nxt.nsaoi.lower > nsaoi_max or nxt.emse > emse_max - 1e-9

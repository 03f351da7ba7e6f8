import numpy as np
import pytest

from ahom.baselines import BaselineConfig, arc_run, gd_run, steihaug_cg, tr_run
from ahom.errors import ParameterError
from ahom.problems import make_coercive, make_monkey, make_quadratic


def monotone(trace):
    fs = [r.f for r in trace]
    return all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))


def test_gd_quadratic():
    res = gd_run(make_quadratic(2), [1.0, 1.0])
    assert res.status == "converged" and len(res.trace) <= 200
    assert np.linalg.norm(res.x) <= 1e-6


def test_gd_monkey_stays_on_axis():
    res = gd_run(make_monkey(), [1.0, 0.0])
    assert all(r.chi1 >= 0 for r in res.trace)
    assert res.x[1] == 0.0
    assert 0 <= res.trace[-1].f <= 1e-6
    assert monotone(res.trace)


def test_gd_coercive():
    res = gd_run(make_coercive(), [3.0, 3.0])
    assert res.trace[-1].f == pytest.approx(-0.25, abs=1e-4)


def test_arc_quadratic():
    res = arc_run(make_quadratic(2), [1.0, 1.0])
    assert res.status == "converged" and len(res.trace) <= 10


def test_arc_monkey_axis():
    res = arc_run(make_monkey(), [1.0, 0.0])
    assert abs(res.x[1]) <= 1e-12
    assert 0 <= res.trace[-1].f <= 1e-6
    assert res.status in ("converged", "stalled")


def test_arc_coercive():
    res = arc_run(make_coercive(), [3.0, 3.0])
    assert res.trace[-1].f == pytest.approx(-0.25, abs=1e-4)
    np.testing.assert_allclose(res.x, [0.0, 1.0], atol=1e-3)
    assert monotone(res.trace)


def test_tr_runs():
    res = tr_run(make_quadratic(2), [1.0, 1.0])
    assert res.status == "converged" and np.linalg.norm(res.x) <= 1e-6
    res = tr_run(make_coercive(), [3.0, 3.0])
    assert res.trace[-1].f == pytest.approx(-0.25, abs=1e-3)
    assert monotone(res.trace)
    res = tr_run(make_monkey(), [1.0, 0.0])
    assert 0 <= res.trace[-1].f <= 1e-6 and res.x[1] == 0.0


def test_tr_radius_cap():
    # linear-ish descent direction drives the radius up; it must stop at the cap
    cfg = BaselineConfig(tr_initial_radius=1.0, tr_max_radius=4.0)
    res = tr_run(make_monkey(), [-1.0, 0.5], cfg)
    assert max(r.step_norm for r in res.trace) <= 4.0 + 1e-12


def test_steihaug_boundary_and_interior():
    g = np.array([1.0, 0.0])
    p = steihaug_cg(g, np.diag([-1.0, 1.0]), 2.0, 1e-10)
    assert np.linalg.norm(p) == pytest.approx(2.0)
    p = steihaug_cg(g, np.eye(2), 10.0, 1e-12)
    np.testing.assert_allclose(p, [-1.0, 0.0])
    np.testing.assert_array_equal(steihaug_cg(np.zeros(2), np.eye(2), 1.0, 1e-8), [0.0, 0.0])


@pytest.mark.parametrize("kw", [dict(tr_initial_radius=0.0), dict(tr_initial_radius=2e4),
                                dict(tr_accept_eta=0.8), dict(tr_shrink=1.0), dict(tr_grow=1.0),
                                dict(gd_c1=0.0), dict(gd_backtrack=1.0)])
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        BaselineConfig(**kw)


def test_baseline_records_leave_ahom_columns_empty():
    r = gd_run(make_quadratic(2), [1.0, 1.0]).trace[0]
    assert np.isnan(r.chi3) and np.isnan(r.kappa) and r.phi is None and r.step_kind == ""
    r = arc_run(make_quadratic(2), [1.0, 1.0]).trace[0]
    assert np.isnan(r.chi3) and r.step_kind.startswith("sarp_")

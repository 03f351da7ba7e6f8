import numpy as np
import pytest

from ahom.errors import ParameterError
from ahom.problems import make_monkey, make_quadratic
from ahom.sarp import SarpConfig, sarp_step, update_sigma


class Scalar:
    """1-D oracle with a scripted value at the trial point."""

    def __init__(self, f, g, h):
        self._f, self._g, self._h = f, g, h

    dim = 1

    def value(self, x):
        return self._f(float(x[0]))

    def gradient(self, x):
        return np.array([self._g(float(x[0]))])

    def hessian(self, x):
        return np.array([[self._h(float(x[0]))]])


def test_quadratic_example():
    out = sarp_step(make_quadratic(1), [1.0], 2.0, SarpConfig())
    assert out.step_norm == pytest.approx(0.5)
    assert out.model_decrease == pytest.approx(0.375)
    assert out.rho == pytest.approx(1.0)
    assert out.successful
    np.testing.assert_allclose(out.z, [0.5])
    assert out.sigma_next == 1.0


def test_flat_trial_is_rejected():
    # f(x + s) == f(x) although the quadratic model predicts a decrease
    orc = Scalar(lambda x: 0.5 if x == 1.0 else 0.5, lambda x: x, lambda x: 1.0)
    out = sarp_step(orc, np.array([1.0]), 2.0, SarpConfig())
    assert out.rho == 0.0 and not out.successful
    np.testing.assert_array_equal(out.z, [1.0])
    assert out.sigma_next == 4.0


def test_middle_ratio_keeps_sigma():
    # f equal to the model up to a factor 0.5 on the decrease
    md = 0.375
    orc = Scalar(lambda x: 0.5 if x == 1.0 else 0.5 - 0.5 * md, lambda x: x, lambda x: 1.0)
    out = sarp_step(orc, np.array([1.0]), 2.0, SarpConfig())
    assert out.rho == pytest.approx(0.5)
    assert out.successful and out.sigma_next == 2.0
    np.testing.assert_allclose(out.z, [0.5])


def test_non_finite_trial():
    orc = Scalar(lambda x: 0.5 if x == 1.0 else np.inf, lambda x: x, lambda x: 1.0)
    out = sarp_step(orc, np.array([1.0]), 2.0, SarpConfig())
    assert out.rho == -np.inf and not out.successful and out.sigma_next == 4.0


def test_degenerate_model_decrease():
    out = sarp_step(make_quadratic(2), [0.0, 0.0], 2.0, SarpConfig())
    assert not out.successful and out.sigma_next == 4.0
    np.testing.assert_array_equal(out.z, [0.0, 0.0])


def test_update_sigma_branches():
    cfg = SarpConfig()
    assert update_sigma(4.0, 0.95, cfg) == 2.0
    assert update_sigma(4.0, 0.9, cfg) == 2.0
    assert update_sigma(4.0, 0.5, cfg) == 4.0
    assert update_sigma(4.0, 0.1, cfg) == 4.0
    assert update_sigma(4.0, 0.05, cfg) == 8.0
    assert update_sigma(1e-16, 1.0, cfg) == 1e-16


@pytest.mark.parametrize("kw", [
    dict(theta=0.0), dict(sigma_min=3.0), dict(eta1=0.95), dict(eta2=1.0),
    dict(gamma1=1.0), dict(gamma2=3.0), dict(sigma_min=0.0),
])
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        SarpConfig(**kw)


def test_sigma_below_floor_rejected():
    with pytest.raises(ParameterError):
        sarp_step(make_monkey(), [1.0, 0.0], 1e-20, SarpConfig())


def test_reuses_passed_value():
    calls = []
    q = make_quadratic(1)

    class Counting(type(q)):
        def value(self, x):
            calls.append(float(x[0]))
            return super().value(x)

    sarp_step(Counting(1), [1.0], 2.0, SarpConfig(), f_x=0.5)
    assert calls == [0.5]

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from dampqrc import tasks
from dampqrc.tasks import MackeyGlassParams, NarmaParams


def test_narma_input_bounded_and_starts_at_zero():
    u = tasks.narma_input(np.arange(5000))
    assert u[0] == 0.0
    assert np.abs(u).max() <= 0.1


@given(st.integers(0, 10_000))
def test_narma_input_period(t):
    # 2.11, 3.73 and 4.11 are multiples of 1/100, so the drive repeats after 100 T
    assert tasks.narma_input(t) == pytest.approx(tasks.narma_input(t + 100 * 200), abs=1e-12)


def test_narma_by_hand():
    u = np.full(3, 0.1)
    # p = 1: y1 = 1.5 * 0.01 + 0.1 = 0.115
    # linear memory:   y2 = 0.3 * 0.115 + 0.05 * 0.115 + 0.115 = 0.15525
    # product memory:  y2 = 0.3 * 0.115 + 0.05 * 0.115**2 + 0.115 = 0.15016125
    np.testing.assert_allclose(tasks.narma_target(u, NarmaParams(p=1)), [0.0, 0.115, 0.15525])
    np.testing.assert_allclose(tasks.narma_target(u, NarmaParams(p=1, variant="standard")), [0.0, 0.115, 0.15016125])


def test_narma_uses_lagged_input_product():
    u = np.array([0.0, 0.1, 0.0, 0.0, 0.05])
    y = tasks.narma_target(u, NarmaParams(p=4, alpha=0, beta=0, delta=0))
    # y[4] = 1.5 * u[1] * u[4]
    np.testing.assert_allclose(y, [0, 0, 0, 0, 1.5 * 0.1 * 0.05])


def test_narma_param_validation():
    with pytest.raises(ValueError):
        NarmaParams(p=0)
    with pytest.raises(ValueError):
        NarmaParams(variant="other")
    with pytest.raises(ValueError):
        tasks.narma_target(np.zeros(2), NarmaParams(p=5))


@pytest.mark.parametrize("p", [2, 5, 10, 20])
def test_standard_narma_stays_bounded(p):
    u = tasks.narma_input(np.arange(3000))
    y = tasks.narma_target(u, NarmaParams(p=p, variant="standard"))
    assert np.all(np.isfinite(y)) and 0 <= y.min() and y.max() < 1


def test_linear_memory_narma_diverges_for_long_memory():
    # alpha + beta * p >= 1 once p >= 14: the linear recursion is unstable
    u = tasks.narma_input(np.arange(3000))
    assert np.abs(tasks.narma_target(u, NarmaParams(p=10))).max() < 10
    assert np.abs(tasks.narma_target(u, NarmaParams(p=15))).max() > 1e3


def test_mackey_glass_default_shape():
    x = tasks.mackey_glass_series(MackeyGlassParams(length=600))
    assert x.shape == (600,)
    assert x[0] == 1.2
    assert 0.2 < x[100:].min() and x[100:].max() < 1.5
    # chaotic regime: not settling to a fixed point or short cycle
    assert x[300:].std() > 0.1


def test_mackey_glass_without_delay_matches_ode_solver():
    prm = MackeyGlassParams(tau=0.0, length=51, history=0.5)
    x = tasks.mackey_glass_series(prm)

    def rhs(t, v):
        return 0.2 * v / (1 + v**10) - 0.1 * v

    ref = solve_ivp(rhs, (0, 50), [0.5], t_eval=np.arange(51.0), rtol=1e-11, atol=1e-13).y[0]
    np.testing.assert_allclose(x, ref, atol=1e-9)


def test_mackey_glass_step_convergence():
    coarse = tasks.mackey_glass_series(MackeyGlassParams(dt=0.02, length=200))
    fine = tasks.mackey_glass_series(MackeyGlassParams(dt=0.01, length=200))
    assert np.abs(coarse - fine).max() < 1e-4


def test_mackey_glass_param_validation():
    with pytest.raises(ValueError):
        MackeyGlassParams(tau=17.005)
    with pytest.raises(ValueError):
        MackeyGlassParams(dt=0)


def test_next_step_alignment():
    s = np.arange(30.0)
    data = tasks.next_step_task(s, washout=2, train=10, test=5)
    assert len(data.inputs) == 17
    np.testing.assert_array_equal(data.targets, data.inputs + 1)
    with pytest.raises(ValueError):
        tasks.next_step_task(s, 10, 15, 5)


@given(st.integers(0, 30))
def test_delay_targets(tau):
    x = np.arange(40.0)
    data = tasks.delay_task(x, tau, washout=0, train=35)
    assert not data.valid[:tau].any() and data.valid[tau:].all()
    np.testing.assert_array_equal(data.targets[tau:], x[: 40 - tau])
    assert data.train_rows.min(initial=tau) >= tau


def test_narma_input_golden_value():
    # frozen from the closed-form drive at t = 50, T = 200
    assert float(tasks.narma_input(50)) == pytest.approx(0.0012164206222514604, rel=1e-12)


@pytest.mark.parametrize("p", [1, 2, 5, 10])
def test_linear_narma_zero_drive_fixed_point(p):
    y = tasks.narma_target(np.zeros(2000), NarmaParams(p=p))
    assert y[-1] == pytest.approx(0.1 / (0.7 - 0.05 * p), rel=1e-9)


@pytest.mark.parametrize("p", range(1, 21))
def test_linear_narma_finite_over_short_window(p):
    u = tasks.narma_input(np.arange(200))
    assert np.isfinite(tasks.narma_target(u, NarmaParams(p=p))).all()


def test_mackey_glass_fixed_point():
    # beta / gamma - 1 = 1, so x = 1 is an equilibrium
    x = tasks.mackey_glass_series(MackeyGlassParams(length=300, history=1.0))
    assert np.abs(x - 1.0).max() < 1e-6


def test_mackey_glass_without_feedback_decays_exponentially():
    x = tasks.mackey_glass_series(MackeyGlassParams(beta=0.0, length=11))
    assert x[10] == pytest.approx(1.2 * np.exp(-0.1 * 10), abs=1e-6)


def test_mackey_glass_default_is_not_periodic():
    x = tasks.mackey_glass_series()[200:]
    x = x - x.mean()
    ac = np.correlate(x, x, "full")[len(x) - 1 :]
    ac = ac / ac[0]
    assert ac[1:len(x) // 2].max() < 0.99


def test_delay_by_one_by_hand():
    d = tasks.delay_task(np.array([1.0, 2.0, 3.0]), 1, washout=0, train=1)
    assert list(d.valid) == [False, True, True]
    np.testing.assert_array_equal(d.targets[1:], [1.0, 2.0])

import numpy as np
import pytest

from wignerlab.decoherence import (
    DephasingChannel,
    correlation_decay,
    dephase,
    diagonality_trajectory,
    expectation_trajectory,
    onset_step,
    pointer_diagonality,
    robustly_decohered,
)
from wignerlab.errors import (
    BadStrengthError,
    DimensionMismatchError,
    NotUnitaryError,
    UnknownLabelError,
)
from wignerlab.qcore import (
    DensityMatrix,
    QState,
    RegisterLayout,
    born_table,
    partial_trace,
    pure_density,
    qubits,
)
from wignerlab.scenario import build_scenario, run_friend_stage, scenario_context

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def plus_state():
    return QState(qubits("q"), np.array([1, 1]) / np.sqrt(2))


def bell_pair():
    return QState(qubits("a1", "L1"), np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_channel_guards():
    with pytest.raises(BadStrengthError):
        DephasingChannel("q", -0.1)
    with pytest.raises(BadStrengthError):
        DephasingChannel("q", 1.5)
    with pytest.raises(DimensionMismatchError):
        DephasingChannel("q", 0.5, basis=np.ones((2, 3)))
    with pytest.raises(NotUnitaryError):
        DephasingChannel("q", 0.5, basis=np.ones((2, 2)))


def test_dephase_scales_off_diagonal():
    rho = dephase(plus_state(), DephasingChannel("q", 0.5))
    expected = np.array([[0.5, 0.25], [0.25, 0.5]])
    assert np.max(np.abs(rho.matrix - expected)) <= 1e-12


def test_full_strength_kills_coherence():
    rho = dephase(plus_state(), DephasingChannel("q", 1.0))
    assert np.max(np.abs(rho.matrix - np.eye(2) / 2)) <= 1e-12


def test_two_steps_compose_like_one():
    lam = 0.3
    once = DephasingChannel("L1", lam)
    rho = dephase(dephase(bell_pair(), once), once)
    combined = DephasingChannel("L1", 1.0 - (1.0 - lam) ** 2)
    direct = dephase(bell_pair(), combined)
    assert np.max(np.abs(rho.matrix - direct.matrix)) <= 1e-12


def test_dephasing_in_its_own_eigenbasis_is_inert():
    chan = DephasingChannel("q", 1.0, basis=HADAMARD)
    rho = dephase(plus_state(), chan)
    assert np.max(np.abs(rho.matrix - pure_density(plus_state()).matrix)) <= 1e-12


def test_rotated_basis_dephasing_mixes_computational_state():
    layout = qubits("q")
    zero = QState(layout, np.array([1, 0]))
    rho = dephase(zero, DephasingChannel("q", 1.0, basis=HADAMARD))
    assert np.max(np.abs(rho.matrix - np.eye(2) / 2)) <= 1e-12


def test_basis_dimension_checked_at_application():
    layout = RegisterLayout((("q", 3),))
    rho = DensityMatrix(layout, np.eye(3) / 3)
    with pytest.raises(DimensionMismatchError):
        dephase(rho, DephasingChannel("q", 0.5, basis=HADAMARD))


def test_unknown_target_rejected():
    with pytest.raises(UnknownLabelError):
        dephase(plus_state(), DephasingChannel("nope", 0.5))


def test_dephase_rejects_other_types():
    with pytest.raises(TypeError):
        dephase(np.eye(2) / 2, DephasingChannel("q", 0.5))


def test_pointer_diagonality_values():
    assert pointer_diagonality(plus_state(), "q") == pytest.approx(0.5)
    assert pointer_diagonality(bell_pair(), "L1") == pytest.approx(0.25)
    zero = QState(qubits("q"), np.array([1, 0]))
    assert pointer_diagonality(zero, "q") == 0.0
    assert pointer_diagonality(zero, "q", basis=HADAMARD) == pytest.approx(0.5)


def test_trajectory_halves_each_step():
    traj = diagonality_trajectory(bell_pair(), DephasingChannel("L1", 0.5), 8)
    assert traj.target == "L1"
    assert len(traj.values) == 9
    for k, value in enumerate(traj.values):
        assert value == pytest.approx(0.25 * 0.5 ** k, abs=1e-12)


def test_onset_and_robustness_threshold():
    traj = diagonality_trajectory(bell_pair(), DephasingChannel("L1", 0.5), 10)
    # 0.25 * 0.5^8 = 9.77e-4 is the first value at or under 1e-3.
    assert onset_step(traj, 1e-3) == 8
    assert robustly_decohered(traj, 8, 1e-3)
    assert not robustly_decohered(traj, 7, 1e-3)
    with pytest.raises(ValueError):
        robustly_decohered(traj, 11, 1e-3)
    assert onset_step(traj, 1e-9) is None


def test_trajectory_rejects_negative_steps():
    with pytest.raises(ValueError):
        diagonality_trajectory(bell_pair(), DephasingChannel("L1", 0.5), -1)
    with pytest.raises(ValueError):
        expectation_trajectory(build_scenario(), DephasingChannel("L1", 0.5),
                               ("Alice", "Bob", "Charlie"), -1)


def test_channel_preserves_trace_positivity_and_marginal():
    rng = np.random.default_rng(20260822)
    layout = qubits("a1", "L1")
    for _ in range(25):
        vec = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = QState(layout, vec / np.linalg.norm(vec))
        lam = float(rng.uniform(0.0, 1.0))
        rho = dephase(state, DephasingChannel("L1", lam))
        assert abs(np.trace(rho.matrix) - 1.0) <= 1e-12
        assert np.min(np.linalg.eigvalsh(rho.matrix)) >= -1e-12
        before = partial_trace(pure_density(state), keep=("a1",))
        after = partial_trace(rho, keep=("a1",))
        assert np.max(np.abs(before.matrix - after.matrix)) <= 1e-12


def test_diagonality_monotone_in_strength_and_steps():
    rng = np.random.default_rng(7)
    for _ in range(10):
        lam_small = float(rng.uniform(0.05, 0.45))
        lam_big = float(rng.uniform(0.55, 0.95))
        weak = diagonality_trajectory(bell_pair(),
                                      DephasingChannel("L1", lam_small), 6)
        strong = diagonality_trajectory(bell_pair(),
                                        DephasingChannel("L1", lam_big), 6)
        for k in range(6):
            assert weak.values[k + 1] <= weak.values[k] + 1e-12
            assert strong.values[k + 1] <= weak.values[k + 1] + 1e-12


@pytest.mark.parametrize(
    "agents,sign",
    [
        (("Eugene", "Johnny", "Daniel"), -1.0),
        (("Eugene", "Bob", "Charlie"), 1.0),
    ],
)
def test_x_type_correlations_decay_geometrically(agents, sign):
    model = build_scenario()
    values = expectation_trajectory(model, DephasingChannel("L1", 0.5),
                                    agents, 4)
    for k, value in enumerate(values):
        assert value == pytest.approx(sign * 0.5 ** k, abs=1e-10)


@pytest.mark.parametrize(
    "agents",
    [("Alice", "Johnny", "Charlie"), ("Alice", "Bob", "Daniel")],
)
def test_record_type_correlations_survive(agents):
    model = build_scenario()
    values = expectation_trajectory(model, DephasingChannel("L1", 0.5),
                                    agents, 4)
    for value in values:
        assert value == pytest.approx(1.0, abs=1e-10)


def test_correlation_decay_analytic_law():
    model = build_scenario()
    lam = 0.3
    values = correlation_decay(model, DephasingChannel("L1", lam), 10)
    assert len(values) == 11
    for k, value in enumerate(values):
        assert abs(value - (-((1.0 - lam) ** k))) <= 1e-12


def test_correlation_decay_edge_strengths():
    model = build_scenario()
    flat = correlation_decay(model, DephasingChannel("L2", 0.0), 5)
    assert all(abs(v + 1.0) <= 1e-12 for v in flat)
    dead = correlation_decay(model, DephasingChannel("L3", 1.0), 2)
    assert abs(dead[0] + 1.0) <= 1e-12
    assert abs(dead[1]) <= 1e-12
    assert abs(dead[2]) <= 1e-12


def test_correlation_decay_guards():
    model = build_scenario()
    with pytest.raises(ValueError):
        correlation_decay(model, DephasingChannel("a1", 0.5), 2)
    with pytest.raises(ValueError):
        correlation_decay(model, DephasingChannel("L1", 0.5, basis=HADAMARD), 2)


def test_record_context_table_is_invariant():
    model = build_scenario()
    context = scenario_context(model, ("Alice", "Johnny", "Charlie"))
    state = run_friend_stage(model)
    clean = born_table(tuple(context.values()), state, names=tuple(context))
    rho = pure_density(state)
    chan = DephasingChannel("L1", 0.7)
    for _ in range(3):
        rho = dephase(rho, chan)
    noisy = born_table(tuple(context.values()), rho, names=tuple(context))
    for outcome, p in clean.rows.items():
        assert noisy.rows[outcome] == pytest.approx(p, abs=1e-10)

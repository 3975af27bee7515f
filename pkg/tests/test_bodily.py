import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from selfsnn.bodily import (
    TRIAL_CSV_HEADER,
    MotorCommand,
    PlanarArm,
    RubberHandConfig,
    Trajectory,
    babble,
    classify_self_world,
    drift_profile,
    learn_motor_visual,
    predict_trajectory,
    random_command,
    run_mirror_test,
    run_rubber_hand,
    trajectory_score,
)

ARM = PlanarArm()


@pytest.fixture(scope="module")
def trained_map():
    return learn_motor_visual(babble(ARM, 300, seed=1), ARM)


# --- motor-visual learning ---------------------------------------------------

def test_repeated_pair_is_memorized():
    cmd = MotorCommand((20.0, -10.0))
    amap = learn_motor_visual([(cmd, ARM.execute(cmd))] * 3, ARM)
    err = np.abs(predict_trajectory(amap, cmd).positions - ARM.execute(cmd).displacement()).max()
    assert err < 1e-2


def test_two_orthogonal_commands_predicted_within_ten_percent():
    cmds = [MotorCommand((30.0, 0.0)), MotorCommand((0.0, 30.0))]
    amap = learn_motor_visual([(c, ARM.execute(c)) for c in cmds] * 5, ARM)
    for c in cmds:
        target = ARM.execute(c).displacement()
        err = np.abs(predict_trajectory(amap, c).positions - target).max()
        assert err < 0.1 * np.abs(target).max()


def test_holdout_error_decreases_over_epochs():
    amap = learn_motor_visual(babble(ARM, 300, seed=1), ARM, epochs=5, holdout=babble(ARM, 50, seed=2))
    errs = amap.epoch_errors
    assert len(errs) == 6 and errs[-1] < 0.2 * errs[0]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_shuffled_pairing_stays_at_chance():
    episodes = babble(ARM, 300, seed=1)
    holdout = babble(ARM, 50, seed=2)
    perm = np.random.default_rng(0).permutation(len(episodes))
    shuffled = [(episodes[i][0], episodes[j][1]) for i, j in enumerate(perm)]
    amap = learn_motor_visual(shuffled, ARM, holdout=holdout)
    # chance: always predict the mean displacement of the training feedback
    mean = np.mean([t.displacement() for _, t in episodes], axis=0)
    chance = np.mean([np.sqrt(np.mean((mean - t.displacement()) ** 2)) for _, t in holdout])
    assert amap.epoch_errors[-1] > 0.85 * chance
    trained = learn_motor_visual(episodes, ARM, holdout=holdout)
    assert trained.epoch_errors[-1] < 0.2 * chance


def test_learning_errors():
    with pytest.raises(ValueError):
        learn_motor_visual([], ARM)
    amap = learn_motor_visual(babble(ARM, 5), ARM)
    amap.trained = False
    with pytest.raises(ValueError):
        predict_trajectory(amap, MotorCommand((1.0, 1.0)))


def test_prediction_readback_and_support(trained_map):
    assert not predict_trajectory(trained_map, MotorCommand((0.0, 0.0))).positions.any()
    cmd = MotorCommand((25.0, -15.0))
    pred = predict_trajectory(trained_map, cmd)
    assert not pred.low_confidence
    assert np.abs(pred.positions - ARM.execute(cmd).displacement()).max() < 0.05
    assert predict_trajectory(trained_map, MotorCommand((120.0, -120.0))).low_confidence


def test_prediction_is_deterministic(trained_map):
    cmd = MotorCommand((10.0, 5.0))
    assert np.array_equal(predict_trajectory(trained_map, cmd).positions,
                          predict_trajectory(trained_map, cmd).positions)


# --- self / world ------------------------------------------------------------

@given(st.floats(-45, 45), st.floats(-45, 45))
def test_identical_trajectory_is_self(a, b):
    traj = ARM.execute(MotorCommand((a, b)))
    if np.ptp(traj.positions) > 1e-6 and abs(a) + abs(b) > 1.0:
        assert classify_self_world(traj, traj) == "self"


def test_reversed_trajectory_is_other():
    traj = ARM.execute(MotorCommand((30.0, 20.0)))
    assert classify_self_world(traj, traj.reversed()) == "other"


def test_noisy_copy_at_20db_is_self():
    rng = np.random.default_rng(3)
    traj = ARM.execute(MotorCommand((30.0, -25.0)))
    disp = traj.displacement()
    # 20 dB: noise power is a hundredth of the signal power
    noise_sd = math.sqrt(np.mean((disp - disp.mean(axis=0)) ** 2) / 100)
    noisy = Trajectory(traj.times, traj.positions + rng.normal(0, noise_sd, disp.shape))
    assert trajectory_score(traj, noisy) > 0.95
    assert classify_self_world(traj, noisy) == "self"


def test_degenerate_trajectory_rejected():
    flat = Trajectory([0.0, 1.0, 2.0], np.zeros((3, 2)))
    with pytest.raises(ValueError):
        classify_self_world(flat, flat)
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], np.zeros((2, 2)))


# --- mirror test -------------------------------------------------------------

def test_single_agent_is_always_right():
    res = run_mirror_test(1, 20, seed=0)
    assert res.accuracy == 1.0 and res.ambiguous == 0


def test_shared_commands_are_all_ambiguous():
    res = run_mirror_test(2, 20, seed=0, shared_commands=True)
    assert res.ambiguous_rate == 1.0 and res.decisions == 0


def test_mirror_errors_and_rows():
    with pytest.raises(ValueError):
        run_mirror_test(3, 0)
    res = run_mirror_test(3, 5, seed=2)
    assert len(TRIAL_CSV_HEADER) == 5 and len(res.rows) == 15


def test_accuracy_non_increasing_in_noise():
    accs = [run_mirror_test(3, 40, seed=0, noise=n).accuracy for n in (0.0, 0.2, 0.5, 1.0)]
    assert all(b <= a for a, b in zip(accs, accs[1:]))


def test_accuracy_non_increasing_in_agents():
    accs = [run_mirror_test(n, 40, seed=0, noise=0.5).accuracy for n in (2, 3, 5)]
    assert all(b <= a for a, b in zip(accs, accs[1:]))


def test_mirror_is_seed_deterministic():
    assert run_mirror_test(3, 10, seed=11).rows == run_mirror_test(3, 10, seed=11).rows


# --- rubber hand ---------------------------------------------------------------

def test_rubber_hand_boundaries():
    assert run_rubber_hand(0.0).proprioceptive_drift == 0.0
    far = run_rubber_hand(75.0)
    assert far.proprioceptive_drift == 0.0 and far.dominant_modality == "proprioception"
    assert run_rubber_hand(10.0).dominant_modality == "vision"
    assert run_rubber_hand(40.0).dominant_modality == "proprioception"
    with pytest.raises(ValueError):
        run_rubber_hand(-1.0)


def test_rubber_hand_profile_shape():
    cfg = RubberHandConfig()
    angles = np.arange(0.0, 80.0, 2.0)
    drift = np.array([r.proprioceptive_drift for r in drift_profile(angles, True, cfg)])
    small = angles <= cfg.small_angle
    assert np.all(np.diff(drift[small]) > 0)
    medium = (angles >= cfg.small_angle) & (angles <= cfg.max_angle)
    assert np.all(np.diff(drift[medium], 2) <= 1e-12)
    assert np.all(drift[angles > cfg.max_angle] == 0)


@given(st.floats(0, 90), st.floats(0.05, 1.0))
def test_async_never_exceeds_sync(angle, binding):
    cfg = RubberHandConfig(async_binding=binding)
    sync = run_rubber_hand(angle, True, cfg).proprioceptive_drift
    asyn = run_rubber_hand(angle, False, cfg).proprioceptive_drift
    assert 0 <= asyn <= sync


def test_random_command_within_limits():
    rng = np.random.default_rng(0)
    assert all(random_command(rng).within_limits() for _ in range(100))

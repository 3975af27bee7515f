"""The twelve acceptance criteria, one test each, at their stated tolerances and budgets."""

import math

import numpy as np
import pytest

from oracles import crossed_cells, hsic_cka, occluder_sets, raycast_visible
from selfsnn.autonomous import GridWorld, PHENOMENA, PolicyNetwork, run_phenomenon, speed_generalization, train_policy, zero_reward
from selfsnn.bodily import RubberHandConfig, drift_profile, run_mirror_test
from selfsnn.concept import evaluate_fixture, make_fixture, sliding_coordinate
from selfsnn.continual import run_benchmark
from selfsnn.core import NeuronParams, SpikeTrain, run_constant_current
from selfsnn.harness.config import ExperimentConfig
from selfsnn.harness.registry import REGISTRY
from selfsnn.harness.runner import run_many
from selfsnn.plasticity import (
    StdpParams,
    TransferLossConfig,
    linear_cka,
    stdp_delta,
    temporal_consistency_loss,
    transfer_loss,
    transfer_loss_from_alignment,
)
from selfsnn.social import (
    EMOTIONS,
    AgentPose,
    EmotionState,
    WorldState,
    decide_altruistic,
    observe_action_empathy,
    perspective_transform,
    run_false_belief_task,
    train_mirror_system,
)

SEEDS = range(5)

pytestmark = pytest.mark.acceptance


def test_criterion_01_lif_first_spike(criterion):
    with criterion(1, "LIF first spike within one dt of closed form, 20 draws", 1.0):
        rng = np.random.default_rng(2024)
        for dt in (1.0, 0.5):
            for _ in range(20):
                p = NeuronParams(tau_m=rng.uniform(2, 40), v_threshold=rng.uniform(0.5, 2),
                                 resistance=rng.uniform(0.5, 2))
                i_in = p.v_threshold / p.resistance * rng.uniform(1.05, 4.0)
                v_inf = p.resistance * i_in
                closed = p.tau_m * math.log(v_inf / (v_inf - p.v_threshold))
                times = run_constant_current(p, i_in, closed + 10.0, dt)
                assert times and abs(times[0] - closed) <= dt


def _window(d, p):
    if d > 0:
        return p.a_plus * math.exp(-d / p.tau_plus)
    if d < 0:
        return -p.a_minus * math.exp(d / p.tau_minus)
    return 0.0


def test_criterion_02_plasticity_math(criterion):
    with criterion(2, "STDP window, CKA oracle and invariances, transfer-loss limits, consistency", 5.0):
        p = StdpParams()
        grid = np.linspace(-120, 120, 2401)
        assert np.max(np.abs(stdp_delta(grid, p) - [_window(d, p) for d in grid])) <= 1e-9

        rng = np.random.default_rng(7)
        for _ in range(200):
            x, y = rng.standard_normal((5, 4)), rng.standard_normal((5, 4))
            v = linear_cka(x, y)
            assert abs(v - hsic_cka(x, y)) <= 1e-9
            q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
            assert abs(linear_cka(x @ q, y) - v) <= 1e-6
            assert abs(linear_cka(x, y @ q) - v) <= 1e-6
            assert abs(linear_cka(rng.uniform(0.1, 10) * x, y) - v) <= 1e-6

        feats = [rng.standard_normal((6, 3)) for _ in range(2)]
        pairs = [(i, i) for i in range(6)]
        # fully aligned and gate open -> 0; gate closed -> 1 + class loss; raw alignment limit
        assert transfer_loss(TransferLossConfig(feats, feats, pairs, [60.0] * 2, [0.3] * 2)) == pytest.approx(0.0, abs=1e-12)
        assert transfer_loss(TransferLossConfig(feats, feats, pairs, [-60.0] * 2, [0.3] * 2)) == pytest.approx(1.3, abs=1e-12)
        assert transfer_loss_from_alignment([0.0], [0.8], [0.4]) == 0.8

        const = np.tile(rng.standard_normal(5), (6, 1))
        assert temporal_consistency_loss(const) == 0.0
        for _ in range(50):
            logits = rng.standard_normal((6, 5))
            assert temporal_consistency_loss(logits) > 0.0


def test_criterion_03_conditioning(criterion):
    with criterion(3, "six conditioning phenomena on 5 seeds", 120.0):
        assert len(PHENOMENA) == 6
        for seed in SEEDS:
            r = {name: run_phenomenon(name, seed=seed) for name in PHENOMENA}
            assert all(x["pass"] for x in r.values()), seed
            m = {name: x["metrics"] for name, x in r.items()}
            assert m["acquisition"]["trials_to_criterion"] <= 50
            assert m["extinction"]["trials_to_extinction"] <= 50
            assert m["reacquisition-savings"]["reacquisition_trials"] <= 0.5 * m["reacquisition-savings"]["acquisition_trials"]
            assert m["blocking"]["blocked_cr"] <= 0.3 and m["blocking"]["control_cr"] >= 0.8
            assert m["spontaneous-recovery"]["rebound"] >= 0.2
            ci = m["conditioned-inhibition"]
            assert ci["BX"] < ci["B"] and ci["BX"] < ci["BC"]


def test_criterion_04_speed_generalization(criterion):
    with criterion(4, "trained at 1x, success >= 80% at 3.5x, 5 seeds", 180.0):
        for seed in SEEDS:
            res = speed_generalization(test_speeds=(3.5,), seed=seed)
            assert res["success"][3.5] >= 0.8, (seed, res["success"])


def test_criterion_05_rstdp(criterion):
    with criterion(5, "R-STDP goal rate >= 90% over last 100 of 500 episodes, zero-reward control", 120.0):
        env = GridWorld()
        for seed in SEEDS:
            run = train_policy(env, episodes=500, seed=seed)
            assert run.goal_rate(100) >= 0.9, seed
            w0 = PolicyNetwork(env.n_states, seed=seed).weights.copy()
            control = train_policy(zero_reward(env), episodes=50, seed=seed)
            assert np.max(np.abs(control.policy.weights - w0)) <= 1e-6


def test_criterion_06_mirror_test(criterion):
    with criterion(6, "mirror test, 3 agents, 100 trials: accuracy >= 95%, ambiguous < 5%", 60.0):
        res = run_mirror_test(n_agents=3, trials=100, seed=0)
        assert res.accuracy >= 0.95
        assert res.ambiguous_rate < 0.05


def test_criterion_07_rubber_hand(criterion):
    with criterion(7, "rubber-hand drift regimes", 30.0):
        cfg = RubberHandConfig()
        angles = np.arange(0.0, cfg.max_angle + 30.0 + 1e-9, 1.0)
        sync = np.array([r.proprioceptive_drift for r in drift_profile(angles, True, cfg)])
        asyn = np.array([r.proprioceptive_drift for r in drift_profile(angles, False, cfg)])
        assert sync[0] == 0.0
        assert np.all(np.diff(sync[angles <= cfg.small_angle]) > 0)
        medium = (angles >= cfg.small_angle) & (angles <= cfg.max_angle)
        assert np.all(np.diff(sync[medium], 2) <= 1e-12)
        assert np.all(sync[angles > cfg.max_angle] == 0.0)
        assert np.all(asyn <= sync)


def test_criterion_08_false_belief_and_perspective(criterion):
    with criterion(8, "Sally-Anne 50 seeds with/without ToM; exhaustive 6x6 ray-cast equivalence", 60.0):
        for seed in range(50):
            tom = run_false_belief_task("sally-anne", with_tom=True, seed=seed)
            assert tom["correct"] and tom["prediction"] == tom["expected"] != tom["truth"], seed
            ablation = run_false_belief_task("sally-anne", with_tom=False, seed=seed)
            assert ablation["correct"] and ablation["prediction"] == ablation["truth"], seed
        cells, crossed = crossed_cells(6, 6)
        checked = 0
        for occ in occluder_sets(cells, 2):
            world = WorldState(6, 6, occluders=occ)
            for v in cells:
                if v not in occ:
                    got = perspective_transform(world, AgentPose(v, 0.0, 180.0)).cells
                    assert got == raycast_visible(cells, crossed, v, occ), (v, sorted(occ))
                    checked += 1
        assert checked == 22716


def test_criterion_09_empathy(criterion):
    with criterion(9, "emotion match, attribution, rescue rule on 100 grid points", 60.0):
        pairs = {"cry": "distress", "smile": "positive", "walk": "neutral"}
        mirror = train_mirror_system(pairs, seed=0)
        for action, emotion in pairs.items():
            own = mirror.read_emotion(mirror.self_experience(action))
            assert own.label == emotion
            for copy in (False, True):
                seen, who = observe_action_empathy(mirror, action, copy)
                assert seen.label == own.label
                assert who == ("self" if copy else "other")
        points = 0
        for gain in np.linspace(0.0, 2.0, 10):
            for value in np.linspace(0.0, 2.0, 10):
                for label in EMOTIONS:
                    state = EmotionState.of(label)
                    neg = max(0.0, -state.valence)
                    want = "rescue" if gain * neg > value else "continue-task"
                    assert decide_altruistic(float(value), state, float(gain)) == want
                points += 1
        assert points == 100


def test_criterion_10_continual(criterion):
    with criterion(10, "continual: full <= 5, naive >= 20, prune >= 20% costs <= 2, sleep >= -1", 300.0):
        for seed in SEEDS:
            out = run_benchmark(seed)
            assert out["full_forgetting"] <= 5.0, (seed, out["full_forgetting"])
            assert out["naive_forgetting"] >= 20.0, (seed, out["naive_forgetting"])
            assert out["pruned_fraction"] >= 0.2 and out["prune_cost_max"] <= 2.0, seed
            assert out["sleep_min_delta"] >= -1.0, seed


def test_criterion_11_concept_fusion(criterion):
    with criterion(11, "fused accuracy >= best single modality; offsets recovered exactly", 30.0):
        res = evaluate_fixture(make_fixture(0))
        assert res["fused_accuracy"] >= max(res["sensory_accuracy"], res["text_accuracy"])
        assert res["alignment_recovered"] == 1.0
        rng = np.random.default_rng(11)
        window = 10
        for shift in range(-window, window + 1):
            times = rng.integers(window, 100 - window, 25).astype(float)
            a = SpikeTrain(8, 100.0, times, rng.integers(0, 8, 25))
            fused = sliding_coordinate(a, a.shifted(float(shift)), window)
            assert fused.offset == -shift
            assert fused.total_coincidences == len(a)


def test_criterion_12_determinism(criterion):
    with criterion(12, "byte-identical summaries for every experiment, serial and pooled", 600.0):
        configs = [ExperimentConfig(name, 42) for name in sorted(REGISTRY)]
        first = run_many(configs, workers=1)
        second = run_many(configs, workers=1)
        pooled = run_many(configs, workers=4)
        assert first == second == pooled
        assert len(set(first)) == len(configs)

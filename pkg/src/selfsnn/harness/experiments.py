"""Experiment bodies.  Each takes ``(params, seed)`` and returns an Outcome."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..rng import as_generator


@dataclass
class Outcome:
    metrics: dict
    checks: dict
    series: dict = field(default_factory=dict)   # name -> (header tuple, rows)


# ---------------------------------------------------------------- level 0


def lif_oracle(p: dict, seed: int) -> Outcome:
    from ..core.neuron import NeuronParams, first_spike_time, run_constant_current

    rng = as_generator(seed, "lif-oracle")
    rows, worst = [], 0.0
    for i in range(p["draws"]):
        params = NeuronParams(tau_m=float(rng.uniform(2.0, 40.0)), v_threshold=float(rng.uniform(0.5, 2.0)),
                              resistance=float(rng.uniform(0.5, 2.0)))
        current = params.v_threshold / params.resistance * float(rng.uniform(1.05, 4.0))
        closed = first_spike_time(params, current)
        times = run_constant_current(params, current, closed + 5 * p["dt"] + 1.0, p["dt"])
        sim = times[0] if times else math.inf
        err = abs(sim - closed)
        worst = max(worst, err)
        rows.append((i, params.tau_m, params.v_threshold, current, closed, sim))
    return Outcome({"max_abs_error_ms": worst, "draws": p["draws"]},
                   {"first_spike_within_dt": worst <= p["dt"]},
                   {"draws": (("draw", "tau_m", "threshold", "current", "closed_form_ms", "simulated_ms"), rows)})


def _cka_oracle(x, y) -> float:
    n = x.shape[0]
    h = np.eye(n) - np.ones((n, n)) / n
    k, l = x @ x.T, y @ y.T

    def hsic(a, b):
        return float(np.trace(a @ h @ b @ h))

    return hsic(k, l) / math.sqrt(hsic(k, k) * hsic(l, l))


def plasticity_math(p: dict, seed: int) -> Outcome:
    from ..plasticity import StdpParams, linear_cka, stdp_delta

    params = StdpParams()
    grid = np.linspace(-100, 100, 401)
    direct = [params.a_plus * math.exp(-d / params.tau_plus) if d > 0
              else (-params.a_minus * math.exp(d / params.tau_minus) if d < 0 else 0.0) for d in grid]
    stdp_err = float(np.max(np.abs(stdp_delta(grid, params) - np.array(direct))))
    rng = as_generator(seed, "plasticity-math")
    cka_err = inv_err = 0.0
    for _ in range(p["instances"]):
        x, y = rng.standard_normal((5, 4)), rng.standard_normal((5, 4))
        cka_err = max(cka_err, abs(linear_cka(x, y) - _cka_oracle(x, y)))
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        inv_err = max(inv_err, abs(linear_cka(x @ q, y) - linear_cka(x, y)),
                      abs(linear_cka(3.7 * x, y) - linear_cka(x, y)))
    return Outcome({"stdp_max_error": stdp_err, "cka_max_error": cka_err, "cka_invariance_error": inv_err},
                   {"stdp_matches_window": stdp_err <= 1e-9, "cka_matches_oracle": cka_err <= 1e-9,
                    "cka_invariant": inv_err <= 1e-6})


def concept_fusion(p: dict, seed: int) -> Outcome:
    from ..concept import FixtureConfig, evaluate_fixture, make_fixture

    res = evaluate_fixture(make_fixture(seed, FixtureConfig(n_classes=p["classes"], n_test=p["test_per_class"])))
    best = max(res["sensory_accuracy"], res["text_accuracy"])
    return Outcome(res, {"fusion_not_worse": res["fused_accuracy"] >= best,
                         "offsets_recovered": res["alignment_recovered"] == 1.0})


def continual(p: dict, seed: int) -> Outcome:
    from ..continual import GrowthConfig, TrainConfig, run_benchmark

    res = run_benchmark(seed, GrowthConfig(neurons_per_task=p["neurons_per_task"]),
                        TrainConfig(epochs=p["epochs"]), sleep_epochs=p["sleep_epochs"])
    metrics = {k: v for k, v in res.items() if not k.endswith("matrix")}
    rows = []
    for method in ("full", "naive"):
        for i, row in enumerate(res[f"{method}_acc_matrix"]):
            for j, acc in enumerate(row):
                if j <= i:
                    rows.append((method, i, j, acc))
    return Outcome(metrics, {
        "full_forgetting_le_5": res["full_forgetting"] <= 5.0,
        "naive_forgetting_ge_20": res["naive_forgetting"] >= 20.0,
        "pruned_ge_20pct": res["pruned_fraction"] >= 0.2,
        "prune_cost_le_2": res["prune_cost_max"] <= 2.0,
        "sleep_cost_le_1": res["sleep_min_delta"] >= -1.0,
    }, {"accuracy_matrix": (("method", "after_task", "task", "accuracy"), rows)})


# ---------------------------------------------------------------- level 1


def mirror_test(p: dict, seed: int) -> Outcome:
    from ..bodily import TRIAL_CSV_HEADER, run_mirror_test

    res = run_mirror_test(n_agents=p["agents"], trials=p["trials"], seed=seed, noise=p["noise"])
    return Outcome(res.summary(), {"accuracy_ge_95": res.accuracy >= 0.95, "ambiguous_lt_5": res.ambiguous_rate < 0.05},
                   {"trials": (TRIAL_CSV_HEADER, res.rows)})


def rubber_hand(p: dict, seed: int) -> Outcome:
    from ..bodily import RubberHandConfig, drift_profile

    cfg = RubberHandConfig(small_angle=p["small_angle"], max_angle=p["max_angle"])
    angles = np.arange(0.0, p["max_angle"] + 20.0 + 1e-9, p["step"])
    sync = np.array([r.proprioceptive_drift for r in drift_profile(angles, True, cfg)])
    asyn = np.array([r.proprioceptive_drift for r in drift_profile(angles, False, cfg)])
    small = angles <= cfg.small_angle
    medium = (angles >= cfg.small_angle) & (angles <= cfg.max_angle)
    beyond = angles > cfg.max_angle
    second = np.diff(sync[medium], 2)
    rows = [(float(a), float(s), float(x)) for a, s, x in zip(angles, sync, asyn)]
    return Outcome({"peak_drift": float(sync.max()), "angles": int(angles.size)}, {
        "zero_at_zero": sync[0] == 0.0,
        "increasing_small": bool(np.all(np.diff(sync[small]) > 0)),
        "flattening_medium": bool(np.all(second <= 1e-12)),
        "zero_beyond_max": bool(np.all(sync[beyond] == 0.0)),
        "async_le_sync": bool(np.all(asyn <= sync + 1e-12)),
    }, {"drift": (("angle", "drift_sync", "drift_async"), rows)})


def self_world(p: dict, seed: int) -> Outcome:
    from ..bodily import PlanarArm, babble, classify_self_world, learn_motor_visual, predict_trajectory

    arm = PlanarArm()
    amap = learn_motor_visual(babble(arm, p["babble"], seed=as_generator(seed, "self-world", "babble")), arm)
    test = babble(arm, p["tests"], seed=as_generator(seed, "self-world", "test"))
    hits, rows = 0, []
    for k, (cmd, own) in enumerate(test):
        # the same motion played backwards stands in for externally caused movement
        pred = predict_trajectory(amap, cmd)
        a, b = classify_self_world(pred, own), classify_self_world(pred, own.reversed())
        hits += (a == "self") + (b == "other")
        rows.append((k, a, b))
    acc = hits / (2 * p["tests"])
    return Outcome({"accuracy": acc}, {"accuracy_ge_90": acc >= 0.9},
                   {"decisions": (("test", "own_feedback", "reversed_feedback"), rows)})


# ---------------------------------------------------------------- level 2


def conditioning(p: dict, seed: int) -> Outcome:
    from ..autonomous import PHENOMENA, run_phenomenon

    metrics, checks = {}, {}
    for name in sorted(PHENOMENA):
        res = run_phenomenon(name, seed=seed)
        checks[name] = res["pass"]
        for k, v in sorted(res["metrics"].items()):
            if isinstance(v, (int, float, bool)):
                metrics[f"{name}.{k}"] = v
    return Outcome(metrics, checks)


def speed(p: dict, seed: int) -> Outcome:
    from ..autonomous import speed_generalization

    res = speed_generalization(test_speeds=(1.0, p["test_speed"]), seed=seed)
    s = res["success"][float(p["test_speed"])]
    return Outcome({"trained_success": res["trained_success"], "test_speed": p["test_speed"], "test_success": s},
                   {"test_success_ge_80": s >= 0.8})


def rstdp(p: dict, seed: int) -> Outcome:
    from ..autonomous import GridWorld, PolicyNetwork, train_policy, zero_reward

    env = GridWorld()
    run = train_policy(env, episodes=p["episodes"], seed=seed)
    rate = run.goal_rate(100)
    control_env = zero_reward(env)
    w0 = PolicyNetwork(control_env.n_states, seed=seed).weights.copy()
    control = train_policy(control_env, episodes=p["control_episodes"], seed=seed)
    drift = float(np.max(np.abs(control.policy.weights - w0)))
    rows = [(r["episode"], r["return"], r["steps"], int(r["success"])) for r in run.rows]
    return Outcome({"goal_rate_last100": rate, "zero_reward_weight_drift": drift}, {
        "goal_rate_ge_90": rate >= 0.9, "zero_reward_unchanged": drift <= 1e-6,
    }, {"episodes": (("episode", "return", "steps", "success"), rows)})


# ---------------------------------------------------------------- level 3


def false_belief(p: dict, seed: int) -> Outcome:
    from ..social.belief import FALSE_BELIEF_SCENARIOS, _layout, run_false_belief_task

    variant = p["variant"]
    res = run_false_belief_task(variant, with_tom=p["with_tom"], seed=seed)
    ablation = run_false_belief_task(variant, with_tom=not p["with_tom"], seed=seed)
    script = FALSE_BELIEF_SCENARIOS[variant]
    containers, _ = _layout(seed, *script.get("size", [6, 6]))
    names = {tuple(c): n for n, c in zip("ABC", containers)}

    def name(cell):
        return None if cell is None else names.get(tuple(cell))

    return Outcome({"variant": variant, "with_tom": p["with_tom"], "prediction": name(res["prediction"]),
                    "truth": name(res["truth"]), "ablation_prediction": name(ablation["prediction"])},
                   {"prediction_correct": res["correct"], "ablation_correct": ablation["correct"]})


def empathy(p: dict, seed: int) -> Outcome:
    from ..social.empathy import EMOTIONS, EmotionState, decide_altruistic, observe_action_empathy, train_mirror_system

    pairs = {"cry": "distress", "smile": "positive", "walk": "neutral"}
    mirror = train_mirror_system(pairs, seed=seed)
    rows, match, attrib = [], 0, 0
    for action, emotion in sorted(pairs.items()):
        own = mirror.read_emotion(mirror.self_experience(action))
        for copy in (False, True):
            seen, who = observe_action_empathy(mirror, action, copy)
            match += seen.label == own.label == emotion
            attrib += who == ("self" if copy else "other")
            rows.append((action, emotion, own.label, seen.label, int(copy), who))
    grid_ok = True
    for gain in np.linspace(0, 2, 10):
        for value in np.linspace(0, 2, 10):
            want = "rescue" if gain * 1.0 > value else "continue-task"
            grid_ok &= decide_altruistic(float(value), EmotionState.of("distress"), float(gain)) == want
    n = 2 * len(pairs)
    return Outcome({"emotion_match": match / n, "attribution": attrib / n, "emotions": len(EMOTIONS)},
                   {"emotion_match_all": match == n, "attribution_all": attrib == n, "rescue_rule": bool(grid_ok)},
                   {"observations": (("action", "trained_emotion", "self_emotion", "observed_emotion",
                                      "proprioceptive_copy", "attribution"), rows)})


def hazard_warning(p: dict, seed: int) -> Outcome:
    from ..social.belief import warn_of_hazard
    from ..social.perspective import AgentPose, WorldState

    rng = as_generator(seed, "hazard-warning")
    hits, rows = 0, []
    for trial in range(p["trials"]):
        # the other walks up column x towards a hazard; each agent either faces it or looks away
        x = int(rng.integers(1, 6))
        other_sees, self_sees = bool(rng.integers(0, 2)), bool(rng.integers(0, 2))
        world = WorldState(6, 6, hazards={(x, 2)})
        other = AgentPose((x, 5), "up" if other_sees else "down", 45.0)
        me = AgentPose((0, 0), "down" if self_sees else "up", 90.0)
        path = [(x, y) for y in range(4, -1, -1)]
        want = "warn" if self_sees and not other_sees else "no-warn"
        got = warn_of_hazard(me, other, world, other_path=path)
        hits += got == want
        rows.append((trial, x, int(other_sees), int(self_sees), got))
    acc = hits / p["trials"]
    return Outcome({"accuracy": acc}, {"warnings_correct": acc == 1.0},
                   {"trials": (("trial", "column", "other_sees", "self_sees", "decision"), rows)})


__all__ = [
    "Outcome", "concept_fusion", "conditioning", "continual", "empathy", "false_belief", "hazard_warning",
    "lif_oracle", "mirror_test", "plasticity_math", "rstdp", "rubber_hand", "self_world", "speed",
]

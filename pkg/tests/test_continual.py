import copy

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from selfsnn.continual import (
    GrowingNetwork,
    GrowthConfig,
    TaskSpec,
    TrainConfig,
    benchmark_tasks,
    evaluate_forgetting,
    grow_for_task,
    homeostatic_rescale,
    make_task,
    prune_inactive,
    run_benchmark,
    run_full_method,
    sleep_consolidate,
    take_snapshot,
    wake_importance,
)


@pytest.fixture(scope="module")
def tasks():
    return benchmark_tasks(0)


def _trained(tasks, seed=0, train=None, upto=1):
    net = GrowingNetwork(64, train=train, seed=seed)
    snaps = []
    for data in tasks[:upto]:
        grow_for_task(net, data.spec)
        net.train_task(data)
        wake_importance(net, data)
        snaps.append(take_snapshot(data))
    return net, snaps


# ---------------------------------------------------------------- specs


def test_task_labels_disjoint():
    a, b = TaskSpec(0), TaskSpec(1)
    assert set(a.labels).isdisjoint(b.labels)


def test_config_validation():
    with pytest.raises(ValueError):
        GrowthConfig(neurons_per_task=0)
    with pytest.raises(ValueError):
        GrowthConfig(prune_rate_threshold=-1.0)
    with pytest.raises(ValueError):
        TaskSpec(0, n_classes=1)


# ---------------------------------------------------------------- growth


def test_growth_size_and_reuse(tasks):
    net = GrowingNetwork(64, seed=0, base=5)
    grow_for_task(net, tasks[0].spec)
    assert net.size == 5 + 32
    grow_for_task(net, tasks[1].spec)
    new = net.owner == 1
    first = net.owner == 0
    assert np.count_nonzero(net.w_reuse[np.ix_(new, first)]) > 0
    # older units never read newer ones
    assert not net.w_reuse[np.ix_(first, new)].any()


def test_growth_deterministic(tasks):
    nets = []
    for _ in range(2):
        net = GrowingNetwork(64, seed=3)
        grow_for_task(net, tasks[0].spec)
        grow_for_task(net, tasks[1].spec)
        nets.append(net)
    assert np.array_equal(nets[0].w_in, nets[1].w_in)
    assert np.array_equal(nets[0].w_reuse, nets[1].w_reuse)


def test_duplicate_task_rejected(tasks):
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, tasks[0].spec)
    with pytest.raises(ValueError):
        grow_for_task(net, tasks[0].spec)


# ---------------------------------------------------------------- pruning


def test_prune_nothing_when_all_active(tasks):
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, tasks[0].spec)
    log = [np.full(net.w_in.shape[0], 5.0)] * 3
    _, stats = prune_inactive(net, log)
    assert stats.pruned == 0 and net.size == 32


def test_prune_one_silent_unit(tasks):
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, tasks[0].spec)
    rates = np.full(net.w_in.shape[0], 5.0)
    rates[7] = 0.0
    _, stats = prune_inactive(net, [rates] * 3)
    assert stats.indices == [7]
    assert not net.alive[7] and net.size == 31


def test_prune_needs_full_window(tasks):
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, tasks[0].spec)
    with pytest.raises(ValueError):
        prune_inactive(net, [np.zeros(32)] * 2)


def test_prune_requires_consecutive_silence(tasks):
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, tasks[0].spec)
    silent = np.full(32, 5.0)
    silent[2] = 0.0
    _, stats = prune_inactive(net, [silent, np.full(32, 5.0), silent])
    assert stats.pruned == 0


def test_prune_keeps_important_old_units(tasks):
    net, _ = _trained(tasks)
    grow_for_task(net, tasks[1].spec)
    important = np.flatnonzero((net.owner == 0) & (net.importance.w_in.sum(axis=1) > 0))
    assert important.size
    _, stats = prune_inactive(net, [np.zeros(net.w_in.shape[0])] * 3)
    assert net.alive[important].all()
    assert set(stats.indices).isdisjoint(important.tolist())


def test_pruning_cost_on_benchmark():
    out = run_benchmark(0)
    assert out["pruned_fraction"] >= 0.2
    assert out["prune_cost_max"] <= 2.0


# ---------------------------------------------------------------- importance


def test_importance_nonnegative_and_zero_iff_silent(tasks):
    net, _ = _trained(tasks)
    imp = net.importance
    assert (imp.w_in >= 0).all() and (imp.w_reuse >= 0).all() and (imp.bias >= 0).all()
    assert np.array_equal(imp.w_in == 0, imp.coactivity_in == 0)


def test_silent_synapse_zero_importance(tasks):
    data = copy.deepcopy(tasks[0])
    data.x_train[:, 5] = 0.0
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, data.spec)
    net.train_task(data)
    imp = wake_importance(net, data)
    assert not imp.w_in[:, 5].any()


def test_coactivity_scales_with_data(tasks):
    net, _ = _trained(tasks)
    small = wake_importance(copy.deepcopy(net), tasks[0], accumulate=False).coactivity_in.sum()
    big = make_task(TaskSpec(0, 4, 0, n_train=120))
    large = wake_importance(copy.deepcopy(net), big, accumulate=False).coactivity_in.sum()
    assert large / small == pytest.approx(2.0, rel=0.1)


@pytest.mark.parametrize("seed", [0, 1])
def test_important_weights_barely_move(seed):
    # zero-importance reference: the freshly grown block trained on the same task
    tasks = benchmark_tasks(seed)
    net, _ = _trained(tasks, seed)
    grow_for_task(net, tasks[1].spec)
    w0 = net.w_in.copy()
    high = net.importance.w_in >= 9.0
    fresh = np.zeros_like(high)
    fresh[net.owner == 1] = True
    assert high.sum() > 100
    net.train_task(tasks[1])
    moved = np.abs(net.w_in - w0)
    assert moved[high].mean() <= 0.1 * moved[fresh].mean()


# ---------------------------------------------------------------- training


def test_old_readout_untouched_by_new_task(tasks):
    net, _ = _trained(tasks)
    w_old, b_old = (a.copy() for a in net.heads[0])
    grow_for_task(net, tasks[1].spec)
    net.train_task(tasks[1])
    w, b = net.heads[0]
    assert np.array_equal(w[:, :w_old.shape[1]], w_old)
    assert not w[:, w_old.shape[1]:].any()
    assert np.array_equal(b, b_old)


def test_size_never_grows_during_task(tasks):
    net = GrowingNetwork(64, seed=0)
    grow_for_task(net, tasks[0].spec)
    size = net.size
    log = net.train_task(tasks[0])
    assert net.size == size
    prune_inactive(net, log)
    assert net.size <= size


# ---------------------------------------------------------------- sleep


def test_sleep_zero_epochs_is_identity(tasks):
    net, snaps = _trained(tasks)
    before = copy.deepcopy(net)
    sleep_consolidate(net, snaps, epochs=0)
    assert np.array_equal(net.w_in, before.w_in) and np.array_equal(net.bias, before.bias)
    assert all(np.array_equal(net.heads[t][0], before.heads[t][0]) for t in net.heads)


def test_sleep_needs_snapshot(tasks):
    net, _ = _trained(tasks)
    with pytest.raises(ValueError):
        sleep_consolidate(net, [], epochs=5)


def test_sleep_recovers_old_task():
    tasks = benchmark_tasks(1)
    net, snaps = _trained(tasks, 1, TrainConfig(importance_strength=1.0), upto=2)
    before = net.accuracy(tasks[0])
    sleep_consolidate(net, snaps, 20)
    assert net.accuracy(tasks[0]) > before


@pytest.mark.parametrize("seed", range(3))
def test_sleep_never_costs_more_than_one_point(seed):
    tasks = benchmark_tasks(seed)
    net, snaps = _trained(tasks, seed, upto=2)
    before = [net.accuracy(t) for t in tasks[:2]]
    sleep_consolidate(net, snaps, 20)
    after = [net.accuracy(t) for t in tasks[:2]]
    assert all(a >= b - 0.01 for a, b in zip(after, before))


@pytest.mark.parametrize("target", [2.0, 10.0, 40.0])
def test_homeostatic_rescale_hits_target(tasks, target):
    net, snaps = _trained(tasks)
    patterns = snaps[0].patterns
    pred = net.predict(tasks[0].x_test, 0)
    homeostatic_rescale(net, patterns, target)
    mean = net.rates(patterns)[net.alive].mean()
    assert mean == pytest.approx(target, rel=0.1)
    assert np.array_equal(net.predict(tasks[0].x_test, 0), pred)


# ---------------------------------------------------------------- forgetting


def test_forgetting_single_task():
    assert evaluate_forgetting([[0.9]])["average"] == 0.0


def test_forgetting_hand_example():
    m = [[0.9, 0.0, 0.0], [0.8, 0.95, 0.0], [0.7, 0.9, 1.0]]
    out = evaluate_forgetting(m)
    assert out["per_task"] == pytest.approx([20.0, 5.0, 0.0])
    assert out["average"] == pytest.approx(12.5)


@given(st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_forgetting_zero_without_decline(accs):
    # accuracy on every task only rises over time -> nothing forgotten
    a = sorted(accs)
    m = [[a[0], 0, 0], [a[1], a[0], 0], [a[2], a[1], a[0]]]
    assert evaluate_forgetting(m)["average"] == 0.0


def test_full_pipeline_deterministic(tasks):
    r1 = run_full_method(tasks, seed=0)
    r2 = run_full_method(tasks, seed=0)
    assert r1.acc_matrix == r2.acc_matrix and r1.prune == r2.prune and r1.final_size == r2.final_size

"""Continual learning by structural growth, pruning and wake/sleep consolidation.

Hidden units are rate-coded neurons with a rectified-linear frequency
response (Hz).  Every task grows a fresh block of units that reads the
input and, through reuse edges, the units grown for earlier tasks; each
task has its own readout.  Training signals reaching older units are
scaled by ``1 / (1 + importance)``, where importance is Hebbian
pre x post co-activity accumulated while the older task was learned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..rng import as_generator, check_seed


@dataclass(frozen=True)
class TaskSpec:
    task_id: int
    n_classes: int = 4
    seed: int = 0
    n_train: int = 60      # per class
    n_test: int = 40       # per class

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("a task needs at least two classes")
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError("split sizes must be >= 1")

    @property
    def labels(self) -> range:
        # disjoint label ranges across tasks
        return range(self.task_id * self.n_classes, (self.task_id + 1) * self.n_classes)


@dataclass(frozen=True)
class PatternConfig:
    n_inputs: int = 64
    active_inputs: int = 12     # inputs driven hard by each class prototype
    shared_pool: int = 24       # all tasks draw active inputs from this leading block
    base_rate: float = 5.0      # Hz
    peak_rate: float = 60.0     # Hz
    window: float = 100.0       # ms counting window
    jitter: float = 0.35        # fraction of a prototype's active inputs swapped per sample


@dataclass
class TaskData:
    spec: TaskSpec
    x_train: np.ndarray
    y_train: np.ndarray    # local class index 0..n_classes-1
    x_test: np.ndarray
    y_test: np.ndarray


def make_task(spec: TaskSpec, cfg: PatternConfig | None = None) -> TaskData:
    """Poisson spike counts around sparse class prototypes, scaled to rates in units of 100 Hz."""
    cfg = cfg or PatternConfig()
    rng = as_generator(check_seed(spec.seed), "continual-task", spec.task_id)
    protos = []
    for _ in range(spec.n_classes):
        p = np.full(cfg.n_inputs, cfg.base_rate)
        p[rng.choice(min(cfg.shared_pool, cfg.n_inputs), cfg.active_inputs, replace=False)] = cfg.peak_rate
        protos.append(p)

    def sample(n_per_class):
        xs, ys = [], []
        for k, proto in enumerate(protos):
            for _ in range(n_per_class):
                rates = proto.copy()
                on = np.flatnonzero(rates == cfg.peak_rate)
                off = np.flatnonzero(rates != cfg.peak_rate)
                n_swap = int(round(cfg.jitter * on.size))
                rates[rng.choice(on, n_swap, replace=False)] = cfg.base_rate
                rates[rng.choice(off, n_swap, replace=False)] = cfg.peak_rate
                counts = rng.poisson(rates * cfg.window / 1000.0)
                xs.append(counts / cfg.window * 1000.0 / 100.0)
                ys.append(k)
        return np.array(xs), np.array(ys)

    x_tr, y_tr = sample(spec.n_train)
    x_te, y_te = sample(spec.n_test)
    return TaskData(spec, x_tr, y_tr, x_te, y_te)


def benchmark_tasks(seed: int = 0, n_tasks: int = 3, n_classes: int = 4,
                    cfg: PatternConfig | None = None) -> list[TaskData]:
    return [make_task(TaskSpec(t, n_classes, seed), cfg) for t in range(n_tasks)]


@dataclass(frozen=True)
class GrowthConfig:
    neurons_per_task: int = 32
    reuse: bool = True
    prune_inactivity_epochs: int = 3
    prune_rate_threshold: float = 1.0   # Hz

    def __post_init__(self):
        if self.neurons_per_task < 1:
            raise ValueError("neurons_per_task must be >= 1")
        if self.prune_inactivity_epochs < 1 or self.prune_rate_threshold < 0:
            raise ValueError("pruning thresholds must be >= 0 (window >= 1)")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 40
    lr: float = 0.2
    batch: int = 24
    rate_gain: float = 20.0         # Hz per unit of rectified drive
    init_scale: float = 0.25
    init_bias: float = -0.2
    importance_strength: float = 10.0
    weight_decay: float = 0.03      # L2 on hidden weights, per step
    use_importance: bool = True


@dataclass
class ImportanceMap:
    """Hebbian importance per incoming hidden weight (input and reuse edges)."""

    w_in: np.ndarray
    w_reuse: np.ndarray
    bias: np.ndarray
    coactivity_in: np.ndarray | None = None
    coactivity_reuse: np.ndarray | None = None


@dataclass
class PruneStats:
    grown: int
    pruned: int
    indices: list[int] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.pruned / self.grown if self.grown else 0.0


class GrowingNetwork:
    """Hidden blocks grown per task, a reuse matrix between blocks, one readout per task."""

    def __init__(self, n_inputs: int, growth: GrowthConfig | None = None, train: TrainConfig | None = None,
                 seed: int = 0, base: int = 0):
        self.n_inputs = int(n_inputs)
        self.growth = growth or GrowthConfig()
        self.cfg = train or TrainConfig()
        self.seed = check_seed(seed)
        self.w_in = np.zeros((0, self.n_inputs))
        self.bias = np.zeros(0)
        self.w_reuse = np.zeros((0, 0))
        self.owner = np.zeros(0, dtype=int)
        self.alive = np.zeros(0, dtype=bool)
        self.heads: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self.importance = ImportanceMap(np.zeros((0, self.n_inputs)), np.zeros((0, 0)), np.zeros(0))
        self.tasks: list[int] = []
        if base:
            self._add_units(base, owner=-1)

    @property
    def size(self) -> int:
        return int(self.alive.sum())

    @property
    def grown(self) -> np.ndarray:
        return np.flatnonzero(self.owner >= 0)

    def _add_units(self, n: int, owner: int, reuse: bool = False) -> None:
        c = self.cfg
        rng = as_generator(self.seed, "grow", owner)
        old = self.w_in.shape[0]
        w_new = c.init_scale * rng.standard_normal((n, self.n_inputs))
        self.w_in = np.vstack([self.w_in, w_new])
        self.bias = np.concatenate([self.bias, np.full(n, c.init_bias)])
        reuse_rows = np.zeros((n, old))
        if reuse and old:
            reuse_rows[:, self.alive] = 0.1 * c.init_scale * rng.standard_normal((n, int(self.alive.sum())))
        w_reuse = np.zeros((old + n, old + n))
        w_reuse[:old, :old] = self.w_reuse
        w_reuse[old:, :old] = reuse_rows
        self.w_reuse = w_reuse
        self.owner = np.concatenate([self.owner, np.full(n, owner)])
        self.alive = np.concatenate([self.alive, np.ones(n, dtype=bool)])
        imp = self.importance
        self.importance = ImportanceMap(np.vstack([imp.w_in, np.zeros((n, self.n_inputs))]),
                                        np.pad(imp.w_reuse, ((0, n), (0, n))), np.pad(imp.bias, (0, n)))

    def add_head(self, task: int, n_classes: int) -> None:
        self.heads[task] = (np.zeros((n_classes, self.w_in.shape[0])), np.zeros(n_classes))
        self.tasks.append(task)

    def _pad_heads(self) -> None:
        n = self.w_in.shape[0]
        for t, (w, b) in self.heads.items():
            if w.shape[1] < n:
                self.heads[t] = (np.pad(w, ((0, 0), (0, n - w.shape[1]))), b)

    # ---------------------------------------------------------------- forward

    def _blocks(self) -> list[np.ndarray]:
        order = sorted(set(self.owner.tolist()))
        return [np.flatnonzero(self.owner == o) for o in order]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Drive ``u`` and rates ``r`` (Hz) of all hidden units for a batch."""
        x = np.atleast_2d(x)
        n = self.w_in.shape[0]
        u = np.zeros((x.shape[0], n))
        r = np.zeros((x.shape[0], n))
        w_in = self.w_in * self.alive[:, None]
        for idx in self._blocks():
            u[:, idx] = x @ w_in[idx].T + self.bias[idx] + (r / self.cfg.rate_gain) @ self.w_reuse[idx].T
            r[:, idx] = self.cfg.rate_gain * np.maximum(u[:, idx], 0.0) * self.alive[idx]
        return u, r

    def readout_mask(self, task: int) -> np.ndarray:
        """Units a task's readout may use: its own block and those grown before it."""
        own = self.owner <= task if self.owner.size and self.owner.min() >= 0 else np.ones(self.owner.size, bool)
        return own & self.alive

    def logits(self, x: np.ndarray, task: int) -> np.ndarray:
        _, r = self.forward(x)
        w, b = self.heads[task]
        return (r * self.readout_mask(task)) @ w.T / self.cfg.rate_gain + b

    def predict(self, x: np.ndarray, task: int) -> np.ndarray:
        return np.argmax(self.logits(x, task), axis=1)

    def accuracy(self, data: TaskData) -> float:
        return float(np.mean(self.predict(data.x_test, data.spec.task_id) == data.y_test))

    def rates(self, x: np.ndarray) -> np.ndarray:
        """Mean firing rate per hidden unit over a batch (Hz)."""
        return self.forward(x)[1].mean(axis=0)

    # ---------------------------------------------------------------- learning

    def _step(self, x, y, task: int, lr: float, train_mask: np.ndarray, scale_in, scale_reuse, scale_bias) -> None:
        c = self.cfg
        u, r = self.forward(x)
        mask = self.readout_mask(task)
        w, b = self.heads[task]
        rm = r * mask / c.rate_gain
        z = rm @ w.T + b
        z -= z.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        p[np.arange(len(y)), y] -= 1.0
        p /= len(y)
        grad_w = p.T @ rm
        grad_b = p.sum(axis=0)
        dr = (p @ w) * mask / c.rate_gain
        # back through the blocks in reverse order of growth
        du = np.zeros_like(u)
        for idx in reversed(self._blocks()):
            du[:, idx] = dr[:, idx] * c.rate_gain * (u[:, idx] > 0) * self.alive[idx]
            dr += du[:, idx] @ self.w_reuse[idx] / c.rate_gain
        g_in = du.T @ x
        g_bias = du.sum(axis=0)
        g_reuse = du.T @ (r / c.rate_gain)
        rows = train_mask[:, None]
        g_in = g_in + c.weight_decay * self.w_in
        g_reuse = g_reuse + c.weight_decay * self.w_reuse
        self.w_in -= lr * g_in * scale_in * rows
        self.bias -= lr * g_bias * scale_bias * train_mask
        self.w_reuse -= lr * g_reuse * scale_reuse * rows * (self.w_reuse != 0)
        self.heads[task] = (w - lr * grad_w, b - lr * grad_b)

    def train_task(self, data: TaskData, epochs: int | None = None, train_old: bool = True,
                   rng=None) -> list[np.ndarray]:
        """Minibatch training of the task readout and hidden units.

        Returns the per-epoch mean firing rate of every hidden unit on the
        task's training data (the activity log used for pruning).
        """
        c = self.cfg
        task = data.spec.task_id
        rng = as_generator(rng if rng is not None else self.seed, "train", task)
        if train_old:
            train_mask = self.alive.copy()
        else:
            train_mask = self.alive & (self.owner == self.owner.max())
        if c.use_importance:
            scale_in = 1.0 / (1.0 + self.importance.w_in)
            scale_reuse = 1.0 / (1.0 + self.importance.w_reuse)
            scale_bias = 1.0 / (1.0 + self.importance.bias)
        else:
            scale_in = np.ones_like(self.w_in)
            scale_reuse = np.ones_like(self.w_reuse)
            scale_bias = np.ones_like(self.bias)
        log = []
        n = data.x_train.shape[0]
        for _ in range(c.epochs if epochs is None else epochs):
            order = rng.permutation(n)
            for s in range(0, n, c.batch):
                sel = order[s:s + c.batch]
                self._step(data.x_train[sel], data.y_train[sel], task, c.lr, train_mask, scale_in, scale_reuse, scale_bias)
            log.append(self.rates(data.x_train))
        return log


# ----------------------------------------------------------------------
# operations


def grow_for_task(net: GrowingNetwork, task: TaskSpec, cfg: GrowthConfig | None = None) -> GrowingNetwork:
    """Add a block of units for ``task`` plus its readout."""
    cfg = cfg or net.growth
    if task.task_id in net.heads:
        raise ValueError(f"task {task.task_id} already has a pathway")
    net._add_units(cfg.neurons_per_task, owner=task.task_id, reuse=cfg.reuse)
    net._pad_heads()
    net.add_head(task.task_id, task.n_classes)
    return net


def wake_importance(net: GrowingNetwork, data: TaskData, accumulate: bool = True) -> ImportanceMap:
    """Hebbian co-activity of every incoming hidden synapse over the task data.

    Unnormalised co-activity is ``sum_samples pre * post``; importance is
    co-activity divided by its mean over active synapses, times
    ``importance_strength``, so typical task synapses land near that value.
    """
    _, r = net.forward(data.x_train)
    post = r / net.cfg.rate_gain
    co_in = post.T @ data.x_train
    co_reuse = (post.T @ (r / net.cfg.rate_gain)) * (net.w_reuse != 0)
    co_bias = post.sum(axis=0)     # the bias sees a constant presynaptic partner
    active = np.concatenate([co_in[co_in > 0], co_reuse[co_reuse > 0]])
    ref = active.mean() if active.size else 1.0
    k = net.cfg.importance_strength / ref
    imp = ImportanceMap(k * co_in, k * co_reuse, k * co_bias, co_in, co_reuse)
    if accumulate:
        old = net.importance
        imp = ImportanceMap(imp.w_in + old.w_in, imp.w_reuse + old.w_reuse, imp.bias + old.bias, co_in, co_reuse)
    net.importance = imp
    return net.importance


def prune_inactive(net: GrowingNetwork, activity_log: list[np.ndarray],
                   cfg: GrowthConfig | None = None) -> tuple[GrowingNetwork, PruneStats]:
    """Remove grown units silent (below threshold) over the last ``prune_inactivity_epochs`` epochs.

    Units carrying importance for an earlier task are kept.
    """
    cfg = cfg or net.growth
    if len(activity_log) < cfg.prune_inactivity_epochs:
        raise ValueError("activity log is shorter than the inactivity window")
    grown = net.grown
    n = net.w_in.shape[0]
    recent = np.array([np.pad(a, (0, n - a.size)) for a in activity_log[-cfg.prune_inactivity_epochs:]])
    silent = np.all(recent < cfg.prune_rate_threshold, axis=0)
    current = net.owner.max() if net.owner.size else -1
    protected = (net.owner < current) & (net.importance.w_in.sum(axis=1) > 0)
    victims = [int(i) for i in grown if net.alive[i] and silent[i] and not protected[i]]
    net.alive[victims] = False
    return net, PruneStats(int(net.alive[grown].sum() + len(victims)), len(victims), victims)


@dataclass
class Snapshot:
    task: int
    patterns: np.ndarray    # class-mean input activity
    labels: np.ndarray


def take_snapshot(data: TaskData) -> Snapshot:
    k = data.spec.n_classes
    means = np.array([data.x_train[data.y_train == c].mean(axis=0) for c in range(k)])
    return Snapshot(data.spec.task_id, means, np.arange(k))


def homeostatic_rescale(net: GrowingNetwork, patterns: np.ndarray, target_rate: float) -> float:
    """Scale every unit's drive so the mean rate on ``patterns`` hits ``target_rate``.

    Rectified units are positively homogeneous, so scaling input weights,
    biases and readout biases by one factor scales all rates and logits
    together and leaves every decision unchanged.
    """
    mean = float(net.rates(patterns)[net.alive].mean()) if net.alive.any() else 0.0
    if mean <= 0:
        return 1.0
    s = target_rate / mean
    net.w_in *= s
    net.bias *= s
    for t, (w, b) in net.heads.items():
        net.heads[t] = (w, b * s)
    return s


def sleep_consolidate(net: GrowingNetwork, snapshots: list[Snapshot], epochs: int = 20,
                      target_rate: float = 10.0, lr: float = 0.02) -> GrowingNetwork:
    """Offline replay of stored class-mean patterns with homeostatic rescaling.

    Each epoch first rescales global activity toward ``target_rate`` and then
    replays every snapshot, nudging that task's readout toward its stored
    labels.  No external data enters.
    """
    if not snapshots:
        raise ValueError("sleep needs at least one stored snapshot")
    if epochs <= 0:
        return net
    patterns = np.vstack([s.patterns for s in snapshots])
    for _ in range(epochs):
        homeostatic_rescale(net, patterns, target_rate)
        for snap in snapshots:
            _, r = net.forward(snap.patterns)
            mask = net.readout_mask(snap.task)
            w, b = net.heads[snap.task]
            rm = r * mask / net.cfg.rate_gain
            z = rm @ w.T + b
            z -= z.max(axis=1, keepdims=True)
            p = np.exp(z)
            p /= p.sum(axis=1, keepdims=True)
            p[np.arange(len(snap.labels)), snap.labels] -= 1.0
            net.heads[snap.task] = (w - lr * p.T @ rm, b - lr * p.sum(axis=0))
    return net


def evaluate_forgetting(acc_matrix) -> dict:
    """Average forgetting from ``acc_matrix[i][j]`` = accuracy on task j after training task i.

    Forgetting of task j is its peak accuracy minus its final accuracy,
    averaged over all tasks but the last (which cannot have been forgotten
    yet).  Values are in accuracy points (percent).
    """
    m = np.array(acc_matrix, dtype=float)
    n = m.shape[0]
    if n <= 1:
        return {"per_task": [0.0] * n, "average": 0.0}
    per = []
    for j in range(n - 1):
        col = m[j:, j]
        per.append(float(100.0 * (col.max() - col[-1])))
    return {"per_task": per + [0.0], "average": float(np.mean(per))}


# ----------------------------------------------------------------------
# benchmark pipelines


@dataclass
class ContinualResult:
    method: str
    acc_matrix: list[list[float]]
    forgetting: dict
    prune: list[dict] = field(default_factory=list)
    sleep: list[dict] = field(default_factory=list)
    final_size: int = 0


def _row(net: GrowingNetwork, tasks: list[TaskData], upto: int) -> list[float]:
    return [net.accuracy(tasks[j]) if j <= upto else math.nan for j in range(len(tasks))]


def run_full_method(tasks: list[TaskData], seed: int = 0, growth: GrowthConfig | None = None,
                    train: TrainConfig | None = None, sleep_epochs: int = 20) -> ContinualResult:
    """Grow, train with importance scaling, prune, then sleep after every task."""
    growth = growth or GrowthConfig()
    net = GrowingNetwork(tasks[0].x_train.shape[1], growth, train, seed)
    snapshots: list[Snapshot] = []
    matrix, prunes, sleeps = [], [], []
    for i, data in enumerate(tasks):
        grow_for_task(net, data.spec, growth)
        log = net.train_task(data)
        before = net.accuracy(data)
        net, stats = prune_inactive(net, log, growth)
        prunes.append({"task": i, "grown": stats.grown, "pruned": stats.pruned,
                       "fraction": stats.fraction, "acc_before": before, "acc_after": net.accuracy(data)})
        wake_importance(net, data)
        snapshots.append(take_snapshot(data))
        if i > 0:
            old_before = [net.accuracy(tasks[j]) for j in range(i)]
            sleep_consolidate(net, snapshots, sleep_epochs)
            old_after = [net.accuracy(tasks[j]) for j in range(i)]
            sleeps.append({"task": i, "old_before": old_before, "old_after": old_after})
        matrix.append(_row(net, tasks, i))
    return ContinualResult("dsd", matrix, evaluate_forgetting(_lower(matrix)), prunes, sleeps, net.size)


def run_naive(tasks: list[TaskData], seed: int = 0, growth: GrowthConfig | None = None,
              train: TrainConfig | None = None) -> ContinualResult:
    """Fixed network of the same final size, trained task after task with no protection."""
    growth = growth or GrowthConfig()
    train = train or TrainConfig()
    plain = TrainConfig(**{**train.__dict__, "use_importance": False})
    net = GrowingNetwork(tasks[0].x_train.shape[1], growth, plain, seed,
                         base=growth.neurons_per_task * len(tasks))
    matrix = []
    for i, data in enumerate(tasks):
        net.add_head(data.spec.task_id, data.spec.n_classes)
        net.train_task(data)
        matrix.append(_row(net, tasks, i))
    return ContinualResult("naive", matrix, evaluate_forgetting(_lower(matrix)), final_size=net.size)


def _lower(matrix):
    # nan above the diagonal is never read by evaluate_forgetting
    return [[0.0 if math.isnan(v) else v for v in row] for row in matrix]


def run_benchmark(seed: int = 0, growth: GrowthConfig | None = None, train: TrainConfig | None = None,
                  patterns: PatternConfig | None = None, sleep_epochs: int = 20) -> dict:
    """Full method and naive baseline on the 3-task sequence; JSON-ready summary."""
    tasks = benchmark_tasks(check_seed(seed), cfg=patterns)
    full = run_full_method(tasks, seed, growth, train, sleep_epochs)
    naive = run_naive(tasks, seed, growth, train)
    grown = (growth or GrowthConfig()).neurons_per_task * len(tasks)
    pruned = sum(p["pruned"] for p in full.prune)
    sleep_deltas = [100.0 * (a - b) for s in full.sleep for a, b in zip(s["old_after"], s["old_before"])]
    return {
        "full_forgetting": full.forgetting["average"],
        "naive_forgetting": naive.forgetting["average"],
        "full_acc_matrix": full.acc_matrix,
        "naive_acc_matrix": naive.acc_matrix,
        "pruned_fraction": pruned / grown,
        "prune_cost_max": max(100.0 * (p["acc_before"] - p["acc_after"]) for p in full.prune),
        "sleep_min_delta": min(sleep_deltas) if sleep_deltas else 0.0,
        "final_size": full.final_size,
    }

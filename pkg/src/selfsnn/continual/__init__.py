"""Continual learning: per-task growth, inactivity pruning, importance and sleep consolidation."""

from .learner import (
    ContinualResult,
    GrowingNetwork,
    GrowthConfig,
    ImportanceMap,
    PatternConfig,
    PruneStats,
    Snapshot,
    TaskData,
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
    run_naive,
    sleep_consolidate,
    take_snapshot,
    wake_importance,
)

__all__ = [
    "ContinualResult",
    "GrowingNetwork",
    "GrowthConfig",
    "ImportanceMap",
    "PatternConfig",
    "PruneStats",
    "Snapshot",
    "TaskData",
    "TaskSpec",
    "TrainConfig",
    "benchmark_tasks",
    "evaluate_forgetting",
    "grow_for_task",
    "homeostatic_rescale",
    "make_task",
    "prune_inactive",
    "run_benchmark",
    "run_full_method",
    "run_naive",
    "sleep_consolidate",
    "take_snapshot",
    "wake_importance",
]

from __future__ import annotations

import numpy as np

from ..rng import as_generator

TIE_RULES = ("lowest", "random")


def wta_select(activities, tie_rule: str = "lowest", rng=None) -> int:
    """Winner-takes-all over population activities (e.g. spike counts).

    Ties go to the lowest index, or to a uniformly chosen tied index when
    ``tie_rule == "random"`` (drawn from ``rng``, a Generator or seed).
    """
    act = np.asarray(activities, dtype=float).reshape(-1)
    if act.size == 0:
        raise ValueError("wta_select needs at least one activity")
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    winners = np.flatnonzero(act == act.max())
    if tie_rule == "lowest" or winners.size == 1:
        return int(winners[0])
    gen = as_generator(rng, "wta")
    return int(winners[gen.integers(winners.size)])

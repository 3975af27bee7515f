"""Declarative conditioning protocols and the phenomena they must reproduce.

A protocol is a list of phases.  Each phase is a dict::

    {"block": [["A", true], ["A", "X", false]], "repeat": 30, "learn": true}
    {"rest": 1440}
    {"probe": ["B", "X"], "repeat": 5, "tag": "BX"}

``block`` entries are ``[*stimuli, us]`` and run in order, ``repeat`` times.
Probes run CS-alone trials without plasticity and store the mean CR under
``tag``.  Phases may carry a ``"until"`` criterion (``"cr>=0.8"`` or
``"cr<=0.2"``) that stops the phase early once the running mean over the
last ``window`` block trials satisfies it; the trial count is recorded under
``tag``.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .conditioning import ConditioningCircuit, ConditioningConfig

CRITERION_WINDOW = 3
_OPS = {">=": operator.ge, "<=": operator.le}


@dataclass
class ProtocolRun:
    """CR trace of every block trial plus probe means and phase trial counts."""

    trace: list[dict] = field(default_factory=list)
    probes: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int | None] = field(default_factory=dict)
    marks: dict[str, int] = field(default_factory=dict)

    def crs(self, phase: str | None = None) -> np.ndarray:
        return np.array([r["cr"] for r in self.trace if phase is None or r["phase"] == phase])


def _parse_until(text: str):
    text = text.replace(" ", "")
    for sym, op in _OPS.items():
        if sym in text:
            key, value = text.split(sym)
            if key != "cr":
                raise ValueError(f"criterion must test 'cr', got {text!r}")
            return op, float(value)
    raise ValueError(f"cannot parse criterion {text!r}")


def run_protocol(circuit: ConditioningCircuit, phases: list[dict], interval: float = 200.0) -> ProtocolRun:
    out = ProtocolRun()
    for i, phase in enumerate(phases):
        tag = phase.get("tag", f"phase{i}")
        if "rest" in phase:
            circuit.rest(float(phase["rest"]))
            continue
        if "probe" in phase:
            crs = [circuit.trial(phase["probe"], False, interval, learn=False).cr
                   for _ in range(int(phase.get("repeat", 1)))]
            out.probes[tag] = float(np.mean(crs))
            continue
        block = phase["block"]
        repeat = int(phase.get("repeat", 1))
        if repeat < 1:
            raise ValueError("trial_count must be >= 1")
        learn = bool(phase.get("learn", True))
        until = _parse_until(phase["until"]) if "until" in phase else None
        window = int(phase.get("window", CRITERION_WINDOW))
        out.marks[tag] = len(out.trace)
        scored: list[float] = []
        reached = None
        n = 0
        for _ in range(repeat):
            for item in block:
                *stimuli, us = item
                res = circuit.trial(stimuli or None, bool(us), interval, learn=learn)
                n += 1
                out.trace.append({"phase": tag, "trial": n, "stimuli": "".join(stimuli),
                                  "us": bool(us), "cr": res.cr, "ipn": res.ipn_count, "pu": res.pu_count})
                if item is block[0]:
                    scored.append(res.cr)
            if until and reached is None and len(scored) >= window:
                op, value = until
                if op(float(np.mean(scored[-window:])), value):
                    reached = len(scored)
                    if phase.get("stop", True):
                        break
        if until:
            out.counts[tag] = reached
    return out


# ----------------------------------------------------------------------
# phenomenon scripts

ACQUISITION = [
    {"probe": ["A"], "repeat": 5, "tag": "naive"},
    {"block": [["A", True]], "repeat": 50, "tag": "acq", "until": "cr>=0.8", "stop": False},
    {"probe": ["C"], "repeat": 5, "tag": "unpaired"},
]
EXTINCTION = [
    {"block": [["A", True]], "repeat": 50, "tag": "acq"},
    {"block": [["A", False]], "repeat": 50, "tag": "ext", "until": "cr<=0.2", "stop": False},
]
SAVINGS = [
    {"block": [["A", True]], "repeat": 50, "tag": "acq", "until": "cr>=0.8", "stop": False},
    {"block": [["A", False]], "repeat": 50, "tag": "ext", "until": "cr<=0.2"},
    {"block": [["A", True]], "repeat": 50, "tag": "reacq", "until": "cr>=0.8"},
]
SPONTANEOUS_RECOVERY = [
    {"block": [["A", True]], "repeat": 50, "tag": "acq"},
    {"block": [["A", False]], "repeat": 50, "tag": "ext", "until": "cr<=0.1"},
    {"probe": ["A"], "repeat": 5, "tag": "post_ext"},
    {"rest": 1440},
    {"probe": ["A"], "repeat": 5, "tag": "post_rest"},
]
BLOCKING = [
    {"block": [["A", True]], "repeat": 50, "tag": "pre"},
    {"block": [["A", "B", True]], "repeat": 50, "tag": "compound"},
    {"probe": ["B"], "repeat": 5, "tag": "B"},
]
BLOCKING_CONTROL = [
    {"block": [["C", True]], "repeat": 50, "tag": "pre"},
    {"block": [["A", "B", True]], "repeat": 50, "tag": "compound"},
    {"probe": ["B"], "repeat": 5, "tag": "B"},
]
CONDITIONED_INHIBITION = [
    {"block": [["A", True], ["B", True]], "repeat": 30, "tag": "excitors"},
    {"block": [["A", "X", False], ["A", True], ["B", True]], "repeat": 40, "tag": "discrimination"},
    {"probe": ["B"], "repeat": 5, "tag": "B"},
    {"probe": ["B", "X"], "repeat": 5, "tag": "BX"},
    {"probe": ["B", "C"], "repeat": 5, "tag": "BC"},
]


def _moving_average(x, w):
    x = np.asarray(x, dtype=float)
    if x.size < w:
        return x.copy()
    return np.convolve(x, np.ones(w) / w, mode="valid")


def _check_acquisition(runs):
    r = runs["main"]
    crs = r.crs("acq")
    ma = _moving_average(crs, 10)
    rising = bool(np.all(np.diff(ma) >= -0.1)) and ma[-1] > ma[0]
    metrics = {"naive_cr": r.probes["naive"], "trials_to_criterion": r.counts["acq"],
               "final_cr": float(crs[-5:].mean()), "unpaired_cr": r.probes["unpaired"],
               "moving_average_rising": rising}
    ok = (r.probes["naive"] < 0.1 and r.counts["acq"] is not None and r.counts["acq"] <= 50
          and rising and r.probes["unpaired"] < 0.1)
    return ok, metrics


def _check_extinction(runs):
    r = runs["main"]
    n = r.counts["ext"]
    metrics = {"acquired_cr": float(r.crs("acq")[-5:].mean()), "trials_to_extinction": n,
               "final_cr": float(r.crs("ext")[-5:].mean())}
    return (metrics["acquired_cr"] >= 0.8 and n is not None and n <= 50), metrics


def _check_savings(runs):
    r = runs["main"]
    first, second = r.counts["acq"], r.counts["reacq"]
    metrics = {"acquisition_trials": first, "reacquisition_trials": second,
               "extinguished_cr": float(r.crs("ext")[-CRITERION_WINDOW:].mean())}
    ok = (first is not None and second is not None and second <= 0.5 * first
          and metrics["extinguished_cr"] <= 0.2)
    return ok, metrics


def _check_spontaneous(runs):
    r = runs["main"]
    before, after = r.probes["post_ext"], r.probes["post_rest"]
    metrics = {"post_extinction_cr": before, "post_rest_cr": after, "rebound": after - before}
    return (before <= 0.2 and after - before >= 0.2), metrics


def _check_blocking(runs):
    blocked, control = runs["main"].probes["B"], runs["control"].probes["B"]
    metrics = {"blocked_cr": blocked, "control_cr": control}
    return (blocked <= 0.3 and control >= 0.8), metrics


def _check_inhibition(runs):
    p = runs["main"].probes
    metrics = {"B": p["B"], "BX": p["BX"], "BC": p["BC"]}
    # X must cut the response to a separately trained excitor; a novel
    # stimulus (C) must not, so the drop is inhibition and not distraction
    ok = p["B"] >= 0.8 and p["BX"] <= 0.5 * p["B"] and p["BC"] >= 0.8
    return ok, metrics


@dataclass(frozen=True)
class Phenomenon:
    name: str
    protocols: dict[str, list[dict]]
    check: Callable


PHENOMENA: dict[str, Phenomenon] = {
    p.name: p
    for p in [
        Phenomenon("acquisition", {"main": ACQUISITION}, _check_acquisition),
        Phenomenon("extinction", {"main": EXTINCTION}, _check_extinction),
        Phenomenon("reacquisition-savings", {"main": SAVINGS}, _check_savings),
        Phenomenon("spontaneous-recovery", {"main": SPONTANEOUS_RECOVERY}, _check_spontaneous),
        Phenomenon("blocking", {"main": BLOCKING, "control": BLOCKING_CONTROL}, _check_blocking),
        Phenomenon("conditioned-inhibition", {"main": CONDITIONED_INHIBITION}, _check_inhibition),
    ]
}


def default_circuit_factory(seed: int, cfg: ConditioningConfig | None = None) -> ConditioningCircuit:
    return ConditioningCircuit(cfg=cfg or ConditioningConfig(), seed=seed)


def run_phenomenon(name: str, circuit_factory: Callable[[int], ConditioningCircuit] = default_circuit_factory,
                   seed: int = 0) -> dict:
    """Run the named protocol(s) on fresh circuits and check the defining inequality.

    Returns ``{"name", "pass", "metrics", "trace"}``; ``trace`` holds per-trial
    CR rows of the main protocol.
    """
    if name not in PHENOMENA:
        raise ValueError(f"unknown phenomenon {name!r}; implemented: {sorted(PHENOMENA)}")
    spec = PHENOMENA[name]
    runs = {}
    for i, (group, phases) in enumerate(spec.protocols.items()):
        circuit = circuit_factory((seed + 7919 * i) % 2**64)
        runs[group] = run_protocol(circuit, phases)
    ok, metrics = spec.check(runs)
    return {"name": name, "pass": bool(ok), "metrics": metrics, "trace": runs["main"].trace}

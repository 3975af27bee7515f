"""Inhibitory control of self/other evidence and false-belief reasoning.

The gate is a small spiking circuit: each input channel drives its own
relay copy of the output population; an inhibitory population per channel
fires only when a mode current opens it, and then cancels the relay spike
that arrives in the same step.  Belief inference replays the world history
through the other agent's perspective and passes both the self and the
other estimate through the gate, so the mode decides whose view answers
the question.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core.network import Network, simulate
from ..core.neuron import NeuronParams
from ..core.spikes import SpikeTrain, encode_rate_window
from ..rng import as_generator, check_seed
from .perspective import AgentPose, WorldState, line_cells, perspective_transform

MODES = ("infer-other", "act-self")
_FAST = NeuronParams(t_refractory=0.0)


@dataclass(frozen=True)
class GateConfig:
    relay_weight: float = 1.2        # input -> relay jump
    inhibitor_weight: float = 1.2    # input -> inhibitor jump (fires on every input spike)
    control_current: float = 0.5     # opens the inhibitor of the suppressed channel
    closed_current: float = -5.0     # keeps the other inhibitor silent
    inhibition: float = -3.0         # inhibitor -> relay jump


def _gate_network(n: int, mode: str, cfg: GateConfig) -> tuple[Network, dict]:
    net = Network()
    for name in ("self_in", "other_in", "self_relay", "other_relay", "self_inh", "other_inh"):
        net.add_population(name, n, _FAST)
    eye = np.eye(n)
    net.connect("self_in", "self_relay", cfg.relay_weight * eye, delay=2)
    net.connect("other_in", "other_relay", cfg.relay_weight * eye, delay=2)
    net.connect("self_in", "self_inh", cfg.inhibitor_weight * eye, delay=1)
    net.connect("other_in", "other_inh", cfg.inhibitor_weight * eye, delay=1)
    net.connect("self_inh", "self_relay", cfg.inhibition * eye, delay=1)
    net.connect("other_inh", "other_relay", cfg.inhibition * eye, delay=1)
    suppressed = "self_inh" if mode == "infer-other" else "other_inh"
    currents = {name: (cfg.control_current if name == suppressed else cfg.closed_current)
                for name in ("self_inh", "other_inh")}
    return net, currents


GATE_LATENCY = 2.0  # ms from input spike to relay spike


def inhibitory_gate(self_signal: SpikeTrain, other_signal: SpikeTrain, mode: str = "infer-other",
                    cfg: GateConfig | None = None, dt: float = 1.0) -> SpikeTrain:
    """Pass one channel and suppress the other.

    ``infer-other`` silences the self-related train, ``act-self`` the
    other-related one.  The output is re-aligned by the fixed relay latency
    and merges both relays channel by channel.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if self_signal.duration != other_signal.duration:
        raise ValueError("self and other trains must have the same duration")
    if self_signal.neuron_count != other_signal.neuron_count:
        raise ValueError("self and other trains must have the same neuron count")
    cfg = cfg or GateConfig()
    n, duration = self_signal.neuron_count, self_signal.duration
    if n == 0:
        return SpikeTrain.empty(0, duration)
    net, currents = _gate_network(n, mode, cfg)
    # run past the end so spikes in the last steps still reach the relays
    total = duration + GATE_LATENCY + dt
    pad = lambda s: SpikeTrain(n, total, s.times, s.indices)  # noqa: E731
    rec = simulate(net, {"self_in": pad(self_signal), "other_in": pad(other_signal), **currents}, total, dt)
    raster = np.maximum(rec.spikes["self_relay"].raster(dt), rec.spikes["other_relay"].raster(dt))
    shift = int(round(GATE_LATENCY / dt))
    steps = int(round(duration / dt))
    return SpikeTrain.from_raster(raster[shift:shift + steps], dt)


# ----------------------------------------------------------------------
# beliefs


@dataclass
class Belief:
    owner: str
    objects: dict = field(default_factory=dict)    # name -> cell or None (unknown)
    hazards: frozenset = field(default_factory=frozenset)

    def location(self, name: str):
        return self.objects.get(name)


def _replay(history: list[WorldState], owner: str) -> Belief:
    """Belief of ``owner`` from its own perception at every snapshot.

    Visible objects are seen in place.  A hidden object (inside a
    container) is only registered when the owner watches it arrive
    somewhere, or sees it at its first appearance.
    """
    belief = Belief(owner, {name: None for name in history[0].objects})
    hazards = set()
    prev = None
    for world in history:
        pose = world.agents.get(owner)
        if pose is None:
            raise ValueError(f"agent {owner!r} missing from a world snapshot")
        view = perspective_transform(world, pose)
        hazards |= view.hazards
        for name, cell in world.objects.items():
            if name not in view.objects:
                continue
            moved = prev is None or prev.objects.get(name) != cell
            if name not in world.hidden or moved:
                belief.objects[name] = cell
        prev = world
    belief.hazards = frozenset(hazards)
    return belief


def _location_train(cell, candidates: list, duration: float) -> SpikeTrain:
    values = np.zeros(len(candidates))
    if cell is not None:
        values[candidates.index(cell)] = 1.0
    return encode_rate_window(values, duration)


def infer_belief(history: list[WorldState], other: str, observer: str | None = None,
                 mode: str = "infer-other", window: float = 50.0) -> Belief:
    """What ``other`` believes after ``history``.

    Both the observer's own estimate (ground truth from the observer's
    replay, or the true state when no observer is named) and the
    replayed other-perspective estimate are rate coded over the candidate
    locations and gated; the surviving channel is decoded per object.
    """
    if not history:
        raise ValueError("history must contain at least one snapshot")
    other_view = _replay(history, other)
    if observer is None:
        final = history[-1]
        self_view = Belief("self", dict(final.objects), frozenset(final.hazards))
    else:
        self_view = _replay(history, observer)
    candidates = sorted({c for w in history for c in w.objects.values()})
    out = Belief(other, hazards=other_view.hazards if mode == "infer-other" else self_view.hazards)
    for name in history[0].objects:
        gated = inhibitory_gate(_location_train(self_view.location(name), candidates, window),
                                _location_train(other_view.location(name), candidates, window), mode)
        counts = gated.counts()
        out.objects[name] = candidates[int(np.argmax(counts))] if counts.sum() else None
    return out


# ----------------------------------------------------------------------
# scripted scenarios

SCENARIO_DIR = Path(__file__).with_name("scenarios")


def load_scenarios() -> dict[str, dict]:
    with open(SCENARIO_DIR / "false_belief.json") as fh:
        return json.load(fh)


FALSE_BELIEF_SCENARIOS = load_scenarios()


def _layout(seed: int, width: int, height: int):
    """Seeded container and agent placement: containers in the top half, agents on the bottom row."""
    rng = as_generator(seed, "false-belief", "layout")
    top = [(x, y) for y in range(height // 2) for x in range(width)]
    picks = rng.choice(len(top), size=3, replace=False)
    containers = [top[i] for i in picks]
    xs = rng.choice(width, size=2, replace=False)
    return containers, [(int(xs[0]), height - 1), (int(xs[1]), height - 1)]


def build_history(script: dict, seed: int = 0) -> list[WorldState]:
    """Expand a timeline script into world snapshots (one per event)."""
    width, height = script.get("size", [6, 6])
    containers, spots = _layout(seed, width, height)
    names = {"A": containers[0], "B": containers[1], "C": containers[2]}
    agents = {aid: AgentPose(spots[i], "up", 90.0) for i, aid in enumerate(script["agents"])}
    objects = {name: names[loc] for name, loc in script["objects"].items()}
    world = WorldState(width, height, objects=objects, hidden=frozenset(script.get("hidden", [])),
                       agents=agents)
    history = [world]
    for event in script["events"]:
        kind, *args = event
        if kind == "leave":
            world = world.with_agent(args[0], _presence(world.agents[args[0]], False))
        elif kind == "return":
            world = world.with_agent(args[0], _presence(world.agents[args[0]], True))
        elif kind == "move":
            world = WorldState(world.width, world.height, world.occluders,
                               {**world.objects, args[0]: names[args[1]]}, world.hidden,
                               world.hazards, world.agents)
        elif kind == "block":
            # occlude the agent's view of a container with the cell just before it
            pose = world.agents[args[0]]
            taken = set(names.values()) | {p.position for p in world.agents.values()}
            free = [c for c in line_cells(pose.position, names[args[1]])[1:-1] if c not in taken]
            if not free:
                raise ValueError("no free cell between agent and container to occlude")
            blocker = free[-1]
            world = WorldState(world.width, world.height, world.occluders | {blocker}, world.objects,
                               world.hidden, world.hazards, world.agents)
        else:
            raise ValueError(f"unknown event {kind!r}")
        history.append(world)
    return history


def _presence(pose: AgentPose, present: bool) -> AgentPose:
    return AgentPose(pose.position, pose.facing, pose.fov, present)


def run_false_belief_task(variant: str, with_tom: bool = True, seed: int = 0) -> dict:
    """Predict where the protagonist searches for the target object.

    Returns ``{"scenario", "with_tom", "prediction", "truth", "expected", "correct"}``
    with cells as ``[x, y]`` lists.
    """
    if variant not in FALSE_BELIEF_SCENARIOS:
        raise ValueError(f"unknown variant {variant!r}; registered: {sorted(FALSE_BELIEF_SCENARIOS)}")
    seed = check_seed(seed)
    script = FALSE_BELIEF_SCENARIOS[variant]
    history = build_history(script, seed)
    protagonist, target = script["protagonist"], script["target"]
    mode = "infer-other" if with_tom else "act-self"
    belief = infer_belief(history, protagonist, mode=mode)
    prediction = belief.location(target)
    truth = history[-1].objects[target]
    containers, _ = _layout(seed, *script.get("size", [6, 6]))
    names = {"A": containers[0], "B": containers[1], "C": containers[2]}
    expected = names[script["expected_with_tom" if with_tom else "expected_without_tom"]]
    return {"scenario": variant, "with_tom": bool(with_tom),
            "prediction": None if prediction is None else list(prediction),
            "truth": list(truth), "expected": list(expected), "correct": prediction == expected}


# ----------------------------------------------------------------------
# hazard warning


def straight_path(world: WorldState, pose: AgentPose, length: int | None = None) -> list:
    """Cells ahead of ``pose`` along its facing (rounded to the nearest grid axis)."""
    angle = round(pose.facing / 90.0) % 4
    dx, dy = [(1, 0), (0, 1), (-1, 0), (0, -1)][angle]
    x, y = pose.position
    out = []
    while length is None or len(out) < length:
        x, y = x + dx, y + dy
        if not world.on_grid((x, y)) or (x, y) in world.occluders:
            break
        out.append((x, y))
    return out


def warn_of_hazard(self_pose: AgentPose, other: AgentPose, world: WorldState, other_path=None) -> str:
    """``"warn"`` iff a hazard on the other's path is hidden from it but visible to self."""
    if not (self_pose.present and other.present):
        raise ValueError("both agents must be present")
    path = straight_path(world, other) if other_path is None else [tuple(c) for c in other_path]
    seen_by_other = perspective_transform(world, other).hazards
    seen_by_self = perspective_transform(world, self_pose).hazards
    for h in world.hazards:
        if h in path and h not in seen_by_other and h in seen_by_self:
            return "warn"
    return "no-warn"

"""Grid environment shared by the decision-making and navigation experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

ACTIONS = ("up", "right", "down", "left")
MOVES = {0: (0, -1), 1: (1, 0), 2: (0, 1), 3: (-1, 0)}


@dataclass
class GridWorld:
    """Rectangular grid; cells are ``(x, y)`` with ``0 <= x < width``.

    ``speed`` is the number of cells covered per action.  Moves are swept
    cell by cell, so a fast agent stops in front of an obstacle or wall
    instead of jumping over it, and takes the collision penalty.
    """

    width: int = 5
    height: int = 5
    start: tuple[int, int] = (0, 0)
    goal: tuple[int, int] = (4, 4)
    obstacles: frozenset = field(default_factory=frozenset)
    hazards: frozenset = field(default_factory=frozenset)
    step_reward: float = -0.01
    goal_reward: float = 1.0
    collision_penalty: float = -0.1
    hazard_penalty: float = -1.0
    timeout_penalty: float = 0.0
    speed: float = 1.0
    max_steps: int = 100

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must be at least 1x1")
        self.obstacles = frozenset(tuple(c) for c in self.obstacles)
        self.hazards = frozenset(tuple(c) for c in self.hazards)
        self.start = tuple(self.start)
        self.goal = tuple(self.goal)
        if not math.isfinite(self.speed) or self.speed < 1:
            raise ValueError("speed must be >= 1")
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.free(cell):
                raise ValueError(f"{name} {cell} must be a free on-grid cell")
        for r in (self.step_reward, self.goal_reward, self.collision_penalty, self.hazard_penalty,
                  self.timeout_penalty):
            if not math.isfinite(r):
                raise ValueError("rewards must be finite")
        self.reset()

    @property
    def n_states(self) -> int:
        return self.width * self.height

    def on_grid(self, cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def free(self, cell) -> bool:
        return self.on_grid(cell) and tuple(cell) not in self.obstacles

    def state_index(self, cell=None) -> int:
        x, y = self.agent if cell is None else cell
        return y * self.width + x

    def reset(self) -> int:
        self.agent = self.start
        self.steps = 0
        return self.state_index()

    def step(self, action: int):
        """Apply an action; returns ``(state, reward, done, info)``.

        ``info`` has ``collided``, ``reached_goal``, ``hazard`` and ``truncated``.
        """
        if action not in MOVES:
            raise ValueError(f"action must be one of {sorted(MOVES)}")
        dx, dy = MOVES[action]
        x, y = self.agent
        collided = False
        cells = int(round(self.speed))
        for _ in range(cells):
            nxt = (x + dx, y + dy)
            if not self.free(nxt):
                collided = True
                break
            x, y = nxt
            if nxt == self.goal or nxt in self.hazards:
                break
        self.agent = (x, y)
        self.steps += 1
        reward = self.step_reward
        if collided:
            reward += self.collision_penalty
        reached = self.agent == self.goal
        hazard = self.agent in self.hazards
        if reached:
            reward += self.goal_reward
        if hazard:
            reward += self.hazard_penalty
        truncated = not (reached or hazard) and self.steps >= self.max_steps
        if truncated:
            reward += self.timeout_penalty
        done = reached or hazard or truncated
        info = {"collided": collided, "reached_goal": reached, "hazard": hazard, "truncated": truncated}
        return self.state_index(), reward, done, info

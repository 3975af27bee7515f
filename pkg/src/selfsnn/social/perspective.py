"""World snapshots and what an agent can see in them.

Cells are unit squares centred on integer coordinates ``(x, y)``; ``y``
grows downward, so facing 270 degrees is "up".  A cell is visible when its
centre lies inside the viewer's field-of-view cone and the segment between
the two centres crosses the interior of no occluder cell.  Grazing an
occluder exactly at a corner does not block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

FACINGS = {"right": 0.0, "down": 90.0, "left": 180.0, "up": 270.0}

Cell = tuple[int, int]


@dataclass(frozen=True)
class AgentPose:
    position: Cell
    facing: float = 270.0       # degrees, 0 = +x, 90 = +y
    fov: float = 90.0           # half-angle of the view cone, degrees
    present: bool = True

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(int(c) for c in self.position))
        facing = FACINGS[self.facing] if isinstance(self.facing, str) else float(self.facing)
        object.__setattr__(self, "facing", facing % 360.0)
        if not 0 < self.fov <= 180:
            raise ValueError("fov half-angle must lie in (0, 180]")


@dataclass(frozen=True)
class WorldState:
    width: int
    height: int
    occluders: frozenset = field(default_factory=frozenset)
    objects: dict = field(default_factory=dict)     # name -> cell
    hidden: frozenset = field(default_factory=frozenset)  # objects seen only when they move
    hazards: frozenset = field(default_factory=frozenset)
    agents: dict = field(default_factory=dict)      # id -> AgentPose

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("world must be at least 1x1")
        object.__setattr__(self, "occluders", frozenset(tuple(c) for c in self.occluders))
        object.__setattr__(self, "hazards", frozenset(tuple(c) for c in self.hazards))
        object.__setattr__(self, "hidden", frozenset(self.hidden))
        object.__setattr__(self, "objects", {k: tuple(v) for k, v in self.objects.items()})
        for name, cell in list(self.objects.items()) + [(f"hazard {h}", h) for h in self.hazards]:
            if not self.on_grid(cell):
                raise ValueError(f"{name} at {cell} is off the grid")
        for aid, pose in self.agents.items():
            if not self.on_grid(pose.position):
                raise ValueError(f"agent {aid!r} at {pose.position} is off the grid")

    def on_grid(self, cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def cells(self):
        return [(x, y) for y in range(self.height) for x in range(self.width)]

    def with_agent(self, aid: str, pose: AgentPose) -> "WorldState":
        return replace(self, agents={**self.agents, aid: pose})


@dataclass(frozen=True)
class View:
    """The part of a world one agent perceives."""

    cells: frozenset
    objects: dict
    hazards: frozenset
    agents: frozenset

    @classmethod
    def empty(cls) -> "View":
        return cls(frozenset(), {}, frozenset(), frozenset())

    def sees(self, cell) -> bool:
        return tuple(cell) in self.cells


@lru_cache(maxsize=None)
def line_cells(a: Cell, b: Cell) -> tuple[Cell, ...]:
    """Cells whose interior the centre-to-centre segment ``a -> b`` crosses, in order.

    Integer grid walk: at an exact corner crossing the walk steps diagonally,
    so the two cells that only touch the segment at that corner are skipped.
    """
    (x0, y0), (x1, y1) = a, b
    nx, ny = abs(x1 - x0), abs(y1 - y0)
    sx = 1 if x1 > x0 else -1
    sy = 1 if y1 > y0 else -1
    x, y = x0, y0
    out = [(x, y)]
    ix = iy = 0
    while ix < nx or iy < ny:
        decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx
        if decision == 0:
            x += sx
            y += sy
            ix += 1
            iy += 1
        elif decision < 0:
            x += sx
            ix += 1
        else:
            y += sy
            iy += 1
        out.append((x, y))
    return tuple(out)


def line_of_sight(a: Cell, b: Cell, occluders) -> bool:
    return not any(c in occluders for c in line_cells(tuple(a), tuple(b))[1:-1])


def in_cone(viewer: AgentPose, cell: Cell) -> bool:
    dx = cell[0] - viewer.position[0]
    dy = cell[1] - viewer.position[1]
    if dx == 0 and dy == 0:
        return True
    if viewer.fov >= 180:
        return True
    f = math.radians(viewer.facing)
    cos_angle = (dx * math.cos(f) + dy * math.sin(f)) / math.hypot(dx, dy)
    return cos_angle >= math.cos(math.radians(viewer.fov)) - 1e-9


def perspective_transform(world: WorldState, viewer: AgentPose) -> View:
    """Cells, objects, hazards and agents visible to ``viewer``."""
    if not world.on_grid(viewer.position):
        raise ValueError(f"viewer at {viewer.position} is off the grid")
    if not viewer.present:
        return View.empty()
    if viewer.position in world.occluders:
        raise ValueError("viewer stands inside an occluder")
    cells = frozenset(c for c in world.cells()
                      if in_cone(viewer, c) and line_of_sight(viewer.position, c, world.occluders))
    objects = {k: v for k, v in world.objects.items() if v in cells}
    agents = frozenset(aid for aid, p in world.agents.items()
                       if p.present and p.position in cells and p.position != viewer.position)
    return View(cells, objects, frozenset(h for h in world.hazards if h in cells), agents)

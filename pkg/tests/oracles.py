"""Independent reference implementations used by several test modules."""

import itertools
import math

import numpy as np


def segment_crosses_interior(a, b, cell) -> bool:
    """Exact test: does the segment between cell centres ``a`` and ``b`` enter the open square ``cell``?

    Coordinates are doubled so centres are even and square edges odd integers;
    parameter bounds are compared as fractions by cross-multiplication.
    """
    (ax, ay), (bx, by) = (2 * a[0], 2 * a[1]), (2 * b[0], 2 * b[1])
    cx, cy = 2 * cell[0], 2 * cell[1]
    lo_num, lo_den = 0, 1      # entry parameter, starts at t = 0
    hi_num, hi_den = 1, 1      # exit parameter, starts at t = 1
    for p, d, c in ((ax, bx - ax, cx), (ay, by - ay, cy)):
        if d == 0:
            if not c - 1 < p < c + 1:
                return False
            continue
        t1, t2 = (c - 1 - p, d), (c + 1 - p, d)
        if d < 0:
            t1, t2 = (-t1[0], -d), (-t2[0], -d)
            t1, t2 = t2, t1
        if t1[0] * lo_den > lo_num * t1[1]:
            lo_num, lo_den = t1
        if t2[0] * hi_den < hi_num * t2[1]:
            hi_num, hi_den = t2
    return lo_num * hi_den < hi_num * lo_den


def crossed_cells(width, height):
    """For every ordered pair of cells, the set of other cells whose interior the centre segment enters."""
    cells = [(x, y) for y in range(height) for x in range(width)]
    out = {}
    for a in cells:
        for b in cells:
            out[a, b] = frozenset(c for c in cells
                                  if c not in (a, b) and segment_crosses_interior(a, b, c))
    return cells, out


def raycast_visible(cells, crossed, viewer, occluders):
    """Visible cells for a 360-degree viewer: nothing opaque strictly between."""
    return frozenset(c for c in cells if not (crossed[viewer, c] & occluders))


def occluder_sets(cells, max_occluders=2):
    for k in range(max_occluders + 1):
        for combo in itertools.combinations(cells, k):
            yield frozenset(combo)


def fov_oracle(viewer_pos, facing_deg, half_angle_deg, cell) -> bool:
    """Angle between facing and the direction to ``cell`` is at most the half-angle."""
    dx, dy = cell[0] - viewer_pos[0], cell[1] - viewer_pos[1]
    if dx == 0 and dy == 0:
        return True
    diff = abs((math.degrees(math.atan2(dy, dx)) - facing_deg + 180.0) % 360.0 - 180.0)
    return diff <= half_angle_deg + 1e-7


def hsic_cka(x, y) -> float:
    """Linear CKA from its Gram-matrix (HSIC) definition."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = x.shape[0]
    h = np.eye(n) - np.ones((n, n)) / n
    k, l = x @ x.T, y @ y.T

    def hsic(a, b):
        return float(np.trace(a @ h @ b @ h))

    return hsic(k, l) / math.sqrt(hsic(k, k) * hsic(l, l))


def best_coincidence(ra, rb, window):
    """Max over integer offsets |d| <= window of sum_t,n min(ra[t], rb[t - d]) (plain loops)."""
    steps, n = ra.shape
    best = 0
    for d in range(-window, window + 1):
        total = 0
        for t in range(steps):
            s = t - d
            if 0 <= s < steps:
                for k in range(n):
                    total += min(int(ra[t, k]), int(rb[s, k]))
        best = max(best, total)
    return best

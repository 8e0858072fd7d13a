"""Randomized small-geometry generator shared by the property suites."""

from __future__ import annotations

import random

from braidbench import geometry as geo

Voxel = tuple[int, int, int]


def _chebyshev(a: Voxel, b: Voxel) -> int:
    return max(abs(a[i] - b[i]) for i in range(3))


def _clear_of(cells, others, min_gap=2) -> bool:
    return all(_chebyshev(c, o) >= min_gap for c in cells for o in others)


def rect_ring(center: Voxel, du: int, dv: int, plane: str) -> set[Voxel]:
    """Axis-aligned rectangular ring of voxels around center."""
    cx, cy, cz = center
    cells = set()
    if plane == "xy":
        for x in range(cx - du, cx + du + 1):
            cells.add((x, cy - dv, cz))
            cells.add((x, cy + dv, cz))
        for y in range(cy - dv, cy + dv + 1):
            cells.add((cx - du, y, cz))
            cells.add((cx + du, y, cz))
    elif plane == "xz":
        for x in range(cx - du, cx + du + 1):
            cells.add((x, cy, cz - dv))
            cells.add((x, cy, cz + dv))
        for z in range(cz - dv, cz + dv + 1):
            cells.add((cx - du, cy, z))
            cells.add((cx + du, cy, z))
    else:
        for y in range(cy - du, cy + du + 1):
            cells.add((cx, y, cz - dv))
            cells.add((cx, y, cz + dv))
        for z in range(cz - dv, cz + dv + 1):
            cells.add((cx, cy - du, z))
            cells.add((cx, cy + du, z))
    return cells


def wired_geometry(rng: random.Random, ring_kind: str
                   ) -> tuple[geo.Geometry, str, str] | None:
    """A primal port wire plus two disjoint closed rings of ring_kind.

    Returns (geometry, ring1 id, ring2 id); None when placement failed.
    """
    L = rng.randrange(7, 9)
    box = geo.BoundingRegion((0, 0, 0), (12, 10, L))
    wx = 3
    wire_a = frozenset((wx, 4, z) for z in range(L))
    wire_b = frozenset((wx, 6, z) for z in range(L))
    solids = [
        geo.DefectSolid("wa", geo.PRIMAL, wire_a),
        geo.DefectSolid("wb", geo.PRIMAL, wire_b),
    ]
    placed: list[set[Voxel]] = [set(wire_a), set(wire_b)]
    ring_ids = []
    for k in range(2):
        for _attempt in range(40):
            plane = rng.choice(("xy", "xz", "yz"))
            du = rng.randrange(1, 3)
            dv = rng.randrange(1, 3)
            center = (
                rng.randrange(2, 10),
                rng.randrange(2, 8),
                rng.randrange(2, L - 2),
            )
            cells = rect_ring(center, du, dv, plane)
            if not all(box.contains(c) for c in cells):
                continue
            # walls need two cells of clearance for companion surfaces
            if any(c[a] < 1 or c[a] > box.hi[a] - 3 for c in cells for a in range(3)):
                continue
            same = [p for s, p in zip(solids, placed) if s.kind == ring_kind]
            if not _clear_of(cells, set().union(*same) if same else set()):
                continue
            if ring_kind == geo.PRIMAL and not _clear_of(cells, placed[0] | placed[1]):
                continue
            rid = f"ring{k}"
            solids.append(geo.DefectSolid(rid, ring_kind, frozenset(cells)))
            placed.append(cells)
            ring_ids.append(rid)
            break
        else:
            return None
    g = geo.Geometry(
        bounding_region=box,
        defects=tuple(solids),
        ports=(
            geo.Port("pi", "in", geo.PRIMAL, "input", "z-", ((wx, 4, 0), (wx, 6, 0))),
            geo.Port("po", "out", geo.PRIMAL, "output", "z+",
                     ((wx, 4, L - 1), (wx, 6, L - 1))),
        ),
    )
    if not geo.validate(g).ok:
        return None
    return g, ring_ids[0], ring_ids[1]


def l_path(start: Voxel, goal: Voxel) -> list[Voxel]:
    path = []
    pos = list(start)
    for axis in range(3):
        while pos[axis] != goal[axis]:
            pos[axis] += 1 if goal[axis] > pos[axis] else -1
            path.append(tuple(pos))
    return path


def bridge_path(rng: random.Random, g: geo.Geometry, a: str, b: str
                ) -> list[Voxel] | None:
    """L-shaped connecting path between two solids, clear of bystanders."""
    sa, sb = g.defect(a), g.defect(b)
    bystanders = {
        v for s in g.defects if s.id not in (a, b) for v in s.voxels
    }
    starts = sorted(sa.voxels)
    goals = sorted(sb.voxels)
    rng.shuffle(starts)
    rng.shuffle(goals)
    for s in starts[:8]:
        for t in goals[:8]:
            path = l_path(s, t)
            if not path:
                continue
            # trim cells already inside either solid
            trimmed = [v for v in path if v not in sa.voxels and v not in sb.voxels]
            if not trimmed:
                continue
            occupied = {v for sol in g.defects for v in sol.voxels if sol.kind == sa.kind}
            if any(v in occupied for v in trimmed):
                continue
            if not _clear_of(trimmed, bystanders):
                continue
            if not all(g.bounding_region.contains(v) for v in trimmed):
                continue
            if any(c[ax] < 1 or c[ax] > g.bounding_region.hi[ax] - 3
                   for c in trimmed for ax in range(3)):
                continue
            # must remain a connected 6-path from sa to sb
            prev = s
            ok = True
            for v in trimmed:
                if sum(abs(prev[i] - v[i]) for i in range(3)) != 1:
                    ok = False
                    break
                prev = v
            if ok:
                return trimmed
    return None

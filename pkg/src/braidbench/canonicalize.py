"""Canonical circuit-to-geometry lowering and topological signatures.

Every circuit qubit gets a lane: a pair of defect rails running along the
time axis (z) at a fixed x column, rails at y=4 and y=6.  CNOT controls
lower to primal lanes, targets to dual lanes (the circuit must be
bipartite in that sense).  Each CNOT is a braid: the target lane's near
rail leaves home, travels the bus row at y=2, spirals once around the
control lane's near rail across three time layers, and returns.  Joined
rail ends realize X-type caps on primal lanes and Z-type caps on dual
lanes; an injection terminates its pair in a pinch on the joint voxel.

The canonical output is deliberately uncompressed; compression belongs to
the rewrite engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import geometry as geo
from . import tableau as tb
from .errors import BraidbenchError, UnsupportedGate

RAIL_A = 4  # near rail row (braids wrap this one)
RAIL_B = 6
JOINT = 5
BUS = 2
LANE_X0 = 4
LANE_PITCH = 4
SLOT_PITCH = 4

Voxel = tuple[int, int, int]


@dataclass(frozen=True)
class LoweringPlan:
    """Lane and time-slot assignment of a circuit."""

    lanes: dict[str, int]  # qubit -> x column
    kinds: dict[str, str]  # qubit -> sublattice
    slots: dict[int, int]  # cnot gate index -> z of its braid's first layer


def assign_kinds(circuit: tb.CliffordCircuit) -> dict[str, str]:
    kinds: dict[str, str] = {}
    for g in circuit.gates:
        if g.name != "cnot":
            continue
        for q, kind in zip(g.qubits, (geo.PRIMAL, geo.DUAL)):
            if kinds.setdefault(q, kind) != kind:
                raise UnsupportedGate(
                    f"qubit {q!r} is both a CNOT control and a target; "
                    "lanes cannot be assigned a single sublattice"
                )
    for q in circuit.qubits:
        kinds.setdefault(q, geo.PRIMAL)
    return kinds


def plan(circuit: tb.CliffordCircuit) -> LoweringPlan:
    lanes = {q: LANE_X0 + LANE_PITCH * i for i, q in enumerate(circuit.qubits)}
    kinds = assign_kinds(circuit)
    slots: dict[int, int] = {}
    z = 3
    for i, g in enumerate(circuit.gates):
        if g.name == "cnot":
            slots[i] = z
            z += SLOT_PITCH
    return LoweringPlan(lanes=lanes, kinds=kinds, slots=slots)


def _steps(a: int, b: int) -> list[int]:
    """Integers from a to b, excluding a, including b."""
    if a == b:
        return []
    step = 1 if b > a else -1
    return list(range(a + step, b + step, step))


def _components(cells: set[Voxel]) -> list[set[Voxel]]:
    remaining = set(cells)
    out: list[set[Voxel]] = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        stack = [seed]
        while stack:
            v = stack.pop()
            for n in geo.neighbors(v):
                if n in remaining and n not in comp:
                    comp.add(n)
                    stack.append(n)
        remaining -= comp
        out.append(comp)
    return sorted(out, key=min)


def _wrap_cells(xa: int, xt: int, z0: int) -> list[Voxel]:
    """Voxel path of one braid excursion.

    The strand leaves its rail at column xt, rides the bus row to the far
    side of the control rail at column xa, climbs, and crosses back over
    the control pair's gap one layer later: a single open turn around the
    control rail, with start and end kept two cells apart everywhere.
    """
    s = 1 if xa < xt else -1
    path: list[Voxel] = [(xt, 3, z0), (xt, 2, z0)]
    path += [(x, 2, z0) for x in _steps(xt, xa - 2 * s)]
    path += [(xa - 2 * s, 3, z0), (xa - 2 * s, 4, z0)]
    path += [(xa - 2 * s, 4, z0 + 1)]
    path += [(xa - 2 * s, 4, z0 + 2), (xa - 2 * s, 5, z0 + 2)]
    path += [(x, 5, z0 + 2) for x in _steps(xa - 2 * s, xa + s)]
    path += [(xa + s, 4, z0 + 2), (xa + 2 * s, 4, z0 + 2)]
    path += [(xa + 2 * s, 3, z0 + 2), (xa + 2 * s, 2, z0 + 2)]
    path += [(x, 2, z0 + 2) for x in _steps(xa + 2 * s, xt)]
    path += [(xt, 3, z0 + 2)]
    return path


def lower(circuit: tb.CliffordCircuit) -> geo.Geometry:
    """Lower a supported circuit to its canonical defect geometry."""
    lp = plan(circuit)

    n_cnots = sum(1 for g in circuit.gates if g.name == "cnot")
    z_end = 3 + SLOT_PITCH * n_cnots
    z_max = z_end + 3

    inputs = set(circuit.input_qubits())
    outputs = set(circuit.output_qubits())
    starts = {q: 0 if q in inputs else 1 for q in circuit.qubits}
    ends = {q: z_max - 1 if q in outputs else z_end for q in circuit.qubits}

    joints: dict[str, list[Voxel]] = {q: [] for q in circuit.qubits}
    injections: list[geo.InjectionPoint] = []
    for g in circuit.gates:
        if g.name == "cnot":
            continue
        q = g.qubits[0]
        x = lp.lanes[q]
        kind = lp.kinds[q]
        if g.name == "init_plus" and kind == geo.PRIMAL:
            joints[q].append((x, JOINT, starts[q]))
        elif g.name == "init_zero" and kind == geo.DUAL:
            joints[q].append((x, JOINT, starts[q]))
        elif g.name == "measure_x":
            if circuit._terminated.get(q) == "marker":
                continue  # consumption step of the injection gadget
            if kind == geo.PRIMAL:
                joints[q].append((x, JOINT, ends[q]))
        elif g.name == "measure_z" and kind == geo.DUAL:
            joints[q].append((x, JOINT, ends[q]))
        elif g.name in tb.MARKER_GATES:
            pinch = (x, JOINT, ends[q])
            joints[q].append(pinch)
            injections.append(
                geo.InjectionPoint(
                    id=f"inj_{g.label}",
                    host_defect=f"lane_{q}",
                    voxel=pinch,
                    state="Y" if g.name == "s_injection" else "A",
                    label=g.label,
                )
            )

    excursions: dict[str, dict[int, list[Voxel]]] = {q: {} for q in circuit.qubits}
    for i, g in enumerate(circuit.gates):
        if g.name == "cnot":
            c, t = g.qubits
            z0 = lp.slots[i]
            excursions[t][z0] = _wrap_cells(lp.lanes[c], lp.lanes[t], z0)

    solids = []
    host_of_pinch: dict[Voxel, str] = {}
    for q in circuit.qubits:
        x = lp.lanes[q]
        cells: set[Voxel] = set()
        pauses = {z0 + 1 for z0 in excursions[q]}
        for z in range(starts[q], ends[q] + 1):
            if z not in pauses:
                cells.add((x, RAIL_A, z))
            cells.add((x, RAIL_B, z))
        for path in excursions[q].values():
            cells.update(path)
        cells.update(joints[q])
        # an unjoined lane is two separate rails; split into components
        for part, component in enumerate(_components(cells)):
            sid = f"lane_{q}" if part == 0 else f"lane_{q}_{part}"
            solids.append(
                geo.DefectSolid(
                    id=sid, kind=lp.kinds[q], voxels=frozenset(component),
                    tags=(f"lane:{q}",),
                )
            )
            for v in component:
                host_of_pinch[v] = sid
    injections = [
        geo.InjectionPoint(
            id=i.id, host_defect=host_of_pinch[i.voxel], voxel=i.voxel,
            state=i.state, label=i.label,
        )
        for i in injections
    ]

    in_label, out_label = tb.port_label_maps(circuit)
    ports = []
    for q in sorted(inputs):
        x = lp.lanes[q]
        ports.append(
            geo.Port(id=f"in_{q}", label=in_label[q], kind=lp.kinds[q], role="input",
                     wall="z-", stubs=((x, RAIL_A, 0), (x, RAIL_B, 0)))
        )
    for q in sorted(outputs):
        x = lp.lanes[q]
        ports.append(
            geo.Port(id=f"out_{q}", label=out_label[q], kind=lp.kinds[q], role="output",
                     wall="z+", stubs=((x, RAIL_A, z_max - 1), (x, RAIL_B, z_max - 1)))
        )

    x_hi = LANE_X0 + LANE_PITCH * (len(circuit.qubits) - 1) + 5
    box = geo.BoundingRegion((0, 0, 0), (x_hi, 9, z_max))
    g = geo.Geometry(
        bounding_region=box,
        defects=tuple(solids),
        ports=tuple(ports),
        injections=tuple(injections),
    )
    report = geo.validate(g)
    if not report.ok:
        raise BraidbenchError(f"lowering produced an invalid geometry:\n{report.summary()}")
    return g


# ---------------------------------------------------------------------------
# topological signature


@dataclass(frozen=True)
class Signature:
    primal_solids: int
    dual_solids: int
    injections: tuple[tuple[str, str], ...]  # (label, host kind), sorted
    port_labels: tuple[tuple[str, str, str], ...]
    linking: tuple[tuple[str, str, int], ...]  # (primal id, dual id, parity)


def core_cycle(g: geo.Geometry, solid: geo.DefectSolid, margin: int = 2
               ) -> list[Voxel]:
    """Closed voxel cycle through the solid's strand path.

    Wall-terminated strands are closed through the exterior (straight out
    through each wall, then an L-walk in the outer shell), so linking
    against other solids inside the region is well defined.
    """
    voxels = solid.voxels
    deg = {v: sum(1 for n in geo.neighbors(v) if n in voxels) for v in voxels}
    if any(d > 2 for d in deg.values()):
        raise BraidbenchError(f"solid {solid.id!r} is not a simple strand")
    ends = sorted(v for v, d in deg.items() if d == 1)
    if len(voxels) == 1:
        raise BraidbenchError(f"solid {solid.id!r} is a lone voxel; no core cycle")

    if not ends:
        start = min(voxels)
        cycle = [start]
        prev: Voxel | None = None
        cur = start
        while True:
            nxt = next(n for n in geo.neighbors(cur) if n in voxels and n != prev)
            prev, cur = cur, nxt
            if cur == start:
                break
            cycle.append(cur)
        if len(cycle) != len(voxels):
            raise BraidbenchError(f"solid {solid.id!r} loop does not cover its voxels")
        return cycle

    if len(ends) != 2:
        raise BraidbenchError(f"solid {solid.id!r} has {len(ends)} strand ends")
    path = [ends[0]]
    prev = None
    cur = ends[0]
    while cur != ends[1]:
        cur, prev = next(n for n in geo.neighbors(cur) if n in voxels and n != prev), cur
        path.append(cur)

    box = g.bounding_region
    lo = tuple(box.lo[a] - margin for a in range(3))
    hi = tuple(box.hi[a] - 1 + margin for a in range(3))

    def out_normal(v: Voxel) -> tuple[int, int]:
        for a in range(3):
            if v[a] == box.lo[a]:
                return a, -1
            if v[a] == box.hi[a] - 1:
                return a, 1
        raise BraidbenchError(
            f"solid {solid.id!r} strand end {v} is not port-terminated on a wall"
        )

    def push_out(v: Voxel) -> list[Voxel]:
        axis, sgn = out_normal(v)
        run = []
        cur = v
        while (sgn < 0 and cur[axis] > lo[axis]) or (sgn > 0 and cur[axis] < hi[axis]):
            cur = tuple(cur[a] + (sgn if a == axis else 0) for a in range(3))
            run.append(cur)
        return run

    tail = push_out(path[-1])
    head = push_out(path[0])
    walk: list[Voxel] = []
    pos = list(tail[-1] if tail else path[-1])
    goal = head[-1] if head else path[0]
    t_axis, _ = out_normal(path[-1])
    h_axis, h_sgn = out_normal(path[0])

    def slide(axis: int, to: int) -> None:
        while pos[axis] != to:
            pos[axis] += 1 if to > pos[axis] else -1
            walk.append(tuple(pos))

    # each slide keeps at least one coordinate pinned at a shell extreme:
    # first collapse to the low corner holding the exit wall's plane, then
    # pin the entry wall's plane and move within it
    for a in range(3):
        if a != t_axis:
            slide(a, lo[a])
    slide(t_axis, lo[t_axis])
    slide(h_axis, hi[h_axis] if h_sgn > 0 else lo[h_axis])
    for a in range(3):
        if a != h_axis:
            slide(a, goal[a])
    if walk and walk[-1] == goal:
        walk.pop()
    return path + tail + walk + list(reversed(head))


def _segments(cycle: list[Voxel]):
    for i, a in enumerate(cycle):
        b = cycle[(i + 1) % len(cycle)]
        yield a, b


def linking_parity(g: geo.Geometry, primal: geo.DefectSolid, dual: geo.DefectSolid,
                   margin: int = 2) -> int:
    """Mod-2 linking of two strand solids' core curves.

    Core curves live at cube centres; the half-cell sublattice offset makes
    every projected crossing transverse, so the parity of over-crossings in
    the projection along x is exact.
    """
    ca = core_cycle(g, primal, margin)
    cb = core_cycle(g, dual, margin)
    # centre coordinates, doubled; dual offset by one
    pa = [(2 * v[0] + 1, 2 * v[1] + 1, 2 * v[2] + 1) for v in ca]
    pb = [(2 * v[0] + 2, 2 * v[1] + 2, 2 * v[2] + 2) for v in cb]
    count = 0
    for a0, a1 in _segments(pa):
        if a0[0] != a1[0]:
            continue  # segments along x project to points
        for b0, b1 in _segments(pb):
            if b0[0] != b1[0]:
                continue
            # both segments lie in constant-x planes; in the (y, z)
            # projection one must run along y and the other along z
            if (a0[1] == a1[1]) == (b0[1] == b1[1]):
                continue
            if a0[1] == a1[1]:  # a along z, b along y
                ya, za0, za1 = a0[1], min(a0[2], a1[2]), max(a0[2], a1[2])
                zb, yb0, yb1 = b0[2], min(b0[1], b1[1]), max(b0[1], b1[1])
                if yb0 < ya < yb1 and za0 < zb < za1 and a0[0] > b0[0]:
                    count += 1
            else:  # a along y, b along z
                za, ya0, ya1 = a0[2], min(a0[1], a1[1]), max(a0[1], a1[1])
                yb, zb0, zb1 = b0[1], min(b0[2], b1[2]), max(b0[2], b1[2])
                if ya0 < yb < ya1 and zb0 < za < zb1 and a0[0] > b0[0]:
                    count += 1
    return count % 2


def topological_signature(g: geo.Geometry) -> Signature:
    """Translation- and deformation-invariant summary of a geometry."""
    geo.require_valid(g)
    primal = sorted((s for s in g.defects if s.kind == geo.PRIMAL), key=lambda s: s.id)
    dual = sorted((s for s in g.defects if s.kind == geo.DUAL), key=lambda s: s.id)
    links = tuple(
        (p.id, d.id, linking_parity(g, p, d)) for p in primal for d in dual
    )
    injections = tuple(
        sorted((i.label, g.defect(i.host_defect).kind) for i in g.injections)
    )
    return Signature(
        primal_solids=len(primal),
        dual_solids=len(dual),
        injections=injections,
        port_labels=g.signature(),
        linking=links,
    )

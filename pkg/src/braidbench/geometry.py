"""Space-time defect geometry: lattice, solids, ports, injections.

Coordinates are integer logical-cell indices.  The two sublattices share the
same integer grid; a dual cell is physically offset by half a cell along
every axis, so primal and dual solids never occupy coincident space even
when they share an index.  Time runs along the z axis by convention.

Volume is a tile count: the cells touched by defect matter (plus clearance
cells sandwiched between matter) are grouped into TILE^3-cell pitch tiles
anchored at the structure's minimum claimed corner, and the tiles are
counted.  One pitch tile is the footprint of a braided-CNOT quarter, so the
minimum CNOT occupies 12 tiles; the metric is translation invariant and is
pinned by the shipped corpus geometries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .errors import GeometryFormatError, InvalidDistance, ValidationFailed

Voxel = tuple[int, int, int]

PRIMAL = "primal"
DUAL = "dual"
KINDS = (PRIMAL, DUAL)

WALLS = ("x-", "x+", "y-", "y+", "z-", "z+")
_AXIS_OF_WALL = {"x-": 0, "x+": 0, "y-": 1, "y+": 1, "z-": 2, "z+": 2}

FORMAT_NAME = "braidbench-geometry"
FORMAT_VERSION = 1

TILE = 3  # cells per pitch tile, per axis (strand + two clearance cells)


@dataclass(frozen=True)
class LatticeCoord:
    """A logical-cell index on one of the two sublattices."""

    x: int
    y: int
    z: int
    sublattice: str

    def voxel(self) -> Voxel:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class BoundingRegion:
    lo: Voxel
    hi: Voxel  # exclusive

    def contains(self, v: Voxel) -> bool:
        return all(self.lo[a] <= v[a] < self.hi[a] for a in range(3))

    def extents(self) -> tuple[int, int, int]:
        return tuple(self.hi[a] - self.lo[a] for a in range(3))


@dataclass(frozen=True)
class DefectSolid:
    """A connected same-sublattice solid of deactivated cells."""

    id: str
    kind: str
    voxels: frozenset[Voxel]
    tags: tuple[str, ...] = ()

    def coords(self) -> list[LatticeCoord]:
        return [LatticeCoord(x, y, z, self.kind) for x, y, z in sorted(self.voxels)]

    def translated(self, d: Voxel) -> "DefectSolid":
        moved = frozenset((v[0] + d[0], v[1] + d[1], v[2] + d[2]) for v in self.voxels)
        return replace(self, voxels=moved)


@dataclass(frozen=True)
class Port:
    """A logical qubit's pair of defect stubs on the bounding boundary."""

    id: str
    label: str
    kind: str
    role: str  # input | output
    wall: str  # one of WALLS
    stubs: tuple[Voxel, Voxel]

    def translated(self, d: Voxel) -> "Port":
        s = tuple((v[0] + d[0], v[1] + d[1], v[2] + d[2]) for v in self.stubs)
        return replace(self, stubs=s)

    def face_cells(self) -> frozenset[Voxel]:
        """Boundary cells where this port's correlation surfaces terminate."""
        return frozenset(self.stubs)


@dataclass(frozen=True)
class InjectionPoint:
    """Pinch point where a raw single-qubit state enters a defect loop."""

    id: str
    host_defect: str
    voxel: Voxel
    state: str  # Y | A
    label: str

    def translated(self, d: Voxel) -> "InjectionPoint":
        v = (self.voxel[0] + d[0], self.voxel[1] + d[1], self.voxel[2] + d[2])
        return replace(self, voxel=v)


@dataclass(frozen=True)
class Geometry:
    """Immutable space-time defect structure."""

    bounding_region: BoundingRegion
    defects: tuple[DefectSolid, ...]
    ports: tuple[Port, ...] = ()
    injections: tuple[InjectionPoint, ...] = ()
    code_distance: int = 15  # metadata only

    def defect(self, defect_id: str) -> DefectSolid:
        for d in self.defects:
            if d.id == defect_id:
                return d
        raise KeyError(f"no defect with id {defect_id!r}")

    def has_defect(self, defect_id: str) -> bool:
        return any(d.id == defect_id for d in self.defects)

    def injection(self, label: str) -> InjectionPoint:
        for i in self.injections:
            if i.label == label:
                return i
        raise KeyError(f"no injection labelled {label!r}")

    def port(self, label: str) -> Port:
        for p in self.ports:
            if p.label == label:
                return p
        raise KeyError(f"no port labelled {label!r}")

    def signature(self) -> tuple[tuple[str, str, str], ...]:
        """Ordered (label, kind, role) tuples; injections count as inputs."""
        rows = [(p.label, p.kind, p.role) for p in self.ports]
        for inj in self.injections:
            host = self.defect(inj.host_defect)
            rows.append((inj.label, host.kind, "input"))
        return tuple(sorted(rows))

    def translated(self, d: Voxel) -> "Geometry":
        box = BoundingRegion(
            tuple(self.bounding_region.lo[a] + d[a] for a in range(3)),
            tuple(self.bounding_region.hi[a] + d[a] for a in range(3)),
        )
        return replace(
            self,
            bounding_region=box,
            defects=tuple(s.translated(d) for s in self.defects),
            ports=tuple(p.translated(d) for p in self.ports),
            injections=tuple(i.translated(d) for i in self.injections),
        )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, subject: str, message: str) -> None:
        self.violations.append(Violation(code, subject, message))

    def summary(self) -> str:
        if self.ok:
            return "well-formed"
        return "\n".join(f"[{v.code}] {v.subject}: {v.message}" for v in self.violations)


_NEIGHBOR_STEPS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def neighbors(v: Voxel):
    for d in _NEIGHBOR_STEPS:
        yield (v[0] + d[0], v[1] + d[1], v[2] + d[2])


def _connected(voxels: frozenset[Voxel]) -> bool:
    if not voxels:
        return False
    seen = set()
    stack = [next(iter(voxels))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        for n in neighbors(v):
            if n in voxels and n not in seen:
                stack.append(n)
    return len(seen) == len(voxels)


def _wall_plane(box: BoundingRegion, wall: str) -> int:
    axis = _AXIS_OF_WALL[wall]
    return box.lo[axis] if wall.endswith("-") else box.hi[axis] - 1


def validate(g: Geometry) -> ValidationReport:
    """Collect every structural invariant violation; empty report == well-formed."""
    report = ValidationReport()
    box = g.bounding_region
    if any(box.lo[a] >= box.hi[a] for a in range(3)):
        report.add("degenerate-region", "bounding_region", "empty bounding region")
        return report

    seen_ids: set[str] = set()
    occupancy: dict[str, dict[Voxel, str]] = {PRIMAL: {}, DUAL: {}}
    for solid in g.defects:
        if solid.id in seen_ids:
            report.add("duplicate-id", solid.id, "defect id reused")
        seen_ids.add(solid.id)
        if solid.kind not in KINDS:
            report.add("bad-kind", solid.id, f"unknown sublattice {solid.kind!r}")
            continue
        if not solid.voxels:
            report.add("empty-solid", solid.id, "defect has no voxels")
            continue
        for v in solid.voxels:
            if not box.contains(v):
                report.add("out-of-bounds", solid.id, f"voxel {v} outside bounding region")
            other = occupancy[solid.kind].get(v)
            if other is not None:
                report.add("overlap", solid.id, f"voxel {v} also claimed by {other}")
            occupancy[solid.kind][v] = solid.id
        if not _connected(solid.voxels):
            report.add("disconnected", solid.id, "voxel set is not 6-connected")

    labels: set[str] = set()
    stub_cells: set[tuple[str, Voxel]] = set()
    for port in g.ports:
        if port.label in labels:
            report.add("duplicate-label", port.id, f"label {port.label!r} reused")
        labels.add(port.label)
        if port.kind not in KINDS:
            report.add("bad-kind", port.id, f"unknown sublattice {port.kind!r}")
            continue
        if port.role not in ("input", "output"):
            report.add("bad-role", port.id, f"unknown role {port.role!r}")
        if port.wall not in WALLS:
            report.add("bad-wall", port.id, f"unknown wall {port.wall!r}")
            continue
        plane = _wall_plane(box, port.wall)
        axis = _AXIS_OF_WALL[port.wall]
        if port.stubs[0] == port.stubs[1]:
            report.add("degenerate-port", port.id, "both stubs on the same cell")
        for stub in port.stubs:
            if stub[axis] != plane:
                report.add("port-off-wall", port.id, f"stub {stub} not on wall {port.wall}")
            owner = occupancy[port.kind].get(stub)
            if owner is None:
                report.add("dangling-port", port.id, f"stub {stub} is not a {port.kind} defect voxel")
            stub_cells.add((port.kind, stub))

    for inj in g.injections:
        if inj.label in labels:
            report.add("duplicate-label", inj.id, f"label {inj.label!r} reused")
        labels.add(inj.label)
        if not g.has_defect(inj.host_defect):
            report.add("dangling-injection", inj.id, f"host defect {inj.host_defect!r} missing")
            continue
        host = g.defect(inj.host_defect)
        if inj.voxel not in host.voxels:
            report.add("dangling-injection", inj.id, f"voxel {inj.voxel} not in host {host.id}")
            continue
        if (host.kind, inj.voxel) in stub_cells:
            report.add("injection-on-port", inj.id, "injection voxel doubles as a port stub")
        if inj.state not in ("Y", "A"):
            report.add("bad-state", inj.id, f"unknown injected state {inj.state!r}")
        in_host = [n for n in neighbors(inj.voxel) if n in host.voxels]
        if len(in_host) != 2:
            report.add(
                "bad-pinch", inj.id,
                f"injection voxel needs exactly 2 host neighbours, found {len(in_host)}",
            )
        else:
            a, b = in_host
            mid = tuple((a[i] + b[i]) // 2 for i in range(3))
            if mid != inj.voxel or any((a[i] + b[i]) % 2 for i in range(3)):
                report.add("bad-pinch", inj.id, "pinch neighbours are not collinear")
    return report


def require_valid(g: Geometry) -> None:
    report = validate(g)
    if not report.ok:
        raise ValidationFailed(report)


# ---------------------------------------------------------------------------
# volume


def occupied_cells(g: Geometry) -> set[Voxel]:
    cells: set[Voxel] = set()
    for solid in g.defects:
        cells.update(solid.voxels)
    return cells


def claimed_cells(g: Geometry) -> set[Voxel]:
    """Defect cells plus clearance cells sandwiched between defect matter."""
    cells = occupied_cells(g)
    extra: set[Voxel] = set()
    for v in cells:
        for axis in range(3):
            step = [0, 0, 0]
            step[axis] = 2
            far = (v[0] + step[0], v[1] + step[1], v[2] + step[2])
            if far in cells:
                mid = (v[0] + step[0] // 2, v[1] + step[1] // 2, v[2] + step[2] // 2)
                if mid not in cells:
                    extra.add(mid)
    return cells | extra


def volume(g: Geometry) -> int:
    """Occupied pitch-tile count (see module docstring)."""
    require_valid(g)
    cells = claimed_cells(g)
    if not cells:
        return 0
    lo = tuple(min(c[a] for c in cells) for a in range(3))
    tiles = {tuple((c[a] - lo[a]) // TILE for a in range(3)) for c in cells}
    return len(tiles)


def bounding_box_volume(g: Geometry) -> int:
    """Secondary diagnostic: raw cell count of the claimed bounding box."""
    cells = claimed_cells(g)
    if not cells:
        return 0
    lo = tuple(min(c[a] for c in cells) for a in range(3))
    hi = tuple(max(c[a] for c in cells) for a in range(3))
    return math.prod(hi[a] - lo[a] + 1 for a in range(3))


# ---------------------------------------------------------------------------
# physical scale


@dataclass(frozen=True)
class PhysicalEstimate:
    """Physical-resource reading of a geometry at code distance d.

    One pitch tile spans 5d/4 physical units per axis (defect cross-section
    d/4 plus separation d).  Spatially each unit of d is two qubits wide;
    temporally each unit of d is one round of error detection deep.
    """

    code_distance: int
    tile_extents: tuple[int, int, int]
    qubit_extents: tuple[int, int]  # x, y
    footprint_qubits: int
    duration_rounds: int
    min_errors_to_fail: int


def physical_scale(g: Geometry, d: int) -> PhysicalEstimate:
    if d < 3:
        raise InvalidDistance(f"code distance must be at least 3, got {d}")
    require_valid(g)
    cells = claimed_cells(g)
    if cells:
        lo = tuple(min(c[a] for c in cells) for a in range(3))
        hi = tuple(max(c[a] for c in cells) for a in range(3))
        cell_extents = tuple(hi[a] - lo[a] + 1 for a in range(3))
    else:
        cell_extents = (0, 0, 0)
    tiles = tuple(math.ceil(e / TILE) for e in cell_extents)
    d_units = tuple(math.ceil(5 * t / 4) for t in tiles)
    qubits_xy = (2 * d_units[0] * d, 2 * d_units[1] * d)
    return PhysicalEstimate(
        code_distance=d,
        tile_extents=tiles,
        qubit_extents=qubits_xy,
        footprint_qubits=qubits_xy[0] * qubits_xy[1],
        duration_rounds=d_units[2] * d,
        min_errors_to_fail=(d + 1) // 2,
    )


# ---------------------------------------------------------------------------
# serialization


def to_dict(g: Geometry) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "bounding_region": {"min": list(g.bounding_region.lo), "max": list(g.bounding_region.hi)},
        "code_distance": g.code_distance,
        "defects": [
            {
                "id": s.id,
                "kind": s.kind,
                "voxels": [list(v) for v in sorted(s.voxels)],
                "tags": list(s.tags),
            }
            for s in g.defects
        ],
        "ports": [
            {
                "id": p.id,
                "label": p.label,
                "kind": p.kind,
                "role": p.role,
                "wall": p.wall,
                "stubs": [list(v) for v in p.stubs],
            }
            for p in g.ports
        ],
        "injections": [
            {
                "id": i.id,
                "host_defect": i.host_defect,
                "voxel": list(i.voxel),
                "state": i.state,
                "label": i.label,
            }
            for i in g.injections
        ],
    }


def _as_voxel(value, context: str) -> Voxel:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise GeometryFormatError(f"{context}: expected [x, y, z], got {value!r}")
    if not all(isinstance(c, int) for c in value):
        raise GeometryFormatError(f"{context}: non-integer coordinate in {value!r}")
    return tuple(value)


def from_dict(doc: dict) -> Geometry:
    if not isinstance(doc, dict):
        raise GeometryFormatError("geometry document must be a JSON object")
    if doc.get("format", FORMAT_NAME) != FORMAT_NAME:
        raise GeometryFormatError(f"not a geometry document: format={doc.get('format')!r}")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise GeometryFormatError(f"unsupported geometry format version {version!r}")
    try:
        region = doc["bounding_region"]
        box = BoundingRegion(
            _as_voxel(region["min"], "bounding_region.min"),
            _as_voxel(region["max"], "bounding_region.max"),
        )
        defects = tuple(
            DefectSolid(
                id=str(s["id"]),
                kind=str(s["kind"]),
                voxels=frozenset(_as_voxel(v, f"defect {s.get('id')}") for v in s["voxels"]),
                tags=tuple(s.get("tags", ())),
            )
            for s in doc.get("defects", [])
        )
        ports = tuple(
            Port(
                id=str(p["id"]),
                label=str(p["label"]),
                kind=str(p["kind"]),
                role=str(p["role"]),
                wall=str(p["wall"]),
                stubs=(
                    _as_voxel(p["stubs"][0], f"port {p.get('id')}"),
                    _as_voxel(p["stubs"][1], f"port {p.get('id')}"),
                ),
            )
            for p in doc.get("ports", [])
        )
        injections = tuple(
            InjectionPoint(
                id=str(i["id"]),
                host_defect=str(i["host_defect"]),
                voxel=_as_voxel(i["voxel"], f"injection {i.get('id')}"),
                state=str(i["state"]),
                label=str(i["label"]),
            )
            for i in doc.get("injections", [])
        )
    except KeyError as exc:
        raise GeometryFormatError(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, IndexError) as exc:
        raise GeometryFormatError(f"malformed geometry document: {exc}") from exc
    return Geometry(
        bounding_region=box,
        defects=defects,
        ports=ports,
        injections=injections,
        code_distance=int(doc.get("code_distance", 15)),
    )


def save(g: Geometry, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(g), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path) -> Geometry:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GeometryFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return from_dict(doc)

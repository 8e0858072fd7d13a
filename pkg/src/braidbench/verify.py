"""Correlation-surface engine: decides which port Pauli patterns are joined
by 2-chains through a defect geometry, over GF(2).

Model
-----
Both sublattices are laid out on one integer grid of *doubled* coordinates.
A point p classifies by its number of odd coordinates o(p):

    o(p) = k      ->  p is the centre of a primal k-cell
    o(p) = 3 - k  ->  p is the centre of a dual k-cell

so primal faces coincide with dual edges (o = 2) and primal edges with dual
faces (o = 1).  A cell extends one unit either way along each odd axis
(primal) or even axis (dual); its boundary cells sit at +-1 along those
axes.

A primal defect voxel (X, Y, Z) occupies the cube centred at
(2X+1, 2Y+1, 2Z+1); a dual voxel occupies (2X+2, 2Y+2, 2Z+2), the
half-cell-offset interleaving.  Around the closed box of every matter cube:

  * same-kind edges are *slack*: correlation surfaces of that kind may end
    there freely (their rows are dropped from the linear system);
  * opposite-kind faces are *blocked*: surfaces of the other kind may not
    pass through (their columns are dropped).

X-type operators are carried by primal 2-chains, Z-type by dual 2-chains.
Every port or injection label contributes one X pattern (a primal 1-chain)
and one Z pattern (a dual 1-chain); a Pauli operator on the ports is
realizable iff the XOR of its pattern chains bounds a 2-chain modulo slack.
The set of realizable operators is a GF(2) subspace computed by one row
reduction per sublattice; the canonical basis of that subspace *is* the
logical map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import geometry as geo
from .errors import ResourceCapExceeded, SignatureMismatch, UnderdeterminedStructure
from .gf2 import Basis, TrackedBasis, nullspace_combos

DEFAULT_MAX_CELLS = 4_000_000  # doubled-grid points per complex

_AXES = (0, 1, 2)

# doubled-coordinate offsets of the 27-point neighbourhood (cube closure)
_CLOSURE_OFFSETS = [
    (dx, dy, dz) for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)
]

Pt = tuple[int, int, int]


def _odd_axes(p: Pt) -> tuple[int, ...]:
    return tuple(a for a in _AXES if p[a] & 1)


def _even_axes(p: Pt) -> tuple[int, ...]:
    return tuple(a for a in _AXES if not p[a] & 1)


def _shift(p: Pt, axis: int, delta: int) -> Pt:
    q = list(p)
    q[axis] += delta
    return tuple(q)


@dataclass(frozen=True)
class CorrelationSurfaceProblem:
    """Ask whether a 2-chain of the given kind bounds the target 1-chain."""

    kind: str  # primal | dual
    target: tuple[Pt, ...]  # edge centres, doubled coordinates


@dataclass(frozen=True)
class SurfaceWitness:
    kind: str
    faces: tuple[Pt, ...]


@dataclass
class _SectorComplex:
    """One sublattice's chain data: rows are edges, columns are faces."""

    kind: str
    edge_index: dict[Pt, int]
    edges: list[Pt]
    faces: list[Pt]
    face_vectors: list[int]  # bit i refers to edges[i]
    slack: set[Pt]
    blocked: set[Pt]


@dataclass
class CellComplex:
    """Interleaved cubical complexes over a geometry's bounding box."""

    box_max: Pt  # doubled coordinates run 0..box_max inclusive
    origin: geo.Voxel  # cell-space lower corner the doubling is relative to
    sectors: dict[str, _SectorComplex]
    patterns: dict[tuple[str, str], tuple[Pt, ...]] = field(default_factory=dict)

    def sector(self, kind: str) -> _SectorComplex:
        return self.sectors[kind]

    def cell_counts(self) -> dict[str, int]:
        return {
            kind: len(sec.edges) + len(sec.faces) for kind, sec in self.sectors.items()
        }


def _matter_cube(kind: str, v: geo.Voxel, origin: geo.Voxel) -> Pt:
    base = tuple(2 * (v[a] - origin[a]) for a in _AXES)
    off = 1 if kind == geo.PRIMAL else 2
    return (base[0] + off, base[1] + off, base[2] + off)


def _closure(points: set[Pt]) -> set[Pt]:
    out: set[Pt] = set()
    for p in points:
        for d in _CLOSURE_OFFSETS:
            out.add((p[0] + d[0], p[1] + d[1], p[2] + d[2]))
    return out


def _in_box(p: Pt, box_max: Pt) -> bool:
    return all(0 <= p[a] <= box_max[a] for a in _AXES)


def _cell_fits(p: Pt, extent_axes: tuple[int, ...], box_max: Pt) -> bool:
    if not _in_box(p, box_max):
        return False
    return all(1 <= p[a] and p[a] <= box_max[a] - 1 for a in extent_axes)


def _enumerate_class(box_max: Pt, parity: tuple[int, int, int]) -> list[Pt]:
    """All points with the given per-axis parity (1 = odd) inside the box."""
    ranges = []
    for a in _AXES:
        start = 1 if parity[a] else 0
        ranges.append(range(start, box_max[a] + 1, 2))
    return [(x, y, z) for x in ranges[0] for y in ranges[1] for z in ranges[2]]


def _edge_parities(kind: str) -> list[tuple[int, int, int]]:
    # primal edge: exactly one odd axis; dual edge: exactly one even axis
    if kind == geo.PRIMAL:
        return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return [(0, 1, 1), (1, 0, 1), (1, 1, 0)]


def _face_parities(kind: str) -> list[tuple[int, int, int]]:
    if kind == geo.PRIMAL:
        return [(1, 1, 0), (1, 0, 1), (0, 1, 1)]
    return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def _extent_axes(kind: str, p: Pt) -> tuple[int, ...]:
    return _odd_axes(p) if kind == geo.PRIMAL else _even_axes(p)


def boundary_edges(kind: str, face: Pt) -> list[Pt]:
    """Centres of the (up to) four boundary edges of a face cell."""
    out = []
    for a in _extent_axes(kind, face):
        out.append(_shift(face, a, -1))
        out.append(_shift(face, a, 1))
    return out


def _band_key(p: Pt) -> tuple[int, int, int]:
    return (p[2], p[1], p[0])


# ---------------------------------------------------------------------------
# pattern construction


def _axis_frame(wall: str) -> tuple[int, int, int]:
    """(wall axis, first transverse axis, second transverse axis)."""
    w = {"x": 0, "y": 1, "z": 2}[wall[0]]
    u, v = [a for a in _AXES if a != w]
    return w, u, v


def _l_path_edges(start: Pt, goal: Pt, u: int, v: int) -> list[Pt]:
    """Edge centres of an axis-aligned L-path from start to goal (step 2)."""
    edges: list[Pt] = []
    cur = list(start)
    for axis in (u, v):
        step = 2 if goal[axis] > cur[axis] else -2
        while cur[axis] != goal[axis]:
            mid = cur.copy()
            mid[axis] += step // 2
            edges.append(tuple(mid))
            cur[axis] += step
    return edges


def _ring_edges(center_lo: Pt, side: int, u: int, v: int) -> list[Pt]:
    """Edge centres of the square ring with low corner center_lo and the
    given side length, lying in the plane spanned by axes u, v."""
    edges: list[Pt] = []
    corner = list(center_lo)
    for axis, other in ((u, v), (v, u)):
        for base in (center_lo[other], center_lo[other] + side):
            pos = list(center_lo)
            pos[other] = base
            for k in range(center_lo[axis] + 1, center_lo[axis] + side, 2):
                e = pos.copy()
                e[axis] = k
                edges.append(tuple(e))
    del corner
    return edges


def port_patterns(g: geo.Geometry, port: geo.Port, origin: geo.Voxel, box_max: Pt
                  ) -> dict[str, tuple[Pt, ...]]:
    """X (primal) and Z (dual) boundary 1-chains for a wall port."""
    w, u, v = _axis_frame(port.wall)
    negative = port.wall.endswith("-")
    s1 = tuple(2 * (port.stubs[0][a] - origin[a]) for a in _AXES)
    s2 = tuple(2 * (port.stubs[1][a] - origin[a]) for a in _AXES)

    if port.kind == geo.PRIMAL:
        wall_plane = 0 if negative else box_max[w]
        near_plane = 1 if negative else box_max[w] - 1
        # X: path between the stub cubes' wall corners, on the wall itself
        a = list(s1)
        b = list(s2)
        a[w] = b[w] = wall_plane
        x_chain = _l_path_edges(tuple(a), tuple(b), u, v)
        # Z: ring of dual edges around the first stub, one plane in
        lo = list(s1)
        lo[w] = near_plane
        lo[u] -= 1
        lo[v] -= 1
        z_chain = _ring_edges(tuple(lo), 4, u, v)
    else:
        wall_plane = 0 if negative else box_max[w]
        near_plane = 1 if negative else box_max[w] - 1
        # Z: path between the dual cubes' wall-side corners
        a = [c + 1 for c in s1]
        b = [c + 1 for c in s2]
        a[w] = b[w] = near_plane
        z_chain = _l_path_edges(tuple(a), tuple(b), u, v)
        # X: ring of primal edges around the first stub, on the wall
        lo = [c + 1 for c in s1]
        lo[w] = wall_plane
        lo[u] -= 1
        lo[v] -= 1
        x_chain = _ring_edges(tuple(lo), 4, u, v)
    return {"X": tuple(x_chain), "Z": tuple(z_chain)}


def injection_core(g: geo.Geometry, inj: geo.InjectionPoint, origin: geo.Voxel
                   ) -> tuple[str, Pt, int]:
    """(host kind, core edge centre, pinch axis) for an injection point."""
    host = g.defect(inj.host_defect)
    in_host = [n for n in geo.neighbors(inj.voxel) if n in host.voxels]
    axis = next(a for a in _AXES if in_host[0][a] != in_host[1][a])
    base = tuple(2 * (inj.voxel[a] - origin[a]) for a in _AXES)
    if host.kind == geo.PRIMAL:
        core = list(base)
        core[axis] += 1
    else:
        core = [c + 1 for c in base]
        core[axis] += 1
    return host.kind, tuple(core), axis


def injection_patterns(g: geo.Geometry, inj: geo.InjectionPoint, origin: geo.Voxel
                       ) -> dict[str, tuple[Pt, ...]]:
    """X and Z 1-chains for an injection pinch.

    The host defect is thinned to a single core edge at the pinch.  The
    same-kind pattern is the core edge itself (surfaces sliding along the
    host register it); the opposite-kind pattern is the minimal ring of
    opposite edges encircling the core (surfaces wrapping the host close
    off on it).
    """
    kind, core, axis = injection_core(g, inj, origin)
    u, v = [a for a in _AXES if a != axis]
    ring = [_shift(core, u, -1), _shift(core, u, 1),
            _shift(core, v, -1), _shift(core, v, 1)]
    if kind == geo.PRIMAL:
        return {"X": (core,), "Z": tuple(ring)}
    return {"X": tuple(ring), "Z": (core,)}


# ---------------------------------------------------------------------------
# complex construction


def build_complex(g: geo.Geometry, max_cells: int = DEFAULT_MAX_CELLS) -> CellComplex:
    """Build the interleaved chain complexes for a well-formed geometry."""
    geo.require_valid(g)
    origin = g.bounding_region.lo
    ext = g.bounding_region.extents()
    box_max = (2 * ext[0], 2 * ext[1], 2 * ext[2])
    n_points = (box_max[0] + 1) * (box_max[1] + 1) * (box_max[2] + 1)
    if n_points > max_cells:
        raise ResourceCapExceeded(
            f"complex would hold {n_points} lattice points (cap {max_cells})"
        )

    pinches = {inj.voxel: inj for inj in g.injections}
    matter: dict[str, set[Pt]] = {geo.PRIMAL: set(), geo.DUAL: set()}
    for solid in g.defects:
        for vox in solid.voxels:
            if vox in pinches and pinches[vox].host_defect == solid.id:
                continue  # pinched cube is excised, replaced by its core edge
            matter[solid.kind].add(_matter_cube(solid.kind, vox, origin))

    closure = {k: _closure(matter[k]) for k in geo.KINDS}
    cores: dict[str, set[Pt]] = {geo.PRIMAL: set(), geo.DUAL: set()}
    patterns: dict[tuple[str, str], tuple[Pt, ...]] = {}
    for inj in g.injections:
        kind, core, _ = injection_core(g, inj, origin)
        cores[kind].add(core)
        for pauli, chain in injection_patterns(g, inj, origin).items():
            patterns[(inj.label, pauli)] = chain
    for port in g.ports:
        for pauli, chain in port_patterns(g, port, origin, box_max).items():
            patterns[(port.label, pauli)] = chain

    sectors: dict[str, _SectorComplex] = {}
    for kind in geo.KINDS:
        other = geo.DUAL if kind == geo.PRIMAL else geo.PRIMAL
        slack = closure[kind]
        # faces of this kind are blocked inside the other kind's matter
        # closure and at the other kind's injection cores (the pinch cap)
        blocked = closure[other] | cores[other]

        edges: list[Pt] = []
        for par in _edge_parities(kind):
            for p in _enumerate_class(box_max, par):
                if p in slack:
                    continue
                if not _cell_fits(p, _extent_axes(kind, p), box_max):
                    continue
                edges.append(p)
        edges.sort(key=_band_key)
        edge_index = {p: i for i, p in enumerate(edges)}

        faces: list[Pt] = []
        for par in _face_parities(kind):
            for p in _enumerate_class(box_max, par):
                if p in blocked:
                    continue
                ext_axes = _extent_axes(kind, p)
                if not _cell_fits(p, ext_axes, box_max):
                    continue
                if kind == geo.PRIMAL:
                    # faces lying inside a bounding wall are port interface
                    fixed = next(a for a in _AXES if a not in ext_axes)
                    if p[fixed] == 0 or p[fixed] == box_max[fixed]:
                        continue
                faces.append(p)
        faces.sort(key=_band_key)

        vectors: list[int] = []
        for f in faces:
            vec = 0
            for e in boundary_edges(kind, f):
                idx = edge_index.get(e)
                if idx is not None:
                    vec |= 1 << idx
            vectors.append(vec)

        sectors[kind] = _SectorComplex(
            kind=kind,
            edge_index=edge_index,
            edges=edges,
            faces=faces,
            face_vectors=vectors,
            slack=slack,
            blocked=blocked,
        )
    return CellComplex(box_max=box_max, origin=origin, sectors=sectors, patterns=patterns)


def chain_vector(sec: _SectorComplex, chain) -> int:
    """Target 1-chain as a row-space bit vector (slack edges drop out)."""
    vec = 0
    for p in chain:
        idx = sec.edge_index.get(p)
        if idx is not None:
            vec ^= 1 << idx
    return vec


def check_boundary_of_boundary(cx: CellComplex) -> bool:
    """Chain-complex sanity: every face's boundary is a closed edge cycle.

    Uses raw cell arithmetic (not the assembled vectors), so it checks the
    construction independently.
    """
    for kind, sec in cx.sectors.items():
        for f in sec.faces:
            verts: dict[Pt, int] = {}
            for e in boundary_edges(kind, f):
                for a in _extent_axes(kind, e):
                    for d in (-1, 1):
                        q = _shift(e, a, d)
                        verts[q] = verts.get(q, 0) ^ 1
            if any(verts.values()):
                return False
    return True


# ---------------------------------------------------------------------------
# solving


def surface_exists(cx: CellComplex, problem: CorrelationSurfaceProblem
                   ) -> SurfaceWitness | None:
    """Find a 2-chain with the prescribed boundary, or None.

    The returned witness is re-checked against the boundary operator
    independently of the row reduction that produced it.
    """
    sec = cx.sector(problem.kind)
    target = chain_vector(sec, problem.target)
    basis = TrackedBasis()
    for vec in sec.face_vectors:
        basis.insert(vec)
    residual, combo = basis.reduce(target)
    if residual:
        return None
    faces = tuple(sec.faces[i] for i in range(len(sec.faces)) if (combo >> i) & 1)
    witness = SurfaceWitness(kind=problem.kind, faces=faces)
    if not witness_boundary_matches(cx, witness, problem.target):
        raise AssertionError("solver returned a witness that fails the boundary check")
    return witness


def witness_boundary_matches(cx: CellComplex, witness: SurfaceWitness, target) -> bool:
    """Independent check: boundary of the witness equals target modulo slack."""
    sec = cx.sector(witness.kind)
    acc: dict[Pt, int] = {}
    for f in witness.faces:
        for e in boundary_edges(witness.kind, f):
            acc[e] = acc.get(e, 0) ^ 1
    for p in target:
        acc[p] = acc.get(p, 0) ^ 1
    return all(v == 0 or p in sec.slack or p not in sec.edge_index
               for p, v in acc.items())


def _sector_subspace(sec: _SectorComplex, chains: list[tuple[Pt, ...]]) -> list[int]:
    """Canonical basis of the realizable combinations of the given chains."""
    face_basis = Basis()
    for vec in sec.face_vectors:
        face_basis.insert(vec)
    residuals = [face_basis.reduce(chain_vector(sec, ch)) for ch in chains]
    combos = nullspace_combos(residuals)
    canon = Basis()
    for c in combos:
        canon.insert(c)
    return canon.canonical_rows()


# ---------------------------------------------------------------------------
# logical map


@dataclass(frozen=True)
class MapRow:
    sector: str  # X | Z
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def render(self) -> str:
        def side(names, sector):
            return "·".join(f"{sector}_{n}" for n in names) or "1"

        if self.inputs:
            return f"{side(self.inputs, self.sector)} -> {side(self.outputs, self.sector)}"
        return f"stabilizer {side(self.outputs, self.sector)}"


@dataclass(frozen=True)
class LogicalMap:
    """Canonical realizable-operator subspace of a geometry's ports."""

    signature: tuple[tuple[str, str, str], ...]  # (label, kind, role) sorted
    labels: tuple[str, ...]  # bit order: inputs first, then outputs
    n_inputs: int
    x_rows: tuple[int, ...]
    z_rows: tuple[int, ...]

    def rows(self) -> list[MapRow]:
        out = []
        for sector, rows in (("X", self.x_rows), ("Z", self.z_rows)):
            for row in rows:
                ins = tuple(
                    self.labels[i] for i in range(self.n_inputs) if (row >> i) & 1
                )
                outs = tuple(
                    self.labels[i]
                    for i in range(self.n_inputs, len(self.labels))
                    if (row >> i) & 1
                )
                out.append(MapRow(sector=sector, inputs=ins, outputs=outs))
        return out

    def render(self) -> str:
        return "\n".join(r.render() for r in self.rows())

    def support(self, sector: str, names: tuple[str, ...]) -> int:
        bit = {l: i for i, l in enumerate(self.labels)}
        vec = 0
        for n in names:
            vec ^= 1 << bit[n]
        return vec

    def realizes(self, sector: str, names: tuple[str, ...]) -> bool:
        """Whether the operator with the given support is in the map group."""
        rows = self.x_rows if sector == "X" else self.z_rows
        b = Basis()
        for r in rows:
            b.insert(r)
        return b.contains(self.support(sector, names))

    def is_symplectic(self) -> bool:
        """Realizable X and Z operators must pairwise commute."""
        for u in self.x_rows:
            for v in self.z_rows:
                if bin(u & v).count("1") & 1:
                    return False
        return True


def _ordered_labels(signature) -> tuple[tuple[str, ...], int]:
    inputs = sorted(l for l, _, role in signature if role == "input")
    outputs = sorted(l for l, _, role in signature if role == "output")
    return tuple(inputs + outputs), len(inputs)


def verify(g: geo.Geometry, max_cells: int = DEFAULT_MAX_CELLS,
           cx: CellComplex | None = None) -> LogicalMap:
    """Extract the logical map a geometry implements.

    Raises UnderdeterminedStructure if some input-side generator appears in
    no realizable operator at all.
    """
    if cx is None:
        cx = build_complex(g, max_cells=max_cells)
    signature = g.signature()
    labels, n_in = _ordered_labels(signature)

    rows: dict[str, tuple[int, ...]] = {}
    for sector, kind in (("X", geo.PRIMAL), ("Z", geo.DUAL)):
        chains = [cx.patterns[(label, sector)] for label in labels]
        rows[sector] = tuple(_sector_subspace(cx.sector(kind), chains))

    covered = {("X", i): False for i in range(n_in)}
    covered.update({("Z", i): False for i in range(n_in)})
    for sector in ("X", "Z"):
        for row in rows[sector]:
            for i in range(n_in):
                if (row >> i) & 1:
                    covered[(sector, i)] = True
    missing = [
        f"{sector}_{labels[i]}" for (sector, i), seen in sorted(covered.items()) if not seen
    ]
    if missing:
        raise UnderdeterminedStructure(
            "no correlation surface reaches input generator(s): " + ", ".join(missing)
        )

    lm = LogicalMap(
        signature=signature,
        labels=labels,
        n_inputs=n_in,
        x_rows=rows["X"],
        z_rows=rows["Z"],
    )
    if not lm.is_symplectic():
        raise AssertionError("realizable operators fail to commute; model invariant broken")
    return lm


def _swap_signature(sig):
    flip = {geo.PRIMAL: geo.DUAL, geo.DUAL: geo.PRIMAL}
    return tuple(sorted((l, flip[k], r) for l, k, r in sig))


def equivalent(g1: geo.Geometry, g2: geo.Geometry, *, swap_kinds: bool = False,
               max_cells: int = DEFAULT_MAX_CELLS) -> bool:
    """Whether two geometries implement the same logical map.

    With swap_kinds=True, g2 is compared as the sublattice-exchanged image
    of g1 (X and Z sectors trade places).
    """
    m1 = verify(g1, max_cells=max_cells)
    m2 = verify(g2, max_cells=max_cells)
    sig2 = _swap_signature(m2.signature) if swap_kinds else m2.signature
    if m1.signature != sig2:
        raise SignatureMismatch(
            f"port signatures differ:\n  {m1.signature}\n  {sig2}"
        )
    if swap_kinds:
        return m1.x_rows == m2.z_rows and m1.z_rows == m2.x_rows
    return m1.x_rows == m2.x_rows and m1.z_rows == m2.z_rows


def find_witness(g: geo.Geometry, sector: str, names: tuple[str, ...],
                 max_cells: int = DEFAULT_MAX_CELLS,
                 cx: CellComplex | None = None) -> SurfaceWitness | None:
    """Witness 2-chain realizing the operator with the given label support."""
    if cx is None:
        cx = build_complex(g, max_cells=max_cells)
    kind = geo.PRIMAL if sector == "X" else geo.DUAL
    chain: list[Pt] = []
    for n in names:
        chain.extend(cx.patterns[(n, sector)])
    return surface_exists(cx, CorrelationSurfaceProblem(kind=kind, target=tuple(chain)))


def maps_equal(m1: LogicalMap, m2: LogicalMap, *, swap_sectors: bool = False) -> bool:
    """Label-level map equality (port kinds are not compared; a recorded
    sublattice swap exchanges the sectors)."""
    if m1.labels != m2.labels or m1.n_inputs != m2.n_inputs:
        return False
    if swap_sectors:
        return m1.x_rows == m2.z_rows and m1.z_rows == m2.x_rows
    return m1.x_rows == m2.x_rows and m1.z_rows == m2.z_rows


# ---------------------------------------------------------------------------
# region interface relations (local equivalence checking)


@dataclass(frozen=True)
class RegionRelation:
    """Canonical realizable subspace of a sub-box, expressed over its
    interface edges plus any pattern chains enclosed by the region."""

    interface: tuple[tuple[Pt, ...], tuple[Pt, ...]]  # per kind, sorted edges
    enclosed: tuple[tuple[str, str], ...]  # (label, pauli) keys inside
    rows: tuple[tuple[int, ...], tuple[int, ...]]  # per kind, canonical


def region_relation(g: geo.Geometry, lo: geo.Voxel, hi: geo.Voxel,
                    max_cells: int = DEFAULT_MAX_CELLS) -> RegionRelation | None:
    """Interface relation of the sub-box [lo, hi) in cell coordinates.

    Returns None when a port/injection pattern straddles the region cut;
    callers should then fall back to a global comparison.
    """
    geo.require_valid(g)
    origin = g.bounding_region.lo
    box = g.bounding_region
    lo = tuple(max(lo[a], box.lo[a]) for a in _AXES)
    hi = tuple(min(hi[a], box.hi[a]) for a in _AXES)
    d_lo = tuple(2 * (lo[a] - origin[a]) for a in _AXES)
    d_hi = tuple(2 * (hi[a] - origin[a]) for a in _AXES)
    n_points = 1
    for a in _AXES:
        n_points *= d_hi[a] - d_lo[a] + 1
    if n_points > max_cells:
        raise ResourceCapExceeded(f"region holds {n_points} points (cap {max_cells})")

    full_max = tuple(2 * (box.hi[a] - origin[a]) for a in _AXES)
    # interface planes: region faces that are not geometry walls
    cut_planes = []
    for a in _AXES:
        if d_lo[a] > 0:
            cut_planes.append((a, d_lo[a]))
        if d_hi[a] < full_max[a]:
            cut_planes.append((a, d_hi[a]))

    def in_region(p: Pt) -> bool:
        return all(d_lo[a] <= p[a] <= d_hi[a] for a in _AXES)

    def on_cut(p: Pt) -> bool:
        return any(p[a] == plane for a, plane in cut_planes)

    pinches = {inj.voxel: inj for inj in g.injections}
    matter: dict[str, set[Pt]] = {geo.PRIMAL: set(), geo.DUAL: set()}
    for solid in g.defects:
        for vox in solid.voxels:
            if vox in pinches and pinches[vox].host_defect == solid.id:
                continue
            matter[solid.kind].add(_matter_cube(solid.kind, vox, origin))
    closure = {k: _closure(matter[k]) for k in geo.KINDS}
    cores: dict[str, set[Pt]] = {geo.PRIMAL: set(), geo.DUAL: set()}
    patterns: dict[tuple[str, str], tuple[Pt, ...]] = {}
    for inj in g.injections:
        kind, core, _ = injection_core(g, inj, origin)
        cores[kind].add(core)
        for pauli, chain in injection_patterns(g, inj, origin).items():
            patterns[(inj.label, pauli)] = chain
    for port in g.ports:
        for pauli, chain in port_patterns(g, port, origin, full_max).items():
            patterns[(port.label, pauli)] = chain

    enclosed: list[tuple[str, str]] = []
    for key, chain in sorted(patterns.items()):
        inside = [p for p in chain if in_region(p)]
        if not inside:
            continue
        if len(inside) != len(chain) or any(on_cut(p) for p in chain):
            return None  # pattern straddles the cut
        enclosed.append(key)

    interface: list[tuple[Pt, ...]] = []
    rows: list[tuple[int, ...]] = []
    for kind in geo.KINDS:
        other = geo.DUAL if kind == geo.PRIMAL else geo.PRIMAL
        slack = closure[kind]
        blocked = closure[other] | cores[other]

        edges: list[Pt] = []
        cut_edges: list[Pt] = []
        for par in _edge_parities(kind):
            for p in _enumerate_class_window(d_lo, d_hi, par):
                if p in slack:
                    continue
                if not _cell_fits(p, _extent_axes(kind, p), full_max):
                    continue
                edges.append(p)
                if on_cut(p):
                    cut_edges.append(p)
        edges.sort(key=_band_key)
        cut_edges.sort(key=_band_key)
        edge_index = {p: i for i, p in enumerate(edges)}

        face_vectors: list[int] = []
        for par in _face_parities(kind):
            for p in _enumerate_class_window(d_lo, d_hi, par):
                if p in blocked:
                    continue
                ext_axes = _extent_axes(kind, p)
                if not _cell_fits(p, ext_axes, full_max):
                    continue
                if on_cut(p):
                    continue  # surfaces may not lie in the interface itself
                if kind == geo.PRIMAL:
                    fixed = next(a for a in _AXES if a not in ext_axes)
                    if p[fixed] == 0 or p[fixed] == full_max[fixed]:
                        continue
                vec = 0
                ok = True
                for e in boundary_edges(kind, p):
                    if not in_region(e):
                        ok = False
                        break
                    idx = edge_index.get(e)
                    if idx is not None:
                        vec |= 1 << idx
                if ok:
                    face_vectors.append(vec)

        sector_pauli = "X" if kind == geo.PRIMAL else "Z"
        chains: list[tuple[Pt, ...]] = [
            patterns[(label, pauli)] for label, pauli in enclosed if pauli == sector_pauli
        ]
        chains += [(p,) for p in cut_edges]
        face_basis = Basis()
        for vec in face_vectors:
            face_basis.insert(vec)
        residuals = []
        for ch in chains:
            vec = 0
            for p in ch:
                idx = edge_index.get(p)
                if idx is not None:
                    vec ^= 1 << idx
            residuals.append(face_basis.reduce(vec))
        canon = Basis()
        for combo in nullspace_combos(residuals):
            canon.insert(combo)
        interface.append(tuple(cut_edges))
        rows.append(tuple(canon.canonical_rows()))

    return RegionRelation(
        interface=(interface[0], interface[1]),
        enclosed=tuple(enclosed),
        rows=(rows[0], rows[1]),
    )


def _enumerate_class_window(d_lo: Pt, d_hi: Pt, parity) -> list[Pt]:
    ranges = []
    for a in _AXES:
        start = d_lo[a]
        if start % 2 != parity[a]:
            start += 1
        ranges.append(range(start, d_hi[a] + 1, 2))
    return [(x, y, z) for x in ranges[0] for y in ranges[1] for z in ranges[2]]

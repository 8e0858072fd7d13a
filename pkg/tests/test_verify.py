"""Correlation-surface engine: complexes, solver, witnesses, logical maps."""

from __future__ import annotations

import itertools
import random

import pytest

from braidbench import geometry as geo
from braidbench import verify as vf
from braidbench.corpus import minimum_cnot
from braidbench.errors import ResourceCapExceeded, SignatureMismatch, UnderdeterminedStructure


def wire(kind: str, length: int = 5) -> geo.Geometry:
    rails_a = frozenset((2, 2, z) for z in range(length))
    rails_b = frozenset((2, 4, z) for z in range(length))
    return geo.Geometry(
        bounding_region=geo.BoundingRegion((0, 0, 0), (6, 8, length)),
        defects=(
            geo.DefectSolid("a", kind, rails_a),
            geo.DefectSolid("b", kind, rails_b),
        ),
        ports=(
            geo.Port("p_in", "in", kind, "input", "z-", ((2, 2, 0), (2, 4, 0))),
            geo.Port("p_out", "out", kind, "output", "z+",
                     ((2, 2, length - 1), (2, 4, length - 1))),
        ),
    )


# ---------------------------------------------------------------------------
# complex sanity


def test_boundary_of_boundary_is_zero():
    for kind in geo.KINDS:
        assert vf.check_boundary_of_boundary(vf.build_complex(wire(kind)))


def test_empty_region_cell_counts():
    g = geo.Geometry(
        geo.BoundingRegion((0, 0, 0), (2, 2, 2)),
        (geo.DefectSolid("d", "primal", frozenset({(0, 0, 0)})),),
    )
    cx = vf.build_complex(g)
    # closed-form cubical counts on the doubled 4x4x4 box
    n = 4
    pts = (n + 1) ** 3
    # primal edges: one odd coordinate
    odd, even = n // 2, n // 2 + 1
    primal_edges = 3 * odd * even * even
    # interior primal faces exclude the six wall planes
    primal_faces = 3 * odd * odd * (even - 2)
    sec = cx.sector("primal")
    assert len(sec.edges) + len(sec.slack & set(sec.edge_index)) <= primal_edges
    total_primal_edges = sum(
        1 for par in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        for _ in vf._enumerate_class(cx.box_max, par)
    )
    assert total_primal_edges == primal_edges
    assert pts == (cx.box_max[0] + 1) * (cx.box_max[1] + 1) * (cx.box_max[2] + 1)


def test_defect_flags_cover_ring():
    g = wire("primal")
    cx = vf.build_complex(g)
    sec = cx.sector("primal")
    # every matter cube's own edges are slack
    for v in g.defects[0].voxels:
        centre = tuple(2 * c + 1 for c in v)
        assert centre not in sec.edge_index or centre in sec.slack


def test_resource_cap():
    g = wire("primal", length=5)
    with pytest.raises(ResourceCapExceeded):
        vf.build_complex(g, max_cells=10)


# ---------------------------------------------------------------------------
# surface existence


def test_identity_wire_maps():
    for kind in geo.KINDS:
        lm = vf.verify(wire(kind))
        assert lm.realizes("X", ("in", "out"))
        assert lm.realizes("Z", ("in", "out"))
        assert not lm.realizes("X", ("in",))
        assert not lm.realizes("Z", ("out",))


def test_flat_sheet_witness_exists():
    g = wire("primal")
    cx = vf.build_complex(g)
    chain = cx.patterns[("in", "Z")] + cx.patterns[("out", "Z")]
    w = vf.surface_exists(cx, vf.CorrelationSurfaceProblem("dual", chain))
    assert w is not None
    assert vf.witness_boundary_matches(cx, w, chain)


def test_unbalanced_boundary_has_no_surface():
    g = wire("primal")
    cx = vf.build_complex(g)
    w = vf.surface_exists(
        cx, vf.CorrelationSurfaceProblem("dual", cx.patterns[("in", "Z")])
    )
    assert w is None


def test_underdetermined_structure_raises():
    # a dangling extra port on empty space cannot be reached
    g = wire("primal")
    extra = geo.DefectSolid("stub", "primal", frozenset({(4, 6, 0)}))
    g2 = geo.Geometry(
        g.bounding_region,
        g.defects + (extra,),
        g.ports + (geo.Port("px", "x", "primal", "input", "z-", ((4, 6, 0), (2, 2, 0))),),
    )
    with pytest.raises(UnderdeterminedStructure):
        vf.verify(g2)


def test_cnot_fixture_map():
    lm = vf.verify(minimum_cnot())
    assert lm.realizes("X", ("c", "C", "T"))
    assert lm.realizes("X", ("t", "T"))
    assert lm.realizes("Z", ("c", "C"))
    assert lm.realizes("Z", ("t", "C", "T"))
    assert not lm.realizes("X", ("c", "C"))
    assert not lm.realizes("Z", ("t", "T"))
    assert lm.is_symplectic()


def test_equivalent_reflexive_and_distinct():
    g = wire("primal")
    assert vf.equivalent(g, g)
    assert vf.equivalent(g, g.translated((1, 1, 0)))
    g2 = minimum_cnot()
    with pytest.raises(SignatureMismatch):
        vf.equivalent(g, g2)


def test_verify_translation_invariant():
    g = minimum_cnot()
    m1 = vf.verify(g)
    m2 = vf.verify(g.translated((2, 1, 3)))
    assert m1.x_rows == m2.x_rows and m1.z_rows == m2.z_rows


# ---------------------------------------------------------------------------
# solver vs exhaustive enumeration


def brute_force_exists(face_vectors: list[int], target: int) -> bool:
    acc_all = 0
    n = len(face_vectors)
    # Gray-code enumeration of all subsets
    acc = 0
    prev = 0
    for k in range(1, 2**n):
        gray = k ^ (k >> 1)
        bit = (gray ^ prev).bit_length() - 1
        prev = gray
        acc ^= face_vectors[bit]
        if acc == target:
            return True
    return target == 0


def random_small_sector(rng: random.Random):
    """A random sub-collection of faces from a small complex, plus a target
    chain sampled from edge space."""
    g = geo.Geometry(
        geo.BoundingRegion((0, 0, 0), (3, 3, 3)),
        (geo.DefectSolid("d", "primal", frozenset({(1, 1, 1)})),),
    )
    cx = vf.build_complex(g)
    sec = cx.sector(rng.choice(list(geo.KINDS)))
    k = rng.randrange(4, 17)
    idxs = rng.sample(range(len(sec.face_vectors)), min(k, len(sec.face_vectors)))
    vectors = [sec.face_vectors[i] for i in idxs]
    if rng.random() < 0.5:
        pick = rng.getrandbits(len(vectors))
        target = 0
        for i, v in enumerate(vectors):
            if (pick >> i) & 1:
                target ^= v
    else:
        bits = rng.sample(range(len(sec.edges)), rng.randrange(1, 5))
        target = 0
        for b in bits:
            target |= 1 << b
    return vectors, target


def test_solver_matches_enumeration():
    rng = random.Random(99)
    for _ in range(100):
        vectors, target = random_small_sector(rng)
        basis = vf.TrackedBasis()
        for v in vectors:
            basis.insert(v)
        residual, _ = basis.reduce(target)
        assert (residual == 0) == brute_force_exists(vectors, target)

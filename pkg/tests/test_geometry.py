"""Geometry model: validation, volume, physical scale, serialization."""

from __future__ import annotations

import pytest

from braidbench import geometry as geo
from braidbench.corpus import minimum_cnot
from braidbench.errors import GeometryFormatError, InvalidDistance, ValidationFailed


def ring(kind="primal", z=2) -> geo.Geometry:
    cells = set()
    for x in range(2, 7):
        cells.add((x, 2, z))
        cells.add((x, 6, z))
    for y in range(3, 6):
        cells.add((2, y, z))
        cells.add((6, y, z))
    return geo.Geometry(
        bounding_region=geo.BoundingRegion((0, 0, 0), (9, 9, 5)),
        defects=(geo.DefectSolid("ring", kind, frozenset(cells)),),
    )


def test_wellformed_ring_has_empty_report():
    assert geo.validate(ring()).ok


def test_disconnected_solid_reported():
    g = ring()
    broken = set(g.defects[0].voxels)
    broken.discard((4, 2, 2))  # cutting a ring once leaves an arc...
    g2 = geo.Geometry(g.bounding_region, (geo.DefectSolid("ring", "primal", frozenset(broken)),))
    assert geo.validate(g2).ok
    broken.discard((4, 6, 2))  # ...cutting twice separates it
    g3 = geo.Geometry(g.bounding_region, (geo.DefectSolid("ring", "primal", frozenset(broken)),))
    report = geo.validate(g3)
    assert any(v.code == "disconnected" for v in report.violations)


def test_overlap_reported():
    g = ring()
    other = geo.DefectSolid("blob", "primal", frozenset({(2, 2, 2), (3, 2, 2)}))
    g2 = geo.Geometry(g.bounding_region, g.defects + (other,))
    report = geo.validate(g2)
    assert any(v.code == "overlap" for v in report.violations)


def test_out_of_bounds_reported():
    g = geo.Geometry(
        geo.BoundingRegion((0, 0, 0), (2, 2, 2)),
        (geo.DefectSolid("d", "dual", frozenset({(0, 0, 0), (0, 0, 1), (0, 0, 2)})),),
    )
    assert any(v.code == "out-of-bounds" for v in geo.validate(g).violations)


def test_volume_requires_wellformed():
    g = geo.Geometry(
        geo.BoundingRegion((0, 0, 0), (4, 4, 4)),
        (geo.DefectSolid("d", "primal", frozenset({(0, 0, 0), (2, 2, 2)})),),
    )
    with pytest.raises(ValidationFailed):
        geo.volume(g)


def test_volume_translation_invariant():
    g = minimum_cnot()
    v = geo.volume(g)
    assert v == geo.volume(g.translated((3, 5, 7)))
    assert v == geo.volume(g.translated((-1, 0, 2)))


def test_minimum_cnot_volume_floor():
    assert geo.volume(minimum_cnot()) >= 12


def test_sandwich_cells_are_claimed():
    # two rails one cell apart claim the clearance row between them
    g = geo.Geometry(
        geo.BoundingRegion((0, 0, 0), (5, 7, 5)),
        (
            geo.DefectSolid("a", "primal", frozenset((2, 2, z) for z in range(3))),
            geo.DefectSolid("b", "primal", frozenset((2, 4, z) for z in range(3))),
        ),
    )
    assert (2, 3, 0) in geo.claimed_cells(g)


def test_physical_scale_formulas():
    g = ring()
    assert geo.physical_scale(g, 3).min_errors_to_fail == 2
    assert geo.physical_scale(g, 7).min_errors_to_fail == 4
    with pytest.raises(InvalidDistance):
        geo.physical_scale(g, 2)


def test_physical_scale_extents():
    g = minimum_cnot()
    d = 15
    est = geo.physical_scale(g, d)
    # hand multiplication: tiles -> 5d/4 units per tile axis, 2 qubits per d
    cells = geo.claimed_cells(g)
    lo = tuple(min(c[a] for c in cells) for a in range(3))
    hi = tuple(max(c[a] for c in cells) for a in range(3))
    tiles = tuple(-(-(hi[a] - lo[a] + 1) // geo.TILE) for a in range(3))
    assert est.tile_extents == tiles
    for axis in range(2):
        units = -(-5 * tiles[axis] // 4)
        assert est.qubit_extents[axis] == 2 * units * d
    assert est.duration_rounds == -(-5 * tiles[2] // 4) * d


def test_roundtrip_identity(tmp_path):
    g = minimum_cnot()
    path = tmp_path / "g.json"
    geo.save(g, path)
    g2 = geo.load(path)
    assert g2 == g


def test_truncated_file_is_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "braidbench-geometry", "version": 1, ')
    with pytest.raises(GeometryFormatError):
        geo.load(path)


def test_unknown_version_rejected(tmp_path):
    path = tmp_path / "v99.json"
    g = minimum_cnot()
    doc = geo.to_dict(g)
    doc["version"] = 99
    import json

    path.write_text(json.dumps(doc))
    with pytest.raises(GeometryFormatError):
        geo.load(path)

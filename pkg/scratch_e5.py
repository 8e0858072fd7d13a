"""Braided CNOT, radius-2 open spiral over three time layers.

Same-kind solids (and the spiral's own start/end) keep Chebyshev distance
>= 2 so their slack regions stay disconnected.
"""

from braidbench import geometry as geo
from scratch_probe import probe


def braided_cnot(L: int = 9, z0: int = 3):
    A = (4, 4)
    B = (4, 6)
    C = (7, 4)
    D = (7, 6)

    a = frozenset((*A, z) for z in range(L))
    b = frozenset((*B, z) for z in range(L))
    d = frozenset((*D, z) for z in range(L))

    c_vox = set()
    c_vox.update((*C, z) for z in range(0, z0 + 1))
    lo = [(6, 4), (6, 3), (6, 2), (5, 2), (4, 2), (3, 2), (2, 2), (2, 3), (2, 4)]
    hi = [(2, 4), (2, 5), (3, 5), (4, 5), (5, 5), (5, 4), (6, 4)]
    c_vox.update((x, y, z0) for x, y in lo)
    c_vox.add((2, 4, z0 + 1))  # riser
    c_vox.update((x, y, z0 + 2) for x, y in hi)
    c_vox.update((*C, z) for z in range(z0 + 2, L))

    box = geo.BoundingRegion((0, 0, 0), (12, 12, L))
    return geo.Geometry(
        bounding_region=box,
        defects=(
            geo.DefectSolid("ctrl_a", "primal", a),
            geo.DefectSolid("ctrl_b", "primal", b),
            geo.DefectSolid("tgt_c", "dual", frozenset(c_vox)),
            geo.DefectSolid("tgt_d", "dual", d),
        ),
        ports=(
            geo.Port("c_in", "c", "primal", "input", "z-", ((*A, 0), (*B, 0))),
            geo.Port("c_out", "C", "primal", "output", "z+", ((*A, L - 1), (*B, L - 1))),
            geo.Port("t_in", "t", "dual", "input", "z-", ((*C, 0), (*D, 0))),
            geo.Port("t_out", "T", "dual", "output", "z+", ((*C, L - 1), (*D, L - 1))),
        ),
    )


if __name__ == "__main__":
    import time

    t = time.time()
    probe(braided_cnot())
    print(f"{time.time() - t:.1f}s")

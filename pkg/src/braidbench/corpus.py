"""Corpus builders: the reference circuits and geometries the test suite
and the CLI examples are pinned against.

Geometric fixtures are constructed programmatically so they can be
regenerated; the shipped JSON files under fixtures/ are their serialized
form.
"""

from __future__ import annotations

from . import geometry as geo
from . import tableau as tb

CNOT_MAP_ROWS = {
    "X": (("c", "C", "T"), ("t", "T")),
    "Z": (("c", "C"), ("t", "C", "T")),
}


def minimum_cnot(L: int = 9, z0: int = 3) -> geo.Geometry:
    """Minimum-volume braided CNOT: primal control pair, dual target pair,
    the target's near rail spiralling once around the control's near rail.
    Occupies exactly 12 pitch tiles."""
    A, B, C, D = (4, 4), (4, 6), (7, 4), (7, 6)
    a = frozenset((*A, z) for z in range(L))
    b = frozenset((*B, z) for z in range(L))
    d = frozenset((*D, z) for z in range(L))
    c_vox: set[tuple[int, int, int]] = set()
    c_vox.update((*C, z) for z in range(0, z0 + 1))
    lo = [(6, 4), (6, 3), (6, 2), (5, 2), (4, 2), (3, 2), (2, 2), (2, 3), (2, 4)]
    hi = [(2, 4), (2, 5), (3, 5), (4, 5), (5, 5), (5, 4), (6, 4)]
    c_vox.update((x, y, z0) for x, y in lo)
    c_vox.add((2, 4, z0 + 1))
    c_vox.update((x, y, z0 + 2) for x, y in hi)
    c_vox.update((*C, z) for z in range(z0 + 2, L))
    return geo.Geometry(
        bounding_region=geo.BoundingRegion((0, 0, 0), (12, 12, L)),
        defects=(
            geo.DefectSolid("ctrl_a", geo.PRIMAL, a, tags=("cnot",)),
            geo.DefectSolid("ctrl_b", geo.PRIMAL, b, tags=("cnot",)),
            geo.DefectSolid("tgt_c", geo.DUAL, frozenset(c_vox), tags=("cnot",)),
            geo.DefectSolid("tgt_d", geo.DUAL, d, tags=("cnot",)),
        ),
        ports=(
            geo.Port("c_in", "c", geo.PRIMAL, "input", "z-", ((*A, 0), (*B, 0))),
            geo.Port("c_out", "C", geo.PRIMAL, "output", "z+", ((*A, L - 1), (*B, L - 1))),
            geo.Port("t_in", "t", geo.DUAL, "input", "z-", ((*C, 0), (*D, 0))),
            geo.Port("t_out", "T", geo.DUAL, "output", "z+", ((*C, L - 1), (*D, L - 1))),
        ),
    )

Y_QUBITS = ("out", "R", "O", "Y", "G", "B", "I", "V")

# CNOT fan-out wiring of the 7-into-1 distillation encoder: each |+> seed
# drives one weight-4 X check, the output line Bell-pairs with the encoded
# logical qubit.
_Y_FANOUT = (
    ("R", ("Y", "B", "V")),
    ("O", ("Y", "I", "V")),
    ("G", ("B", "I", "V")),
    ("out", ("Y", "B", "I")),
)


def distill_y_circuit() -> tb.CliffordCircuit:
    """Encoder consuming seven |Y> states to distill one better copy."""
    gates = [tb.init_plus(q) for q in ("out", "R", "O", "G")]
    gates += [tb.init_zero(q) for q in ("Y", "B", "I", "V")]
    for control, targets in _Y_FANOUT:
        gates += [tb.cnot(control, t) for t in targets]
    consumed = [q for q in Y_QUBITS if q != "out"]
    gates += [tb.s_injection(q) for q in consumed]
    gates += [tb.measure_x(q) for q in consumed]
    return tb.CliffordCircuit(qubits=Y_QUBITS, gates=tuple(gates))


def y_state_stabilizer_rows() -> list[str]:
    """Stabilizers of the encoder state just before state consumption,
    columns ordered as Y_QUBITS."""
    return [
        "XIIXIXXI",
        "IXIXIXIX",
        "IIXXIIXX",
        "ZZZZIIII",
        "IIIIXXXX",
        "IIZZZZII",
        "IZIZZIZI",
        "IZZIZIIZ",
    ]


def _vec_positions(mask_condition) -> list[int]:
    """Positions 1..15 (as 4-bit vectors) satisfying a predicate."""
    return [v for v in range(1, 16) if mask_condition(v)]


def a_qubit_name(v: int) -> str:
    return f"A{v:02d}"


def distill_a_circuit() -> tb.CliffordCircuit:
    """Encoder consuming fifteen |A> states to distill one better copy.

    Code qubits are indexed by the nonzero vectors of a 4-bit space; the
    four |+> seeds fan out the weight-8 X checks and the output line
    Bell-pairs with the logical qubit via the even-parity positions.
    """
    seeds = [1 << i for i in range(4)]  # e1..e4
    code = list(range(1, 16))
    qubits = ("out",) + tuple(a_qubit_name(v) for v in code)

    gates = [tb.init_plus("out")]
    gates += [tb.init_plus(a_qubit_name(s)) for s in seeds]
    gates += [tb.init_zero(a_qubit_name(v)) for v in code if v not in seeds]
    for i, s in enumerate(seeds):
        for v in _vec_positions(lambda v, i=i: (v >> i) & 1):
            if v != s:
                gates.append(tb.cnot(a_qubit_name(s), a_qubit_name(v)))
    even_parity = _vec_positions(lambda v: bin(v).count("1") % 2 == 0)
    for v in even_parity:
        gates.append(tb.cnot("out", a_qubit_name(v)))
    gates += [tb.t_injection(a_qubit_name(v)) for v in code]
    gates += [tb.measure_x(a_qubit_name(v)) for v in code]
    return tb.CliffordCircuit(qubits=qubits, gates=tuple(gates))

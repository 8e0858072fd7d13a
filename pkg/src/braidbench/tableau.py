"""Stabilizer-tableau simulation of init/CNOT circuits with injection
markers, plus the planar surface-code check pattern.

The supported gate set is CSS-preserving (initializations, CNOTs, X/Z
measurements, injection markers), so X-type and Z-type operators never mix
and the circuit-level logical map splits into two independent GF(2)
sectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import CircuitError, GeometryFormatError, UnsupportedGate
from .gf2 import Basis, nullspace_combos
from .verify import LogicalMap

CIRCUIT_FORMAT = "braidbench-circuit"
CIRCUIT_VERSION = 1

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True)
class PauliString:
    """n-qubit Pauli operator as X/Z bitmasks with a real sign."""

    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def letter(self, i: int) -> str:
        return _LETTERS[((self.x >> i) & 1, (self.z >> i) & 1)]

    def letters(self) -> str:
        return "".join(self.letter(i) for i in range(self.n))

    def weight(self) -> int:
        return bin(self.x | self.z).count("1")

    def commutes_with(self, other: "PauliString") -> bool:
        anti = bin(self.x & other.z).count("1") + bin(self.z & other.x).count("1")
        return anti % 2 == 0

    def key(self) -> int:
        """Unsigned GF(2) coordinates, X bits low, Z bits high."""
        return self.x | (self.z << self.n)

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.letters()


def pauli_from_letters(letters: str, sign: int = 1) -> PauliString:
    x = z = 0
    for i, ch in enumerate(letters):
        if ch in "XY":
            x |= 1 << i
        if ch in "ZY":
            z |= 1 << i
        if ch not in "IXYZ":
            raise ValueError(f"bad Pauli letter {ch!r}")
    return PauliString(n=len(letters), x=x, z=z, sign=sign)


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[str, ...]
    label: str = ""

    def render(self) -> str:
        body = ",".join(self.qubits)
        return f"{self.name}({body})"


INIT_GATES = ("init_zero", "init_plus")
MARKER_GATES = ("s_injection", "t_injection")
MEASURE_GATES = ("measure_x", "measure_z")
ALL_GATES = INIT_GATES + MARKER_GATES + MEASURE_GATES + ("cnot",)


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list over named qubits."""

    qubits: tuple[str, ...]
    gates: tuple[Gate, ...]

    def __post_init__(self):
        seen = set()
        for q in self.qubits:
            if q in seen:
                raise CircuitError(f"duplicate qubit label {q!r}")
            seen.add(q)
        initialized = set()
        terminated: dict[str, str] = {}
        for g in self.gates:
            if g.name not in ALL_GATES:
                raise UnsupportedGate(f"unknown gate {g.name!r}")
            for q in g.qubits:
                if q not in seen:
                    raise CircuitError(f"gate {g.render()} uses unknown qubit {q!r}")
                if q in terminated:
                    # a measurement may consume an injected qubit (the
                    # state-consumption step of the injection gadget)
                    if g.name in MEASURE_GATES and terminated[q] == "marker":
                        continue
                    raise CircuitError(f"gate {g.render()} uses terminated qubit {q!r}")
            if g.name in INIT_GATES:
                if g.qubits[0] in initialized:
                    raise CircuitError(f"qubit {g.qubits[0]!r} initialized twice")
                initialized.add(g.qubits[0])
            elif g.name == "cnot":
                c, t = g.qubits
                if c == t:
                    raise CircuitError("cnot control equals target")
            if g.name in MARKER_GATES:
                terminated[g.qubits[0]] = "marker"
            elif g.name in MEASURE_GATES:
                terminated[g.qubits[0]] = "measure"
        object.__setattr__(self, "_initialized", frozenset(initialized))
        object.__setattr__(self, "_terminated", dict(terminated))

    @property
    def index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.qubits)}

    def input_qubits(self) -> tuple[str, ...]:
        """Qubits used before (or without) initialization: open input lines."""
        return tuple(q for q in self.qubits if q not in self._initialized)

    def output_qubits(self) -> tuple[str, ...]:
        return tuple(q for q in self.qubits if q not in self._terminated)

    def injections(self) -> tuple[Gate, ...]:
        return tuple(g for g in self.gates if g.name in MARKER_GATES)

    def first_marker_index(self) -> int:
        for i, g in enumerate(self.gates):
            if g.name in MARKER_GATES or g.name in MEASURE_GATES:
                return i
        return len(self.gates)


def cnot(control: str, target: str) -> Gate:
    return Gate("cnot", (control, target))


def init_zero(q: str) -> Gate:
    return Gate("init_zero", (q,))


def init_plus(q: str) -> Gate:
    return Gate("init_plus", (q,))


def s_injection(q: str, label: str = "") -> Gate:
    return Gate("s_injection", (q,), label or q)


def t_injection(q: str, label: str = "") -> Gate:
    return Gate("t_injection", (q,), label or q)


def measure_x(q: str) -> Gate:
    return Gate("measure_x", (q,))


def measure_z(q: str) -> Gate:
    return Gate("measure_z", (q,))


# ---------------------------------------------------------------------------
# tableau propagation


@dataclass
class PauliTableau:
    """Stabilizer generators of a circuit prefix's state."""

    n: int
    qubits: tuple[str, ...]
    generators: list[PauliString] = field(default_factory=list)

    def check_commuting(self) -> bool:
        gens = self.generators
        return all(
            gens[i].commutes_with(gens[j])
            for i in range(len(gens))
            for j in range(i + 1, len(gens))
        )

    def canonical_keys(self, signed: bool = False) -> tuple[int, ...]:
        """Row-reduced group coordinates; equal groups give equal keys.

        With signed=True each key carries the sign in its top bit, so two
        canonical forms agree only if the signed groups agree.
        """
        width = 2 * self.n
        basis = Basis()
        if not signed:
            for g in self.generators:
                basis.insert(g.key())
            return tuple(basis.canonical_rows())
        sign_bit = 1 << width
        rows = [g.key() | (sign_bit if g.sign < 0 else 0) for g in self.generators]
        # reduce unsigned parts; signs ride along in the top bit
        pivots: dict[int, int] = {}
        out = []
        for row in rows:
            v = row
            changed = True
            while changed:
                changed = False
                unsigned = v & (sign_bit - 1)
                if not unsigned:
                    break
                p = (unsigned & -unsigned).bit_length() - 1
                if p in pivots:
                    v ^= pivots[p]
                    changed = True
                else:
                    pivots[p] = v
                    break
        for p in sorted(pivots):
            out.append(pivots[p])
        return tuple(out)

    def group_equal(self, other: "PauliTableau", signed: bool = False) -> bool:
        return self.canonical_keys(signed) == other.canonical_keys(signed)

    def contains(self, p: PauliString) -> bool:
        basis = Basis()
        for g in self.generators:
            basis.insert(g.key())
        return basis.contains(p.key())

    def render(self) -> str:
        """Grid rendering: one column per qubit, one row per generator."""
        width = max((len(q) for q in self.qubits), default=1)
        header = " ".join(q.rjust(width) for q in self.qubits)
        lines = [header]
        for g in self.generators:
            cells = []
            for i in range(self.n):
                ch = g.letter(i)
                cells.append((ch if ch != "I" else ".").rjust(width))
            lines.append(" ".join(cells))
        return "\n".join(lines)


def propagate(circuit: CliffordCircuit, upto: int | None = None) -> PauliTableau:
    """Stabilizer generators after the first `upto` gates.

    The prefix may contain only initializations and CNOTs; `upto=None`
    means the whole prefix up to the first marker or measurement.
    """
    if upto is None:
        upto = circuit.first_marker_index()
    if not 0 <= upto <= len(circuit.gates):
        raise CircuitError(f"gate index {upto} out of range")
    idx = circuit.index
    n = len(circuit.qubits)
    initialized: set[str] = set()
    gens: list[list[int]] = []  # [x, z, sign]
    for g in circuit.gates[:upto]:
        if g.name in INIT_GATES:
            q = idx[g.qubits[0]]
            bit = 1 << q
            if g.name == "init_zero":
                gens.append([0, bit, 1])
            else:
                gens.append([bit, 0, 1])
            initialized.add(g.qubits[0])
        elif g.name == "cnot":
            c, t = (idx[q] for q in g.qubits)
            for q in g.qubits:
                if q not in initialized and q in circuit._initialized:
                    raise CircuitError(f"qubit {q!r} used before its initialization")
            cb, tb = 1 << c, 1 << t
            for row in gens:
                x, z, sign = row
                if (x >> c) & 1 and (z >> t) & 1:
                    if not ((x >> t) & 1) ^ ((z >> c) & 1):
                        row[2] = -sign
                if (x >> c) & 1:
                    row[0] = x ^ tb
                if (z >> t) & 1:
                    row[1] = z ^ cb
        else:
            raise UnsupportedGate(
                f"gate {g.render()} not supported in tableau propagation prefix"
            )
    tab = PauliTableau(
        n=n,
        qubits=circuit.qubits,
        generators=[PauliString(n, x, z, s) for x, z, s in gens],
    )
    if not tab.check_commuting():
        raise AssertionError("tableau generators stopped commuting")
    return tab


# ---------------------------------------------------------------------------
# surface-code check pattern


def surface_code_tiling(rows: int, cols: int) -> list[PauliString]:
    """Measured check operators of a rows x cols planar patch.

    Qubits sit on the edges of a rows x cols vertex grid; X checks are
    vertex stars (weight 2 at corners, 3 on boundaries, 4 in the bulk) and
    Z checks are weight-4 plaquettes.  All checks commute and no check has
    weight above 4.
    """
    if rows < 2 or cols < 2:
        raise ValueError("patch needs at least a 2x2 vertex grid")
    h_edges = {}
    v_edges = {}
    k = 0
    for r in range(rows):
        for c in range(cols - 1):
            h_edges[(r, c)] = k
            k += 1
    for r in range(rows - 1):
        for c in range(cols):
            v_edges[(r, c)] = k
            k += 1
    n = k

    checks: list[PauliString] = []
    for r in range(rows):
        for c in range(cols):
            x = 0
            if c > 0:
                x |= 1 << h_edges[(r, c - 1)]
            if c < cols - 1:
                x |= 1 << h_edges[(r, c)]
            if r > 0:
                x |= 1 << v_edges[(r - 1, c)]
            if r < rows - 1:
                x |= 1 << v_edges[(r, c)]
            checks.append(PauliString(n, x=x))
    for r in range(rows - 1):
        for c in range(cols - 1):
            z = (
                (1 << h_edges[(r, c)])
                | (1 << h_edges[(r + 1, c)])
                | (1 << v_edges[(r, c)])
                | (1 << v_edges[(r, c + 1)])
            )
            checks.append(PauliString(n, z=z))
    return checks


# ---------------------------------------------------------------------------
# circuit-level logical map


def port_label_maps(circuit: CliffordCircuit) -> tuple[dict[str, str], dict[str, str]]:
    """Port labels for a circuit's open lines.

    A line that is both input and output (a passthrough wire) gets
    role-suffixed labels so port labels stay unique.
    """
    inputs = set(circuit.input_qubits())
    outputs = set(circuit.output_qubits())
    in_label = {q: (f"{q}_in" if q in outputs else q) for q in inputs}
    out_label = {q: (f"{q}_out" if q in inputs else q) for q in outputs}
    return in_label, out_label


def expected_logical_map(circuit: CliffordCircuit) -> LogicalMap:
    """Reference port-to-port map of a circuit, injections included as
    input ports.  This is the oracle the geometry verifier is checked
    against."""
    idx = circuit.index

    inputs = list(circuit.input_qubits())
    injection_labels = [g.label for g in circuit.injections()]
    outputs = list(circuit.output_qubits())
    dup = set(inputs) & set(injection_labels)
    if dup:
        raise CircuitError(f"injection labels collide with input lines: {sorted(dup)}")

    in_label, out_label = port_label_maps(circuit)
    in_labels = sorted([in_label[q] for q in inputs] + injection_labels)
    out_labels = sorted(out_label[q] for q in outputs)
    labels = in_labels + out_labels
    n_in = len(in_labels)
    port_bit = {l: i for i, l in enumerate(labels)}

    sectors: dict[str, tuple[int, ...]] = {}
    n = len(circuit.qubits)
    for sector in ("X", "Z"):
        # each tracked operator: (wire bitmask, port bitmask, dead bitmask)
        ops: list[list[int]] = []
        live = set()
        dead_count = 0
        for q in inputs:
            ops.append([1 << idx[q], 1 << port_bit[in_label[q]], 0])
            live.add(q)
        absorbing_init = "init_plus" if sector == "X" else "init_zero"
        absorbing_meas = "measure_x" if sector == "X" else "measure_z"
        for g in circuit.gates:
            if g.name in INIT_GATES:
                q = g.qubits[0]
                live.add(q)
                if g.name == absorbing_init:
                    ops.append([1 << idx[q], 0, 0])
            elif g.name == "cnot":
                c, t = (idx[q] for q in g.qubits)
                src, dst = (c, t) if sector == "X" else (t, c)
                for op in ops:
                    if (op[0] >> src) & 1:
                        op[0] ^= 1 << dst
            elif g.name in MARKER_GATES:
                q = g.qubits[0]
                qb = 1 << idx[q]
                pb = 1 << port_bit[g.label]
                for op in ops:
                    if op[0] & qb:
                        op[0] ^= qb
                        op[1] ^= pb
                live.discard(q)
            elif g.name in MEASURE_GATES:
                q = g.qubits[0]
                qb = 1 << idx[q]
                if g.name == absorbing_meas:
                    for op in ops:
                        op[0] &= ~qb
                else:
                    dbit = 1 << dead_count
                    dead_count += 1
                    for op in ops:
                        if op[0] & qb:
                            op[0] ^= qb
                            op[2] ^= dbit
                live.discard(q)
        for q in outputs:
            qb = 1 << idx[q]
            pb = 1 << port_bit[out_label[q]]
            for op in ops:
                if op[0] & qb:
                    op[0] ^= qb
                    op[1] ^= pb
        for op in ops:
            if op[0]:
                raise AssertionError("live wire escaped termination")
        # keep only combinations whose dead part cancels
        combos = nullspace_combos([op[2] for op in ops])
        basis = Basis()
        for combo in combos:
            acc = 0
            for i, op in enumerate(ops):
                if (combo >> i) & 1:
                    acc ^= op[1]
            basis.insert(acc)
        sectors[sector] = tuple(basis.canonical_rows())

    signature = []
    for q in inputs:
        signature.append((in_label[q], "open", "input"))
    for g in circuit.injections():
        signature.append((g.label, "injection", "input"))
    for q in outputs:
        signature.append((out_label[q], "open", "output"))
    return LogicalMap(
        signature=tuple(sorted(signature)),
        labels=tuple(labels),
        n_inputs=n_in,
        x_rows=sectors["X"],
        z_rows=sectors["Z"],
    )


def map_rows_equal(a: LogicalMap, b: LogicalMap) -> bool:
    """Sector-subspace equality on a shared label universe."""
    if a.labels != b.labels or a.n_inputs != b.n_inputs:
        return False
    return a.x_rows == b.x_rows and a.z_rows == b.z_rows


# ---------------------------------------------------------------------------
# serialization


def circuit_to_dict(c: CliffordCircuit) -> dict:
    gates = []
    for g in c.gates:
        entry: dict = {"gate": g.name}
        if g.name == "cnot":
            entry["control"], entry["target"] = g.qubits
        else:
            entry["qubit"] = g.qubits[0]
        if g.name in MARKER_GATES and g.label != g.qubits[0]:
            entry["label"] = g.label
        gates.append(entry)
    return {
        "format": CIRCUIT_FORMAT,
        "version": CIRCUIT_VERSION,
        "qubits": list(c.qubits),
        "gates": gates,
    }


def circuit_from_dict(doc: dict) -> CliffordCircuit:
    if doc.get("format", CIRCUIT_FORMAT) != CIRCUIT_FORMAT:
        raise GeometryFormatError(f"not a circuit document: {doc.get('format')!r}")
    if doc.get("version") != CIRCUIT_VERSION:
        raise GeometryFormatError(f"unsupported circuit version {doc.get('version')!r}")
    gates = []
    try:
        for entry in doc["gates"]:
            name = entry["gate"]
            if name == "cnot":
                gates.append(Gate(name, (entry["control"], entry["target"])))
            elif name in MARKER_GATES:
                q = entry["qubit"]
                gates.append(Gate(name, (q,), entry.get("label", q)))
            else:
                gates.append(Gate(name, (entry["qubit"],)))
        return CliffordCircuit(qubits=tuple(doc["qubits"]), gates=tuple(gates))
    except KeyError as exc:
        raise GeometryFormatError(f"missing circuit field {exc.args[0]!r}") from exc


def save_circuit(c: CliffordCircuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_dict(c), fh, indent=1)
        fh.write("\n")


def load_circuit(path) -> CliffordCircuit:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GeometryFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return circuit_from_dict(doc)

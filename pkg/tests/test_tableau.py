"""Tableau propagation, check-pattern generation, and the state-vector oracle."""

from __future__ import annotations

import random

import numpy as np
import pytest

from braidbench import tableau as tb
from braidbench.corpus import distill_y_circuit, y_state_stabilizer_rows
from braidbench.errors import CircuitError, UnsupportedGate


def statevector(circuit: tb.CliffordCircuit, upto: int | None = None) -> np.ndarray:
    """Brute-force amplitude simulation of an init/CNOT prefix."""
    if upto is None:
        upto = circuit.first_marker_index()
    n = len(circuit.qubits)
    idx = circuit.index
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for g in circuit.gates[:upto]:
        if g.name == "init_zero":
            continue  # |0> is the default
        if g.name == "init_plus":
            q = idx[g.qubits[0]]
            out = np.zeros_like(psi)
            for b in range(2**n):
                if not (b >> q) & 1:
                    amp = psi[b]
                    if amp:
                        out[b] += amp / np.sqrt(2)
                        out[b | (1 << q)] += amp / np.sqrt(2)
                else:
                    assert psi[b] == 0
            psi = out
        elif g.name == "cnot":
            c, t = (idx[q] for q in g.qubits)
            out = np.zeros_like(psi)
            for b in range(2**n):
                amp = psi[b]
                if amp:
                    out[b ^ ((1 << t) if (b >> c) & 1 else 0)] += amp
            psi = out
        else:
            raise AssertionError(f"oracle got unsupported gate {g.name}")
    return psi


def apply_pauli(psi: np.ndarray, p: tb.PauliString) -> np.ndarray:
    n = p.n
    out = np.zeros_like(psi)
    for b in range(2**n):
        amp = psi[b]
        if not amp:
            continue
        phase = 1.0 + 0.0j
        target = b
        for q in range(n):
            xq = (p.x >> q) & 1
            zq = (p.z >> q) & 1
            bit = (b >> q) & 1
            if xq and zq:
                phase *= 1j * (-1 if bit else 1)
                target ^= 1 << q
            elif xq:
                target ^= 1 << q
            elif zq and bit:
                phase *= -1
        out[target] += p.sign * phase * amp
    return out


def stabilizes(psi: np.ndarray, p: tb.PauliString) -> bool:
    return bool(np.allclose(apply_pauli(psi, p), psi))


def random_init_cnot_circuit(rng: random.Random, n_qubits: int, n_gates: int
                             ) -> tb.CliffordCircuit:
    qubits = tuple(f"q{i}" for i in range(n_qubits))
    gates = [
        tb.init_plus(q) if rng.random() < 0.5 else tb.init_zero(q) for q in qubits
    ]
    for _ in range(n_gates):
        c, t = rng.sample(range(n_qubits), 2)
        gates.append(tb.cnot(qubits[c], qubits[t]))
    return tb.CliffordCircuit(qubits=qubits, gates=tuple(gates))


def test_single_qubit_inits():
    c = tb.CliffordCircuit(("q",), (tb.init_zero("q"),))
    assert [str(g) for g in tb.propagate(c).generators] == ["+Z"]
    c = tb.CliffordCircuit(("q",), (tb.init_plus("q"),))
    assert [str(g) for g in tb.propagate(c).generators] == ["+X"]


def test_bell_state_stabilizers():
    c = tb.CliffordCircuit(
        ("a", "b"), (tb.init_plus("a"), tb.init_zero("b"), tb.cnot("a", "b"))
    )
    t = tb.propagate(c)
    want = tb.PauliTableau(
        2, ("a", "b"),
        [tb.pauli_from_letters("XX"), tb.pauli_from_letters("ZZ")],
    )
    assert t.group_equal(want, signed=True)


def test_propagate_rejects_marker_in_prefix():
    c = tb.CliffordCircuit(
        ("a",), (tb.init_plus("a"), tb.s_injection("a"))
    )
    with pytest.raises(UnsupportedGate):
        tb.propagate(c, upto=2)
    # default prefix stops before the marker
    assert len(tb.propagate(c).generators) == 1


def test_uninitialized_cnot_rejected():
    c = tb.CliffordCircuit(
        ("a", "b"),
        (tb.cnot("a", "b"), tb.init_zero("a"), tb.init_zero("b")),
    )
    with pytest.raises(CircuitError):
        tb.propagate(c, upto=3)


def test_distillation_circuit_shape():
    c = distill_y_circuit()
    assert len(c.qubits) == 8
    names = [g.name for g in c.gates]
    assert names.count("cnot") == 12
    assert names.count("init_zero") == 4
    assert names.count("init_plus") == 4
    assert names.count("s_injection") == 7
    assert names.count("measure_x") == 7


def test_distillation_stabilizers_group_equal():
    c = distill_y_circuit()
    tab = tb.propagate(c)
    expected = tb.PauliTableau(
        8, c.qubits,
        [tb.pauli_from_letters(s) for s in y_state_stabilizer_rows()],
    )
    assert expected.check_commuting()
    assert tab.group_equal(expected)  # sign-insensitive group equality


def test_propagate_matches_statevector_oracle():
    rng = random.Random(2024)
    for trial in range(500):
        n = rng.randrange(2, 6)
        c = random_init_cnot_circuit(rng, n, rng.randrange(1, 13))
        tab = tb.propagate(c, upto=len(c.gates))
        psi = statevector(c, upto=len(c.gates))
        assert len(tab.generators) == n
        for g in tab.generators:
            assert stabilizes(psi, g), f"trial {trial}: {g} fails"


def test_statevector_group_extraction_small():
    # exhaustive signed-group check on a fixed 3-qubit circuit
    c = tb.CliffordCircuit(
        ("a", "b", "c"),
        (
            tb.init_plus("a"), tb.init_zero("b"), tb.init_zero("c"),
            tb.cnot("a", "b"), tb.cnot("b", "c"),
        ),
    )
    tab = tb.propagate(c, upto=5)
    psi = statevector(c, upto=5)
    found = []
    for x in range(8):
        for z in range(8):
            for sign in (1, -1):
                p = tb.PauliString(3, x, z, sign)
                if stabilizes(psi, p):
                    found.append(p)
    assert len(found) == 8  # full stabilizer group of a 3-qubit state
    for p in found:
        assert tab.contains(p)


def test_tiling_commutes_and_weights():
    for rows, cols in ((2, 2), (3, 4), (5, 5), (4, 6)):
        checks = tb.surface_code_tiling(rows, cols)
        weights = sorted({c.weight() for c in checks})
        assert max(weights) == 4
        assert set(weights) <= {2, 3, 4}
        for i in range(len(checks)):
            for j in range(i + 1, len(checks)):
                assert checks[i].commutes_with(checks[j])


def test_tiling_5x5_histogram():
    checks = tb.surface_code_tiling(5, 5)
    hist: dict[int, int] = {}
    for c in checks:
        hist[c.weight()] = hist.get(c.weight(), 0) + 1
    assert set(hist) == {2, 3, 4}
    assert hist[2] == 4          # corner stars
    assert hist[3] == 12         # boundary stars
    assert hist[4] == 9 + 16     # bulk stars + plaquettes


def test_tiling_rejects_degenerate():
    with pytest.raises(ValueError):
        tb.surface_code_tiling(1, 5)


def test_circuit_roundtrip(tmp_path):
    c = distill_y_circuit()
    path = tmp_path / "c.json"
    tb.save_circuit(c, path)
    assert tb.load_circuit(path) == c

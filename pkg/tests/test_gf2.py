"""Unit and randomized tests for the GF(2) bitset algebra."""

from __future__ import annotations

import random

from braidbench import gf2


def test_lowest_bit():
    assert gf2.lowest_bit(1) == 0
    assert gf2.lowest_bit(0b1010100) == 2


def test_basis_insert_and_contains():
    b = gf2.Basis()
    assert b.insert(0b011) is not None
    assert b.insert(0b110) is not None
    assert b.insert(0b101) is None  # dependent
    assert b.contains(0b101)
    assert not b.contains(0b100)
    assert b.rank == 2


def test_canonical_rows_independent_of_order():
    vecs = [0b1100, 0b0110, 0b1010, 0b0001]
    a = gf2.Basis()
    for v in vecs:
        a.insert(v)
    b = gf2.Basis()
    for v in reversed(vecs):
        b.insert(v)
    assert a.canonical_rows() == b.canonical_rows()
    assert a == b


def test_solve_in_span_roundtrip():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randrange(1, 10)
        gens = [rng.getrandbits(16) for _ in range(n)]
        pick = rng.getrandbits(n)
        target = 0
        for i in range(n):
            if (pick >> i) & 1:
                target ^= gens[i]
        combo = gf2.solve_in_span(gens, target)
        assert combo is not None
        rebuilt = 0
        for i in range(n):
            if (combo >> i) & 1:
                rebuilt ^= gens[i]
        assert rebuilt == target


def test_solve_in_span_detects_outside():
    assert gf2.solve_in_span([0b01], 0b10) is None


def test_nullspace_combos():
    rng = random.Random(13)
    for _ in range(100):
        n = rng.randrange(2, 12)
        gens = [rng.getrandbits(8) for _ in range(n)]
        combos = gf2.nullspace_combos(gens)
        # every combo really cancels
        for c in combos:
            acc = 0
            for i in range(n):
                if (c >> i) & 1:
                    acc ^= gens[i]
            assert acc == 0
        # dimension check: rank-nullity
        assert len(combos) == n - gf2.rank(gens)


def test_span_equal():
    assert gf2.span_equal([0b01, 0b10], [0b11, 0b01])
    assert not gf2.span_equal([0b01], [0b10])

"""GF(2) linear algebra on arbitrary-width integer bitsets.

Vectors are plain Python ints (bit i = coordinate i).  Row reduction keeps
a reduced echelon basis keyed by pivot position; pivots are always the
lowest set bit, which makes every result deterministic and reproducible.
"""

from __future__ import annotations


def lowest_bit(v: int) -> int:
    """Index of the lowest set bit of v (v must be nonzero)."""
    return (v & -v).bit_length() - 1


class Basis:
    """Incrementally built reduced row-echelon basis of a GF(2) subspace."""

    def __init__(self) -> None:
        self.rows: dict[int, int] = {}  # pivot bit -> row (fully reduced)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: int) -> int:
        """Residual of v after elimination against the basis."""
        rows = self.rows
        scanned = 0  # no pivot positions remain below this bit
        while True:
            rem = v >> scanned
            if not rem:
                return v
            p = scanned + lowest_bit(rem)
            row = rows.get(p)
            if row is not None:
                v ^= row  # row's lowest bit is p, so no bits below p appear
            scanned = p + 1

    def insert(self, v: int) -> int | None:
        """Add v to the span.  Returns its pivot, or None if dependent."""
        v = self.reduce(v)
        if not v:
            return None
        p = lowest_bit(v)
        # keep the basis fully reduced
        for q, row in self.rows.items():
            if (row >> p) & 1:
                self.rows[q] = row ^ v
        self.rows[p] = v
        return p

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def canonical_rows(self) -> list[int]:
        """Basis rows sorted by pivot; equal spans give equal lists."""
        return [self.rows[p] for p in sorted(self.rows)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Basis):
            return NotImplemented
        return self.rows == other.rows

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq


class TrackedBasis:
    """Row basis that remembers how each row combines the inserted vectors.

    Insertion order defines the combination coordinates: the k-th call to
    insert() contributes bit k of every combination word.
    """

    def __init__(self) -> None:
        self.rows: dict[int, tuple[int, int]] = {}  # pivot -> (row, combo)
        self.count = 0

    def reduce(self, v: int) -> tuple[int, int]:
        """Return (residual, combination) for v against the basis."""
        combo = 0
        rows = self.rows
        scanned = 0
        while True:
            rem = v >> scanned
            if not rem:
                return v, combo
            p = scanned + lowest_bit(rem)
            entry = rows.get(p)
            if entry is not None:
                v ^= entry[0]
                combo ^= entry[1]
            scanned = p + 1

    def insert(self, v: int) -> tuple[int, int]:
        """Insert v; returns (residual, combination-of-inputs).

        Residual 0 means v was dependent; the combination then expresses 0
        as (that combination of previously inserted vectors) + v.
        """
        tag = 1 << self.count
        self.count += 1
        res, combo = self.reduce(v)
        combo ^= tag
        if res:
            self.rows[lowest_bit(res)] = (res, combo)
        return res, combo


def span_equal(vectors_a: list[int], vectors_b: list[int]) -> bool:
    """Whether two vector lists span the same subspace."""
    a = Basis()
    for v in vectors_a:
        a.insert(v)
    b = Basis()
    for v in vectors_b:
        b.insert(v)
    return a == b


def solve_in_span(generators: list[int], target: int) -> int | None:
    """Express target as a GF(2) combination of generators.

    Returns a combination bitmask (bit i = use generators[i]) or None if
    target is outside the span.
    """
    basis = TrackedBasis()
    for g in generators:
        basis.insert(g)
    res, combo = basis.reduce(target)
    if res:
        return None
    return combo


def nullspace_combos(vectors: list[int]) -> list[int]:
    """Basis of {c : XOR of vectors selected by c == 0} as combo bitmasks."""
    basis = TrackedBasis()
    out = []
    for v in vectors:
        res, combo = basis.insert(v)
        if not res:
            out.append(combo)
    return out


def rank(vectors: list[int]) -> int:
    b = Basis()
    for v in vectors:
        b.insert(v)
    return b.rank

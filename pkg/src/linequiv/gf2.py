"""Exact linear algebra over GF(2).

Vectors and matrix rows are packed into Python ints: coordinate x1 is the
least-significant bit, a convention every other module inherits.  Matrices
are tuples of row ints, so values are immutable and hashable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import GuardError

#: Largest arity for which exhaustive GL_n sweeps are allowed by default.
GL_GUARD = 5


@dataclass(frozen=True, slots=True)
class GF2Vector:
    """A vector in GF(2)^n, packed as an int (bit i holds coordinate i+1)."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("arity must be nonnegative")
        if self.bits >> self.n:
            raise ValueError(f"bits 0x{self.bits:x} exceed arity {self.n}")

    @classmethod
    def from_coords(cls, coords: Iterable[int]) -> "GF2Vector":
        coords = list(coords)
        bits = 0
        for i, c in enumerate(coords):
            bits |= (c & 1) << i
        return cls(len(coords), bits)

    def coords(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.n))

    def is_zero(self) -> bool:
        return self.bits == 0

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords()) + ")"


@dataclass(frozen=True, slots=True)
class GF2Matrix:
    """A square bit matrix; rows[i] packs row i with column j at bit j."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError("matrix must be square")
        for r in self.rows:
            if r >> self.n:
                raise ValueError("row bits exceed dimension")

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "GF2Matrix":
        return cls(n, (0,) * n)

    @classmethod
    def from_lists(cls, entries: Iterable[Iterable[int]]) -> "GF2Matrix":
        """Build from row-major 0/1 entries, entries[i][j] = coefficient of x_{j+1}."""
        rows = []
        for row in entries:
            bits = 0
            for j, e in enumerate(row):
                bits |= (e & 1) << j
            rows.append(bits)
        return cls(len(rows), tuple(rows))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def transpose(self) -> "GF2Matrix":
        cols = [0] * self.n
        for i, row in enumerate(self.rows):
            for j in range(self.n):
                cols[j] |= ((row >> j) & 1) << i
        return GF2Matrix(self.n, tuple(cols))

    def encoding(self) -> int:
        """Row-major integer encoding: row 0 is the most significant n-bit block."""
        code = 0
        for row in self.rows:
            code = (code << self.n) | row
        return code

    def to_lines(self) -> str:
        """Serialize as n lines of n characters in {0,1}, row-major."""
        return "\n".join(
            "".join(str(self.entry(i, j)) for j in range(self.n)) for i in range(self.n)
        )

    @classmethod
    def from_lines(cls, text: str) -> "GF2Matrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        n = len(lines)
        rows = []
        for ln in lines:
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise ValueError(f"bad matrix line {ln!r}: want {n} chars of 0/1")
            rows.append(sum((int(ch) << j) for j, ch in enumerate(ln)))
        return cls(n, tuple(rows))

    def __str__(self):
        return self.to_lines()


def mat_vec(m: GF2Matrix, x: GF2Vector) -> GF2Vector:
    """Multiply matrix by vector over GF(2): y_i = <row_i, x> mod 2."""
    if m.n != x.n:
        raise ValueError(f"dimension mismatch: matrix {m.n}x{m.n} vs vector of arity {x.n}")
    return GF2Vector(m.n, apply_rows(m.rows, x.bits))


def apply_rows(rows: tuple[int, ...], x: int) -> int:
    """mat_vec on raw packed ints (hot path for table sweeps)."""
    y = 0
    for i, row in enumerate(rows):
        y |= ((row & x).bit_count() & 1) << i
    return y


def mat_mul(a: GF2Matrix, b: GF2Matrix) -> GF2Matrix:
    """Matrix product over GF(2); column j of a@b is a applied to column j of b."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    bt = b.transpose()
    rows = []
    for ra in a.rows:
        row = 0
        for j, cb in enumerate(bt.rows):
            row |= ((ra & cb).bit_count() & 1) << j
        rows.append(row)
    return GF2Matrix(a.n, tuple(rows))


def rank(m: GF2Matrix) -> int:
    """GF(2) rank by Gaussian elimination on packed rows."""
    rs = list(m.rows)
    r = 0
    for col in range(m.n):
        pivot = next((i for i in range(r, m.n) if (rs[i] >> col) & 1), None)
        if pivot is None:
            continue
        rs[r], rs[pivot] = rs[pivot], rs[r]
        for i in range(m.n):
            if i != r and (rs[i] >> col) & 1:
                rs[i] ^= rs[r]
        r += 1
    return r


def mat_inverse(m: GF2Matrix) -> GF2Matrix | None:
    """Invert over GF(2) by Gauss-Jordan; returns None when singular.

    Singularity is a value here, not a fault: callers probing random
    matrices rely on the None branch.
    """
    n = m.n
    rs = list(m.rows)
    inv = [1 << i for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if (rs[i] >> col) & 1), None)
        if pivot is None:
            return None
        rs[col], rs[pivot] = rs[pivot], rs[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for i in range(n):
            if i != col and (rs[i] >> col) & 1:
                rs[i] ^= rs[col]
                inv[i] ^= inv[col]
    return GF2Matrix(n, tuple(inv))


def is_nonsingular(m: GF2Matrix) -> bool:
    return rank(m) == m.n


def count_gl(n: int) -> int:
    """|GL_n(F2)| = prod_{i=0}^{n-1} (2^n - 2^i)."""
    out = 1
    for i in range(n):
        out *= (1 << n) - (1 << i)
    return out


def enumerate_gl(n: int, guard: int = GL_GUARD) -> Iterator[GF2Matrix]:
    """Yield every element of GL_n(F2) exactly once, ascending by encoding().

    Rows are extended recursively and rows inside the span of the chosen
    prefix are skipped, so the walk touches only ~|GL_n| nodes.

    Args:
        n: dimension.
        guard: refuse (with a cost estimate) when n exceeds this bound.
    """
    if n > guard:
        raise GuardError(
            f"enumerate_gl(n={n}) exceeds guard {guard}: |GL_{n}(F2)| = {count_gl(n)} "
            f"matrices would be enumerated; raise the guard explicitly to proceed"
        )
    if n == 0:
        yield GF2Matrix(0, ())
        return

    size = 1 << n
    rows: list[int] = []
    # span_masks[k] = bitmask over F2^n of span(rows[:k])
    span_masks = [1]

    def walk() -> Iterator[GF2Matrix]:
        depth = len(rows)
        if depth == n:
            yield GF2Matrix(n, tuple(rows))
            return
        span = span_masks[-1]
        for candidate in range(1, size):
            if (span >> candidate) & 1:
                continue
            rows.append(candidate)
            # span doubles: xor every spanned vector with the new row
            new_span = span
            rest = span
            while rest:
                low = rest & -rest
                new_span |= 1 << ((low.bit_length() - 1) ^ candidate)
                rest ^= low
            span_masks.append(new_span)
            yield from walk()
            span_masks.pop()
            rows.pop()

    yield from walk()


def extend_to_basis(
    vectors: list[GF2Vector], n: int | None = None
) -> tuple[GF2Matrix, int]:
    """Find a nonsingular R mapping a greedy independent subsequence to e_1..e_r.

    Scans `vectors` left to right, keeping each vector that is independent of
    those already kept.  Returns (R, r) with R nonsingular, R * kept_j = e_j,
    and r the dimension of the span.

    Args:
        vectors: vectors of a common arity.
        n: the arity; required when `vectors` is empty.
    """
    if vectors:
        arities = {v.n for v in vectors}
        if len(arities) > 1:
            raise ValueError(f"mixed arities {sorted(arities)}")
        if n is None:
            n = vectors[0].n
        elif n != vectors[0].n:
            raise ValueError("explicit arity disagrees with the vectors")
    elif n is None:
        raise ValueError("empty input needs an explicit arity")

    basis: list[int] = []
    echelon: list[int] = []  # reduced copies of basis vectors, for the span test
    for v in vectors:
        reduced = v.bits
        for e in echelon:
            low = e & -e
            if reduced & low:
                reduced ^= e
        if reduced:
            basis.append(v.bits)
            echelon.append(reduced)
    r = len(basis)

    # complete to a full basis with standard vectors, then invert the column matrix
    for i in range(n):
        if len(basis) == n:
            break
        cand = 1 << i
        reduced = cand
        for e in echelon:
            low = e & -e
            if reduced & low:
                reduced ^= e
        if reduced:
            basis.append(cand)
            echelon.append(reduced)

    col_rows = tuple(
        sum(((basis[j] >> i) & 1) << j for j in range(n)) for i in range(n)
    )
    inv = mat_inverse(GF2Matrix(n, col_rows))
    assert inv is not None  # columns form a basis by construction
    return inv, r


def random_nonsingular(n: int, seed: int | random.Random) -> GF2Matrix:
    """Uniform element of GL_n(F2) by rejection sampling; deterministic given seed."""
    if n < 1:
        raise ValueError("arity must be positive")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    while True:
        m = GF2Matrix(n, tuple(rng.getrandbits(n) for _ in range(n)))
        if is_nonsingular(m):
            return m

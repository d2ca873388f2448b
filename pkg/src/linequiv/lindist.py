"""Exhaustive linear/affine distance, isomorphism decision, and canonical
forms under GL_n(F2).

Sweeps precompute, per arity, the input permutation induced by every
invertible matrix (perm[x] = integer encoding of M x), so one candidate
costs a table permutation plus a popcount.  Correctness over cleverness:
there are no orbit-stabilizer shortcuts, just the full group at guard
scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .boolfn import BooleanFunction, shift_input
from .errors import GuardError
from .gf2 import GF2Matrix, GF2Vector, GL_GUARD, apply_rows, count_gl, enumerate_gl

#: Arity cap for memoizing the per-matrix permutation tables (20160 entries
#: at n=4; n=5 would need ~10M and falls back to streaming enumeration).
_PERM_CACHE_MAX = 4


@dataclass(frozen=True)
class LinDistResult:
    value: Fraction
    witness: GF2Matrix


@lru_cache(maxsize=8)
def _gl_perms(n: int) -> tuple:
    """All of GL_n as (rows, perm-bytes) pairs in enumeration order."""
    out = []
    for m in enumerate_gl(n, guard=_PERM_CACHE_MAX):
        perm = bytes(apply_rows(m.rows, x) for x in range(1 << n))
        out.append((m.rows, perm))
    return tuple(out)


def _permuted(bits: int, perm: bytes) -> int:
    out = 0
    for x, src in enumerate(perm):
        out |= ((bits >> src) & 1) << x
    return out


def _candidates(n: int, guard: int):
    """Yield (rows, perm) over GL_n, cached when the arity allows."""
    if n > guard:
        raise GuardError(
            f"GL sweep at n={n} exceeds guard {guard}: |GL_{n}(F2)| = {count_gl(n)}"
        )
    if n <= _PERM_CACHE_MAX:
        yield from _gl_perms(n)
        return
    for m in enumerate_gl(n, guard=guard):
        yield m.rows, bytes(apply_rows(m.rows, x) for x in range(1 << n))


def linear_distance(
    f: BooleanFunction, g: BooleanFunction, guard: int = GL_GUARD
) -> LinDistResult:
    """Exact min over GL_n of Pr[f(Mx) != g(x)], witness = first minimizer."""
    if f.n != g.n:
        raise ValueError("arity mismatch")
    n = f.n
    size = 1 << n
    best = size + 1
    best_rows = None
    gb = g.bits
    fb = f.bits
    for rows, perm in _candidates(n, guard):
        d = (_permuted(fb, perm) ^ gb).bit_count()
        if d < best:
            best = d
            best_rows = rows
            if d == 0:
                break
    return LinDistResult(Fraction(best, size), GF2Matrix(n, best_rows))


def linear_distance_at_least(
    f: BooleanFunction, g: BooleanFunction, bound: Fraction, guard: int = GL_GUARD
) -> bool:
    """Exact predicate lindist(f, g) >= bound, exiting on the first violation."""
    if f.n != g.n:
        raise ValueError("arity mismatch")
    size = 1 << f.n
    cutoff = bound * size  # compare popcounts against this exactly
    fb, gb = f.bits, g.bits
    for _, perm in _candidates(f.n, guard):
        if (_permuted(fb, perm) ^ gb).bit_count() < cutoff:
            return False
    return True


def is_lin_isomorphic(
    f: BooleanFunction, g: BooleanFunction, guard: int = GL_GUARD
) -> bool:
    """True when some invertible map makes the tables equal; early exit."""
    if f.n != g.n:
        raise ValueError("arity mismatch")
    fb, gb = f.bits, g.bits
    return any(_permuted(fb, perm) == gb for _, perm in _candidates(f.n, guard))


def affine_distance(
    f: BooleanFunction, g: BooleanFunction, guard: int = GL_GUARD
) -> tuple[Fraction, tuple[GF2Matrix, GF2Vector]]:
    """min over (M nonsingular, shift a) of Pr[f(Mx + a) != g(x)].

    Always <= the linear distance, since a = 0 embeds the linear search.
    """
    if f.n != g.n:
        raise ValueError("arity mismatch")
    n = f.n
    size = 1 << n
    best = size + 1
    witness = None
    for a in range(size):
        shifted = shift_input(f, GF2Vector(n, a)) if a else f
        sb = shifted.bits
        gb = g.bits
        for rows, perm in _candidates(n, guard):
            d = (_permuted(sb, perm) ^ gb).bit_count()
            if d < best:
                best = d
                witness = (GF2Matrix(n, rows), GF2Vector(n, a))
                if d == 0:
                    return Fraction(0, 1), witness
    return Fraction(best, size), witness


@lru_cache(maxsize=8192)
def canonical_form(
    f: BooleanFunction, guard: int = GL_GUARD
) -> tuple[BooleanFunction, GF2Matrix]:
    """Lexicographically minimal table in the GL-orbit, plus a witness map.

    Order: the bit string b(0) b(1) ... compared left to right with 0 < 1
    (so +1 entries sort before -1).  Ties break toward the first matrix in
    enumeration order.
    """
    n = f.n
    size = 1 << n
    fb = f.bits
    best_key = None
    best_rows = None
    for rows, perm in _candidates(n, guard):
        # build the table with b(0) as the most significant bit, so integer
        # comparison is exactly the lexicographic order on b(0) b(1) ...
        key = 0
        for x, src in enumerate(perm):
            key |= ((fb >> src) & 1) << (size - 1 - x)
        if best_key is None or key < best_key:
            best_key = key
            best_rows = rows
    bits = 0
    for x in range(size):
        bits |= ((best_key >> (size - 1 - x)) & 1) << x
    return BooleanFunction(n, bits), GF2Matrix(n, best_rows)

"""Lower-bound apparatus: entropy, Hamming-ball and isomorphism-ball
counting, the greedy injection that destroys linear relations among
images, and the equality-to-isomorphism reduction built on it.

Truth tables on ell variables are packed ints (bit b(x) at position x,
matching BooleanFunction), so the pool of remaining targets is plain set
arithmetic over table indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .boolfn import BooleanFunction
from .errors import GuardError
from .gf2 import count_gl
from .lindist import linear_distance, _candidates, _permuted

#: Dense sets over 2^(2^ell) tables cap the target arity.
BALL_GUARD = 4


def binary_entropy(omega: float) -> float:
    """H(w) = -w log2 w - (1-w) log2 (1-w), with 0 log 0 = 0."""
    w = float(omega)
    if not 0 <= w <= 1:
        raise ValueError("entropy argument must lie in [0, 1]")
    if w in (0.0, 1.0):
        return 0.0
    return -w * math.log2(w) - (1 - w) * math.log2(1 - w)


def hamming_ball_size(length: int, radius: int) -> int:
    """Number of binary strings within `radius` flips: sum of C(length, i)."""
    if not 0 <= radius <= length:
        raise ValueError("radius must lie in [0, length]")
    return sum(math.comb(length, i) for i in range(radius + 1))


def _flip_masks(size: int, radius: int) -> list[int]:
    masks = [0]
    for k in range(1, radius + 1):
        for positions in combinations(range(size), k):
            m = 0
            for p in positions:
                m |= 1 << p
            masks.append(m)
    return masks


def liniso_ball(f: BooleanFunction, omega, guard: int = BALL_GUARD) -> frozenset[int]:
    """Exact set {table(g) : lindist(f, g) <= omega} on r = f.n variables.

    Materialized as the union, over the GL-orbit of f, of Hamming balls of
    radius floor(omega * 2^r); linear distance is a multiple of 2^-r, so
    the integer radius realizes "at most omega" exactly.
    """
    r = f.n
    if r > guard:
        radius = min(int(omega * (1 << r)), 1 << r)
        raise GuardError(
            f"liniso_ball at r={r} exceeds guard {guard}: up to "
            f"{count_gl(r)} orbit tables x {hamming_ball_size(1 << r, radius)} "
            f"ball entries over a universe of 2^{1 << r} tables"
        )
    omega = Fraction(omega)
    size = 1 << r
    radius = math.floor(omega * size)
    orbit = {_permuted(f.bits, perm) for _, perm in _candidates(r, guard)}
    masks = _flip_masks(size, radius)
    out = set()
    for center in orbit:
        for m in masks:
            out.add(center ^ m)
    return frozenset(out)


def choose_m(n: int, omega) -> tuple[int, int] | None:
    """Smallest power of two m = 2^ell with m - ell^2 - H(omega) m >= n.

    This is the feasibility inequality of the greedy construction in log
    form, checked directly instead of through an unspecified constant.
    Returns (m, ell), or None when nothing up to 2^32 qualifies.
    """
    omega = Fraction(omega)
    if not 0 < omega < Fraction(1, 2):
        raise ValueError("omega must lie in (0, 1/2)")
    h = binary_entropy(float(omega))
    for ell in range(33):
        m = 1 << ell
        if m * (1 - h) - ell * ell >= n:
            return m, ell
    return None


@dataclass(frozen=True)
class PhiMap:
    """Injective map from n-bit strings to truth tables on ell variables
    whose distinct images stay pairwise at linear distance >= omega."""

    n: int
    ell: int
    omega: Fraction
    images: tuple[int, ...]  # packed table per input, index = input encoding

    def function_at(self, a: int) -> BooleanFunction:
        return BooleanFunction(self.ell, self.images[a])

    @property
    def m(self) -> int:
        return 1 << self.ell


def construct_phi(n: int, ell: int, omega, guard: int = BALL_GUARD) -> PhiMap | None:
    """Greedy construction: walk inputs in ascending order, map each to the
    smallest-index table still admissible, and knock out the whole
    isomorphism ball of the chosen image.  Returns None exactly when the
    pool empties early (the asymptotic feasibility regime is out of reach
    here; toy parameters are the point).

    `ell` is a free parameter precisely so toy runs are possible where
    choose_m would demand an astronomical m.
    """
    if ell > guard:
        raise GuardError(
            f"construct_phi at ell={ell} exceeds guard {guard}: the remaining-set "
            f"universe holds 2^{1 << ell} truth tables"
        )
    ntables = 1 << (1 << ell)
    if n > ntables:
        raise GuardError(
            f"n={n} exceeds the capacity sanity bound {ntables}"
        )
    omega = Fraction(omega)
    remaining = set(range(ntables))
    images = []
    for _ in range(1 << n):
        if not remaining:
            return None
        chosen = min(remaining)
        images.append(chosen)
        ball = liniso_ball(BooleanFunction(ell, chosen), omega, guard)
        remaining -= ball
    return PhiMap(n=n, ell=ell, omega=omega, images=tuple(images))


@dataclass(frozen=True)
class PhiReport:
    ok: bool
    min_distance: Fraction | None
    witness_pair: tuple[int, int] | None
    pairs_checked: int


def verify_phi(phi: PhiMap, guard: int = 5) -> PhiReport:
    """Brute-force check that distinct images sit at linear distance >= omega.

    Equal inputs map to equal tables by construction (it is one table), so
    only the separation property needs the sweep.
    """
    worst = None
    witness = None
    pairs = 0
    inputs = range(1 << phi.n)
    for a in inputs:
        for b in inputs:
            if b <= a:
                continue
            pairs += 1
            value = linear_distance(
                phi.function_at(a), phi.function_at(b), guard=guard
            ).value
            if worst is None or value < worst:
                worst = value
                witness = (a, b)
    ok = worst is None or worst >= phi.omega
    return PhiReport(
        ok=ok,
        min_distance=worst,
        witness_pair=None if ok else witness,
        pairs_checked=pairs,
    )


def reduce_equ(a: int, b: int, phi: PhiMap, oracle) -> bool:
    """Decide equality of two n-bit strings through an isomorphism oracle.

    `oracle(f, g)` must decide the promise problem (exact linear distance,
    or any of the protocols); the promise holds for every image pair by the
    map's separation property.
    """
    if not (0 <= a < 1 << phi.n and 0 <= b < 1 << phi.n):
        raise ValueError(f"inputs must be {phi.n}-bit strings")
    return bool(oracle(phi.function_at(a), phi.function_at(b)))

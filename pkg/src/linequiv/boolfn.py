"""Boolean functions on GF(2)^n and their exact Fourier analysis.

A function f : GF(2)^n -> {-1,+1} is stored as one packed int: bit b at
table index x means f(x) = (-1)^b, where x is the integer encoding of the
input (x1 = least-significant bit).  Spectra are exact Fractions with
power-of-two denominators, so Parseval and roundtrip identities hold
bit-exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gf2 import GF2Matrix, GF2Vector, apply_rows, random_nonsingular

#: Largest arity accepted for truth-table storage / transforms.
MAX_ARITY = 16

GENERATOR_KINDS = ("uniform-random", "parity", "and-all", "bent-ip", "planted-junta")


@dataclass(frozen=True, slots=True)
class BooleanFunction:
    """Sign function packed into an int: bit x set means f(x) = -1."""

    n: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_ARITY:
            raise ValueError(f"arity {self.n} outside [0, {MAX_ARITY}]")
        if self.bits >> (1 << self.n):
            raise ValueError("table bits exceed 2^n entries")

    @classmethod
    def from_signs(cls, n: int, signs: Sequence[int]) -> "BooleanFunction":
        if len(signs) != 1 << n:
            raise ValueError(f"need {1 << n} signs, got {len(signs)}")
        bits = 0
        for x, s in enumerate(signs):
            if s == -1:
                bits |= 1 << x
            elif s != 1:
                raise ValueError(f"sign at {x} is {s}, want +1/-1")
        return cls(n, bits)

    @property
    def mask(self) -> int:
        return (1 << (1 << self.n)) - 1

    def bit_at(self, x: int) -> int:
        return (self.bits >> x) & 1

    def sign_at(self, x: int) -> int:
        return -1 if (self.bits >> x) & 1 else 1

    def signs(self) -> tuple[int, ...]:
        return tuple(self.sign_at(x) for x in range(1 << self.n))

    def weight(self) -> int:
        """Number of inputs mapped to -1."""
        return self.bits.bit_count()


@dataclass(frozen=True, slots=True)
class RealFunction:
    """Pointwise real-valued function on GF(2)^n (exact Fractions, or floats
    when produced by the floating-point LP path)."""

    n: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ValueError("value table length must be 2^n")


@dataclass(frozen=True, slots=True)
class Spectrum:
    """Fourier coefficients indexed by the integer encoding of alpha."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != 1 << self.n:
            raise ValueError("coefficient table length must be 2^n")

    def support(self) -> tuple[GF2Vector, ...]:
        return tuple(
            GF2Vector(self.n, a) for a, c in enumerate(self.coeffs) if c != 0
        )


def evaluate(f: BooleanFunction, x: GF2Vector) -> int:
    if f.n != x.n:
        raise ValueError(f"arity mismatch: function {f.n} vs point {x.n}")
    return f.sign_at(x.bits)


def character(alpha: GF2Vector, x: GF2Vector) -> int:
    """chi_alpha(x) = (-1)^<alpha, x>."""
    if alpha.n != x.n:
        raise ValueError("arity mismatch between character index and point")
    return -1 if (alpha.bits & x.bits).bit_count() & 1 else 1


def _butterfly(values: list) -> list:
    """In-place unnormalized Walsh-Hadamard transform, O(n 2^n)."""
    size = len(values)
    h = 1
    while h < size:
        for start in range(0, size, h * 2):
            for i in range(start, start + h):
                a, b = values[i], values[i + h]
                values[i] = a + b
                values[i + h] = a - b
        h *= 2
    return values


def wht(f: BooleanFunction | RealFunction) -> Spectrum:
    """Walsh-Hadamard transform: coeff(alpha) = 2^-n sum_x f(x) chi_alpha(x)."""
    if isinstance(f, BooleanFunction):
        vals = _butterfly(list(f.signs()))
        scale = 1 << f.n
        return Spectrum(f.n, tuple(Fraction(v, scale) for v in vals))
    vals = _butterfly(list(f.values))
    scale = 1 << f.n
    return Spectrum(f.n, tuple(v / scale for v in vals))


def inverse_wht(s: Spectrum) -> RealFunction:
    """Pointwise reconstruction; inverse_wht(wht(f)) == f exactly."""
    return RealFunction(s.n, tuple(_butterfly(list(s.coeffs))))


def sign_of(r: RealFunction) -> BooleanFunction:
    """Pointwise sign with the tie rule sign(0) = +1."""
    bits = 0
    for x, v in enumerate(r.values):
        if v < 0:
            bits |= 1 << x
    return BooleanFunction(r.n, bits)


def as_real(f: BooleanFunction) -> RealFunction:
    return RealFunction(f.n, tuple(Fraction(s) for s in f.signs()))


def distance(f: BooleanFunction, g: BooleanFunction) -> Fraction:
    """Normalized Hamming distance Pr_x[f(x) != g(x)], exact."""
    if f.n != g.n:
        raise ValueError("arity mismatch")
    return Fraction((f.bits ^ g.bits).bit_count(), 1 << f.n)


def compose_linear(f: BooleanFunction, m: GF2Matrix) -> BooleanFunction:
    """f composed with the linear map m: output table at x is f's table at m x.

    m may be singular; projection maps are legitimate inputs here.
    """
    if f.n != m.n:
        raise ValueError("arity mismatch")
    bits = 0
    fb = f.bits
    rows = m.rows
    for x in range(1 << f.n):
        bits |= ((fb >> apply_rows(rows, x)) & 1) << x
    return BooleanFunction(f.n, bits)


def shift_input(f: BooleanFunction, a: GF2Vector) -> BooleanFunction:
    """The function x -> f(x + a)."""
    if f.n != a.n:
        raise ValueError("arity mismatch")
    bits = 0
    for x in range(1 << f.n):
        bits |= f.bit_at(x ^ a.bits) << x
    return BooleanFunction(f.n, bits)


def restrict_to_prefix(f: BooleanFunction, r: int) -> BooleanFunction:
    """Restrict to the first r coordinates; f must not depend on the rest."""
    if not 0 <= r <= f.n:
        raise ValueError("bad prefix length")
    prefix_mask = (1 << r) - 1
    for x in range(1 << f.n):
        if f.bit_at(x) != f.bit_at(x & prefix_mask):
            raise ValueError(
                f"function depends on coordinate beyond {r} (witness x={x})"
            )
    bits = 0
    for y in range(1 << r):
        bits |= f.bit_at(y) << y
    return BooleanFunction(r, bits)


def lift_from_prefix(core: BooleanFunction, n: int) -> BooleanFunction:
    """Extend an r-variable function to n variables, ignoring coordinates > r."""
    if n < core.n:
        raise ValueError("cannot lift to a smaller arity")
    prefix_mask = (1 << core.n) - 1
    bits = 0
    for x in range(1 << n):
        bits |= core.bit_at(x & prefix_mask) << x
    return BooleanFunction(n, bits)


def generate(
    kind: str,
    n: int,
    seed: int = 0,
    *,
    alpha: GF2Vector | None = None,
    junta_arity: int | None = None,
) -> BooleanFunction:
    """Deterministic test-instance families.

    kind:
        uniform-random          seeded random table
        parity                  chi_alpha (alpha defaults to e1)
        and-all                 -1 exactly at the all-ones input
        bent-ip                 (-1)^(x1 x2 + x3 x4 + ...), n even
        planted-junta           random function on `junta_arity` coordinates,
                                lifted and composed with a random nonsingular map
    """
    if kind not in GENERATOR_KINDS:
        raise ValueError(f"unknown kind {kind!r}; know {GENERATOR_KINDS}")
    size = 1 << n
    if kind == "uniform-random":
        rng = random.Random(seed)
        return BooleanFunction(n, rng.getrandbits(size))
    if kind == "parity":
        if alpha is None:
            alpha = GF2Vector(n, 1 if n else 0)
        bits = 0
        for x in range(size):
            if (alpha.bits & x).bit_count() & 1:
                bits |= 1 << x
        return BooleanFunction(n, bits)
    if kind == "and-all":
        return BooleanFunction(n, 1 << (size - 1))
    if kind == "bent-ip":
        if n % 2:
            raise ValueError("bent-ip needs an even arity")
        bits = 0
        for x in range(size):
            acc = 0
            for i in range(0, n, 2):
                acc ^= ((x >> i) & 1) & ((x >> (i + 1)) & 1)
            bits |= acc << x
        return BooleanFunction(n, bits)
    # planted-junta
    r = 2 if junta_arity is None else junta_arity
    if not 0 <= r <= n:
        raise ValueError("junta arity must lie in [0, n]")
    rng = random.Random(seed)
    core = BooleanFunction(r, rng.getrandbits(1 << r))
    lifted = lift_from_prefix(core, n)
    return compose_linear(lifted, random_nonsingular(n, rng)) if n else lifted


# ---------------------------------------------------------------------------
# truth-table file format
# ---------------------------------------------------------------------------
#
# line 1: n=<k>
# line 2: hex string of ceil(2^k/4) digits; each digit packs 4 table bits
#         b(4d) b(4d+1) b(4d+2) b(4d+3) most-significant-bit-first.


def table_to_hex(f: BooleanFunction) -> str:
    size = 1 << f.n
    digits = []
    for d in range((size + 3) // 4):
        val = 0
        for k in range(4):
            x = 4 * d + k
            if x < size:
                val |= f.bit_at(x) << (3 - k)
        digits.append(f"{val:x}")
    return "".join(digits)


def table_from_hex(n: int, hexstr: str) -> BooleanFunction:
    size = 1 << n
    want = (size + 3) // 4
    if len(hexstr) != want:
        raise ValueError(f"need {want} hex digits for n={n}, got {len(hexstr)}")
    bits = 0
    for d, ch in enumerate(hexstr):
        val = int(ch, 16)
        for k in range(4):
            x = 4 * d + k
            if x < size:
                bits |= ((val >> (3 - k)) & 1) << x
            elif (val >> (3 - k)) & 1:
                raise ValueError("nonzero padding bits in final hex digit")
    return BooleanFunction(n, bits)


def dump_table(f: BooleanFunction) -> str:
    return f"n={f.n}\n{table_to_hex(f)}\n"


def parse_table(text: str) -> BooleanFunction:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ValueError("truth-table file wants 'n=<k>' then one hex line")
    try:
        n = int(lines[0][2:])
    except ValueError as exc:
        raise ValueError(f"bad arity in header {lines[0]!r}") from exc
    return table_from_hex(n, lines[1].lower())


def save_table(f: BooleanFunction, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_table(f))


def load_table(path) -> BooleanFunction:
    with open(path, "r", encoding="ascii") as fh:
        return parse_table(fh.read())

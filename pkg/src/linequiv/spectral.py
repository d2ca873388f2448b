"""Spectral norm, its gamma-approximate relaxation, sampled sign
representations, spectrum truncation, and junta approximation.

The gamma-approximate spectral norm is the optimum of the LP

    minimize   sum_alpha (u_alpha + v_alpha)          g^(alpha) = u - v
    subject to -gamma <= g(x) - f(x) <= gamma   for every point x,
               u, v >= 0

solved by the deterministic simplex in exact rationals for n <= 4 and in
floating point (1e-9 feasibility tolerance) above that.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .boolfn import (
    BooleanFunction,
    RealFunction,
    Spectrum,
    distance,
    inverse_wht,
    lift_from_prefix,
    restrict_to_prefix,
    sign_of,
    wht,
)
from .errors import GuardError, SamplingError
from .gf2 import GF2Matrix, GF2Vector, extend_to_basis
from .simplex import solve_min

#: Largest arity the LP accepts by default.
LP_GUARD = 8
#: Arities up to this bound get the exact-rational LP backend.
EXACT_LP_MAX_ARITY = 4
#: Default multiplier in the sample-count formula of bs_sample.
SAMPLER_CONSTANT = 8

_CEIL_SNAP = 1e-6


def spectral_norm(f: BooleanFunction) -> Fraction:
    """Sum of absolute Fourier coefficients, exact."""
    return sum(abs(c) for c in wht(f).coeffs)


def snap_ceil(value) -> int:
    """Ceiling that snaps values within 1e-6 of an integer downward.

    Protocol step 1 compares these ceilings across parties; the snap keeps
    float jitter from flipping a comparison the exact backend would not.
    """
    nearest = round(value)
    if abs(value - nearest) <= _CEIL_SNAP:
        return int(nearest)
    return math.ceil(value)


@dataclass(frozen=True)
class ApproxNormWitness:
    """Optimum of the approximate-spectral-norm LP plus its witness."""

    gamma: Fraction
    value: object
    spectrum: Spectrum
    witness: RealFunction

    def to_record(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "value": str(self.value),
            "witness_spectrum": [str(c) for c in self.spectrum.coeffs],
        }


@lru_cache(maxsize=4096)
def _approx_norm_cached(f: BooleanFunction, gamma: Fraction, lp_guard: int):
    n = f.n
    if n > lp_guard:
        raise GuardError(
            f"approx_spectral_norm at n={n} exceeds the LP guard {lp_guard}: "
            f"the tableau would have {2 ** (n + 1)} rows and {2 ** (n + 1)} "
            f"structural columns"
        )
    exact = n <= EXACT_LP_MAX_ARITY
    size = 1 << n
    chi = [
        [-1 if (a & x).bit_count() & 1 else 1 for a in range(size)]
        for x in range(size)
    ]
    signs = f.signs()
    gam = gamma if exact else float(gamma)

    costs = [1] * (2 * size)
    rows = []
    rhs = []
    for x in range(size):
        fwd = chi[x] + [-c for c in chi[x]]
        rows.append(fwd)
        rhs.append(signs[x] + gam)
        rows.append([-c for c in fwd])
        rhs.append(gam - signs[x])
    sol = solve_min(costs, rows, rhs, exact=exact)

    coeffs = tuple(sol.x[a] - sol.x[size + a] for a in range(size))
    spectrum = Spectrum(n, coeffs)
    witness = inverse_wht(spectrum)
    return ApproxNormWitness(
        gamma=gamma, value=sol.value, spectrum=spectrum, witness=witness
    )


def approx_spectral_norm(
    f: BooleanFunction, gamma, lp_guard: int = LP_GUARD
) -> ApproxNormWitness:
    """gamma-approximate spectral norm: cheapest spectrum of any real
    function within pointwise distance gamma of f.

    Exact rationals for n <= 4; floats (1e-9 tolerance) for larger n.
    gamma = 0 pins the witness to f itself, so the value equals
    spectral_norm(f).
    """
    gamma = Fraction(gamma)
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    return _approx_norm_cached(f, gamma, lp_guard)


@dataclass(frozen=True)
class SampledSignRepresentation:
    """Multiset of (character, sign) pairs defining
    F(x) = sign(sum a * chi_alpha(x)) with the sign(0) = +1 rule."""

    n: int
    samples: tuple  # ((GF2Vector, +1/-1), ...), length = count
    count: int
    achieved_distance: Fraction

    def to_function(self) -> BooleanFunction:
        acc = [0] * (1 << self.n)
        for alpha, sign in self.samples:
            acc[alpha.bits] += sign
        return sign_of(inverse_wht(Spectrum(self.n, tuple(acc))))

    def distinct_characters(self) -> tuple[GF2Vector, ...]:
        return tuple(
            GF2Vector(self.n, bits)
            for bits in sorted({alpha.bits for alpha, _ in self.samples})
        )


def sample_count(norm_value, gamma, target_delta, constant=SAMPLER_CONSTANT) -> int:
    """ceil(C * norm^2 * ln(1/delta) / beta^2) with beta = (1 - gamma)/10."""
    beta = (1 - float(gamma)) / 10
    t = float(norm_value)
    return max(1, math.ceil(constant * t * t * math.log(1 / float(target_delta)) / beta**2))


def bs_sample(
    f: BooleanFunction,
    gamma,
    target_delta,
    seed: int,
    constant: int = SAMPLER_CONSTANT,
    max_attempts: int = 64,
) -> SampledSignRepresentation:
    """Sample a sign representation of f that certifiably lands within
    target_delta of f in normalized Hamming distance.

    Characters are drawn i.i.d. from the distribution proportional to the
    witness coefficient magnitudes, with the coefficient signs attached.
    The achieved distance is checked exactly on the full table; fresh
    sub-seeds are tried up to max_attempts times before giving up.
    """
    gamma = Fraction(gamma)
    target_delta = Fraction(target_delta)
    if not 0 < target_delta < 1:
        raise ValueError("target_delta must lie in (0, 1)")
    opt = approx_spectral_norm(f, gamma)
    count = sample_count(opt.value, gamma, target_delta, constant)

    support = [(a, c) for a, c in enumerate(opt.spectrum.coeffs) if c != 0]
    weights = [abs(float(c)) for _, c in support]
    cumulative = []
    acc = 0.0
    for w in weights:
        acc += w
        cumulative.append(acc)
    total = cumulative[-1]

    size = 1 << f.n
    best = None
    for attempt in range(max_attempts):
        rng = random.Random(seed * 0x9E3779B1 + attempt)
        acc_coeffs = [0] * size
        samples = []
        for _ in range(count):
            r = rng.random() * total
            lo, hi = 0, len(support) - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if cumulative[mid] < r:
                    lo = mid + 1
                else:
                    hi = mid
            alpha, coeff = support[lo]
            sign = 1 if coeff > 0 else -1
            samples.append((GF2Vector(f.n, alpha), sign))
            acc_coeffs[alpha] += sign
        approx = sign_of(inverse_wht(Spectrum(f.n, tuple(acc_coeffs))))
        dist = distance(f, approx)
        if dist <= target_delta:
            return SampledSignRepresentation(
                n=f.n,
                samples=tuple(samples),
                count=count,
                achieved_distance=dist,
            )
        if best is None or dist < best:
            best = dist
    raise SamplingError(max_attempts, best)


def truncate_spectrum(h: RealFunction, threshold):
    """Zero every coefficient below `threshold` in magnitude.

    Returns (reconstruction, kept) where kept is the tuple of characters
    whose coefficients survived, ascending by integer encoding.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    spec = wht(h)
    kept = []
    coeffs = []
    for a, c in enumerate(spec.coeffs):
        if abs(c) >= threshold:
            coeffs.append(c)
            kept.append(GF2Vector(h.n, a))
        else:
            coeffs.append(type(c)(0) if not isinstance(c, float) else 0.0)
    return inverse_wht(Spectrum(h.n, tuple(coeffs))), tuple(kept)


@dataclass(frozen=True)
class JuntaApproximation:
    """A function of r coordinates (after the basis change `transform`)
    that sits within linear distance omega/8 of the analyzed function."""

    r: int
    core: BooleanFunction
    transform: GF2Matrix
    threshold: object
    significant: tuple  # characters kept by the truncation

    def lifted(self, n: int | None = None) -> BooleanFunction:
        """The junta as an n-variable function of the first r coordinates."""
        return lift_from_prefix(self.core, self.core.n if n is None else n)


@lru_cache(maxsize=2048)
def _junta_cached(f: BooleanFunction, omega: Fraction, lp_guard: int, gl_guard: int):
    from .lindist import linear_distance  # local import; lindist sits above us

    n = f.n
    t = approx_spectral_norm(f, Fraction(1, 3), lp_guard).value
    threshold = omega / (18 * t) if isinstance(t, Fraction) else float(omega) / (18 * t)
    truncated, kept = truncate_spectrum(
        approx_spectral_norm(f, Fraction(1, 3), lp_guard).witness, threshold
    )

    bound = Fraction(576) * t * t / (omega * omega) if isinstance(t, Fraction) \
        else 576 * t * t / float(omega) ** 2
    if len(kept) > bound:
        raise AssertionError(
            f"truncation kept {len(kept)} characters, above the 576 t^2/omega^2 "
            f"bound {bound}; the Parseval argument was violated"
        )

    rot, r = extend_to_basis(list(kept), n)
    transform = rot.transpose()  # support moves by transform^T = rot
    moved = RealFunction(
        n,
        tuple(
            truncated.values[_apply(transform, x)] for x in range(1 << n)
        ),
    )
    core = restrict_to_prefix(sign_of(moved), r)
    junta = JuntaApproximation(
        r=r, core=core, transform=transform, threshold=threshold, significant=kept
    )
    if n <= gl_guard:
        achieved = linear_distance(f, junta.lifted(n), guard=gl_guard).value
        if not achieved < Fraction(omega) / 8:
            raise AssertionError(
                f"junta approximation missed its bound: linear distance "
                f"{achieved} vs omega/8 = {Fraction(omega) / 8}"
            )
    return junta


def _apply(m: GF2Matrix, x: int) -> int:
    from .gf2 import apply_rows

    return apply_rows(m.rows, x)


def junta_approximation(
    f: BooleanFunction, omega, lp_guard: int = LP_GUARD, gl_guard: int = 5
) -> JuntaApproximation:
    """Approximate f (in linear distance) by a function of few coordinates.

    Truncates the 1/3-approximate-norm witness at omega/(18 t), rotates the
    surviving characters into the span of e_1..e_r, and takes the sign.  The
    kept-set size obeys |S| <= 576 t^2 / omega^2, and for n within the GL
    guard the linear distance to f is verified exactly to be below omega/8.
    """
    omega = Fraction(omega)
    if not 0 < omega < 1:
        raise ValueError("omega must lie in (0, 1)")
    return _junta_cached(f, omega, lp_guard, gl_guard)

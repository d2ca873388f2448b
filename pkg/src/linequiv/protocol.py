"""Two-party protocols for deciding linear isomorphism.

Three protocols share the audited channel:

  deterministic  -- the sampled-sign-representation protocol.  The party
                    with the smaller approximate-norm ceiling builds a
                    certified sign representation of its function, rotates
                    the sampled characters into a low-dimensional span, and
                    ships them; the receiver decides by exact linear
                    distance against the midpoint threshold eps + omega/2.
  private-coin   -- both parties canonicalize, build junta approximations,
                    canonicalize the cores, and compare them on ceil(2/omega)
                    random probe points drawn from Alice's private seed.
  public-coin    -- both parties canonicalize and fingerprint their tables
                    with shared random masks, one bit per round.

Each party runs in its own thread and touches nothing but its endpoint, so
the same party functions drive the in-memory and the socket transports.
"""

from __future__ import annotations

import random
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .boolfn import BooleanFunction, table_to_hex
from .channel import (
    BitReader,
    Transcript,
    build_transcript,
    encode_integer,
    make_memory_channel,
)
from .errors import ProtocolError
from .gf2 import extend_to_basis
from .lindist import canonical_form, linear_distance
from .spectral import approx_spectral_norm, bs_sample, junta_approximation, snap_ceil

NEAR, FAR, UNKNOWN = "near", "far", "unknown"


@dataclass(frozen=True)
class PromiseInstance:
    """An input pair under the promise lindist <= eps or >= eps + omega."""

    f: BooleanFunction
    g: BooleanFunction
    epsilon: Fraction
    omega: Fraction
    ground_truth: str = UNKNOWN

    def __post_init__(self):
        if self.f.n != self.g.n:
            raise ValueError("both functions must share an arity")
        if self.ground_truth not in (NEAR, FAR, UNKNOWN):
            raise ValueError(f"bad ground truth {self.ground_truth!r}")

    @classmethod
    def certify(cls, f, g, epsilon, omega, guard: int = 5) -> "PromiseInstance":
        """Build an instance whose ground truth is checked exactly."""
        epsilon = Fraction(epsilon)
        omega = Fraction(omega)
        value = linear_distance(f, g, guard=guard).value
        if value <= epsilon:
            truth = NEAR
        elif value >= epsilon + omega:
            truth = FAR
        else:
            raise ValueError(
                f"pair is off-promise: lindist = {value}, want <= {epsilon} "
                f"or >= {epsilon + omega}"
            )
        return cls(f, g, epsilon, omega, truth)

    @property
    def n(self) -> int:
        return self.f.n


def table_checksum(f: BooleanFunction) -> int:
    """Deterministic sampler seed derived from a truth table."""
    return zlib.crc32(f"{f.n}:{table_to_hex(f)}".encode("ascii"))


def _norm_ceiling(f: BooleanFunction) -> int:
    return snap_ceil(approx_spectral_norm(f, Fraction(1, 3)).value)


def run_two_party(party_a, party_b, endpoints=None):
    """Run both party callables to completion; re-raises their failures."""
    if endpoints is None:
        ep_a, ep_b, audit = make_memory_channel()
    else:
        ep_a, ep_b, audit = endpoints
    with ThreadPoolExecutor(max_workers=2) as pool:
        fut_a = pool.submit(party_a, ep_a)
        fut_b = pool.submit(party_b, ep_b)
        res_a = fut_a.result()
        res_b = fut_b.result()
    return res_a, res_b, audit


# ---------------------------------------------------------------------------
# step 1 exchanges
# ---------------------------------------------------------------------------


def subprotocol_compare_ceils(endpoint, my_ceiling: int) -> bool:
    """Decide who builds: Alice sends her ceiling, Bob answers one bit.

    Reply 0 means Bob's ceiling is >= Alice's (Alice builds; ties go to
    Alice), reply 1 swaps the roles.  Returns True when the local party
    is the builder.
    """
    if endpoint.label == "A":
        endpoint.send(encode_integer(my_ceiling))
        reply = endpoint.recv()
        if reply not in ("0", "1"):
            raise ProtocolError(f"bad role reply {reply!r}")
        return reply == "0"
    peer_ceiling = _recv_gamma(endpoint)
    i_build = my_ceiling < peer_ceiling
    endpoint.send("1" if i_build else "0")
    return i_build


def _exchange_equal_check(endpoint, my_value: int) -> bool:
    """Alice sends gamma(value); Bob replies 1 bit: 0 iff the values agree."""
    if endpoint.label == "A":
        endpoint.send(encode_integer(my_value))
        return endpoint.recv() == "0"
    equal = _recv_gamma(endpoint) == my_value
    endpoint.send("0" if equal else "1")
    return equal


def _recv_gamma(endpoint) -> int:
    reader = BitReader(endpoint.recv())
    value = reader.gamma()
    if not reader.done():
        raise ProtocolError("unexpected trailing bits in an integer message")
    return value


# ---------------------------------------------------------------------------
# deterministic protocol
# ---------------------------------------------------------------------------


def det_party(endpoint, fn: BooleanFunction, epsilon, omega, guard: int = 5) -> dict:
    """One side of the deterministic protocol; returns its local view."""
    epsilon = Fraction(epsilon)
    omega = Fraction(omega)
    ceiling = _norm_ceiling(fn)
    i_build = subprotocol_compare_ceils(endpoint, ceiling)
    n = fn.n

    if i_build:
        rep = bs_sample(fn, Fraction(1, 3), omega / 4, seed=table_checksum(fn))
        chars = list(rep.distinct_characters())
        rot, ell = extend_to_basis(chars, n)
        payload = [encode_integer(ell + 1), encode_integer(rep.count)]
        for alpha, sign in rep.samples:
            moved = _apply_rows(rot.rows, alpha.bits)
            assert moved >> ell == 0  # sampled characters live in the rotated span
            payload.append(format(moved, f"0{ell}b")[::-1] if ell else "")
            payload.append("0" if sign == 1 else "1")
        endpoint.send("".join(payload))
        return {
            "role": "builder",
            "outcome": None,
            "t_ceiling": ceiling,
            "ell": ell,
            "count": rep.count,
        }

    reader = BitReader(endpoint.recv())
    ell = reader.gamma() - 1
    count = reader.gamma()
    acc = [0] * (1 << n)
    for _ in range(count):
        alpha = int(reader.take(ell)[::-1], 2) if ell else 0
        sign = 1 if reader.take(1) == "0" else -1
        acc[alpha] += sign
    if not reader.done():
        raise ProtocolError("trailing bits after the sampled characters")
    rebuilt = _sign_table(n, acc)
    result = linear_distance(rebuilt, fn, guard=guard)
    accept = result.value <= epsilon + omega / 2
    return {
        "role": "checker",
        "outcome": "accept" if accept else "reject",
        "t_ceiling": ceiling,
        "ell": ell,
        "count": count,
        "checked_distance": result.value,
    }


def _apply_rows(rows, x):
    from .gf2 import apply_rows

    return apply_rows(rows, x)


def _sign_table(n: int, acc: list) -> BooleanFunction:
    from .boolfn import Spectrum, inverse_wht, sign_of

    return sign_of(inverse_wht(Spectrum(n, tuple(acc))))


def run_deterministic(instance: PromiseInstance, endpoints=None,
                      guard: int = 5) -> Transcript:
    """Execute the deterministic protocol on an instance, in memory by default.

    The sampler seed is a checksum of the builder's table, so the whole run
    is a pure function of the instance: repeated runs give identical
    transcripts.
    """
    res_a, res_b, audit = run_two_party(
        lambda ep: det_party(ep, instance.f, instance.epsilon, instance.omega, guard),
        lambda ep: det_party(ep, instance.g, instance.epsilon, instance.omega, guard),
        endpoints,
    )
    checker = res_a if res_a["role"] == "checker" else res_b
    builder = res_a if res_a is not checker else res_b
    stats = {
        "builder": "A" if builder is res_a else "B",
        "t_used": builder["t_ceiling"],
        "t_wire": res_a["t_ceiling"],  # step 1 always carries Alice's ceiling
        "ell": builder["ell"],
        "T": builder["count"],
        "promise": instance.ground_truth,
    }
    return build_transcript(
        "deterministic", instance.n, instance.epsilon, instance.omega,
        checker["outcome"], stats, audit,
    )


def det_bits_closed_form(t_wire: int, ell: int, count: int) -> int:
    """Exact wire cost: |gamma(t_A)| + 1 + |gamma(ell+1)| + |gamma(T)| + T(ell+1).

    t_wire is the ceiling Alice sends in step 1 (hers, whoever ends up
    building).
    """
    return (
        len(encode_integer(t_wire))
        + 1
        + len(encode_integer(ell + 1))
        + len(encode_integer(count))
        + count * (ell + 1)
    )


# ---------------------------------------------------------------------------
# private-coin protocol
# ---------------------------------------------------------------------------


def private_party(endpoint, fn: BooleanFunction, omega, seed: int,
                  guard: int = 5) -> dict:
    """One side of the private-coin protocol (epsilon = 0 promise only).

    Both parties canonicalize their inputs first, so isomorphic inputs make
    every later step literally identical; the LP optimum then cannot break
    completeness by picking different witnesses.
    """
    omega = Fraction(omega)
    canon, _ = canonical_form(fn, guard=guard)
    ceiling = _norm_ceiling(canon)
    if not _exchange_equal_check(endpoint, ceiling):
        return {"role": endpoint.label, "outcome": "reject", "stage": "norm",
                "t_ceiling": ceiling, "r": None, "rounds": 0}

    junta = junta_approximation(canon, omega, gl_guard=guard)
    r = junta.r
    if not _exchange_equal_check(endpoint, r + 1):
        return {"role": endpoint.label, "outcome": "reject", "stage": "arity",
                "t_ceiling": ceiling, "r": r, "rounds": 0}

    core_star, _ = canonical_form(junta.core, guard=guard)
    rounds = ceil(2 / omega)
    rng = random.Random(seed)
    for round_no in range(1, rounds + 1):
        if endpoint.label == "A":
            x = rng.getrandbits(r) if r else 0
            probe = format(x, f"0{r}b")[::-1] if r else ""
            endpoint.send(probe + ("0" if core_star.sign_at(x) == 1 else "1"))
            if endpoint.recv() == "1":
                return {"role": "A", "outcome": "reject", "stage": "probe",
                        "t_ceiling": ceiling, "r": r, "rounds": round_no}
        else:
            reader = BitReader(endpoint.recv())
            x = int(reader.take(r)[::-1], 2) if r else 0
            their_value = 1 if reader.take(1) == "0" else -1
            if not reader.done():
                raise ProtocolError("trailing probe bits")
            match = their_value == core_star.sign_at(x)
            endpoint.send("0" if match else "1")
            if not match:
                return {"role": "B", "outcome": "reject", "stage": "probe",
                        "t_ceiling": ceiling, "r": r, "rounds": round_no}
    return {"role": endpoint.label, "outcome": "accept", "stage": "done",
            "t_ceiling": ceiling, "r": r, "rounds": rounds}


def run_private_coin(instance: PromiseInstance, seed_a: int, seed_b: int,
                     endpoints=None, guard: int = 5) -> Transcript:
    """Private-coin protocol run; only Alice's seed is consumed (she draws
    the probe points), Bob's is accepted for interface symmetry."""
    if instance.epsilon != 0:
        raise ValueError("the private-coin protocol handles epsilon = 0 only")
    del seed_b  # reserved
    res_a, res_b, audit = run_two_party(
        lambda ep: private_party(ep, instance.f, instance.omega, seed_a, guard),
        lambda ep: private_party(ep, instance.g, instance.omega, seed_a, guard),
        endpoints,
    )
    if res_a["outcome"] != res_b["outcome"]:
        raise ProtocolError(f"parties disagree: {res_a} vs {res_b}")
    stats = {
        "t_used": min(res_a["t_ceiling"], res_b["t_ceiling"]),
        "r": res_a["r"],
        "rounds": res_a["rounds"],
        "stage": res_a["stage"],
        "promise": instance.ground_truth,
    }
    return build_transcript(
        "private-coin", instance.n, 0, instance.omega,
        res_a["outcome"], stats, audit,
    )


# ---------------------------------------------------------------------------
# public-coin baseline
# ---------------------------------------------------------------------------


def public_party(endpoint, fn: BooleanFunction, shared_seed: int, rounds: int,
                 guard: int = 5) -> dict:
    """Canonicalize, then compare random-mask fingerprints, one bit a round."""
    canon, _ = canonical_form(fn, guard=guard)
    rng = random.Random(shared_seed)
    size = 1 << fn.n
    if endpoint.label == "A":
        for _ in range(rounds):
            mask = rng.getrandbits(size)
            endpoint.send("1" if (canon.bits & mask).bit_count() & 1 else "0")
        verdict = endpoint.recv()
        return {"role": "A", "outcome": "accept" if verdict == "1" else "reject"}
    all_match = True
    for _ in range(rounds):
        mask = rng.getrandbits(size)
        mine = (canon.bits & mask).bit_count() & 1
        theirs = 1 if endpoint.recv() == "1" else 0
        if mine != theirs:
            all_match = False
    endpoint.send("1" if all_match else "0")
    return {"role": "B", "outcome": "accept" if all_match else "reject"}


def run_public_coin(instance: PromiseInstance, shared_seed: int,
                    rounds: int = 7, endpoints=None, guard: int = 5) -> Transcript:
    """Public-coin equality of canonical forms; one-sided error 2^-rounds."""
    if instance.epsilon != 0:
        raise ValueError("the public-coin protocol handles epsilon = 0 only")
    res_a, res_b, audit = run_two_party(
        lambda ep: public_party(ep, instance.f, shared_seed, rounds, guard),
        lambda ep: public_party(ep, instance.g, shared_seed, rounds, guard),
        endpoints,
    )
    if res_a["outcome"] != res_b["outcome"]:
        raise ProtocolError(f"parties disagree: {res_a} vs {res_b}")
    stats = {"rounds": rounds, "promise": instance.ground_truth}
    return build_transcript(
        "public-coin", instance.n, 0, instance.omega,
        res_a["outcome"], stats, audit,
    )

"""Experiment harness: sweeps protocol runs over function families,
arities, and separation parameters, emitting one CSV row per cell.

Every cell owns a seed stream derived from (base seed, cell coordinates,
trial index), so identical configs reproduce identical measurements; only
the wall_ms column reflects the clock.
"""

from __future__ import annotations

import csv
import io
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .boolfn import BooleanFunction, compose_linear, generate
from .gf2 import random_nonsingular
from .lindist import linear_distance_at_least
from .protocol import (
    FAR,
    NEAR,
    PromiseInstance,
    run_deterministic,
    run_private_coin,
    run_public_coin,
)
from .spectral import approx_spectral_norm, snap_ceil

CSV_HEADER = "n,family,omega,t_ceiling,correct_frac,mean_bits,max_bits,wall_ms"
FAR_ATTEMPT_CAP = 10_000

PROTOCOLS = ("det", "rand", "public")


class CellSkipped(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str
    family: str
    n_values: tuple[int, ...]
    omegas: tuple[Fraction, ...]
    trials: int
    base_seed: int = 0
    epsilon: Fraction = Fraction(0)
    rounds: int = 7  # public-coin repetitions
    guard: int = 5
    workers: int = 1

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.protocol in ("rand", "public") and self.epsilon != 0:
            raise ValueError(f"protocol {self.protocol} wants epsilon = 0")


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    family: str
    omega: Fraction
    t_ceiling: int | None
    correct_frac: Fraction | None
    mean_bits: float | None
    max_bits: int | None
    wall_ms: int | None
    skipped: str | None = None

    def csv_values(self) -> list[str]:
        if self.skipped is not None:
            return [str(self.n), self.family, str(self.omega), "", "skipped", "", "", ""]
        return [
            str(self.n),
            self.family,
            str(self.omega),
            str(self.t_ceiling),
            repr(float(self.correct_frac)),
            repr(round(self.mean_bits, 6)),
            str(self.max_bits),
            str(self.wall_ms),
        ]


def _derive_seed(*parts) -> int:
    return zlib.crc32("|".join(str(p) for p in parts).encode("ascii"))


def _make_function(family: str, n: int, seed: int) -> BooleanFunction:
    kind, _, arg = family.partition(":")
    if kind == "planted-junta":
        return generate(kind, n, seed, junta_arity=int(arg) if arg else None)
    if arg:
        raise ValueError(f"family {family!r} takes no parameter")
    return generate(kind, n, seed)


def make_instance(
    kind: str,
    family: str,
    n: int,
    epsilon: Fraction,
    omega: Fraction,
    seed: int,
    guard: int = 5,
) -> PromiseInstance:
    """Build a certified Near or Far instance for one trial.

    Near pairs are isomorphic by construction (g = f after an invertible
    change of basis).  Far candidates are rejection-sampled from the family
    and certified by the exact sweep; the sweep exits on the first map that
    lands below the threshold, so rejected candidates are cheap.
    """
    f = _make_function(family, n, _derive_seed(seed, "f"))
    if kind == NEAR:
        g = compose_linear(f, random_nonsingular(n, _derive_seed(seed, "m")))
        return PromiseInstance(f, g, epsilon, omega, NEAR)
    threshold = epsilon + omega
    for attempt in range(FAR_ATTEMPT_CAP):
        g = _make_function(family, n, _derive_seed(seed, "g", attempt))
        if linear_distance_at_least(f, g, threshold, guard=guard):
            return PromiseInstance(f, g, epsilon, omega, FAR)
    raise CellSkipped(
        f"no far instance for family={family} n={n} omega={omega} "
        f"in {FAR_ATTEMPT_CAP} attempts"
    )


def _run_cell(config: ExperimentConfig, n: int, omega: Fraction, kind: str) -> ExperimentRow:
    label = f"{config.family}/{kind}"
    start = time.perf_counter()
    try:
        correct = 0
        bits = []
        ceilings = []
        for trial in range(config.trials):
            seed = _derive_seed(config.base_seed, config.protocol, label, n, omega, trial)
            instance = make_instance(
                kind, config.family, n, config.epsilon, omega, seed, config.guard
            )
            if config.protocol == "det":
                tr = run_deterministic(instance, guard=config.guard)
            elif config.protocol == "rand":
                tr = run_private_coin(
                    instance, seed_a=_derive_seed(seed, "a"),
                    seed_b=_derive_seed(seed, "b"), guard=config.guard,
                )
            else:
                tr = run_public_coin(
                    instance, shared_seed=_derive_seed(seed, "shared"),
                    rounds=config.rounds, guard=config.guard,
                )
            want = "accept" if kind == NEAR else "reject"
            correct += tr.outcome == want
            bits.append(tr.total_bits)
            ceilings.append(snap_ceil(approx_spectral_norm(instance.f, Fraction(1, 3)).value))
    except CellSkipped as skip:
        return ExperimentRow(n, label, omega, None, None, None, None, None,
                             skipped=skip.reason)
    wall_ms = int((time.perf_counter() - start) * 1000)
    return ExperimentRow(
        n=n,
        family=label,
        omega=omega,
        t_ceiling=max(ceilings),
        correct_frac=Fraction(correct, config.trials),
        mean_bits=sum(bits) / len(bits),
        max_bits=max(bits),
        wall_ms=wall_ms,
    )


def _cell_args(config: ExperimentConfig):
    for n in config.n_values:
        for omega in config.omegas:
            for kind in (NEAR, FAR):
                yield config, n, omega, kind


def _run_cell_star(args):
    return _run_cell(*args)


def run_experiment(config: ExperimentConfig) -> list[ExperimentRow]:
    cells = list(_cell_args(config))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_cell_star, cells))
    else:
        rows = [_run_cell(*args) for args in cells]
    for row in rows:
        if row.skipped:
            print(f"skipped cell: {row.skipped}", file=sys.stderr)
    return rows


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def write_csv(rows: list[ExperimentRow], path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(rows_to_csv(rows))

"""Command-line interface.

Rational arguments are written p/q (or a bare integer); decimals are
rejected so thresholds stay exact.  Subcommands mirror the library:

    norm, wht, gen, canon, lindist       file utilities
    run-det, run-rand, run-public        protocol runs (memory or TCP)
    phimap, reduce-equ                   lower-bound constructions
    experiment                           sweep runner (CSV + figures)
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from fractions import Fraction

from . import __version__
from .boolfn import (
    generate,
    load_table,
    save_table,
    table_to_hex,
    wht,
)
from .channel import SocketEndpoint, build_transcript
from .errors import ProtocolError
from .experiment import ExperimentConfig, run_experiment, write_csv
from .gf2 import GF2Vector
from .lindist import affine_distance, canonical_form, linear_distance
from .phimap import construct_phi, reduce_equ, verify_phi
from .protocol import (
    PromiseInstance,
    det_party,
    private_party,
    public_party,
    run_deterministic,
    run_private_coin,
    run_public_coin,
)
from .spectral import approx_spectral_norm, spectral_norm


def parse_fraction(text: str) -> Fraction:
    """Accept 'p/q' or a bare integer; decimals are a user error."""
    text = text.strip()
    if "." in text:
        raise argparse.ArgumentTypeError(
            f"{text!r}: write rationals as p/q, not decimals"
        )
    try:
        if "/" in text:
            p, q = text.split("/")
            return Fraction(int(p), int(q))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}") from exc


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def cmd_norm(args) -> int:
    f = load_table(args.path)
    norm = spectral_norm(f)
    payload = {"n": f.n, "spectral_norm": str(norm)}
    lines = [f"spectral_norm = {norm}"]
    if args.gamma is not None:
        witness = approx_spectral_norm(f, args.gamma)
        payload["gamma"] = str(args.gamma)
        payload["approx"] = str(witness.value)
        payload["witness"] = witness.to_record()
        lines.append(f"approx = {witness.value}  (gamma = {args.gamma})")
    _emit(args, payload, lines)
    return 0


def cmd_wht(args) -> int:
    f = load_table(args.path)
    spectrum = wht(f)
    payload = {
        "n": f.n,
        "coefficients": {
            str(GF2Vector(f.n, a)): str(c)
            for a, c in enumerate(spectrum.coeffs)
            if c != 0 or args.all
        },
    }
    lines = [
        f"{GF2Vector(f.n, a)} -> {c}"
        for a, c in enumerate(spectrum.coeffs)
        if c != 0 or args.all
    ]
    _emit(args, payload, lines)
    return 0


def cmd_gen(args) -> int:
    alpha = GF2Vector(args.n, args.alpha) if args.alpha is not None else None
    f = generate(args.kind, args.n, args.seed, alpha=alpha, junta_arity=args.junta_arity)
    save_table(f, args.out)
    _emit(args, {"n": f.n, "table_hex": table_to_hex(f), "out": args.out},
          [f"wrote n={f.n} table to {args.out}"])
    return 0


def cmd_canon(args) -> int:
    f = load_table(args.path)
    canon, witness = canonical_form(f, guard=args.guard_n)
    if args.out:
        save_table(canon, args.out)
    payload = {
        "n": f.n,
        "canonical_hex": table_to_hex(canon),
        "witness": witness.to_lines().split("\n"),
    }
    _emit(args, payload,
          [f"canonical = {table_to_hex(canon)}", "witness matrix:", witness.to_lines()])
    return 0


def cmd_lindist(args) -> int:
    f = load_table(args.f)
    g = load_table(args.g)
    if args.affine:
        value, (m, a) = affine_distance(f, g, guard=args.guard_n)
        payload = {"affine_distance": str(value),
                   "witness_matrix": m.to_lines().split("\n"),
                   "witness_shift": str(a)}
        lines = [f"affine_distance = {value}", "witness matrix:", m.to_lines(),
                 f"witness shift: {a}"]
    else:
        result = linear_distance(f, g, guard=args.guard_n)
        payload = {"linear_distance": str(result.value),
                   "witness_matrix": result.witness.to_lines().split("\n")}
        lines = [f"linear_distance = {result.value}", "witness matrix:",
                 result.witness.to_lines()]
    _emit(args, payload, lines)
    return 0


def _socket_run(args, party, role_label: str, protocol_name: str, n: int,
                stats_from) -> int:
    """Drive one side of a protocol over TCP and print its local transcript."""
    if args.listen:
        host, port = _hostport(args.listen)
        server = socket.create_server((host, port))
        conn, _ = server.accept()
        endpoint = SocketEndpoint(conn, role_label)
        server.close()
    else:
        host, port = _hostport(args.connect)
        endpoint = SocketEndpoint(socket.create_connection((host, port)), role_label)
    try:
        result = party(endpoint)
    finally:
        endpoint.close()
    outcome = result.get("outcome") or "undetermined"
    transcript = build_transcript(protocol_name, n, args.eps, args.omega, outcome,
                                  stats_from(result), endpoint.audit)
    print(transcript.to_json() if args.json else
          f"outcome = {outcome}\ntotal_bits = {transcript.total_bits}")
    return 0


def _hostport(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def _load_run_inputs(args):
    remote = args.listen or args.connect
    if remote:
        if args.listen and not args.g:
            raise SystemExit("--listen side holds g: pass --g")
        if args.connect and not args.f:
            raise SystemExit("--connect side holds f: pass --f")
        fn = load_table(args.g if args.listen else args.f)
        return fn, None
    if not (args.f and args.g):
        raise SystemExit("in-memory run needs both --f and --g")
    return load_table(args.f), load_table(args.g)


def cmd_run_det(args) -> int:
    local, peer = _load_run_inputs(args)
    if peer is None:
        role = "B" if args.listen else "A"
        return _socket_run(
            args,
            lambda ep: det_party(ep, local, args.eps, args.omega, guard=args.guard_n),
            role, "deterministic", local.n,
            lambda r: {k: str(v) for k, v in r.items() if k != "outcome"},
        )
    instance = PromiseInstance(local, peer, args.eps, args.omega)
    transcript = run_deterministic(instance, guard=args.guard_n)
    print(transcript.to_json() if args.json else
          f"outcome = {transcript.outcome}\ntotal_bits = {transcript.total_bits}")
    return 0


def cmd_run_rand(args) -> int:
    local, peer = _load_run_inputs(args)
    if args.eps != 0:
        raise SystemExit("run-rand handles eps = 0 only")
    if peer is None:
        role = "B" if args.listen else "A"
        seed = args.seed_a  # both sides must agree on the prober's seed source
        return _socket_run(
            args,
            lambda ep: private_party(ep, local, args.omega, seed, guard=args.guard_n),
            role, "private-coin", local.n,
            lambda r: {k: str(v) for k, v in r.items() if k != "outcome"},
        )
    instance = PromiseInstance(local, peer, args.eps, args.omega)
    transcript = run_private_coin(instance, args.seed_a, args.seed_b,
                                  guard=args.guard_n)
    print(transcript.to_json() if args.json else
          f"outcome = {transcript.outcome}\ntotal_bits = {transcript.total_bits}")
    return 0


def cmd_run_public(args) -> int:
    local, peer = _load_run_inputs(args)
    if args.eps != 0:
        raise SystemExit("run-public handles eps = 0 only")
    if peer is None:
        role = "B" if args.listen else "A"
        return _socket_run(
            args,
            lambda ep: public_party(ep, local, args.seed, args.rounds,
                                    guard=args.guard_n),
            role, "public-coin", local.n,
            lambda r: {"rounds": args.rounds},
        )
    instance = PromiseInstance(local, peer, args.eps, args.omega)
    transcript = run_public_coin(instance, args.seed, rounds=args.rounds,
                                 guard=args.guard_n)
    print(transcript.to_json() if args.json else
          f"outcome = {transcript.outcome}\ntotal_bits = {transcript.total_bits}")
    return 0


def cmd_phimap(args) -> int:
    phi = construct_phi(args.n, args.ell, args.omega)
    if phi is None:
        print("FAIL: the remaining-table pool emptied before every input was mapped")
        return 1
    width = max(1, (args.n + 3) // 4)
    for a in range(1 << args.n):
        print(f"{a:0{width}x} -> {table_to_hex(phi.function_at(a))}")
    if args.verify:
        report = verify_phi(phi, guard=args.guard_n)
        print(f"verified: min pairwise linear distance = {report.min_distance} "
              f"over {report.pairs_checked} pairs -> "
              f"{'ok' if report.ok else f'VIOLATION at {report.witness_pair}'}")
        return 0 if report.ok else 1
    return 0


def _make_oracle(args):
    if args.oracle == "exact":
        return lambda f, g: linear_distance(f, g, guard=args.guard_n).value == 0
    if args.oracle == "public":
        return lambda f, g: run_public_coin(
            PromiseInstance(f, g, Fraction(0), args.omega), args.seed,
            rounds=args.rounds, guard=args.guard_n,
        ).outcome == "accept"
    if args.oracle == "det":
        return lambda f, g: run_deterministic(
            PromiseInstance(f, g, Fraction(0), args.omega), guard=args.guard_n
        ).outcome == "accept"
    return lambda f, g: run_private_coin(
        PromiseInstance(f, g, Fraction(0), args.omega),
        args.seed, args.seed + 1, guard=args.guard_n,
    ).outcome == "accept"


def cmd_reduce_equ(args) -> int:
    phi = construct_phi(args.n, args.ell, args.omega)
    if phi is None:
        print("FAIL: no injective map at these parameters")
        return 1
    oracle = _make_oracle(args)
    a, b = int(args.a, 2), int(args.b, 2)
    equal = reduce_equ(a, b, phi, oracle)
    print("EQUAL" if equal else "DIFFERENT")
    return 0


def cmd_experiment(args) -> int:
    config = ExperimentConfig(
        protocol=args.protocol,
        family=args.family,
        n_values=tuple(int(x) for x in args.n_list.split(",")),
        omegas=tuple(parse_fraction(x) for x in args.omega_list.split(",")),
        trials=args.trials,
        base_seed=args.seed,
        epsilon=args.eps,
        rounds=args.rounds,
        guard=args.guard_n,
        workers=args.workers,
    )
    rows = run_experiment(config)
    write_csv(rows, args.out)
    written = [args.out]
    if not args.no_plots:
        from .plots import render_report

        written += [str(p) for p in render_report(rows, args.out)]
    print("wrote " + ", ".join(str(w) for w in written))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linequiv",
        description="linear-equivalence testing lab for Boolean functions",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--guard-n", type=int, default=5,
                        help="exhaustive-sweep arity guard")
    parser.add_argument("--json", action="store_true", help="structured output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="spectral norm of a truth-table file")
    p.add_argument("path")
    p.add_argument("--gamma", type=parse_fraction, default=None)
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("wht", help="Fourier coefficients of a truth-table file")
    p.add_argument("path")
    p.add_argument("--all", action="store_true", help="include zero coefficients")
    p.set_defaults(fn=cmd_wht)

    p = sub.add_parser("gen", help="generate a test-family function")
    p.add_argument("kind", choices=["uniform-random", "parity", "and-all",
                                    "bent-ip", "planted-junta"])
    p.add_argument("n", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=int, default=None,
                   help="parity character, integer-encoded")
    p.add_argument("--junta-arity", type=int, default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("canon", help="canonical form under invertible maps")
    p.add_argument("path")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_canon)

    p = sub.add_parser("lindist", help="exact linear (or affine) distance")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--affine", action="store_true")
    p.set_defaults(fn=cmd_lindist)

    for name, handler in (("run-det", cmd_run_det), ("run-rand", cmd_run_rand),
                          ("run-public", cmd_run_public)):
        p = sub.add_parser(name, help=f"{name[4:]} protocol run")
        p.add_argument("--f", default=None, help="Alice's truth-table file")
        p.add_argument("--g", default=None, help="Bob's truth-table file")
        p.add_argument("--eps", type=parse_fraction, default=Fraction(0))
        p.add_argument("--omega", type=parse_fraction, required=True)
        p.add_argument("--listen", default=None, metavar="HOST:PORT")
        p.add_argument("--connect", default=None, metavar="HOST:PORT")
        if name == "run-rand":
            p.add_argument("--seed-a", type=int, default=1)
            p.add_argument("--seed-b", type=int, default=2)
        if name == "run-public":
            p.add_argument("--rounds", type=int, default=7)
        p.set_defaults(fn=handler)

    p = sub.add_parser("phimap", help="greedy separation map construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--omega", type=parse_fraction, required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(fn=cmd_phimap)

    p = sub.add_parser("reduce-equ", help="equality via the isomorphism oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--omega", type=parse_fraction, required=True)
    p.add_argument("--a", required=True, help="first input, binary string")
    p.add_argument("--b", required=True, help="second input, binary string")
    p.add_argument("--oracle", choices=["exact", "public", "det", "rand"],
                   default="exact")
    p.add_argument("--rounds", type=int, default=7)
    p.set_defaults(fn=cmd_reduce_equ)

    p = sub.add_parser("experiment", help="protocol sweep -> CSV + figures")
    p.add_argument("--protocol", choices=["det", "rand", "public"], required=True)
    p.add_argument("--family", default="uniform-random")
    p.add_argument("--n-list", default="3", help="comma-separated arities")
    p.add_argument("--omega-list", default="1/4", help="comma-separated rationals")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--eps", type=parse_fraction, default=Fraction(0))
    p.add_argument("--rounds", type=int, default=7)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plots", action="store_true",
                   help="skip the PNG report figures")
    p.set_defaults(fn=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, ProtocolError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

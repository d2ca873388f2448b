"""Audited bit channel for two-party protocols.

Messages are strings over {'0','1'}.  Every transmitted bit is counted
exactly once per direction; socket framing overhead (a 32-bit big-endian
bit-length prefix plus zero padding to whole bytes) is tallied separately
and never enters the protocol bit counts.
"""

from __future__ import annotations

import json
import queue
import socket
import struct
import threading
from dataclasses import dataclass, field

from .errors import ProtocolError

RECV_TIMEOUT = 30.0


def encode_integer(k: int) -> str:
    """Elias-gamma code of k >= 1: floor(log2 k) zeros, then k in binary."""
    if k < 1:
        raise ValueError(f"gamma code needs a positive integer, got {k}")
    body = format(k, "b")
    return "0" * (len(body) - 1) + body


def decode_integer(bits: str) -> int:
    reader = BitReader(bits)
    k = reader.gamma()
    if not reader.done():
        raise ProtocolError("trailing bits after a gamma code")
    return k


class BitReader:
    """Sequential reader over a received message."""

    def __init__(self, bits: str):
        self.bits = bits
        self.pos = 0

    def take(self, k: int) -> str:
        if self.pos + k > len(self.bits):
            raise ProtocolError(
                f"truncated message: wanted {k} bits at offset {self.pos}, "
                f"have {len(self.bits)}"
            )
        out = self.bits[self.pos : self.pos + k]
        self.pos += k
        return out

    def gamma(self) -> int:
        zeros = 0
        while True:
            bit = self.take(1)
            if bit == "1":
                break
            zeros += 1
        return int("1" + self.take(zeros), 2) if zeros else 1

    def done(self) -> bool:
        return self.pos == len(self.bits)


def bits_to_bytes(bits: str) -> bytes:
    """Pack to bytes, first bit into the most significant position."""
    out = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b == "1":
            out[i // 8] |= 0x80 >> (i % 8)
    return bytes(out)


def bytes_to_bits(data: bytes, nbits: int) -> str:
    return "".join(
        "1" if data[i // 8] & (0x80 >> (i % 8)) else "0" for i in range(nbits)
    )


def bits_to_hex(bits: str) -> str:
    """Hex with the same orientation as the truth-table file format."""
    out = []
    for i in range(0, len(bits), 4):
        chunk = bits[i : i + 4].ljust(4, "0")
        out.append(f"{int(chunk, 2):x}")
    return "".join(out)


@dataclass
class ChannelAudit:
    """Transport-level tally shared by both endpoints of one channel."""

    messages: list = field(default_factory=list)  # (direction, bits)
    bits_a_to_b: int = 0
    bits_b_to_a: int = 0
    framing_bits: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, direction: str, bits: str, framing: int = 0) -> None:
        with self.lock:
            self.messages.append((direction, bits))
            if direction == "a->b":
                self.bits_a_to_b += len(bits)
            else:
                self.bits_b_to_a += len(bits)
            self.framing_bits += framing

    @property
    def total_bits(self) -> int:
        return self.bits_a_to_b + self.bits_b_to_a


class MemoryEndpoint:
    """One side of an in-process channel backed by a queue pair."""

    def __init__(self, label: str, outbox: queue.Queue, inbox: queue.Queue,
                 audit: ChannelAudit):
        self.label = label  # 'A' or 'B'
        self._outbox = outbox
        self._inbox = inbox
        self.audit = audit

    def send(self, bits: str) -> None:
        if bits and set(bits) - {"0", "1"}:
            raise ValueError("messages must be 01-strings")
        self.audit.record("a->b" if self.label == "A" else "b->a", bits)
        self._outbox.put(bits)

    def recv(self) -> str:
        try:
            return self._inbox.get(timeout=RECV_TIMEOUT)
        except queue.Empty:
            raise ProtocolError(f"party {self.label}: peer went silent") from None


def make_memory_channel() -> tuple[MemoryEndpoint, MemoryEndpoint, ChannelAudit]:
    audit = ChannelAudit()
    ab: queue.Queue = queue.Queue()
    ba: queue.Queue = queue.Queue()
    return (
        MemoryEndpoint("A", ab, ba, audit),
        MemoryEndpoint("B", ba, ab, audit),
        audit,
    )


class SocketEndpoint:
    """Length-prefixed frames over TCP: 32-bit big-endian payload length in
    bits, payload packed MSB-first and zero-padded to bytes."""

    def __init__(self, sock: socket.socket, label: str,
                 audit: ChannelAudit | None = None):
        self.sock = sock
        self.label = label
        self.audit = audit if audit is not None else ChannelAudit()
        sock.settimeout(RECV_TIMEOUT)

    def send(self, bits: str) -> None:
        payload = bits_to_bytes(bits)
        frame = struct.pack("!I", len(bits)) + payload
        self.sock.sendall(frame)
        self.audit.record(
            "a->b" if self.label == "A" else "b->a",
            bits,
            framing=8 * len(frame) - len(bits),
        )

    def _recv_exact(self, nbytes: int) -> bytes:
        chunks = []
        got = 0
        while got < nbytes:
            try:
                chunk = self.sock.recv(nbytes - got)
            except socket.timeout:
                raise ProtocolError(f"party {self.label}: recv timeout") from None
            if not chunk:
                raise ProtocolError(f"party {self.label}: peer closed the stream")
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def recv(self) -> str:
        header = self._recv_exact(4)
        (nbits,) = struct.unpack("!I", header)
        payload = self._recv_exact((nbits + 7) // 8)
        bits = bytes_to_bits(payload, nbits)
        self.audit.record(
            "b->a" if self.label == "A" else "a->b",
            bits,
            framing=8 * (4 + len(payload)) - nbits,
        )
        return bits

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


@dataclass(frozen=True)
class Transcript:
    """Audited record of one protocol execution."""

    protocol: str
    n: int
    epsilon: object
    omega: object
    outcome: str  # 'accept' | 'reject'
    total_bits: int
    bits_a_to_b: int
    bits_b_to_a: int
    stats: dict
    messages: tuple  # ((direction, bits), ...)

    def to_json(self) -> str:
        return json.dumps(
            {
                "protocol": self.protocol,
                "n": self.n,
                "epsilon": str(self.epsilon),
                "omega": str(self.omega),
                "outcome": self.outcome,
                "total_bits": self.total_bits,
                "bits_a_to_b": self.bits_a_to_b,
                "bits_b_to_a": self.bits_b_to_a,
                "stats": {k: _jsonable(v) for k, v in self.stats.items()},
                "messages": [
                    {"dir": d, "len": len(bits), "hex": bits_to_hex(bits)}
                    for d, bits in self.messages
                ],
            },
            indent=2,
        )


def _jsonable(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def build_transcript(protocol, n, epsilon, omega, outcome, stats,
                     audit: ChannelAudit) -> Transcript:
    total = audit.total_bits
    assert total == sum(len(b) for _, b in audit.messages)
    return Transcript(
        protocol=protocol,
        n=n,
        epsilon=epsilon,
        omega=omega,
        outcome=outcome,
        total_bits=total,
        bits_a_to_b=audit.bits_a_to_b,
        bits_b_to_a=audit.bits_b_to_a,
        stats=stats,
        messages=tuple(audit.messages),
    )

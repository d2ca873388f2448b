import json
import socket
import threading

import pytest
from hypothesis import given, strategies as st

from linequiv.channel import (
    BitReader,
    SocketEndpoint,
    bits_to_bytes,
    bits_to_hex,
    build_transcript,
    bytes_to_bits,
    decode_integer,
    encode_integer,
    make_memory_channel,
)
from linequiv.errors import ProtocolError


class TestEliasGamma:
    def test_one(self):
        assert encode_integer(1) == "1"

    def test_five(self):
        assert encode_integer(5) == "00101"

    def test_length_formula(self):
        for k in (1, 2, 3, 7, 8, 255, 256, 65535):
            assert len(encode_integer(k)) == 2 * (k.bit_length() - 1) + 1

    @given(st.integers(1, 1 << 16))
    def test_roundtrip(self, k):
        assert decode_integer(encode_integer(k)) == k

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            encode_integer(0)

    def test_truncated_stream_faults(self):
        with pytest.raises(ProtocolError):
            decode_integer("001")
        with pytest.raises(ProtocolError):
            decode_integer(encode_integer(5) + "1")

    def test_reader_sequencing(self):
        reader = BitReader(encode_integer(5) + "01" + encode_integer(1))
        assert reader.gamma() == 5
        assert reader.take(2) == "01"
        assert reader.gamma() == 1
        assert reader.done()


class TestBitPacking:
    @given(st.text(alphabet="01", max_size=64))
    def test_bytes_roundtrip(self, bits):
        assert bytes_to_bits(bits_to_bytes(bits), len(bits)) == bits

    def test_hex_orientation(self):
        # first bit is the most significant bit of the first digit
        assert bits_to_hex("1000") == "8"
        assert bits_to_hex("00011") == "18"


class TestMemoryChannel:
    def test_counts_and_order(self):
        ep_a, ep_b, audit = make_memory_channel()
        ep_a.send("101")
        assert ep_b.recv() == "101"
        ep_b.send("0")
        assert ep_a.recv() == "0"
        ep_a.send("")
        assert ep_b.recv() == ""
        assert audit.bits_a_to_b == 3
        assert audit.bits_b_to_a == 1
        assert audit.total_bits == 4
        assert audit.messages == [("a->b", "101"), ("b->a", "0"), ("a->b", "")]

    def test_rejects_non_binary(self):
        ep_a, _, _ = make_memory_channel()
        with pytest.raises(ValueError):
            ep_a.send("10x")


class TestSocketChannel:
    def test_framed_exchange_with_audits(self):
        server = socket.create_server(("127.0.0.1", 0))
        port = server.getsockname()[1]
        results = {}

        def bob():
            conn, _ = server.accept()
            ep = SocketEndpoint(conn, "B")
            got = ep.recv()
            ep.send(got[::-1])
            results["b_audit"] = ep.audit
            ep.close()

        thread = threading.Thread(target=bob)
        thread.start()
        ep = SocketEndpoint(socket.create_connection(("127.0.0.1", port)), "A")
        ep.send("10110")
        assert ep.recv() == "01101"
        thread.join(timeout=10)
        ep.close()
        server.close()

        for audit in (ep.audit, results["b_audit"]):
            assert audit.bits_a_to_b == 5
            assert audit.bits_b_to_a == 5
            assert audit.total_bits == 10
            # each frame: 32 header bits + padding to one byte = 35 extra
            assert audit.framing_bits == 2 * (32 + 3)
        assert ep.audit.messages == [("a->b", "10110"), ("b->a", "01101")]


class TestTranscript:
    def test_json_shape(self):
        ep_a, ep_b, audit = make_memory_channel()
        ep_a.send("1101")
        ep_b.recv()
        tr = build_transcript("demo", 3, 0, "1/4", "accept", {"rounds": 1}, audit)
        payload = json.loads(tr.to_json())
        assert payload["protocol"] == "demo"
        assert payload["total_bits"] == 4
        assert payload["bits_a_to_b"] == 4
        assert payload["bits_b_to_a"] == 0
        assert payload["messages"] == [{"dir": "a->b", "len": 4, "hex": "d"}]
        assert payload["stats"] == {"rounds": 1}

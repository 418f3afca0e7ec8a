import numpy as np
import pytest

from visualvault import Template


class TestConstruction:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            Template([0, 1, 2])

    def test_rejects_matrix(self):
        with pytest.raises(ValueError):
            Template(np.zeros((2, 2)))

    def test_immutable(self):
        t = Template([1, 0, 1, 1])
        with pytest.raises(ValueError):
            t.bits[0] = 0

    def test_equality_and_hash(self):
        a = Template([1, 0, 1])
        b = Template([1, 0, 1])
        assert a == b and hash(a) == hash(b)
        assert a != Template([1, 0, 0])
        assert a != Template([1, 0, 1, 0])


class TestSerialization:
    def test_bitstring_roundtrip(self):
        t = Template.from_bitstring("10110010")
        assert t.to_bitstring() == "10110010"

    def test_hex_convention(self):
        # coordinate 0 is the MSB of the first byte
        assert Template.from_bitstring("10110010").to_hex() == "b2"
        assert Template.from_hex("b2", 8).to_bitstring() == "10110010"

    def test_hex_roundtrip_512(self, rng):
        t = Template.random(512, rng)
        assert len(t.to_hex()) == 128
        assert Template.from_hex(t.to_hex(), 512) == t

    def test_bad_lengths(self):
        with pytest.raises(ValueError):
            Template([1, 0, 1]).to_bytes()
        with pytest.raises(ValueError):
            Template.from_hex("b2", 16)


class TestHalves:
    def test_toy_values(self):
        # c1 = 0101 -> 5, c2 = 1001 -> 9, lowest coordinate most significant
        assert Template.from_bitstring("01011001").halves() == (5, 9)

    def test_all_ones(self):
        c1, c2 = Template([1] * 16).halves()
        assert c1 == c2 == 0xFF

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            Template([1, 0, 1]).halves()


class TestOps:
    def test_with_flips(self):
        t = Template.from_bitstring("10100010")
        assert t.with_flips([3], []).to_bitstring() == "10110010"
        assert t.with_flips([], [0]).to_bitstring() == "00100010"
        assert t.with_flips([1], [6]).to_bitstring() == "11100000"

    def test_xor(self):
        a = Template.from_bitstring("1100")
        b = Template.from_bitstring("1010")
        assert a.xor(b).to_bitstring() == "0110"
        with pytest.raises(ValueError):
            a.xor(Template([1, 0]))

    def test_random_length(self, rng):
        assert Template.random(37, rng).n == 37

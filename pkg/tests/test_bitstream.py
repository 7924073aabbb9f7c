import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsncodes.bitstream import BitString, BitUnderflowError, append, bit_length, take_prefix

bits = st.text(alphabet="01", max_size=64)


@pytest.mark.parametrize(
    "left,right,expected",
    [("", "11", "11"), ("0", "", "0"), ("010", "011", "010011")],
)
def test_append(left, right, expected):
    out = append(BitString(left), BitString(right))
    assert str(out) == expected
    assert out.length == len(left) + len(right)


@pytest.mark.parametrize("value,expected", [(0, 1), (255, 8), (40, 6)])
def test_bit_length_examples(value, expected):
    assert bit_length(value) == expected


def test_bit_length_matches_log2_brute_force():
    for v in range(1, 65536):
        assert bit_length(v) == math.floor(math.log2(v)) + 1


def test_bit_length_rejects_negative():
    with pytest.raises(ValueError):
        bit_length(-1)


@pytest.mark.parametrize(
    "stream,n,head,tail",
    [("010011", 3, "010", "011"), ("1", 1, "1", ""), ("00101", 0, "", "00101")],
)
def test_take_prefix(stream, n, head, tail):
    h, t = take_prefix(BitString(stream), n)
    assert (str(h), str(t)) == (head, tail)


def test_take_prefix_underflow():
    with pytest.raises(BitUnderflowError):
        take_prefix(BitString("01"), 3)


@given(bits, st.data())
def test_split_then_join_roundtrips(s, data):
    n = data.draw(st.integers(0, len(s)))
    head, tail = take_prefix(BitString(s), n)
    assert head + tail == BitString(s)


@given(bits, bits)
def test_parse_after_append_yields_parts(a, b):
    joined = append(BitString(a), BitString(b))
    assert take_prefix(joined, len(a)) == (BitString(a), BitString(b))


def test_rejects_non_bits():
    with pytest.raises(ValueError):
        BitString("012")


def test_int_conversion():
    assert BitString.from_int(19, 6) == BitString("010011")
    assert BitString("010011").to_int() == 19
    with pytest.raises(ValueError):
        BitString.from_int(8, 3)

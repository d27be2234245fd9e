import pytest
from hypothesis import given, strategies as st

from csdjwt.accumulator import R
from csdjwt.claims import (
    Claim,
    canonicalize,
    check_unique_keys,
    claims_from_mapping,
    hash_to_element,
    parse_canonical,
    synthetic_claims,
)
from csdjwt.errors import ClaimError

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-(2**63), 2**63) | st.floats(allow_nan=False, allow_infinity=False) | st.text(),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=8), inner, max_size=4),
    max_leaves=10,
)
keys = st.text(min_size=1, max_size=20).filter(lambda k: ":" not in k and all(ord(c) >= 0x20 and ord(c) != 0x7F for c in k))


def test_canonical_form():
    assert canonicalize(Claim("age", 30)) == b"age:30"
    assert canonicalize(Claim("name", "Zoë")) == 'name:"Zoë"'.encode()
    assert canonicalize(Claim("addr", {"b": 1, "a": [1, 2]})) == b'addr:{"a":[1,2],"b":1}'


def test_distinct_types_are_distinct_claims():
    assert Claim("x", 1) != Claim("x", True)
    assert Claim("x", 1) != Claim("x", 1.0)
    assert Claim("x", 1) != Claim("x", "1")
    assert len({Claim("x", 1), Claim("x", 1)}) == 1


@given(keys, json_values)
def test_canonical_roundtrip(key, value):
    claim = Claim(key, value)
    assert parse_canonical(canonicalize(claim)) == claim


@given(keys, json_values)
def test_element_in_range(key, value):
    assert 0 <= hash_to_element(Claim(key, value)) < R


def test_hash_to_element_is_deterministic():
    c = Claim("claim_key_1", "claim_value_1")
    assert hash_to_element(c) == hash_to_element(Claim("claim_key_1", "claim_value_1"))
    assert hash_to_element(c) != hash_to_element(Claim("claim_key_1", "claim_value_2"))


@pytest.mark.parametrize("key", ["", "a:b", "tab\there", 3, None])
def test_bad_keys(key):
    with pytest.raises(ClaimError):
        Claim(key, 1)


@pytest.mark.parametrize("value", [float("nan"), float("inf"), b"bytes", {1: "x"}, object()])
def test_bad_values(value):
    with pytest.raises(ClaimError):
        Claim("k", value)


@pytest.mark.parametrize("data", [b"age: 30", b'k:{"b":1,"a":2}', b"noseparator", b"\xff:1", b"k:nope"])
def test_parse_rejects_non_canonical(data):
    with pytest.raises(ClaimError):
        parse_canonical(data)


def test_unique_keys_and_reserved():
    check_unique_keys(claims_from_mapping({"a": 1, "b": 2}))
    with pytest.raises(ClaimError, match="duplicate"):
        check_unique_keys([Claim("a", 1), Claim("a", 2)])
    with pytest.raises(ClaimError, match="reserved"):
        check_unique_keys([Claim("iss_did", "did:mock:x")])
    check_unique_keys([Claim("iss_did", "did:mock:x")], allow_reserved=True)


def test_synthetic_claims():
    claims = synthetic_claims(3)
    assert [c.key for c in claims] == ["claim_key_1", "claim_key_2", "claim_key_3"]
    assert claims[2].value == "claim_value_3"

import pytest

from csdjwt.errors import DecodeError
from csdjwt.jose import (
    SigningKey,
    VerifyingKey,
    b64u_decode,
    b64u_encode,
    canonical_json,
    sign_compact,
    split_compact,
)


def test_b64u_roundtrip():
    for n in range(0, 40):
        data = bytes(range(n))
        assert b64u_decode(b64u_encode(data)) == data
        assert "=" not in b64u_encode(data)


@pytest.mark.parametrize("text", ["YQ==", "Y", "a+b/", "YR", "ab c", 5])
def test_b64u_strict(text):
    with pytest.raises(DecodeError):
        b64u_decode(text)


def test_canonical_json():
    assert canonical_json({"b": 1, "a": "é"}) == '{"a":"é","b":1}'
    with pytest.raises(ValueError):
        canonical_json(float("nan"))


def test_signing_is_deterministic_and_verifies():
    key = SigningKey.from_seed(b"seed")
    sig = key.sign(b"message")
    assert len(sig) == 64
    assert sig == SigningKey.from_seed(b"seed").sign(b"message")
    assert key.public.verify(sig, b"message")
    assert not key.public.verify(sig, b"messagE")
    assert not key.public.verify(sig[:-1], b"message")


def test_public_key_encodings():
    pub = SigningKey.from_seed(b"seed").public
    assert VerifyingKey.from_bytes(pub.to_bytes()) == pub
    assert VerifyingKey.from_jwk(pub.to_jwk()) == pub
    assert len(pub.to_bytes()) == 33
    assert SigningKey.from_bytes(SigningKey.from_seed(b"x").to_bytes()).public == SigningKey.from_seed(b"x").public


def test_compact_jwt():
    key = SigningKey.from_seed(b"seed")
    jwt = sign_compact({"alg": "ES256"}, {"n": 1}, key)
    header, payload, sig, signing_input = split_compact(jwt)
    assert header == {"alg": "ES256"} and payload == {"n": 1}
    assert key.public.verify(sig, signing_input)
    with pytest.raises(DecodeError):
        split_compact(jwt + ".x")

"""Compact-JWT plumbing: base64url, canonical JSON and ES256 keys.

Signatures are deterministic ECDSA P-256 / SHA-256 (RFC 6979) in the raw
``r || s`` form JWS uses, so fixed keys and inputs produce fixed tokens.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
from typing import Any

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.asymmetric.utils import decode_dss_signature, encode_dss_signature

from .errors import DecodeError

ES256 = "ES256"
ES256_SIG_BYTES = 64
P256_COMPRESSED_BYTES = 33

_SEPARATORS = (",", ":")
_ECDSA = ec.ECDSA(hashes.SHA256(), deterministic_signing=True)


def b64u_encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64u_decode(text: str) -> bytes:
    """Strict decoding: rejects padding, foreign characters and non-zero tail bits."""
    if not isinstance(text, str):
        raise DecodeError("base64url segment must be a string")
    if "=" in text or len(text) % 4 == 1:
        raise DecodeError("malformed base64url segment")
    try:
        raw = base64.b64decode(text + "=" * (-len(text) % 4), altchars=b"-_", validate=True)
    except (binascii.Error, ValueError) as exc:
        raise DecodeError(f"malformed base64url segment: {exc}") from None
    if b64u_encode(raw) != text:
        raise DecodeError("non-canonical base64url segment")
    return raw


def canonical_json(value: Any) -> str:
    """Sorted keys, no whitespace, UTF-8 text; NaN and infinities are refused."""
    return json.dumps(value, sort_keys=True, separators=_SEPARATORS, ensure_ascii=False, allow_nan=False)


def b64u_json(value: Any) -> str:
    return b64u_encode(canonical_json(value).encode("utf-8"))


def json_from_b64u(segment: str) -> Any:
    raw = b64u_decode(segment)
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DecodeError(f"segment is not JSON: {exc}") from None


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


class VerifyingKey:
    """ES256 public key."""

    __slots__ = ("_key",)

    def __init__(self, key: ec.EllipticCurvePublicKey):
        self._key = key

    @classmethod
    def from_bytes(cls, data: bytes) -> "VerifyingKey":
        try:
            return cls(ec.EllipticCurvePublicKey.from_encoded_point(ec.SECP256R1(), data))
        except ValueError as exc:
            raise DecodeError(f"invalid P-256 public key: {exc}") from None

    @classmethod
    def from_jwk(cls, jwk: dict) -> "VerifyingKey":
        if jwk.get("kty") != "EC" or jwk.get("crv") != "P-256":
            raise DecodeError("expected an EC P-256 JWK")
        x = b64u_decode(jwk.get("x", ""))
        y = b64u_decode(jwk.get("y", ""))
        if len(x) != 32 or len(y) != 32:
            raise DecodeError("JWK coordinates must be 32 bytes")
        return cls.from_bytes(b"\x04" + x + y)

    def to_bytes(self) -> bytes:
        """Compressed SEC1 point, 33 bytes."""
        return self._key.public_bytes(serialization.Encoding.X962, serialization.PublicFormat.CompressedPoint)

    def to_jwk(self) -> dict:
        nums = self._key.public_numbers()
        return {
            "crv": "P-256",
            "kty": "EC",
            "x": b64u_encode(nums.x.to_bytes(32, "big")),
            "y": b64u_encode(nums.y.to_bytes(32, "big")),
        }

    def verify(self, signature: bytes, message: bytes) -> bool:
        if len(signature) != ES256_SIG_BYTES:
            return False
        r = int.from_bytes(signature[:32], "big")
        s = int.from_bytes(signature[32:], "big")
        try:
            self._key.verify(encode_dss_signature(r, s), message, _ECDSA)
        except (InvalidSignature, ValueError):
            return False
        return True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VerifyingKey) and self.to_bytes() == other.to_bytes()

    def __hash__(self) -> int:
        return hash(self.to_bytes())


class SigningKey:
    """ES256 private key."""

    __slots__ = ("_key", "public")

    def __init__(self, key: ec.EllipticCurvePrivateKey):
        self._key = key
        self.public = VerifyingKey(key.public_key())

    @classmethod
    def generate(cls) -> "SigningKey":
        return cls(ec.generate_private_key(ec.SECP256R1()))

    @classmethod
    def from_seed(cls, seed: bytes) -> "SigningKey":
        """Deterministic key for tests and reproducible benchmarks."""
        n = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551
        d = int.from_bytes(hashlib.sha256(b"csdjwt/es256-seed" + seed).digest(), "big") % (n - 1) + 1
        return cls(ec.derive_private_key(d, ec.SECP256R1()))

    @classmethod
    def from_bytes(cls, data: bytes) -> "SigningKey":
        if len(data) != 32:
            raise DecodeError("P-256 private scalar must be 32 bytes")
        try:
            return cls(ec.derive_private_key(int.from_bytes(data, "big"), ec.SECP256R1()))
        except ValueError as exc:
            raise DecodeError(f"invalid P-256 private key: {exc}") from None

    def to_bytes(self) -> bytes:
        return self._key.private_numbers().private_value.to_bytes(32, "big")

    def sign(self, message: bytes) -> bytes:
        r, s = decode_dss_signature(self._key.sign(message, _ECDSA))
        return r.to_bytes(32, "big") + s.to_bytes(32, "big")


def sign_compact(header: dict, payload: dict, key: SigningKey) -> str:
    signing_input = b64u_json(header) + "." + b64u_json(payload)
    return signing_input + "." + b64u_encode(key.sign(signing_input.encode("ascii")))


def split_compact(jwt: str) -> tuple[dict, dict, bytes, bytes]:
    """Return (header, payload, signature, signing_input) of a compact JWS."""
    parts = jwt.split(".")
    if len(parts) != 3:
        raise DecodeError("compact JWS must have three segments")
    header = json_from_b64u(parts[0])
    payload = json_from_b64u(parts[1])
    if not isinstance(header, dict) or not isinstance(payload, dict):
        raise DecodeError("JWS header and payload must be JSON objects")
    signature = b64u_decode(parts[2])
    return header, payload, signature, (parts[0] + "." + parts[1]).encode("ascii")

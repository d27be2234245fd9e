"""Issuer and holder identities, DID derivation and key files."""

from __future__ import annotations

import base64
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .accumulator import AccumulatorPublicKey, AccumulatorSecretKey, keypair_from_seed, setup
from .errors import DecodeError
from .jose import ES256, SigningKey, VerifyingKey, b64u_decode, b64u_encode
from .registry import ACC_CURVE, DidDocument, KeyEntry

DID_METHOD = "did:mock:"
SIGNING_KID = "key-1"
ACCUMULATOR_KID = "acc-1"


def did_for_key(public_key: VerifyingKey) -> str:
    """``did:mock:`` plus 8 base32 characters of the key's SHA-256."""
    digest = hashlib.sha256(public_key.to_bytes()).digest()
    return DID_METHOD + base64.b32encode(digest[:5]).decode("ascii").lower()


@dataclass(frozen=True)
class Identity:
    """A DID with its ES256 key and, for issuers, an accumulator keypair."""

    did: str
    signing_key: SigningKey
    acc_sk: AccumulatorSecretKey | None = None
    acc_pk: AccumulatorPublicKey | None = None

    @classmethod
    def generate(cls, *, issuer: bool = False) -> "Identity":
        sk = SigningKey.generate()
        acc_sk = acc_pk = None
        if issuer:
            _, acc_sk, acc_pk = setup(128)
        return cls(did_for_key(sk.public), sk, acc_sk, acc_pk)

    @classmethod
    def from_seed(cls, seed: bytes, *, issuer: bool = False) -> "Identity":
        sk = SigningKey.from_seed(seed)
        acc_sk = acc_pk = None
        if issuer:
            acc_sk, acc_pk = keypair_from_seed(seed)
        return cls(did_for_key(sk.public), sk, acc_sk, acc_pk)

    @property
    def is_issuer(self) -> bool:
        return self.acc_sk is not None

    @property
    def verifying_key(self) -> VerifyingKey:
        return self.signing_key.public

    @property
    def signing_kid(self) -> str:
        return f"{self.did}#{SIGNING_KID}"

    @property
    def accumulator_kid(self) -> str:
        return f"{self.did}#{ACCUMULATOR_KID}"

    def did_document(self) -> DidDocument:
        vks = (KeyEntry(self.signing_kid, ES256, self.verifying_key.to_bytes()),)
        aks = ()
        if self.acc_pk is not None:
            aks = (KeyEntry(self.accumulator_kid, ACC_CURVE, self.acc_pk.to_bytes()),)
        return DidDocument(self.did, vks, aks)


# --- key files -------------------------------------------------------------

def key_envelope(kind: str, curve: str, encoding: str, data: bytes) -> dict:
    return {"bytes_b64url": b64u_encode(data), "curve": curve, "encoding": encoding, "kind": kind}


def identity_to_json(ident: Identity) -> dict:
    keys = [key_envelope("signing-secret", "P-256", "scalar-be32", ident.signing_key.to_bytes())]
    if ident.acc_sk is not None:
        keys.append(key_envelope("accumulator-secret", ACC_CURVE, "scalar-be32", ident.acc_sk.to_bytes()))
        keys.append(key_envelope("accumulator-public", ACC_CURVE, "g2-compressed", ident.acc_pk.to_bytes()))
    return {"did": ident.did, "keys": keys}


def identity_from_json(obj: dict) -> Identity:
    try:
        by_kind = {k["kind"]: b64u_decode(k["bytes_b64url"]) for k in obj["keys"]}
        signing = SigningKey.from_bytes(by_kind["signing-secret"])
        acc_sk = acc_pk = None
        if "accumulator-secret" in by_kind:
            acc_sk = AccumulatorSecretKey.from_bytes(by_kind["accumulator-secret"])
            acc_pk = AccumulatorPublicKey.from_bytes(by_kind["accumulator-public"])
            if acc_sk.public_key() != acc_pk:
                raise DecodeError("accumulator public key does not match the secret")
        return Identity(obj["did"], signing, acc_sk, acc_pk)
    except (KeyError, TypeError) as exc:
        raise DecodeError(f"malformed key file: {exc}") from None


def save_identity(ident: Identity, path: str | os.PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(identity_to_json(ident), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_identity(path: str | os.PathLike) -> Identity:
    with open(path, encoding="utf-8") as fh:
        return identity_from_json(json.load(fh))

"""SD-JWT baseline: salted digests in the signed payload, salts kept by the holder.

Stored credential::

    <issuer JWT>~<disclosure>~...~<disclosure>~

Presentation::

    <issuer JWT>~<selected disclosures>~...~<KB-JWT>

A disclosure is ``b64u(["<salt>", key, value])`` and its digest
``b64u(sha256(disclosure))``. The key-binding JWT carries the nonce, the
audience and ``sd_hash``, the digest of everything before it.
"""

from __future__ import annotations

import random
import secrets
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .claims import Claim, check_unique_keys
from .errors import ACCEPT, ClaimError, DecodeError, DidNotFoundError, PresentationError, RejectReason, Verdict, reject
from .identity import Identity
from .jose import (
    ES256,
    VerifyingKey,
    b64u_decode,
    b64u_encode,
    b64u_json,
    json_from_b64u,
    sha256,
    sign_compact,
    split_compact,
)
from .nonce import NonceStore
from .registry import Registry

FORMAT = "sd-jwt"
KB_FORMAT = "kb+jwt"
SALT_BYTES = 16
SD_ALG = "sha-256"

DEFAULT_VCT = "https://credentials.example.com/synthetic_credential"
DEFAULT_VALIDITY = 365 * 24 * 3600
DEFAULT_SKEW = 60


def _rand_bytes(rng: random.Random | None, n: int) -> bytes:
    return secrets.token_bytes(n) if rng is None else rng.randbytes(n)


@dataclass(frozen=True)
class SaltedDisclosure:
    salt: bytes
    claim: Claim

    def __post_init__(self):
        if len(self.salt) < SALT_BYTES:
            raise ClaimError("salts must be at least 16 bytes")

    @property
    def encoded(self) -> str:
        return b64u_json([b64u_encode(self.salt), self.claim.key, self.claim.value])

    @property
    def digest(self) -> str:
        return b64u_encode(sha256(self.encoded.encode("ascii")))

    @classmethod
    def decode(cls, segment: str) -> "SaltedDisclosure":
        item = json_from_b64u(segment)
        if not isinstance(item, list) or len(item) != 3 or not isinstance(item[0], str):
            raise DecodeError("disclosure must be [salt, key, value]")
        try:
            out = cls(b64u_decode(item[0]), Claim(item[1], item[2]))
        except ClaimError as exc:
            raise DecodeError(str(exc)) from None
        if out.encoded != segment:
            raise DecodeError("disclosure is not canonically encoded")
        return out


def new_disclosures(claims: Sequence[Claim], rng: random.Random | None = None) -> list[SaltedDisclosure]:
    return [SaltedDisclosure(_rand_bytes(rng, SALT_BYTES), c) for c in claims]


@dataclass(frozen=True)
class IssuerJwt:
    """Decoded issuer-signed JWT common to the SD-JWT and Merkle baselines."""

    header: dict
    payload: dict
    signature: bytes

    @property
    def signing_input(self) -> str:
        return b64u_json(self.header) + "." + b64u_json(self.payload)

    @property
    def compact(self) -> str:
        return self.signing_input + "." + b64u_encode(self.signature)

    @classmethod
    def parse(cls, jwt: str, typ: str) -> "IssuerJwt":
        header, payload, sig, _ = split_compact(jwt)
        if header.get("typ") != typ or header.get("alg") != ES256:
            raise DecodeError(f"expected an ES256 {typ} token")
        out = cls(header, payload, sig)
        if out.compact != jwt:
            raise DecodeError("issuer JWT is not canonically encoded")
        return out

    @classmethod
    def sign(cls, header: dict, payload: dict, key) -> "IssuerJwt":
        return cls.parse(sign_compact(header, payload, key), header["typ"])

    def verify(self, registry: Registry) -> bool:
        doc = registry.resolve(self.payload["iss"])
        return doc.verification_key(self.header.get("kid")).verify(self.signature, self.signing_input.encode("ascii"))


def _base_payload(issuer: Identity, holder_did: str, holder_key: VerifyingKey | None, vct, issued_at, validity) -> dict:
    iat = int(time.time()) if issued_at is None else issued_at
    payload = {"exp": iat + validity, "iat": iat, "iss": issuer.did, "sub": holder_did, "vct": vct}
    if holder_key is not None:
        payload["cnf"] = {"jwk": holder_key.to_jwk()}
    return payload


# --- key binding -------------------------------------------------------------

@dataclass(frozen=True)
class KeyBinding:
    header: dict
    payload: dict
    signature: bytes

    @property
    def compact(self) -> str:
        return b64u_json(self.header) + "." + b64u_json(self.payload) + "." + b64u_encode(self.signature)

    @classmethod
    def create(cls, prefix: str, nonce: str, audience: str, holder: Identity, issued_at: int | None = None):
        payload = {
            "aud": audience,
            "iat": int(time.time()) if issued_at is None else issued_at,
            "nonce": nonce,
            "sd_hash": b64u_encode(sha256(prefix.encode("ascii"))),
        }
        header = {"alg": ES256, "typ": KB_FORMAT}
        header_, payload_, sig, _ = split_compact(sign_compact(header, payload, holder.signing_key))
        return cls(header_, payload_, sig)

    @classmethod
    def parse(cls, jwt: str) -> "KeyBinding":
        header, payload, sig, _ = split_compact(jwt)
        if header != {"alg": ES256, "typ": KB_FORMAT}:
            raise DecodeError("not a key-binding JWT")
        if set(payload) != {"aud", "iat", "nonce", "sd_hash"}:
            raise DecodeError("key-binding payload has unexpected members")
        out = cls(header, payload, sig)
        if out.compact != jwt:
            raise DecodeError("key-binding JWT is not canonically encoded")
        return out

    def check(
        self,
        prefix: str,
        issuer_jwt: IssuerJwt,
        expected_nonce: str,
        expected_audience: str | None,
        registry: Registry,
        nonce_store: NonceStore | None,
    ) -> Verdict | None:
        """Nonce, audience and holder signature; None when all pass."""
        if self.payload["nonce"] != expected_nonce:
            return reject(RejectReason.NONCE_MISMATCH)
        if nonce_store is not None and nonce_store.is_used(expected_nonce):
            return reject(RejectReason.NONCE_REUSED)
        if expected_audience is not None and self.payload["aud"] != expected_audience:
            return reject(RejectReason.AUDIENCE_MISMATCH)
        try:
            cnf = issuer_jwt.payload.get("cnf")
            if cnf is not None:
                holder_key = VerifyingKey.from_jwk(cnf["jwk"])
            else:
                holder_key = registry.resolve(issuer_jwt.payload["sub"]).verification_key()
        except DidNotFoundError as exc:
            return reject(RejectReason.UNKNOWN_DID, str(exc))
        except (DecodeError, KeyError, TypeError):
            return reject(RejectReason.MALFORMED, "bad cnf member")
        signing_input = (b64u_json(self.header) + "." + b64u_json(self.payload)).encode("ascii")
        if not holder_key.verify(self.signature, signing_input):
            return reject(RejectReason.BAD_SIGNATURE, "key binding")
        if self.payload["sd_hash"] != b64u_encode(sha256(prefix.encode("ascii"))):
            return reject(RejectReason.BAD_SIGNATURE, "sd_hash does not cover the presentation")
        return None


def check_issuer_jwt(issuer_jwt: IssuerJwt, registry: Registry, now: float | None, skew: int) -> Verdict | None:
    try:
        if not issuer_jwt.verify(registry):
            return reject(RejectReason.BAD_SIGNATURE, "issuer")
    except DidNotFoundError as exc:
        return reject(RejectReason.UNKNOWN_DID, str(exc))
    except (KeyError, TypeError):
        return reject(RejectReason.MALFORMED, "issuer JWT lacks iss")
    now = time.time() if now is None else now
    exp = issuer_jwt.payload.get("exp")
    if type(exp) is not int or now > exp + skew:
        return reject(RejectReason.EXPIRED)
    return None


# --- SD-JWT ------------------------------------------------------------------

@dataclass(frozen=True)
class SdJwtCredential:
    jwt: IssuerJwt
    disclosures: tuple[SaltedDisclosure, ...]

    @property
    def digests(self) -> list[str]:
        return list(self.jwt.payload["_sd"])

    @property
    def decoy_count(self) -> int:
        return len(self.digests) - len(self.disclosures)

    @property
    def holder_did(self) -> str:
        return self.jwt.payload["sub"]

    @property
    def claims(self) -> list[Claim]:
        return [d.claim for d in self.disclosures]

    def disclosure(self, key: str) -> SaltedDisclosure:
        for d in self.disclosures:
            if d.claim.key == key:
                return d
        raise PresentationError(f"unknown claim key: {key}")

    def to_compact(self) -> str:
        return self.jwt.compact + "~" + "".join(d.encoded + "~" for d in self.disclosures)

    @classmethod
    def from_compact(cls, token: str) -> "SdJwtCredential":
        parts = token.split("~")
        if len(parts) < 2 or parts[-1] != "":
            raise DecodeError("stored SD-JWT must end with '~'")
        jwt = IssuerJwt.parse(parts[0], FORMAT)
        sd = jwt.payload.get("_sd")
        if not isinstance(sd, list) or jwt.payload.get("_sd_alg") != SD_ALG:
            raise DecodeError("SD-JWT payload lacks _sd / _sd_alg")
        out = cls(jwt, tuple(SaltedDisclosure.decode(s) for s in parts[1:-1]))
        if not set(d.digest for d in out.disclosures) <= set(sd):
            raise DecodeError("stored disclosure has no digest in the payload")
        return out


@dataclass(frozen=True)
class SdJwtPresentation:
    jwt: IssuerJwt
    disclosures: tuple[SaltedDisclosure, ...]
    kb: KeyBinding

    def prefix(self) -> str:
        return self.jwt.compact + "~" + "".join(d.encoded + "~" for d in self.disclosures)

    def to_compact(self) -> str:
        return self.prefix() + self.kb.compact

    @classmethod
    def from_compact(cls, token: str) -> "SdJwtPresentation":
        parts = token.split("~")
        if len(parts) < 2:
            raise DecodeError("SD-JWT presentation needs a key-binding JWT")
        jwt = IssuerJwt.parse(parts[0], FORMAT)
        return cls(jwt, tuple(SaltedDisclosure.decode(s) for s in parts[1:-1]), KeyBinding.parse(parts[-1]))

    @property
    def nonce(self) -> str:
        return self.kb.payload["nonce"]


def sd_issue(
    issuer: Identity,
    holder_did: str,
    claims: Sequence[Claim],
    decoy_count: int = 0,
    *,
    holder_key: VerifyingKey | None = None,
    credential_type: str = DEFAULT_VCT,
    issued_at: int | None = None,
    validity: int = DEFAULT_VALIDITY,
    rng: random.Random | None = None,
) -> SdJwtCredential:
    """Issue an SD-JWT; ``rng`` makes salts, decoys and digest order reproducible."""
    check_unique_keys(claims, allow_reserved=True)
    if decoy_count < 0:
        raise ValueError("decoy_count must be non-negative")
    disclosures = new_disclosures(claims, rng)
    digests = [d.digest for d in disclosures]
    digests += [b64u_encode(sha256(_rand_bytes(rng, 32))) for _ in range(decoy_count)]
    (rng or random.SystemRandom()).shuffle(digests)
    payload = _base_payload(issuer, holder_did, holder_key, credential_type, issued_at, validity)
    payload["_sd"] = digests
    payload["_sd_alg"] = SD_ALG
    header = {"alg": ES256, "kid": issuer.signing_kid, "typ": FORMAT}
    return SdJwtCredential(IssuerJwt.sign(header, payload, issuer.signing_key), tuple(disclosures))


def sd_present(
    cred: SdJwtCredential,
    disclose_keys: Iterable[str],
    nonce: str,
    holder: Identity,
    *,
    audience: str = "",
    issued_at: int | None = None,
) -> SdJwtPresentation:
    if holder.did != cred.holder_did:
        raise PresentationError("credential was not issued to this holder")
    chosen = tuple(cred.disclosure(k) for k in dict.fromkeys(disclose_keys))
    unsigned = SdJwtPresentation(cred.jwt, chosen, None)
    kb = KeyBinding.create(unsigned.prefix(), nonce, audience, holder, issued_at)
    return SdJwtPresentation(cred.jwt, chosen, kb)


def sd_verify(
    pres: SdJwtPresentation,
    nonce: str,
    registry: Registry,
    *,
    audience: str | None = None,
    nonce_store: NonceStore | None = None,
    now: float | None = None,
    skew: int = DEFAULT_SKEW,
) -> Verdict:
    verdict = pres.kb.check(pres.prefix(), pres.jwt, nonce, audience, registry, nonce_store)
    if verdict is not None:
        return verdict
    verdict = check_issuer_jwt(pres.jwt, registry, now, skew)
    if verdict is not None:
        return verdict
    digests = pres.jwt.payload.get("_sd")
    if not isinstance(digests, list):
        return reject(RejectReason.MALFORMED, "missing _sd")
    known = set(digests)
    seen = set()
    for d in pres.disclosures:
        if d.digest not in known:
            return reject(RejectReason.DIGEST_NOT_FOUND, d.claim.key)
        if d.digest in seen:
            return reject(RejectReason.MALFORMED, "disclosure repeated")
        seen.add(d.digest)
    if nonce_store is not None and not nonce_store.consume(nonce):
        return reject(RejectReason.NONCE_REUSED)
    return ACCEPT

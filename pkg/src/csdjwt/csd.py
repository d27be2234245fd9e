"""Compact selective disclosure with an accumulator (issuance, presentation, verification).

Stored credential (the signature segment is empty, see VerifiableCredential)::

    header.payload.~E_1~...~E_m~      E_j = b64u(witness || claim bytes)

Presentation::

    header.payload.signature~D_iss~D_sub~D_1~...~D_k
    D_iss = b64u(["<witness>", "<issuer did>"])   (same for D_sub)
    D_j   = b64u(["<witness>", key, value])

The holder signs ``header.payload~D_iss~...~D_k``, i.e. the presentation
with the signature segment left out, so every disclosure is covered.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from . import accumulator as acc
from .accumulator import AccumulatorValue, Witness
from .claims import ISS_DID_KEY, RESERVED_KEYS, SUB_DID_KEY, Claim, canonicalize, check_unique_keys, hash_to_element, parse_canonical
from .errors import (
    ACCEPT,
    ClaimError,
    DecodeError,
    DidNotFoundError,
    PresentationError,
    RejectReason,
    Verdict,
    reject,
)
from .identity import ACCUMULATOR_KID, Identity
from .jose import (
    ES256,
    b64u_decode,
    b64u_encode,
    b64u_json,
    json_from_b64u,
    split_compact,
)
from .nonce import NonceStore
from .registry import Registry

FORMAT = "csd-jwt"
VP_FORMAT = "csd-vp"
HASH_ALG = "sha-256"
ACC_ALG = "bn254"

DEFAULT_VCT = "https://credentials.example.com/synthetic_credential"
DEFAULT_VALIDITY = 365 * 24 * 3600
DEFAULT_SKEW = 60

WITNESS_BYTES = 32


@dataclass(frozen=True)
class CredentialPayload:
    """Credential metadata and the accumulator value.

    The identifiers travel as the accumulated ``iss_did`` / ``sub_did``
    claims, so the encoded payload does not repeat them.
    """

    issuer_did: str
    holder_did: str
    credential_type: str
    issued_at: int
    expires_at: int
    accumulator_value: bytes
    accumulator_pk_ref: str = ACCUMULATOR_KID
    hash_alg: str = HASH_ALG
    acc_alg: str = ACC_ALG

    def __post_init__(self):
        if self.expires_at <= self.issued_at:
            raise ValueError("expires_at must be later than issued_at")

    def header_json(self) -> dict:
        return {"acc": self.acc_alg, "alg": "none", "hash": self.hash_alg, "typ": FORMAT}

    def payload_json(self) -> dict:
        return {
            "acc": b64u_encode(self.accumulator_value),
            "akid": self.accumulator_pk_ref,
            "exp": self.expires_at,
            "iat": self.issued_at,
            "vct": self.credential_type,
        }

    @classmethod
    def from_json(cls, header: dict, payload: dict, issuer_did: str, holder_did: str) -> "CredentialPayload":
        if header.get("typ") != FORMAT:
            raise DecodeError(f"unexpected token type {header.get('typ')!r}")
        try:
            out = cls(
                issuer_did=issuer_did,
                holder_did=holder_did,
                credential_type=payload["vct"],
                issued_at=payload["iat"],
                expires_at=payload["exp"],
                accumulator_value=b64u_decode(payload["acc"]),
                accumulator_pk_ref=payload["akid"],
                hash_alg=header["hash"],
                acc_alg=header["acc"],
            )
        except DecodeError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DecodeError(f"malformed credential payload: {exc}") from None
        if out.header_json() != header or out.payload_json() != payload:
            raise DecodeError("credential header or payload has unexpected members")
        return out


@dataclass(frozen=True)
class WvcEntry:
    """One (witness, claim) pair; the witness stays in its 32-byte encoding."""

    witness: bytes
    claim: Claim

    def stored_segment(self) -> str:
        return b64u_encode(self.witness + canonicalize(self.claim))

    @classmethod
    def from_stored_segment(cls, segment: str) -> "WvcEntry":
        raw = b64u_decode(segment)
        if len(raw) <= WITNESS_BYTES:
            raise DecodeError("WVC entry too short")
        try:
            claim = parse_canonical(raw[WITNESS_BYTES:])
        except ClaimError as exc:
            raise DecodeError(str(exc)) from None
        return cls(raw[:WITNESS_BYTES], claim)

    def disclosure_segment(self) -> str:
        w = b64u_encode(self.witness)
        if self.claim.key in RESERVED_KEYS:
            return b64u_json([w, self.claim.value])
        return b64u_json([w, self.claim.key, self.claim.value])


@dataclass(frozen=True)
class VerifiableCredential:
    """``{a, WVC}`` plus metadata.

    There is no issuer signature: only the trapdoor holder can produce
    witnesses that verify under the issuer's accumulator key, and that is
    what both the holder and verifiers check.
    """

    payload: CredentialPayload
    wvc: tuple[WvcEntry, ...]

    def _did_claims_consistent(self) -> bool:
        found = {e.claim.key: e.claim.value for e in self.wvc if e.claim.key in RESERVED_KEYS}
        count = sum(1 for e in self.wvc if e.claim.key in RESERVED_KEYS)
        return count == 2 and found == {ISS_DID_KEY: self.payload.issuer_did, SUB_DID_KEY: self.payload.holder_did}

    def to_compact(self) -> str:
        if not self._did_claims_consistent():
            raise PresentationError("WVC must hold exactly one iss_did and one sub_did claim matching the payload")
        head = b64u_json(self.payload.header_json()) + "." + b64u_json(self.payload.payload_json()) + "."
        return head + "~" + "".join(e.stored_segment() + "~" for e in self.wvc)

    @classmethod
    def from_compact(cls, token: str) -> "VerifiableCredential":
        parts = token.split("~")
        if len(parts) < 2 or parts[-1] != "":
            raise DecodeError("stored credential must end with '~'")
        header, payload, sig, _ = split_compact(parts[0])
        if sig:
            raise DecodeError("stored credential carries no signature")
        wvc = tuple(WvcEntry.from_stored_segment(s) for s in parts[1:-1])
        dids = {e.claim.key: e.claim.value for e in wvc if e.claim.key in RESERVED_KEYS}
        if set(dids) != RESERVED_KEYS:
            raise DecodeError("credential lacks its DID claims")
        vc = cls(CredentialPayload.from_json(header, payload, dids[ISS_DID_KEY], dids[SUB_DID_KEY]), wvc)
        try:
            encoded = vc.to_compact()
        except PresentationError as exc:
            raise DecodeError(str(exc)) from None
        if encoded != token:
            raise DecodeError("credential is not canonically encoded")
        return vc

    @property
    def claims(self) -> list[Claim]:
        return [e.claim for e in self.wvc]

    @property
    def user_claims(self) -> list[Claim]:
        return [e.claim for e in self.wvc if e.claim.key not in RESERVED_KEYS]

    def entry(self, key: str) -> WvcEntry:
        for e in self.wvc:
            if e.claim.key == key:
                return e
        raise PresentationError(f"unknown claim key: {key}")


@dataclass(frozen=True)
class PresentationRequest:
    nonce: str
    audience: str
    requested_keys: tuple[str, ...] | None = None


@dataclass(frozen=True)
class VerifiablePresentation:
    accumulator_value: bytes
    disclosed: tuple[WvcEntry, ...]
    nonce: str
    audience: str
    holder_did: str
    issuer_did: str
    expires_at: int
    signature: bytes = field(default=b"", repr=False)

    def header_json(self) -> dict:
        return {"alg": ES256, "typ": VP_FORMAT}

    def payload_json(self) -> dict:
        return {
            "acc": b64u_encode(self.accumulator_value),
            "aud": self.audience,
            "exp": self.expires_at,
            "nonce": self.nonce,
        }

    def _check_layout(self) -> None:
        keys = [e.claim.key for e in self.disclosed]
        if keys[:2] != [ISS_DID_KEY, SUB_DID_KEY] or any(k in RESERVED_KEYS for k in keys[2:]):
            raise PresentationError("DID claims must open the disclosure list, issuer first")

    def signing_input(self) -> str:
        self._check_layout()
        head = b64u_json(self.header_json()) + "." + b64u_json(self.payload_json())
        return head + "".join("~" + e.disclosure_segment() for e in self.disclosed)

    def to_compact(self) -> str:
        self._check_layout()
        if self.disclosed[0].claim.value != self.issuer_did or self.disclosed[1].claim.value != self.holder_did:
            raise PresentationError("DID claims disagree with the presentation's DIDs")
        head = b64u_json(self.header_json()) + "." + b64u_json(self.payload_json())
        return (
            head
            + "."
            + b64u_encode(self.signature)
            + "".join("~" + e.disclosure_segment() for e in self.disclosed)
        )

    @classmethod
    def from_compact(cls, token: str) -> "VerifiablePresentation":
        parts = token.split("~")
        if len(parts) < 3:
            raise DecodeError("presentation must carry the two DID disclosures")
        header, payload, sig, _ = split_compact(parts[0])
        if header != {"alg": ES256, "typ": VP_FORMAT}:
            raise DecodeError("not a CSD presentation header")
        try:
            acc_bytes = b64u_decode(payload["acc"])
            aud, exp, nonce = payload["aud"], payload["exp"], payload["nonce"]
        except (KeyError, TypeError) as exc:
            raise DecodeError(f"malformed presentation payload: {exc}") from None
        if not isinstance(aud, str) or not isinstance(nonce, str) or type(exp) is not int:
            raise DecodeError("malformed presentation payload")
        entries = []
        for i, seg in enumerate(parts[1:]):
            item = json_from_b64u(seg)
            if not isinstance(item, list) or not item or not isinstance(item[0], str):
                raise DecodeError("malformed disclosure")
            witness = b64u_decode(item[0])
            try:
                if i < 2:
                    if len(item) != 2 or not isinstance(item[1], str):
                        raise DecodeError("malformed DID disclosure")
                    claim = Claim(ISS_DID_KEY if i == 0 else SUB_DID_KEY, item[1])
                else:
                    if len(item) != 3 or item[1] in RESERVED_KEYS:
                        raise DecodeError("malformed claim disclosure")
                    claim = Claim(item[1], item[2])
            except ClaimError as exc:
                raise DecodeError(str(exc)) from None
            entries.append(WvcEntry(witness, claim))
        vp = cls(
            accumulator_value=acc_bytes,
            disclosed=tuple(entries),
            nonce=nonce,
            audience=aud,
            holder_did=entries[1].claim.value,
            issuer_did=entries[0].claim.value,
            expires_at=exp,
            signature=sig,
        )
        if vp.to_compact() != token:
            raise DecodeError("presentation is not canonically encoded")
        return vp

    @property
    def disclosed_claims(self) -> list[Claim]:
        return [e.claim for e in self.disclosed if e.claim.key not in RESERVED_KEYS]


# --- protocol ---------------------------------------------------------------

def issue_credential(
    issuer: Identity,
    holder_did: str,
    claims: Sequence[Claim],
    *,
    credential_type: str = DEFAULT_VCT,
    issued_at: int | None = None,
    validity: int = DEFAULT_VALIDITY,
    v0_seed: bytes | None = None,
) -> VerifiableCredential:
    if not issuer.is_issuer:
        raise PresentationError("issuer identity has no accumulator key")
    check_unique_keys(claims)
    all_claims = list(claims) + [Claim(ISS_DID_KEY, issuer.did), Claim(SUB_DID_KEY, holder_did)]
    elements = [hash_to_element(c) for c in all_claims]

    v0 = acc.init_accumulator(acc.DEFAULT_PARAMS, v0_seed)
    value = acc.accumulate_batch(v0, elements, issuer.acc_sk)
    witnesses = acc.compute_witnesses_batch(value, elements, issuer.acc_sk)

    iat = int(time.time()) if issued_at is None else issued_at
    payload = CredentialPayload(
        issuer_did=issuer.did,
        holder_did=holder_did,
        credential_type=credential_type,
        issued_at=iat,
        expires_at=iat + validity,
        accumulator_value=value.to_bytes(),
        accumulator_pk_ref=ACCUMULATOR_KID,
    )
    wvc = tuple(WvcEntry(w.to_bytes(), c) for w, c in zip(witnesses, all_claims))
    return VerifiableCredential(payload, wvc)


def generate_presentation(
    vc: VerifiableCredential,
    disclose_keys: Iterable[str] | None,
    request: PresentationRequest,
    holder: Identity,
) -> VerifiablePresentation:
    """Disclose ``disclose_keys`` (or the request's keys when None) plus the DID claims."""
    if holder.did != vc.payload.holder_did:
        raise PresentationError("credential was not issued to this holder")
    if disclose_keys is None:
        disclose_keys = request.requested_keys or ()
    keys = [k for k in dict.fromkeys(disclose_keys) if k not in RESERVED_KEYS]
    entries = [vc.entry(ISS_DID_KEY), vc.entry(SUB_DID_KEY)] + [vc.entry(k) for k in keys]
    unsigned = VerifiablePresentation(
        accumulator_value=vc.payload.accumulator_value,
        disclosed=tuple(entries),
        nonce=request.nonce,
        audience=request.audience,
        holder_did=vc.payload.holder_did,
        issuer_did=vc.payload.issuer_did,
        expires_at=vc.payload.expires_at,
    )
    sig = holder.signing_key.sign(unsigned.signing_input().encode("utf-8"))
    return replace(unsigned, signature=sig)


def verify_presentation(
    vp: VerifiablePresentation,
    expected_nonce: str,
    expected_audience: str,
    registry: Registry,
    *,
    nonce_store: NonceStore | None = None,
    now: float | None = None,
    skew: int = DEFAULT_SKEW,
    batch: bool = True,
) -> Verdict:
    # (1) freshness and audience
    if vp.nonce != expected_nonce:
        return reject(RejectReason.NONCE_MISMATCH)
    if nonce_store is not None and nonce_store.is_used(vp.nonce):
        return reject(RejectReason.NONCE_REUSED)
    if vp.audience != expected_audience:
        return reject(RejectReason.AUDIENCE_MISMATCH)

    # (2) holder signature
    try:
        holder_key = registry.resolve(vp.holder_did).verification_key()
        issuer_doc = registry.resolve(vp.issuer_did)
    except DidNotFoundError as exc:
        return reject(RejectReason.UNKNOWN_DID, str(exc))
    try:
        signing_input = vp.signing_input().encode("utf-8")
    except PresentationError as exc:
        return reject(RejectReason.DID_CLAIM_MISMATCH, str(exc))
    if not holder_key.verify(vp.signature, signing_input):
        return reject(RejectReason.BAD_SIGNATURE)

    # (3) identifier claims
    if vp.disclosed[0].claim.value != vp.issuer_did or vp.disclosed[1].claim.value != vp.holder_did:
        return reject(RejectReason.DID_CLAIM_MISMATCH)

    # (4) witnesses
    try:
        pk = issuer_doc.accumulator_key()
    except DidNotFoundError as exc:
        return reject(RejectReason.UNKNOWN_DID, str(exc))
    failed = _first_bad_witness(vp, pk, batch)
    if failed is not None:
        return reject(RejectReason.WITNESS_INVALID, failed)

    # (5) expiry
    now = time.time() if now is None else now
    if now > vp.expires_at + skew:
        return reject(RejectReason.EXPIRED)

    if nonce_store is not None and not nonce_store.consume(vp.nonce):
        return reject(RejectReason.NONCE_REUSED)
    return ACCEPT


def _first_bad_witness(vp: VerifiablePresentation, pk, batch: bool) -> str | None:
    """Key of the first disclosure whose witness fails, or None if all verify."""
    try:
        value = AccumulatorValue.from_bytes(vp.accumulator_value)
    except DecodeError:
        return "accumulator"
    if value.point is None:
        return "accumulator"
    pairs = []
    for e in vp.disclosed:
        try:
            w = Witness.from_bytes(e.witness)
        except DecodeError:
            return e.claim.key
        if w.point is None:
            return e.claim.key
        pairs.append((e.claim.key, hash_to_element(e.claim), w))
    if batch and acc.verify_witnesses_batch(value, [(y, w) for _, y, w in pairs], pk):
        return None
    for key, y, w in pairs:
        if not acc.verify_witness(value, y, w, pk):
            return key
    return None


def verify_credential(vc: VerifiableCredential, registry: Registry) -> bool:
    """Holder-side acceptance check: every stored witness verifies under the issuer's key."""
    if not vc._did_claims_consistent():
        return False
    keys = [e.claim.key for e in vc.wvc]
    if len(keys) != len(set(keys)):
        return False
    try:
        doc = registry.resolve(vc.payload.issuer_did)
        pk = doc.accumulator_key(f"{vc.payload.issuer_did}#{vc.payload.accumulator_pk_ref}")
        value = AccumulatorValue.from_bytes(vc.payload.accumulator_value)
        pairs = [(hash_to_element(e.claim), Witness.from_bytes(e.witness)) for e in vc.wvc]
    except (DecodeError, DidNotFoundError):
        return False
    return acc.verify_witnesses_batch(value, pairs, pk)

"""Merkle-tree baseline: salted leaves under a signed root, multiproof presentations.

Stored credential::

    <issuer JWT with root and depth>~<disclosure>~...~<disclosure>~

Presentation::

    <issuer JWT>~<disclosed leaves>~...~<proof>~<KB-JWT>

``proof`` is ``b64u({"idx": [...], "sib": [...]})``: the leaf indices of
the disclosures, in order, and the sibling digests the verifier cannot
compute itself, listed bottom-up and left to right within a level.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .claims import Claim, check_unique_keys
from .errors import ACCEPT, DecodeError, PresentationError, RejectReason, Verdict, reject
from .identity import Identity
from .jose import ES256, VerifyingKey, b64u_decode, b64u_encode, b64u_json, json_from_b64u, sha256
from .nonce import NonceStore
from .registry import Registry
from .sdjwt import (
    DEFAULT_SKEW,
    DEFAULT_VALIDITY,
    DEFAULT_VCT,
    IssuerJwt,
    KeyBinding,
    SaltedDisclosure,
    _base_payload,
    check_issuer_jwt,
    new_disclosures,
)

FORMAT = "mt-sd"
PAD_LEAF = sha256(b"csdjwt/merkle/padding")

_LEAF = b"\x00"
_NODE = b"\x01"


def leaf_hash(disclosure: str) -> bytes:
    return sha256(_LEAF + disclosure.encode("ascii"))


def node_hash(left: bytes, right: bytes) -> bytes:
    return sha256(_NODE + left + right)


def padded_size(n: int) -> int:
    """Leaf count after padding: the next power of two, and never below 2."""
    size = 2
    while size < n:
        size *= 2
    return size


def build_levels(leaves: Sequence[bytes]) -> list[list[bytes]]:
    """All tree levels, leaves (padded) first and the root level last."""
    level = list(leaves) + [PAD_LEAF] * (padded_size(len(leaves)) - len(leaves))
    levels = [level]
    while len(level) > 1:
        level = [node_hash(level[i], level[i + 1]) for i in range(0, len(level), 2)]
        levels.append(level)
    return levels


def multiproof(levels: list[list[bytes]], indices: Iterable[int]) -> list[bytes]:
    """Sibling digests needed to rebuild the root from the leaves at ``indices``."""
    known = set(indices)
    proof = []
    for level in levels[:-1]:
        for i in sorted(known):
            if i ^ 1 not in known:
                proof.append(level[i ^ 1])
        known = {i >> 1 for i in known}
    return proof


def root_from_proof(depth: int, leaves: dict[int, bytes], proof: Sequence[bytes]) -> bytes | None:
    """Recompute the root; None if the proof has the wrong number of digests."""
    known = dict(leaves)
    it = iter(proof)
    for _ in range(depth):
        nxt = {}
        for i in sorted(known):
            if i >> 1 in nxt:
                continue
            sib = known.get(i ^ 1)
            if sib is None:
                sib = next(it, None)
                if sib is None:
                    return None
            left, right = (known[i], sib) if i % 2 == 0 else (sib, known[i])
            nxt[i >> 1] = node_hash(left, right)
        known = nxt
    if next(it, None) is not None or set(known) != {0}:
        return None
    return known[0]


@dataclass(frozen=True)
class MerkleCredential:
    jwt: IssuerJwt
    disclosures: tuple[SaltedDisclosure, ...]

    @property
    def root(self) -> bytes:
        return b64u_decode(self.jwt.payload["root"])

    @property
    def depth(self) -> int:
        return self.jwt.payload["depth"]

    @property
    def holder_did(self) -> str:
        return self.jwt.payload["sub"]

    @property
    def claims(self) -> list[Claim]:
        return [d.claim for d in self.disclosures]

    def levels(self) -> list[list[bytes]]:
        return build_levels([leaf_hash(d.encoded) for d in self.disclosures])

    def index(self, key: str) -> int:
        for i, d in enumerate(self.disclosures):
            if d.claim.key == key:
                return i
        raise PresentationError(f"unknown claim key: {key}")

    def to_compact(self) -> str:
        return self.jwt.compact + "~" + "".join(d.encoded + "~" for d in self.disclosures)

    @classmethod
    def from_compact(cls, token: str) -> "MerkleCredential":
        parts = token.split("~")
        if len(parts) < 2 or parts[-1] != "":
            raise DecodeError("stored Merkle credential must end with '~'")
        jwt = IssuerJwt.parse(parts[0], FORMAT)
        out = cls(jwt, tuple(SaltedDisclosure.decode(s) for s in parts[1:-1]))
        try:
            root, depth = out.root, out.depth
        except (KeyError, TypeError) as exc:
            raise DecodeError(f"Merkle payload lacks {exc}") from None
        levels = out.levels()
        if len(levels) - 1 != depth or levels[-1][0] != root:
            raise DecodeError("stored leaves do not match the signed root")
        return out


@dataclass(frozen=True)
class MerklePresentation:
    jwt: IssuerJwt
    disclosures: tuple[SaltedDisclosure, ...]
    indices: tuple[int, ...]
    siblings: tuple[bytes, ...]
    kb: KeyBinding

    def proof_segment(self) -> str:
        return b64u_json({"idx": list(self.indices), "sib": [b64u_encode(s) for s in self.siblings]})

    def prefix(self) -> str:
        discs = "".join(d.encoded + "~" for d in self.disclosures)
        return self.jwt.compact + "~" + discs + self.proof_segment() + "~"

    def to_compact(self) -> str:
        return self.prefix() + self.kb.compact

    @classmethod
    def from_compact(cls, token: str) -> "MerklePresentation":
        parts = token.split("~")
        if len(parts) < 3:
            raise DecodeError("Merkle presentation needs a proof and a key-binding JWT")
        jwt = IssuerJwt.parse(parts[0], FORMAT)
        proof = json_from_b64u(parts[-2])
        try:
            indices = tuple(proof["idx"])
            siblings = tuple(b64u_decode(s) for s in proof["sib"])
        except (KeyError, TypeError) as exc:
            raise DecodeError(f"malformed proof segment: {exc}") from None
        if set(proof) != {"idx", "sib"} or not all(type(i) is int for i in indices):
            raise DecodeError("malformed proof segment")
        out = cls(jwt, tuple(SaltedDisclosure.decode(s) for s in parts[1:-2]), indices, siblings, KeyBinding.parse(parts[-1]))
        if out.to_compact() != token:
            raise DecodeError("presentation is not canonically encoded")
        return out

    @property
    def nonce(self) -> str:
        return self.kb.payload["nonce"]


def mt_issue(
    issuer: Identity,
    holder_did: str,
    claims: Sequence[Claim],
    *,
    holder_key: VerifyingKey | None = None,
    credential_type: str = DEFAULT_VCT,
    issued_at: int | None = None,
    validity: int = DEFAULT_VALIDITY,
    rng: random.Random | None = None,
) -> MerkleCredential:
    check_unique_keys(claims, allow_reserved=True)
    disclosures = new_disclosures(claims, rng)
    levels = build_levels([leaf_hash(d.encoded) for d in disclosures])
    payload = _base_payload(issuer, holder_did, holder_key, credential_type, issued_at, validity)
    payload["depth"] = len(levels) - 1
    payload["root"] = b64u_encode(levels[-1][0])
    header = {"alg": ES256, "kid": issuer.signing_kid, "typ": FORMAT}
    return MerkleCredential(IssuerJwt.sign(header, payload, issuer.signing_key), tuple(disclosures))


def mt_present(
    cred: MerkleCredential,
    disclose_keys: Iterable[str],
    nonce: str,
    holder: Identity,
    *,
    audience: str = "",
    issued_at: int | None = None,
) -> MerklePresentation:
    if holder.did != cred.holder_did:
        raise PresentationError("credential was not issued to this holder")
    indices = sorted({cred.index(k) for k in disclose_keys})
    if not indices:
        raise PresentationError("a Merkle presentation must disclose at least one claim")
    siblings = tuple(multiproof(cred.levels(), indices))
    chosen = tuple(cred.disclosures[i] for i in indices)
    unsigned = MerklePresentation(cred.jwt, chosen, tuple(indices), siblings, None)
    kb = KeyBinding.create(unsigned.prefix(), nonce, audience, holder, issued_at)
    return MerklePresentation(cred.jwt, chosen, tuple(indices), siblings, kb)


def mt_verify(
    pres: MerklePresentation,
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
    try:
        depth = pres.jwt.payload["depth"]
        root = b64u_decode(pres.jwt.payload["root"])
    except (KeyError, TypeError, DecodeError):
        return reject(RejectReason.MALFORMED, "missing root")
    if type(depth) is not int or not 1 <= depth <= 32:
        return reject(RejectReason.MALFORMED, "bad depth")
    idx = pres.indices
    if len(idx) != len(pres.disclosures) or len(set(idx)) != len(idx) or any(not 0 <= i < 1 << depth for i in idx):
        return reject(RejectReason.ROOT_MISMATCH, "bad leaf indices")
    leaves = {i: leaf_hash(d.encoded) for i, d in zip(idx, pres.disclosures)}
    if root_from_proof(depth, leaves, pres.siblings) != root:
        return reject(RejectReason.ROOT_MISMATCH)
    if nonce_store is not None and not nonce_store.consume(nonce):
        return reject(RejectReason.NONCE_REUSED)
    return ACCEPT

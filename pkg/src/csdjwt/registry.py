"""Mock verifiable data registry.

Documents are immutable once registered. The optional backing file is an
append-only JSON Lines log, one document per line, guarded by an exclusive
``flock`` while appending so several processes can share it.
"""

from __future__ import annotations

import fcntl
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from .accumulator import AccumulatorPublicKey
from .errors import DecodeError, DidNotFoundError, DuplicateDidError
from .jose import ES256, VerifyingKey, b64u_decode, b64u_encode, canonical_json

ACC_CURVE = "bn254"


@dataclass(frozen=True)
class KeyEntry:
    kid: str
    scheme: str
    public_key: bytes


@dataclass(frozen=True)
class DidDocument:
    did: str
    verification_keys: tuple[KeyEntry, ...] = ()
    accumulator_keys: tuple[KeyEntry, ...] = ()

    def __post_init__(self):
        if not self.did.startswith("did:"):
            raise ValueError(f"not a DID: {self.did!r}")
        kids = [k.kid for k in self.verification_keys + self.accumulator_keys]
        if len(kids) != len(set(kids)):
            raise ValueError("key ids must be unique within a document")

    def to_json(self) -> dict:
        def entries(keys, tag):
            return [{"id": k.kid, tag: k.scheme, "publicKey": b64u_encode(k.public_key)} for k in keys]

        return {
            "accumulatorKeys": entries(self.accumulator_keys, "curve"),
            "id": self.did,
            "verificationKeys": entries(self.verification_keys, "scheme"),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DidDocument":
        try:
            vks = tuple(KeyEntry(e["id"], e["scheme"], b64u_decode(e["publicKey"])) for e in obj["verificationKeys"])
            aks = tuple(KeyEntry(e["id"], e["curve"], b64u_decode(e["publicKey"])) for e in obj["accumulatorKeys"])
            return cls(obj["id"], vks, aks)
        except (KeyError, TypeError) as exc:
            raise DecodeError(f"malformed DID document: {exc}") from None

    def verification_key(self, kid: str | None = None) -> VerifyingKey:
        for entry in self.verification_keys:
            if entry.scheme == ES256 and (kid is None or entry.kid == kid):
                return VerifyingKey.from_bytes(entry.public_key)
        raise DidNotFoundError(f"{self.did} has no ES256 key {kid or ''}".strip())

    def accumulator_key(self, kid: str | None = None) -> AccumulatorPublicKey:
        for entry in self.accumulator_keys:
            if entry.scheme == ACC_CURVE and (kid is None or entry.kid == kid):
                return _acc_key(entry.public_key)
        raise DidNotFoundError(f"{self.did} has no accumulator key {kid or ''}".strip())


_ACC_KEY_CACHE: dict[bytes, AccumulatorPublicKey] = {}


def _acc_key(data: bytes) -> AccumulatorPublicKey:
    # decoding runs a subgroup check, worth remembering per key
    key = _ACC_KEY_CACHE.get(data)
    if key is None:
        key = AccumulatorPublicKey.from_bytes(data)
        _ACC_KEY_CACHE[data] = key
    return key


class Registry:
    """DID -> document map, in memory or backed by a JSON Lines file."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._docs: dict[str, DidDocument] = {}
        self._lock = threading.Lock()
        self._offset = 0
        if self.path is not None and self.path.exists():
            self._reload()

    def _reload(self) -> None:
        with open(self.path, "rb") as fh:
            fh.seek(self._offset)
            for line in fh:
                if not line.endswith(b"\n"):
                    break  # partial write in progress
                self._offset += len(line)
                line = line.strip()
                if line:
                    doc = DidDocument.from_json(json.loads(line))
                    self._docs.setdefault(doc.did, doc)

    def register(self, doc: DidDocument) -> None:
        with self._lock:
            if self.path is None:
                if doc.did in self._docs:
                    raise DuplicateDidError(doc.did)
                self._docs[doc.did] = doc
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "ab+") as fh:
                fcntl.flock(fh, fcntl.LOCK_EX)
                try:
                    self._reload()
                    if doc.did in self._docs:
                        raise DuplicateDidError(doc.did)
                    line = (canonical_json(doc.to_json()) + "\n").encode("utf-8")
                    fh.write(line)
                    fh.flush()
                    os.fsync(fh.fileno())
                finally:
                    fcntl.flock(fh, fcntl.LOCK_UN)
                self._reload()

    def resolve(self, did: str) -> DidDocument:
        doc = self._docs.get(did)
        if doc is None and self.path is not None and self.path.exists():
            with self._lock:
                self._reload()
            doc = self._docs.get(did)
        if doc is None:
            raise DidNotFoundError(did)
        return doc

    def __contains__(self, did: str) -> bool:
        try:
            self.resolve(did)
        except DidNotFoundError:
            return False
        return True

    def __len__(self) -> int:
        return len(self._docs)

import json
import os
import threading

import pytest

from csdjwt.errors import DidNotFoundError, DuplicateDidError
from csdjwt.identity import Identity, did_for_key, identity_from_json, identity_to_json, load_identity, save_identity
from csdjwt.nonce import NonceStore, new_nonce
from csdjwt.registry import DidDocument, Registry


def test_did_format():
    ident = Identity.from_seed(b"x")
    assert ident.did.startswith("did:mock:") and len(ident.did) == len("did:mock:") + 8
    assert ident.did == did_for_key(ident.verifying_key)
    assert Identity.from_seed(b"x").did == ident.did


def test_document_json_roundtrip():
    ident = Identity.from_seed(b"i", issuer=True)
    doc = ident.did_document()
    again = DidDocument.from_json(json.loads(json.dumps(doc.to_json())))
    assert again.verification_key() == ident.verifying_key
    assert again.accumulator_key() == ident.acc_pk
    assert Identity.from_seed(b"h").did_document().accumulator_keys == ()


def test_memory_registry():
    reg = Registry()
    ident = Identity.from_seed(b"a")
    reg.register(ident.did_document())
    assert ident.did in reg and len(reg) == 1
    with pytest.raises(DuplicateDidError):
        reg.register(ident.did_document())
    with pytest.raises(DidNotFoundError):
        reg.resolve("did:mock:missing")


def test_file_registry_is_shared(tmp_path):
    path = tmp_path / "reg.jsonl"
    a, b = Registry(path), Registry(path)
    ident = Identity.from_seed(b"a", issuer=True)
    a.register(ident.did_document())
    assert b.resolve(ident.did).accumulator_key() == ident.acc_pk
    with pytest.raises(DuplicateDidError):
        b.register(ident.did_document())
    assert len(path.read_text().splitlines()) == 1


def test_concurrent_registration(tmp_path):
    path = tmp_path / "reg.jsonl"
    errors = []

    def worker(i):
        try:
            Registry(path).register(Identity.from_seed(b"same").did_document())
        except DuplicateDidError:
            errors.append(i)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(errors) == 7
    assert len(path.read_text().splitlines()) == 1


def test_identity_file_roundtrip(tmp_path):
    ident = Identity.from_seed(b"k", issuer=True)
    path = tmp_path / "key.json"
    save_identity(ident, path)
    assert os.stat(path).st_mode & 0o777 == 0o600
    loaded = load_identity(path)
    assert loaded.did == ident.did and loaded.acc_sk == ident.acc_sk
    assert identity_from_json(identity_to_json(ident)).did == ident.did


def test_nonces(tmp_path):
    assert len({new_nonce() for _ in range(100)}) == 100
    with pytest.raises(ValueError):
        new_nonce(8)
    store = NonceStore(tmp_path / "n")
    n = new_nonce()
    assert not store.is_used(n)
    assert store.consume(n)
    assert not store.consume(n)
    assert NonceStore(tmp_path / "n").is_used(n)


def test_concurrent_consume(tmp_path):
    n = new_nonce()
    wins = []
    threads = [threading.Thread(target=lambda: wins.append(NonceStore(tmp_path / "n").consume(n))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert wins.count(True) == 1

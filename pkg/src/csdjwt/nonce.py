"""Verifier-side nonces: issuance and a single-use replay set."""

from __future__ import annotations

import fcntl
import os
import secrets
import threading
from pathlib import Path

from .jose import b64u_encode

NONCE_BYTES = 16


def new_nonce(nbytes: int = NONCE_BYTES) -> str:
    if nbytes < 16:
        raise ValueError("nonces need at least 128 bits")
    return b64u_encode(secrets.token_bytes(nbytes))


class NonceStore:
    """Set of consumed nonces with atomic check-and-insert.

    With a ``path`` the set is mirrored to a text file (one nonce per line)
    so that separate verifier processes share it.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._used: set[str] = set()
        self._lock = threading.Lock()

    def _load(self, fh) -> None:
        fh.seek(0)
        self._used.update(line.strip() for line in fh.read().decode("utf-8").splitlines() if line.strip())

    def is_used(self, nonce: str) -> bool:
        with self._lock:
            if nonce in self._used:
                return True
            if self.path is not None and self.path.exists():
                with open(self.path, "rb") as fh:
                    self._load(fh)
            return nonce in self._used

    def consume(self, nonce: str) -> bool:
        """Mark ``nonce`` used; False if somebody already did."""
        with self._lock:
            if self.path is None:
                if nonce in self._used:
                    return False
                self._used.add(nonce)
                return True
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "ab+") as fh:
                fcntl.flock(fh, fcntl.LOCK_EX)
                try:
                    self._load(fh)
                    if nonce in self._used:
                        return False
                    fh.write((nonce + "\n").encode("utf-8"))
                    fh.flush()
                    os.fsync(fh.fileno())
                finally:
                    fcntl.flock(fh, fcntl.LOCK_UN)
            self._used.add(nonce)
            return True

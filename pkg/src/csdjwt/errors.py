"""Exception types and verification outcomes shared across mechanisms."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class CsdError(Exception):
    """Base class for every error raised by this package."""


class DecodeError(CsdError, ValueError):
    """A token, segment, key or point could not be parsed."""


class ClaimError(CsdError, ValueError):
    """A claim or claim set violates its invariants."""


class AccumulatorError(CsdError, ValueError):
    """Invalid accumulator input (duplicate element, trapdoor collision, ...)."""


class RegistryError(CsdError):
    pass


class DuplicateDidError(RegistryError):
    pass


class DidNotFoundError(RegistryError, KeyError):
    def __str__(self) -> str:
        return f"DID not found: {self.args[0]}"


class PresentationError(CsdError, ValueError):
    """The holder cannot build the requested presentation."""


class RejectReason(str, Enum):
    UNKNOWN_DID = "unknown_did"
    BAD_SIGNATURE = "bad_signature"
    NONCE_MISMATCH = "nonce_mismatch"
    NONCE_REUSED = "nonce_reused"
    AUDIENCE_MISMATCH = "audience_mismatch"
    WITNESS_INVALID = "witness_invalid"
    DID_CLAIM_MISMATCH = "did_claim_mismatch"
    EXPIRED = "expired"
    DIGEST_NOT_FOUND = "digest_not_found"
    ROOT_MISMATCH = "root_mismatch"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a presentation check; truthy only on accept."""

    accepted: bool
    reason: RejectReason | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accept"
        text = f"reject({self.reason.value})"
        return f"{text}: {self.detail}" if self.detail else text


ACCEPT = Verdict(True)


def reject(reason: RejectReason, detail: str = "") -> Verdict:
    return Verdict(False, reason, detail)
